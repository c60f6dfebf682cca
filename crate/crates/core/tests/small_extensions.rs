//! Exhaustive check: with three classes, class 1 regular and separated, and
//! both diagonal blocks passing (α) and (β) at their own size, an extension
//! space of dimension at most 1 occurs only in the sharing patterns B to F.

use dsp_core::blockext::{delta_of_split, enumerate_splits, CaseTag};
use dsp_core::partitions::partitions_of;
use dsp_core::{ClassSpec, GaussianRational, Instance, Mode};

fn class(mults: &[usize], offset: i64) -> ClassSpec {
    let entries: Vec<_> = mults
        .iter()
        .enumerate()
        .map(|(i, &m)| (GaussianRational::int(offset + i as i64), m))
        .collect();
    ClassSpec::diagonal(Mode::Additive, &entries).unwrap()
}

#[test]
fn small_extension_spaces_are_the_listed_cases() {
    let mut seen = std::collections::BTreeMap::new();
    let mut exceptions = Vec::new();
    for n in 4..=8 {
        let shapes = partitions_of(n);
        for l in n.div_ceil(2)..=n - 2 {
            for a in &shapes {
                for b in &shapes {
                    let inst = Instance::new(
                        Mode::Additive,
                        vec![class(&vec![1; n], 0), class(a.parts(), 100), class(b.parts(), 200)],
                    )
                    .unwrap();
                    for sp in enumerate_splits(&inst, l).unwrap() {
                        // class 1: first l eigenvalues go up
                        if sp.parts[0].iter().take(l).any(|&p| p != (1, 0)) {
                            continue;
                        }
                        let rep = delta_of_split(&inst, &sp);
                        if !(rep.upper_alpha_beta && rep.lower_alpha_beta) {
                            continue;
                        }
                        let ok = match rep.case_tag {
                            CaseTag::B => rep.delta == 0,
                            CaseTag::None => rep.delta >= 2,
                            _ => rep.delta == 1,
                        };
                        *seen.entry(rep.case_tag.to_string()).or_insert(0usize) += 1;
                        if !ok {
                            exceptions.push((n, l, sp.parts.clone(), rep.delta, rep.case_tag));
                        }
                    }
                }
            }
        }
    }
    for e in exceptions.iter().take(20) {
        eprintln!("{e:?}");
    }
    eprintln!("{seen:?}");
    assert!(exceptions.is_empty(), "{} exceptions", exceptions.len());
}
