//! The verdict engine. Applies the existence criteria in a fixed order and
//! records every rule that fired together with the numbers it used.

use std::fmt;

use serde::Serialize;

use crate::blockext::{alpha_beta_at, delta_of_split, enumerate_splits, split_subinstances};
use crate::classes::{validate_instance, ClassSpec, DerivedQuantities, Instance, Mode};
use crate::error::Error;
use crate::genericity::{all_relations, min_relation_n, RelationWitness, DEFAULT_GENERICITY_BOUND};
use crate::partitions::{corresponding_diagonal, Partition};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    NoTuples,
    WeakUnsolvable,
    DspSolvable,
    DspUnsolvableWeakSolvable,
    WeakSolvableDspUnknown,
    Unknown,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Status::NoTuples => "NO_TUPLES",
            Status::WeakUnsolvable => "WEAK_UNSOLVABLE",
            Status::DspSolvable => "DSP_SOLVABLE",
            Status::DspUnsolvableWeakSolvable => "DSP_UNSOLVABLE_WEAK_SOLVABLE",
            Status::WeakSolvableDspUnknown => "WEAK_SOLVABLE_DSP_UNKNOWN",
            Status::Unknown => "UNKNOWN",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub rule: &'static str,
    /// The mathematical statement the rule applies.
    pub justification: &'static str,
    pub facts: Vec<(String, String)>,
}

impl TraceEntry {
    fn new(rule: &'static str, justification: &'static str) -> Self {
        TraceEntry {
            rule,
            justification,
            facts: Vec::new(),
        }
    }

    fn fact(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.facts.push((key.to_string(), value.to_string()));
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RigidFamily {
    Hypergeometric,
    Even,
    Odd,
    Extra,
}

impl fmt::Display for RigidFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RigidFamily::Hypergeometric => "hypergeometric",
            RigidFamily::Even => "even",
            RigidFamily::Odd => "odd",
            RigidFamily::Extra => "extra",
        };
        f.write_str(s)
    }
}

/// Outcome of a sufficient-only obstruction search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Detection {
    Fired(Vec<(String, String)>),
    NotFired,
    /// A bounded search gave up; the reason is attached.
    Unknown(String),
}

impl Detection {
    pub fn fired(&self) -> bool {
        matches!(self, Detection::Fired(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub status: Status,
    pub trace: Vec<TraceEntry>,
    pub derived: DerivedQuantities,
    /// Smallest relation size, when the search ran to completion.
    pub min_relation_n: Option<usize>,
    pub genericity_known: bool,
    pub case_a: bool,
    pub rigid_family: Option<RigidFamily>,
    /// Bounded searches that gave up.
    pub unknown_flags: Vec<String>,
}

/// `d_1 + ... + d_{p+1} >= 2n^2 - 2`.
pub fn check_alpha(dq: &DerivedQuantities) -> bool {
    dq.d_sum() + 2 >= 2 * dq.n * dq.n
}

/// For every `j`, the `r` values other than `r_j` add up to at least `n`.
pub fn check_beta(dq: &DerivedQuantities) -> bool {
    let total: usize = dq.r.iter().sum();
    dq.r.iter().all(|&rj| total - rj >= dq.n)
}

fn shapes(inst: &Instance) -> Vec<Partition> {
    inst.classes()
        .iter()
        .map(|c| corresponding_diagonal(c.jnf()).as_partition().clone())
        .collect()
}

/// Three non-scalar classes of even size `n >= 4` whose second and third
/// classes have (corresponding diagonal) multiplicities `(n/2, n/2)`.
/// Scalar classes only shift eigenvalues and are ignored.
pub fn case_a_shape(n: usize, mvs: &[Partition]) -> bool {
    let half = Partition::new(vec![n / 2, n / 2]);
    let rest: Vec<&Partition> = mvs.iter().filter(|m| m.len() > 1).collect();
    rest.len() == 3 && n >= 4 && n.is_multiple_of(2) && *rest[1] == half && *rest[2] == half
}

pub fn detect_case_a(inst: &Instance) -> bool {
    case_a_shape(inst.n(), &shapes(inst))
}

/// Matches the multiplicities of classes 2 and 3 (class 1 regular) against
/// the four rigid families. Where families overlap at small `n` the earlier
/// of hypergeometric, even, odd, extra is reported.
pub fn rigid_family_shape(n: usize, mvs: &[Partition]) -> Option<RigidFamily> {
    if mvs.len() != 3 || n < 2 || mvs[0] != Partition::ones(n) {
        return None;
    }
    let pair = |a: Vec<usize>, b: Vec<usize>| {
        let (a, b) = (Partition::new(a), Partition::new(b));
        (mvs[1] == a && mvs[2] == b) || (mvs[1] == b && mvs[2] == a)
    };
    if pair(vec![1; n], vec![n - 1, 1]) {
        return Some(RigidFamily::Hypergeometric);
    }
    if n.is_multiple_of(2) && n >= 4 && pair(vec![n / 2, n / 2 - 1, 1], vec![n / 2, n / 2]) {
        return Some(RigidFamily::Even);
    }
    if n % 2 == 1 && n >= 3 && pair(vec![(n - 1) / 2, (n - 1) / 2, 1], vec![n.div_ceil(2), (n - 1) / 2]) {
        return Some(RigidFamily::Odd);
    }
    if n == 6 && pair(vec![2, 2, 2], vec![4, 2]) {
        return Some(RigidFamily::Extra);
    }
    None
}

pub fn classify_rigid_family(inst: &Instance) -> Option<RigidFamily> {
    rigid_family_shape(inst.n(), &shapes(inst))
}

/// `d` and `r` computed from multiplicities alone.
pub fn shape_quantities(n: usize, mvs: &[Partition]) -> (Vec<usize>, Vec<usize>) {
    let d = mvs
        .iter()
        .map(|m| n * n - m.parts().iter().map(|x| x * x).sum::<usize>())
        .collect();
    let r = mvs.iter().map(|m| n - m.parts().first().copied().unwrap_or(0)).collect();
    (d, r)
}

/// Verdict for a multiplicity pattern under the assumption that the
/// eigenvalues are generic and class 1 is regular: (α) and (β) decide.
pub fn shape_status(n: usize, mvs: &[Partition]) -> Status {
    let (d, r) = shape_quantities(n, mvs);
    if alpha_beta_at(n, &d, &r) {
        Status::DspSolvable
    } else {
        Status::WeakUnsolvable
    }
}

fn fact_list(pairs: &[(&str, String)]) -> Vec<(String, String)> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

/// Removes one copy of the eigenvalue in slot `slot[j]` from every class.
fn deleted_instance(inst: &Instance, slot: &[usize]) -> crate::error::Result<Instance> {
    let classes = inst
        .classes()
        .iter()
        .zip(slot)
        .map(|(c, &k)| {
            let entries: Vec<_> = c
                .eigenvalues()
                .iter()
                .zip(c.multiplicities())
                .enumerate()
                .map(|(i, (v, m))| (v.clone(), if i == k { m - 1 } else { m }))
                .filter(|(_, m)| *m > 0)
                .collect();
            ClassSpec::diagonal(inst.mode(), &entries)
        })
        .collect::<crate::error::Result<Vec<_>>>()?;
    Instance::new(inst.mode(), classes)
}

/// The single-relation obstruction: a 1-relation through the dominant
/// eigenvalue of every class `j >= 2`, unique up to complement, with
/// `r_2 + ... + r_{p+1} = n`, forces every tuple with trivial centralizer to
/// be reducible.
pub fn detect_extn1_obstruction(inst: &Instance) -> Detection {
    let n = inst.n();
    let Ok(dq) = validate_instance(inst) else {
        return Detection::NotFired;
    };
    if n <= 2 || !dq.convention2 || !dq.trace_ok || !inst.all_diagonalizable() || dq.r_tail_sum() != n {
        return Detection::NotFired;
    }
    // dominant eigenvalue of each class j >= 2
    let mut slots = vec![0usize];
    for c in &inst.classes()[1..] {
        let mults = c.multiplicities();
        let top = *mults.iter().max().unwrap_or(&0);
        if 2 * top <= n || mults.iter().filter(|&&m| m == top).count() != 1 {
            return Detection::NotFired;
        }
        slots.push(mults.iter().position(|&m| m == top).unwrap_or(0));
    }
    if n > DEFAULT_GENERICITY_BOUND {
        return Detection::Unknown(format!(
            "relation enumeration bound {DEFAULT_GENERICITY_BOUND} exceeded by n = {n}"
        ));
    }
    let relations = match all_relations(inst, DEFAULT_GENERICITY_BOUND) {
        Ok(r) => r,
        Err(e) => return Detection::Unknown(e.to_string()),
    };
    let through_dominant = |w: &RelationWitness| {
        w.size == 1 && w.picks[1..].iter().zip(&slots[1..]).all(|(e, &k)| e[k] == 1)
    };
    let Some(base) = relations.iter().find(|w| through_dominant(w)) else {
        return Detection::NotFired;
    };
    let complement = base.complement(inst);
    if relations.iter().any(|w| w.picks != base.picks && w.picks != complement.picks) {
        return Detection::NotFired;
    }
    slots[0] = base.picks[0].iter().position(|&e| e == 1).unwrap_or(0);
    let Ok(deleted) = deleted_instance(inst, &slots) else {
        return Detection::NotFired;
    };
    let Ok(ddq) = validate_instance(&deleted) else {
        return Detection::NotFired;
    };
    if !check_beta(&ddq) || detect_case_a(&deleted) {
        return Detection::NotFired;
    }
    let mut facts = fact_list(&[
        ("relation", format!("{:?}", base.picks)),
        ("r_tail_sum", dq.r_tail_sum().to_string()),
        ("relations_total", relations.len().to_string()),
    ]);
    if inst.mode() == Mode::Multiplicative {
        facts.push((
            "note".into(),
            "multiplicative mode: hypotheses mirrored from the additive statement".into(),
        ));
    }
    Detection::Fired(facts)
}

/// The rigid coexistence obstruction: for `kappa = 2`, a two-block split
/// whose blocks each satisfy their own trace condition and (α), (β), with a
/// nonzero extension space, yields a reducible tuple with trivial
/// centralizer, which rules out irreducible ones.
pub fn detect_rigid_reducible_obstruction(inst: &Instance) -> Detection {
    let n = inst.n();
    let Ok(dq) = validate_instance(inst) else {
        return Detection::NotFired;
    };
    if !dq.convention2 || !dq.trace_ok || !inst.all_diagonalizable() || dq.kappa != 2 {
        return Detection::NotFired;
    }
    if !check_alpha(&dq) || !check_beta(&dq) {
        return Detection::NotFired;
    }
    for l in 1..=n / 2 {
        let splits = match enumerate_splits(inst, l) {
            Ok(s) => s,
            Err(e) => return Detection::Unknown(e.to_string()),
        };
        for sp in splits {
            let rep = delta_of_split(inst, &sp);
            if rep.upper_trace_ok
                && rep.lower_trace_ok
                && rep.upper_alpha_beta
                && rep.lower_alpha_beta
                && rep.delta >= 1
                && split_subinstances(inst, &sp).is_ok()
            {
                return Detection::Fired(fact_list(&[
                    ("l", l.to_string()),
                    ("split", format!("{:?}", sp.parts)),
                    ("s", format!("{:?}", rep.s)),
                    ("delta", rep.delta.to_string()),
                ]));
            }
        }
    }
    Detection::NotFired
}

pub fn verdict(inst: &Instance) -> Verdict {
    // an Instance can only be built valid, so this cannot fail
    let dq = validate_instance(inst).unwrap_or_else(|e| panic!("invalid instance reached verdict: {e}"));
    let case_a = detect_case_a(inst);
    let rigid_family = classify_rigid_family(inst);
    let mut v = Verdict {
        status: Status::Unknown,
        trace: Vec::new(),
        derived: dq.clone(),
        min_relation_n: None,
        genericity_known: false,
        case_a,
        rigid_family,
        unknown_flags: Vec::new(),
    };
    let summary = |e: TraceEntry| e.fact("d", format!("{:?}", dq.d)).fact("r", format!("{:?}", dq.r));

    if !dq.trace_ok {
        v.trace.push(
            TraceEntry::new(
                "trace-condition",
                "the eigenvalues of a tuple with zero sum (identity product) must sum to zero (an integer)",
            )
            .fact("trace_sum", &dq.trace_sum),
        );
        v.status = Status::NoTuples;
        return v;
    }
    if !dq.convention2 {
        v.trace.push(
            summary(TraceEntry::new(
                "class1-not-regular-diagonal",
                "the criteria below need class 1 diagonal with distinct eigenvalues",
            ))
            .fact("kappa", dq.kappa),
        );
        return v;
    }
    let alpha = check_alpha(&dq);
    let beta = check_beta(&dq);
    let ab = summary(
        TraceEntry::new(
            "weak-dsp-alpha-beta",
            "for diagonal class 1 with distinct eigenvalues, tuples with trivial centralizer exist iff (α) and (β) hold",
        )
        .fact("alpha", alpha)
        .fact("beta", beta)
        .fact("d_sum", dq.d_sum())
        .fact("2n^2-2", 2 * dq.n * dq.n - 2)
        .fact("r_tail_sum", dq.r_tail_sum()),
    );
    if !(alpha && beta) {
        v.trace.push(ab.fact("case_a", case_a));
        v.status = Status::WeakUnsolvable;
        return v;
    }
    v.trace.push(ab);

    match min_relation_n(inst) {
        Ok(m) => {
            v.min_relation_n = m;
            v.genericity_known = true;
        }
        Err(e) => v.unknown_flags.push(format!("genericity: {e}")),
    }
    if v.genericity_known && v.min_relation_n.is_none() {
        v.trace.push(TraceEntry::new(
            "simpson-generic",
            "for generic eigenvalues, (α) and (β) are necessary and sufficient for irreducible tuples",
        ));
        v.status = Status::DspSolvable;
        return v;
    }
    if dq.r_tail_sum() > dq.n {
        v.trace.push(
            TraceEntry::new(
                "rank-excess",
                "r_2 + ... + r_{p+1} >= n + 1 together with (α), (β) gives irreducible tuples for any eigenvalues",
            )
            .fact("r_tail_sum", dq.r_tail_sum())
            .fact("n", dq.n),
        );
        v.status = Status::DspSolvable;
        return v;
    }
    if v.genericity_known && v.min_relation_n.is_some_and(|m| m >= 2) && dq.kappa <= 0 {
        v.trace.push(
            TraceEntry::new(
                "two-generic-nonrigid",
                "2-generic eigenvalues with kappa <= 0 and (α), (β) give irreducible tuples",
            )
            .fact("kappa", dq.kappa)
            .fact("min_relation_N", v.min_relation_n.unwrap_or(0)),
        );
        v.status = Status::DspSolvable;
        return v;
    }
    for (rule, justification, det) in [
        (
            "single-relation-extension",
            "a unique 1-relation through the dominant eigenvalues with r_2 + ... + r_{p+1} = n forces reducibility",
            detect_extn1_obstruction(inst),
        ),
        (
            "rigid-reducible",
            "for kappa = 2, a reducible tuple with trivial centralizer excludes irreducible ones",
            detect_rigid_reducible_obstruction(inst),
        ),
    ] {
        match det {
            Detection::Fired(facts) => {
                let mut e = TraceEntry::new(rule, justification);
                e.facts = facts;
                v.trace.push(e);
                v.status = Status::DspUnsolvableWeakSolvable;
                return v;
            }
            Detection::Unknown(why) => v.unknown_flags.push(format!("{rule}: {why}")),
            Detection::NotFired => {}
        }
    }
    v.trace.push(
        TraceEntry::new(
            "residual",
            "no criterion applies: r_2 + ... + r_{p+1} = n and either kappa = 2 or a 1-relation holds",
        )
        .fact("kappa", dq.kappa)
        .fact(
            "min_relation_N",
            v.min_relation_n.map_or("unknown".to_string(), |m| m.to_string()),
        ),
    );
    v.status = Status::WeakSolvableDspUnknown;
    v
}

/// Whether the error came from a bounded search rather than bad input.
pub fn is_bound_error(e: &Error) -> bool {
    matches!(e, Error::BoundExceeded { .. })
}
