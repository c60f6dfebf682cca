//! Exact search for non-genericity relations: a choice of `N < n`
//! eigenvalues (with multiplicity) from every class whose values sum to zero
//! in additive mode, or to a real integer in multiplicative-log mode.

use std::collections::HashMap;

use num_traits::Zero;
use serde::Serialize;

use crate::classes::{GaussianRational, Instance, Mode, Rational};
use crate::error::{Error, Result};

/// Largest `n` searched exhaustively unless a caller overrides it.
pub const DEFAULT_GENERICITY_BOUND: usize = 10;

/// An `N`-relation. `picks[j][k]` is how many copies of the `k`-th eigenvalue
/// of class `j` take part.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct RelationWitness {
    #[serde(rename = "N")]
    pub size: usize,
    pub picks: Vec<Vec<usize>>,
    /// Exact value of the sum: zero, or the integer in multiplicative mode.
    pub target: GaussianRational,
}

impl RelationWitness {
    /// The relation obtained by taking the complementary eigenvalues in every class.
    pub fn complement(&self, inst: &Instance) -> RelationWitness {
        let picks: Vec<Vec<usize>> = inst
            .classes()
            .iter()
            .zip(&self.picks)
            .map(|(c, e)| c.multiplicities().iter().zip(e).map(|(m, k)| m - k).collect())
            .collect();
        let total = inst.trace_sum();
        RelationWitness {
            size: inst.n() - self.size,
            picks,
            target: &total - &self.target,
        }
    }

    pub fn sum(&self, inst: &Instance) -> GaussianRational {
        pick_sum(inst, &self.picks)
    }
}

/// `sum_j sum_k e_{k,j} value_{k,j}`.
pub fn pick_sum(inst: &Instance, picks: &[Vec<usize>]) -> GaussianRational {
    let mut s = GaussianRational::zero();
    for (c, e) in inst.classes().iter().zip(picks) {
        for (v, &k) in c.eigenvalues().iter().zip(e) {
            if k > 0 {
                s += &v.scale(k);
            }
        }
    }
    s
}

/// All vectors `e` with `0 <= e_k <= bounds[k]` and `sum e_k = total`, in
/// lexicographic order.
pub fn bounded_compositions(total: usize, bounds: &[usize]) -> Vec<Vec<usize>> {
    fn rec(total: usize, bounds: &[usize], tail_cap: &[usize], prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let k = prefix.len();
        if k == bounds.len() {
            if total == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        let rest_cap = tail_cap[k + 1];
        let lo = total.saturating_sub(rest_cap);
        let hi = bounds[k].min(total);
        for e in lo..=hi {
            prefix.push(e);
            rec(total - e, bounds, tail_cap, prefix, out);
            prefix.pop();
        }
    }
    let mut tail_cap = vec![0; bounds.len() + 1];
    for k in (0..bounds.len()).rev() {
        tail_cap[k] = tail_cap[k + 1] + bounds[k];
    }
    let mut out = Vec::new();
    if total <= tail_cap[0] {
        rec(total, bounds, &tail_cap, &mut Vec::new(), &mut out);
    }
    out
}

struct ClassPicks {
    picks: Vec<(Vec<usize>, GaussianRational)>,
    re_range: (Rational, Rational),
    im_range: (Rational, Rational),
}

impl ClassPicks {
    fn new(values: &[GaussianRational], mults: &[usize], size: usize) -> Self {
        let picks: Vec<(Vec<usize>, GaussianRational)> = bounded_compositions(size, mults)
            .into_iter()
            .map(|e| {
                let mut s = GaussianRational::zero();
                for (v, &k) in values.iter().zip(&e) {
                    if k > 0 {
                        s += &v.scale(k);
                    }
                }
                (e, s)
            })
            .collect();
        let range = |f: fn(&GaussianRational) -> &Rational| {
            let mut it = picks.iter().map(|(_, s)| f(s));
            let first = it.next().cloned().unwrap_or_else(Rational::zero);
            it.fold((first.clone(), first), |(lo, hi), v| {
                (if *v < lo { v.clone() } else { lo }, if *v > hi { v.clone() } else { hi })
            })
        };
        let re_range = range(|s| &s.re);
        let im_range = range(|s| &s.im);
        ClassPicks { picks, re_range, im_range }
    }
}

/// Depth-first search over classes with interval pruning on the partial sum
/// and a hash lookup for the last class.
struct RelationSearch<'a> {
    inst: &'a Instance,
    size: usize,
    classes: Vec<ClassPicks>,
    // suffix_re[j] = (min, max) of the real part reachable by classes j..
    suffix_re: Vec<(Rational, Rational)>,
    suffix_im: Vec<(Rational, Rational)>,
    last_index: HashMap<GaussianRational, Vec<usize>>,
}

impl<'a> RelationSearch<'a> {
    fn new(inst: &'a Instance, size: usize) -> Self {
        let classes: Vec<ClassPicks> = inst
            .classes()
            .iter()
            .map(|c| ClassPicks::new(c.eigenvalues(), &c.multiplicities(), size))
            .collect();
        let k = classes.len();
        let mut suffix_re = vec![(Rational::zero(), Rational::zero()); k + 1];
        let mut suffix_im = suffix_re.clone();
        for j in (0..k).rev() {
            suffix_re[j] = (
                &suffix_re[j + 1].0 + &classes[j].re_range.0,
                &suffix_re[j + 1].1 + &classes[j].re_range.1,
            );
            suffix_im[j] = (
                &suffix_im[j + 1].0 + &classes[j].im_range.0,
                &suffix_im[j + 1].1 + &classes[j].im_range.1,
            );
        }
        let mode = inst.mode();
        let mut last_index: HashMap<GaussianRational, Vec<usize>> = HashMap::new();
        for (idx, (_, s)) in classes[k - 1].picks.iter().enumerate() {
            last_index.entry(key(mode, s)).or_default().push(idx);
        }
        RelationSearch {
            inst,
            size,
            classes,
            suffix_re,
            suffix_im,
            last_index,
        }
    }

    fn feasible(&self, depth: usize, partial: &GaussianRational) -> bool {
        let (im_lo, im_hi) = &self.suffix_im[depth];
        let need_im = -&partial.im;
        if need_im < *im_lo || need_im > *im_hi {
            return false;
        }
        let (re_lo, re_hi) = &self.suffix_re[depth];
        match self.inst.mode() {
            Mode::Additive => {
                let need_re = -&partial.re;
                need_re >= *re_lo && need_re <= *re_hi
            }
            Mode::Multiplicative => {
                // some integer must lie in [partial + lo, partial + hi]
                let lo = &partial.re + re_lo;
                let hi = &partial.re + re_hi;
                hi.floor() >= lo.ceil()
            }
        }
    }

    fn run(&self, mut visit: impl FnMut(RelationWitness) -> bool) {
        let mut chosen = Vec::with_capacity(self.classes.len());
        self.dfs(0, GaussianRational::zero(), &mut chosen, &mut visit);
    }

    /// Returns `false` once `visit` asks to stop.
    fn dfs(
        &self,
        depth: usize,
        partial: GaussianRational,
        chosen: &mut Vec<usize>,
        visit: &mut impl FnMut(RelationWitness) -> bool,
    ) -> bool {
        let last = self.classes.len() - 1;
        if !self.feasible(depth, &partial) {
            return true;
        }
        if depth == last {
            let mode = self.inst.mode();
            let needed = key(mode, &-&partial);
            if let Some(hits) = self.last_index.get(&needed) {
                for &idx in hits {
                    chosen.push(idx);
                    let picks: Vec<Vec<usize>> = chosen
                        .iter()
                        .enumerate()
                        .map(|(j, &i)| self.classes[j].picks[i].0.clone())
                        .collect();
                    let target = &partial + &self.classes[last].picks[idx].1;
                    chosen.pop();
                    let keep_going = visit(RelationWitness {
                        size: self.size,
                        picks,
                        target,
                    });
                    if !keep_going {
                        return false;
                    }
                }
            }
            return true;
        }
        for (idx, (_, s)) in self.classes[depth].picks.iter().enumerate() {
            chosen.push(idx);
            let cont = self.dfs(depth + 1, &partial + s, chosen, visit);
            chosen.pop();
            if !cont {
                return false;
            }
        }
        true
    }
}

fn key(mode: Mode, s: &GaussianRational) -> GaussianRational {
    match mode {
        Mode::Additive => s.clone(),
        Mode::Multiplicative => s.mod_integers(),
    }
}

fn check_bound(inst: &Instance, bound: usize) -> Result<()> {
    if inst.n() > bound {
        return Err(Error::BoundExceeded {
            what: "relation enumeration",
            size: inst.n(),
            bound,
        });
    }
    Ok(())
}

fn check_size(inst: &Instance, size: usize) -> Result<()> {
    if size == 0 || size >= inst.n() {
        return Err(Error::precondition(format!(
            "relation size N = {size} must satisfy 1 <= N < n = {}",
            inst.n()
        )));
    }
    Ok(())
}

/// Every `N`-relation, ordered lexicographically by picks.
pub fn enumerate_relations(inst: &Instance, size: usize) -> Result<Vec<RelationWitness>> {
    enumerate_relations_bounded(inst, size, DEFAULT_GENERICITY_BOUND)
}

pub fn enumerate_relations_bounded(inst: &Instance, size: usize, bound: usize) -> Result<Vec<RelationWitness>> {
    check_bound(inst, bound)?;
    check_size(inst, size)?;
    let mut out = Vec::new();
    RelationSearch::new(inst, size).run(|w| {
        out.push(w);
        true
    });
    Ok(out)
}

/// Whether at least one `N`-relation exists; stops at the first hit.
pub fn has_relation(inst: &Instance, size: usize, bound: usize) -> Result<bool> {
    check_bound(inst, bound)?;
    check_size(inst, size)?;
    let mut found = false;
    RelationSearch::new(inst, size).run(|_| {
        found = true;
        false
    });
    Ok(found)
}

/// Sizes `N` that need checking: all of `1..n`, or only `N <= n/2` when the
/// trace condition makes relations come in complementary pairs.
fn sizes_to_check(inst: &Instance) -> Vec<usize> {
    let n = inst.n();
    let top = if inst.mode().sum_is_trivial(&inst.trace_sum()) { n / 2 } else { n - 1 };
    (1..=top.min(n.saturating_sub(1))).collect()
}

/// Smallest `N` with a relation, or `None` for generic eigenvalues.
pub fn min_relation_n(inst: &Instance) -> Result<Option<usize>> {
    min_relation_n_bounded(inst, DEFAULT_GENERICITY_BOUND)
}

pub fn min_relation_n_bounded(inst: &Instance, bound: usize) -> Result<Option<usize>> {
    check_bound(inst, bound)?;
    for size in sizes_to_check(inst) {
        if has_relation(inst, size, bound)? {
            return Ok(Some(size));
        }
    }
    Ok(None)
}

/// Relations occur only with `N >= k`.
pub fn is_k_generic(inst: &Instance, k: usize) -> Result<bool> {
    is_k_generic_bounded(inst, k, DEFAULT_GENERICITY_BOUND)
}

pub fn is_k_generic_bounded(inst: &Instance, k: usize, bound: usize) -> Result<bool> {
    Ok(min_relation_n_bounded(inst, bound)?.is_none_or(|m| m >= k))
}

pub fn is_generic(inst: &Instance) -> Result<bool> {
    Ok(min_relation_n(inst)?.is_none())
}

/// Every relation for every `N` in `1..n`, grouped by `N`.
pub fn all_relations(inst: &Instance, bound: usize) -> Result<Vec<RelationWitness>> {
    check_bound(inst, bound)?;
    let mut out = Vec::new();
    for size in 1..inst.n() {
        out.extend(enumerate_relations_bounded(inst, size, bound)?);
    }
    Ok(out)
}
