//! Two-block decompositions of a diagonalizable instance: the `s_j`
//! counts, the dimension of the extension space, and the exceptional
//! sharing patterns (cases B to F) in which that dimension drops to 0 or 1.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::classes::{ClassSpec, GaussianRational, Instance};
use crate::error::{Error, Result};
use crate::genericity::bounded_compositions;

/// Largest number of splits `enumerate_splits` will produce.
pub const DEFAULT_SPLIT_BOUND: usize = 1_000_000;

/// How every eigenvalue multiplicity is divided between an upper block of
/// size `l` and a lower block of size `n - l`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct BlockSplit {
    pub l: usize,
    /// `parts[j][i] = (m', m'')` for eigenvalue `i` of class `j`.
    pub parts: Vec<Vec<(usize, usize)>>,
}

impl BlockSplit {
    /// Builds the split giving each eigenvalue `upper[j][i]` copies in the upper block.
    pub fn new(inst: &Instance, upper: &[Vec<usize>]) -> Result<Self> {
        let n = inst.n();
        if upper.len() != inst.classes().len() {
            return Err(Error::validation(format!(
                "split lists {} classes, instance has {}",
                upper.len(),
                inst.classes().len()
            )));
        }
        let mut l = None;
        let mut parts = Vec::with_capacity(upper.len());
        for (j, (c, up)) in inst.classes().iter().zip(upper).enumerate() {
            if !c.is_diagonalizable() {
                return Err(Error::precondition(format!("class {} is not diagonalizable", j + 1)));
            }
            let mults = c.multiplicities();
            if mults.len() != up.len() {
                return Err(Error::validation(format!(
                    "class {}: split lists {} eigenvalues, class has {}",
                    j + 1,
                    up.len(),
                    mults.len()
                )));
            }
            let mut row = Vec::with_capacity(up.len());
            for (&m, &a) in mults.iter().zip(up) {
                if a > m {
                    return Err(Error::validation(format!(
                        "class {}: upper part {a} exceeds multiplicity {m}",
                        j + 1
                    )));
                }
                row.push((a, m - a));
            }
            let size: usize = up.iter().sum();
            match l {
                None => l = Some(size),
                Some(prev) if prev != size => {
                    return Err(Error::validation(format!(
                        "class {}: upper block size {size} differs from {prev}",
                        j + 1
                    )))
                }
                _ => {}
            }
            parts.push(row);
        }
        let l = l.unwrap_or(0);
        if l == 0 || l >= n {
            return Err(Error::validation(format!("block size l = {l} must satisfy 1 <= l < n = {n}")));
        }
        Ok(BlockSplit { l, parts })
    }

    pub fn n(&self) -> usize {
        self.parts[0].iter().map(|(a, b)| a + b).sum()
    }

    /// The same split with the roles of the two blocks exchanged.
    pub fn swapped(&self) -> BlockSplit {
        BlockSplit {
            l: self.n() - self.l,
            parts: self
                .parts
                .iter()
                .map(|row| row.iter().map(|&(a, b)| (b, a)).collect())
                .collect(),
        }
    }

    fn block_mults(&self, j: usize, upper: bool) -> Vec<usize> {
        self.parts[j]
            .iter()
            .map(|&(a, b)| if upper { a } else { b })
            .filter(|&m| m > 0)
            .collect()
    }
}

/// `s_j = l(n - l) - sum_i m'_i m''_i`.
pub fn s_of_split(sp: &BlockSplit, j: usize) -> usize {
    let n = sp.n();
    let shared: usize = sp.parts[j].iter().map(|&(a, b)| a * b).sum();
    sp.l * (n - sp.l) - shared
}

/// The exceptional sharing patterns with small extension space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CaseTag {
    B,
    C,
    D,
    E { q: usize },
    F { q: usize },
    None,
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaseTag::B => write!(f, "B"),
            CaseTag::C => write!(f, "C"),
            CaseTag::D => write!(f, "D"),
            CaseTag::E { q } => write!(f, "E(q={q})"),
            CaseTag::F { q } => write!(f, "F(q={q})"),
            CaseTag::None => write!(f, "none"),
        }
    }
}

impl Serialize for CaseTag {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Dimension counts for one split.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtReport {
    pub l: usize,
    pub s: Vec<usize>,
    pub delta: i64,
    pub d1: Vec<usize>,
    pub d2: Vec<usize>,
    pub r1: Vec<usize>,
    pub r2: Vec<usize>,
    pub dprime: i64,
    pub ddprime: i64,
    pub dtriple: i64,
    pub case_tag: CaseTag,
    /// Class 1 puts every eigenvalue wholly into one block, each with multiplicity 1.
    pub class1_separated: bool,
    pub upper_alpha_beta: bool,
    pub lower_alpha_beta: bool,
    pub upper_trace_ok: bool,
    pub lower_trace_ok: bool,
}

fn mv_d(size: usize, mults: &[usize]) -> usize {
    size * size - mults.iter().map(|m| m * m).sum::<usize>()
}

fn mv_r(size: usize, mults: &[usize]) -> usize {
    size - mults.iter().copied().max().unwrap_or(0)
}

/// (α) and (β) for classes of the given size; size-1 blocks count as satisfied.
pub fn alpha_beta_at(size: usize, d: &[usize], r: &[usize]) -> bool {
    if size <= 1 {
        return true;
    }
    let alpha = d.iter().sum::<usize>() + 2 >= 2 * size * size;
    let total: usize = r.iter().sum();
    let beta = r.iter().all(|&rj| total - rj >= size);
    alpha && beta
}

pub fn delta_of_split(inst: &Instance, sp: &BlockSplit) -> ExtReport {
    let n = inst.n();
    let l = sp.l;
    let k = n - l;
    let classes = sp.parts.len();
    let s: Vec<usize> = (0..classes).map(|j| s_of_split(sp, j)).collect();
    let delta = s.iter().sum::<usize>() as i64 - 2 * (l * k) as i64;
    let upper: Vec<Vec<usize>> = (0..classes).map(|j| sp.block_mults(j, true)).collect();
    let lower: Vec<Vec<usize>> = (0..classes).map(|j| sp.block_mults(j, false)).collect();
    let d1: Vec<usize> = upper.iter().map(|m| mv_d(l, m)).collect();
    let d2: Vec<usize> = lower.iter().map(|m| mv_d(k, m)).collect();
    let r1: Vec<usize> = upper.iter().map(|m| mv_r(l, m)).collect();
    let r2: Vec<usize> = lower.iter().map(|m| mv_r(k, m)).collect();
    let d_sum: i64 = inst
        .classes()
        .iter()
        .map(|c| crate::partitions::d_of_jnf(c.jnf()) as i64)
        .sum();
    let n2 = (n * n) as i64;
    let dprime = d_sum - n2 + 1;
    let ddprime = d_sum - delta - n2 + 2;
    let dtriple = ddprime - (l * k) as i64;
    let class1_separated = sp.parts[0].iter().all(|&p| p == (1, 0) || p == (0, 1));
    let (up_sum, low_sum) = block_traces(inst, sp);
    ExtReport {
        l,
        delta,
        case_tag: detect_case_bf(inst, sp),
        class1_separated,
        upper_alpha_beta: alpha_beta_at(l, &d1, &r1),
        lower_alpha_beta: alpha_beta_at(k, &d2, &r2),
        upper_trace_ok: inst.mode().sum_is_trivial(&up_sum),
        lower_trace_ok: inst.mode().sum_is_trivial(&low_sum),
        s,
        d1,
        d2,
        r1,
        r2,
        dprime,
        ddprime,
        dtriple,
    }
}

/// Eigenvalue sums of the upper and lower diagonal blocks.
pub fn block_traces(inst: &Instance, sp: &BlockSplit) -> (GaussianRational, GaussianRational) {
    let mut up = GaussianRational::zero();
    let mut low = GaussianRational::zero();
    for (c, row) in inst.classes().iter().zip(&sp.parts) {
        for (v, &(a, b)) in c.eigenvalues().iter().zip(row) {
            up += &v.scale(a);
            low += &v.scale(b);
        }
    }
    (up, low)
}

/// The instances formed by the upper and lower diagonal blocks.
pub fn split_subinstances(inst: &Instance, sp: &BlockSplit) -> Result<(Instance, Instance)> {
    let side = |upper: bool| -> Result<Instance> {
        let classes = inst
            .classes()
            .iter()
            .zip(&sp.parts)
            .map(|(c, row)| {
                let entries: Vec<(GaussianRational, usize)> = c
                    .eigenvalues()
                    .iter()
                    .zip(row)
                    .map(|(v, &(a, b))| (v.clone(), if upper { a } else { b }))
                    .filter(|(_, m)| *m > 0)
                    .collect();
                ClassSpec::diagonal(inst.mode(), &entries)
            })
            .collect::<Result<Vec<_>>>()?;
        Instance::new(inst.mode(), classes)
    };
    Ok((side(true)?, side(false)?))
}

/// Multiset of nonzero `(m', m'')` pairs, sorted.
fn pattern(row: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut v: Vec<(usize, usize)> = row.iter().copied().filter(|&(a, b)| a + b > 0).collect();
    v.sort_unstable();
    v
}

fn sorted(mut v: Vec<(usize, usize)>) -> Vec<(usize, usize)> {
    v.retain(|&(a, b)| a + b > 0);
    v.sort_unstable();
    v
}

type SharingPattern = Vec<(usize, usize)>;

/// Reference patterns for classes 2 and 3 at the given block sizes.
fn templates(l: usize, k: usize) -> Vec<(CaseTag, SharingPattern, SharingPattern)> {
    let mut out = Vec::new();
    if l == 2 && k == 2 {
        out.push((CaseTag::B, vec![(1, 1), (1, 1)], vec![(1, 1), (1, 1)]));
        out.push((CaseTag::C, vec![(1, 1), (1, 0), (0, 1)], vec![(1, 1), (1, 1)]));
    }
    if l == 3 && k == 3 {
        out.push((CaseTag::D, vec![(1, 1), (1, 1), (1, 1)], vec![(1, 1), (2, 2)]));
    }
    if k == 2 && l >= 3 && l % 2 == 1 {
        let q = (l - 1) / 2;
        out.push((CaseTag::E { q }, vec![(q, 1), (q, 1), (1, 0)], vec![(q + 1, 1), (q, 1)]));
    }
    if k == 2 && l >= 2 && l.is_multiple_of(2) {
        let q = l / 2;
        // q = 1 gives the C pattern again, reported as C
        if q >= 2 {
            out.push((CaseTag::F { q }, vec![(q, 1), (q - 1, 1), (1, 0)], vec![(q, 1), (q, 1)]));
        }
    }
    out.into_iter()
        .map(|(t, a, b)| (t, sorted(a), sorted(b)))
        .collect()
}

/// Matches the split against cases B to F, up to exchanging classes 2 and 3
/// and relabelling eigenvalues. Only meaningful for `p = 2`, `l >= n - l >= 2`.
pub fn detect_case_bf(inst: &Instance, sp: &BlockSplit) -> CaseTag {
    let n = inst.n();
    let l = sp.l;
    let k = n - l;
    if sp.parts.len() != 3 || l < k || k < 2 {
        return CaseTag::None;
    }
    if !sp.parts[0].iter().all(|&p| p == (1, 0) || p == (0, 1)) {
        return CaseTag::None;
    }
    let swap = |v: &[(usize, usize)]| sorted(v.iter().map(|&(a, b)| (b, a)).collect());
    let a = pattern(&sp.parts[1]);
    let b = pattern(&sp.parts[2]);
    for (tag, t2, t3) in templates(l, k) {
        let direct = (a == t2 && b == t3) || (a == t3 && b == t2);
        // with equal block sizes the roles of the blocks are interchangeable
        let flipped = l == k && {
            let (sa, sb) = (swap(&a), swap(&b));
            (sa == t2 && sb == t3) || (sa == t3 && sb == t2)
        };
        if direct || flipped {
            return tag;
        }
    }
    CaseTag::None
}

/// All splits with upper block size `l`, in lexicographic order of the upper parts.
pub fn enumerate_splits(inst: &Instance, l: usize) -> Result<Vec<BlockSplit>> {
    enumerate_splits_bounded(inst, l, DEFAULT_SPLIT_BOUND)
}

pub fn enumerate_splits_bounded(inst: &Instance, l: usize, bound: usize) -> Result<Vec<BlockSplit>> {
    let n = inst.n();
    if l == 0 || l >= n {
        return Err(Error::precondition(format!("block size l = {l} must satisfy 1 <= l < n = {n}")));
    }
    let mut per_class = Vec::with_capacity(inst.classes().len());
    let mut total: usize = 1;
    for (j, c) in inst.classes().iter().enumerate() {
        if !c.is_diagonalizable() {
            return Err(Error::precondition(format!("class {} is not diagonalizable", j + 1)));
        }
        let choices = bounded_compositions(l, &c.multiplicities());
        total = total.saturating_mul(choices.len());
        if total > bound {
            return Err(Error::BoundExceeded {
                what: "split enumeration",
                size: total,
                bound,
            });
        }
        per_class.push(choices);
    }
    let mut out = Vec::with_capacity(total);
    let mut idx = vec![0usize; per_class.len()];
    if total == 0 {
        return Ok(out);
    }
    loop {
        let upper: Vec<Vec<usize>> = idx.iter().zip(&per_class).map(|(&i, c)| c[i].clone()).collect();
        out.push(BlockSplit::new(inst, &upper)?);
        // odometer, last class fastest
        let mut pos = per_class.len();
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < per_class[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::Mode;
    use proptest::prelude::*;

    fn g(a: i64) -> GaussianRational {
        GaussianRational::int(a)
    }

    fn inst(classes: &[&[usize]]) -> Instance {
        let m = Mode::Additive;
        let cs = classes
            .iter()
            .map(|mults| {
                let entries: Vec<_> = mults.iter().enumerate().map(|(i, &k)| (g(i as i64), k)).collect();
                ClassSpec::diagonal(m, &entries).unwrap()
            })
            .collect();
        Instance::new(m, cs).unwrap()
    }

    #[test]
    fn s_examples() {
        let i = inst(&[&[1, 1, 1, 1], &[2, 2], &[2, 1, 1]]);
        let sp = BlockSplit::new(&i, &[vec![1, 1, 0, 0], vec![1, 1], vec![1, 1, 0]]).unwrap();
        assert_eq!(sp.parts[2], vec![(1, 1), (1, 0), (0, 1)]);
        assert_eq!(s_of_split(&sp, 0), 4);
        assert_eq!(s_of_split(&sp, 1), 2);
        assert_eq!(s_of_split(&sp, 2), 3);
        let rep = delta_of_split(&i, &sp);
        assert_eq!(rep.s, vec![4, 2, 3]);
        assert_eq!(rep.delta, 1);
        assert_eq!(rep.dprime - rep.ddprime, rep.delta - 1);
        assert!(rep.class1_separated);
    }

    #[test]
    fn case_b_has_no_extensions() {
        let i = inst(&[&[1, 1, 1, 1], &[2, 2], &[2, 2]]);
        let sp = BlockSplit::new(&i, &[vec![1, 1, 0, 0], vec![1, 1], vec![1, 1]]).unwrap();
        let rep = delta_of_split(&i, &sp);
        assert_eq!(rep.delta, 0);
        assert_eq!(rep.case_tag, CaseTag::B);
    }

    #[test]
    fn disjoint_class_gives_full_s() {
        let i = inst(&[&[1, 1, 1, 1], &[1, 1, 1, 1], &[2, 2]]);
        let sp = BlockSplit::new(&i, &[vec![1, 1, 0, 0], vec![1, 1, 0, 0], vec![1, 1]]).unwrap();
        let rep = delta_of_split(&i, &sp);
        assert_eq!(rep.s, vec![4, 4, 2]);
        assert_eq!(rep.delta, 2);
        assert_eq!(rep.case_tag, CaseTag::None);
    }

    #[test]
    fn case_d_and_f_are_recognised() {
        let i = inst(&[&[1; 6], &[2, 2, 2], &[2, 4]]);
        let sp = BlockSplit::new(&i, &[vec![1, 1, 1, 0, 0, 0], vec![1, 1, 1], vec![1, 2]]).unwrap();
        let rep = delta_of_split(&i, &sp);
        assert_eq!(rep.case_tag, CaseTag::D);
        assert_eq!(rep.delta, 1);

        let i = inst(&[&[1; 6], &[3, 2, 1], &[3, 3]]);
        let sp = BlockSplit::new(&i, &[vec![1, 1, 1, 1, 0, 0], vec![2, 1, 1], vec![2, 2]]).unwrap();
        let rep = delta_of_split(&i, &sp);
        assert_eq!(rep.case_tag, CaseTag::F { q: 2 });
        assert_eq!(rep.delta, 1);
    }

    #[test]
    fn classes_two_and_three_are_interchangeable() {
        let i = inst(&[&[1, 1, 1, 1], &[2, 2], &[2, 1, 1]]);
        let sp = BlockSplit::new(&i, &[vec![1, 1, 0, 0], vec![1, 1], vec![1, 1, 0]]).unwrap();
        assert_eq!(detect_case_bf(&i, &sp), CaseTag::C);
        let j = inst(&[&[1, 1, 1, 1], &[2, 1, 1], &[2, 2]]);
        let sp = BlockSplit::new(&j, &[vec![1, 1, 0, 0], vec![1, 1, 0], vec![1, 1]]).unwrap();
        assert_eq!(detect_case_bf(&j, &sp), CaseTag::C);
    }

    #[test]
    fn outside_range_is_none() {
        let i = inst(&[&[1; 5], &[3, 2], &[3, 2]]);
        let sp = BlockSplit::new(&i, &[vec![1, 1, 0, 0, 0], vec![1, 1], vec![1, 1]]).unwrap();
        assert_eq!(detect_case_bf(&i, &sp), CaseTag::None);
    }

    #[test]
    fn split_counts() {
        assert_eq!(enumerate_splits(&inst(&[&[1, 1], &[2]]), 1).unwrap().len(), 2);
        assert_eq!(enumerate_splits(&inst(&[&[4], &[4]]), 3).unwrap().len(), 1);
        let splits = enumerate_splits(&inst(&[&[2, 2], &[4]]), 2).unwrap();
        let first: Vec<_> = splits.iter().map(|s| s.parts[0].clone()).collect();
        assert_eq!(first, vec![vec![(0, 2), (2, 0)], vec![(1, 1), (1, 1)], vec![(2, 0), (0, 2)]]);
        assert!(matches!(
            enumerate_splits_bounded(&inst(&[&[1; 6], &[1; 6]]), 3, 100),
            Err(Error::BoundExceeded { .. })
        ));
    }

    #[test]
    fn rejects_jordan_classes_and_bad_sizes() {
        let m = Mode::Additive;
        let jordan = ClassSpec::new(m, crate::partitions::Jnf::new(vec![crate::partitions::Partition::new(vec![2])]), vec![g(0)]).unwrap();
        let i = Instance::new(m, vec![ClassSpec::distinct(m, &[g(0), g(1)]).unwrap(), jordan]).unwrap();
        assert!(matches!(enumerate_splits(&i, 1), Err(Error::Precondition(_))));
        let j = inst(&[&[1, 1], &[2]]);
        assert!(BlockSplit::new(&j, &[vec![1, 0], vec![2]]).is_err());
        assert!(BlockSplit::new(&j, &[vec![0, 0], vec![0]]).is_err());
    }

    #[test]
    fn subinstances() {
        let i = inst(&[&[1, 1, 1, 1], &[2, 2], &[2, 1, 1]]);
        let sp = BlockSplit::new(&i, &[vec![1, 1, 0, 0], vec![1, 1], vec![1, 1, 0]]).unwrap();
        let (up, low) = split_subinstances(&i, &sp).unwrap();
        assert_eq!(up.n(), 2);
        assert_eq!(low.n(), 2);
        assert_eq!(low.class(2).eigenvalues(), &[g(0), g(2)]);
    }

    fn random_split() -> impl Strategy<Value = (Instance, BlockSplit)> {
        (2usize..=8, 2usize..=4)
            .prop_flat_map(|(n, classes)| {
                let class = proptest::collection::vec(1usize..=n, 1..=n);
                (Just(n), proptest::collection::vec(class, classes), 1..n, any::<u64>())
            })
            .prop_filter_map("valid split", |(n, raw, l, salt)| {
                use rand::{Rng, SeedableRng};
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(salt);
                let mults: Vec<Vec<usize>> = raw
                    .into_iter()
                    .map(|r| {
                        let mut left = n;
                        let mut v = Vec::new();
                        for m in r {
                            if left == 0 {
                                break;
                            }
                            let m = m.min(left);
                            v.push(m);
                            left -= m;
                        }
                        if left > 0 {
                            v.push(left);
                        }
                        v
                    })
                    .collect();
                let refs: Vec<&[usize]> = mults.iter().map(|v| v.as_slice()).collect();
                let i = inst(&refs);
                let upper: Vec<Vec<usize>> = mults
                    .iter()
                    .map(|ms| {
                        let opts = bounded_compositions(l, ms);
                        opts[rng.random_range(0..opts.len())].clone()
                    })
                    .collect();
                let sp = BlockSplit::new(&i, &upper).ok()?;
                Some((i, sp))
            })
    }

    proptest! {
        #[test]
        fn swap_invariance((i, sp) in random_split()) {
            let sw = sp.swapped();
            for j in 0..sp.parts.len() {
                prop_assert_eq!(s_of_split(&sp, j), s_of_split(&sw, j));
            }
            prop_assert_eq!(delta_of_split(&i, &sp).delta, delta_of_split(&i, &sw).delta);
        }

        #[test]
        fn dimension_identities((i, sp) in random_split()) {
            let rep = delta_of_split(&i, &sp);
            prop_assert_eq!(rep.dprime - rep.ddprime, rep.delta - 1);
            for (j, c) in i.classes().iter().enumerate() {
                let d = crate::partitions::d_of_jnf(c.jnf());
                prop_assert_eq!(d, rep.d1[j] + rep.d2[j] + 2 * rep.s[j]);
            }
        }
    }
}
