//! Integer partitions, Jordan normal forms as families of partitions, and the
//! correspondence between a JNF and its diagonal JNF obtained by conjugating
//! every eigenvalue's block-size partition.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest size for which [`corresponding_jnfs`] enumerates candidates.
pub const DEFAULT_JNF_ENUMERATION_BOUND: usize = 12;

/// A partition stored with weakly decreasing positive parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "Vec<usize>", from = "Vec<usize>")]
pub struct Partition(Vec<usize>);

impl Partition {
    /// Builds a partition from arbitrary parts; zeros are dropped and the
    /// parts sorted into canonical order.
    pub fn new(mut parts: Vec<usize>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    /// The partition `(1, 1, ..., 1)` of `n`.
    pub fn ones(n: usize) -> Self {
        Partition(vec![1; n])
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn weight(&self) -> usize {
        self.0.iter().sum()
    }

    /// Number of parts.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Conjugate partition: the `k`-th part counts parts of `self` that are `> k`.
    pub fn dual(&self) -> Partition {
        let largest = self.0.first().copied().unwrap_or(0);
        let parts = (0..largest)
            .map(|k| self.0.iter().take_while(|&&b| b > k).count())
            .collect();
        Partition(parts)
    }

    /// `sum_{i,i'} min(b_i, b_i')`, the centralizer dimension of a nilpotent
    /// matrix with these block sizes. Equals the sum of squared dual parts.
    pub fn centralizer_contribution(&self) -> usize {
        self.dual().0.iter().map(|c| c * c).sum()
    }
}

impl From<Vec<usize>> for Partition {
    fn from(parts: Vec<usize>) -> Self {
        Partition::new(parts)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Self {
        p.0
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, b) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, ")")
    }
}

/// Conjugate (transposed Young diagram) of a partition.
pub fn dual_partition(p: &Partition) -> Partition {
    p.dual()
}

/// All partitions of `n`, in reverse lexicographic order starting from `(n)`.
pub fn partitions_of(n: usize) -> Vec<Partition> {
    fn rec(remaining: usize, max_part: usize, prefix: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(Partition(prefix.clone()));
            return;
        }
        for part in (1..=remaining.min(max_part)).rev() {
            prefix.push(part);
            rec(remaining - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// Eigenvalue multiplicities of a diagonalizable class, compared up to permutation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "Vec<usize>", from = "Vec<usize>")]
pub struct MultiplicityVector(Partition);

impl MultiplicityVector {
    pub fn new(mults: Vec<usize>) -> Self {
        MultiplicityVector(Partition::new(mults))
    }

    /// `n` distinct eigenvalues.
    pub fn distinct(n: usize) -> Self {
        MultiplicityVector(Partition::ones(n))
    }

    pub fn mults(&self) -> &[usize] {
        self.0.parts()
    }

    pub fn size(&self) -> usize {
        self.0.weight()
    }

    pub fn as_partition(&self) -> &Partition {
        &self.0
    }

    /// The diagonal JNF with these multiplicities: one slot of 1x1 blocks per eigenvalue.
    pub fn to_jnf(&self) -> Jnf {
        Jnf::new(self.mults().iter().map(|&m| Partition::ones(m)).collect())
    }
}

impl From<Vec<usize>> for MultiplicityVector {
    fn from(v: Vec<usize>) -> Self {
        MultiplicityVector::new(v)
    }
}

impl From<MultiplicityVector> for Vec<usize> {
    fn from(mv: MultiplicityVector) -> Self {
        mv.0.into()
    }
}

impl fmt::Display for MultiplicityVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A Jordan normal form: one block-size partition per distinct eigenvalue.
///
/// The slot order is kept as given so that a class can pair slots with
/// eigenvalues, but equality, hashing and ordering ignore it.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(into = "Vec<Partition>", try_from = "Vec<Partition>")]
pub struct Jnf {
    slots: Vec<Partition>,
}

impl Jnf {
    /// Panics if a slot is empty; use [`Jnf::try_new`] for untrusted input.
    pub fn new(slots: Vec<Partition>) -> Self {
        Self::try_new(slots).expect("every eigenvalue slot needs at least one block")
    }

    pub fn try_new(slots: Vec<Partition>) -> Result<Self> {
        if slots.iter().any(Partition::is_empty) {
            return Err(Error::validation("eigenvalue slot without Jordan blocks"));
        }
        Ok(Jnf { slots })
    }

    /// Diagonal JNF with `n` distinct eigenvalues.
    pub fn distinct(n: usize) -> Self {
        Jnf::new(vec![Partition::ones(1); n])
    }

    pub fn slots(&self) -> &[Partition] {
        &self.slots
    }

    pub fn size(&self) -> usize {
        self.slots.iter().map(Partition::weight).sum()
    }

    /// Multiplicity of each eigenvalue slot, in slot order.
    pub fn multiplicities(&self) -> Vec<usize> {
        self.slots.iter().map(Partition::weight).collect()
    }

    pub fn is_diagonal(&self) -> bool {
        self.slots.iter().all(|s| s.parts().iter().all(|&b| b == 1))
    }

    /// The multiplicity vector when diagonal.
    pub fn multiplicity_vector(&self) -> Option<MultiplicityVector> {
        self.is_diagonal()
            .then(|| MultiplicityVector::new(self.multiplicities()))
    }

    fn canonical(&self) -> Vec<&Partition> {
        let mut v: Vec<&Partition> = self.slots.iter().collect();
        v.sort_unstable_by(|a, b| b.cmp(a));
        v
    }
}

impl PartialEq for Jnf {
    fn eq(&self, other: &Self) -> bool {
        self.canonical() == other.canonical()
    }
}

impl Eq for Jnf {}

impl Hash for Jnf {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.canonical().hash(state);
    }
}

impl PartialOrd for Jnf {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Jnf {
    fn cmp(&self, other: &Self) -> Ordering {
        self.canonical().cmp(&other.canonical())
    }
}

impl From<Jnf> for Vec<Partition> {
    fn from(j: Jnf) -> Self {
        j.slots
    }
}

impl TryFrom<Vec<Partition>> for Jnf {
    type Error = Error;
    fn try_from(slots: Vec<Partition>) -> Result<Self> {
        Jnf::try_new(slots)
    }
}

impl fmt::Display for Jnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, s) in self.canonical().into_iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "}}")
    }
}

/// Multiset union of the duals of every slot's partition.
pub fn corresponding_diagonal(j: &Jnf) -> MultiplicityVector {
    let mults = j
        .slots()
        .iter()
        .flat_map(|s| s.dual().0)
        .collect::<Vec<_>>();
    MultiplicityVector::new(mults)
}

/// Every JNF of size `n`, each exactly once, in canonical order.
pub fn all_jnfs(n: usize) -> Vec<Jnf> {
    // Slots are drawn as a non-increasing sequence of indices into a fixed list
    // of every partition of weight <= n, which yields each multiset once.
    let pool: Vec<Partition> = (1..=n).flat_map(partitions_of).collect();

    fn rec(
        pool: &[Partition],
        remaining: usize,
        max_index: usize,
        prefix: &mut Vec<Partition>,
        out: &mut Vec<Jnf>,
    ) {
        if remaining == 0 {
            out.push(Jnf { slots: prefix.clone() });
            return;
        }
        for idx in (0..max_index).rev() {
            let w = pool[idx].weight();
            if w <= remaining {
                prefix.push(pool[idx].clone());
                rec(pool, remaining - w, idx + 1, prefix, out);
                prefix.pop();
            }
        }
    }

    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    rec(&pool, n, pool.len(), &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// All JNFs of size `n` whose corresponding diagonal JNF is `mv`.
pub fn corresponding_jnfs(mv: &MultiplicityVector, n: usize) -> Result<Vec<Jnf>> {
    corresponding_jnfs_bounded(mv, n, DEFAULT_JNF_ENUMERATION_BOUND)
}

pub fn corresponding_jnfs_bounded(
    mv: &MultiplicityVector,
    n: usize,
    bound: usize,
) -> Result<Vec<Jnf>> {
    if n > bound {
        return Err(Error::BoundExceeded {
            what: "corresponding JNF enumeration",
            size: n,
            bound,
        });
    }
    if mv.size() != n {
        return Err(Error::validation(format!(
            "multiplicity vector {mv} has size {} but n = {n}",
            mv.size()
        )));
    }
    Ok(all_jnfs(n)
        .into_iter()
        .filter(|j| &corresponding_diagonal(j) == mv)
        .collect())
}

/// `n` minus the largest number of Jordan blocks sharing one eigenvalue.
pub fn r_of_jnf(j: &Jnf) -> usize {
    let max_blocks = j.slots().iter().map(Partition::len).max().unwrap_or(0);
    j.size() - max_blocks
}

/// Dimension of the conjugacy class: `n^2` minus the centralizer dimension.
pub fn d_of_jnf(j: &Jnf) -> usize {
    let n = j.size();
    let centralizer: usize = j.slots().iter().map(Partition::centralizer_contribution).sum();
    n * n - centralizer
}

/// One Jordan block per eigenvalue.
pub fn is_regular(j: &Jnf) -> bool {
    j.slots().iter().all(|s| s.len() == 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(v: &[usize]) -> Partition {
        Partition::new(v.to_vec())
    }

    fn jnf(slots: &[&[usize]]) -> Jnf {
        Jnf::new(slots.iter().map(|s| p(s)).collect())
    }

    /// Transpose a Young diagram cell by cell.
    fn young_transpose(parts: &[usize]) -> Vec<usize> {
        let rows = parts.len();
        let cols = parts.first().copied().unwrap_or(0);
        let mut grid = vec![vec![false; cols]; rows];
        for (r, &len) in parts.iter().enumerate() {
            for cell in grid[r].iter_mut().take(len) {
                *cell = true;
            }
        }
        (0..cols)
            .map(|c| (0..rows).filter(|&r| grid[r][c]).count())
            .collect()
    }

    #[test]
    fn dual_examples() {
        assert_eq!(young_transpose(&[3, 2]), vec![2, 2, 1]);
        assert_eq!(p(&[3, 2]).dual(), p(&young_transpose(&[3, 2])));
        assert_eq!(p(&[5]).dual(), Partition::ones(5));
        assert_eq!(p(&[1, 1, 1, 1]).dual(), p(&[4]));
        assert_eq!(Partition::new(vec![]).dual(), Partition::new(vec![]));
    }

    #[test]
    fn dual_matches_young_transpose_up_to_12() {
        for n in 0..=12 {
            for part in partitions_of(n) {
                assert_eq!(part.dual().parts(), young_transpose(part.parts()).as_slice());
            }
        }
    }

    #[test]
    fn dual_is_an_involution_up_to_12() {
        for n in 0..=12 {
            for part in partitions_of(n) {
                assert_eq!(part.dual().dual(), part);
                assert_eq!(part.dual().weight(), n);
            }
        }
    }

    #[test]
    fn partition_counts() {
        let counts: Vec<usize> = (0..=12).map(|n| partitions_of(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77]);
    }

    #[test]
    fn jnf_counts_match_euler_transform() {
        // number of multisets of partitions with total weight n: Euler transform of p(n)
        let p_counts: Vec<usize> = (0..=8).map(|n| partitions_of(n).len()).collect();
        let mut expected = [0usize; 9];
        expected[0] = 1;
        // multiply by prod_k (1 - x^k)^{-p(k)} one factor at a time
        for k in 1..=8 {
            for _ in 0..p_counts[k] {
                for m in k..=8 {
                    expected[m] += expected[m - k];
                }
            }
        }
        for (n, &count) in expected.iter().enumerate().skip(1) {
            assert_eq!(all_jnfs(n).len(), count, "n = {n}");
        }
    }

    #[test]
    fn corresponding_diagonal_examples() {
        let n = 7;
        let mut slot = vec![2];
        slot.extend(std::iter::repeat_n(1, n - 2));
        assert_eq!(corresponding_diagonal(&jnf(&[&slot])), MultiplicityVector::new(vec![n - 1, 1]));
        assert_eq!(corresponding_diagonal(&jnf(&[&[3, 3]])), MultiplicityVector::new(vec![2, 2, 2]));
        let mixed = jnf(&[&[3, 2], &[7, 6, 1]]);
        let mut expected = young_transpose(&[3, 2]);
        expected.extend(young_transpose(&[7, 6, 1]));
        assert_eq!(expected, vec![2, 2, 1, 3, 2, 2, 2, 2, 2, 1]);
        assert_eq!(corresponding_diagonal(&mixed), MultiplicityVector::new(expected));
        assert_eq!(corresponding_diagonal(&mixed).size(), 19);
    }

    #[test]
    fn corresponding_jnfs_of_222() {
        let got = corresponding_jnfs(&MultiplicityVector::new(vec![2, 2, 2]), 6).unwrap();
        let mut expected = vec![
            MultiplicityVector::new(vec![2, 2, 2]).to_jnf(),
            jnf(&[&[3, 3]]),
            jnf(&[&[2, 2], &[1, 1]]),
        ];
        expected.sort();
        assert_eq!(got, expected);
    }

    #[test]
    fn corresponding_jnfs_of_42() {
        let got = corresponding_jnfs(&MultiplicityVector::new(vec![4, 2]), 6).unwrap();
        let mut expected = vec![
            MultiplicityVector::new(vec![4, 2]).to_jnf(),
            jnf(&[&[2, 2, 1, 1]]),
        ];
        expected.sort();
        assert_eq!(got, expected);
    }

    #[test]
    fn corresponding_jnfs_of_scalar_is_only_itself() {
        for n in 1..=8 {
            let mv = MultiplicityVector::new(vec![n]);
            // brute force: filter every JNF of size n directly
            let brute: Vec<Jnf> = all_jnfs(n)
                .into_iter()
                .filter(|j| {
                    let mut duals: Vec<usize> =
                        j.slots().iter().flat_map(|s| young_transpose(s.parts())).collect();
                    duals.sort_unstable_by(|a, b| b.cmp(a));
                    duals == vec![n]
                })
                .collect();
            assert_eq!(brute, vec![Jnf::new(vec![Partition::ones(n)])]);
            assert_eq!(corresponding_jnfs(&mv, n).unwrap(), brute);
        }
    }

    #[test]
    fn corresponding_jnfs_bound() {
        let mv = MultiplicityVector::distinct(13);
        assert!(matches!(
            corresponding_jnfs(&mv, 13),
            Err(Error::BoundExceeded { bound: 12, .. })
        ));
        assert!(corresponding_jnfs(&MultiplicityVector::new(vec![2, 1]), 4).is_err());
    }

    #[test]
    fn r_examples() {
        assert_eq!(r_of_jnf(&jnf(&[&[3, 2], &[7, 6, 1]])), 16);
        assert_eq!(r_of_jnf(&Jnf::distinct(5)), 4);
        assert_eq!(r_of_jnf(&MultiplicityVector::new(vec![2, 2]).to_jnf()), 2);
    }

    #[test]
    fn d_examples() {
        let mv = MultiplicityVector::new(vec![3, 2, 2, 1]);
        assert_eq!(d_of_jnf(&mv.to_jnf()), 64 - 9 - 4 - 4 - 1);
        assert_eq!(d_of_jnf(&jnf(&[&[2, 1]])), 4);
        assert_eq!(d_of_jnf(&MultiplicityVector::new(vec![2, 1]).to_jnf()), 4);
        assert_eq!(d_of_jnf(&MultiplicityVector::new(vec![6]).to_jnf()), 0);
    }

    #[test]
    fn regular_examples() {
        assert!(is_regular(&jnf(&[&[3], &[2]])));
        assert!(!is_regular(&jnf(&[&[2, 1]])));
        assert!(is_regular(&Jnf::distinct(4)));
    }

    #[test]
    fn jnf_equality_ignores_slot_order() {
        assert_eq!(jnf(&[&[3, 2], &[1]]), jnf(&[&[1], &[2, 3]]));
        assert_ne!(jnf(&[&[2], &[1]]), jnf(&[&[2, 1]]));
    }

    #[test]
    fn correspondence_preserves_r_and_d_up_to_8() {
        for n in 1..=8 {
            for j in all_jnfs(n) {
                let diag = corresponding_diagonal(&j).to_jnf();
                assert_eq!(r_of_jnf(&j), r_of_jnf(&diag), "{j}");
                assert_eq!(d_of_jnf(&j), d_of_jnf(&diag), "{j}");
            }
        }
    }

    #[test]
    fn exactly_one_single_slot_corresponding_jnf_up_to_8() {
        for n in 1..=8 {
            for part in partitions_of(n) {
                let mv = MultiplicityVector::new(part.parts().to_vec());
                let all = corresponding_jnfs(&mv, n).unwrap();
                assert!(all.contains(&mv.to_jnf()));
                assert_eq!(all.iter().filter(|j| j.slots().len() == 1).count(), 1, "{mv}");
            }
        }
    }

    #[test]
    fn regular_jnfs_all_correspond_to_distinct() {
        for n in 1..=7 {
            for j in all_jnfs(n).into_iter().filter(is_regular) {
                assert_eq!(corresponding_diagonal(&j), MultiplicityVector::distinct(n));
            }
        }
    }

    proptest! {
        #[test]
        fn d_and_r_ranges(n in 1usize..=7, pick in any::<proptest::sample::Index>()) {
            let all = all_jnfs(n);
            let j = &all[pick.index(all.len())];
            let d = d_of_jnf(j);
            let r = r_of_jnf(j);
            prop_assert_eq!(d % 2, 0);
            prop_assert!(d <= n * n - n);
            prop_assert!(r < n);
        }
    }
}
