//! The restricted permutation space and its transposition graph.
//!
//! Members are permutations `r` of `1..=n` with `r[i]` inside the i-th
//! [`RankBounds`]. Two members are adjacent when they differ by swapping two
//! coordinates. The graph is never materialised except by [`RestrictedSpace::enumerate`]
//! for small `n`.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use crate::censoring::RankBounds;
use crate::error::{Error, Result};

/// A ranking of `n` observations: a permutation of `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RankVector(Vec<u32>);

impl RankVector {
    pub fn new(ranks: Vec<u32>) -> Result<Self> {
        let r = RankVector(ranks);
        if r.is_permutation() {
            Ok(r)
        } else {
            Err(Error::invalid("ranks are not a permutation of 1..=n"))
        }
    }

    /// Wraps `ranks` without checking; use [`Self::is_permutation`] before
    /// relying on it.
    pub fn from_unchecked(ranks: Vec<u32>) -> Self {
        RankVector(ranks)
    }

    pub fn identity(n: usize) -> Self {
        RankVector((1..=n as u32).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<u32> {
        self.0
    }

    pub fn is_permutation(&self) -> bool {
        let n = self.0.len();
        let mut seen = vec![false; n];
        for &r in &self.0 {
            let k = r as usize;
            if k == 0 || k > n || seen[k - 1] {
                return false;
            }
            seen[k - 1] = true;
        }
        true
    }

    /// `order[k]` is the index of the observation holding rank `k + 1`.
    pub fn inverse(&self) -> Vec<usize> {
        let mut order = vec![0usize; self.0.len()];
        for (i, &r) in self.0.iter().enumerate() {
            order[r as usize - 1] = i;
        }
        order
    }

    pub fn swap(&mut self, c: usize, d: usize) {
        self.0.swap(c, d);
    }

    pub fn transposed(&self, c: usize, d: usize) -> Self {
        let mut t = self.clone();
        t.swap(c, d);
        t
    }

    /// Ranks relabelled through `eta`: entry `i` becomes entry `eta[i]`.
    pub fn relabel(&self, eta: &[usize]) -> Self {
        assert_eq!(eta.len(), self.0.len());
        RankVector(eta.iter().map(|&k| self.0[k]).collect())
    }
}

impl core::ops::Index<usize> for RankVector {
    type Output = u32;

    fn index(&self, i: usize) -> &u32 {
        &self.0[i]
    }
}

/// Permutations of `1..=n` constrained coordinate-wise by rank bounds.
///
/// Construction certifies the space is nonempty and keeps the greedy member
/// found along the way.
#[derive(Debug, Clone, PartialEq)]
pub struct RestrictedSpace {
    bounds: Vec<RankBounds>,
    initial: RankVector,
}

impl RestrictedSpace {
    pub fn new(bounds: Vec<RankBounds>) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::invalid("restricted space over zero observations"));
        }
        let n = bounds.len() as u32;
        if let Some(b) = bounds.iter().find(|b| b.lo < 1 || b.lo > b.hi || b.hi > n) {
            return Err(Error::invalid(alloc::format!("rank bounds [{}, {}] outside 1..={n}", b.lo, b.hi)));
        }
        let initial = greedy_member(&bounds)?;
        Ok(RestrictedSpace { bounds, initial })
    }

    /// The full symmetric group on `n` points.
    pub fn unrestricted(n: usize) -> Self {
        Self::new(vec![RankBounds::new(1, n as u32); n]).expect("unrestricted space is nonempty")
    }

    pub fn n(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[RankBounds] {
        &self.bounds
    }

    /// Number of unordered coordinate pairs, `n(n-1)/2`.
    pub fn pair_count(&self) -> usize {
        let n = self.n();
        n * (n - 1) / 2
    }

    /// True when every coordinate admits every rank, i.e. the space is all
    /// of the symmetric group.
    pub fn is_unrestricted(&self) -> bool {
        let n = self.n() as u32;
        self.bounds.iter().all(|b| b.lo == 1 && b.hi == n)
    }

    pub fn contains(&self, r: &RankVector) -> bool {
        assert_eq!(r.len(), self.n(), "rank vector length does not match the space");
        r.is_permutation() && r.as_slice().iter().zip(&self.bounds).all(|(&x, b)| b.contains(x))
    }

    /// A member of the space chosen deterministically: ranks are handed out
    /// in increasing order, each to the waiting observation with the smallest
    /// upper bound (ties to the smaller index).
    pub fn initial_permutation(&self) -> RankVector {
        self.initial.clone()
    }

    /// Whether swapping coordinates `c` and `d` of a member stays inside the space.
    #[inline]
    pub fn swap_feasible(&self, r: &RankVector, c: usize, d: usize) -> bool {
        assert_ne!(c, d, "swap of a coordinate with itself");
        self.bounds[c].contains(r[d]) && self.bounds[d].contains(r[c])
    }

    /// `deg(r with c, d swapped) - deg(r)` for a feasible swap, in `O(n)`.
    pub(crate) fn swap_degree_delta(&self, r: &RankVector, c: usize, d: usize) -> isize {
        let b = &self.bounds;
        let (rc, rd) = (r[c], r[d]);
        let ok = |i: usize, vi: u32, e: usize, ve: u32| (b[i].contains(ve) && b[e].contains(vi)) as isize;
        let mut delta = 0;
        for e in 0..r.len() {
            if e == c || e == d {
                continue;
            }
            let re = r[e];
            delta += ok(c, rd, e, re) + ok(d, rc, e, re) - ok(c, rc, e, re) - ok(d, rd, e, re);
        }
        delta
    }

    /// Number of members adjacent to `r` in the transposition graph.
    pub fn degree(&self, r: &RankVector) -> usize {
        debug_assert!(self.contains(r), "degree of a non-member");
        degree_of(&self.bounds, r.as_slice())
    }

    /// All members in lexicographic order, failing once more than `limit`
    /// have been found.
    pub fn enumerate(&self, limit: usize) -> Result<Vec<RankVector>> {
        let n = self.n();
        let mut out = Vec::new();
        let mut current = vec![0u32; n];
        let mut used = vec![false; n + 1];
        self.extend(0, &mut current, &mut used, &mut out, limit)?;
        Ok(out)
    }

    fn extend(
        &self,
        pos: usize,
        current: &mut Vec<u32>,
        used: &mut Vec<bool>,
        out: &mut Vec<RankVector>,
        limit: usize,
    ) -> Result<()> {
        if pos == current.len() {
            if out.len() == limit {
                return Err(Error::Capacity { limit });
            }
            out.push(RankVector(current.clone()));
            return Ok(());
        }
        let b = self.bounds[pos];
        for rank in b.lo..=b.hi {
            if !used[rank as usize] {
                used[rank as usize] = true;
                current[pos] = rank;
                self.extend(pos + 1, current, used, out, limit)?;
                used[rank as usize] = false;
            }
        }
        Ok(())
    }
}

pub(crate) fn degree_of(bounds: &[RankBounds], r: &[u32]) -> usize {
    let n = r.len();
    let mut deg = 0;
    for c in 0..n {
        let (bc, rc) = (bounds[c], r[c]);
        for d in c + 1..n {
            if bc.contains(r[d]) && bounds[d].contains(rc) {
                deg += 1;
            }
        }
    }
    deg
}

fn greedy_member(bounds: &[RankBounds]) -> Result<RankVector> {
    let n = bounds.len();
    let mut by_lo: Vec<usize> = (0..n).collect();
    by_lo.sort_by_key(|&i| (bounds[i].lo, i));

    let mut ranks = vec![0u32; n];
    let mut waiting = BinaryHeap::new();
    let mut next = 0;
    for rank in 1..=n as u32 {
        while next < n && bounds[by_lo[next]].lo <= rank {
            let i = by_lo[next];
            waiting.push(Reverse((bounds[i].hi, i)));
            next += 1;
        }
        match waiting.pop() {
            Some(Reverse((hi, i))) if hi >= rank => ranks[i] = rank,
            _ => return Err(Error::InfeasibleBounds { rank: rank as usize }),
        }
    }
    Ok(RankVector(ranks))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(pairs: &[(u32, u32)]) -> RestrictedSpace {
        RestrictedSpace::new(pairs.iter().map(|&(lo, hi)| RankBounds::new(lo, hi)).collect()).unwrap()
    }

    fn rv(r: &[u32]) -> RankVector {
        RankVector::new(r.to_vec()).unwrap()
    }

    #[test]
    fn contains_examples() {
        let full = RestrictedSpace::unrestricted(3);
        assert!(full.contains(&rv(&[3, 1, 2])));
        assert!(!space(&[(1, 1), (2, 2)]).contains(&rv(&[2, 1])));
        assert!(space(&[(1, 2), (1, 2)]).contains(&rv(&[2, 1])));
        assert!(!full.contains(&RankVector::from_unchecked(vec![1, 1, 2])));
    }

    #[test]
    #[should_panic]
    fn contains_length_mismatch_panics() {
        RestrictedSpace::unrestricted(3).contains(&rv(&[1, 2]));
    }

    #[test]
    fn initial_permutation_examples() {
        assert_eq!(RestrictedSpace::unrestricted(3).initial_permutation(), rv(&[1, 2, 3]));
        assert_eq!(space(&[(2, 2), (3, 3), (1, 1)]).initial_permutation(), rv(&[2, 3, 1]));
        let err = RestrictedSpace::new(vec![RankBounds::new(1, 1); 2]).unwrap_err();
        assert_eq!(err, Error::InfeasibleBounds { rank: 2 });
    }

    #[test]
    fn initial_permutation_names_first_unassignable_rank() {
        // two observations demand rank 3, so nobody is left for rank 2
        let err = RestrictedSpace::new(vec![RankBounds::new(1, 3), RankBounds::new(3, 3), RankBounds::new(3, 3)])
            .unwrap_err();
        assert_eq!(err, Error::InfeasibleBounds { rank: 2 });
    }

    #[test]
    fn rejects_out_of_range_bounds() {
        assert!(RestrictedSpace::new(vec![RankBounds::new(0, 1), RankBounds::new(1, 2)]).is_err());
        assert!(RestrictedSpace::new(vec![RankBounds::new(1, 3), RankBounds::new(1, 2)]).is_err());
        assert!(RestrictedSpace::new(vec![RankBounds::new(2, 1), RankBounds::new(1, 2)]).is_err());
        assert!(RestrictedSpace::new(vec![]).is_err());
    }

    #[test]
    fn swap_degree_delta_matches_recount() {
        let s = space(&[(1, 3), (1, 4), (2, 5), (3, 5), (1, 5)]);
        for r in s.enumerate(1000).unwrap() {
            for c in 0..5 {
                for d in 0..5 {
                    if c != d && s.swap_feasible(&r, c, d) {
                        let after = r.transposed(c, d);
                        let expect = s.degree(&after) as isize - s.degree(&r) as isize;
                        assert_eq!(s.swap_degree_delta(&r, c, d), expect);
                    }
                }
            }
        }
    }

    #[test]
    fn swap_feasible_examples() {
        let full = RestrictedSpace::unrestricted(4);
        let r = rv(&[4, 2, 1, 3]);
        for c in 0..4 {
            for d in 0..4 {
                if c != d {
                    assert!(full.swap_feasible(&r, c, d));
                }
            }
        }
        assert!(!space(&[(1, 1), (2, 2)]).swap_feasible(&rv(&[1, 2]), 0, 1));
        let s = space(&[(1, 2), (1, 2), (3, 3)]);
        assert!(s.swap_feasible(&rv(&[1, 2, 3]), 0, 1));
        assert!(!s.swap_feasible(&rv(&[1, 2, 3]), 0, 2));
    }

    #[test]
    #[should_panic]
    fn swap_with_itself_panics() {
        RestrictedSpace::unrestricted(3).swap_feasible(&rv(&[1, 2, 3]), 1, 1);
    }

    #[test]
    fn degree_examples() {
        assert_eq!(RestrictedSpace::unrestricted(5).degree(&rv(&[5, 3, 1, 2, 4])), 10);
        assert_eq!(space(&[(1, 2), (1, 2)]).degree(&rv(&[1, 2])), 1);
        assert_eq!(space(&[(2, 2), (1, 1), (3, 3)]).degree(&rv(&[2, 1, 3])), 0);
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(space(&[(1, 2), (1, 2)]).enumerate(10).unwrap(), vec![rv(&[1, 2]), rv(&[2, 1])]);
        assert_eq!(space(&[(1, 1), (2, 2)]).enumerate(10).unwrap(), vec![rv(&[1, 2])]);
        let all = RestrictedSpace::unrestricted(3).enumerate(10).unwrap();
        assert_eq!(all.len(), 6);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(RestrictedSpace::unrestricted(4).enumerate(23).unwrap_err(), Error::Capacity { limit: 23 });
        assert_eq!(RestrictedSpace::unrestricted(4).enumerate(24).unwrap().len(), 24);
    }

    #[test]
    fn relabel_and_inverse() {
        let r = rv(&[3, 1, 2]);
        assert_eq!(r.inverse(), vec![1, 2, 0]);
        assert_eq!(r.relabel(&[2, 0, 1]), rv(&[2, 3, 1]));
        assert_eq!(r.relabel(&[0, 1, 2]), r);
    }
}
