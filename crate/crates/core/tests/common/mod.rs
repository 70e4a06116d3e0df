//! Fixture generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use rankperm_core::rng::{self, uniform_f64, uniform_index, ChaCha8Rng};
use rankperm_core::{IntervalObs, RankBounds, RankVector, RightObs};

/// All permutations of `1..=n` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Vec<u32>> {
    let mut p: Vec<u32> = (1..=n as u32).collect();
    let mut out = vec![p.clone()];
    loop {
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
        out.push(p.clone());
    }
}

/// Right-censored sample with distinct times `1..=n` in random order.
pub fn random_right(n: usize, rng: &mut ChaCha8Rng) -> Vec<RightObs> {
    let mut times: Vec<f64> = (1..=n).map(|t| t as f64).collect();
    rng::shuffle(rng, &mut times);
    times.into_iter().map(|t| if uniform_f64(rng) < 0.6 { RightObs::event(t) } else { RightObs::censored(t) }).collect()
}

/// Interval-censored sample whose finite endpoints (other than the zero
/// left end of left-censored observations) are all distinct.
pub fn random_interval(n: usize, rng: &mut ChaCha8Rng) -> Vec<IntervalObs> {
    let mut pool: Vec<f64> = (1..=2 * n).map(|t| t as f64).collect();
    rng::shuffle(rng, &mut pool);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let obs = match uniform_index(rng, 4) {
            0 => IntervalObs::exact(pool.pop().unwrap()),
            1 => IntervalObs::left_censored(pool.pop().unwrap()),
            2 => IntervalObs::right_censored(pool.pop().unwrap()),
            _ => {
                let (a, b) = (pool.pop().unwrap(), pool.pop().unwrap());
                IntervalObs::interval(a.min(b), a.max(b))
            }
        };
        out.push(obs);
    }
    out
}

/// The set a right-censored observation pins its latent value to.
pub fn right_as_set(o: &RightObs) -> (f64, f64, bool) {
    if o.event {
        (o.time, o.time, true)
    } else {
        (o.time, f64::INFINITY, false)
    }
}

/// `(left, right, exact)`: exact means the single point `left`, otherwise
/// the half-open `(left, right]`.
pub fn interval_as_set(o: &IntervalObs) -> (f64, f64, bool) {
    (o.left, o.right, o.left == o.right)
}

/// Whether some strictly increasing assignment of latent values realizes the
/// ranking. The line is cut at every finite endpoint into point cells (odd
/// indices) and open gap cells (even indices); a gap may host several values,
/// a point only one. Reachable cells are tracked exhaustively.
pub fn realizable_oracle(sets: &[(f64, f64, bool)], ranks: &[u32]) -> bool {
    let mut points: Vec<f64> = sets.iter().flat_map(|&(l, r, _)| [l, r]).filter(|v| v.is_finite()).collect();
    points.sort_by(f64::total_cmp);
    points.dedup();
    let point_cell = |x: f64| 2 * points.iter().position(|&p| p == x).unwrap() + 1;
    let cell_count = 2 * points.len() + 1;
    let allowed = |&(l, r, exact): &(f64, f64, bool)| -> Vec<usize> {
        if exact {
            return vec![point_cell(l)];
        }
        let lo = point_cell(l) + 1;
        let hi = if r.is_finite() { point_cell(r) } else { cell_count - 1 };
        (lo..=hi).collect()
    };
    let mut order: Vec<usize> = (0..ranks.len()).collect();
    order.sort_by_key(|&i| ranks[i]);
    // None stands for "nothing placed yet"
    let mut reach: Vec<Option<usize>> = vec![None];
    for &i in &order {
        let mut next = Vec::new();
        for c in allowed(&sets[i]) {
            let ok = reach.iter().any(|p| match p {
                None => true,
                Some(p) => c > *p || (c == *p && c % 2 == 0),
            });
            if ok {
                next.push(Some(c));
            }
        }
        if next.is_empty() {
            return false;
        }
        reach = next;
    }
    true
}

/// Per observation, the sorted list of ranks it takes over all realizable rankings.
pub fn realizable_ranks(sets: &[(f64, f64, bool)]) -> Vec<Vec<u32>> {
    let n = sets.len();
    let mut seen = vec![std::collections::BTreeSet::new(); n];
    for p in all_permutations(n) {
        if realizable_oracle(sets, &p) {
            for (i, &r) in p.iter().enumerate() {
                seen[i].insert(r);
            }
        }
    }
    seen.into_iter().map(|s| s.into_iter().collect()).collect()
}

pub fn assert_bounds_match(bounds: &[RankBounds], ranks: &[Vec<u32>]) {
    for (i, (b, rs)) in bounds.iter().zip(ranks).enumerate() {
        let expected: Vec<u32> = (b.lo..=b.hi).collect();
        assert_eq!(rs, &expected, "observation {i}: bounds {b:?}");
    }
}

/// Members of the space defined by `bounds`, by filtering all permutations.
pub fn brute_members(bounds: &[RankBounds]) -> Vec<RankVector> {
    all_permutations(bounds.len())
        .into_iter()
        .filter(|p| p.iter().zip(bounds).all(|(&r, b)| b.lo <= r && r <= b.hi))
        .map(|p| RankVector::new(p).unwrap())
        .collect()
}

/// Random bounds from a censored sample of size `n`, right or interval.
pub fn random_bounds(n: usize, rng: &mut ChaCha8Rng) -> Vec<RankBounds> {
    if uniform_f64(rng) < 0.5 {
        rankperm_core::censoring::rank_bounds_right(&random_right(n, rng)).unwrap()
    } else {
        rankperm_core::censoring::rank_bounds_interval(&random_interval(n, rng)).unwrap()
    }
}
