//! Random walks on the transposition graph of a restricted space.
//!
//! * The target walk picks one of the `K = n(n-1)/2` coordinate pairs
//!   uniformly and swaps it when the result stays in the space, otherwise it
//!   stays put. Its stationary law is uniform.
//! * The degree walk redraws pairs until a feasible one turns up, so it moves
//!   to a uniform neighbour. Its stationary law is proportional to degree.
//! * The coupled walk advances one of each and then exchanges the two states
//!   with probability `min(1, deg(R1) / deg(R2))`. The exchange is a
//!   Metropolis move for the product law, so the first slot stays uniform while
//!   borrowing the faster mixing of the degree walk.
//!
//! Transposition graphs are bipartite (every swap flips the parity of the
//! permutation). The degree walk is therefore periodic whenever the space has
//! two or more members, and the target walk is periodic exactly when the space
//! is the whole symmetric group, the only case where no state has holding
//! probability. [`sample_uniform`] holds the coupled pair with probability 1/2
//! in that case; stationary vectors are computed from the lazy chain
//! `(I + M) / 2`, which has the same fixed vectors.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use rand_core::RngCore;

use crate::error::{Error, Result};
use crate::permspace::{RankVector, RestrictedSpace};
use crate::rng::{self, uniform_f64, uniform_index};

/// Largest space enumerated for exact transition matrices (8!).
pub const ENUMERATION_LIMIT: usize = 40_320;

const STATIONARY_TOLERANCE: f64 = 1e-13;
const STATIONARY_MAX_ITERATIONS: usize = 500_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplerConfig {
    /// Coupled steps discarded before the first retained state.
    pub burn_in: usize,
    /// Coupled steps between retained states.
    pub thin: usize,
    /// Number of retained states.
    pub count: usize,
    pub seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig { burn_in: 5_000, thin: 100, count: 1_000, seed: 0 }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.thin == 0 || self.count == 0 {
            return Err(Error::domain("sampler needs thin >= 1 and count >= 1"));
        }
        Ok(())
    }
}

/// State of the coupled walk: `v` follows the target walk, `w` the degree walk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainPair {
    pub v: RankVector,
    pub w: RankVector,
}

#[inline]
fn random_pair<R: RngCore + ?Sized>(rng: &mut R, n: usize) -> (usize, usize) {
    let c = uniform_index(rng, n);
    let mut d = uniform_index(rng, n - 1);
    if d >= c {
        d += 1;
    }
    (c, d)
}

/// Returns the degree change when a swap happened.
fn target_in_place<R: RngCore + ?Sized>(space: &RestrictedSpace, r: &mut RankVector, rng: &mut R) -> isize {
    let n = space.n();
    if n < 2 {
        return 0;
    }
    let (c, d) = random_pair(rng, n);
    if space.swap_feasible(r, c, d) {
        let delta = space.swap_degree_delta(r, c, d);
        r.swap(c, d);
        delta
    } else {
        0
    }
}

/// Caller guarantees `deg(r) >= 1`, otherwise this never returns.
fn degree_in_place<R: RngCore + ?Sized>(space: &RestrictedSpace, r: &mut RankVector, rng: &mut R) -> isize {
    let n = space.n();
    loop {
        let (c, d) = random_pair(rng, n);
        if space.swap_feasible(r, c, d) {
            let delta = space.swap_degree_delta(r, c, d);
            r.swap(c, d);
            return delta;
        }
    }
}

/// One step of the target walk.
pub fn step_target<R: RngCore + ?Sized>(space: &RestrictedSpace, r: &RankVector, rng: &mut R) -> RankVector {
    let mut next = r.clone();
    target_in_place(space, &mut next, rng);
    next
}

/// One step of the degree walk. Fails on a state without neighbours instead
/// of looping forever.
pub fn step_degree<R: RngCore + ?Sized>(space: &RestrictedSpace, r: &RankVector, rng: &mut R) -> Result<RankVector> {
    if space.degree(r) == 0 {
        return Err(Error::IsolatedNode);
    }
    let mut next = r.clone();
    degree_in_place(space, &mut next, rng);
    Ok(next)
}

/// Probability of exchanging the freshly moved states `R1` (target) and
/// `R2` (degree).
#[inline]
pub fn swap_acceptance(deg_target: usize, deg_degree: usize) -> f64 {
    if deg_target >= deg_degree {
        1.0
    } else {
        deg_target as f64 / deg_degree as f64
    }
}

/// Coupled state with both degrees kept up to date incrementally.
struct Coupled {
    v: RankVector,
    w: RankVector,
    deg_v: usize,
    deg_w: usize,
}

impl Coupled {
    fn new(space: &RestrictedSpace, v: RankVector, w: RankVector) -> Self {
        let (deg_v, deg_w) = (space.degree(&v), space.degree(&w));
        Coupled { v, w, deg_v, deg_w }
    }

    fn step<R: RngCore + ?Sized>(&mut self, space: &RestrictedSpace, rng: &mut R) {
        self.deg_v = (self.deg_v as isize + target_in_place(space, &mut self.v, rng)) as usize;
        self.deg_w = (self.deg_w as isize + degree_in_place(space, &mut self.w, rng)) as usize;
        // U <= deg(R1)/deg(R2) without dividing
        let u = uniform_f64(rng);
        if u * self.deg_w as f64 <= self.deg_v as f64 {
            core::mem::swap(&mut self.v, &mut self.w);
            core::mem::swap(&mut self.deg_v, &mut self.deg_w);
        }
    }
}

/// One step of the coupled walk.
pub fn step_coupled<R: RngCore + ?Sized>(space: &RestrictedSpace, pair: &ChainPair, rng: &mut R) -> Result<ChainPair> {
    let mut state = Coupled::new(space, pair.v.clone(), pair.w.clone());
    if state.deg_w == 0 {
        return Err(Error::IsolatedNode);
    }
    state.step(space, rng);
    Ok(ChainPair { v: state.v, w: state.w })
}

/// Approximately uniform members of `space`, read off the target slot of the
/// coupled walk started with both slots at the greedy member.
///
/// A space whose greedy member has no neighbours has exactly one member, which
/// is returned `count` times.
pub fn sample_uniform(space: &RestrictedSpace, config: &SamplerConfig) -> Result<Vec<RankVector>> {
    config.validate()?;
    let start = space.initial_permutation();
    if space.degree(&start) == 0 {
        return Ok(vec![start; config.count]);
    }
    let mut rng = rng::seeded(config.seed);
    let lazy = space.is_unrestricted();
    let mut state = Coupled::new(space, start.clone(), start);
    let advance = |state: &mut Coupled, rng: &mut rng::ChaCha8Rng| {
        if lazy && uniform_f64(rng) < 0.5 {
            return;
        }
        state.step(space, rng);
    };

    for _ in 0..config.burn_in {
        advance(&mut state, &mut rng);
    }
    let mut out = Vec::with_capacity(config.count);
    for _ in 0..config.count {
        for _ in 0..config.thin {
            advance(&mut state, &mut rng);
        }
        out.push(state.v.clone());
    }
    Ok(out)
}

/// Dense row-stochastic matrix over an explicit state list.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix<S = RankVector> {
    states: Vec<S>,
    probs: Vec<f64>,
}

impl<S> TransitionMatrix<S> {
    /// Takes ownership of a row-major `states.len()`-square matrix.
    pub fn from_parts(states: Vec<S>, probs: Vec<f64>) -> Self {
        assert_eq!(probs.len(), states.len() * states.len());
        TransitionMatrix { states, probs }
    }

    pub fn size(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[S] {
        &self.states
    }

    pub fn get(&self, from: usize, to: usize) -> f64 {
        self.probs[from * self.size() + to]
    }

    pub fn row(&self, from: usize) -> &[f64] {
        let m = self.size();
        &self.probs[from * m..(from + 1) * m]
    }

    /// Largest deviation of a row sum from one, or infinity if any entry is negative.
    pub fn row_sum_error(&self) -> f64 {
        (0..self.size())
            .map(|u| {
                let row = self.row(u);
                if row.iter().any(|&p| p < 0.0) {
                    f64::INFINITY
                } else {
                    libm::fabs(row.iter().sum::<f64>() - 1.0)
                }
            })
            .fold(0.0, f64::max)
    }

    /// `x^T M`.
    pub fn left_apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.size());
        let m = self.size();
        let mut y = vec![0.0; m];
        for (u, &xu) in x.iter().enumerate() {
            if xu != 0.0 {
                for (yv, &p) in y.iter_mut().zip(self.row(u)) {
                    *yv += xu * p;
                }
            }
        }
        y
    }

    fn sparse_rows(&self) -> Vec<Vec<(usize, f64)>> {
        (0..self.size())
            .map(|u| self.row(u).iter().enumerate().filter(|(_, &p)| p != 0.0).map(|(v, &p)| (v, p)).collect())
            .collect()
    }

    /// Every state reaches every other along positive entries.
    pub fn is_irreducible(&self) -> bool {
        let m = self.size();
        if m == 0 {
            return false;
        }
        let rows = self.sparse_rows();
        let reach = |rows: &[Vec<(usize, f64)>]| {
            let mut seen = vec![false; m];
            let mut stack = vec![0usize];
            seen[0] = true;
            while let Some(u) = stack.pop() {
                for &(v, _) in &rows[u] {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
            seen.iter().all(|&s| s)
        };
        let mut reversed = vec![Vec::new(); m];
        for (u, row) in rows.iter().enumerate() {
            for &(v, p) in row {
                reversed[v].push((u, p));
            }
        }
        reach(&rows) && reach(&reversed)
    }

    /// Period of an irreducible chain: gcd of all cycle lengths through state 0.
    pub fn period(&self) -> usize {
        let m = self.size();
        let rows = self.sparse_rows();
        let mut level = vec![usize::MAX; m];
        level[0] = 0;
        let mut queue = alloc::collections::VecDeque::from([0usize]);
        let mut g = 0usize;
        while let Some(u) = queue.pop_front() {
            for &(v, _) in &rows[u] {
                if level[v] == usize::MAX {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                } else {
                    g = gcd(g, (level[u] + 1).abs_diff(level[v]));
                }
            }
        }
        g
    }
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn index_states(states: &[RankVector]) -> BTreeMap<&RankVector, usize> {
    states.iter().enumerate().map(|(i, s)| (s, i)).collect()
}

/// Exact one-step law of the target walk over `space.enumerate()` order:
/// stay with probability `1 - deg(u)/K`, each neighbour with `1/K`.
pub fn transition_matrix_target(space: &RestrictedSpace) -> Result<TransitionMatrix> {
    let states = space.enumerate(ENUMERATION_LIMIT)?;
    let m = states.len();
    let n = space.n();
    let mut probs = vec![0.0; m * m];
    if n < 2 {
        probs[0] = 1.0;
        return Ok(TransitionMatrix { states, probs });
    }
    let k = space.pair_count() as f64;
    let index = index_states(&states);
    for (u, s) in states.iter().enumerate() {
        let mut deg = 0usize;
        for c in 0..n {
            for d in c + 1..n {
                if space.swap_feasible(s, c, d) {
                    let v = index[&s.transposed(c, d)];
                    probs[u * m + v] += 1.0 / k;
                    deg += 1;
                }
            }
        }
        probs[u * m + u] = 1.0 - deg as f64 / k;
    }
    Ok(TransitionMatrix { states, probs })
}

/// Exact one-step law of the degree walk: `Q(u, v) = e(u, v) / deg(u)`.
pub fn transition_matrix_degree(space: &RestrictedSpace) -> Result<TransitionMatrix> {
    let states = space.enumerate(ENUMERATION_LIMIT)?;
    let m = states.len();
    let n = space.n();
    let index = index_states(&states);
    let mut probs = vec![0.0; m * m];
    for (u, s) in states.iter().enumerate() {
        let deg = space.degree(s);
        if deg == 0 {
            return Err(Error::IsolatedNode);
        }
        for c in 0..n {
            for d in c + 1..n {
                if space.swap_feasible(s, c, d) {
                    probs[u * m + index[&s.transposed(c, d)]] = 1.0 / deg as f64;
                }
            }
        }
    }
    Ok(TransitionMatrix { states, probs })
}

/// Exact one-step law of the coupled walk on pairs `(v, w)`, indexed
/// `a * |S| + b` for `(states[a], states[b])`. Refuses spaces with more than
/// `limit` members.
pub fn transition_matrix_coupled(
    space: &RestrictedSpace,
    limit: usize,
) -> Result<TransitionMatrix<(RankVector, RankVector)>> {
    let target = transition_matrix_target(space)?;
    let degree = transition_matrix_degree(space)?;
    let base = target.states().to_vec();
    let m = base.len();
    if m > limit {
        return Err(Error::Capacity { limit });
    }
    let degs: Vec<usize> = base.iter().map(|s| space.degree(s)).collect();
    let mm = m * m;
    let mut probs = vec![0.0; mm * mm];
    for a in 0..m {
        for b in 0..m {
            let from = a * m + b;
            for (r1, &p) in target.row(a).iter().enumerate().filter(|(_, &p)| p > 0.0) {
                for (r2, &q) in degree.row(b).iter().enumerate().filter(|(_, &q)| q > 0.0) {
                    let kappa = swap_acceptance(degs[r1], degs[r2]);
                    probs[from * mm + r2 * m + r1] += p * q * kappa;
                    probs[from * mm + r1 * m + r2] += p * q * (1.0 - kappa);
                }
            }
        }
    }
    let states = base.iter().flat_map(|v| base.iter().map(move |w| (v.clone(), w.clone()))).collect();
    Ok(TransitionMatrix { states, probs })
}

/// Fixed probability vector of `m` by power iteration on the lazy chain
/// `(I + M) / 2`, stopped once `max |pi M - pi| < 1e-13`.
pub fn stationary_distribution<S>(m: &TransitionMatrix<S>) -> Result<Vec<f64>> {
    let size = m.size();
    let rows = m.sparse_rows();
    let mut pi = vec![1.0 / size as f64; size];
    let mut next = vec![0.0; size];
    let mut residual = f64::INFINITY;
    for _ in 0..STATIONARY_MAX_ITERATIONS {
        next.iter_mut().for_each(|x| *x = 0.0);
        for (u, row) in rows.iter().enumerate() {
            let pu = pi[u];
            for &(v, p) in row {
                next[v] += pu * p;
            }
        }
        residual = pi.iter().zip(&next).map(|(a, b)| libm::fabs(a - b)).fold(0.0, f64::max);
        if residual < STATIONARY_TOLERANCE {
            let total: f64 = pi.iter().sum();
            pi.iter_mut().for_each(|x| *x /= total);
            return Ok(pi);
        }
        for (a, b) in pi.iter_mut().zip(&next) {
            *a = 0.5 * (*a + b);
        }
    }
    Err(Error::NoConvergence { iterations: STATIONARY_MAX_ITERATIONS, residual })
}
