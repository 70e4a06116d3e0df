//! Kendall's tau, the restricted-permutation statistic and its permutation null.
//!
//! All statistics here are ratios of exact integer pair-score sums, so two
//! routes to the same value (the statistic and the identity relabelling of the
//! null, or the fast and quadratic tau) agree bit for bit.

use alloc::vec;
use alloc::vec::Vec;

use crate::censoring::{rank_bounds_interval, rank_bounds_right, IntervalObs, RankBounds, RightObs};
use crate::error::{Error, Result};
use crate::mcmc::{sample_uniform, SamplerConfig};
use crate::permspace::{RankVector, RestrictedSpace};
use crate::rng::{self, stream};

fn pair_count(n: usize) -> i64 {
    (n * (n - 1) / 2) as i64
}

fn check_pair(rx: &RankVector, ry: &RankVector) {
    assert_eq!(rx.len(), ry.len(), "rankings of different lengths");
    assert!(rx.len() >= 2, "Kendall's tau needs at least two observations");
    debug_assert!(rx.is_permutation() && ry.is_permutation());
}

/// Counts inversions of `seq` by merge sort; `seq` ends up sorted.
fn count_inversions(seq: &mut [u32], scratch: &mut Vec<u32>) -> u64 {
    let n = seq.len();
    scratch.clear();
    scratch.resize(n, 0);
    let mut inversions = 0u64;
    let mut width = 1;
    // bottom-up merge, ping-ponging between the two buffers
    let mut src_is_seq = true;
    while width < n {
        {
            let (src, dst): (&[u32], &mut [u32]) =
                if src_is_seq { (&*seq, &mut scratch[..]) } else { (&scratch[..], &mut *seq) };
            let mut start = 0;
            while start < n {
                let mid = (start + width).min(n);
                let end = (start + 2 * width).min(n);
                let (mut i, mut j, mut k) = (start, mid, start);
                while i < mid && j < end {
                    if src[i] <= src[j] {
                        dst[k] = src[i];
                        i += 1;
                    } else {
                        dst[k] = src[j];
                        j += 1;
                        inversions += (mid - i) as u64;
                    }
                    k += 1;
                }
                dst[k..k + (mid - i)].copy_from_slice(&src[i..mid]);
                k += mid - i;
                dst[k..k + (end - j)].copy_from_slice(&src[j..end]);
                start = end;
            }
        }
        src_is_seq = !src_is_seq;
        width *= 2;
    }
    if !src_is_seq {
        seq.copy_from_slice(scratch);
    }
    inversions
}

/// Concordant minus discordant pairs, by inversion counting in `O(n log n)`.
fn concordance_sum(rx: &RankVector, ry: &RankVector) -> i64 {
    let order = rx.inverse();
    let mut seq: Vec<u32> = order.iter().map(|&i| ry[i]).collect();
    let mut scratch = Vec::new();
    let inv = count_inversions(&mut seq, &mut scratch) as i64;
    pair_count(rx.len()) - 2 * inv
}

/// Kendall's tau of two rankings: the mean of `a_ij * b_ij` over all pairs,
/// with `a_ij = 2 I(rx_i < rx_j) - 1` and `b_ij` likewise.
pub fn kendall_tau(rx: &RankVector, ry: &RankVector) -> f64 {
    check_pair(rx, ry);
    concordance_sum(rx, ry) as f64 / pair_count(rx.len()) as f64
}

/// Quadratic evaluation of [`kendall_tau`] straight from the pair definition.
pub fn kendall_tau_naive(rx: &RankVector, ry: &RankVector) -> f64 {
    check_pair(rx, ry);
    let n = rx.len();
    let mut s = 0i64;
    for i in 0..n {
        for j in i + 1..n {
            let a = if rx[i] < rx[j] { 1 } else { -1 };
            let b = if ry[i] < ry[j] { 1 } else { -1 };
            s += a * b;
        }
    }
    s as f64 / pair_count(n) as f64
}

/// Antisymmetric integer pair scores `s[i][j] = -s[j][i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    n: usize,
    data: Vec<i64>,
}

impl ScoreMatrix {
    fn zeros(n: usize) -> Self {
        ScoreMatrix { n, data: vec![0; n * n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.n + j]
    }

    fn add_pair(&mut self, i: usize, j: usize, s: i64) {
        self.data[i * self.n + j] += s;
        self.data[j * self.n + i] -= s;
    }

    /// Summed concordance signs `sum_b (2 I(r_b,i < r_b,j) - 1)`.
    pub fn concordance(samples: &[RankVector]) -> Self {
        let n = samples.first().map_or(0, |r| r.len());
        let mut m = Self::zeros(n);
        for r in samples {
            assert_eq!(r.len(), n);
            for i in 0..n {
                for j in i + 1..n {
                    m.add_pair(i, j, if r[i] < r[j] { 1 } else { -1 });
                }
            }
        }
        m
    }

    /// `sum_{i<j} self[i][j] * other[eta(i)][eta(j)]`.
    pub fn dot_relabelled(&self, other: &ScoreMatrix, eta: &[usize]) -> i64 {
        let n = self.n;
        assert_eq!(other.n, n);
        assert_eq!(eta.len(), n);
        let mut s = 0i64;
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            let orow = &other.data[eta[i] * n..(eta[i] + 1) * n];
            for j in i + 1..n {
                s += row[j] * orow[eta[j]];
            }
        }
        s
    }
}

/// Mean concordance sign of each ordered pair over the samples, row-major `n x n`.
pub fn concordance_mean_matrix(samples: &[RankVector]) -> Vec<f64> {
    let b = samples.len() as f64;
    ScoreMatrix::concordance(samples).data.iter().map(|&s| s as f64 / b).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Estimator {
    /// Average of tau over the B paired draws.
    #[default]
    Paired,
    /// Tau of the two concordance-mean matrices; unbiased for the same
    /// average when the chains are independent, and `O(n^2)` per null draw.
    Product,
}

impl Estimator {
    pub fn name(&self) -> &'static str {
        match self {
            Estimator::Paired => "paired",
            Estimator::Product => "product",
        }
    }
}

/// Uniform draws from the two marginal spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct TauSamples {
    pub x: Vec<RankVector>,
    pub y: Vec<RankVector>,
    pub estimator: Estimator,
}

impl TauSamples {
    pub fn new(x: Vec<RankVector>, y: Vec<RankVector>, estimator: Estimator) -> Result<Self> {
        if x.is_empty() || x.len() != y.len() {
            return Err(Error::invalid("need the same positive number of samples for both margins"));
        }
        let n = x[0].len();
        if n < 2 || x.iter().chain(&y).any(|r| r.len() != n) {
            return Err(Error::invalid("all samples must rank the same n >= 2 observations"));
        }
        Ok(TauSamples { x, y, estimator })
    }

    pub fn n(&self) -> usize {
        self.x[0].len()
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

/// The averaged tau over the sample pairs (or the product-of-means variant).
pub fn rp_statistic(samples: &TauSamples) -> f64 {
    NullEngine::new(samples).statistic()
}

/// Precomputed state for evaluating the statistic under relabellings of the
/// Y margin.
#[derive(Debug, Clone)]
pub struct NullEngine<'a> {
    samples: &'a TauSamples,
    kind: EngineKind,
}

#[derive(Debug, Clone)]
enum EngineKind {
    /// per sample: observation indices in increasing X rank
    Paired(Vec<Vec<usize>>),
    Product(ScoreMatrix, ScoreMatrix),
}

impl<'a> NullEngine<'a> {
    pub fn new(samples: &'a TauSamples) -> Self {
        let kind = match samples.estimator {
            Estimator::Paired => EngineKind::Paired(samples.x.iter().map(RankVector::inverse).collect()),
            Estimator::Product => {
                EngineKind::Product(ScoreMatrix::concordance(&samples.x), ScoreMatrix::concordance(&samples.y))
            }
        };
        NullEngine { samples, kind }
    }

    pub fn statistic(&self) -> f64 {
        let identity: Vec<usize> = (0..self.samples.n()).collect();
        self.relabelled(&identity)
    }

    /// The statistic with Y sample `b` replaced by `(y_b[eta(0)], ..., y_b[eta(n-1)])`.
    pub fn relabelled(&self, eta: &[usize]) -> f64 {
        let n = self.samples.n();
        assert_eq!(eta.len(), n);
        let k = pair_count(n);
        let b = self.samples.len() as i64;
        match &self.kind {
            EngineKind::Paired(orders) => {
                let mut seq = vec![0u32; n];
                let mut scratch = Vec::with_capacity(n);
                let mut total = 0i64;
                for (order, y) in orders.iter().zip(&self.samples.y) {
                    for (slot, &i) in seq.iter_mut().zip(order) {
                        *slot = y[eta[i]];
                    }
                    total += k - 2 * count_inversions(&mut seq, &mut scratch) as i64;
                }
                total as f64 / (k * b) as f64
            }
            EngineKind::Product(a, bm) => a.dot_relabelled(bm, eta) as f64 / (k * b * b) as f64,
        }
    }
}

/// The `index`-th relabelling of the permutation null under `seed`; each
/// index has its own generator so draws can be computed in any order.
pub fn null_permutation(n: usize, seed: u64, index: u64) -> Vec<usize> {
    let mut eta: Vec<usize> = (0..n).collect();
    rng::shuffle(&mut rng::derived(seed, stream::NULL, index), &mut eta);
    eta
}

/// Statistic values under `perms` uniformly random relabellings of the Y margin.
pub fn permutation_null(samples: &TauSamples, perms: usize, seed: u64) -> Vec<f64> {
    let engine = NullEngine::new(samples);
    let n = samples.n();
    (0..perms as u64).map(|k| engine.relabelled(&null_permutation(n, seed, k))).collect()
}

/// Oakes's concordance score of one censored margin: `+1` when `x_i > x_j` and
/// `j` is an event, `-1` when `x_i < x_j` and `i` is an event, else `0`.
pub fn oakes_scores(obs: &[RightObs]) -> ScoreMatrix {
    let n = obs.len();
    let mut m = ScoreMatrix::zeros(n);
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (obs[i], obs[j]);
            let s = if a.time > b.time && b.event {
                1
            } else if a.time < b.time && a.event {
                -1
            } else {
                0
            };
            m.add_pair(i, j, s);
        }
    }
    m
}

/// Oakes's tau for bivariate right-censored data: only orderable pairs score,
/// but the denominator stays `n(n-1)/2`. Tied times score zero.
pub fn oakes_tau(x: &[RightObs], y: &[RightObs]) -> f64 {
    assert_eq!(x.len(), y.len(), "margins of different lengths");
    assert!(x.len() >= 2, "Oakes's tau needs at least two observations");
    let identity: Vec<usize> = (0..x.len()).collect();
    oakes_scores(x).dot_relabelled(&oakes_scores(y), &identity) as f64 / pair_count(x.len()) as f64
}

/// Oakes's tau under `perms` random relabellings of the Y margin, drawn like
/// [`permutation_null`].
pub fn oakes_permutation_null(x: &[RightObs], y: &[RightObs], perms: usize, seed: u64) -> Vec<f64> {
    assert_eq!(x.len(), y.len(), "margins of different lengths");
    let (a, b) = (oakes_scores(x), oakes_scores(y));
    let k = pair_count(x.len()) as f64;
    (0..perms as u64).map(|i| a.dot_relabelled(&b, &null_permutation(x.len(), seed, i)) as f64 / k).collect()
}

/// Two-sided p-values of a statistic against its permutation draws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PValues {
    /// `(1 + #{|null| >= |stat|}) / (perms + 1)`
    pub p_perm: f64,
    /// `2 (1 - Phi(|stat| / sd))` with the variance of the draws
    pub p_asym: f64,
    pub variance: f64,
}

/// Standard normal distribution function.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / core::f64::consts::SQRT_2)
}

pub fn sample_variance(xs: &[f64]) -> f64 {
    let m = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / m;
    xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (m - 1.0)
}

pub fn p_values(statistic: f64, null_draws: &[f64]) -> Result<PValues> {
    if null_draws.len() < 2 {
        return Err(Error::domain("p-values need at least two null draws"));
    }
    let first = null_draws[0];
    if null_draws.iter().all(|&d| d == first) {
        return Err(Error::DegenerateNull);
    }
    let variance = sample_variance(null_draws);
    if variance.is_nan() || variance <= 0.0 {
        return Err(Error::DegenerateNull);
    }
    let s = libm::fabs(statistic);
    let exceed = null_draws.iter().filter(|d| libm::fabs(**d) >= s).count();
    let p_perm = (1 + exceed) as f64 / (null_draws.len() + 1) as f64;
    let z = s / libm::sqrt(variance);
    let p_asym = libm::erfc(z / core::f64::consts::SQRT_2);
    Ok(PValues { p_perm, p_asym, variance })
}

/// Paired censored observations of two outcomes.
#[derive(Debug, Clone, PartialEq)]
pub enum Dataset {
    Right { x: Vec<RightObs>, y: Vec<RightObs> },
    Interval { x: Vec<IntervalObs>, y: Vec<IntervalObs> },
}

impl Dataset {
    pub fn n(&self) -> usize {
        match self {
            Dataset::Right { x, .. } => x.len(),
            Dataset::Interval { x, .. } => x.len(),
        }
    }

    pub fn rank_bounds(&self) -> Result<(Vec<RankBounds>, Vec<RankBounds>)> {
        let (nx, ny) = match self {
            Dataset::Right { x, y } => (x.len(), y.len()),
            Dataset::Interval { x, y } => (x.len(), y.len()),
        };
        if nx != ny {
            return Err(Error::invalid(alloc::format!("margins have {nx} and {ny} observations")));
        }
        if nx < 2 {
            return Err(Error::invalid("need at least two paired observations"));
        }
        match self {
            Dataset::Right { x, y } => Ok((rank_bounds_right(x)?, rank_bounds_right(y)?)),
            Dataset::Interval { x, y } => Ok((rank_bounds_interval(x)?, rank_bounds_interval(y)?)),
        }
    }

    pub fn spaces(&self) -> Result<(RestrictedSpace, RestrictedSpace)> {
        let (bx, by) = self.rank_bounds()?;
        Ok((RestrictedSpace::new(bx)?, RestrictedSpace::new(by)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TestConfig {
    /// Uniform draws per margin (B).
    pub mc_samples: usize,
    /// Relabellings in the permutation null (P).
    pub perms: usize,
    pub seed: u64,
    pub burn_in: usize,
    pub thin: usize,
    pub estimator: Estimator,
}

impl Default for TestConfig {
    fn default() -> Self {
        TestConfig { mc_samples: 1_000, perms: 1_000, seed: 0, burn_in: 5_000, thin: 100, estimator: Estimator::Paired }
    }
}

/// Which marginal chain a sampler configuration belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Margin {
    X,
    Y,
}

impl TestConfig {
    pub fn validate(&self) -> Result<()> {
        if self.mc_samples == 0 || self.perms < 2 || self.thin == 0 {
            return Err(Error::domain("need mc_samples >= 1, perms >= 2 and thin >= 1"));
        }
        Ok(())
    }

    /// Sampler settings for one margin; the two margins get distinct derived seeds.
    pub fn sampler(&self, margin: Margin) -> SamplerConfig {
        let tag = match margin {
            Margin::X => stream::CHAIN_X,
            Margin::Y => stream::CHAIN_Y,
        };
        SamplerConfig {
            burn_in: self.burn_in,
            thin: self.thin,
            count: self.mc_samples,
            seed: rng::derive_seed(self.seed, tag, 0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestReport {
    pub statistic: f64,
    pub variance: f64,
    pub null_draws: Vec<f64>,
    pub p_perm: f64,
    pub p_asym: f64,
    pub n: usize,
    pub config: TestConfig,
}

impl TestReport {
    pub fn assemble(statistic: f64, null_draws: Vec<f64>, n: usize, config: TestConfig) -> Result<Self> {
        let p = p_values(statistic, &null_draws)?;
        Ok(TestReport { statistic, variance: p.variance, null_draws, p_perm: p.p_perm, p_asym: p.p_asym, n, config })
    }
}

/// Full pipeline: rank bounds, spaces, uniform draws per margin, statistic,
/// permutation null and p-values. Deterministic given `config.seed`.
pub fn test_independence(dataset: &Dataset, config: &TestConfig) -> Result<TestReport> {
    config.validate()?;
    let (sx, sy) = dataset.spaces()?;
    let samples = TauSamples::new(
        sample_uniform(&sx, &config.sampler(Margin::X))?,
        sample_uniform(&sy, &config.sampler(Margin::Y))?,
        config.estimator,
    )?;
    let statistic = rp_statistic(&samples);
    let null = permutation_null(&samples, config.perms, config.seed);
    TestReport::assemble(statistic, null, dataset.n(), *config)
}
