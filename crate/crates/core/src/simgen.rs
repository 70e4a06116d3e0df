//! Simulation data: copula-dependent survival times, censoring schemes and
//! the replicated size/power experiment.

use alloc::vec::Vec;

use rand_core::RngCore;

use crate::censoring::{IntervalObs, RightObs};
use crate::error::{Error, Result};
use crate::rng::{self, stream, uniform_open};
use crate::stats::{self, p_values, Dataset, Estimator, TestConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CopulaFamily {
    Clayton,
    Frank,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CopulaSpec {
    pub family: CopulaFamily,
    /// Target Kendall's tau in `[0, 1)`; zero is the product copula.
    pub tau: f64,
}

impl CopulaSpec {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.tau) {
            return Err(Error::domain(alloc::format!("copula tau {} outside [0, 1)", self.tau)));
        }
        Ok(())
    }
}

pub fn clayton_alpha_from_tau(tau: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&tau) {
        return Err(Error::domain(alloc::format!("Clayton tau {tau} outside [0, 1)")));
    }
    // 2 tau / (1 - tau), arranged so that tau = 1/k rounds back to 2/(k - 1)
    Ok(2.0 / (1.0 / tau - 1.0))
}

fn debye_integrand(t: f64) -> f64 {
    if t == 0.0 {
        1.0
    } else {
        t / libm::expm1(t)
    }
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let f = debye_integrand;
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let diff = left + right - whole;
    if depth == 0 || libm::fabs(diff) <= 15.0 * tol {
        return left + right + diff / 15.0;
    }
    adaptive_simpson(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + adaptive_simpson(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// First-order Debye function `D1(x) = x^-1 * int_0^x t / (e^t - 1) dt` for `x >= 0`.
pub fn debye1(x: f64) -> f64 {
    assert!(x >= 0.0, "Debye function needs a non-negative argument");
    if x < 1e-4 {
        let x2 = x * x;
        return 1.0 - x / 4.0 + x2 / 36.0 - x2 * x2 / 3600.0;
    }
    let f = debye_integrand;
    let (fa, fm, fb) = (f(0.0), f(0.5 * x), f(x));
    let whole = simpson(0.0, x, fa, fm, fb);
    adaptive_simpson(0.0, x, fa, fm, fb, whole, 1e-12, 48) / x
}

/// Kendall's tau of the Frank copula with parameter `beta >= 0`.
pub fn frank_tau_from_beta(beta: f64) -> f64 {
    if beta < 1e-2 {
        let b2 = beta * beta;
        return beta / 9.0 - beta * b2 / 900.0 + beta * b2 * b2 / 52_920.0;
    }
    1.0 + 4.0 * (debye1(beta) - 1.0) / beta
}

/// Frank parameter with the given Kendall's tau, by bisection to `1e-9`.
pub fn frank_beta_from_tau(tau: f64) -> Result<f64> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::domain(alloc::format!("Frank tau {tau} outside (0, 1)")));
    }
    let mut hi = 1.0;
    while frank_tau_from_beta(hi) < tau {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::NoConvergence { iterations: 0, residual: tau });
        }
    }
    let mut lo = 0.0;
    while hi - lo >= 1e-9 {
        let mid = 0.5 * (lo + hi);
        if frank_tau_from_beta(mid) < tau {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Conditional-inversion sampler with the family parameter solved once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CopulaSampler {
    Independent,
    Clayton { alpha: f64 },
    Frank { beta: f64 },
}

impl CopulaSampler {
    pub fn new(spec: &CopulaSpec) -> Result<Self> {
        spec.validate()?;
        if spec.tau == 0.0 {
            return Ok(CopulaSampler::Independent);
        }
        Ok(match spec.family {
            CopulaFamily::Clayton => CopulaSampler::Clayton { alpha: clayton_alpha_from_tau(spec.tau)? },
            CopulaFamily::Frank => CopulaSampler::Frank { beta: frank_beta_from_tau(spec.tau)? },
        })
    }

    /// The `v` solving `dC(u, v)/du = p`.
    pub fn conditional_inverse(&self, u: f64, p: f64) -> f64 {
        let v = match *self {
            CopulaSampler::Independent => p,
            CopulaSampler::Clayton { alpha } => {
                let a = libm::pow(p, -alpha / (1.0 + alpha)) - 1.0;
                libm::pow(a * libm::pow(u, -alpha) + 1.0, -1.0 / alpha)
            }
            CopulaSampler::Frank { beta } => {
                let e_b = libm::expm1(-beta);
                let denom = p + (1.0 - p) * libm::exp(-beta * u);
                -libm::log1p(p * e_b / denom) / beta
            }
        };
        // rounding can land on an endpoint for extreme (u, p)
        v.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
    }

    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let u = uniform_open(rng);
        let p = uniform_open(rng);
        (u, self.conditional_inverse(u, p))
    }
}

pub fn copula_sample<R: RngCore + ?Sized>(spec: &CopulaSpec, rng: &mut R) -> Result<(f64, f64)> {
    Ok(CopulaSampler::new(spec)?.sample(rng))
}

/// Exponential survival time with rate 0.1 at probability `u`.
pub fn marginal_inverse(u: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::domain(alloc::format!("marginal probability {u} outside (0, 1)")));
    }
    Ok(-10.0 * libm::log1p(-u))
}

/// `n` latent pairs of survival times.
pub fn latent_pairs<R: RngCore + ?Sized>(sampler: &CopulaSampler, n: usize, rng: &mut R) -> Vec<(f64, f64)> {
    (0..n)
        .map(|_| {
            let (u, v) = sampler.sample(rng);
            // both coordinates lie in (0, 1) by construction
            (marginal_inverse(u).unwrap(), marginal_inverse(v).unwrap())
        })
        .collect()
}

/// `min(x, c)` with event indicator `x <= c`.
pub fn censor_right(value: f64, censor_time: f64) -> RightObs {
    if value <= censor_time {
        RightObs::event(value)
    } else {
        RightObs::censored(censor_time)
    }
}

fn check_positive(name: &str, c: f64) -> Result<()> {
    if c > 0.0 && c.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(alloc::format!("{name} must be positive, got {c}")))
    }
}

/// Independent `U(0, c_r)` censoring times for each margin.
pub fn apply_right_censoring<R: RngCore + ?Sized>(pairs: &[(f64, f64)], c_r: f64, rng: &mut R) -> Result<Dataset> {
    check_positive("c_R", c_r)?;
    let mut x = Vec::with_capacity(pairs.len());
    let mut y = Vec::with_capacity(pairs.len());
    for &(a, b) in pairs {
        x.push(censor_right(a, c_r * uniform_open(rng)));
        y.push(censor_right(b, c_r * uniform_open(rng)));
    }
    Ok(Dataset::Right { x, y })
}

/// Case-2 interval censoring with examination times `t1 < t2`.
pub fn classify_c1(value: f64, t1: f64, t2: f64) -> IntervalObs {
    if value <= t1 {
        IntervalObs::left_censored(t1)
    } else if value <= t2 {
        IntervalObs::interval(t1, t2)
    } else {
        IntervalObs::right_censored(t2)
    }
}

/// Each margin gets `T1 ~ U(0, c_l)` and `T2 = T1 + Q`, `Q ~ U(0, c_r)`.
pub fn apply_interval_censoring_c1<R: RngCore + ?Sized>(
    pairs: &[(f64, f64)],
    c_l: f64,
    c_r: f64,
    rng: &mut R,
) -> Result<Dataset> {
    check_positive("c_L", c_l)?;
    check_positive("c_R", c_r)?;
    let mut margin = |v: f64| {
        let t1 = c_l * uniform_open(rng);
        let t2 = t1 + c_r * uniform_open(rng);
        classify_c1(v, t1, t2)
    };
    let mut x = Vec::with_capacity(pairs.len());
    let mut y = Vec::with_capacity(pairs.len());
    for &(a, b) in pairs {
        x.push(margin(a));
        y.push(margin(b));
    }
    Ok(Dataset::Interval { x, y })
}

/// Examination every 3 time units up to `c_r`.
pub const C2_STEP: f64 = 3.0;

fn check_c2(c_r: f64) -> Result<()> {
    check_positive("c_R", c_r)?;
    if libm::fmod(c_r, C2_STEP) != 0.0 {
        return Err(Error::domain(alloc::format!("c_R = {c_r} is not a multiple of {C2_STEP}")));
    }
    Ok(())
}

/// The examination interval holding `value`: `(0, 3]`, `(3k, 3k + 3]`, or
/// `(c_r, inf)` beyond the last visit.
pub fn bucket_c2(value: f64, c_r: f64) -> Result<IntervalObs> {
    check_c2(c_r)?;
    Ok(if value > c_r {
        IntervalObs::right_censored(c_r)
    } else if value <= C2_STEP {
        IntervalObs::left_censored(C2_STEP)
    } else {
        let k = libm::ceil(value / C2_STEP);
        IntervalObs::interval(C2_STEP * (k - 1.0), C2_STEP * k)
    })
}

/// Both margins share the visit grid but are bucketed independently.
pub fn apply_interval_censoring_c2(pairs: &[(f64, f64)], c_r: f64) -> Result<Dataset> {
    check_c2(c_r)?;
    let mut x = Vec::with_capacity(pairs.len());
    let mut y = Vec::with_capacity(pairs.len());
    for &(a, b) in pairs {
        x.push(bucket_c2(a, c_r)?);
        y.push(bucket_c2(b, c_r)?);
    }
    Ok(Dataset::Interval { x, y })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CensoringScheme {
    Right { c_r: f64 },
    C1 { c_l: f64, c_r: f64 },
    C2 { c_r: f64 },
}

impl CensoringScheme {
    pub fn validate(&self) -> Result<()> {
        match *self {
            CensoringScheme::Right { c_r } => check_positive("c_R", c_r),
            CensoringScheme::C1 { c_l, c_r } => check_positive("c_L", c_l).and(check_positive("c_R", c_r)),
            CensoringScheme::C2 { c_r } => check_c2(c_r),
        }
    }

    pub fn apply<R: RngCore + ?Sized>(&self, pairs: &[(f64, f64)], rng: &mut R) -> Result<Dataset> {
        match *self {
            CensoringScheme::Right { c_r } => apply_right_censoring(pairs, c_r, rng),
            CensoringScheme::C1 { c_l, c_r } => apply_interval_censoring_c1(pairs, c_l, c_r, rng),
            CensoringScheme::C2 { c_r } => apply_interval_censoring_c2(pairs, c_r),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioSpec {
    pub scheme: CensoringScheme,
    pub n: usize,
    pub reps: usize,
    /// Rejection level for the empirical powers.
    pub level: f64,
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<()> {
        self.scheme.validate()?;
        if self.n < 2 || self.reps == 0 {
            return Err(Error::domain("need n >= 2 and at least one replicate"));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(Error::domain(alloc::format!("level {} outside (0, 1)", self.level)));
        }
        Ok(())
    }
}

/// Monte Carlo budgets of each replicate's test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budgets {
    pub mc_samples: usize,
    pub perms: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub estimator: Estimator,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets { mc_samples: 1_000, perms: 1_000, burn_in: 5_000, thin: 100, estimator: Estimator::Paired }
    }
}

/// One estimate with its two p-values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub estimate: f64,
    pub p_asym: f64,
    pub p_perm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicateOutcome {
    pub rp: Estimate,
    /// Only for right-censored scenarios.
    pub oakes: Option<Estimate>,
}

/// Replicate `index`: generate, censor, test. Depends only on `(seed, index)`.
pub fn run_replicate(
    sampler: &CopulaSampler,
    scenario: &ScenarioSpec,
    budgets: &Budgets,
    seed: u64,
    index: u64,
) -> Result<ReplicateOutcome> {
    let mut rng = rng::derived(seed, stream::REPLICATE_DATA, index);
    let pairs = latent_pairs(sampler, scenario.n, &mut rng);
    let dataset = scenario.scheme.apply(&pairs, &mut rng)?;
    let config = TestConfig {
        mc_samples: budgets.mc_samples,
        perms: budgets.perms,
        seed: rng::derive_seed(seed, stream::REPLICATE_TEST, index),
        burn_in: budgets.burn_in,
        thin: budgets.thin,
        estimator: budgets.estimator,
    };
    let report = stats::test_independence(&dataset, &config)?;
    let rp = Estimate { estimate: report.statistic, p_asym: report.p_asym, p_perm: report.p_perm };
    let oakes = match &dataset {
        Dataset::Right { x, y } => {
            let estimate = stats::oakes_tau(x, y);
            let null_seed = rng::derive_seed(seed, stream::OAKES_NULL, index);
            let p = p_values(estimate, &stats::oakes_permutation_null(x, y, budgets.perms, null_seed))?;
            Some(Estimate { estimate, p_asym: p.p_asym, p_perm: p.p_perm })
        }
        Dataset::Interval { .. } => None,
    };
    Ok(ReplicateOutcome { rp, oakes })
}

/// Bias, MSE and empirical rejection rates of one estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorSummary {
    pub bias: f64,
    pub mse: f64,
    /// Fraction of replicates with `p_asym <= level`.
    pub ep_a: f64,
    /// Fraction of replicates with `p_perm <= level`.
    pub ep_p: f64,
    pub reps: usize,
}

impl EstimatorSummary {
    pub fn from_estimates(estimates: &[Estimate], tau: f64, level: f64) -> Self {
        let m = estimates.len() as f64;
        let mut sum = 0.0;
        let mut sq = 0.0;
        let (mut rej_a, mut rej_p) = (0usize, 0usize);
        for e in estimates {
            let d = e.estimate - tau;
            sum += d;
            sq += d * d;
            rej_a += (e.p_asym <= level) as usize;
            rej_p += (e.p_perm <= level) as usize;
        }
        EstimatorSummary {
            bias: sum / m,
            mse: sq / m,
            ep_a: rej_a as f64 / m,
            ep_p: rej_p as f64 / m,
            reps: estimates.len(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentSummary {
    pub tau: f64,
    pub rp: EstimatorSummary,
    pub oakes: Option<EstimatorSummary>,
}

impl ExperimentSummary {
    /// Aggregates outcomes listed in replicate order.
    pub fn from_outcomes(outcomes: &[ReplicateOutcome], tau: f64, level: f64) -> Self {
        let rp: Vec<Estimate> = outcomes.iter().map(|o| o.rp).collect();
        let oakes: Vec<Estimate> = outcomes.iter().filter_map(|o| o.oakes).collect();
        ExperimentSummary {
            tau,
            rp: EstimatorSummary::from_estimates(&rp, tau, level),
            oakes: (!oakes.is_empty()).then(|| EstimatorSummary::from_estimates(&oakes, tau, level)),
        }
    }
}

/// Runs `scenario.reps` replicates in order and summarises them.
pub fn run_experiment(
    copula: &CopulaSpec,
    scenario: &ScenarioSpec,
    budgets: &Budgets,
    seed: u64,
) -> Result<ExperimentSummary> {
    scenario.validate()?;
    let sampler = CopulaSampler::new(copula)?;
    let outcomes = (0..scenario.reps as u64)
        .map(|i| run_replicate(&sampler, scenario, budgets, seed, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentSummary::from_outcomes(&outcomes, copula.tau, scenario.level))
}
