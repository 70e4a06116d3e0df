//! Thread-parallel versions of the core drivers.
//!
//! Every task draws from its own derived seed and results are collected in
//! task order, so the output is identical to the sequential core functions
//! whatever the thread count.

use rayon::prelude::*;

use rankperm_core::diagnostics::{mixing_report, DistanceTrace, MixingConfig, SimpleGraph};
use rankperm_core::mcmc::sample_uniform;
use rankperm_core::simgen::{run_replicate, Budgets, CopulaSampler, CopulaSpec, ExperimentSummary, ScenarioSpec};
use rankperm_core::stats::{null_permutation, Dataset, Margin, NullEngine};
use rankperm_core::{Result, TauSamples, TestConfig, TestReport};

/// Runs `f` on a pool with `threads` workers, or on the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(t) => rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build().expect("thread pool").install(f),
        None => f(),
    }
}

/// Same result as [`rankperm_core::stats::test_independence`].
pub fn test_independence(dataset: &Dataset, config: &TestConfig) -> Result<TestReport> {
    config.validate()?;
    let (sx, sy) = dataset.spaces()?;
    let (x, y) = rayon::join(
        || sample_uniform(&sx, &config.sampler(Margin::X)),
        || sample_uniform(&sy, &config.sampler(Margin::Y)),
    );
    let samples = TauSamples::new(x?, y?, config.estimator)?;
    let engine = NullEngine::new(&samples);
    let statistic = engine.statistic();
    let n = samples.n();
    let null: Vec<f64> = (0..config.perms as u64)
        .into_par_iter()
        .map(|k| engine.relabelled(&null_permutation(n, config.seed, k)))
        .collect();
    TestReport::assemble(statistic, null, dataset.n(), *config)
}

/// Same result as [`rankperm_core::simgen::run_experiment`].
pub fn run_experiment(
    copula: &CopulaSpec,
    scenario: &ScenarioSpec,
    budgets: &Budgets,
    seed: u64,
) -> Result<ExperimentSummary> {
    scenario.validate()?;
    let sampler = CopulaSampler::new(copula)?;
    let outcomes = (0..scenario.reps as u64)
        .into_par_iter()
        .map(|i| run_replicate(&sampler, scenario, budgets, seed, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentSummary::from_outcomes(&outcomes, copula.tau, scenario.level))
}

/// One mixing trace per configuration, in order.
pub fn mixing_reports(graph: &SimpleGraph, configs: &[MixingConfig]) -> Result<Vec<DistanceTrace>> {
    configs.par_iter().map(|c| mixing_report(graph, c)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rankperm_core::simgen::{CensoringScheme, CopulaFamily};
    use rankperm_core::stats;
    use rankperm_core::{Estimator, RightObs};

    #[test]
    fn matches_sequential_test() {
        let x: Vec<RightObs> = [3.0, 1.0, 4.0, 1.5, 5.0, 9.0, 2.0, 6.0]
            .iter()
            .enumerate()
            .map(|(i, &t)| if i % 3 == 0 { RightObs::censored(t) } else { RightObs::event(t) })
            .collect();
        let y: Vec<RightObs> = x.iter().rev().copied().collect();
        let data = Dataset::Right { x, y };
        for estimator in [Estimator::Paired, Estimator::Product] {
            let cfg = TestConfig { mc_samples: 30, perms: 40, seed: 5, burn_in: 100, thin: 3, estimator };
            let seq = stats::test_independence(&data, &cfg).unwrap();
            for threads in [1, 3] {
                assert_eq!(with_threads(Some(threads), || test_independence(&data, &cfg)).unwrap(), seq);
            }
        }
    }

    #[test]
    fn matches_sequential_experiment() {
        let copula = CopulaSpec { family: CopulaFamily::Frank, tau: 0.2 };
        let scenario = ScenarioSpec { scheme: CensoringScheme::C1 { c_l: 3.0, c_r: 6.0 }, n: 10, reps: 4, level: 0.05 };
        let budgets = Budgets { mc_samples: 10, perms: 30, burn_in: 20, thin: 2, estimator: Estimator::Paired };
        let seq = rankperm_core::simgen::run_experiment(&copula, &scenario, &budgets, 3).unwrap();
        assert_eq!(with_threads(Some(2), || run_experiment(&copula, &scenario, &budgets, 3)).unwrap(), seq);
    }
}
