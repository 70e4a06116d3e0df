//! Command-line surface: `test`, `sample`, `simulate` and `mixdiag`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use rankperm_core::diagnostics::{
    gen_circulant, gen_random_regular, gen_watts_strogatz, geometric_checkpoints, MixingConfig, SimpleGraph,
};
use rankperm_core::mcmc::sample_uniform;
use rankperm_core::permspace::RestrictedSpace;
use rankperm_core::rng::{self, stream};
use rankperm_core::simgen::{Budgets, CensoringScheme, CopulaFamily, CopulaSpec, EstimatorSummary, ScenarioSpec};
use rankperm_core::stats::Margin;
use rankperm_core::{Estimator, SamplerConfig, TestConfig};

use crate::error::{CliError, CliResult};
use crate::io::{self, fmt_f64, DataType};
use crate::parallel;
use crate::report::JsonReport;

#[derive(Debug, Parser)]
#[command(name = "rankperm", version, about = "Restricted-permutation independence test for censored data")]
pub struct Cli {
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Refuse to run without an explicit --seed.
    #[arg(long, global = true)]
    pub strict: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Test independence of a bivariate censored sample; prints a JSON report.
    Test(TestArgs),
    /// Draw rank vectors uniformly from one margin's restricted space.
    Sample(SampleArgs),
    /// Replicated size/power experiment on simulated data.
    Simulate(SimulateArgs),
    /// Mixing trace of independent and coupled walks on a benchmark graph.
    Mixdiag(MixdiagArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum EstimatorArg {
    Paired,
    Product,
}

impl From<EstimatorArg> for Estimator {
    fn from(e: EstimatorArg) -> Self {
        match e {
            EstimatorArg::Paired => Estimator::Paired,
            EstimatorArg::Product => Estimator::Product,
        }
    }
}

#[derive(Debug, Args)]
pub struct ChainArgs {
    /// Coupled steps discarded before the first retained sample.
    #[arg(long, visible_alias = "burnin", default_value_t = 5_000)]
    pub burn_in: usize,
    /// Coupled steps between retained samples.
    #[arg(long, default_value_t = 100)]
    pub thin: usize,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    /// Four-column CSV: `x,dx,y,dy` or `lx,rx,ly,ry`.
    pub input: PathBuf,
    /// Input format; detected from the values when omitted.
    #[arg(long = "type", value_enum)]
    pub data_type: Option<DataType>,
    /// Uniform samples per margin [default: 1000, or 5000 with --data-example].
    #[arg(long)]
    pub mc_samples: Option<usize>,
    /// Permutations in the null [default: 1000, or 10000 with --data-example].
    #[arg(long)]
    pub perms: Option<usize>,
    /// Budgets used for real-data analyses.
    #[arg(long)]
    pub data_example: bool,
    #[command(flatten)]
    pub chain: ChainArgs,
    #[arg(long, value_enum, default_value = "paired")]
    pub estimator: EstimatorArg,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the permutation null draws as CSV.
    #[arg(long)]
    pub null_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MarginArg {
    X,
    Y,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// Two-column (one margin) or four-column CSV.
    pub input: PathBuf,
    #[arg(long = "type", value_enum)]
    pub data_type: Option<DataType>,
    /// Margin of a four-column file.
    #[arg(long, value_enum, default_value = "x")]
    pub margin: MarginArg,
    #[arg(long, default_value_t = 1_000)]
    pub count: usize,
    #[command(flatten)]
    pub chain: ChainArgs,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CopulaArg {
    Clayton,
    Frank,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ScenarioArg {
    Right,
    C1,
    C2,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value = "clayton")]
    pub copula: CopulaArg,
    /// Kendall's tau of the copula, in [0, 1).
    #[arg(long, default_value_t = 0.0)]
    pub tau: f64,
    #[arg(long, value_enum, default_value = "right")]
    pub scenario: ScenarioArg,
    #[arg(long, default_value_t = 50)]
    pub n: usize,
    #[arg(long, default_value_t = 500)]
    pub reps: usize,
    /// Censoring bound c_R (for c2, a multiple of 3).
    #[arg(long, default_value_t = 9.0)]
    pub cr: f64,
    /// First-visit bound c_L of scenario c1.
    #[arg(long, default_value_t = 3.0)]
    pub cl: f64,
    #[arg(long, default_value_t = 1_000)]
    pub mc_samples: usize,
    #[arg(long, default_value_t = 1_000)]
    pub perms: usize,
    #[arg(long, default_value_t = 0.05)]
    pub level: f64,
    #[command(flatten)]
    pub chain: ChainArgs,
    #[arg(long, value_enum, default_value = "paired")]
    pub estimator: EstimatorArg,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GraphArg {
    Circulant,
    Regular,
    Watts,
}

#[derive(Debug, Args)]
pub struct MixdiagArgs {
    #[arg(long, value_enum, default_value = "circulant")]
    pub graph: GraphArg,
    /// Nodes [default: 101 for circulant, 100 otherwise].
    #[arg(long)]
    pub n: Option<usize>,
    /// Circulant jumps.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub jumps: Vec<usize>,
    /// Degree of the regular graph or lattice degree of Watts-Strogatz [default: 3 or 4].
    #[arg(long)]
    pub k: Option<usize>,
    /// Watts-Strogatz rewiring probability.
    #[arg(long, default_value_t = 0.1)]
    pub p: f64,
    #[command(flatten)]
    pub chain: ChainArgs,
    /// Retained samples per run.
    #[arg(long, default_value_t = 10_000)]
    pub total: usize,
    /// Checkpoints as retained-sample counts [default: 100, 1000, ... then total].
    #[arg(long, value_delimiter = ',')]
    pub checkpoints: Option<Vec<usize>>,
    /// Independent replicate runs.
    #[arg(long, default_value_t = 1)]
    pub seeds: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn resolve_seed(seed: Option<u64>, strict: bool) -> CliResult<u64> {
    match (seed, strict) {
        (Some(s), _) => Ok(s),
        (None, true) => Err(CliError::Input("--strict requires an explicit --seed".into())),
        (None, false) => Ok(0),
    }
}

fn read_input(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// Runs `write` against the file at `path`, or against `stdout`.
fn emit(
    path: Option<&Path>,
    stdout: &mut dyn Write,
    write: impl FnOnce(&mut dyn Write) -> std::io::Result<()>,
) -> CliResult<()> {
    match path {
        Some(p) => {
            let mut file = std::io::BufWriter::new(fs::File::create(p).map_err(|e| CliError::io(p, e))?);
            write(&mut file).and_then(|_| file.flush()).map_err(|e| CliError::io(p, e))
        }
        None => write(stdout).map_err(|e| CliError::io("<stdout>", e)),
    }
}

fn csv_io(e: csv::Error) -> std::io::Error {
    std::io::Error::other(e)
}

pub fn run(cli: Cli, stdout: &mut dyn Write) -> CliResult<()> {
    let threads = cli.threads;
    let strict = cli.strict;
    match cli.command {
        Command::Test(a) => cmd_test(a, threads, strict, stdout),
        Command::Sample(a) => cmd_sample(a, strict, stdout),
        Command::Simulate(a) => cmd_simulate(a, threads, strict, stdout),
        Command::Mixdiag(a) => cmd_mixdiag(a, threads, strict, stdout),
    }
}

fn cmd_test(a: TestArgs, threads: Option<usize>, strict: bool, stdout: &mut dyn Write) -> CliResult<()> {
    let started = Instant::now();
    let seed = resolve_seed(a.seed, strict)?;
    let (dataset, kind) = io::parse_dataset(&read_input(&a.input)?, a.data_type)?;
    let (default_mc, default_perms) = if a.data_example { (5_000, 10_000) } else { (1_000, 1_000) };
    let config = TestConfig {
        mc_samples: a.mc_samples.unwrap_or(default_mc),
        perms: a.perms.unwrap_or(default_perms),
        seed,
        burn_in: a.chain.burn_in,
        thin: a.chain.thin,
        estimator: a.estimator.into(),
    };
    let report = parallel::with_threads(threads, || parallel::test_independence(&dataset, &config))?;
    if let Some(path) = &a.null_out {
        emit(Some(path), stdout, |w| {
            io::write_comment(w, &[("seed", seed.to_string()), ("perms", config.perms.to_string())])?;
            io::write_null_draws(w, &report.null_draws).map_err(csv_io)
        })?;
    }
    let elapsed_ms = started.elapsed().as_millis() as u64;
    let json = JsonReport::new(&report, kind.name(), elapsed_ms).to_json();
    emit(a.out.as_deref(), stdout, |w| writeln!(w, "{json}"))
}

fn cmd_sample(a: SampleArgs, strict: bool, stdout: &mut dyn Write) -> CliResult<()> {
    let seed = resolve_seed(a.seed, strict)?;
    let margin = match a.margin {
        MarginArg::X => Margin::X,
        MarginArg::Y => Margin::Y,
    };
    let bounds = io::parse_margin_bounds(&read_input(&a.input)?, a.data_type, margin)?;
    let space = RestrictedSpace::new(bounds)?;
    let config = SamplerConfig { burn_in: a.chain.burn_in, thin: a.chain.thin, count: a.count, seed };
    let samples = sample_uniform(&space, &config)?;
    emit(a.out.as_deref(), stdout, |w| {
        io::write_comment(
            w,
            &[
                ("seed", seed.to_string()),
                ("burn_in", config.burn_in.to_string()),
                ("thin", config.thin.to_string()),
                ("count", config.count.to_string()),
            ],
        )?;
        io::write_samples(w, &samples).map_err(csv_io)
    })
}

fn cmd_simulate(a: SimulateArgs, threads: Option<usize>, strict: bool, stdout: &mut dyn Write) -> CliResult<()> {
    let seed = resolve_seed(a.seed, strict)?;
    let family = match a.copula {
        CopulaArg::Clayton => CopulaFamily::Clayton,
        CopulaArg::Frank => CopulaFamily::Frank,
    };
    let (scheme, scenario_name) = match a.scenario {
        ScenarioArg::Right => (CensoringScheme::Right { c_r: a.cr }, "right"),
        ScenarioArg::C1 => (CensoringScheme::C1 { c_l: a.cl, c_r: a.cr }, "c1"),
        ScenarioArg::C2 => (CensoringScheme::C2 { c_r: a.cr }, "c2"),
    };
    let copula = CopulaSpec { family, tau: a.tau };
    let scenario = ScenarioSpec { scheme, n: a.n, reps: a.reps, level: a.level };
    let estimator: Estimator = a.estimator.into();
    let budgets =
        Budgets { mc_samples: a.mc_samples, perms: a.perms, burn_in: a.chain.burn_in, thin: a.chain.thin, estimator };
    let summary = parallel::with_threads(threads, || parallel::run_experiment(&copula, &scenario, &budgets, seed))?;

    let copula_name = match family {
        CopulaFamily::Clayton => "clayton",
        CopulaFamily::Frank => "frank",
    };
    let c_l = match scheme {
        CensoringScheme::C1 { c_l, .. } => fmt_f64(c_l),
        _ => String::new(),
    };
    let fixed = [
        copula_name.to_string(),
        fmt_f64(a.tau),
        scenario_name.to_string(),
        c_l,
        fmt_f64(a.cr),
        a.n.to_string(),
        a.reps.to_string(),
        a.mc_samples.to_string(),
        a.perms.to_string(),
        fmt_f64(a.level),
        seed.to_string(),
    ];
    let mut rows: Vec<(&str, &EstimatorSummary)> =
        vec![(if estimator == Estimator::Paired { "rp" } else { "rp_product" }, &summary.rp)];
    if let Some(o) = &summary.oakes {
        rows.push(("oakes", o));
    }
    emit(a.out.as_deref(), stdout, |w| {
        io::write_comment(w, &[("seed", seed.to_string())])?;
        let mut out = csv::Writer::from_writer(w);
        out.write_record([
            "copula",
            "tau",
            "scenario",
            "c_l",
            "c_r",
            "n",
            "reps",
            "mc_samples",
            "perms",
            "level",
            "seed",
            "estimator",
            "metric",
            "value",
        ])
        .map_err(csv_io)?;
        for (name, s) in rows {
            for (metric, value) in [("bias", s.bias), ("mse", s.mse), ("ep_a", s.ep_a), ("ep_p", s.ep_p)] {
                let mut record: Vec<String> = fixed.to_vec();
                record.extend([name.to_string(), metric.to_string(), fmt_f64(value)]);
                out.write_record(&record).map_err(csv_io)?;
            }
        }
        out.flush()
    })
}

fn build_graph(a: &MixdiagArgs, seed: u64) -> CliResult<SimpleGraph> {
    let mut graph_rng = rng::derived(seed, stream::GRAPH, 0);
    Ok(match a.graph {
        GraphArg::Circulant => gen_circulant(a.n.unwrap_or(101), &a.jumps)?,
        GraphArg::Regular => gen_random_regular(a.n.unwrap_or(100), a.k.unwrap_or(3), &mut graph_rng)?,
        GraphArg::Watts => gen_watts_strogatz(a.n.unwrap_or(100), a.k.unwrap_or(4), a.p, &mut graph_rng)?,
    })
}

fn cmd_mixdiag(a: MixdiagArgs, threads: Option<usize>, strict: bool, stdout: &mut dyn Write) -> CliResult<()> {
    let seed = resolve_seed(a.seed, strict)?;
    if a.seeds == 0 {
        return Err(CliError::Input("--seeds must be at least 1".into()));
    }
    let graph = build_graph(&a, seed)?;
    let checkpoints = a.checkpoints.clone().unwrap_or_else(|| geometric_checkpoints(a.total));
    let configs: Vec<MixingConfig> = (0..a.seeds as u64)
        .map(|r| MixingConfig {
            burn_in: a.chain.burn_in,
            thin: a.chain.thin,
            checkpoints: checkpoints.clone(),
            seed: rng::derive_seed(seed, stream::GRAPH, r + 1),
            start: 0,
        })
        .collect();
    let traces = parallel::with_threads(threads, || parallel::mixing_reports(&graph, &configs))?;
    let graph_name = match a.graph {
        GraphArg::Circulant => "circulant",
        GraphArg::Regular => "regular",
        GraphArg::Watts => "watts",
    };
    emit(a.out.as_deref(), stdout, |w| {
        io::write_comment(
            w,
            &[
                ("seed", seed.to_string()),
                ("graph", graph_name.to_string()),
                ("nodes", graph.node_count().to_string()),
                ("burn_in", a.chain.burn_in.to_string()),
                ("thin", a.chain.thin.to_string()),
                ("retained_counts", "thinned_samples_after_burn_in".to_string()),
            ],
        )?;
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["run", "run_seed", "mode", "retained", "d_sup", "d_tv"]).map_err(csv_io)?;
        for (r, (trace, cfg)) in traces.iter().zip(&configs).enumerate() {
            for row in &trace.rows {
                out.write_record([
                    r.to_string(),
                    cfg.seed.to_string(),
                    row.mode.name().to_string(),
                    row.retained.to_string(),
                    fmt_f64(row.d_sup),
                    fmt_f64(row.d_tv),
                ])
                .map_err(csv_io)?;
            }
        }
        out.flush()
    })
}
