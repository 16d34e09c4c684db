//! `nts`: generate trees, simulate searches, run experiment files, compute
//! exact expectations and drive the acceptance checks.

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use nts_core::algo::{Algorithm, Metric};
use nts_core::harness::{
    load_config, run_with_threads, sweep, write_csv, write_jsonl, ExperimentSpec, ModelSpec, QSpec, ResultRow,
    TreeSpec,
};
use nts_core::noise::DEFAULT_ENUMERATION_CAP;
use nts_core::oracle::exact_expected_cost;
use nts_core::tree::DEFAULT_NODE_BUDGET;
use nts_core::verify::{criterion_id, run_criterion, CRITERIA};
use nts_core::Topology;

#[derive(Parser)]
#[command(name = "nts", version, about = "Search on trees with permanently noisy advice")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a tree and print it in the text format.
    Generate {
        /// Generator, e.g. `ary:delta=4,d=3` or `random:n=50,seed=1`.
        #[arg(long)]
        tree: String,
        /// Write to this file instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run one experiment and print its result row.
    Simulate(SimulateArgs),
    /// Run one experiment per value of a parameter.
    Sweep {
        #[command(flatten)]
        sim: SimulateArgs,
        /// Parameter to vary: `q`, `seed`, `trials`, `tree.<key>` or an
        /// algorithm parameter.
        #[arg(long)]
        axis: String,
        /// Values separated by `;`.
        #[arg(long)]
        values: String,
    },
    /// Run every experiment of a config file.
    Run {
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        out: Format,
    },
    /// Exact expected cost by enumerating every advice assignment.
    Oracle {
        #[command(flatten)]
        exp: ExperimentArgs,
        #[arg(long, value_enum, default_value_t = MetricArg::Queries)]
        metric: MetricArg,
        /// Most nodes with random advice the enumeration accepts.
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: usize,
    },
    /// Run acceptance checks; exits 0 iff all requested checks pass.
    Verify {
        /// Criteria to run, e.g. `--only AC3 --only AC7`; all by default.
        #[arg(long)]
        only: Vec<String>,
        /// Print per-case details.
        #[arg(long, short)]
        verbose: bool,
    },
}

#[derive(Args)]
struct ExperimentArgs {
    /// Tree file or generator, e.g. `complete:b=2,d=5` or `file:tree.txt`.
    #[arg(long)]
    tree: String,
    /// a_walk, a_natural, a_walk_uniform_theta, a_sep, a_loop, a_two_layers or pf,
    /// optionally with `:key=value,...`.
    #[arg(long)]
    algo: String,
    /// Fault probability: a number, `inv-degree:c`, `inv-sqrt-degree:c`,
    /// `star:eps=e,frac=f` or `file:path`.
    #[arg(long, default_value = "0")]
    q: String,
    /// `random`, `semiadv:root`, `semiadv:child=k` or `semiadv:<map file>`.
    #[arg(long, default_value = "random")]
    model: String,
    /// Slack of the noise condition for a_sep and a_two_layers.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Probability that pf follows the advice.
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    kappa1: Option<f64>,
    #[arg(long)]
    kappa2: Option<f64>,
    /// Ball height for a_sep, overriding the one derived from epsilon.
    #[arg(long)]
    height: Option<usize>,
    /// Steps after which a pf trial is censored.
    #[arg(long)]
    step_cap: Option<u64>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    exp: ExperimentArgs,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "")]
    name: String,
    /// Worker threads; defaults to NTS_THREADS, then to all cores.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    out: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Moves,
    Queries,
}

impl ExperimentArgs {
    fn algorithm(&self) -> Result<Algorithm> {
        let mut algo: Algorithm = self.algo.parse().map_err(|e: String| anyhow!(e))?;
        let params = [
            ("eps", self.epsilon.map(|v| v.to_string())),
            ("kappa1", self.kappa1.map(|v| v.to_string())),
            ("kappa2", self.kappa2.map(|v| v.to_string())),
            ("h", self.height.map(|v| v.to_string())),
            ("lambda", self.lambda.map(|v| v.to_string())),
            ("cap", self.step_cap.map(|v| v.to_string())),
        ];
        for (key, value) in params {
            if let Some(v) = value {
                algo.set(key, &v).map_err(|e| anyhow!(e))?;
            }
        }
        algo.validate().map_err(|e| anyhow!(e))?;
        Ok(algo)
    }

    fn spec(&self) -> Result<ExperimentSpec> {
        let tree: TreeSpec = self.tree.parse().map_err(|e: String| anyhow!("--tree: {e}"))?;
        let q: QSpec = self.q.parse().map_err(|e: String| anyhow!("--q: {e}"))?;
        let model: ModelSpec = self.model.parse().map_err(|e: String| anyhow!("--model: {e}"))?;
        Ok(ExperimentSpec::new(tree, self.algorithm()?).q(q).model(model))
    }
}

impl SimulateArgs {
    fn spec(&self) -> Result<ExperimentSpec> {
        let spec = self.exp.spec()?.trials(self.trials).seed(self.seed).name(self.name.clone());
        spec.validate().map_err(|e| anyhow!(e))?;
        Ok(spec)
    }
}

fn emit(rows: &[ResultRow], format: Format) -> Result<()> {
    let out = io::stdout().lock();
    match format {
        Format::Csv => write_csv(rows, out)?,
        Format::Json => write_jsonl(rows, out)?,
    }
    Ok(())
}

fn generate(tree: &str, output: Option<PathBuf>) -> Result<()> {
    let spec: TreeSpec = tree.parse().map_err(|e: String| anyhow!("--tree: {e}"))?;
    let inst = spec.build(DEFAULT_NODE_BUDGET)?;
    let t = inst
        .explicit()
        .ok_or_else(|| anyhow!("tree has more than {DEFAULT_NODE_BUDGET} nodes"))?;
    match output {
        Some(path) => t.write_file(&path).with_context(|| format!("writing {}", path.display()))?,
        None => io::stdout().lock().write_all(t.to_text().as_bytes())?,
    }
    Ok(())
}

fn oracle(exp: &ExperimentArgs, metric: MetricArg, cap: usize) -> Result<()> {
    let spec = exp.spec()?;
    let inst = spec.tree.build(DEFAULT_NODE_BUDGET)?;
    let t = inst.explicit().ok_or_else(|| anyhow!("the oracle needs an explicit tree"))?;
    let model = spec.noise()?;
    model.validate(t)?;
    let metric = match metric {
        MetricArg::Moves => Metric::Moves,
        MetricArg::Queries => Metric::Queries,
    };
    let exact = exact_expected_cost(t, &model, &spec.algo, metric, cap)?;
    let approx = approx(&exact);
    println!("{exact}");
    eprintln!(
        "{} {metric} on {} ({} nodes, treasure depth {}): {approx}",
        spec.algo,
        spec.tree,
        t.node_count(),
        t.treasure_depth()
    );
    Ok(())
}

fn approx(x: &num_rational::BigRational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

fn verify(only: &[String], verbose: bool) -> Result<bool> {
    let ids: Vec<&str> = if only.is_empty() {
        CRITERIA.to_vec()
    } else {
        only.iter().map(|s| criterion_id(s)).collect::<Result<_, _>>()?
    };
    let mut all = true;
    for id in ids {
        let report = run_criterion(id)?;
        println!("{report}");
        if verbose {
            for d in &report.details {
                println!("    {d}");
            }
        }
        all &= report.passed;
    }
    Ok(all)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate { tree, output } => generate(&tree, output).map(|_| true),
        Command::Simulate(sim) => sim
            .spec()
            .and_then(|spec| Ok(run_with_threads(&spec, sim.threads)?))
            .and_then(|row| emit(&[row], sim.out))
            .map(|_| true),
        Command::Sweep { sim, axis, values } => (|| {
            let values: Vec<String> = values.split(';').map(|v| v.trim().to_string()).filter(|v| !v.is_empty()).collect();
            if values.is_empty() {
                bail!("--values lists no values");
            }
            let rows = sweep(&axis, &values, &sim.spec()?)?;
            emit(&rows, sim.out)?;
            Ok(true)
        })(),
        Command::Run { config, out } => (|| {
            let mut rows = Vec::new();
            for plan in load_config(&config).with_context(|| format!("reading {}", config.display()))? {
                rows.extend(plan.run()?);
            }
            emit(&rows, out)?;
            Ok(true)
        })(),
        Command::Oracle { exp, metric, cap } => oracle(&exp, metric, cap).map(|_| true),
        Command::Verify { only, verbose } => verify(&only, verbose),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
