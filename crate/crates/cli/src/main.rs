use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use facet_core::instances::write_quad;
use facet_core::polytope::{write_graph, GraphSpec};
use facet_core::trace::summary_path;
use facet_core::{calibrate_sigma, generate, run, Algorithm, Calibration, ClockMode, Family, InstanceSpec, RunConfig};

#[derive(Parser)]
#[command(
    name = "facet-fw",
    version,
    about = "Frank-Wolfe benchmarks over combinatorial polytopes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one algorithm on one generated instance and write its trace.
    Run(RunArgs),
    /// Find the smallest integer σ with a certified positive optimum, plus one.
    Calibrate(CalibrateArgs),
    /// Generate an instance and describe or dump it.
    Gen(GenArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyKind {
    SparseRecovery,
    DagChain,
    PmBipartite,
    SimplexLs,
    QuadFile,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClockArg {
    Wall,
    Counted,
}

#[derive(Args)]
struct FamilyArgs {
    #[arg(long, value_enum)]
    family: FamilyKind,
    /// Problem size: sparse-recovery signal length, pm-bipartite side size,
    /// or simplex dimension.
    #[arg(long)]
    n: Option<usize>,
    /// Degree of the pm-bipartite graph.
    #[arg(long)]
    k: Option<usize>,
    /// Layers of the dag-chain graph.
    #[arg(long)]
    layers: Option<usize>,
    /// Nodes per dag-chain layer.
    #[arg(long)]
    labels: Option<usize>,
    /// Leading ones of the sparse-recovery signal.
    #[arg(long)]
    ones: Option<usize>,
    /// Radius of the sparse-recovery ℓ₁ ball.
    #[arg(long)]
    tau: Option<f64>,
    /// Objective file in `quad` format (quad-file family).
    #[arg(long)]
    quad: Option<PathBuf>,
    /// Graph file; the quad-file objective is then posed over its polytope.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Rows of the measurement matrix.
    #[arg(long, default_value_t = facet_core::instances::DEFAULT_M)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl FamilyArgs {
    fn family(&self) -> Result<Family> {
        if self.graph.is_some() && !matches!(self.family, FamilyKind::QuadFile) {
            bail!("--graph only applies to the quad-file family");
        }
        Ok(match self.family {
            FamilyKind::SparseRecovery => Family::SparseRecovery {
                n: self.n.unwrap_or(500),
                ones: self.ones.unwrap_or(20),
                tau: self.tau.unwrap_or(20.0),
            },
            FamilyKind::DagChain => Family::DagChain {
                layers: self.layers.unwrap_or(500),
                labels: self.labels.unwrap_or(20),
            },
            FamilyKind::PmBipartite => Family::PmBipartite {
                n: self.n.unwrap_or(60),
                k: self.k.unwrap_or(10),
            },
            FamilyKind::SimplexLs => Family::SimplexLs {
                n: self.n.unwrap_or(100),
            },
            FamilyKind::QuadFile => Family::QuadFile {
                path: self
                    .quad
                    .clone()
                    .context("--quad is required for the quad-file family")?,
                graph: self.graph.clone(),
            },
        })
    }

    fn spec(&self, sigma: f64) -> Result<InstanceSpec> {
        Ok(InstanceSpec::new(self.family()?, sigma, self.seed).with_m(self.m))
    }

    /// `σ = 0.1` for sparse recovery and `1` elsewhere unless given.
    fn sigma(&self, sigma: Option<f64>) -> f64 {
        sigma.unwrap_or(match self.family {
            FamilyKind::SparseRecovery => 0.1,
            _ => 1.0,
        })
    }
}

#[derive(Args)]
struct SolverArgs {
    /// fw, dicg-afw, dicg-pfw, cache-dicg-afw, cache-dicg-pfw or bcg.
    #[arg(long, default_value = "dicg-pfw")]
    algorithm: Algorithm,
    /// Recursion depth of the self-reducing wrapper (0, 1 or 2).
    #[arg(long, default_value_t = 0)]
    dmax: usize,
    #[arg(long, default_value_t = 1e-6)]
    target_gap: f64,
    /// Wall-clock budget in seconds.
    #[arg(long)]
    budget_secs: Option<f64>,
    #[arg(long)]
    max_oracle_calls: Option<u64>,
    #[arg(long)]
    max_steps: Option<u64>,
    /// Working-set capacity of the cached variant.
    #[arg(long, default_value_t = facet_core::state::DEFAULT_CAPACITY)]
    capacity: usize,
    /// Simplex-loop budget factor of the cached variant.
    #[arg(long)]
    kappa: Option<f64>,
    /// Lazy BCG with factor K.
    #[arg(long)]
    lazy_k: Option<f64>,
    /// Keep the computed state when the recursion rejects a step.
    #[arg(long)]
    accept_all: bool,
    #[arg(long, value_enum, default_value_t = ClockArg::Wall)]
    clock: ClockArg,
}

impl SolverArgs {
    fn config(&self) -> RunConfig {
        let mut cfg = RunConfig::new(self.algorithm)
            .with_d_max(self.dmax)
            .with_target_gap(self.target_gap)
            .with_max_steps(self.max_steps)
            .with_clock(match self.clock {
                ClockArg::Wall => ClockMode::Wall,
                ClockArg::Counted => ClockMode::Counted,
            });
        cfg.control.max_wall_secs = self.budget_secs;
        cfg.control.max_oracle_calls = self.max_oracle_calls;
        cfg.control.accept_all = self.accept_all;
        cfg.capacity = self.capacity;
        cfg.kappa = self.kappa;
        if let Some(k) = self.lazy_k {
            cfg.lazy = true;
            cfg.k = k;
        }
        cfg
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    instance: FamilyArgs,
    #[arg(long)]
    sigma: Option<f64>,
    #[command(flatten)]
    solver: SolverArgs,
    /// Trace CSV; the summary goes next to it as `<stem>.summary.csv`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CalibrateArgs {
    #[command(flatten)]
    instance: FamilyArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long, default_value_t = 1024)]
    max_sigma: u64,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    instance: FamilyArgs,
    #[arg(long)]
    sigma: Option<f64>,
    /// Directory receiving `instance.quad`, `instance.graph` (graph
    /// families) and `x_star.txt`.
    #[arg(long)]
    dump: Option<PathBuf>,
}

fn cmd_run(args: &RunArgs) -> Result<()> {
    let spec = args.instance.spec(args.instance.sigma(args.sigma))?;
    let instance = generate(&spec)?;
    let trace = run(&instance, &args.solver.config())?;
    if let Some(out) = &args.out {
        trace.emit_csv(out)?;
        eprintln!("wrote {} and {}", out.display(), summary_path(out).display());
    }
    print!("{}", trace.summary_csv());
    Ok(())
}

fn cmd_calibrate(args: &CalibrateArgs) -> Result<ExitCode> {
    let spec = args.instance.spec(0.0)?;
    match calibrate_sigma(&spec, &args.solver.config(), args.max_sigma)? {
        Calibration::Sigma(s) => {
            println!("{s}");
            Ok(ExitCode::SUCCESS)
        }
        Calibration::Indeterminate(s) => {
            eprintln!("indeterminate: the probe at σ = {s} hit its budget");
            Ok(ExitCode::from(2))
        }
    }
}

fn cmd_gen(args: &GenArgs) -> Result<()> {
    let spec = args.instance.spec(args.instance.sigma(args.sigma))?;
    let inst = generate(&spec)?;
    println!("family {}", spec.family.name());
    println!("polytope {} dim {}", inst.polytope.family(), inst.polytope.dim());
    println!("m {} sigma {} seed {}", spec.m, spec.sigma, spec.seed);
    println!("f(x*) {:e}", inst.objective.value(&inst.x_star));
    let Some(dir) = &args.dump else {
        return Ok(());
    };
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let write = |name: &str, text: String| -> Result<()> {
        let path = dir.join(name);
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
    };
    write("instance.quad", write_quad(&inst.objective))?;
    if let Some(graph) = GraphSpec::from_polytope(&inst.polytope) {
        write("instance.graph", write_graph(&graph))?;
    }
    let x: Vec<String> = inst.x_star.iter().map(|v| format!("{v:e}")).collect();
    write("x_star.txt", x.join(" ") + "\n")?;
    println!("dumped to {}", dir.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a).map(|()| ExitCode::SUCCESS),
        Command::Calibrate(a) => cmd_calibrate(a),
        Command::Gen(a) => cmd_gen(a).map(|()| ExitCode::SUCCESS),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
