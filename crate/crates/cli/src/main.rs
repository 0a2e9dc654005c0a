use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use phase_avg::harness::{
    run_experiment, EtaCGrid, Method, ModelId, Preset, RunOptions, SweepConfig, RSWE_SLOW_EPS,
};

#[derive(Parser)]
#[command(name = "phase-avg", version, about = "Window sweeps for finite phase-averaging experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output directory; overrides the config's `output`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Validate and print the resolved configuration without running it.
    #[arg(long, global = true)]
    dry_run: bool,
    /// Allow the very small-eps RSWE runs.
    #[arg(long, global = true)]
    include_slow: bool,
    /// Write zero wall times so repeated runs give identical files.
    #[arg(long, global = true)]
    no_timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweeps in a JSON config file (one object or an array).
    Run { config: PathBuf },
    /// Run a single sweep described on the command line.
    Sweep(Box<SweepArgs>),
    /// Run a bundled experiment set: spring, kg or rswe.
    Preset { name: String },
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    model: String,
    /// pa, mc-classical or mc-local.
    #[arg(long)]
    method: String,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    /// Coarse time steps; repeat or separate with commas.
    #[arg(long, value_delimiter = ',')]
    dt: Vec<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    n_x: Option<usize>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    zeta_start: Option<f64>,
    #[arg(long)]
    zeta_stop: Option<f64>,
    #[arg(long)]
    zeta_step: Option<f64>,
    /// Tie the local correction window to the averaging window.
    #[arg(long, conflicts_with_all = ["eta_c_step", "eta_c_count"])]
    tied: bool,
    #[arg(long)]
    eta_c_step: Option<f64>,
    #[arg(long)]
    eta_c_count: Option<usize>,
    #[arg(long)]
    reference_dt: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    k_min: Option<usize>,
    #[arg(long)]
    c_tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
}

impl SweepArgs {
    fn config(&self) -> Result<SweepConfig> {
        let model = ModelId::parse(&self.model)?;
        let method = Method::parse(&self.method)?;
        let mut c = SweepConfig::defaults(model, method);
        if let Some(eps) = self.eps {
            c = c.with_eps(eps);
        }
        if self.rho.is_some() {
            c.rho = self.rho;
        }
        if !self.dt.is_empty() {
            c.dt = self.dt.clone();
        }
        macro_rules! set {
            ($($field:ident),*) => { $(if let Some(v) = self.$field { c.$field = v; })* };
        }
        set!(t_max, n_x, mu, zeta_start, zeta_stop, zeta_step, reference_dt, c_tol, max_iter);
        if let Some(v) = self.gamma {
            c.kernel.gamma = v;
        }
        if let Some(v) = self.p {
            c.kernel.p = v;
        }
        if let Some(v) = self.k_min {
            c.kernel.k_min = v;
        }
        if self.tied {
            c.eta_c = EtaCGrid::Tied;
        } else if self.eta_c_step.is_some() || self.eta_c_count.is_some() {
            let (step, count) = match c.eta_c {
                EtaCGrid::Sweep { step, count } => (step, count),
                EtaCGrid::Tied => (c.eps, 40),
            };
            c.eta_c = EtaCGrid::Sweep {
                step: self.eta_c_step.unwrap_or(step),
                count: self.eta_c_count.unwrap_or(count),
            };
        }
        c.validate()?;
        Ok(c)
    }
}

fn load(command: &Command, include_slow: bool) -> Result<Vec<SweepConfig>> {
    Ok(match command {
        Command::Run { config } => {
            let text = std::fs::read_to_string(config).with_context(|| format!("reading {}", config.display()))?;
            SweepConfig::list_from_json(&text).with_context(|| format!("parsing {}", config.display()))?
        }
        Command::Sweep(args) => vec![args.config()?],
        Command::Preset { name } => Preset::parse(name)?.configs(include_slow),
    })
}

fn main() -> ExitCode {
    match real_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn real_main() -> Result<()> {
    let cli = Cli::parse();
    let configs = load(&cli.command, cli.common.include_slow)?;
    if !cli.common.include_slow {
        if let Some(c) = configs.iter().find(|c| c.model == ModelId::Rswe && c.eps <= RSWE_SLOW_EPS) {
            bail!("rswe at eps = {} is slow; pass --include-slow to run it", c.eps);
        }
    }
    if cli.common.dry_run {
        println!("{}", serde_json::to_string_pretty(&configs)?);
        return Ok(());
    }
    let out = cli
        .common
        .out
        .clone()
        .or_else(|| configs.iter().find_map(|c| c.output.clone()))
        .unwrap_or_else(|| PathBuf::from("out"));
    let options = RunOptions {
        workers: cli.common.workers,
        timing: !cli.common.no_timing,
    };
    let result = run_experiment(&configs, &options, &out)?;
    println!("model,method,eps,rho,dt,eta_star,eta_c_star,error,phase_averaged_error");
    for s in &result.report.selections {
        println!(
            "{},{},{},{},{},{},{},{:.6e},{}",
            s.model.label(),
            s.method.label(),
            s.eps,
            s.rho.map(|r| r.to_string()).unwrap_or_default(),
            s.dt,
            s.eta_star,
            s.eta_c_star.map(|r| r.to_string()).unwrap_or_default(),
            s.error,
            s.phase_averaged_error.map(|e| format!("{e:.6e}")).unwrap_or_default(),
        );
    }
    eprintln!("wrote {} and {}", result.csv.display(), result.json.display());
    Ok(())
}
