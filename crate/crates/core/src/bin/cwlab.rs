use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cwlab::chain::Start;
use cwlab::experiments::{error_json, exit_code, figure_data, run_spec, ExperimentSpec, Figure, FigureOptions, Kind};
use cwlab::{Error, Result};

/// Exact and simulated Glauber dynamics for the Curie-Weiss model.
#[derive(Parser)]
#[command(name = "cwlab", version)]
struct Cli {
    /// Worker threads for sweep points and replicas.
    #[arg(long, global = true, env = "CWLAB_JOBS")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Positive root of tanh(beta x) = x.
    Zeta(SpecArgs),
    /// Transition probabilities of the magnetization chain.
    KernelDump(SpecArgs),
    /// Exact stationary law.
    Stationary(SpecArgs),
    /// Exact distance to stationarity over time.
    TvProfile(SpecArgs),
    /// Exact mixing times.
    Tmix(SpecArgs),
    /// Spectral gap and Dirichlet-form bound.
    Gap(SpecArgs),
    /// Bottleneck ratio.
    Conductance(SpecArgs),
    /// Spin-dynamics trajectories.
    Simulate(SpecArgs),
    /// Hitting times of the magnetization chain.
    Hitting(SpecArgs),
    /// Coalescence times of coupled censored magnetization chains.
    Coalesce(SpecArgs),
    /// Agreement statistics of two censored dynamics.
    TwoCoord(SpecArgs),
    /// Brute-force comparison against the full dynamics (n <= 12).
    OracleCheck(SpecArgs),
    /// Any kind over the n x beta grid.
    Sweep {
        #[arg(long = "kind", value_enum)]
        of: Option<Kind>,
        #[command(flatten)]
        args: SpecArgs,
    },
    /// Run the spec in a JSON config file; flags override its fields.
    Run(SpecArgs),
    /// Data behind a figure or scaling table.
    Figure(FigureArgs),
}

#[derive(Args, Default)]
struct SpecArgs {
    /// JSON spec file; flags given on the command line override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    beta: Vec<f64>,
    /// bottom, top, all-plus, all-minus or a magnetization value.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    start: Vec<Start>,
    #[arg(long, allow_negative_numbers = true)]
    start_other: Option<Start>,
    /// Censored dynamics (the default).
    #[arg(long, conflicts_with = "ordinary")]
    censored: bool,
    /// Ordinary Glauber dynamics.
    #[arg(long)]
    ordinary: bool,
    /// Step budget or horizon.
    #[arg(long)]
    steps: Option<u64>,
    /// Grid or recording interval in steps.
    #[arg(long)]
    every: Option<u64>,
    #[arg(long)]
    replicas: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    eps: Vec<f64>,
    #[arg(long)]
    threshold: Option<f64>,
    /// Output CSV path (a JSON sidecar is written next to it); stdout if absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct FigureArgs {
    #[arg(value_enum)]
    which: Figure,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Temperature offset for fig1.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Sizes for the scaling tables.
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    #[arg(long)]
    beta: Option<f64>,
}

fn read_config(path: &PathBuf) -> Result<ExperimentSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))?;
    ExperimentSpec::from_json(&text)
}

impl SpecArgs {
    /// File spec (or a fresh one of `kind`) with the flags applied on top.
    fn merge(self, kind: Option<Kind>) -> Result<ExperimentSpec> {
        let mut spec = match (&self.config, kind) {
            (Some(path), kind) => {
                let mut spec = read_config(path)?;
                if let Some(k) = kind {
                    spec.kind = k;
                }
                spec
            }
            (None, Some(k)) => ExperimentSpec::new(k),
            (None, None) => return Err(Error::InvalidParameter("run needs --config".into())),
        };
        if !self.n.is_empty() {
            spec.n = self.n;
        }
        if !self.beta.is_empty() {
            spec.beta = self.beta;
        }
        if !self.start.is_empty() {
            spec.start = self.start;
        }
        if self.start_other.is_some() {
            spec.start_other = self.start_other;
        }
        if self.censored {
            spec.censored = true;
        }
        if self.ordinary {
            spec.censored = false;
        }
        spec.steps = self.steps.or(spec.steps);
        spec.every = self.every.or(spec.every);
        spec.replicas = self.replicas.unwrap_or(spec.replicas);
        spec.base_seed = self.seed.or(spec.base_seed);
        if !self.eps.is_empty() {
            spec.epsilon = self.eps;
        }
        spec.threshold = self.threshold.or(spec.threshold);
        spec.output = self.output.or(spec.output);
        Ok(spec)
    }
}

fn execute(command: Command) -> Result<()> {
    let (kind, args) = match command {
        Command::Figure(f) => {
            let mut opts = FigureOptions::new(f.which);
            opts.delta = f.delta.unwrap_or(opts.delta);
            opts.seed = f.seed.unwrap_or(opts.seed);
            opts.beta = f.beta.unwrap_or(opts.beta);
            if !f.n.is_empty() {
                opts.n = f.n;
            }
            let path = figure_data(&opts, &f.out_dir)?;
            eprintln!("wrote {}", path.display());
            return Ok(());
        }
        Command::Sweep { of, args } => {
            let mut spec = args.merge(Some(Kind::Sweep))?;
            spec.of = of.or(spec.of);
            run_spec(&spec)?;
            return Ok(());
        }
        Command::Run(args) => (None, args),
        Command::Zeta(a) => (Some(Kind::Zeta), a),
        Command::KernelDump(a) => (Some(Kind::KernelDump), a),
        Command::Stationary(a) => (Some(Kind::Stationary), a),
        Command::TvProfile(a) => (Some(Kind::TvProfile), a),
        Command::Tmix(a) => (Some(Kind::Tmix), a),
        Command::Gap(a) => (Some(Kind::Gap), a),
        Command::Conductance(a) => (Some(Kind::Conductance), a),
        Command::Simulate(a) => (Some(Kind::Simulate), a),
        Command::Hitting(a) => (Some(Kind::Hitting), a),
        Command::Coalesce(a) => (Some(Kind::Coalesce), a),
        Command::TwoCoord(a) => (Some(Kind::TwoCoord), a),
        Command::OracleCheck(a) => (Some(Kind::OracleCheck), a),
    };
    run_spec(&args.merge(kind)?)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("{e}");
        }
    }
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", error_json(&e));
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
