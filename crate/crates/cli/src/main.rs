use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tml_hawkes::experiments::{compare_histograms, run_generic, ConfigLayer, ExperimentConfig, Format, Preset, Task};
use tml_hawkes::kernels::KernelSpec;
use tml_hawkes::Error;

/// Worker threads for the Monte-Carlo runs; results do not depend on it.
const THREADS_VAR: &str = "TML_HAWKES_THREADS";

#[derive(Parser)]
#[command(name = "tml-hawkes", version, about = "Hawkes processes with tempered Mittag-Leffler kernel")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the three-parameter Mittag-Leffler function.
    MlEval {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        b: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        c: f64,
        #[arg(long, allow_hyphen_values = true)]
        z: f64,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
    },
    /// Tabulate kernel density and CDF on (0, tmax].
    Kernel {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        tmax: f64,
        #[arg(long, default_value_t = 100)]
        points: usize,
    },
    /// Expected intensity, closed form against numerical inversion.
    Intensity {
        #[command(flatten)]
        common: Common,
        /// Evaluation times, comma separated; defaults to 0.01..15 step 0.01.
        #[arg(long, value_delimiter = ',')]
        t: Option<Vec<f64>>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Event times of one simulated path on [0, horizon].
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        horizon: f64,
        #[arg(long, default_value_t = 0)]
        replication: u64,
    },
    /// Histogram of N(t) over independent replications.
    Distribution {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        t: f64,
    },
    /// Reproduce one of the figure presets.
    Preset {
        name: Preset,
        #[command(flatten)]
        common: Common,
    },
    /// Total-variation distance between two histogram files.
    Compare { first: PathBuf, second: PathBuf },
}

#[derive(Args)]
struct Common {
    /// JSON config file; flags take precedence over it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    lambda0: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Kernel family built from the parameters; defaults to the tempered kernel.
    #[arg(long, value_enum)]
    kernel: Option<KernelArg>,
    #[arg(long)]
    runs: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelArg {
    Tml,
    Ml,
    Exponential,
    None,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Numeric(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e.root() {
            Error::InvalidParameter { .. } | Error::Unsupported(_) => Failure::Usage(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

impl Common {
    fn resolve(&self, preset: Option<Preset>, defaults: ConfigLayer) -> Result<ExperimentConfig, Failure> {
        let file = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
                ConfigLayer::from_json(&text)?
            }
            None => ConfigLayer::default(),
        };
        let flags = ConfigLayer {
            preset,
            lambda0: self.lambda0,
            alpha: self.alpha,
            beta: self.beta,
            nu: self.nu,
            gamma: self.gamma,
            n_runs: self.runs,
            master_seed: self.seed,
            output: self.output.clone(),
            format: self.format.map(Format::from),
            ..Default::default()
        };
        let mut cfg = ExperimentConfig::resolve(defaults.merge(file).merge(flags))?;
        if let Some(k) = self.kernel {
            let p = cfg.params;
            cfg.kernel = match k {
                KernelArg::Tml => p.kernel(),
                KernelArg::Ml => KernelSpec::MittagLeffler { beta: p.beta, gamma: p.gamma },
                KernelArg::Exponential => KernelSpec::Exponential { gamma: p.gamma },
                KernelArg::None => KernelSpec::None,
            };
            cfg.kernel.validate()?;
            if cfg.preset.is_some() {
                cfg.overrides.push("kernel".into());
            }
        }
        Ok(cfg)
    }
}

fn emit(cfg_output: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match cfg_output {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Numeric(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execute(cli: Cli) -> Result<(), Failure> {
    // kernel-only and single-path commands do not need a baseline rate
    let unit_rate = ConfigLayer { lambda0: Some(1.0), ..Default::default() };
    let (cfg, task) = match cli.command {
        Command::MlEval { a, b, c, z, tol, format } => {
            let cfg = ExperimentConfig::resolve(ConfigLayer {
                lambda0: Some(1.0),
                beta: Some(1.0),
                gamma: Some(1.0),
                format: format.map(Format::from),
                ..Default::default()
            })?;
            (cfg, Task::MlEval { a, b, c, z, tol })
        }
        Command::Kernel { common, tmax, points } => (common.resolve(None, unit_rate)?, Task::Kernel { t_max: tmax, points }),
        Command::Intensity { common, t, tol } => {
            let mut cfg = common.resolve(None, ConfigLayer::default())?;
            if let Some(t) = t {
                cfg.t_values = t;
            }
            (cfg, Task::Intensity { tol })
        }
        Command::Simulate { common, horizon, replication } => {
            (common.resolve(None, ConfigLayer::default())?, Task::Simulate { horizon, replication })
        }
        Command::Distribution { common, t } => (common.resolve(None, ConfigLayer::default())?, Task::Distribution { t }),
        Command::Preset { name, common } => {
            let mut cfg = common.resolve(Some(name), ConfigLayer::default())?;
            if common.format.is_none() {
                cfg.format = if name == Preset::Fig1 { Format::Csv } else { Format::Json };
            }
            (cfg, Task::Preset)
        }
        Command::Compare { first, second } => {
            let read = |p: &PathBuf| {
                std::fs::read_to_string(p).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", p.display())))
            };
            let tv = compare_histograms(&read(&first)?, &read(&second)?)?;
            println!("{tv}");
            return Ok(());
        }
    };
    let text = run_generic(&cfg, &task)?;
    emit(cfg.output.as_ref(), &text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(value) = std::env::var(THREADS_VAR) {
        match value.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: {THREADS_VAR} must be a positive integer, got `{value}`");
                return ExitCode::from(2);
            }
        }
    }
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
