use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use szego_cli::config::{ExperimentConfig, Precision, Tolerances};
use szego_cli::verify::{self, Suite};
use szego_cli::{commands, CliError};

#[derive(Parser)]
#[command(name = "szego", version, about = "Toeplitz determinant asymptotics experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Wiener-Hopf factorization, G(a), E(a) and factor coefficients.
    Factor {
        #[command(flatten)]
        common: Common,
        /// Largest |k| of the printed factor coefficients.
        #[arg(long, default_value_t = 8)]
        radius: usize,
    },
    /// D_n(a) against G(a)^{n+1} E(a) along n_list.
    Szego {
        #[command(flatten)]
        common: Common,
    },
    /// Exact D_n[a t^kappa] against the predicted asymptotics; CSV plus JSON summary.
    Sweep {
        #[command(flatten)]
        common: Common,
    },
    /// Seeded property suites; exits 1 on any failing trial.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Run a single suite.
        #[arg(long, value_enum)]
        suite: Option<Suite>,
        /// Run a single trial of the selected suites.
        #[arg(long)]
        trial: Option<u32>,
    },
    /// Weighted Orlicz norms, class membership and weight hypotheses.
    OrliczCheck {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// JSON experiment config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated n values, replacing the config's n_list.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long, allow_hyphen_values = true)]
    kappa: Option<i64>,
    #[arg(long, value_enum)]
    precision: Option<Precision>,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig, CliError> {
        let path = self.config.as_ref().ok_or_else(|| CliError::Config("--config <path> is required".into()))?;
        let mut cfg = ExperimentConfig::load(path)?;
        if let Some(n) = &self.n {
            cfg.n_list = n.clone();
        }
        if let Some(k) = self.kappa {
            cfg.kappa = k;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(p) = self.precision {
            cfg.precision = p;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn out(&self, cfg: Option<&ExperimentConfig>) -> Option<PathBuf> {
        self.out.clone().or_else(|| cfg.and_then(|c| c.output.path.as_ref().map(PathBuf::from)))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Factor { common, radius } => {
            let cfg = common.load()?;
            commands::factor(&cfg, radius, common.out(Some(&cfg)).as_deref())
        }
        Command::Szego { common } => {
            let cfg = common.load()?;
            commands::szego(&cfg, common.out(Some(&cfg)).as_deref())
        }
        Command::Sweep { common } => {
            let cfg = common.load()?;
            commands::sweep(&cfg, common.out(Some(&cfg)).as_deref())
        }
        Command::OrliczCheck { common } => {
            let cfg = common.load()?;
            commands::orlicz_check(&cfg, common.out(Some(&cfg)).as_deref())
        }
        Command::Verify { common, suite, trial } => {
            let cfg = common.config.is_some().then(|| common.load()).transpose()?;
            let seed = common.seed.or(cfg.as_ref().map(|c| c.seed)).unwrap_or(0);
            let tol = cfg.as_ref().map(|c| c.tolerances.clone()).unwrap_or_else(Tolerances::default);
            let suites = suite.map_or(Suite::ALL.to_vec(), |s| vec![s]);
            let report = verify::run(seed, &suites, trial, &tol);
            let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
            commands::emit(common.out(cfg.as_ref()).as_deref(), &text)?;
            for s in &report.suites {
                for f in &s.failures {
                    eprintln!("FAIL {} trial {} (error {:e}); reproduce: {}", s.name, f.trial, f.error, f.reproduce);
                }
            }
            if report.passed {
                Ok(())
            } else {
                Err(CliError::VerifyFailed(report.failed_trials as usize))
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
