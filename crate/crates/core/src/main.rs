use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use portflow::scenario::{self, Outcome, ScenarioConfig, SCENARIOS};
use portflow::Error;

#[derive(Parser)]
#[command(name = "portflow", version, about = "Port-Hamiltonian fluid and rigid body simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario from a JSON config and write its outputs.
    Run {
        config: PathBuf,
        /// Output directory; overrides the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seed for randomized checks; overrides the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a built-in scenario with its defaults, or `all` of them.
    Check { suite: String },
    /// List the built-in scenarios.
    List,
}

const VALIDATION: u8 = 2;
const TOLERANCE: u8 = 3;

/// Configuration problems exit with 2; anything that goes wrong once the
/// run is under way counts as a failed check.
fn code(e: &Error) -> u8 {
    match e {
        Error::Config { .. } | Error::Json(_) | Error::UnknownComponent(_) => VALIDATION,
        _ => TOLERANCE,
    }
}

fn report(o: &Outcome) -> bool {
    for c in &o.checks {
        println!("{}: {c}", o.scenario);
    }
    o.passed()
}

fn run(config: PathBuf, out: Option<PathBuf>, seed: Option<u64>) -> Result<bool, Error> {
    let mut cfg = ScenarioConfig::load(&config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if out.is_some() {
        cfg.out = out;
    }
    cfg.validate()?;
    let outcome = scenario::run(&cfg)?;
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("out").join(&cfg.scenario));
    for f in outcome.write(&dir, &cfg)? {
        eprintln!("wrote {}", f.display());
    }
    Ok(report(&outcome))
}

fn check(suite: &str) -> Result<bool, Error> {
    let names: Vec<&str> = if suite == "all" {
        SCENARIOS.iter().map(|(n, _)| *n).collect()
    } else {
        scenario::describe(suite)?;
        vec![suite]
    };
    let mut pass = true;
    for name in names {
        let outcome = scenario::run(&scenario::defaults(name)?)?;
        pass &= report(&outcome);
    }
    Ok(pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, out, seed } => run(config, out, seed),
        Command::Check { suite } => check(&suite),
        Command::List => {
            for (name, about) in SCENARIOS {
                println!("{name:<22}{about}");
            }
            Ok(true)
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(TOLERANCE),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(code(&e))
        }
    }
}
