//! Batch benchmark runner: executes scenarios described by flat key=value
//! config files and writes CSV/JSON outputs.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dfib::kernels::KERNEL_NAMES;
use dfib::scenario::{self, Scenario, ScenarioConfig};
use dfib::Error;

#[derive(Parser)]
#[command(name = "dfib", about = "Immersed-boundary benchmark runner", version)]
struct Cli {
    /// Print the resolved preset for a scenario and exit.
    #[arg(long, value_name = "SCENARIO")]
    print_config: Option<String>,

    /// List the available interpolation kernels and exit.
    #[arg(long)]
    list_kernels: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario from a config file, with optional --key value overrides.
    Run {
        config: PathBuf,
        #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
        overrides: Vec<String>,
    },
    /// Run one scenario with both coupling methods and write a comparison CSV.
    Compare {
        config: PathBuf,
        #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
        overrides: Vec<String>,
    },
}

fn apply_overrides(config: &mut ScenarioConfig, overrides: &[String]) -> dfib::Result<()> {
    let mut it = overrides.iter();
    while let Some(flag) = it.next() {
        let key = flag
            .strip_prefix("--")
            .ok_or_else(|| Error::Config(format!("expected --key, got '{flag}'")))?;
        let value = it
            .next()
            .ok_or_else(|| Error::Config(format!("missing value for --{key}")))?;
        config.set(key, value)?;
    }
    Ok(())
}

fn exit_code_for(err: &Error) -> ExitCode {
    match err {
        Error::Config(_) => ExitCode::from(2),
        _ => ExitCode::from(3),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    if cli.list_kernels {
        for name in KERNEL_NAMES {
            println!("{name}");
        }
        return ExitCode::SUCCESS;
    }

    if let Some(name) = &cli.print_config {
        return match Scenario::parse(name) {
            Ok(scenario) => {
                print!("{}", ScenarioConfig::preset(scenario).to_config_text());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        };
    }

    let Some(command) = cli.command else {
        eprintln!("error: no command given (try --help)");
        return ExitCode::from(2);
    };

    let result = (|| -> dfib::Result<()> {
        match command {
            Command::Run { config, overrides } => {
                let mut cfg = ScenarioConfig::from_file(&config)?;
                apply_overrides(&mut cfg, &overrides)?;
                let out = scenario::run(&cfg)?;
                println!("{}", serde_json::to_string_pretty(&out.summary).unwrap());
            }
            Command::Compare { config, overrides } => {
                let mut cfg = ScenarioConfig::from_file(&config)?;
                apply_overrides(&mut cfg, &overrides)?;
                let (dfib_out, ibmac_out) = scenario::compare(&cfg)?;
                println!(
                    "{}",
                    serde_json::to_string_pretty(&serde_json::json!({
                        "dfib": dfib_out.summary,
                        "ibmac": ibmac_out.summary,
                    }))
                    .unwrap()
                );
            }
        }
        Ok(())
    })();

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}
