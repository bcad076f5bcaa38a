use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hyperhs::identities::{is_registered, IDENTITY_IDS};
use hyperhs_cli::{
    default_seed, emit_report, parse_param, run_suite, CheckSpec, Format, Status, SuiteConfig, SuiteResult,
};

/// Numerical verification of Hubbard-Stratonovich identities.
#[derive(Parser)]
#[command(name = "hyperhs", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single identity check.
    Verify {
        identity_id: String,
        /// Checker parameter, `key=v1,v2,...`; repeatable.
        #[arg(short, long = "param", value_parser = parse_param)]
        params: Vec<(String, Vec<f64>)>,
        /// Defaults to $HYPERHS_SEED, then 20240601.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
        /// Write the JSON result here.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Write the CSV result here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run every check in a suite config.
    Suite {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's output path.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// List registered identity ids.
    List,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Box<dyn std::error::Error>> {
    match cli.command {
        Command::List => {
            for id in IDENTITY_IDS {
                println!("{id}");
            }
            Ok(0)
        }
        Command::Verify {
            identity_id,
            params,
            seed,
            samples,
            eps,
            tol,
            json,
            csv,
        } => {
            if !is_registered(&identity_id) {
                return Err(format!("unknown identity `{identity_id}` (see `hyperhs list`)").into());
            }
            let mut spec = CheckSpec::new(&identity_id);
            spec.params = params.into_iter().collect();
            spec.samples = samples;
            spec.eps = eps;
            spec.tol = tol;
            let seed = match seed {
                Some(s) => s,
                None => default_seed()?,
            };
            let config = SuiteConfig::new(seed, vec![spec]);
            let result = run_suite(&config);
            print_summary(&result);
            if let Some(p) = json {
                write_file(&p, &emit_report(&result, Format::Json))?;
            }
            if let Some(p) = csv {
                write_file(&p, &emit_report(&result, Format::Csv))?;
            }
            Ok(result.exit_code() as u8)
        }
        Command::Suite { config, output } => {
            let config = SuiteConfig::from_path(&config)?;
            let result = run_suite(&config);
            let bytes = emit_report(&result, config.format);
            match output.or(config.output.clone()) {
                Some(p) => {
                    write_file(&p, &bytes)?;
                    print_summary(&result);
                }
                None => std::io::stdout().write_all(&bytes)?,
            }
            Ok(result.exit_code() as u8)
        }
    }
}

fn print_summary(result: &SuiteResult) {
    for r in &result.reports {
        match (&r.status, &r.report, &r.error) {
            (_, Some(rep), _) => println!(
                "{:<14} {:<4} ratio {:.9}{:+.9}i  stderr {:.2e}  tol {:.1e}  {} ms",
                r.identity_id,
                if r.status == Status::Passed { "PASS" } else { "FAIL" },
                rep.ratio.re,
                rep.ratio.im,
                rep.stderr,
                rep.tolerance,
                rep.runtime_ms
            ),
            (_, None, err) => println!("{:<14} ERR  {}", r.identity_id, err.as_deref().unwrap_or("")),
        }
    }
    let s = result.summary;
    println!("{} passed, {} failed, {} errored", s.passed, s.failed, s.errored);
}

fn write_file(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    std::fs::write(path, bytes)
}
