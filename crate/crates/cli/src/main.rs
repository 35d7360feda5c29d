use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use tetrad_core::catalog::SpacetimeSpec;
use tetrad_core::suite::{run_suite, Bound, SuiteConfig, DEFAULT_POINTS, DEFAULT_SEED};

#[derive(Parser)]
#[command(
    name = "tetrad",
    version,
    about = "Numerical identity checks for spinors on curved spacetimes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full check suite on one spacetime spec file.
    Verify {
        spec: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Number of sample points (at least 100 recommended).
        #[arg(long, default_value_t = DEFAULT_POINTS)]
        points: usize,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write per-point residuals as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Switch to finite differences with this step (not capped).
        #[arg(long = "fd-step")]
        fd_step: Option<f64>,
    },
}

fn verify(spec_path: PathBuf, config: SuiteConfig, out: Option<PathBuf>, csv: Option<PathBuf>) -> anyhow::Result<bool> {
    let text = std::fs::read_to_string(&spec_path).with_context(|| format!("reading {}", spec_path.display()))?;
    let spec = SpacetimeSpec::parse(&text).with_context(|| format!("parsing {}", spec_path.display()))?;
    if config.points == 0 {
        bail!("--points must be positive");
    }
    if let Some(h) = config.fd_step {
        if !(h > 0.0 && h.is_finite()) {
            bail!("--fd-step must be a positive number");
        }
    }
    let report = run_suite(&spec, &config)?;
    let json = report.to_json();
    match &out {
        Some(path) => std::fs::write(path, json + "\n").with_context(|| format!("writing {}", path.display()))?,
        None => println!("{json}"),
    }
    if let Some(path) = &csv {
        let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        report.write_csv(BufWriter::new(file))?;
    }
    for check in &report.checks {
        let relation = match check.bound {
            Bound::Upper => "<=",
            Bound::Lower => ">",
        };
        eprintln!(
            "{:4} {:32} {:>12.3e} {relation} {:.1e}",
            if check.passed { "ok" } else { "FAIL" },
            check.name,
            check.max_residual,
            check.tolerance
        );
    }
    eprintln!("overall: {}", if report.overall_pass { "pass" } else { "fail" });
    Ok(report.overall_pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify {
            spec,
            seed,
            points,
            out,
            csv,
            fd_step,
        } => verify(spec, SuiteConfig { seed, points, fd_step }, out, csv),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
