use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use symdomain::json::element_from_json;
use symdomain::spectral::{classify, spectral, spectral_norm, SUPER_REGULAR_TOL};
use symdomain::suites::{run_suite, Suite, SuiteConfig, SuiteReport};
use symdomain::TripleSystem;

const EXIT_CHECK_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;

/// Numerical verification of the symplectic geometry of bounded symmetric
/// domains.
#[derive(Parser)]
#[command(name = "symdomain", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and emit a JSON report.
    Verify(VerifyArgs),
    /// Inspect an element.
    Show {
        #[command(subcommand)]
        what: ShowCommand,
    },
    /// List the available suites.
    Suites,
}

#[derive(Subcommand)]
enum ShowCommand {
    /// Spectral values and tripotents of an element given as JSON.
    Spectral {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    #[value(name = "typeI")]
    TypeI,
    #[value(name = "polydisc")]
    Polydisc,
}

#[derive(Args)]
struct VerifyArgs {
    /// One of the names printed by `symdomain suites`.
    suite: String,
    #[arg(long, value_enum, default_value = "typeI")]
    family: FamilyArg,
    #[arg(long, default_value_t = 2)]
    p: usize,
    #[arg(long, default_value_t = 3)]
    q: usize,
    #[arg(long, default_value_t = 3)]
    r: usize,
    #[arg(long, default_value_t = 20)]
    samples: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 1e-5)]
    fd_step: f64,
    /// Tolerance of the pullback identities.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 0.05)]
    gap_tol: f64,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl VerifyArgs {
    fn config(&self) -> anyhow::Result<(Suite, SuiteConfig)> {
        let suite: Suite = self.suite.parse().map_err(anyhow::Error::msg)?;
        let system = match self.family {
            FamilyArg::TypeI => TripleSystem::type_i(self.p, self.q)?,
            FamilyArg::Polydisc => TripleSystem::polydisc(self.r)?,
        };
        if self.samples == 0 {
            bail!("--samples must be at least 1");
        }
        if !(self.fd_step > 0.0 && self.fd_step < 0.1) {
            bail!("--fd-step must lie in (0, 0.1)");
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            bail!("--tol must be positive");
        }
        if !(self.gap_tol >= 0.0 && self.gap_tol < 1.0) {
            bail!("--gap-tol must lie in [0, 1)");
        }
        Ok((
            suite,
            SuiteConfig {
                system,
                samples: self.samples,
                seed: self.seed,
                fd_step: self.fd_step,
                tol: self.tol,
                gap_tol: self.gap_tol,
            },
        ))
    }
}

fn summary(report: &SuiteReport) -> String {
    let mut s = format!(
        "{} on {} (seed {}, {} samples)\n",
        report.suite,
        symdomain_label(report),
        report.seed,
        report.samples
    );
    for c in &report.checks {
        let verdict = match (c.pass, c.as_expected()) {
            (true, _) => "PASS",
            (false, true) => "FAIL (expected)",
            (false, false) => "FAIL",
        };
        s.push_str(&format!(
            "  {verdict:<15} {:<45} {:>12.3e} < {:.0e}\n",
            c.name, c.max_residual, c.tolerance
        ));
        if let Some(e) = &c.error {
            s.push_str(&format!("                  error: {e}\n"));
        }
    }
    s
}

fn symdomain_label(report: &SuiteReport) -> String {
    let d = &report.descriptor;
    match (d.p, d.q, d.r) {
        (Some(p), Some(q), _) => format!("typeI({p},{q})"),
        (_, _, Some(r)) => format!("polydisc({r})"),
        _ => d.family.to_string(),
    }
}

fn verify(args: &VerifyArgs) -> anyhow::Result<ExitCode> {
    let (suite, cfg) = match args.config() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return Ok(ExitCode::from(EXIT_USAGE));
        }
    };
    let report = run_suite(suite, &cfg);
    let text = serde_json::to_string_pretty(&report)? + "\n";
    match &args.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    eprint!("{}", summary(&report));
    Ok(if report.as_expected {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_CHECK_FAILURE)
    })
}

fn show_spectral(input: &PathBuf) -> anyhow::Result<ExitCode> {
    let text = match fs::read_to_string(input) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: reading {}: {e}", input.display());
            return Ok(ExitCode::from(EXIT_USAGE));
        }
    };
    let z = match element_from_json(&text) {
        Ok(z) => z,
        Err(e) => {
            eprintln!("error: {}: {e}", input.display());
            return Ok(ExitCode::from(EXIT_USAGE));
        }
    };
    let dec = spectral(&z)?;
    let class = classify(&z, SUPER_REGULAR_TOL);
    let out = json!({
        "descriptor": z.system().label(),
        "spectral_norm": spectral_norm(&z),
        "rank": class.rank,
        "regular": class.regular,
        "super_regular": class.super_regular,
        "lambdas": dec.lambdas,
        "tripotents": dec.tripotents,
    });
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(ExitCode::SUCCESS)
}

fn run() -> anyhow::Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify(args) => verify(&args),
        Command::Show {
            what: ShowCommand::Spectral { input },
        } => show_spectral(&input),
        Command::Suites => {
            for s in Suite::ALL {
                println!("{:<10} {}", s.name(), s.description());
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_CHECK_FAILURE)
        }
    }
}
