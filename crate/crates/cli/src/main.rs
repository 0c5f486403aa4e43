//! Command-line front end: divergence computation, mechanism evaluation,
//! privacy certification, attack crafting, robustness estimation, and the
//! finite-instance equivalence sweep.
//!
//! Exit codes: 0 success/holds, 1 usage error, 2 input error, 3 property
//! violated, 4 inconclusive.

use clap::{Parser, Subcommand};
use std::process::ExitCode;

mod cmds;
mod errors;
mod io;

use errors::EXIT_USAGE;

#[derive(Parser)]
#[command(
    name = "renyicert",
    version,
    about = "Renyi divergences, privacy certificates, and robustness reports for probabilistic mappings"
)]
struct Cli {
    /// Cap worker threads for data-parallel loops (default: all cores).
    /// Results are identical for any thread count.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Write the output to this path instead of stdout.
    #[arg(long, global = true)]
    output: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Divergence between two measures.
    Divergence(cmds::DivergenceArgs),
    /// Evaluate a probabilistic mapping at one input.
    Apply(cmds::ApplyArgs),
    /// Certify (lambda, epsilon, alpha) Renyi privacy.
    #[command(name = "certify-rdp")]
    CertifyRdp(cmds::CertifyRdpArgs),
    /// Certify classical differential privacy of a tabular mechanism.
    #[command(name = "certify-dp")]
    CertifyDp(cmds::CertifyDpArgs),
    /// Craft a minimal label-changing perturbation.
    Attack(cmds::AttackArgs),
    /// Prediction-change risk / generalized robustness report.
    Robustness(cmds::RobustnessArgs),
    /// Check the robustness/privacy equivalence on finite instances.
    Equivalence(cmds::EquivalenceArgs),
    /// Collate robustness report JSONs into one CSV table.
    #[command(name = "sweep-report")]
    SweepReport(cmds::SweepReportArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    ExitCode::SUCCESS
                }
                _ => {
                    eprint!("{e}");
                    ExitCode::from(EXIT_USAGE)
                }
            };
        }
    };

    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("usage error: --threads must be >= 1");
            return ExitCode::from(EXIT_USAGE);
        }
        // Ignore the error if a pool already exists (tests share a process).
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }

    let out = match cli.command {
        Command::Divergence(a) => cmds::divergence(a, cli.output),
        Command::Apply(a) => cmds::apply(a, cli.output),
        Command::CertifyRdp(a) => cmds::certify_rdp(a, cli.output),
        Command::CertifyDp(a) => cmds::certify_dp(a, cli.output),
        Command::Attack(a) => cmds::attack(a, cli.output),
        Command::Robustness(a) => cmds::robustness(a, cli.output),
        Command::Equivalence(a) => cmds::equivalence(a, cli.output),
        Command::SweepReport(a) => cmds::sweep_report(a, cli.output),
    };

    match out {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
