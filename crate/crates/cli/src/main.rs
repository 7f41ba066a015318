use std::path::PathBuf;
use std::process::ExitCode;

use alr_cli::commands::{self, Fault};
use alr_cli::output::output_dir;
use alr_cli::scenario::AnnulusMedium;
use alr_cli::{configure_threads, CliError, Scenario};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "alr", version, about = "Anomalous localized resonance experiments")]
struct Cli {
    /// Output directory (default: the scenario's output_dir, else ./out)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve over the delta grid and classify the power
    Sweep { scenario: PathBuf },
    /// Bisect rho_range for the blow-up threshold
    CriticalRadius { scenario: PathBuf },
    /// Far-field convergence to the effective-medium solution
    Converge { scenario: PathBuf },
    /// Build and verify the doubly complementary medium for an annulus profile
    DesignCloak {
        medium: PathBuf,
        #[arg(long)]
        r2: f64,
        #[arg(long)]
        r3: f64,
    },
    /// Run the invariant suites
    Selftest {
        #[arg(long)]
        full: bool,
        #[arg(long, hide = true, value_enum)]
        inject_fault: Option<FaultArg>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    HatTable,
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let mut log = std::io::stdout();
    let flag = cli.out.as_deref();
    match cli.command {
        Command::Sweep { scenario } => {
            let s = Scenario::load(&scenario)?;
            commands::sweep(&s, &output_dir(flag, s.output_dir.as_deref()), &mut log)
        }
        Command::CriticalRadius { scenario } => {
            let s = Scenario::load(&scenario)?;
            commands::critical_radius(&s, &output_dir(flag, s.output_dir.as_deref()), &mut log)
        }
        Command::Converge { scenario } => {
            let s = Scenario::load(&scenario)?;
            commands::converge(&s, &output_dir(flag, s.output_dir.as_deref()), &mut log)
        }
        Command::DesignCloak { medium, r2, r3 } => {
            let m = AnnulusMedium::load(&medium)?;
            commands::design_cloak(&m, r2, r3, &output_dir(flag, None), &mut log)
        }
        Command::Selftest { full, inject_fault } => {
            let fault = inject_fault.map(|FaultArg::HatTable| Fault::HatTable);
            commands::selftest(full, fault, &mut log).map(|_| ())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("alr: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
