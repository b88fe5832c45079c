mod classical;
mod design_cmd;
mod output;
mod quantum_cmd;
mod reproduce;
mod settings;
mod thermal;

use clap::{Parser, Subcommand};
use output::Format;
use std::path::PathBuf;
use std::process::ExitCode;

/// Classical and quantum dynamics of a charged rotor in a magnetic field.
#[derive(Debug, Parser)]
#[command(name = "tcrystal", version)]
struct Cli {
    /// JSON config: model keys plus an optional `run` block
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// output file (stdout if absent)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// table format
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// worker threads for sweeps (default: all cores)
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Inertia and charge tensors of the config's body
    Tensors,
    /// Integrate the three-angle model
    SimulateFull(classical::SimFullArgs),
    /// Integrate the reduced two-degree-of-freedom model
    SimulateReduced(classical::SimReducedArgs),
    /// Effective potential V(x) at fixed angular momentum
    Potential(classical::PotentialArgs),
    /// Numeric and closed-form spectrum per (l, parity)
    Spectrum(quantum_cmd::SpectrumArgs),
    /// Ground state against magnetic flux
    FluxScan(quantum_cmd::FluxArgs),
    /// Bohr-Sommerfeld levels
    Semiclassical(quantum_cmd::SemiclassicalArgs),
    /// Thermal statistics against temperature
    Thermal(thermal::ThermalArgs),
    /// Phase labels on a (T, q) grid
    PhaseDiagram(thermal::PhaseArgs),
    /// Hollow-shell particle design report
    Design(design_cmd::DesignArgs),
    /// Run the self-check suites
    Verify(VerifyArgs),
    /// Regenerate the data behind a figure
    Reproduce(reproduce::ReproduceArgs),
}

#[derive(Debug, clap::Args)]
struct VerifyArgs {
    /// suite name or `all`
    #[arg(long, default_value = "all")]
    suite: String,
}

/// Exit code 2 for configuration problems, 1 for everything else.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Numeric(String),
    Runtime(String),
}

impl From<tcrystal_core::Error> for Failure {
    fn from(e: tcrystal_core::Error) -> Self {
        use tcrystal_core::Error as E;
        match e {
            E::Config(_) | E::InvalidParameter { .. } | E::ThickShell { .. } | E::DegenerateBody(_) | E::UntrappedTorsion => {
                Failure::Config(e.to_string())
            }
            other => Failure::Numeric(other.to_string()),
        }
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Numeric(_) | Failure::Runtime(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "config error: {m}"),
            Failure::Numeric(m) => write!(f, "numerical failure: {m}"),
            Failure::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

/// Where and how a command writes, plus the parsed config file.
pub struct Ctx {
    pub loaded: settings::Loaded,
    pub out: Option<PathBuf>,
    pub format: Format,
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut loaded = settings::load(cli.config.as_deref())?;
    let globals = settings::take_globals(&mut loaded.run)?;
    let ctx = Ctx {
        out: cli.out.or(globals.out),
        format: cli.format.or(globals.format).unwrap_or(Format::Csv),
        loaded,
    };
    let workers = cli.workers.or(globals.workers);
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        if n == 0 {
            return Err(Failure::Config("workers must be >= 1".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| Failure::Runtime(e.to_string()))?;
    pool.install(|| match &cli.command {
        Command::Tensors => classical::tensors(&ctx),
        Command::SimulateFull(a) => classical::simulate_full(&ctx, a),
        Command::SimulateReduced(a) => classical::simulate_reduced(&ctx, a),
        Command::Potential(a) => classical::potential(&ctx, a),
        Command::Spectrum(a) => quantum_cmd::spectrum(&ctx, a),
        Command::FluxScan(a) => quantum_cmd::flux_scan(&ctx, a),
        Command::Semiclassical(a) => quantum_cmd::semiclassical(&ctx, a),
        Command::Thermal(a) => thermal::thermal(&ctx, a),
        Command::PhaseDiagram(a) => thermal::phase_diagram(&ctx, a),
        Command::Design(a) => design_cmd::design(&ctx, a),
        Command::Verify(a) => verify(&ctx, a),
        Command::Reproduce(a) => reproduce::reproduce(&ctx, a),
    })
}

fn verify(ctx: &Ctx, args: &VerifyArgs) -> Result<(), Failure> {
    use tcrystal_core::verify::{run_suite, Suite};
    let suites: Vec<Suite> = if args.suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![Suite::parse(&args.suite).ok_or_else(|| {
            let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
            Failure::Config(format!("unknown suite `{}` (expected all, {})", args.suite, names.join(", ")))
        })?]
    };
    let mut table = output::Table::new(vec![
        ("suite", "module under test"),
        ("check", "property checked"),
        ("passed", "1 if observed <= threshold"),
        ("observed", "measured discrepancy"),
        ("threshold", "allowed discrepancy"),
        ("detail", "context"),
    ]);
    let mut failures = 0;
    for suite in suites {
        for c in run_suite(suite) {
            eprintln!(
                "{:<8} {:<4} {:<52} {:.3e} <= {:.1e} {}",
                suite.name(),
                if c.passed { "ok" } else { "FAIL" },
                c.name,
                c.observed,
                c.threshold,
                c.detail
            );
            failures += usize::from(!c.passed);
            table.push(vec![
                suite.name().into(),
                output::Cell::S(c.name.replace(',', ";")),
                c.passed.into(),
                c.observed.into(),
                c.threshold.into(),
                output::Cell::S(c.detail.replace(',', ";")),
            ]);
        }
    }
    if ctx.out.is_some() {
        let meta = output::Meta::new("verify", serde_json::json!({ "suite": args.suite }));
        output::write_table(&meta, &table, ctx.out.as_deref(), ctx.format)?;
    }
    if failures > 0 {
        return Err(Failure::Numeric(format!("{failures} check(s) failed")));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tcrystal: {e}");
            ExitCode::from(e.code())
        }
    }
}
