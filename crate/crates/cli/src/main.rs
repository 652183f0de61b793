use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod error;
mod table;

use commands::{Context, Figure, FIGURE_HELP};
use config::RunConfig;
use error::CliError;

/// Heralded single-photon source and photonic-crystal band calculations,
/// written as CSV.
#[derive(Debug, Parser)]
#[command(name = "herald-sim", version, after_help = FIGURE_HELP)]
struct Cli {
    /// Flat JSON file of parameter keys; flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// P(1,1) over r (and optionally alpha)
    HeraldProb(RunConfig),
    /// g2(0) of the heralded photon; perfect herald when eta = 1
    HeraldG2(RunConfig),
    /// P_click(n) with the click-detector herald over r and eta
    Click(RunConfig),
    /// Band frequencies and group velocities over Λk
    Bands(RunConfig),
    /// Group velocity of one band over Λk
    Vg(RunConfig),
    /// Layer energy split of a Bloch mode
    EnergyRatio(RunConfig),
    /// Pump-to-squeezing calibration chain and slow-light window
    Calibrate(RunConfig),
    /// Data behind one figure (see the recipes below)
    ReproduceFigure {
        figure: Figure,
        #[command(flatten)]
        params: RunConfig,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::HeraldProb(_) => "herald-prob",
            Command::HeraldG2(_) => "herald-g2",
            Command::Click(_) => "click",
            Command::Bands(_) => "bands",
            Command::Vg(_) => "vg",
            Command::EnergyRatio(_) => "energy-ratio",
            Command::Calibrate(_) => "calibrate",
            Command::ReproduceFigure { .. } => "reproduce-figure",
        }
    }

    fn params(&self) -> &RunConfig {
        match self {
            Command::HeraldProb(p)
            | Command::HeraldG2(p)
            | Command::Click(p)
            | Command::Bands(p)
            | Command::Vg(p)
            | Command::EnergyRatio(p)
            | Command::Calibrate(p)
            | Command::ReproduceFigure { params: p, .. } => p,
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("HERALD_SIM_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("HERALD_SIM_THREADS must be a nonnegative integer, got `{raw}`")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot size thread pool: {e}")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let name = cli.command.name();
    let file = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    let mut cfg = file.overlay(cli.command.params());
    if let Some(c) = &cfg.command {
        if c != name {
            return Err(CliError::Config(format!("config file is for `{c}` but `{name}` was requested")));
        }
    }
    cfg.command = None;

    let figure = match &cli.command {
        Command::ReproduceFigure { figure, .. } => {
            if let Some(f) = &cfg.figure {
                if f != figure.id() {
                    return Err(CliError::Config(format!("config file is for figure {f} but {} was requested", figure.id())));
                }
            }
            cfg.figure = Some(figure.id().to_string());
            Some(*figure)
        }
        _ => None,
    };

    let output = cfg.output.clone();
    let ctx = Context::new(cfg)?;
    let table = match &cli.command {
        Command::HeraldProb(_) => commands::herald_prob(&ctx),
        Command::HeraldG2(_) => commands::herald_g2(&ctx),
        Command::Click(_) => commands::click(&ctx),
        Command::Bands(_) => commands::bands(&ctx),
        Command::Vg(_) => commands::vg(&ctx),
        Command::EnergyRatio(_) => commands::energy_ratio_cmd(&ctx),
        Command::Calibrate(_) => commands::calibrate_cmd(&ctx),
        Command::ReproduceFigure { .. } => commands::reproduce(&ctx, figure.expect("figure command")),
    }?;

    let metadata = vec![
        format!("herald-sim {}", env!("CARGO_PKG_VERSION")),
        match figure {
            Some(f) => format!("command: {name} {}", f.id()),
            None => format!("command: {name}"),
        },
        format!("params: {}", ctx.cfg.metadata()),
    ];
    let text = table.render(&metadata);
    match output {
        Some(path) => table::write_atomic(&path, &text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| CliError::Io(format!("stdout: {e}")))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let line = serde_json::json!({ "error": e.kind(), "exit": e.exit_code(), "message": e.to_string() });
            eprintln!("{line}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
