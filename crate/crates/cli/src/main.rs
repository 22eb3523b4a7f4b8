mod commands;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use output::{Format, Style};

/// Greedy expansions in base β = (1+√5)/2 with digits {0, 2, 3}: exact
/// arithmetic, cylinders, natural extensions and the invariant density.
#[derive(Parser, Debug)]
#[command(name = "betadd", version)]
pub struct Cli {
    /// Output format; defaults to csv for `birkhoff` and json elsewhere.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Bits of precision for decimal and float renderings.
    #[arg(long, global = true, env = "BETADD_PRECISION", default_value_t = 64)]
    precision: u32,

    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Greedy digits and orbit of a point.
    Expand(commands::ExpandArgs),
    /// The fundamental interval of a digit block.
    Cylinder(commands::CylinderArgs),
    /// Cylinders of one rank, all of them or the families D and B.
    Enumerate(commands::EnumerateArgs),
    /// The invariant density or one of its reconstructions.
    Density(commands::DensityArgs),
    /// Trajectories of the natural extension.
    Natext(commands::NatextArgs),
    /// Occupation frequencies of seeded float orbits.
    Birkhoff(commands::BirkhoffArgs),
    /// Run the check suite; exits with 1 if any check fails.
    Verify(commands::VerifyArgs),
    /// Plain-text x/y columns for plotting.
    Plotdata(commands::PlotdataArgs),
}

/// What a command hands back besides its output.
pub enum Outcome {
    Ok,
    /// Output was produced but a check failed.
    Failed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let style = Style {
        precision: cli.precision,
    };
    let format = cli.format.unwrap_or(match cli.command {
        Command::Birkhoff(_) => Format::Csv,
        _ => Format::Json,
    });
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let result = commands::run(&cli.command, style, format, cli.seed, &mut out);
    let _ = out.flush();
    match result {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        // the reader went away, e.g. `betadd ... | head`
        Err(commands::CliError::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => {
            ExitCode::SUCCESS
        }
        Err(e) => {
            let msg = serde_json::json!({
                "error": { "kind": e.kind(), "message": e.to_string() }
            });
            eprintln!("{msg}");
            ExitCode::from(1)
        }
    }
}
