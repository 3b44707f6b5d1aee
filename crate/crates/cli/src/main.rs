mod commands;
mod config;
mod io;
mod reproduce;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::Flags;

#[derive(Parser)]
#[command(name = "nonclass", version, about = "Nonclassicality witnesses from nonnegative-polynomial certificates")]
struct Cli {
    /// TOML file with defaults for the flags below; flags given on the command line win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    flags: Flags,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Search for a nonnegativity certificate of a witness polynomial.
    Certify { poly: PathBuf },
    /// Optimize a witness for a state or moment table.
    Detect { input: PathBuf },
    /// Re-check a certificate without a solver.
    Verify {
        certificate: PathBuf,
        /// Polynomial file; defaults to the `witness` stored next to the certificate.
        poly: Option<PathBuf>,
    },
    /// Find a state that no degree-D̃ SOS witness detects but the given witness does.
    Hidden {
        poly: PathBuf,
        #[arg(long, default_value_t = 10)]
        n_max: usize,
        #[arg(long, default_value_t = 6)]
        d_tilde: usize,
    },
    /// Map a spin observable to its stereographic polynomial and light witness.
    Map { observable: PathBuf },
    /// Write the data behind a figure as CSV (x,value,method,level).
    Reproduce {
        #[arg(value_parser = ["fig2", "fig3b", "robinson-choi-lam"])]
        figure: String,
    },
    /// Named polynomials, observables and states.
    Catalog {
        #[command(subcommand)]
        action: CatalogCmd,
    },
    /// Random mixed Fock (or Dicke, with --spin) state.
    Sample {
        #[arg(long, default_value_t = 4)]
        n_max: usize,
        /// Number of qubits; produces a Dicke state instead of a Fock state.
        #[arg(long)]
        spin: Option<usize>,
    },
}

#[derive(Subcommand)]
enum CatalogCmd {
    List,
    Dump { name: String },
}

/// Exit codes: 0 detected / certified, 1 not, 2 error.
pub enum Verdict {
    Yes,
    No,
}

fn run(cli: Cli) -> anyhow::Result<Verdict> {
    let flags = match &cli.config {
        Some(path) => cli.flags.over(config::load(path)?),
        None => cli.flags,
    };
    match cli.cmd {
        Cmd::Certify { poly } => commands::certify(&poly, &flags),
        Cmd::Detect { input } => commands::detect(&input, &flags),
        Cmd::Verify { certificate, poly } => commands::verify(&certificate, poly.as_deref(), &flags),
        Cmd::Hidden { poly, n_max, d_tilde } => commands::hidden(&poly, n_max, d_tilde, &flags),
        Cmd::Map { observable } => commands::map(&observable, &flags),
        Cmd::Reproduce { figure } => reproduce::run(&figure, &flags),
        Cmd::Catalog { action } => match action {
            CatalogCmd::List => commands::catalog_list(&flags),
            CatalogCmd::Dump { name } => commands::catalog_dump(&name, &flags),
        },
        Cmd::Sample { n_max, spin } => commands::sample(n_max, spin, &flags),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Verdict::Yes) => ExitCode::SUCCESS,
        Ok(Verdict::No) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
