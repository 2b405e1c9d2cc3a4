//! `uncertainty-lab` command-line tool.
//!
//! Exit codes: 0 when every evaluated relation holds, 2 when one is
//! violated, 1 on usage, I/O or numerical errors.

mod commands;
mod spec;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::spec::parse_number;

pub const DIM_ENV: &str = "UNCERTAINTY_LAB_DIM";

#[derive(Parser, Debug)]
#[command(
    name = "uncertainty-lab",
    version,
    about = "Check and explore uncertainty relations on truncated Fock spaces"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct GlobalOpts {
    /// Truncation dimension (overrides spec files and UNCERTAINTY_LAB_DIM)
    #[arg(long, global = true)]
    pub dim: Option<usize>,
    #[arg(long, global = true, value_parser = number)]
    pub hbar: Option<f64>,
    #[arg(long, global = true, value_parser = number)]
    pub mass: Option<f64>,
    #[arg(long, global = true, value_parser = number)]
    pub omega: Option<f64>,
    /// Relative tolerance for calling a relation saturated
    #[arg(long = "tol-sat", global = true, value_parser = number)]
    pub tol_sat: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate uncertainty relations for the state in a spec file
    Check {
        spec: PathBuf,
        /// Comma-separated subset of heisenberg, schrodinger, characteristic,
        /// sum, canonical-sum, trace-class
        #[arg(long, value_delimiter = ',')]
        relations: Vec<String>,
        /// Observables for the characteristic relations (q, p, n)
        #[arg(long, value_delimiter = ',', default_value = "q,p")]
        observables: Vec<String>,
        /// Orders k for the trace-class relation
        #[arg(long = "k", value_delimiter = ',', default_value = "1,2")]
        orders: Vec<usize>,
    },
    /// Evaluate the two-state relation for a pair of spec files
    TwoState { psi: PathBuf, phi: PathBuf },
    /// Evolve a pure state under the degenerate parametric amplifier
    Evolve {
        spec: PathBuf,
        #[arg(long, default_value = "0.2", value_parser = number)]
        chi: f64,
        #[arg(long = "pump-phase", default_value = "0", value_parser = number)]
        pump_phase: f64,
        #[arg(long = "t-max", default_value = "2", value_parser = number)]
        t_max: f64,
        #[arg(long, default_value_t = 200)]
        steps: usize,
        /// Trajectory CSV output path
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate a relation gap over a grid of squeezed states
    Scan {
        /// schrodinger, heisenberg or sum
        #[arg(long, default_value = "schrodinger")]
        objective: String,
        #[arg(long = "alpha-re", default_value = "0", value_parser = number)]
        alpha_re: f64,
        #[arg(long = "alpha-im", default_value = "0", value_parser = number)]
        alpha_im: f64,
        #[arg(long = "r-min", default_value = "0", value_parser = number)]
        r_min: f64,
        #[arg(long = "r-max", default_value = "1", value_parser = number)]
        r_max: f64,
        #[arg(long = "r-steps", default_value_t = 5)]
        r_steps: usize,
        #[arg(long = "theta-min", default_value = "0", value_parser = number)]
        theta_min: f64,
        #[arg(long = "theta-max", default_value = "pi", value_parser = number)]
        theta_max: f64,
        #[arg(long = "theta-steps", default_value_t = 5)]
        theta_steps: usize,
        /// CSV output path; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the minimum-uncertainty class of the state in a spec file
    Classify { spec: PathBuf },
    /// Symplectic eigenvalues and diagonalizing matrix of a covariance CSV
    Williamson { csv: PathBuf },
}

fn number(text: &str) -> Result<f64, String> {
    parse_number(text).ok_or_else(|| format!("{text:?} is not a finite number"))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let g = cli.global;
    let result = match cli.command {
        Command::Check {
            spec,
            relations,
            observables,
            orders,
        } => commands::check(&g, &spec, &relations, &observables, &orders),
        Command::TwoState { psi, phi } => commands::two_state(&g, &psi, &phi),
        Command::Evolve {
            spec,
            chi,
            pump_phase,
            t_max,
            steps,
            out,
        } => commands::evolve(&g, &spec, chi, pump_phase, t_max, steps, &out),
        Command::Scan {
            objective,
            alpha_re,
            alpha_im,
            r_min,
            r_max,
            r_steps,
            theta_min,
            theta_max,
            theta_steps,
            out,
        } => commands::scan(
            &g,
            &commands::ScanArgs {
                objective,
                alpha_re,
                alpha_im,
                r: (r_min, r_max, r_steps),
                theta: (theta_min, theta_max, theta_steps),
                out,
            },
        ),
        Command::Classify { spec } => commands::classify(&g, &spec),
        Command::Williamson { csv } => commands::williamson(&g, &csv),
    };
    match result {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            ExitCode::from(outcome.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
