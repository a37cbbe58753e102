mod commands;
mod contour;
mod input;
mod portrait;

use clap::{Args, Parser, Subcommand, ValueEnum};
use input::UsageError;
use std::path::PathBuf;
use std::process::ExitCode;

/// Potentials, equilibria and crossing limit cycles of planar holomorphic
/// and anti-holomorphic polynomial systems.
///
/// Complex numbers are written `re,im`. Polynomials are ascending
/// coefficient lists whose entries are reals or `(re,im)`, e.g. `1,0,(0,1)`
/// for 1 + i z^2.
#[derive(Parser)]
#[command(name = "holoflow", version)]
struct Cli {
    /// Root and resultant tolerance for `cycles`, integrator tolerance for
    /// `flowstats invariants`.
    #[arg(long, global = true, env = "HOLOFLOW_TOL", default_value_t = 1e-12)]
    tol: f64,

    #[command(subcommand)]
    command: Command,
}

/// A single system, holomorphic `z' = p(z)` or anti-holomorphic `z' = conj(p(z))`.
#[derive(Args)]
#[group(required = true, multiple = false)]
struct SystemArgs {
    /// Coefficients of p for z' = p(z).
    #[arg(long, allow_hyphen_values = true)]
    holo: Option<String>,
    /// Coefficients of p for z' = conj(p(z)).
    #[arg(long, allow_hyphen_values = true)]
    antiholo: Option<String>,
}

#[derive(Args)]
struct OutArgs {
    /// Write the JSON report here instead of stdout.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Complex potential of a system; optionally sampled (phi, psi) on a grid.
    Potential {
        #[command(flatten)]
        system: SystemArgs,
        /// CSV file for the sampled grid (columns x, y, phi, psi).
        #[arg(long)]
        grid: Option<PathBuf>,
        /// Sampling window x_min,x_max,y_min,y_max.
        #[arg(long, allow_hyphen_values = true, default_value = "-2,2,-2,2")]
        window: String,
        #[arg(long, default_value_t = 41)]
        nx: usize,
        #[arg(long, default_value_t = 41)]
        ny: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Equilibria and canonical regions of z' = z^3 + A1 z + A0.
    ClassifyCubic {
        #[arg(long, allow_hyphen_values = true)]
        a1: String,
        #[arg(long, allow_hyphen_values = true)]
        a0: String,
        /// Half-width of the band treated as zero when typing eigenvalues.
        #[arg(long, default_value_t = holoflow::classify::DEFAULT_EPS)]
        eps: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Portrait of the Bernoulli system z' = z^n - alpha z.
    Bernoulli {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, default_value_t = holoflow::classify::DEFAULT_EPS)]
        eps: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Crossing limit cycles of a piecewise system switching on Im z = 0.
    Cycles(CyclesArgs),
    /// Contour integrals, closed-form complex-time flows and their invariants.
    Flowstats {
        #[command(subcommand)]
        what: FlowstatsCommand,
    },
    /// Stream-line portrait as SVG (and CSV) by contouring psi on a grid.
    Portrait(PortraitArgs),
    /// Re-integrate every candidate of a cycle report; exits 1 on any mismatch.
    Verify {
        report: PathBuf,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Antiholo,
    MixedLinear,
    MixedGeneral,
}

#[derive(Args)]
struct CyclesArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Upper polynomial (antiholo family).
    #[arg(long, allow_hyphen_values = true, required_if_eq("family", "antiholo"))]
    upper: Option<String>,
    /// Lower polynomial (antiholo family).
    #[arg(long, allow_hyphen_values = true, required_if_eq("family", "antiholo"))]
    lower: Option<String>,
    /// Mixed family: upper field conj((a1 + i a2) z + b1 + i b2) ...
    #[arg(long, allow_negative_numbers = true)]
    a1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    a2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    b1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    b2: Option<f64>,
    /// ... and lower field (a + i b)(z - x0 - i y0).
    #[arg(long, allow_negative_numbers = true)]
    a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    b: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    x0: Option<f64>,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    y0: f64,
    /// Skip the numerical confirmation of candidates.
    #[arg(long)]
    no_validate: bool,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum FlowForm {
    Constant,
    Linear,
    Quadratic,
    Reciprocal,
    Bernoulli,
}

#[derive(Subcommand)]
enum FlowstatsCommand {
    /// Circulation and net flow around a closed curve.
    Contour {
        #[command(flatten)]
        system: SystemArgs,
        /// Circle cx,cy,r.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "polygon")]
        circle: Option<String>,
        /// Polygon vertices x,y;x,y;...
        #[arg(long, allow_hyphen_values = true)]
        polygon: Option<String>,
        /// Traverse the circle clockwise.
        #[arg(long)]
        clockwise: bool,
        #[arg(long, default_value_t = holoflow::flowstats::DEFAULT_NODES)]
        nodes: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Value at complex time T of a closed-form flow.
    Flow {
        #[arg(long, value_enum)]
        form: FlowForm,
        #[arg(long, allow_hyphen_values = true)]
        z0: String,
        #[arg(long, allow_hyphen_values = true)]
        time: String,
        /// Bernoulli exponent.
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<String>,
        #[arg(long, allow_hyphen_values = true, default_value = "1,0")]
        beta: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Drift of Im Phi along real time and of Re Phi along imaginary time.
    Invariants {
        /// Coefficients of p for z' = p(z).
        #[arg(long, allow_hyphen_values = true)]
        holo: String,
        #[arg(long, allow_hyphen_values = true)]
        z0: String,
        #[arg(long, default_value_t = 1.0)]
        duration: f64,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args)]
struct PortraitArgs {
    #[arg(long, allow_hyphen_values = true)]
    holo: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    antiholo: Option<String>,
    /// Upper polynomial of a piecewise system (anti-holomorphic unless --upper-holo).
    #[arg(long, allow_hyphen_values = true, requires = "lower", conflicts_with_all = ["holo", "antiholo"])]
    upper: Option<String>,
    /// Lower polynomial of a piecewise system (anti-holomorphic unless --lower-holo).
    #[arg(long, allow_hyphen_values = true, requires = "upper")]
    lower: Option<String>,
    #[arg(long)]
    upper_holo: bool,
    #[arg(long)]
    lower_holo: bool,
    /// Window x_min,x_max,y_min,y_max.
    #[arg(long, allow_hyphen_values = true, default_value = "-2,2,-2,2")]
    window: String,
    #[arg(long, default_value_t = 201)]
    nx: usize,
    #[arg(long, default_value_t = 201)]
    ny: usize,
    /// Number of evenly spaced levels between the grid extremes.
    #[arg(long, default_value_t = 24)]
    levels: usize,
    /// Explicit levels, comma separated; overrides --levels.
    #[arg(long, allow_hyphen_values = true)]
    level: Option<String>,
    /// Also draw equipotentials.
    #[arg(long)]
    phi: bool,
    #[arg(long)]
    svg: PathBuf,
    /// Polyline vertices as CSV (field, level, line, x, y).
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
