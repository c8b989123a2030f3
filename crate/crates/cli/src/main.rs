//! `waring`: batch front end for the enumerations and verifications.

mod commands;
mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::{Format, Report};

/// Exit statuses.
pub const EXIT_OK: u8 = 0;
pub const EXIT_MISMATCH: u8 = 1;
pub const EXIT_PARTIAL: u8 = 2;
pub const EXIT_USAGE: u8 = 64;
pub const EXIT_INTERNAL: u8 = 70;

#[derive(Parser, Debug)]
#[command(name = "waring", version, about = "Waring subspaces of Veronese varieties and quadrics over finite fields")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Field order q.
    #[arg(long, global = true)]
    pub field: Option<u32>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// Wall-clock allowance for the searches.
    #[arg(long, global = true)]
    pub budget_seconds: Option<f64>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<std::path::PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Seed for the sampled modes.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Waring polynomials W, WI and IW of a variety.
    Polynomials(PolynomialsArgs),
    /// Checks a published claim and reports certificates.
    Verify(VerifyArgs),
    /// Admissible points of the cubic curve for every ω over a range of q.
    BstarScan(BstarArgs),
    /// Orbits of codimension-two identifiable Waring subspaces of P^9.
    Eta7(Eta7Args),
    /// Orbits of identifiable Waring hyperplanes of P^9.
    Eta8,
    /// Classifies a pencil of quadrics, or lists the named pencils.
    PencilClassify(PencilArgs),
    /// Weight distribution of the functional code of a quadric.
    CodeWeights(CodeArgs),
    /// X-rank and identifiability of a subspace.
    Rank(RankArgs),
    /// Samples intersections of pairs of quadratic cones.
    Cones(ConesArgs),
}

#[derive(Args, Debug)]
pub struct PolynomialsArgs {
    /// V<n>,2, conic, rnc<d>, elliptic or hyperbolic.
    #[arg(long)]
    pub variety: String,
    /// Comma-separated projective dimensions.
    #[arg(long, value_delimiter = ',')]
    pub dims: Option<Vec<usize>>,
    #[arg(long, value_enum, default_value_t = PolicyArg::Lifted)]
    pub policy: PolicyArg,
    /// Largest number of subspaces scanned for μ.
    #[arg(long, default_value_t = 100_000)]
    pub mu_limit: u128,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum PolicyArg {
    Lifted,
    FullStabilizer,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Claim {
    #[value(name = "T3.1")]
    T31,
    #[value(name = "T5.1")]
    T51,
    #[value(name = "T5.3")]
    T53,
    #[value(name = "T5.4")]
    T54,
    #[value(name = "T5.7")]
    T57,
    #[value(name = "P5.5")]
    P55,
    #[value(name = "T5.9")]
    T59,
    #[value(name = "T5.11")]
    T511,
    #[value(name = "P7.1")]
    P71,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub claim: Claim,
    /// Parameter ω; every valid ω when absent.
    #[arg(long)]
    pub omega: Option<u32>,
    /// Projective dimension of the frame construction.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Adds the extra point to the seven-point construction.
    #[arg(long)]
    pub extra: bool,
    /// Rational normal curve degree parameter t.
    #[arg(long)]
    pub t: Option<usize>,
    /// Segre arc parameters h,e.
    #[arg(long, value_delimiter = ',')]
    pub segre: Option<Vec<u32>>,
    /// Cross-checks constructions by scanning every combination of the generators.
    #[arg(long)]
    pub alpha_scan: bool,
}

#[derive(Args, Debug)]
pub struct BstarArgs {
    #[arg(long, default_value_t = 4)]
    pub from: u32,
    #[arg(long, default_value_t = 25)]
    pub to: u32,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum Eta7ModeArg {
    Exhaustive,
    Pencil,
}

#[derive(Args, Debug)]
pub struct Eta7Args {
    /// Exhaustive for q ≤ 3 and the pencil lower bound otherwise when absent.
    #[arg(long, value_enum)]
    pub mode: Option<Eta7ModeArg>,
}

#[derive(Args, Debug)]
pub struct PencilArgs {
    /// First form, as ten element codes or a sum such as X0X2+2X1^2.
    #[arg(long, requires = "g", allow_hyphen_values = true)]
    pub f: Option<String>,
    #[arg(long, requires = "f", allow_hyphen_values = true)]
    pub g: Option<String>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum MethodArg {
    Geometric,
    Generator,
}

#[derive(Args, Debug)]
pub struct CodeArgs {
    /// hyperbolic, elliptic, cone, plane-pair, conjugate-plane-pair or repeated-plane.
    #[arg(long, conflicts_with = "form")]
    pub quadric: Option<String>,
    /// An explicit quadratic form.
    #[arg(long, allow_hyphen_values = true)]
    pub form: Option<String>,
    #[arg(long, value_enum, default_value_t = MethodArg::Geometric)]
    pub method: MethodArg,
}

#[derive(Args, Debug)]
pub struct RankArgs {
    #[arg(long)]
    pub variety: String,
    /// A subspace as JSON {"n","q","basis"} or a path to such a file.
    #[arg(long)]
    pub subspace: String,
}

#[derive(Args, Debug)]
pub struct ConesArgs {
    #[arg(long, default_value_t = 10_000)]
    pub pairs: usize,
    /// Also counts every pair point by point.
    #[arg(long)]
    pub brute: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if cli.global.threads == 0 || cli.global.budget_seconds.is_some_and(|s| s.is_nan() || s <= 0.0) {
        eprintln!("error: --threads and --budget-seconds must be positive");
        return ExitCode::from(EXIT_USAGE);
    }
    match commands::run(&cli) {
        Ok(report) => match output::emit(&cli.global, &report) {
            Ok(()) => ExitCode::from(report.exit),
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_USAGE)
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}

impl Report {
    pub fn ok(json: serde_json::Value, table: output::Table) -> Report {
        Report { json, table, exit: EXIT_OK }
    }
}
