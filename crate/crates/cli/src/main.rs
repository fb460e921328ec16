mod commands;
mod emit;
mod grid;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

const GRID_HELP: &str = "Grids accept `start:stop:log10` (start, 10·start, … up to stop), \
`start:stop:linN` (N evenly spaced points), a comma list, or a single value.";

#[derive(Parser, Debug)]
#[command(name = "oppenheim", version, about = "Kloosterman sums, Diophantine majorants, theta sums and counting experiments", after_help = GRID_HELP)]
pub struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// CSV output file; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Manifest path; defaults to `<out>.manifest.json` when --out is given.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Congruence Kloosterman sums S(m,n;c;R,N) for every class R mod N.
    Kloosterman(KloostermanArgs),
    /// Certified majorant δ or δ̃ over a T grid.
    Delta(DeltaArgs),
    /// Diophantine quality of a vector by exhaustive search.
    Dioph(DiophArgs),
    /// Continued-fraction sum against its bound over a T grid.
    CfSum(CfSumArgs),
    /// Orbit classes and canonical B representatives on a box of integer vectors.
    Orbit(OrbitArgs),
    /// Both sides of the theta/lattice identity over a T grid.
    ThetaId(ThetaIdArgs),
    /// Horocycle integral against its main and second terms over a v grid.
    Equidist(EquidistArgs),
    /// Window counts N(a,b,T) of the inhomogeneous form.
    Count(CountArgs),
    /// Pair correlation R₂[a,b](Λ) of the shifted norm spectrum.
    Paircorr(PaircorrArgs),
    /// The shifted norm spectrum below Λ.
    Spectrum(SpectrumArgs),
    /// Largest Weil-type ratio of Kloosterman sums.
    WeilAudit(WeilAuditArgs),
    /// The sum B_α(X) and its majorant over an X grid.
    BAlpha(BAlphaArgs),
    /// Re-run the command recorded in a manifest.
    Replay {
        /// Manifest written by an earlier run.
        path: PathBuf,
    },
}

#[derive(Args, Debug)]
pub struct KloostermanArgs {
    #[arg(long)]
    pub c_max: u64,
    #[arg(long = "N", default_value_t = 1)]
    pub modulus: u64,
    /// Inclusive range for m and n.
    #[arg(long, default_value = "-3:3", allow_hyphen_values = true)]
    pub mn_range: String,
    /// Also check multiplicativity over every coprime split of cN and the n = 0 closed form.
    #[arg(long)]
    pub verify_mult: bool,
}

#[derive(Args, Debug)]
pub struct DeltaArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub beta: f64,
    /// Comma-separated components of ξ.
    #[arg(long, allow_hyphen_values = true)]
    pub xi: String,
    #[arg(long = "T")]
    pub t: String,
    #[arg(long, value_enum, default_value_t = Variant::Tilde)]
    pub variant: Variant,
    #[arg(long, default_value_t = 1e-5)]
    pub tol: f64,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
pub enum Variant {
    Full,
    Tilde,
}

#[derive(Args, Debug)]
pub struct DiophArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub xi: String,
    #[arg(long)]
    pub kappa: f64,
    #[arg(long, value_enum, default_value_t = Mode::Dioph)]
    pub mode: Mode,
    /// Exponent of j for the alpha-lfd mode.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = 100)]
    pub bound: u64,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
pub enum Mode {
    Dioph,
    Lfd,
    AlphaLfd,
}

#[derive(Args, Debug)]
pub struct CfSumArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub eta: f64,
    #[arg(long = "T")]
    pub t: String,
    #[arg(long)]
    pub kappa: f64,
    #[arg(long)]
    pub c: f64,
}

#[derive(Args, Debug)]
pub struct OrbitArgs {
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Entries range over [-bound, bound].
    #[arg(long, default_value_t = 1)]
    pub bound: i64,
}

#[derive(Args, Debug, Clone)]
pub struct Profiles {
    /// Width of the Gaussian f.
    #[arg(long, default_value_t = 1.0)]
    pub wf: f64,
    /// Width of the Gaussian g.
    #[arg(long, default_value_t = 1.0)]
    pub wg: f64,
    #[arg(long, default_value_t = 1.0)]
    pub h_scale: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub h_center: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub beta: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct ThetaIdArgs {
    #[command(flatten)]
    pub p: Profiles,
    #[arg(long = "T")]
    pub t: String,
}

#[derive(Args, Debug)]
pub struct EquidistArgs {
    #[command(flatten)]
    pub p: Profiles,
    #[arg(long)]
    pub v: String,
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
pub enum Method {
    Brute,
    Fenwick,
}

#[derive(Args, Debug)]
pub struct CountArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub b: f64,
    #[arg(long = "T")]
    pub t: String,
    #[arg(long, value_enum, default_value_t = Method::Fenwick)]
    pub method: Method,
}

#[derive(Args, Debug)]
pub struct PaircorrArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub b: f64,
    #[arg(long = "Lambda")]
    pub lambda: String,
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: f64,
    #[arg(long = "Lambda")]
    pub lambda: f64,
}

#[derive(Args, Debug)]
pub struct WeilAuditArgs {
    #[arg(long)]
    pub c_max: u64,
    #[arg(long = "N", default_value_t = 1)]
    pub modulus: u64,
    /// Class representative a,b,c,d (determinant 1).
    #[arg(long = "R", default_value = "1,0,1,1", allow_hyphen_values = true)]
    pub r: String,
    #[arg(long, default_value = "-3:3", allow_hyphen_values = true)]
    pub mn_range: String,
}

#[derive(Args, Debug)]
pub struct BAlphaArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long = "X")]
    pub x: String,
    #[arg(long = "N", default_value_t = 1)]
    pub modulus: u64,
}

/// Exit code of a failed run: 2 for resource budgets, 1 otherwise.
fn failure_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<oppenheim_core::Error>() {
        Some(e) if e.is_budget() => 2,
        _ => 1,
    }
}

fn run(argv: Vec<String>) -> ExitCode {
    let cli = match Cli::try_parse_from(std::iter::once("oppenheim".to_string()).chain(argv.iter().cloned())) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Command::Replay { path } = &cli.command {
        return match emit::RunManifest::read(path) {
            Ok(m) => {
                eprintln!("replaying `{}` from {}", m.command, path.display());
                run(m.argv)
            }
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(1)
            }
        };
    }
    if let Some(n) = cli.threads {
        // a replayed run may find the pool already sized
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("warning: worker pool left unchanged: {e}");
        }
    }
    let start = Instant::now();
    let name = commands::name(&cli.command);
    match commands::execute(&cli.command, cli.out.as_deref()) {
        Ok(()) => {
            let manifest_path = cli
                .manifest
                .clone()
                .or_else(|| cli.out.as_ref().map(|o| PathBuf::from(format!("{}.manifest.json", o.display()))));
            if let Some(mp) = manifest_path {
                let outputs = cli.out.iter().map(|p| p.display().to_string()).collect();
                let m = emit::RunManifest::new(name, &argv, start.elapsed().as_secs_f64(), outputs);
                if let Err(e) = m.write(&mp) {
                    eprintln!("error: {e:#}");
                    return ExitCode::from(1);
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(failure_code(&e))
        }
    }
}

fn main() -> ExitCode {
    run(std::env::args().skip(1).collect())
}
