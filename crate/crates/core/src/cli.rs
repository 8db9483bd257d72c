//! Command-line front end. Every command prints a JSON envelope
//! `{tool, version, command, params, report}` (or CSV where supported) and
//! exits with 0 on success, 1 on a bound or invariant violation and 2 on a
//! usage or parameter error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::characters::MultCharSpec;
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::matrix::SensingMatrix;
use crate::matrix_file;
use crate::primes::{density_csv, shifted_prime_density, hits_csv, primes_with_factor_in_range};
use crate::recovery::{run_experiment, Algorithm, AmplitudeModel};
use crate::rip::params::prime_condition_holds;
use crate::rip::{
    budget_from_env, flat_rip_exhaustive, flat_rip_sampled, rip_delta_exhaustive, rip_from_flat, test_property_p,
    validate_params, verify_square_root_bound, AnalysisParams, PropertyMode, SquareRootParams,
};
use crate::suite::run_suite;
use crate::{TOOL_NAME, TOOL_VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "residue-sense", version, about = "Power-residue sensing matrices and their diagnostics")]
pub struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Cap on worker threads.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Also write the output body here (a matrix file for `gen`), with a
    /// `<out>.meta.json` sidecar carrying the timestamp.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    MatrixV1,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a matrix, print its shape and coherence.
    Gen(MatrixArgs),
    /// Run the invariant sweep over all primes up to --p-max.
    Verify(VerifyArgs),
    /// Flat-RIP or RIP constant at sparsity K.
    Rip(RipArgs),
    /// Double character sums against P(alpha, beta) or the square-root bound.
    Doublesum(DoubleSumArgs),
    /// Sparse-recovery experiment.
    Recover(RecoverArgs),
    /// Primes p <= x with a factor of p - 1 in (x^eps1, x^eps2].
    Primes(PrimesArgs),
    /// Check an exponent parameter set.
    Params(ParamsArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Gen(_) => "gen",
            Command::Verify(_) => "verify",
            Command::Rip(_) => "rip",
            Command::Doublesum(_) => "doublesum",
            Command::Recover(_) => "recover",
            Command::Primes(_) => "primes",
            Command::Params(_) => "params",
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MatrixArgs {
    #[arg(long)]
    pub p: u64,
    /// Residue order, a divisor of p - 1.
    #[arg(long, required_unless_present = "paley", conflicts_with = "paley")]
    pub k: Option<u64>,
    /// Build the Paley matrix instead.
    #[arg(long)]
    pub paley: bool,
}

impl MatrixArgs {
    fn build(&self) -> Result<SensingMatrix> {
        let field = PrimeField::new(self.p)?;
        match self.k {
            Some(k) if !self.paley => SensingMatrix::power_residue(&field, k),
            _ => SensingMatrix::paley(&field),
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long = "p-max", default_value_t = 31)]
    pub p_max: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Exhaustive,
    Sampled,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RipArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub matrix: MatrixArgs,
    #[arg(long = "K")]
    #[serde(rename = "K")]
    pub sparsity: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Exhaustive)]
    pub mode: ModeArg,
    /// Sampled pairs in sampled mode.
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    /// Compute the RIP constant delta_K instead of the flat constant.
    #[arg(long)]
    pub delta: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DoubleSumArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub k: u64,
    /// Character exponent.
    #[arg(long, default_value_t = 1)]
    pub h: i64,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub beta: f64,
    /// Switches to the square-root bound (always sampled).
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long, value_enum, default_value_t = ModeArg::Exhaustive)]
    pub mode: ModeArg,
    /// Largest set size in exhaustive mode.
    #[arg(long = "max-size")]
    pub max_size: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgArg {
    Omp,
    Iht,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AmplitudeArg {
    Unit,
    Gaussian,
    Rademacher,
}

impl From<AmplitudeArg> for AmplitudeModel {
    fn from(a: AmplitudeArg) -> Self {
        match a {
            AmplitudeArg::Unit => AmplitudeModel::Unit,
            AmplitudeArg::Gaussian => AmplitudeModel::Gaussian,
            AmplitudeArg::Rademacher => AmplitudeModel::Rademacher,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RecoverArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub matrix: MatrixArgs,
    /// Sparsity levels, comma separated.
    #[arg(long = "K", value_delimiter = ',', required = true)]
    #[serde(rename = "K")]
    pub sparsities: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    #[arg(long, value_enum, default_value_t = AlgArg::Omp)]
    pub alg: AlgArg,
    #[arg(long, value_enum, default_value_t = AmplitudeArg::Unit)]
    pub amplitude: AmplitudeArg,
    /// Add complex Gaussian noise at this SNR in dB.
    #[arg(long)]
    pub snr: Option<f64>,
    /// IHT step size.
    #[arg(long, default_value_t = 1.0)]
    pub step: f64,
    /// IHT iteration cap.
    #[arg(long = "max-iters", default_value_t = 500)]
    pub max_iters: usize,
    /// Stopping tolerance (OMP residual norm, IHT residual improvement).
    #[arg(long)]
    pub tol: Option<f64>,
}

impl RecoverArgs {
    fn algorithm(&self) -> Algorithm {
        match self.alg {
            AlgArg::Omp => match self.tol {
                Some(tolerance) => Algorithm::Omp { tolerance },
                None => Algorithm::default_omp(),
            },
            AlgArg::Iht => {
                let default = Algorithm::default_iht();
                let Algorithm::Iht { tolerance, .. } = default else { unreachable!() };
                Algorithm::Iht { step: self.step, max_iters: self.max_iters, tolerance: self.tol.unwrap_or(tolerance) }
            }
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PrimesArgs {
    /// Bounds x, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub x: Vec<u64>,
    #[arg(long)]
    pub eps1: f64,
    #[arg(long)]
    pub eps2: f64,
    /// Write the `p,k` hits for the largest x here.
    #[arg(long)]
    #[serde(skip)]
    pub hits: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ParamsArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub beta0: f64,
    #[arg(long)]
    pub eps1: f64,
    #[arg(long)]
    pub eps2: f64,
    #[arg(long)]
    pub tau: f64,
    /// Optionally check that p - 1 has the factor k in (p^eps1, p^eps2].
    #[arg(long, requires = "k")]
    pub p: Option<u64>,
    #[arg(long, requires = "p")]
    pub k: Option<u64>,
}

/// Output of one command before it is written out.
struct Outcome {
    body: String,
    exit: i32,
    /// Written to `--out` instead of `body` when present (matrix files).
    file_body: Option<String>,
}

fn envelope(command: &str, params: Value, report: Value) -> String {
    let v = json!({
        "tool": TOOL_NAME,
        "version": TOOL_VERSION,
        "command": command,
        "params": params,
        "report": report,
    });
    let mut s = serde_json::to_string_pretty(&v).expect("reports serialize");
    s.push('\n');
    s
}

fn params_value<T: Serialize>(seed: u64, args: &T) -> Value {
    let mut v = serde_json::to_value(args).expect("arguments serialize");
    if let Value::Object(map) = &mut v {
        map.insert("seed".into(), json!(seed));
    }
    v
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

fn write_with_sidecar(path: &Path, body: &str, command: &str) -> Result<()> {
    let io = |e: std::io::Error| usage(format!("cannot write {}: {e}", path.display()));
    std::fs::write(path, body).map_err(io)?;
    let created = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let meta = json!({
        "tool": TOOL_NAME,
        "version": TOOL_VERSION,
        "command": command,
        "created_unix": created,
    });
    let mut meta_path = path.as_os_str().to_owned();
    meta_path.push(".meta.json");
    std::fs::write(PathBuf::from(meta_path), serde_json::to_string_pretty(&meta).expect("serializes") + "\n")
        .map_err(io)
}

fn execute(cli: &Cli, stderr: &mut dyn Write) -> Result<Outcome> {
    let seed = cli.seed;
    let format = cli.format;
    let command = cli.command.name();
    let json_only = |what: &str| -> Result<()> {
        match format {
            None | Some(Format::Json) => Ok(()),
            Some(_) => Err(usage(format!("{what} only supports --format json"))),
        }
    };
    let done = |params: Value, report: Value, exit: i32| Outcome {
        body: envelope(command, params, report),
        exit,
        file_body: None,
    };

    match &cli.command {
        Command::Gen(args) => {
            let m = args.build()?;
            if m.is_degenerate() {
                let _ = writeln!(stderr, "warning: k = 1 gives a square matrix with no compression");
            }
            let coherence = m.coherence();
            let report = json!({
                "p": m.p(),
                "k": m.k(),
                "variant": m.variant(),
                "M": m.rows(),
                "N": m.cols(),
                "compression_ratio": m.compression_ratio(),
                "coherence": coherence,
                "welch_bound": m.welch_bound(),
            });
            let matrix_text = matrix_file::to_string(&m);
            match format {
                Some(Format::Csv) => Err(usage("gen supports --format json or matrix-v1")),
                Some(Format::MatrixV1) if cli.out.is_none() => {
                    Ok(Outcome { body: matrix_text, exit: EXIT_OK, file_body: None })
                }
                _ => Ok(Outcome { file_body: Some(matrix_text), ..done(params_value(seed, args), report, EXIT_OK) }),
            }
        }
        Command::Verify(args) => {
            json_only("verify")?;
            let r = run_suite(args.p_max)?;
            let exit = if r.passed { EXIT_OK } else { EXIT_VIOLATION };
            Ok(done(params_value(seed, args), to_value(&r), exit))
        }
        Command::Rip(args) => {
            json_only("rip")?;
            let m = args.matrix.build()?;
            let report = if args.delta {
                if args.mode == ModeArg::Sampled {
                    return Err(usage("--delta is exhaustive only"));
                }
                to_value(&rip_delta_exhaustive(&m, args.sparsity, budget_from_env())?)
            } else {
                let r = match args.mode {
                    ModeArg::Exhaustive => flat_rip_exhaustive(&m, args.sparsity, budget_from_env())?,
                    ModeArg::Sampled => flat_rip_sampled(&m, args.sparsity, args.trials, seed)?,
                };
                let mut v = to_value(&r);
                let implied = if args.sparsity >= 2 { Some(rip_from_flat(r.theta, args.sparsity)?) } else { None };
                v["implied_delta_bound"] = json!(implied);
                v
            };
            Ok(done(params_value(seed, args), report, EXIT_OK))
        }
        Command::Doublesum(args) => {
            json_only("doublesum")?;
            let field = PrimeField::new(args.p)?;
            let spec = MultCharSpec::new(&field, args.k, args.h)?;
            let reports = match args.tau {
                Some(tau) => verify_square_root_bound(
                    &spec,
                    SquareRootParams { alpha: args.alpha, beta: args.beta, tau },
                    args.trials,
                    seed,
                )?,
                None => {
                    let mode = match args.mode {
                        ModeArg::Exhaustive => {
                            PropertyMode::Exhaustive { max_size: args.max_size, budget: budget_from_env() }
                        }
                        ModeArg::Sampled => PropertyMode::Sampled { trials: args.trials, seed },
                    };
                    test_property_p(&spec, args.alpha, args.beta, mode)?
                }
            };
            let violations: u64 = reports.iter().map(|r| r.violations).sum();
            let report = json!({
                "all_satisfied": violations == 0,
                "violations": violations,
                "classes": reports,
            });
            let exit = if violations == 0 { EXIT_OK } else { EXIT_VIOLATION };
            Ok(done(params_value(seed, args), report, exit))
        }
        Command::Recover(args) => {
            let m = args.matrix.build()?;
            let r = run_experiment(
                &m,
                &args.sparsities,
                args.trials,
                args.algorithm(),
                args.amplitude.into(),
                seed,
                args.snr,
            )?;
            match format {
                Some(Format::Csv) => Ok(Outcome { body: r.to_csv(), exit: EXIT_OK, file_body: None }),
                Some(Format::MatrixV1) => Err(usage("recover supports --format json or csv")),
                _ => Ok(done(params_value(seed, args), to_value(&r), EXIT_OK)),
            }
        }
        Command::Primes(args) => {
            let rows = shifted_prime_density(&args.x, args.eps1, args.eps2)?;
            if let Some(path) = &args.hits {
                let top = *args.x.iter().max().expect("x is required");
                let hits = primes_with_factor_in_range(top, args.eps1, args.eps2)?;
                std::fs::write(path, hits_csv(&hits))
                    .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
            }
            match format {
                Some(Format::Csv) => Ok(Outcome { body: density_csv(&rows), exit: EXIT_OK, file_body: None }),
                Some(Format::MatrixV1) => Err(usage("primes supports --format json or csv")),
                _ => Ok(done(params_value(seed, args), json!({ "rows": rows }), EXIT_OK)),
            }
        }
        Command::Params(args) => {
            json_only("params")?;
            let r = validate_params(AnalysisParams {
                alpha: args.alpha,
                beta0: args.beta0,
                eps1: args.eps1,
                eps2: args.eps2,
                tau: args.tau,
            });
            let mut ok = r.ok;
            let mut report = to_value(&r);
            if let (Some(p), Some(k)) = (args.p, args.k) {
                let field = PrimeField::new(p)?;
                let holds = prime_condition_holds(&field, k, args.eps1, args.eps2);
                ok &= holds;
                report["prime_condition"] = json!({ "p": p, "k": k, "holds": holds });
            }
            let exit = if ok { EXIT_OK } else { EXIT_VIOLATION };
            Ok(done(params_value(seed, args), report, exit))
        }
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the exit code.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { write!(stdout, "{text}") } else { write!(stderr, "{text}") };
            return if code == 0 { EXIT_OK } else { EXIT_USAGE };
        }
    };
    if let Some(n) = cli.threads {
        // Only the first call in a process can size the global pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let outcome = match execute(&cli, stderr) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };
    if let Some(path) = &cli.out {
        let file_body = outcome.file_body.as_deref().unwrap_or(&outcome.body);
        if let Err(e) = write_with_sidecar(path, file_body, cli.command.name()) {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    }
    if stdout.write_all(outcome.body.as_bytes()).is_err() {
        return EXIT_USAGE;
    }
    outcome.exit
}

pub fn run() -> i32 {
    run_with(std::env::args_os(), &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
