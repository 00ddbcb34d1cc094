//! Command-line front end: argument parsing, input loading, report assembly.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::Serialize;

use crate::error::Error;
use crate::linalg::SvdOptions;
use crate::matrix_io::{self, CrossCov, Format, Header};
use crate::oracles;
use crate::projections::{ConstraintSpec, Groups, SparseVector};
use crate::solver::{self, Samples, SolveReport, SolverConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_SOLVER: i32 = 4;

pub const DEFAULT_RANK: usize = 5;
pub const DEFAULT_SAMPLES: u64 = 100_000;

/// Invalid command line; the message names the offending flag.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

/// Exit code for a library error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io { .. }
        | Error::Parse { .. }
        | Error::UnsupportedFormat(_)
        | Error::DegenerateColumn(_)
        | Error::Shape(_) => EXIT_DATA,
        Error::Constraint(_) | Error::InvalidParameter(_) => EXIT_USAGE,
        Error::Rank { .. }
        | Error::ZeroInput
        | Error::DegenerateInput { .. }
        | Error::Capacity { .. }
        | Error::Precondition(_) => EXIT_SOLVER,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Mtx,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HeaderArg {
    Auto,
    Yes,
    No,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verify {
    None,
    Threshold,
    Exhaustive,
}

#[derive(Debug, Parser)]
#[command(
    name = "spancca",
    version,
    about = "Sparse diagonal CCA: approximately maximize uᵀ·ΣXY·v under sparsity constraints"
)]
struct Args {
    /// Samples-by-variables matrix X (with --y)
    #[arg(long = "x", value_name = "FILE")]
    x: Option<PathBuf>,
    /// Samples-by-variables matrix Y (with --x)
    #[arg(long = "y", value_name = "FILE")]
    y: Option<PathBuf>,
    /// Precomputed cross-covariance ΣXY
    #[arg(long, value_name = "FILE")]
    sigma: Option<PathBuf>,
    /// Input format; inferred from the extension when omitted (.mtx/.mm → MatrixMarket)
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// CSV header row handling
    #[arg(long, value_enum, default_value = "auto")]
    header: HeaderArg,
    /// Use X and Y as given instead of centering and scaling each column
    #[arg(long)]
    no_standardize: bool,
    /// Rank of the low-rank surrogate
    #[arg(long, short = 'r')]
    rank: Option<usize>,
    /// Number of sampling rounds T
    #[arg(long, short = 'T')]
    samples: Option<u64>,
    /// Target accuracy; T is derived from (epsilon, delta) unless --samples is given
    #[arg(long)]
    epsilon: Option<f64>,
    /// Failure probability for the epsilon-derived T (default 0.1)
    #[arg(long)]
    delta: Option<f64>,
    /// Constraint on u: sparse:<s> | sparse:<pct>% | unit | groups:<file>:<g>
    #[arg(long, value_name = "SPEC", default_value = "unit")]
    su: String,
    /// Constraint on v: sparse:<s> | sparse:<pct>% | unit | groups:<file>:<g>
    #[arg(long, value_name = "SPEC", default_value = "unit")]
    sv: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads for the rounds (default: $SPANCCA_WORKERS or all cores)
    #[arg(long)]
    workers: Option<usize>,
    /// Skip computing uᵀ·ΣXY·v for the selected pair
    #[arg(long)]
    no_rescore: bool,
    /// Select the best round by uᵀ·ΣXY·v instead of the low-rank objective
    #[arg(long)]
    select_on_full: bool,
    /// Compare against a reference solver
    #[arg(long, value_enum, default_value = "none")]
    verify: Verify,
    /// Maximum support pairs the exhaustive verifier may visit
    #[arg(long, default_value_t = oracles::DEFAULT_LIMIT)]
    oracle_limit: u128,
    #[arg(long, default_value_t = 4)]
    power_iters: usize,
    #[arg(long, default_value_t = 8)]
    oversample: usize,
    /// Power iterations for the σ_{r+1} estimate
    #[arg(long, default_value_t = 50)]
    residual_iters: usize,
    /// Write the JSON report here instead of stdout
    #[arg(long, short = 'o', value_name = "FILE")]
    output: Option<PathBuf>,
    /// Also write <PREFIX>_u.csv and <PREFIX>_v.csv
    #[arg(long, value_name = "PREFIX")]
    csv_vectors: Option<PathBuf>,
    /// Omit wall-clock timings from the report
    #[arg(long)]
    no_timings: bool,
}

/// A constraint as written on the command line; resolved once the dimension
/// is known.
#[derive(Debug, Clone, PartialEq)]
pub enum ConstraintArg {
    Sparse(usize),
    SparsePercent(f64),
    Unit,
    Groups { path: PathBuf, g: usize },
}

impl ConstraintArg {
    pub fn parse(flag: &str, text: &str) -> Result<Self, UsageError> {
        let bad = |why: &str| UsageError(format!("{flag} '{text}': {why}"));
        if text == "unit" {
            return Ok(ConstraintArg::Unit);
        }
        if let Some(rest) = text.strip_prefix("sparse:") {
            if let Some(pct) = rest.strip_suffix('%') {
                let p: f64 = pct.parse().map_err(|_| bad("percentage is not a number"))?;
                if !(p > 0.0 && p <= 100.0) {
                    return Err(bad("percentage must lie in (0, 100]"));
                }
                return Ok(ConstraintArg::SparsePercent(p));
            }
            let s: usize = rest
                .parse()
                .map_err(|_| bad("sparsity is not a positive integer"))?;
            if s == 0 {
                return Err(bad("sparsity must be at least 1"));
            }
            return Ok(ConstraintArg::Sparse(s));
        }
        if let Some(rest) = text.strip_prefix("groups:") {
            let (path, g) = rest
                .rsplit_once(':')
                .ok_or_else(|| bad("expected groups:<file>:<g>"))?;
            let g: usize = g
                .parse()
                .map_err(|_| bad("group budget is not a positive integer"))?;
            if g == 0 || path.is_empty() {
                return Err(bad("expected groups:<file>:<g> with g ≥ 1"));
            }
            return Ok(ConstraintArg::Groups {
                path: PathBuf::from(path),
                g,
            });
        }
        Err(bad(
            "expected sparse:<s>, sparse:<pct>%, unit or groups:<file>:<g>",
        ))
    }

    /// Concrete constraint for dimension `dim`.
    pub fn resolve(&self, dim: usize) -> Result<ConstraintSpec, Error> {
        Ok(match self {
            ConstraintArg::Sparse(s) => ConstraintSpec::Sparse { s: *s },
            ConstraintArg::SparsePercent(p) => ConstraintSpec::Sparse {
                s: percent_budget(*p, dim),
            },
            ConstraintArg::Unit => ConstraintSpec::Unit,
            ConstraintArg::Groups { path, g } => {
                let text = fs::read_to_string(path).map_err(|source| Error::Io {
                    path: path.clone(),
                    source,
                })?;
                ConstraintSpec::GroupSparse {
                    groups: Groups::parse(&text, dim)?,
                    g: *g,
                }
            }
        })
    }
}

/// `⌈pct·dim/100⌉`, at least 1 and at most `dim`.
pub fn percent_budget(pct: f64, dim: usize) -> usize {
    // guard against 15·20/100 = 3.0000000000000004
    let raw = (pct * dim as f64 / 100.0 - 1e-9).ceil();
    (raw.max(1.0) as usize).min(dim)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Input {
    Data {
        x: PathBuf,
        y: PathBuf,
        standardize: bool,
    },
    Sigma(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub input: Input,
    pub format: Option<Format>,
    pub header: Header,
    pub rank: usize,
    pub samples: Samples,
    pub constraint_u: ConstraintArg,
    pub constraint_v: ConstraintArg,
    pub seed: u64,
    pub workers: usize,
    pub rescore_full: bool,
    pub select_on_full: bool,
    pub verify: Verify,
    pub oracle_limit: u128,
    pub svd: SvdOptions,
    pub residual_iters: usize,
    pub output: Option<PathBuf>,
    pub csv_vectors: Option<PathBuf>,
    pub timings: bool,
    /// Non-fatal notes produced while parsing.
    pub warnings: Vec<String>,
}

/// Parses and validates arguments (`argv[0]` is the program name). `env`
/// looks up environment variables.
pub fn parse_config<I, S>(
    argv: I,
    env: &dyn Fn(&str) -> Option<String>,
) -> Result<CliConfig, UsageError>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let args = Args::try_parse_from(argv).map_err(|e| UsageError(e.to_string()))?;
    let mut warnings = Vec::new();

    let input = match (&args.x, &args.y, &args.sigma) {
        (Some(x), Some(y), None) => Input::Data {
            x: x.clone(),
            y: y.clone(),
            standardize: !args.no_standardize,
        },
        (None, None, Some(s)) => Input::Sigma(s.clone()),
        (_, _, Some(_)) => {
            return Err(UsageError(
                "--sigma conflicts with --x/--y; give one input mode".into(),
            ))
        }
        (Some(_), None, None) => return Err(UsageError("--x requires --y".into())),
        (None, Some(_), None) => return Err(UsageError("--y requires --x".into())),
        (None, None, None) => {
            return Err(UsageError(
                "no input: give --sigma FILE or --x FILE --y FILE".into(),
            ))
        }
    };

    let rank = args.rank.unwrap_or(DEFAULT_RANK);
    if rank == 0 {
        return Err(UsageError("--rank must be at least 1".into()));
    }
    let check_open = |flag: &str, v: f64| {
        if v > 0.0 && v < 1.0 {
            Ok(v)
        } else {
            Err(UsageError(format!("{flag} {v} must lie in (0, 1)")))
        }
    };
    let epsilon = args
        .epsilon
        .map(|e| check_open("--epsilon", e))
        .transpose()?;
    let delta = args.delta.map(|d| check_open("--delta", d)).transpose()?;
    if delta.is_some() && epsilon.is_none() {
        return Err(UsageError("--delta requires --epsilon".into()));
    }
    let samples = match (args.samples, epsilon) {
        (Some(0), _) => return Err(UsageError("--samples must be at least 1".into())),
        (Some(t), Some(_)) => {
            warnings.push("both --samples and --epsilon given; using --samples".into());
            Samples::Count(t)
        }
        (Some(t), None) => Samples::Count(t),
        (None, Some(e)) => {
            let d = delta.unwrap_or(solver::DEFAULT_DELTA);
            solver::samples_for_epsilon(rank, e, d)
                .map_err(|err| UsageError(format!("--epsilon {e} with --rank {rank}: {err}")))?;
            Samples::Accuracy {
                epsilon: e,
                delta: d,
            }
        }
        (None, None) => Samples::Count(DEFAULT_SAMPLES),
    };

    let workers = match args.workers {
        Some(0) => return Err(UsageError("--workers must be at least 1".into())),
        Some(w) => w,
        None => match env("SPANCCA_WORKERS") {
            Some(v) => match v.trim().parse::<usize>() {
                Ok(w) if w > 0 => w,
                _ => {
                    return Err(UsageError(format!(
                        "SPANCCA_WORKERS '{v}' is not a positive integer"
                    )))
                }
            },
            None => std::thread::available_parallelism().map_or(1, |n| n.get()),
        },
    };

    Ok(CliConfig {
        input,
        format: args.format.map(|f| match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Mtx => Format::MatrixMarket,
        }),
        header: match args.header {
            HeaderArg::Auto => Header::Auto,
            HeaderArg::Yes => Header::Present,
            HeaderArg::No => Header::Absent,
        },
        rank,
        samples,
        constraint_u: ConstraintArg::parse("--su", &args.su)?,
        constraint_v: ConstraintArg::parse("--sv", &args.sv)?,
        seed: args.seed,
        workers,
        rescore_full: !args.no_rescore,
        select_on_full: args.select_on_full,
        verify: args.verify,
        oracle_limit: args.oracle_limit,
        svd: SvdOptions {
            power_iters: args.power_iters,
            oversample: args.oversample,
        },
        residual_iters: args.residual_iters,
        output: args.output,
        csv_vectors: args.csv_vectors,
        timings: !args.no_timings,
        warnings,
    })
}

#[derive(Debug, Serialize)]
pub struct ConfigEcho {
    pub m: usize,
    pub n: usize,
    pub rank: usize,
    pub samples: u64,
    pub epsilon: f64,
    pub delta: f64,
    pub constraint_u: String,
    pub constraint_v: String,
    pub seed: u64,
    pub workers: usize,
    pub rescore_full: bool,
    pub select_on_full: bool,
    pub power_iters: usize,
    pub oversample: usize,
}

#[derive(Debug, Serialize)]
pub struct VectorJson {
    pub dim: usize,
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
}

impl VectorJson {
    fn new(v: &SparseVector, names: Option<&[String]>) -> Self {
        Self {
            dim: v.dim(),
            indices: v.indices().to_vec(),
            values: v.values().to_vec(),
            names: names.map(|n| v.indices().iter().map(|&i| n[i].clone()).collect()),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct VerifyJson {
    pub method: Verify,
    pub oracle_objective: f64,
    /// `oracle_objective − obj_full` (or `− obj_lowrank` without rescoring).
    pub gap: f64,
    pub supports_examined: u64,
}

#[derive(Debug, Serialize)]
pub struct TimingsJson {
    pub svd_ms: f64,
    pub rounds_ms: f64,
    pub total_ms: f64,
}

/// Machine-readable result. Field order is the serialization order.
#[derive(Debug, Serialize)]
pub struct ReportJson {
    pub config: ConfigEcho,
    pub u: VectorJson,
    pub v: VectorJson,
    pub obj_lowrank: f64,
    pub obj_full: Option<f64>,
    pub sigma1: f64,
    pub sigma_r_plus_1_estimate: f64,
    pub theorem1_slack: f64,
    pub best_round: u64,
    pub rounds_discarded: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<TimingsJson>,
}

impl ReportJson {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is always serializable") + "\n"
    }
}

struct Loaded {
    sigma: CrossCov,
    u_names: Option<Vec<String>>,
    v_names: Option<Vec<String>>,
}

fn load(config: &CliConfig) -> Result<Loaded, Error> {
    let fmt = |p: &Path| config.format.unwrap_or_else(|| Format::from_path(p));
    match &config.input {
        Input::Sigma(path) => {
            let d = matrix_io::load_matrix_with(path, fmt(path), config.header)?;
            let v_names = d.col_names().map(<[String]>::to_vec);
            Ok(Loaded {
                sigma: CrossCov::from(d),
                u_names: None,
                v_names,
            })
        }
        Input::Data { x, y, standardize } => {
            let mut dx = matrix_io::load_matrix_with(x, fmt(x), config.header)?;
            let mut dy = matrix_io::load_matrix_with(y, fmt(y), config.header)?;
            if *standardize {
                dx = matrix_io::standardize(&dx)?;
                dy = matrix_io::standardize(&dy)?;
            }
            let sigma = matrix_io::cross_covariance(&dx, &dy)?;
            Ok(Loaded {
                sigma,
                u_names: dx.col_names().map(<[String]>::to_vec),
                v_names: dy.col_names().map(<[String]>::to_vec),
            })
        }
    }
}

fn ms(d: std::time::Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

/// Loads inputs, solves, optionally verifies, and returns the report.
pub fn run(config: &CliConfig) -> Result<ReportJson, Error> {
    let loaded = load(config)?;
    let sigma = &loaded.sigma;
    let cu = config.constraint_u.resolve(sigma.m())?;
    let cv = config.constraint_v.resolve(sigma.n())?;

    let solver_config = SolverConfig {
        rank: config.rank,
        samples: config.samples,
        constraint_u: cu.clone(),
        constraint_v: cv.clone(),
        seed: config.seed,
        workers: config.workers,
        rescore_full: config.rescore_full,
        select_on_full: config.select_on_full,
        svd: config.svd,
        residual_iters: config.residual_iters,
    };

    if config.verify == Verify::Exhaustive {
        let pairs = oracles::support_count(&cu, sigma.m())
            .saturating_mul(oracles::support_count(&cv, sigma.n()));
        if pairs > config.oracle_limit {
            return Err(Error::Capacity {
                what: format!(
                    "--verify exhaustive (limit {}); use --verify threshold instead",
                    config.oracle_limit
                ),
                required: format!("{pairs} support pairs"),
            });
        }
    }

    let report = solver::solve(sigma, &solver_config)?;
    let verify = match config.verify {
        Verify::None => None,
        method => {
            let oracle = match method {
                Verify::Threshold => oracles::threshold_constrained(sigma, &cu, &cv)?,
                _ => oracles::exhaustive_constrained(
                    sigma,
                    &cu,
                    &cv,
                    config.oracle_limit,
                    config.workers,
                )?,
            };
            let ours = report.obj_full.unwrap_or(report.best.obj_lowrank);
            Some(VerifyJson {
                method,
                oracle_objective: oracle.objective,
                gap: oracle.objective - ours,
                supports_examined: oracle.supports_examined,
            })
        }
    };

    if let Some(prefix) = &config.csv_vectors {
        write_vector_csv(prefix, "u", &report.best.u, loaded.u_names.as_deref())?;
        write_vector_csv(prefix, "v", &report.best.v, loaded.v_names.as_deref())?;
    }

    Ok(assemble(
        config,
        sigma,
        &solver_config,
        report,
        verify,
        &loaded,
    ))
}

fn assemble(
    config: &CliConfig,
    sigma: &CrossCov,
    sc: &SolverConfig,
    report: SolveReport,
    verify: Option<VerifyJson>,
    loaded: &Loaded,
) -> ReportJson {
    ReportJson {
        config: ConfigEcho {
            m: sigma.m(),
            n: sigma.n(),
            rank: sc.rank,
            samples: report.rounds,
            epsilon: report.epsilon,
            delta: report.delta,
            constraint_u: sc.constraint_u.to_string(),
            constraint_v: sc.constraint_v.to_string(),
            seed: sc.seed,
            workers: sc.workers,
            rescore_full: sc.rescore_full,
            select_on_full: sc.select_on_full,
            power_iters: sc.svd.power_iters,
            oversample: sc.svd.oversample,
        },
        u: VectorJson::new(&report.best.u, loaded.u_names.as_deref()),
        v: VectorJson::new(&report.best.v, loaded.v_names.as_deref()),
        obj_lowrank: report.best.obj_lowrank,
        obj_full: report.obj_full,
        sigma1: report.sigma1,
        sigma_r_plus_1_estimate: report.sigma_r_plus_1,
        theorem1_slack: report.theorem1_slack,
        best_round: report.best.round,
        rounds_discarded: report.rounds_discarded,
        verify,
        timings: config.timings.then(|| TimingsJson {
            svd_ms: ms(report.timings.svd),
            rounds_ms: ms(report.timings.rounds),
            total_ms: ms(report.timings.total),
        }),
    }
}

fn write_vector_csv(
    prefix: &Path,
    side: &str,
    v: &SparseVector,
    names: Option<&[String]>,
) -> Result<(), Error> {
    let mut name = prefix.as_os_str().to_owned();
    name.push(format!("_{side}.csv"));
    let path = PathBuf::from(name);
    let io_err = |source| Error::Io {
        path: path.clone(),
        source,
    };
    let mut f = std::io::BufWriter::new(fs::File::create(&path).map_err(io_err)?);
    let mut body = String::from(if names.is_some() {
        "index,name,value\n"
    } else {
        "index,value\n"
    });
    for (i, x) in v.pairs() {
        match names {
            Some(n) => body.push_str(&format!("{i},{},{x:?}\n", n[i])),
            None => body.push_str(&format!("{i},{x:?}\n")),
        }
    }
    f.write_all(body.as_bytes()).map_err(io_err)?;
    f.flush().map_err(io_err)
}

/// Full CLI behaviour; returns the process exit code.
pub fn main_with<I, S>(
    argv: I,
    env: &dyn Fn(&str) -> Option<String>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<S> = argv.into_iter().collect();
    let config = match parse_config(argv.clone(), env) {
        Ok(c) => c,
        Err(e) => {
            // --help and --version are reported through the same path
            if let Err(ce) = Args::try_parse_from(argv) {
                if matches!(
                    ce.kind(),
                    clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
                ) {
                    let _ = write!(stdout, "{ce}");
                    return EXIT_OK;
                }
            }
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };
    for w in &config.warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
    let report = match run(&config) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return exit_code(&e);
        }
    };
    let json = report.to_json();
    let written = match &config.output {
        Some(path) => fs::write(path, json).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        }),
        None => stdout
            .write_all(json.as_bytes())
            .map_err(|source| Error::Io {
                path: PathBuf::from("<stdout>"),
                source,
            }),
    };
    match written {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn no_env(_: &str) -> Option<String> {
        None
    }

    fn parse(args: &[&str]) -> Result<CliConfig, UsageError> {
        parse_config(
            std::iter::once("spancca").chain(args.iter().copied()),
            &no_env,
        )
    }

    #[test]
    fn explicit_samples() {
        let c = parse(&[
            "--sigma",
            "s.mtx",
            "--rank",
            "3",
            "--samples",
            "10000",
            "--su",
            "sparse:4",
            "--sv",
            "sparse:7",
        ])
        .unwrap();
        assert_eq!(c.input, Input::Sigma("s.mtx".into()));
        assert_eq!(c.rank, 3);
        assert_eq!(c.samples, Samples::Count(10000));
        assert_eq!(c.constraint_u, ConstraintArg::Sparse(4));
        assert_eq!(c.constraint_v, ConstraintArg::Sparse(7));
    }

    #[test]
    fn defaults() {
        let c = parse(&["--sigma", "s.csv"]).unwrap();
        assert_eq!(c.rank, 5);
        assert_eq!(c.samples, Samples::Count(100_000));
        assert_eq!(c.seed, 0);
        assert!(c.rescore_full);
        assert!(c.workers >= 1);
        assert_eq!(c.verify, Verify::None);
    }

    #[test]
    fn percentage_budgets() {
        let c = parse(&[
            "--x",
            "x.csv",
            "--y",
            "y.csv",
            "--su",
            "sparse:15%",
            "--sv",
            "sparse:15%",
        ])
        .unwrap();
        assert_eq!(c.constraint_u, ConstraintArg::SparsePercent(15.0));
        assert_eq!(
            c.constraint_u.resolve(2149).unwrap(),
            ConstraintSpec::Sparse { s: 323 }
        );
        assert_eq!(
            c.constraint_v.resolve(20).unwrap(),
            ConstraintSpec::Sparse { s: 3 }
        );
        assert_eq!(
            c.constraint_v.resolve(3).unwrap(),
            ConstraintSpec::Sparse { s: 1 }
        );
        assert_eq!(percent_budget(0.001, 5), 1);
        assert_eq!(percent_budget(100.0, 7), 7);
    }

    #[test]
    fn epsilon_resolves_samples() {
        let c = parse(&[
            "--sigma",
            "s.csv",
            "--epsilon",
            "0.5",
            "--delta",
            "0.1",
            "--rank",
            "3",
        ])
        .unwrap();
        let sc = SolverConfig::new(3, c.samples, ConstraintSpec::Unit, ConstraintSpec::Unit);
        assert_eq!(sc.resolve_samples().unwrap().0, 6731);
    }

    #[test]
    fn explicit_samples_win_with_warning() {
        let c = parse(&["--sigma", "s.csv", "--epsilon", "0.5", "--samples", "10"]).unwrap();
        assert_eq!(c.samples, Samples::Count(10));
        assert_eq!(c.warnings.len(), 1);
    }

    #[test]
    fn usage_errors_name_the_flag() {
        let cases: &[(&[&str], &str)] = &[
            (&["--sigma", "s", "--x", "x", "--y", "y"], "--sigma"),
            (&["--x", "x"], "--x"),
            (&[], "--sigma"),
            (&["--sigma", "s", "--su", "sparse:abc"], "--su"),
            (&["--sigma", "s", "--sv", "dense"], "--sv"),
            (&["--sigma", "s", "--su", "sparse:0"], "--su"),
            (&["--sigma", "s", "--su", "sparse:150%"], "--su"),
            (&["--sigma", "s", "--su", "groups:g.txt"], "--su"),
            (&["--sigma", "s", "--epsilon", "1.5"], "--epsilon"),
            (
                &["--sigma", "s", "--epsilon", "0.5", "--delta", "0"],
                "--delta",
            ),
            (&["--sigma", "s", "--delta", "0.5"], "--delta"),
            (&["--sigma", "s", "--workers", "0"], "--workers"),
            (&["--sigma", "s", "--rank", "0"], "--rank"),
        ];
        for (args, flag) in cases {
            let err = parse(args).unwrap_err();
            assert!(err.0.contains(flag), "{args:?}: {}", err.0);
        }
    }

    #[test]
    fn workers_from_env() {
        let env = |k: &str| (k == "SPANCCA_WORKERS").then(|| "3".to_string());
        let c = parse_config(["spancca", "--sigma", "s"], &env).unwrap();
        assert_eq!(c.workers, 3);
        let c = parse_config(["spancca", "--sigma", "s", "--workers", "2"], &env).unwrap();
        assert_eq!(c.workers, 2);
        let bad = |_: &str| Some("zero".to_string());
        assert!(parse_config(["spancca", "--sigma", "s"], &bad)
            .unwrap_err()
            .0
            .contains("SPANCCA_WORKERS"));
    }

    #[test]
    fn groups_spec_keeps_colons_in_path() {
        assert_eq!(
            ConstraintArg::parse("--su", "groups:C:/data/g.txt:2").unwrap(),
            ConstraintArg::Groups {
                path: "C:/data/g.txt".into(),
                g: 2
            }
        );
    }

    #[test]
    fn exit_codes_cover_taxonomy() {
        assert_eq!(exit_code(&Error::parse(1, "x")), EXIT_DATA);
        assert_eq!(exit_code(&Error::DegenerateColumn(0)), EXIT_DATA);
        assert_eq!(exit_code(&Error::Shape("x".into())), EXIT_DATA);
        assert_eq!(exit_code(&Error::Rank { rank: 3, max: 2 }), EXIT_SOLVER);
        assert_eq!(
            exit_code(&Error::DegenerateInput { rounds: 1 }),
            EXIT_SOLVER
        );
        assert_eq!(
            exit_code(&Error::Capacity {
                what: "x".into(),
                required: "y".into()
            }),
            EXIT_SOLVER
        );
    }
}
