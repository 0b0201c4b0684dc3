//! Command-line dispatcher.
//!
//! Exit codes: 0 on success, 1 on bad input, 2 when an internal numerical
//! check fails (calibration ambiguity, non-convergence, ...).

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::bell::{
    build_bell_expression, canonical_settings, canonical_sign, BellExpression, MeasurementSettings,
    Sign,
};
use crate::entanglement::{
    alpha_grid, format_significant, n_tangle, nonlocality_tangle_relation, scan_alpha,
    violation_threshold, write_scan_csv,
};
use crate::error::Error;
use crate::lhv::{lhv_max_with_cap, lhv_sample, DEFAULT_CAP};
use crate::optimizer::{calibrate_sign, claimed_ghz_value, optimize_settings, Mode};
use crate::quantum::{
    bell_pauli_expansion, expectation, largest_eigenvalue, make_gghz, make_ghz, make_slice,
    max_abs_eigenvalue, pauli::label_string, StateVector,
};

#[derive(Debug, Parser)]
#[command(
    name = "scalable-bell",
    version,
    about = "Paired-CHSH multiqubit Bell inequalities"
)]
pub struct Cli {
    /// Worker threads for enumeration and optimizer restarts (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Expand the Bell expression into correlation terms.
    Build {
        #[command(flatten)]
        expr: ExprArgs,
        #[arg(long)]
        json: bool,
    },
    /// Certify the classical bound by exhaustive enumeration.
    LhvBound {
        #[command(flatten)]
        expr: ExprArgs,
        /// Largest n enumerated exhaustively.
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        /// Above the cap, draw this many random strategies instead.
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Quantum value of the expression on a state.
    Expect {
        #[command(flatten)]
        expr: ExprArgs,
        /// ghz | gghz:<alpha> | slice:<a>,<b>,<c>,<d>
        #[arg(long, default_value = "ghz")]
        state: String,
        /// canonical | path to a JSON array of per-site vector pairs
        #[arg(long, default_value = "canonical")]
        settings: String,
        /// Read the expression from a JSON file instead of building it.
        #[arg(long = "expr")]
        expr_file: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Extremal eigenvalues of the Bell operator for fixed settings.
    Eigen {
        #[command(flatten)]
        expr: ExprArgs,
        #[arg(long, default_value = "canonical")]
        settings: String,
        /// Also print the Pauli expansion.
        #[arg(long)]
        expand: bool,
        #[arg(long)]
        json: bool,
    },
    /// Search measurement settings for a larger quantum value.
    Optimize {
        #[command(flatten)]
        expr: ExprArgs,
        #[arg(long, default_value = "ghz")]
        state: String,
        #[arg(long, default_value = "planar")]
        mode: String,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Determine the second-product sign from GHZ values.
    Calibrate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        json: bool,
    },
    /// Scan GGHZ states over alpha and emit CSV.
    Scan {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 181)]
        points: usize,
        /// Upper end of the alpha grid, e.g. 1.5708 or pi/2.
        #[arg(long, default_value = "pi/2")]
        alpha_max: String,
        /// Output path; standard output when absent.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Four-tangle and the Bell-value relation for a four-qubit state.
    Tangle {
        #[arg(long, default_value = "ghz")]
        state: String,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Args)]
struct ExprArgs {
    /// Number of sites.
    #[arg(long)]
    n: Option<usize>,
    /// auto | +1 | -1
    #[arg(long, default_value = "auto", allow_hyphen_values = true)]
    sign: String,
    /// Leader site for odd n.
    #[arg(long, default_value_t = 1)]
    leader: usize,
}

#[derive(Debug)]
enum CliError {
    Lib(Error),
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

type CliResult = std::result::Result<(), CliError>;

fn sig(x: f64) -> String {
    format_significant(x, 12)
}

fn resolve_sign(n: usize, sign: &str) -> Result<Sign, Error> {
    if sign == "auto" {
        canonical_sign(n)
    } else {
        sign.parse()
    }
}

impl ExprArgs {
    fn require_n(&self) -> Result<usize, Error> {
        self.n
            .ok_or_else(|| Error::InvalidInput("--n is required".into()))
    }

    fn build(&self) -> Result<BellExpression, Error> {
        let n = self.require_n()?;
        build_bell_expression(n, resolve_sign(n, &self.sign)?, self.leader)
    }
}

/// Parses angles such as `0.3`, `pi/12`, `-3pi/8` or `2*pi`.
pub fn parse_angle(s: &str) -> Result<f64, Error> {
    let bad = || Error::InvalidInput(format!("cannot parse angle {s:?}"));
    let t = s.trim().replace(' ', "");
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a.to_string(), b.parse::<f64>().map_err(|_| bad())?),
        None => (t.clone(), 1.0),
    };
    let value = if let Some(factor) = num.strip_suffix("pi") {
        let factor = factor.strip_suffix('*').unwrap_or(factor);
        let f = match factor {
            "" | "+" => 1.0,
            "-" => -1.0,
            f => f.parse::<f64>().map_err(|_| bad())?,
        };
        f * std::f64::consts::PI
    } else {
        num.parse::<f64>().map_err(|_| bad())?
    };
    if den == 0.0 {
        return Err(bad());
    }
    Ok(value / den)
}

/// Parses `ghz`, `gghz:<alpha>` or `slice:<a>,<b>,<c>,<d>`.
pub fn parse_state(spec: &str, n: Option<usize>) -> Result<StateVector, Error> {
    let (kind, arg) = spec.split_once(':').unwrap_or((spec, ""));
    match kind {
        "ghz" => make_ghz(n.ok_or_else(|| Error::InvalidInput("--n is required".into()))?),
        "gghz" => make_gghz(
            n.ok_or_else(|| Error::InvalidInput("--n is required".into()))?,
            parse_angle(arg)?,
        ),
        "slice" => {
            let a = arg
                .split(',')
                .map(parse_angle)
                .collect::<Result<Vec<_>, _>>()?;
            if a.len() != 4 {
                return Err(Error::InvalidInput(format!(
                    "slice needs four angles, got {}",
                    a.len()
                )));
            }
            if let Some(n) = n {
                if n != 4 {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: 4,
                    });
                }
            }
            Ok(make_slice(a[0], a[1], a[2], a[3]))
        }
        other => Err(Error::InvalidInput(format!(
            "unknown state {other:?}; expected ghz, gghz:<alpha> or slice:<a>,<b>,<c>,<d>"
        ))),
    }
}

fn load_settings(spec: &str, n: usize) -> Result<MeasurementSettings, CliError> {
    if spec == "canonical" {
        return Ok(canonical_settings(n)?);
    }
    let text = fs::read_to_string(spec).map_err(|e| CliError::Io(format!("{spec}: {e}")))?;
    Ok(MeasurementSettings::from_json(&text)?)
}

/// Runs the CLI on `argv` (including the program name), writing results to
/// `out` and diagnostics to standard error. Returns the exit code.
pub fn run<I, T>(argv: I, out: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            if code == 0 {
                let _ = write!(out, "{e}");
            } else {
                eprint!("{e}");
            }
            return code;
        }
    };
    let outcome = match cli.threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| dispatch(cli.command, out)),
            Err(e) => Err(CliError::Io(e.to_string())),
        },
        None => dispatch(cli.command, out),
    };
    match outcome {
        Ok(()) => 0,
        Err(CliError::Lib(e)) => {
            eprintln!("error: {e}");
            if e.is_assertion() {
                2
            } else {
                1
            }
        }
        Err(CliError::Io(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

fn dispatch(command: Command, out: &mut (dyn Write + Send)) -> CliResult {
    match command {
        Command::Build { expr, json } => {
            let e = expr.build()?;
            if json {
                writeln!(out, "{}", e.to_json())?;
            } else {
                writeln!(
                    out,
                    "n = {}, sign = {}, leader = {}, normalization = {}, {} terms",
                    e.n(),
                    e.sign(),
                    e.leader(),
                    e.normalization(),
                    e.terms().len()
                )?;
                for t in e.terms() {
                    let factors: Vec<String> = t
                        .choice
                        .iter()
                        .enumerate()
                        .map(|(i, c)| format!("A{}_{}", i + 1, c.index() + 1))
                        .collect();
                    let s = if t.coeff_sign > 0 { '+' } else { '-' };
                    writeln!(out, "  {s} {}", factors.join(" "))?;
                }
            }
        }
        Command::LhvBound {
            expr,
            cap,
            samples,
            seed,
            json,
        } => {
            let e = expr.build()?;
            let result = if e.n() > cap {
                match samples {
                    Some(s) => lhv_sample(&e, s, seed)?,
                    None => {
                        return Err(Error::InvalidInput(format!(
                            "n = {} exceeds the enumeration cap {cap}; raise --cap or pass --samples for a sampled lower bound",
                            e.n()
                        ))
                        .into())
                    }
                }
            } else {
                lhv_max_with_cap(&e, cap)?
            };
            if json {
                let v = json!({
                    "n": e.n(),
                    "sign": e.sign().as_i32(),
                    "max": result.max,
                    "witness_index": result.witness_index,
                    "exhaustive": result.exhaustive,
                });
                writeln!(out, "{v}")?;
            } else {
                let kind = if result.exhaustive {
                    "exhaustive"
                } else {
                    "sampled lower bound"
                };
                writeln!(
                    out,
                    "max = {} ({kind}, {} strategies)",
                    sig(result.max),
                    result.strategies
                )?;
                writeln!(out, "witness index = {}", result.witness_index)?;
            }
        }
        Command::Expect {
            expr,
            state,
            settings,
            expr_file,
            json,
        } => {
            let e = match expr_file {
                Some(path) => {
                    let text = fs::read_to_string(&path)
                        .map_err(|err| CliError::Io(format!("{}: {err}", path.display())))?;
                    let e = BellExpression::from_json(&text)?;
                    if let Some(n) = expr.n {
                        if n != e.n() {
                            return Err(Error::DimensionMismatch {
                                expected: e.n(),
                                found: n,
                            }
                            .into());
                        }
                    }
                    e
                }
                None => expr.build()?,
            };
            let psi = parse_state(&state, Some(e.n()))?;
            let s = load_settings(&settings, e.n())?;
            let value = expectation(&e, &s, &psi)?;
            if json {
                let v = json!({
                    "n": e.n(),
                    "sign": e.sign().as_i32(),
                    "state": state,
                    "value": value,
                    "violation": value.abs() > 1.0 + crate::entanglement::VIOLATION_EPS,
                });
                writeln!(out, "{v}")?;
            } else {
                writeln!(out, "<B> = {}", sig(value))?;
            }
        }
        Command::Eigen {
            expr,
            settings,
            expand,
            json,
        } => {
            let e = expr.build()?;
            let s = load_settings(&settings, e.n())?;
            let op = bell_pauli_expansion(&e, &s)?;
            let top = largest_eigenvalue(&op)?;
            let max_abs = max_abs_eigenvalue(&op)?;
            if json {
                let terms: Vec<_> = op
                    .terms()
                    .iter()
                    .map(|(c, l)| json!({"labels": label_string(l), "coeff": c.re}))
                    .collect();
                let mut v = json!({
                    "n": e.n(),
                    "sign": e.sign().as_i32(),
                    "largest": top,
                    "max_abs": max_abs,
                    "strings": op.terms().len(),
                });
                if expand {
                    v["terms"] = json!(terms);
                }
                writeln!(out, "{v}")?;
            } else {
                writeln!(out, "largest eigenvalue = {}", sig(top))?;
                writeln!(out, "max |eigenvalue| = {}", sig(max_abs))?;
                writeln!(out, "{} Pauli strings", op.terms().len())?;
                if expand {
                    for (c, l) in op.terms() {
                        writeln!(out, "  {:>+.12} {}", c.re, label_string(l))?;
                    }
                }
            }
        }
        Command::Optimize {
            expr,
            state,
            mode,
            restarts,
            seed,
            json,
        } => {
            let e = expr.build()?;
            let psi = parse_state(&state, Some(e.n()))?;
            let mode: Mode = mode.parse()?;
            let r = optimize_settings(&e, &psi, mode, restarts, seed)?;
            if json {
                let v = json!({
                    "n": e.n(),
                    "sign": e.sign().as_i32(),
                    "mode": mode.to_string(),
                    "value": r.value,
                    "canonical_value": r.canonical_value,
                    "restart": r.restart,
                    "evaluations": r.evaluations,
                    "settings": r.settings.vectors(),
                });
                writeln!(out, "{v}")?;
            } else {
                writeln!(out, "best value = {} (start {})", sig(r.value), r.restart)?;
                writeln!(out, "canonical value = {}", sig(r.canonical_value))?;
                writeln!(out, "evaluations = {}", r.evaluations)?;
                for (i, pair) in r.settings.vectors().iter().enumerate() {
                    let v = |a: [f64; 3]| format!("({}, {}, {})", sig(a[0]), sig(a[1]), sig(a[2]));
                    writeln!(out, "  site {}: {} {}", i + 1, v(pair[0]), v(pair[1]))?;
                }
            }
        }
        Command::Calibrate { n, json } => {
            let s = calibrate_sign(n)?;
            if json {
                let v = json!({"n": n, "sign": s.as_i32(), "value": claimed_ghz_value(n)});
                writeln!(out, "{v}")?;
            } else {
                writeln!(
                    out,
                    "n = {n}: sign {s} reaches {} on GHZ",
                    sig(claimed_ghz_value(n))
                )?;
            }
        }
        Command::Scan {
            n,
            points,
            alpha_max,
            csv,
        } => {
            let grid = alpha_grid(points, parse_angle(&alpha_max)?)?;
            let rows = scan_alpha(n, &grid)?;
            let thresholds = violation_threshold(n)?;
            match csv {
                Some(path) => {
                    let file = fs::File::create(&path)
                        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                    write_scan_csv(file, &rows, &thresholds)?;
                    writeln!(out, "wrote {} rows to {}", rows.len(), path.display())?;
                }
                None => write_scan_csv(&mut *out, &rows, &thresholds)?,
            }
        }
        Command::Tangle { state, json } => {
            let psi = parse_state(&state, Some(4))?;
            let tau = n_tangle(&psi)?;
            let rel = nonlocality_tangle_relation(&psi)?;
            if json {
                let v = json!({
                    "tau": tau,
                    "bell_value": rel.bell_value,
                    "two_sqrt_tau": rel.two_sqrt_tau,
                    "residual": rel.residual,
                });
                writeln!(out, "{v}")?;
            } else {
                writeln!(out, "tau = {}", sig(tau))?;
                writeln!(out, "<B> = {}", sig(rel.bell_value))?;
                writeln!(out, "2 sqrt(tau) = {}", sig(rel.two_sqrt_tau))?;
                writeln!(out, "residual = {:e}", rel.residual)?;
            }
        }
    }
    Ok(())
}
