//! Four-tangle, violation thresholds, and the nonlocality-entanglement scan.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::bell::{build_bell_expression, canonical_settings, canonical_sign, xy_settings, Sign};
use crate::error::{Error, Result};
use crate::quantum::{expectation, make_gghz, StateVector};

/// Margin above the classical bound 1 before a value counts as a violation.
pub const VIOLATION_EPS: f64 = 1e-12;

/// n-tangle `|<ψ*| Y^{⊗n} |ψ>|^2` for even `n`.
pub fn n_tangle(state: &StateVector) -> Result<f64> {
    let n = state.n();
    if n % 2 == 1 {
        return Err(Error::OddTangle(n));
    }
    state.require_normalized()?;
    let amps = state.amplitudes();
    let all = amps.len() - 1;
    // Y^{⊗n}|b> = i^n (-1)^{popcount b} |b ^ all>
    let overlap: Complex64 = amps
        .iter()
        .enumerate()
        .map(|(b, a)| {
            let t = amps[b ^ all] * a;
            if b.count_ones() % 2 == 0 {
                t
            } else {
                -t
            }
        })
        .sum();
    // |i^n| = 1, so the phase does not affect the modulus
    Ok(overlap.norm_sqr().clamp(0.0, 1.0))
}

/// Both sides of `<B> = 2 sqrt(τ)` for a four-qubit state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TangleRelation {
    pub bell_value: f64,
    pub two_sqrt_tau: f64,
    /// `|bell_value - two_sqrt_tau|`
    pub residual: f64,
}

/// Evaluates the four-site expression with sign -1 and x/y settings on every
/// site, and compares it with twice the square root of the four-tangle.
pub fn nonlocality_tangle_relation(state: &StateVector) -> Result<TangleRelation> {
    if state.n() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: state.n(),
        });
    }
    let expr = build_bell_expression(4, Sign::Minus, 1)?;
    let bell_value = expectation(&expr, &xy_settings(4), state)?;
    let two_sqrt_tau = 2.0 * n_tangle(state)?.sqrt();
    Ok(TangleRelation {
        bell_value,
        two_sqrt_tau,
        residual: (bell_value - two_sqrt_tau).abs(),
    })
}

/// Values of `sin 2α` above which GGHZ states violate the inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    /// Paired-CHSH expression under the canonical settings.
    pub paired_chsh: f64,
    /// Scarani-Gisin comparison value `1 / sqrt(2^(n-1))`.
    pub scarani_gisin: f64,
}

pub fn violation_threshold(n: usize) -> Result<Thresholds> {
    if n < 2 {
        return Err(Error::TooFewSites { n, min: 2 });
    }
    let paired_chsh = if n % 4 == 2 {
        std::f64::consts::FRAC_1_SQRT_2
    } else {
        0.5
    };
    Ok(Thresholds {
        paired_chsh,
        scarani_gisin: 2f64.powf(-((n - 1) as f64) / 2.0),
    })
}

/// One row of an α scan over GGHZ states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRecord {
    pub alpha: f64,
    pub sin_2alpha: f64,
    /// Four-tangle; only present for `n = 4`.
    pub tau: Option<f64>,
    pub bell_value: f64,
    pub two_sqrt_tau: Option<f64>,
    pub violation: bool,
}

/// Scans `GGHZ_n(α)` over `grid` with the canonical sign and settings.
/// Rows come back in ascending α.
pub fn scan_alpha(n: usize, grid: &[f64]) -> Result<Vec<ScanRecord>> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let expr = build_bell_expression(n, canonical_sign(n)?, 1)?;
    let settings = canonical_settings(n)?;
    let mut alphas = grid.to_vec();
    alphas.sort_by(f64::total_cmp);
    alphas
        .par_iter()
        .map(|&alpha| {
            let state = make_gghz(n, alpha)?;
            let bell_value = expectation(&expr, &settings, &state)?;
            let tau = if n == 4 {
                Some(n_tangle(&state)?)
            } else {
                None
            };
            Ok(ScanRecord {
                alpha,
                sin_2alpha: (2.0 * alpha).sin(),
                tau,
                bell_value,
                two_sqrt_tau: tau.map(|t| 2.0 * t.sqrt()),
                violation: bell_value > 1.0 + VIOLATION_EPS,
            })
        })
        .collect()
}

/// `points` evenly spaced values from 0 to `alpha_max` inclusive.
pub fn alpha_grid(points: usize, alpha_max: f64) -> Result<Vec<f64>> {
    match points {
        0 => Err(Error::EmptyGrid),
        1 => Ok(vec![0.0]),
        _ => Ok((0..points)
            .map(|k| alpha_max * k as f64 / (points - 1) as f64)
            .collect()),
    }
}

pub const CSV_HEADER: [&str; 8] = [
    "alpha",
    "sin_2alpha",
    "tau",
    "bell_value",
    "two_sqrt_tau",
    "threshold_paper",
    "threshold_sg",
    "violation",
];

/// Formats `x` with `digits` significant digits, trimming trailing zeros.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..digits as i32).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let s = format!("{:.*e}", digits - 1, x);
        let (mantissa, e) = s.split_once('e').expect("scientific format");
        let mantissa = if mantissa.contains('.') {
            mantissa.trim_end_matches('0').trim_end_matches('.')
        } else {
            mantissa
        };
        format!("{mantissa}e{e}")
    }
}

/// Writes scan rows as CSV with 12 significant digits per float.
pub fn write_scan_csv<W: Write>(
    out: W,
    records: &[ScanRecord],
    thresholds: &Thresholds,
) -> std::io::Result<()> {
    let fmt = |x: f64| format_significant(x, 12);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            fmt(r.alpha),
            fmt(r.sin_2alpha),
            r.tau.map(fmt).unwrap_or_default(),
            fmt(r.bell_value),
            r.two_sqrt_tau.map(fmt).unwrap_or_default(),
            fmt(thresholds.paired_chsh),
            fmt(thresholds.scarani_gisin),
            r.violation.to_string(),
        ])?;
    }
    w.flush()
}
