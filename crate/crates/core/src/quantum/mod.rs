//! Exact pure-state evaluation of Bell expressions.

pub mod eigen;
pub mod pauli;
pub mod state;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::bell::{BellExpression, MeasurementSettings};
use crate::error::{Error, Result};

pub use eigen::{largest_eigenvalue, max_abs_eigenvalue};
pub use pauli::{apply_pauli_sum, observable_from_bloch, Pauli, PauliSum};
pub use state::{make_gghz, make_ghz, make_slice, StateVector};

/// Largest imaginary part tolerated in a single correlator.
pub const IMAG_TOL: f64 = 1e-10;

/// Residual norm tolerated by the eigenvector check.
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-10;

fn check_dims(expr: &BellExpression, settings: &MeasurementSettings, n: usize) -> Result<()> {
    for found in [settings.n(), n] {
        if found != expr.n() {
            return Err(Error::DimensionMismatch {
                expected: expr.n(),
                found,
            });
        }
    }
    Ok(())
}

/// Correlator `<ψ| ⊗ (a · σ) |ψ>` for each term, in term order.
pub fn correlators(
    expr: &BellExpression,
    settings: &MeasurementSettings,
    state: &StateVector,
) -> Result<Vec<f64>> {
    check_dims(expr, settings, state.n())?;
    expr.terms()
        .par_iter()
        .map(|term| {
            let mut phi = state.clone();
            for (site, &c) in term.choice.iter().enumerate() {
                phi.apply_bloch(site, settings.vector(site, c));
            }
            let corr = state.inner(&phi);
            if corr.im.abs() >= IMAG_TOL {
                return Err(Error::ImaginaryResidue(corr.im.abs()));
            }
            Ok(corr.re)
        })
        .collect()
}

/// Quantum value `<ψ|B|ψ>` evaluated term by term.
pub fn expectation(
    expr: &BellExpression,
    settings: &MeasurementSettings,
    state: &StateVector,
) -> Result<f64> {
    let corr = correlators(expr, settings, state)?;
    let signed: f64 = expr
        .terms()
        .iter()
        .zip(&corr)
        .map(|(t, c)| t.coeff_sign as f64 * c)
        .sum();
    Ok(signed * expr.normalization().value())
}

/// Bell operator for fixed settings, expanded into merged Pauli strings.
pub fn bell_pauli_expansion(
    expr: &BellExpression,
    settings: &MeasurementSettings,
) -> Result<PauliSum> {
    if settings.n() != expr.n() {
        return Err(Error::DimensionMismatch {
            expected: expr.n(),
            found: settings.n(),
        });
    }
    let observables = settings
        .vectors()
        .iter()
        .map(|pair| {
            Ok([
                observable_from_bloch(pair[0])?,
                observable_from_bloch(pair[1])?,
            ])
        })
        .collect::<Result<Vec<_>>>()?;

    let mut total = PauliSum::new(expr.n(), vec![])?;
    for (k, term) in expr.terms().iter().enumerate() {
        let product = term
            .choice
            .iter()
            .enumerate()
            .map(|(site, c)| &observables[site][c.index()])
            .fold(PauliSum::identity(0), |acc, op| acc.tensor(op));
        total = total.add(product.scale(Complex64::new(expr.coefficient(k), 0.0)))?;
    }
    let total = total.simplify(pauli::DROP_TOL);
    if !total.is_hermitian() {
        return Err(Error::NonHermitian(total.max_imaginary()));
    }
    Ok(total)
}

/// `½ (⊗(X + iY) + ⊗(X - iY))`, which equals
/// `2^(n-1) (|0…0><1…1| + |1…1><0…0|)`.
pub fn ghz_stabilizer_operator(n: usize) -> Result<PauliSum> {
    if n < 2 {
        return Err(Error::TooFewSites { n, min: 2 });
    }
    let i = Complex64::new(0.0, 1.0);
    let raising = PauliSum::string("X")?.add(PauliSum::string("Y")?.scale(i))?;
    let lowering = PauliSum::string("X")?.add(PauliSum::string("Y")?.scale(-i))?;
    let up = (0..n).fold(PauliSum::identity(0), |acc, _| acc.tensor(&raising));
    let down = (0..n).fold(PauliSum::identity(0), |acc, _| acc.tensor(&lowering));
    Ok(up
        .add(down)?
        .scale(Complex64::new(0.5, 0.0))
        .simplify(pauli::DROP_TOL))
}

/// Eigenvalue of `op` on a normalized `state`, or an error if `state` is not
/// an eigenvector within [`EIGEN_RESIDUAL_TOL`].
pub fn eigenvalue_on(op: &PauliSum, state: &StateVector) -> Result<f64> {
    state.require_normalized()?;
    let applied = apply_pauli_sum(op, state)?;
    let lambda = state.inner(&applied);
    let residual = applied
        .amplitudes()
        .iter()
        .zip(state.amplitudes())
        .map(|(a, s)| (a - s * lambda).norm_sqr())
        .sum::<f64>()
        .sqrt();
    if residual >= EIGEN_RESIDUAL_TOL || lambda.im.abs() >= EIGEN_RESIDUAL_TOL {
        return Err(Error::NotEigenvector(residual.max(lambda.im.abs())));
    }
    Ok(lambda.re)
}

/// Eigenvalue of the GHZ stabilizer-like operator on `GHZ_n`.
pub fn ghz_stabilizer_check(n: usize) -> Result<f64> {
    let op = ghz_stabilizer_operator(n)?;
    eigenvalue_on(&op, &make_ghz(n)?)
}
