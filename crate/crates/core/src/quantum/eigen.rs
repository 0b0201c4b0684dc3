//! Extremal eigenvalues of Hermitian Pauli sums by shifted power iteration.
//!
//! Iterating on `H + c I` with `c` the L1 norm of the coefficients keeps the
//! spectrum in `[0, 2c]`, so the dominant eigenvalue is the largest
//! algebraic one.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::quantum::pauli::{apply_pauli_sum, PauliSum};
use crate::quantum::state::StateVector;

pub const RAYLEIGH_TOL: f64 = 1e-10;
pub const MAX_ITERATIONS: usize = 10_000;
const START_SEED: u64 = 0x5EED_B311;

fn random_start(n: usize) -> Result<StateVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    let amps = (0..1usize << n)
        .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect();
    StateVector::normalized(n, amps)
}

/// Largest algebraic eigenvalue of a Hermitian Pauli sum.
pub fn largest_eigenvalue(psum: &PauliSum) -> Result<f64> {
    let imag = psum.max_imaginary();
    if !psum.is_hermitian() {
        return Err(Error::NonHermitian(imag));
    }
    let shift = psum.l1_norm();
    if shift == 0.0 {
        return Ok(0.0);
    }
    let mut v = random_start(psum.n())?;
    let mut previous = f64::NAN;
    for _ in 0..MAX_ITERATIONS {
        let hv = apply_pauli_sum(psum, &v)?;
        let rayleigh = v.inner(&hv).re;
        if (rayleigh - previous).abs() < RAYLEIGH_TOL {
            return Ok(rayleigh);
        }
        previous = rayleigh;
        let next = hv
            .amplitudes()
            .iter()
            .zip(v.amplitudes())
            .map(|(h, x)| h + x * shift)
            .collect();
        v = StateVector::normalized(psum.n(), next)?;
    }
    Err(Error::NoConvergence(MAX_ITERATIONS))
}

/// Largest eigenvalue magnitude: the larger of `λmax(H)` and `-λmin(H)`.
pub fn max_abs_eigenvalue(psum: &PauliSum) -> Result<f64> {
    let top = largest_eigenvalue(psum)?;
    let bottom = -largest_eigenvalue(&psum.clone().scale(Complex64::new(-1.0, 0.0)))?;
    Ok(top.abs().max(bottom.abs()))
}
