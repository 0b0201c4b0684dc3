//! Dense-matrix oracles shared by the integration tests. Everything here is
//! built from explicit Kronecker products and never touches the matrix-free
//! kernels it is used to check.

#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use scalable_bell::bell::{BellExpression, MeasurementSettings};
use scalable_bell::quantum::{Pauli, PauliSum, StateVector};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli_matrix(p: Pauli) -> DMatrix<Complex64> {
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    match p {
        Pauli::I => DMatrix::from_row_slice(2, 2, &[one, z, z, one]),
        Pauli::X => DMatrix::from_row_slice(2, 2, &[z, one, one, z]),
        Pauli::Y => DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        Pauli::Z => DMatrix::from_row_slice(2, 2, &[one, z, z, -one]),
    }
}

pub fn bloch_matrix(v: [f64; 3]) -> DMatrix<Complex64> {
    pauli_matrix(Pauli::X) * c(v[0], 0.0)
        + pauli_matrix(Pauli::Y) * c(v[1], 0.0)
        + pauli_matrix(Pauli::Z) * c(v[2], 0.0)
}

/// Site 1 is the leftmost Kronecker factor (most significant bit).
pub fn kron_all(factors: &[DMatrix<Complex64>]) -> DMatrix<Complex64> {
    factors
        .iter()
        .fold(DMatrix::from_element(1, 1, c(1.0, 0.0)), |acc, f| {
            acc.kronecker(f)
        })
}

pub fn dense_pauli_sum(psum: &PauliSum) -> DMatrix<Complex64> {
    let dim = 1usize << psum.n();
    let mut m = DMatrix::from_element(dim, dim, c(0.0, 0.0));
    for (coeff, labels) in psum.terms() {
        let factors: Vec<_> = labels.iter().map(|&p| pauli_matrix(p)).collect();
        m += kron_all(&factors) * *coeff;
    }
    m
}

/// Bell operator assembled term by term from Bloch matrices.
pub fn dense_bell(expr: &BellExpression, settings: &MeasurementSettings) -> DMatrix<Complex64> {
    let dim = 1usize << expr.n();
    let mut m = DMatrix::from_element(dim, dim, c(0.0, 0.0));
    for (k, t) in expr.terms().iter().enumerate() {
        let factors: Vec<_> = t
            .choice
            .iter()
            .enumerate()
            .map(|(site, &ch)| bloch_matrix(settings.vector(site, ch)))
            .collect();
        m += kron_all(&factors) * c(expr.coefficient(k), 0.0);
    }
    m
}

pub fn dense_expectation(m: &DMatrix<Complex64>, state: &StateVector) -> Complex64 {
    let amps = state.amplitudes();
    let mut total = c(0.0, 0.0);
    for r in 0..m.nrows() {
        for col in 0..m.ncols() {
            total += amps[r].conj() * m[(r, col)] * amps[col];
        }
    }
    total
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: DMatrix<Complex64>) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn random_unit(rng: &mut ChaCha8Rng) -> [f64; 3] {
    let z: f64 = rng.gen_range(-1.0..1.0);
    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let r = (1.0 - z * z).sqrt();
    [r * phi.cos(), r * phi.sin(), z]
}

pub fn random_planar(rng: &mut ChaCha8Rng) -> [f64; 3] {
    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    [phi.cos(), phi.sin(), 0.0]
}

pub fn random_settings(n: usize, rng: &mut ChaCha8Rng) -> MeasurementSettings {
    MeasurementSettings::new(
        (0..n)
            .map(|_| [random_unit(rng), random_unit(rng)])
            .collect(),
    )
    .unwrap()
}

pub fn random_state(n: usize, rng: &mut ChaCha8Rng) -> StateVector {
    let amps = (0..1usize << n)
        .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    StateVector::normalized(n, amps).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
