use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest qubit count accepted by the state constructors.
pub const STATE_CAP: usize = 24;

/// Tolerance on `sum |amplitude|^2 = 1`.
pub const NORM_TOL: f64 = 1e-12;

/// Pure state on `n` qubits. Basis index bit `n - 1 - s` holds zero-based
/// site `s`, so site 1 is the most significant bit.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

fn check_range(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::TooFewSites { n, min: 2 });
    }
    if n > STATE_CAP {
        return Err(Error::AboveCap { n, cap: STATE_CAP });
    }
    Ok(())
}

impl StateVector {
    /// Wraps raw amplitudes without checking normalization.
    pub fn from_raw(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        if n == 0 || n > STATE_CAP {
            return Err(Error::InvalidInput(format!(
                "qubit count must be in 1..={STATE_CAP}, got {n}"
            )));
        }
        if amps.len() != 1 << n {
            return Err(Error::InvalidInput(format!(
                "{} amplitudes for n = {n}, expected {}",
                amps.len(),
                1usize << n
            )));
        }
        Ok(StateVector { n, amps })
    }

    /// Wraps amplitudes that must already be normalized.
    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        let s = Self::from_raw(n, amps)?;
        s.require_normalized()?;
        Ok(s)
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        let mut s = Self::from_raw(n, amps)?;
        let norm = s.norm_sqr().sqrt();
        if norm == 0.0 {
            return Err(Error::NotNormalized(0.0));
        }
        s.amps.iter_mut().for_each(|a| *a /= norm);
        Ok(s)
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n.min(STATE_CAP)];
        if index >= amps.len() {
            return Err(Error::InvalidInput(format!(
                "basis index {index} out of range for n = {n}"
            )));
        }
        amps[index] = Complex64::new(1.0, 0.0);
        Self::from_raw(n, amps)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn require_normalized(&self) -> Result<()> {
        let ns = self.norm_sqr();
        if (ns - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(ns));
        }
        Ok(())
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Applies the single-qubit observable `v · σ` at zero-based `site`.
    pub fn apply_bloch(&mut self, site: usize, v: [f64; 3]) {
        let bit = 1usize << (self.n - 1 - site);
        let [vx, vy, vz] = v;
        let up = Complex64::new(vx, vy); // <1|v·σ|0>
        let down = Complex64::new(vx, -vy); // <0|v·σ|1>
        for b in 0..self.amps.len() {
            if b & bit == 0 {
                let a0 = self.amps[b];
                let a1 = self.amps[b | bit];
                self.amps[b] = a0 * vz + down * a1;
                self.amps[b | bit] = up * a0 - a1 * vz;
            }
        }
    }
}

/// `(|0...0> + |1...1>) / sqrt(2)`.
pub fn make_ghz(n: usize) -> Result<StateVector> {
    make_gghz(n, std::f64::consts::FRAC_PI_4)
}

/// `cos(alpha) |0...0> + sin(alpha) |1...1>`.
pub fn make_gghz(n: usize, alpha: f64) -> Result<StateVector> {
    check_range(n)?;
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
    let (s, c) = alpha.sin_cos();
    amps[0] = Complex64::new(c, 0.0);
    amps[(1 << n) - 1] += Complex64::new(s, 0.0);
    Ok(StateVector { n, amps })
}

/// Four-qubit slice state
/// `cos a |0000> + sin a |1> (cos b |0> + sin b |1>)(cos c |0> + sin c |1>)(cos d |0> + sin d |1>)`.
pub fn make_slice(alpha: f64, beta: f64, gamma: f64, delta: f64) -> StateVector {
    let mut amps = vec![Complex64::new(0.0, 0.0); 16];
    amps[0] = Complex64::new(alpha.cos(), 0.0);
    let factor = |t: f64, bit: usize| if bit == 1 { t.sin() } else { t.cos() };
    for low in 0..8usize {
        let w = alpha.sin()
            * factor(beta, low >> 2 & 1)
            * factor(gamma, low >> 1 & 1)
            * factor(delta, low & 1);
        amps[8 | low] += Complex64::new(w, 0.0);
    }
    StateVector { n: 4, amps }
}
