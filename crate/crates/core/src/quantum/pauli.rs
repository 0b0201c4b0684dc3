use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::bell::UNIT_TOL;
use crate::error::{Error, Result};
use crate::quantum::state::StateVector;

/// Coefficients below this magnitude are dropped when merging.
pub const DROP_TOL: f64 = 1e-14;

/// Largest imaginary coefficient tolerated by the Hermitian check.
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_symbol(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// Weighted sum of `n`-site Pauli strings.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n: usize,
    terms: Vec<(Complex64, Vec<Pauli>)>,
}

/// Renders labels as e.g. `XXYY`.
pub fn label_string(labels: &[Pauli]) -> String {
    labels.iter().map(|p| p.symbol()).collect()
}

/// Parses labels such as `XIZY`.
pub fn parse_labels(s: &str) -> Result<Vec<Pauli>> {
    s.chars()
        .map(|c| {
            Pauli::from_symbol(c)
                .ok_or_else(|| Error::InvalidInput(format!("unknown Pauli label {c:?}")))
        })
        .collect()
}

impl PauliSum {
    pub fn new(n: usize, terms: Vec<(Complex64, Vec<Pauli>)>) -> Result<Self> {
        for (_, labels) in &terms {
            if labels.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: labels.len(),
                });
            }
        }
        Ok(PauliSum { n, terms })
    }

    /// A single string with coefficient one, e.g. `PauliSum::string("XXYY")`.
    pub fn string(labels: &str) -> Result<Self> {
        let labels = parse_labels(labels)?;
        Self::new(labels.len(), vec![(Complex64::new(1.0, 0.0), labels)])
    }

    pub fn identity(n: usize) -> Self {
        PauliSum {
            n,
            terms: vec![(Complex64::new(1.0, 0.0), vec![Pauli::I; n])],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(Complex64, Vec<Pauli>)] {
        &self.terms
    }

    /// Coefficient of the string `labels` after merging, zero if absent.
    pub fn coefficient(&self, labels: &[Pauli]) -> Complex64 {
        self.terms
            .iter()
            .filter(|(_, l)| l == labels)
            .map(|(c, _)| *c)
            .sum()
    }

    pub fn scale(mut self, factor: Complex64) -> Self {
        self.terms.iter_mut().for_each(|(c, _)| *c *= factor);
        self
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(mut self, other: PauliSum) -> Result<Self> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        self.terms.extend(other.terms);
        Ok(self)
    }

    /// Tensor product `self ⊗ other`; `self` occupies the leading sites.
    pub fn tensor(&self, other: &PauliSum) -> PauliSum {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ca, la) in &self.terms {
            for (cb, lb) in &other.terms {
                let mut labels = Vec::with_capacity(self.n + other.n);
                labels.extend_from_slice(la);
                labels.extend_from_slice(lb);
                terms.push((ca * cb, labels));
            }
        }
        PauliSum {
            n: self.n + other.n,
            terms,
        }
    }

    /// Merges duplicate strings and drops coefficients below `tol`. The
    /// result is sorted by label.
    pub fn simplify(self, tol: f64) -> Self {
        let mut merged: BTreeMap<Vec<Pauli>, Complex64> = BTreeMap::new();
        for (c, labels) in self.terms {
            *merged.entry(labels).or_default() += c;
        }
        PauliSum {
            n: self.n,
            terms: merged
                .into_iter()
                .filter(|(_, c)| c.norm() >= tol)
                .map(|(l, c)| (c, l))
                .collect(),
        }
    }

    /// Largest `|Im c|` after merging duplicates.
    pub fn max_imaginary(&self) -> f64 {
        self.clone()
            .simplify(0.0)
            .terms
            .iter()
            .map(|(c, _)| c.im.abs())
            .fold(0.0, f64::max)
    }

    /// Pauli strings are Hermitian, so a merged sum is Hermitian exactly when
    /// every coefficient equals its own conjugate.
    pub fn is_hermitian(&self) -> bool {
        self.max_imaginary() <= HERMITIAN_TOL
    }

    pub fn l1_norm(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c.norm()).sum()
    }

    /// `<state| self |state>`.
    pub fn expectation(&self, state: &StateVector) -> Result<Complex64> {
        let applied = apply_pauli_sum(self, state)?;
        Ok(state.inner(&applied))
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (c, labels)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if c.im == 0.0 {
                write!(f, "{}*{}", c.re, label_string(labels))?;
            } else {
                write!(f, "({})*{}", c, label_string(labels))?;
            }
        }
        Ok(())
    }
}

/// Single-site observable `v · σ`. Exactly-zero components are omitted.
pub fn observable_from_bloch(v: [f64; 3]) -> Result<PauliSum> {
    let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if (norm - 1.0).abs() > UNIT_TOL {
        return Err(Error::NonUnitVector(v[0], v[1], v[2]));
    }
    let terms = [Pauli::X, Pauli::Y, Pauli::Z]
        .into_iter()
        .zip(v)
        .filter(|&(_, c)| c != 0.0)
        .map(|(p, c)| (Complex64::new(c, 0.0), vec![p]))
        .collect();
    Ok(PauliSum { n: 1, terms })
}

/// Bit masks and phase for one string: flips on X/Y, signs on Z/Y, `i^#Y`.
fn string_masks(n: usize, labels: &[Pauli]) -> (usize, usize, Complex64) {
    let mut flip = 0usize;
    let mut sign = 0usize;
    let mut ys = 0u32;
    for (site, p) in labels.iter().enumerate() {
        let bit = 1usize << (n - 1 - site);
        match p {
            Pauli::I => {}
            Pauli::X => flip |= bit,
            Pauli::Y => {
                flip |= bit;
                sign |= bit;
                ys += 1;
            }
            Pauli::Z => sign |= bit,
        }
    }
    let phase = match ys % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    };
    (flip, sign, phase)
}

/// Applies `psum` to `state` string by string without forming a matrix.
/// The result is not normalized.
pub fn apply_pauli_sum(psum: &PauliSum, state: &StateVector) -> Result<StateVector> {
    let n = state.n();
    if psum.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: psum.n(),
        });
    }
    let src = state.amplitudes();
    let mut out = vec![Complex64::new(0.0, 0.0); src.len()];
    for (c, labels) in psum.terms() {
        let (flip, sign, phase) = string_masks(n, labels);
        let w = c * phase;
        for (b, a) in src.iter().enumerate() {
            let t = w * a;
            if (b & sign).count_ones() & 1 == 0 {
                out[b ^ flip] += t;
            } else {
                out[b ^ flip] -= t;
            }
        }
    }
    StateVector::from_raw(n, out)
}
