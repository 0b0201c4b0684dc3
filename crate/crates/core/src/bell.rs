//! Paired-CHSH Bell expressions.
//!
//! An expression on `n` sites is built from the two halves of the CHSH
//! polynomial for every adjacent pair of sites,
//!
//! ```text
//! P-(j) = A(j,1) A(j+1,1) - A(j,2) A(j+1,2)
//! P+(j) = A(j,1) A(j+1,2) + A(j,2) A(j+1,1)
//! ```
//!
//! and reads `N [ prod P-(j) + s prod P+(j) ]` for even `n`. For odd `n` one
//! leader site multiplies the first product by `A(leader,1)` and the second
//! by `A(leader,2)`; the remaining sites pair up in ascending order. The
//! normalization `N` is `2^-floor(n/2)`, so every coefficient is `±N`.
//!
//! Terms are stored fully expanded as integer signs plus one shared
//! normalization, which keeps classical evaluation exact.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Tolerance on the Euclidean norm of a Bloch vector.
pub const UNIT_TOL: f64 = 1e-12;

/// Prefactor of the second product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_i32(v: i32) -> Result<Self> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(Error::InvalidSign(other)),
        }
    }

    pub fn as_i32(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sign::Plus => write!(f, "+1"),
            Sign::Minus => write!(f, "-1"),
        }
    }
}

impl FromStr for Sign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+1" | "1" | "+" => Ok(Sign::Plus),
            "-1" | "-" => Ok(Sign::Minus),
            other => Err(Error::InvalidInput(format!(
                "sign must be +1 or -1, got {other:?}"
            ))),
        }
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i32(self.as_i32())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = i32::deserialize(d)?;
        Sign::from_i32(v).map_err(serde::de::Error::custom)
    }
}

/// Which of the two observables a site measures in a correlation term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Choice {
    First,
    Second,
}

impl Choice {
    /// Zero-based index into a site's observable pair.
    pub fn index(self) -> usize {
        match self {
            Choice::First => 0,
            Choice::Second => 1,
        }
    }

    fn from_u8(v: u8) -> Result<Self> {
        match v {
            1 => Ok(Choice::First),
            2 => Ok(Choice::Second),
            other => Err(Error::MalformedExpression(format!(
                "choice entries must be 1 or 2, got {other}"
            ))),
        }
    }
}

impl Serialize for Choice {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u8(self.index() as u8 + 1)
    }
}

impl<'de> Deserialize<'de> for Choice {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Choice::from_u8(u8::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// A power of two, `2^exponent`, kept exact for serialization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Normalization {
    exponent: i32,
}

impl Normalization {
    pub fn pow2(exponent: i32) -> Self {
        Normalization { exponent }
    }

    pub fn exponent(self) -> i32 {
        self.exponent
    }

    pub fn value(self) -> f64 {
        2f64.powi(self.exponent)
    }
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "2^{}", self.exponent)
    }
}

impl FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let exp = s
            .trim()
            .strip_prefix("2^")
            .and_then(|e| e.parse::<i32>().ok())
            .ok_or_else(|| {
                Error::MalformedExpression(format!("normalization must look like 2^-k, got {s:?}"))
            })?;
        Ok(Normalization::pow2(exp))
    }
}

impl Serialize for Normalization {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Normalization {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One full-correlation monomial: a sign times the product of one chosen
/// observable per site.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CorrelationTerm {
    pub coeff_sign: i8,
    pub choice: Vec<Choice>,
}

/// A normalized sum of full-correlation terms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BellExpression {
    n: usize,
    sign: Sign,
    leader: usize,
    normalization: Normalization,
    terms: Vec<CorrelationTerm>,
}

/// Number of correlation terms in the expression on `n` sites.
pub fn term_count(n: usize) -> Result<usize> {
    if n < 2 {
        return Err(Error::TooFewSites { n, min: 2 });
    }
    Ok(1usize << (n / 2 + 1))
}

/// Zero-based site pairs used by the expression on `n` sites. For odd `n`
/// the zero-based `leader` is skipped.
pub fn site_pairs(n: usize, leader: usize) -> Vec<(usize, usize)> {
    let rest: Vec<usize> = if n.is_multiple_of(2) {
        (0..n).collect()
    } else {
        (0..n).filter(|&i| i != leader).collect()
    };
    rest.chunks_exact(2).map(|c| (c[0], c[1])).collect()
}

/// Builds the paired-CHSH expression on `n` sites.
///
/// `leader` is one-based and only used for odd `n`. Within each family the
/// terms are sorted lexicographically by their choice vectors (observable 1
/// before observable 2, site 1 most significant); the `P-` family precedes
/// the `P+` family.
pub fn build_bell_expression(n: usize, sign: Sign, leader: usize) -> Result<BellExpression> {
    if n < 2 {
        return Err(Error::TooFewSites { n, min: 2 });
    }
    let leader = if n.is_multiple_of(2) {
        1
    } else {
        if leader < 1 || leader > n {
            return Err(Error::LeaderOutOfRange { leader, n });
        }
        leader
    };
    let pairs = site_pairs(n, leader - 1);
    let npairs = pairs.len();

    let mut first = Vec::with_capacity(1 << npairs);
    let mut second = Vec::with_capacity(1 << npairs);
    for pick in 0u64..(1u64 << npairs) {
        let mut a = vec![Choice::First; n];
        let mut b = vec![Choice::First; n];
        let mut coeff_a: i8 = 1;
        for (k, &(i, j)) in pairs.iter().enumerate() {
            if pick >> k & 1 == 1 {
                // -A2 A2 from P-, and A2 A1 from P+
                a[i] = Choice::Second;
                a[j] = Choice::Second;
                coeff_a = -coeff_a;
                b[i] = Choice::Second;
            } else {
                b[j] = Choice::Second;
            }
        }
        if n % 2 == 1 {
            a[leader - 1] = Choice::First;
            b[leader - 1] = Choice::Second;
        }
        first.push(CorrelationTerm {
            coeff_sign: coeff_a,
            choice: a,
        });
        second.push(CorrelationTerm {
            coeff_sign: sign.as_i32() as i8,
            choice: b,
        });
    }
    first.sort_by(|x, y| x.choice.cmp(&y.choice));
    second.sort_by(|x, y| x.choice.cmp(&y.choice));
    first.extend(second);

    Ok(BellExpression {
        n,
        sign,
        leader,
        normalization: Normalization::pow2(-((n / 2) as i32)),
        terms: first,
    })
}

/// The sign for which GHZ states reach the full violation under
/// [`canonical_settings`]: `(-1)^floor((n+2)/4)`.
pub fn canonical_sign(n: usize) -> Result<Sign> {
    if n < 2 {
        return Err(Error::TooFewSites { n, min: 2 });
    }
    Ok(if ((n + 2) / 4).is_multiple_of(2) {
        Sign::Plus
    } else {
        Sign::Minus
    })
}

impl BellExpression {
    /// Builds an expression from explicit terms. The result carries sign +1
    /// and leader 1; those fields only describe built expressions.
    pub fn custom(
        n: usize,
        normalization: Normalization,
        terms: Vec<CorrelationTerm>,
    ) -> Result<Self> {
        Self::from_parts(n, Sign::Plus, 1, normalization, terms)
    }

    fn from_parts(
        n: usize,
        sign: Sign,
        leader: usize,
        normalization: Normalization,
        terms: Vec<CorrelationTerm>,
    ) -> Result<Self> {
        if n < 1 {
            return Err(Error::TooFewSites { n, min: 1 });
        }
        if leader < 1 || leader > n {
            return Err(Error::LeaderOutOfRange { leader, n });
        }
        for (k, t) in terms.iter().enumerate() {
            if t.choice.len() != n {
                return Err(Error::MalformedExpression(format!(
                    "term {k} has {} choices, expected {n}",
                    t.choice.len()
                )));
            }
            if t.coeff_sign != 1 && t.coeff_sign != -1 {
                return Err(Error::MalformedExpression(format!(
                    "term {k} has coeff_sign {}, expected +1 or -1",
                    t.coeff_sign
                )));
            }
        }
        Ok(BellExpression {
            n,
            sign,
            leader,
            normalization,
            terms,
        })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            n: usize,
            sign: Sign,
            leader: usize,
            normalization: Normalization,
            terms: Vec<CorrelationTerm>,
        }
        let raw: Raw =
            serde_json::from_str(s).map_err(|e| Error::MalformedExpression(e.to_string()))?;
        Self::from_parts(raw.n, raw.sign, raw.leader, raw.normalization, raw.terms)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("expression serializes")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    /// One-based leader site (1 for even `n`).
    pub fn leader(&self) -> usize {
        self.leader
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn terms(&self) -> &[CorrelationTerm] {
        &self.terms
    }

    /// Real coefficient of term `k`.
    pub fn coefficient(&self, k: usize) -> f64 {
        self.terms[k].coeff_sign as f64 * self.normalization.value()
    }

    /// Whether this expression is exactly the paired-CHSH expression for its
    /// own `n`, sign and leader.
    pub fn has_paired_shape(&self) -> bool {
        match build_bell_expression(self.n, self.sign, self.leader) {
            Ok(reference) => reference == *self,
            Err(_) => false,
        }
    }
}

/// Two dichotomic observables per site, as unit Bloch vectors.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct MeasurementSettings {
    vectors: Vec<[[f64; 3]; 2]>,
}

fn check_unit(v: [f64; 3]) -> Result<()> {
    let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if (norm - 1.0).abs() > UNIT_TOL {
        return Err(Error::NonUnitVector(v[0], v[1], v[2]));
    }
    Ok(())
}

impl MeasurementSettings {
    pub fn new(vectors: Vec<[[f64; 3]; 2]>) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::TooFewSites { n: 0, min: 1 });
        }
        for pair in &vectors {
            check_unit(pair[0])?;
            check_unit(pair[1])?;
        }
        Ok(MeasurementSettings { vectors })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let vectors: Vec<[[f64; 3]; 2]> =
            serde_json::from_str(s).map_err(|e| Error::InvalidInput(e.to_string()))?;
        Self::new(vectors)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("settings serialize")
    }

    pub fn n(&self) -> usize {
        self.vectors.len()
    }

    /// Bloch vector of observable `choice` at zero-based `site`.
    pub fn vector(&self, site: usize, choice: Choice) -> [f64; 3] {
        self.vectors[site][choice.index()]
    }

    pub fn vectors(&self) -> &[[[f64; 3]; 2]] {
        &self.vectors
    }

    /// True when every Bloch vector has zero z component.
    pub fn is_planar(&self) -> bool {
        self.vectors
            .iter()
            .all(|p| p[0][2] == 0.0 && p[1][2] == 0.0)
    }
}

const X: [f64; 3] = [1.0, 0.0, 0.0];
const Y: [f64; 3] = [0.0, 1.0, 0.0];

/// Settings under which GHZ states reach the full violation.
///
/// Every site measures x and y, except site 1, which is rotated by 45° in
/// the x-y plane when `n ≡ 2 (mod 4)` and measures x twice when
/// `n ≡ 1 (mod 4)`.
pub fn canonical_settings(n: usize) -> Result<MeasurementSettings> {
    if n < 2 {
        return Err(Error::TooFewSites { n, min: 2 });
    }
    let mut vectors = vec![[X, Y]; n];
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match n % 4 {
        2 => vectors[0] = [[h, h, 0.0], [-h, h, 0.0]],
        1 => vectors[0] = [X, X],
        _ => {}
    }
    MeasurementSettings::new(vectors)
}

/// All sites measuring x and y.
pub fn xy_settings(n: usize) -> MeasurementSettings {
    MeasurementSettings {
        vectors: vec![[X, Y]; n],
    }
}
