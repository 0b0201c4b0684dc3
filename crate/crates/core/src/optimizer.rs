//! Settings search and sign calibration.
//!
//! Settings are parameterized by angles: `planar` uses one azimuth per
//! observable (`(cos θ, sin θ, 0)`), `bloch` uses polar and azimuthal angles.
//! The search is a Nelder-Mead ascent on the quantum value from several
//! starts; start 0 is always the canonical setting.

use std::cell::Cell;
use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bell::{
    build_bell_expression, canonical_settings, BellExpression, MeasurementSettings, Sign,
};
use crate::error::{Error, Result};
use crate::quantum::{expectation, make_ghz, StateVector};

/// Stop when the simplex values span less than this.
pub const VALUE_TOL: f64 = 1e-10;
/// Evaluation budget per start.
pub const MAX_EVALUATIONS: usize = 50_000;
/// Tolerance for the calibration targets.
pub const CALIBRATION_TOL: f64 = 1e-9;

const INITIAL_STEP: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Planar,
    Bloch,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "planar" => Ok(Mode::Planar),
            "bloch" => Ok(Mode::Bloch),
            other => Err(Error::InvalidInput(format!(
                "mode must be planar or bloch, got {other:?}"
            ))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Planar => "planar",
            Mode::Bloch => "bloch",
        })
    }
}

/// Angle coordinates for the settings of `n` sites.
#[derive(Debug, Clone, PartialEq)]
pub struct SettingsParameterization {
    pub mode: Mode,
    pub angles: Vec<f64>,
}

impl SettingsParameterization {
    pub fn encode(settings: &MeasurementSettings, mode: Mode) -> Result<Self> {
        let mut angles = Vec::new();
        for pair in settings.vectors() {
            for v in pair {
                match mode {
                    Mode::Planar => {
                        if v[2].abs() > 1e-12 {
                            return Err(Error::InvalidInput(
                                "planar parameterization needs z = 0 on every vector".into(),
                            ));
                        }
                        angles.push(v[1].atan2(v[0]));
                    }
                    Mode::Bloch => {
                        angles.push(v[2].clamp(-1.0, 1.0).acos());
                        angles.push(v[1].atan2(v[0]));
                    }
                }
            }
        }
        Ok(SettingsParameterization { mode, angles })
    }

    pub fn decode(&self) -> Result<MeasurementSettings> {
        let per_site = match self.mode {
            Mode::Planar => 2,
            Mode::Bloch => 4,
        };
        if self.angles.is_empty() || !self.angles.len().is_multiple_of(per_site) {
            return Err(Error::InvalidInput(format!(
                "{} angles do not describe whole sites in {} mode",
                self.angles.len(),
                self.mode
            )));
        }
        let vector = |a: &[f64]| -> [f64; 3] {
            match self.mode {
                Mode::Planar => [a[0].cos(), a[0].sin(), 0.0],
                Mode::Bloch => {
                    let (st, ct) = a[0].sin_cos();
                    [st * a[1].cos(), st * a[1].sin(), ct]
                }
            }
        };
        let width = per_site / 2;
        let vectors = self
            .angles
            .chunks_exact(per_site)
            .map(|site| [vector(&site[..width]), vector(&site[width..])])
            .collect();
        MeasurementSettings::new(vectors)
    }

    fn random(n: usize, mode: Mode, rng: &mut ChaCha8Rng) -> Self {
        let angles = match mode {
            Mode::Planar => (0..2 * n).map(|_| rng.gen_range(0.0..2.0 * PI)).collect(),
            Mode::Bloch => (0..2 * n)
                .flat_map(|_| {
                    // uniform on the sphere
                    let polar = rng.gen_range(-1.0f64..1.0).acos();
                    [polar, rng.gen_range(0.0..2.0 * PI)]
                })
                .collect(),
        };
        SettingsParameterization { mode, angles }
    }
}

/// Outcome of a Nelder-Mead run.
#[derive(Debug, Clone, PartialEq)]
pub struct Ascent {
    pub point: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
}

/// Maximizes `f` by Nelder-Mead from `start`, with an axis-aligned initial
/// simplex of edge `step`. Stops when the vertex values span less than
/// `tol` or after `max_evals` evaluations.
pub fn nelder_mead_max<F>(
    mut f: F,
    start: &[f64],
    step: f64,
    tol: f64,
    max_evals: usize,
) -> Result<Ascent>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let dim = start.len();
    let evals = Cell::new(0usize);
    // minimize -f
    let mut cost = |x: &[f64]| -> Result<f64> {
        evals.set(evals.get() + 1);
        Ok(-f(x)?)
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((start.to_vec(), cost(start)?));
    for i in 0..dim {
        let mut p = start.to_vec();
        p[i] += step;
        let c = cost(&p)?;
        simplex.push((p, c));
    }

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let along = |from: &[f64], to: &[f64], t: f64| -> Vec<f64> {
        from.iter().zip(to).map(|(a, b)| a + t * (b - a)).collect()
    };

    loop {
        // stable sort keeps the earlier vertex first on ties
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[dim].1 - simplex[0].1;
        if spread < tol || evals.get() >= max_evals {
            break;
        }
        let mut centroid = vec![0.0; dim];
        for (p, _) in &simplex[..dim] {
            centroid
                .iter_mut()
                .zip(p)
                .for_each(|(c, x)| *c += x / dim as f64);
        }
        let worst = simplex[dim].clone();

        let reflected = along(&centroid, &worst.0, -alpha);
        let fr = cost(&reflected)?;
        if fr < simplex[0].1 {
            let expanded = along(&centroid, &worst.0, -gamma);
            let fe = cost(&expanded)?;
            simplex[dim] = if fe < fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
            continue;
        }
        if fr < simplex[dim - 1].1 {
            simplex[dim] = (reflected, fr);
            continue;
        }
        let (contracted, fc) = if fr < worst.1 {
            let c = along(&centroid, &reflected, rho);
            let fc = cost(&c)?;
            (c, fc)
        } else {
            let c = along(&centroid, &worst.0, rho);
            let fc = cost(&c)?;
            (c, fc)
        };
        if fc < worst.1.min(fr) {
            simplex[dim] = (contracted, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for v in simplex.iter_mut().skip(1) {
            let p = along(&best, &v.0, sigma);
            let c = cost(&p)?;
            *v = (p, c);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (point, c) = simplex.swap_remove(0);
    Ok(Ascent {
        point,
        value: -c,
        evaluations: evals.get(),
    })
}

/// Best settings found for `expr` on `state`.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizedSettings {
    pub settings: MeasurementSettings,
    pub value: f64,
    /// Value at the canonical settings (start 0).
    pub canonical_value: f64,
    /// Index of the winning start.
    pub restart: usize,
    pub evaluations: usize,
}

/// Searches settings maximizing the quantum value of `expr` on `state`.
///
/// Start 0 is the canonical setting; starts `1..restarts` draw uniform
/// angles from a ChaCha stream keyed by `seed` and the start index. The best
/// value wins, ties going to the lowest start.
pub fn optimize_settings(
    expr: &BellExpression,
    state: &StateVector,
    mode: Mode,
    restarts: usize,
    seed: u64,
) -> Result<OptimizedSettings> {
    let n = expr.n();
    if state.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: state.n(),
        });
    }
    if restarts == 0 {
        return Err(Error::NoRestarts);
    }
    let canonical = canonical_settings(n)?;
    let canonical_value = expectation(expr, &canonical, state)?;
    let canonical_start = SettingsParameterization::encode(&canonical, mode)?;

    let runs = (0..restarts)
        .into_par_iter()
        .map(|k| {
            let start = if k == 0 {
                canonical_start.clone()
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(k as u64);
                SettingsParameterization::random(n, mode, &mut rng)
            };
            let objective = |angles: &[f64]| {
                let settings = SettingsParameterization {
                    mode,
                    angles: angles.to_vec(),
                }
                .decode()?;
                expectation(expr, &settings, state)
            };
            nelder_mead_max(
                objective,
                &start.angles,
                INITIAL_STEP,
                VALUE_TOL,
                MAX_EVALUATIONS,
            )
        })
        .collect::<Result<Vec<_>>>()?;

    let evaluations = runs.iter().map(|r| r.evaluations).sum();
    let (restart, best) = runs
        .into_iter()
        .enumerate()
        .reduce(|a, b| if b.1.value > a.1.value { b } else { a })
        .expect("restarts >= 1");
    let settings = SettingsParameterization {
        mode,
        angles: best.point,
    }
    .decode()?;
    Ok(OptimizedSettings {
        settings,
        value: best.value,
        canonical_value,
        restart,
        evaluations,
    })
}

/// Value GHZ states should reach under the canonical settings.
pub fn claimed_ghz_value(n: usize) -> f64 {
    if n % 4 == 2 {
        SQRT_2
    } else {
        2.0
    }
}

/// Picks the second-product sign by evaluating both variants on `GHZ_n`
/// under the canonical settings. The winner must reach the claimed value and
/// the loser must vanish; anything else is refused.
pub fn calibrate_sign(n: usize) -> Result<Sign> {
    let settings = canonical_settings(n)?;
    let ghz = make_ghz(n)?;
    let plus = expectation(&build_bell_expression(n, Sign::Plus, 1)?, &settings, &ghz)?;
    let minus = expectation(&build_bell_expression(n, Sign::Minus, 1)?, &settings, &ghz)?;
    let target = claimed_ghz_value(n);
    let (winner, hi, lo) = if plus > minus {
        (Sign::Plus, plus, minus)
    } else {
        (Sign::Minus, minus, plus)
    };
    if (hi - target).abs() > CALIBRATION_TOL || lo.abs() > CALIBRATION_TOL {
        return Err(Error::CalibrationFailed {
            n,
            plus,
            minus,
            target,
        });
    }
    Ok(winner)
}
