//! Acceptance suite. Runs every criterion, prints one line each and exits
//! nonzero if any of them fails.

mod common;

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::Rng;

use common::*;
use scalable_bell::bell::{
    build_bell_expression, canonical_settings, canonical_sign, term_count, xy_settings, Sign,
};
use scalable_bell::cli;
use scalable_bell::entanglement::{
    alpha_grid, n_tangle, nonlocality_tangle_relation, scan_alpha, violation_threshold,
};
use scalable_bell::lhv::lhv_max;
use scalable_bell::optimizer::calibrate_sign;
use scalable_bell::quantum::{
    apply_pauli_sum, bell_pauli_expansion, expectation, ghz_stabilizer_check,
    ghz_stabilizer_operator, largest_eigenvalue, make_gghz, make_ghz, make_slice, Pauli, PauliSum,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn alpha_37() -> Vec<f64> {
    (0..37).map(|k| k as f64 * PI / 36.0).collect()
}

fn c1_lhv_bound() -> Outcome {
    let start = Instant::now();
    let mut n10 = Duration::ZERO;
    for n in 2..=10 {
        for sign in [Sign::Plus, Sign::Minus] {
            let t = Instant::now();
            let e = build_bell_expression(n, sign, 1).map_err(err)?;
            let m = lhv_max(&e).map_err(err)?;
            if n == 10 {
                n10 += t.elapsed();
            }
            check(m.exhaustive, || format!("n={n}: not exhaustive"))?;
            check(m.strategies == 1u64 << (2 * n), || {
                format!("n={n}: wrong strategy count")
            })?;
            // exact: the integer numerator equals the inverse normalization
            check(m.max_numerator == 1i64 << (n / 2), || {
                format!("n={n} sign={sign}: numerator {}", m.max_numerator)
            })?;
            check(m.max == 1.0, || format!("n={n}: max {}", m.max))?;
        }
    }
    check(n10 <= Duration::from_secs(60), || {
        format!("n=10 took {n10:?}")
    })?;
    Ok(format!(
        "max = 1 for n=2..10, both signs; n=10 in {:.2?} (total {:.2?})",
        n10,
        start.elapsed()
    ))
}

fn c2_ghz_table() -> Outcome {
    let start = Instant::now();
    let mut worst = 0f64;
    for n in 2..=10 {
        let e = build_bell_expression(n, canonical_sign(n).map_err(err)?, 1).map_err(err)?;
        let v = expectation(
            &e,
            &canonical_settings(n).map_err(err)?,
            &make_ghz(n).map_err(err)?,
        )
        .map_err(err)?;
        let expected = if [2, 6, 10].contains(&n) { SQRT_2 } else { 2.0 };
        worst = worst.max((v - expected).abs());
        check((v - expected).abs() <= 1e-10, || {
            format!("n={n}: {v} vs {expected}")
        })?;
    }
    let took = start.elapsed();
    check(took <= Duration::from_secs(5), || format!("took {took:?}"))?;
    Ok(format!(
        "sqrt2 at n=2,6,10 and 2 elsewhere; max dev {worst:.1e} in {took:.2?}"
    ))
}

fn c3_golden_expansion() -> Outcome {
    let e = build_bell_expression(4, Sign::Minus, 1).map_err(err)?;
    let p = bell_pauli_expansion(&e, &xy_settings(4)).map_err(err)?;
    let mut golden = PauliSum::string("XXXX")
        .and_then(|g| g.add(PauliSum::string("YYYY")?))
        .map_err(err)?;
    for s in ["XXYY", "XYXY", "XYYX", "YXXY", "YXYX", "YYXX"] {
        let minus = PauliSum::string(s)
            .map_err(err)?
            .scale(Complex64::new(-1.0, 0.0));
        golden = golden.add(minus).map_err(err)?;
    }
    let golden = golden.scale(Complex64::new(0.25, 0.0)).simplify(0.0);
    check(p.terms().len() == 8, || {
        format!("{} strings: {p}", p.terms().len())
    })?;
    for (coeff, labels) in golden.terms() {
        let got = p.coefficient(labels);
        check((got - *coeff).norm() <= 1e-14, || {
            format!(
                "{}: {got} vs {coeff}",
                labels.iter().map(|l| format!("{l:?}")).collect::<String>()
            )
        })?;
    }
    Ok("8 strings, (1/4)(XXXX + YYYY - six XXYY permutations)".into())
}

fn c4_sign_documentation() -> Outcome {
    let e = build_bell_expression(4, Sign::Plus, 1).map_err(err)?;
    let v = expectation(
        &e,
        &canonical_settings(4).map_err(err)?,
        &make_ghz(4).map_err(err)?,
    )
    .map_err(err)?;
    check(v.abs() <= 1e-12, || format!("build(4,+1) on GHZ4 = {v}"))?;
    for n in 2..=10 {
        let expected = if ((n + 2) / 4) % 2 == 0 {
            Sign::Plus
        } else {
            Sign::Minus
        };
        let got = calibrate_sign(n).map_err(err)?;
        check(got == expected, || {
            format!("n={n}: calibrated {got}, formula {expected}")
        })?;
    }
    Ok(format!(
        "printed sign gives {v:.1e} on GHZ4; calibration matches (-1)^floor((n+2)/4)"
    ))
}

fn c5_gghz_scaling() -> Outcome {
    let mut worst = 0f64;
    for (n, c) in [(3, 2.0), (4, 2.0), (5, 2.0), (6, SQRT_2)] {
        let e = build_bell_expression(n, canonical_sign(n).map_err(err)?, 1).map_err(err)?;
        let s = canonical_settings(n).map_err(err)?;
        for alpha in alpha_37() {
            let v = expectation(&e, &s, &make_gghz(n, alpha).map_err(err)?).map_err(err)?;
            let d = (v - c * (2.0 * alpha).sin()).abs();
            worst = worst.max(d);
            check(d <= 1e-10, || format!("n={n} alpha={alpha}: {v}"))?;
        }
    }
    Ok(format!(
        "c = 2, 2, 2, sqrt2 for n = 3..6; max dev {worst:.1e}"
    ))
}

fn c6_thresholds() -> Outcome {
    for (n, threshold) in [(4usize, 0.5), (6, 1.0 / SQRT_2)] {
        let t = violation_threshold(n).map_err(err)?;
        check((t.paired_chsh - threshold).abs() < 1e-15, || {
            format!("n={n}: {}", t.paired_chsh)
        })?;
        // α values straddling the threshold at sin2α = threshold
        let a0 = threshold.asin() / 2.0;
        let mut grid = alpha_grid(181, FRAC_PI_2).map_err(err)?;
        grid.extend([a0 - 1e-6, a0 + 1e-6, a0]);
        for r in scan_alpha(n, &grid).map_err(err)? {
            let gap = r.sin_2alpha - threshold;
            if gap.abs() > 1e-9 {
                check(r.violation == (gap > 0.0), || {
                    format!(
                        "n={n} alpha={}: flag {} at sin2a={}",
                        r.alpha, r.violation, r.sin_2alpha
                    )
                })?;
            } else {
                check(!r.violation, || format!("n={n}: flag set at the threshold"))?;
            }
        }
    }
    for n in 2..=12 {
        let sg = violation_threshold(n).map_err(err)?.scarani_gisin;
        let expected = 1.0 / 2f64.powi(n as i32 - 1).sqrt();
        check((sg - expected).abs() <= 1e-15, || {
            format!("n={n}: SG {sg} vs {expected}")
        })?;
    }
    Ok("flag flips above sin2a = 1/2 (n=4), 1/sqrt2 (n=6); SG = 2^-(n-1)/2".into())
}

fn c7_tangle_relation() -> Outcome {
    let mut worst = 0f64;
    for alpha in alpha_grid(181, FRAC_PI_2).map_err(err)? {
        let r = nonlocality_tangle_relation(&make_gghz(4, alpha).map_err(err)?).map_err(err)?;
        worst = worst.max(r.residual);
        check(r.residual < 1e-9, || format!("gghz alpha={alpha}: {r:?}"))?;
    }
    let y4 = kron_all(&vec![pauli_matrix(Pauli::Y); 4]);
    let mut r = rng(7);
    for _ in 0..100 {
        let [a, b, g, d]: [f64; 4] = std::array::from_fn(|_| r.gen_range(0.0..FRAC_PI_2));
        let psi = make_slice(a, b, g, d);
        let rel = nonlocality_tangle_relation(&psi).map_err(err)?;
        worst = worst.max(rel.residual);
        check(rel.residual < 1e-9, || {
            format!("slice ({a},{b},{g},{d}): {rel:?}")
        })?;
        // closed form vs the library and an independent dense overlap
        let closed = ((2.0 * a).sin() * b.sin() * g.sin() * d.sin()).powi(2);
        // <psi*| has components psi_i
        let amps = psi.amplitudes();
        let mut overlap = c(0.0, 0.0);
        for i in 0..16 {
            for j in 0..16 {
                overlap += amps[i] * y4[(i, j)] * amps[j];
            }
        }
        let dense = overlap.norm_sqr();
        let lib = n_tangle(&psi).map_err(err)?;
        check(
            (closed - dense).abs() <= 1e-10 && (closed - lib).abs() <= 1e-10,
            || format!("tau closed {closed} dense {dense} lib {lib}"),
        )?;
    }
    Ok(format!(
        "181 GGHZ4 + 100 slice states; max residual {worst:.1e}"
    ))
}

fn c8_stabilizer() -> Outcome {
    let mut worst = 0f64;
    for n in 2..=12 {
        let op = ghz_stabilizer_operator(n).map_err(err)?;
        let ghz = make_ghz(n).map_err(err)?;
        let applied = apply_pauli_sum(&op, &ghz).map_err(err)?;
        let target = 2f64.powi(n as i32 - 1);
        let residual = applied
            .amplitudes()
            .iter()
            .zip(ghz.amplitudes())
            .map(|(a, g)| (a - g * target).norm_sqr())
            .sum::<f64>()
            .sqrt();
        worst = worst.max(residual);
        check(residual < 1e-10, || format!("n={n}: residual {residual}"))?;
        let lambda = ghz_stabilizer_check(n).map_err(err)?;
        check((lambda - target).abs() < 1e-10, || {
            format!("n={n}: eigenvalue {lambda}")
        })?;
    }
    Ok(format!(
        "eigenvalue 2^(n-1) for n=2..12; max residual {worst:.1e}"
    ))
}

fn c9_extremal_eigenvalue() -> Outcome {
    let mut report = Vec::new();
    for (n, sign, expected) in [(4, Sign::Minus, 2.0), (2, Sign::Plus, SQRT_2)] {
        let e = build_bell_expression(n, sign, 1).map_err(err)?;
        let p = bell_pauli_expansion(&e, &xy_settings(n)).map_err(err)?;
        let power = largest_eigenvalue(&p).map_err(err)?;
        let dense = *hermitian_eigenvalues(dense_pauli_sum(&p)).last().unwrap();
        check((power - expected).abs() <= 1e-8, || {
            format!("n={n}: power {power}")
        })?;
        check((power - dense).abs() <= 1e-8, || {
            format!("n={n}: power {power} dense {dense}")
        })?;
        report.push(format!("{power:.10}"));
    }
    Ok(format!(
        "four-site x/y operator {} (16x16 oracle), CHSH {} (4x4 oracle)",
        report[0], report[1]
    ))
}

fn c10_two_path() -> Outcome {
    let mut r = rng(10);
    let mut worst = 0f64;
    for n in 2..=6 {
        for _ in 0..40 {
            let sign = if r.gen_bool(0.5) {
                Sign::Plus
            } else {
                Sign::Minus
            };
            let e = build_bell_expression(n, sign, 1).map_err(err)?;
            let s = random_settings(n, &mut r);
            let psi = random_state(n, &mut r);
            let direct = expectation(&e, &s, &psi).map_err(err)?;
            let expanded = bell_pauli_expansion(&e, &s)
                .and_then(|p| p.expectation(&psi))
                .map_err(err)?;
            check(expanded.im.abs() <= 1e-10, || {
                format!("n={n}: imaginary {}", expanded.im)
            })?;
            let d = (direct - expanded.re).abs();
            worst = worst.max(d);
            check(d <= 1e-10, || format!("n={n}: {direct} vs {}", expanded.re))?;
        }
    }
    Ok(format!("200 instances over n=2..6; max dev {worst:.1e}"))
}

fn c11_term_counts() -> Outcome {
    for n in 2..=14 {
        let len = build_bell_expression(n, Sign::Plus, 1)
            .map_err(err)?
            .terms()
            .len();
        let expected = 1usize << (n / 2 + 1);
        let tc = term_count(n).map_err(err)?;
        check(tc == len && tc == expected, || {
            format!("n={n}: term_count {tc}, built {len}")
        })?;
    }
    Ok("2^(floor(n/2)+1) for n=2..14".into())
}

fn c12_fig1_scan() -> Outcome {
    let dir = tempfile::tempdir().map_err(err)?;
    let path = dir.path().join("scan.csv");
    let start = Instant::now();
    let mut sink = Vec::new();
    let code = cli::run(
        [
            "scalable-bell",
            "scan",
            "--n",
            "4",
            "--csv",
            path.to_str().unwrap(),
        ],
        &mut sink,
    );
    let took = start.elapsed();
    check(code == 0, || {
        format!("exit code {code}: {}", String::from_utf8_lossy(&sink))
    })?;
    check(took < Duration::from_secs(1), || format!("took {took:?}"))?;
    let mut reader = csv::Reader::from_path(&path).map_err(err)?;
    let headers = reader.headers().map_err(err)?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or(format!("no column {name}"))
    };
    let (i_tau, i_bell, i_flag) = (col("tau")?, col("bell_value")?, col("violation")?);
    let mut rows = 0;
    for rec in reader.records() {
        let rec = rec.map_err(err)?;
        let tau: f64 = rec[i_tau].parse().map_err(err)?;
        let bell: f64 = rec[i_bell].parse().map_err(err)?;
        let flag: bool = rec[i_flag].parse().map_err(err)?;
        check((bell - 2.0 * tau.sqrt()).abs() <= 1e-10, || {
            format!("row {rows}: {bell} vs tau {tau}")
        })?;
        if (tau - 0.25).abs() > 1e-9 {
            check(flag == (tau > 0.25), || {
                format!("row {rows}: flag {flag} at tau {tau}")
            })?;
        } else {
            check(!flag, || format!("row {rows}: flag set at tau = 1/4"))?;
        }
        rows += 1;
    }
    check(rows == 181, || format!("{rows} rows"))?;
    Ok(format!(
        "{rows} rows, bell = 2 sqrt(tau), violation iff tau > 1/4; {took:.2?}"
    ))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("1 LHV bound certification", c1_lhv_bound),
        ("2 GHZ violation table", c2_ghz_table),
        ("3 four-site x/y golden expansion", c3_golden_expansion),
        (
            "4 sign inconsistency and calibration",
            c4_sign_documentation,
        ),
        ("5 GGHZ scaling law", c5_gghz_scaling),
        ("6 violation thresholds", c6_thresholds),
        ("7 tangle relation", c7_tangle_relation),
        ("8 GHZ stabilizer", c8_stabilizer),
        ("9 extremal eigenvalue", c9_extremal_eigenvalue),
        ("10 two-path expectation", c10_two_path),
        ("11 term counts", c11_term_counts),
        ("12 four-site alpha scan CSV", c12_fig1_scan),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        match f() {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {name}: {why}");
            }
        }
    }
    println!("{} passed, {failed} failed", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
