//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, TAU};

use hadamard_kit::cycles::{certify, hadamard_winding_spec, synthesize_cycle};
use hadamard_kit::functions::{
    builtin_singular_set, li2, series_hadamard, taylor_coeffs, FunctionDef,
};
use hadamard_kit::hadamard::{
    class_equal_mod_entire, commutativity_defect, hadamard_at, hadamard_grid, jump,
    localized_product, pohlen_at, residue_zero_loop, ProductEvaluator, ProductOptions,
};
use hadamard_kit::quadrature::{circle_integral, integrate_cycle};
use hadamard_kit::sets::{preset, Arc, LogPolarBox, StarSet};
use hadamard_kit::verify::random_config;

fn conclude(criterion: &str, failures: Vec<String>) {
    let ok = failures.is_empty();
    println!(
        "acceptance {criterion}: {}",
        if ok { "pass" } else { "FAIL" }
    );
    assert!(ok, "{criterion} failed:\n{}", failures.join("\n"));
}

fn geometric(p: f64) -> FunctionDef {
    FunctionDef::from_text(
        &format!("1/(1-z/{p})"),
        preset(&format!("point({p}, 0.0)")).unwrap(),
        true,
    )
    .unwrap()
}

fn rational(p: f64) -> FunctionDef {
    FunctionDef::from_text(
        &format!("1/(z-{p})"),
        preset(&format!("point({p}, 0.0)")).unwrap(),
        true,
    )
    .unwrap()
}

fn log1p_def() -> FunctionDef {
    FunctionDef::from_text("log1p(z)", builtin_singular_set("log1p").unwrap(), false).unwrap()
}

fn li2_def() -> FunctionDef {
    FunctionDef::from_text("li2(z)", builtin_singular_set("li2").unwrap(), false).unwrap()
}

#[test]
fn acceptance_01_geometric_series_oracle() {
    let f1 = geometric(2.0);
    let f2 = geometric(3.0);
    let mut failures = Vec::new();

    // 25 points over |z| in {0.5, 1, 3}, all off the product point {6}
    let mut points = Vec::new();
    for (count, r) in [(9usize, 0.5f64), (8, 1.0), (8, 3.0)] {
        for k in 0..count {
            points.push(Complex64::from_polar(r, 0.17 + TAU * k as f64 / count as f64));
        }
    }
    assert_eq!(points.len(), 25);
    for &z in &points {
        let v = hadamard_at(&f1, &f2, z).unwrap();
        let expect = 1.0 / (Complex64::new(1.0, 0.0) - z / 6.0);
        let err = (v - expect).norm();
        if err >= 1e-8 {
            failures.push(format!("closed form at {z}: error {err:.3e}"));
        }
    }

    // truncated-series cross-check: partial sums of the termwise product.
    // Coefficients are sampled on circles close to each singularity so that
    // high-order coefficient noise (which scales like r^-n) stays harmless
    // when the series is evaluated out at |z| = 3.
    let a = taylor_coeffs(&f1, 1.8, 60).unwrap();
    let b = taylor_coeffs(&f2, 2.8, 60).unwrap();
    let ab = series_hadamard(&a, &b);
    for &z in &points {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut zp = Complex64::new(1.0, 0.0);
        for c in &ab {
            sum += c * zp;
            zp *= z;
        }
        let v = hadamard_at(&f1, &f2, z).unwrap();
        let err = (v - sum).norm();
        if err >= 1e-8 {
            failures.push(format!("series check at {z}: error {err:.3e}"));
        }
    }
    conclude("01 geometric-series-oracle", failures);
}

#[test]
fn acceptance_02_dilogarithm_identity() {
    let f = log1p_def();
    let li2f = li2_def();
    let mut failures = Vec::new();

    // 20 points inside the unit disk
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut inside = Vec::new();
    while inside.len() < 20 {
        let z = Complex64::new(rng.gen_range(-0.9..0.9), rng.gen_range(-0.9..0.9));
        if z.norm() < 0.05 || z.norm() > 0.9 {
            continue;
        }
        inside.push(z);
    }
    // 10 points outside, off the cut [1, +inf)
    let outside: Vec<Complex64> = (0..10)
        .map(|k| Complex64::from_polar(1.6 + 0.3 * k as f64, 0.5 + TAU * k as f64 / 11.0))
        .collect();

    for &z in inside.iter().chain(outside.iter()) {
        let v = hadamard_at(&f, &f, z).unwrap();
        let expect = li2(z);
        let err = (v - expect).norm();
        if err >= 1e-7 {
            failures.push(format!("value at {z}: error {err:.3e}"));
        }
    }

    // class equality modulo entire functions on C*
    let eval = ProductEvaluator::new(f.clone(), f.clone(), ProductOptions::default()).unwrap();
    let s = builtin_singular_set("li2").unwrap();
    match class_equal_mod_entire(&eval, &li2f, &s, 4) {
        Ok(true) => {}
        Ok(false) => failures.push("class equality returned false".into()),
        Err(e) => failures.push(format!("class equality errored: {e}")),
    }

    // jumps across the cut
    for &x in &[1.5, 2.0, 4.0] {
        let eps = 1e-5;
        let a = jump(&eval, x, eps).unwrap();
        let b = jump(&li2f, x, eps).unwrap();
        let err = (a - b).norm();
        if err >= 1e-6 {
            failures.push(format!("jump at {x}: error {err:.3e}"));
        }
    }
    conclude("02 dilogarithm-identity", failures);
}

#[test]
fn acceptance_03_commutativity_defect() {
    let f1 = rational(2.0); // f1(0) = -1/2
    let f2 = FunctionDef::from_text("exp(1/z)", preset("punctured_disk(0.5)").unwrap(), false)
        .unwrap(); // f2(inf) = 1
    let mut failures = Vec::new();
    for k in 0..10 {
        let z = Complex64::from_polar(1.4 + 0.12 * k as f64, 0.3 + TAU * k as f64 / 10.0);
        let d = commutativity_defect(&f1, &f2, z).unwrap();
        let err = (d - Complex64::new(-0.5, 0.0)).norm();
        if err >= 1e-7 {
            failures.push(format!("defect at {z}: error {err:.3e}"));
        }
    }
    // vanishing value at infinity kills the defect
    let f2v = FunctionDef::from_text("1/(1-2*z)", preset("point(0.5, 0.0)").unwrap(), true)
        .unwrap();
    for &z in &[Complex64::new(1.5, 0.0), Complex64::new(-0.4, 1.2)] {
        let d = commutativity_defect(&f1, &f2v, z).unwrap();
        if d.norm() >= 1e-9 {
            failures.push(format!("nonzero defect {d} at {z} for vanishing f2"));
        }
    }
    conclude("03 commutativity-defect", failures);
}

#[test]
fn acceptance_04_residue_identity() {
    let mut failures = Vec::new();
    let z = Complex64::new(1.0, 0.0);
    // (f1, f2, f1(0) * f2(inf))
    let pairs = [
        (
            rational(2.0),
            FunctionDef::from_text("exp(1/z)", preset("punctured_disk(0.01)").unwrap(), false)
                .unwrap(),
            Complex64::new(-0.5, 0.0),
        ),
        (
            geometric(2.0),
            FunctionDef::from_text("exp(2/z)", preset("punctured_disk(0.01)").unwrap(), false)
                .unwrap(),
            Complex64::new(1.0, 0.0),
        ),
        (
            FunctionDef::from_text("3/(z-2)", preset("point(2.0, 0.0)").unwrap(), true).unwrap(),
            FunctionDef::from_text(
                "1 + exp(1/z)",
                preset("punctured_disk(0.01)").unwrap(),
                false,
            )
            .unwrap(),
            Complex64::new(-3.0, 0.0),
        ),
    ];
    for (i, (f1, f2, expect)) in pairs.iter().enumerate() {
        for &r in &[1e-2, 1e-3] {
            let v = residue_zero_loop(f1, f2, z, r).unwrap();
            let err = (v - expect).norm();
            if err >= 1e-8 {
                failures.push(format!("pair {i}, r = {r}: error {err:.3e}"));
            }
        }
    }
    // f2 vanishing at infinity gives 0
    let f1 = rational(2.0);
    let f2 = geometric(3.0);
    let v = residue_zero_loop(&f1, &f2, z, 1e-2).unwrap();
    if v.norm() >= 1e-8 {
        failures.push(format!("vanishing case: got {v}"));
    }
    conclude("04 residue-identity", failures);
}

#[test]
fn acceptance_05_pohlen_equivalence() {
    let mut failures = Vec::new();
    let pairs = [
        (geometric(2.0), geometric(3.0)),
        (rational(2.0), rational(3.0)),
        (
            FunctionDef::from_text("1/(z-2)^2", preset("point(2.0, 0.0)").unwrap(), true)
                .unwrap(),
            geometric(4.0),
        ),
    ];
    for (i, (f1, f2)) in pairs.iter().enumerate() {
        for k in 0..20 {
            let z = Complex64::from_polar(0.3 + 0.17 * k as f64, 0.21 + TAU * k as f64 / 20.0);
            let a = hadamard_at(f1, f2, z).unwrap();
            let b = pohlen_at(f1, f2, z).unwrap();
            let err = (a - b).norm();
            if err >= 1e-8 {
                failures.push(format!("pair {i} at {z}: |pohlen - hadamard| = {err:.3e}"));
            }
        }
    }
    // continuity probe toward f1(0) f2(0)
    let f1 = rational(2.0);
    let f2 = rational(3.0);
    let v = pohlen_at(&f1, &f2, Complex64::new(0.01, 0.0)).unwrap();
    let expect = Complex64::new(1.0 / 6.0, 0.0);
    let err = (v - expect).norm();
    if err >= 1e-3 {
        failures.push(format!("continuity probe: error {err:.3e}"));
    }
    conclude("05 pohlen-equivalence", failures);
}

#[test]
fn acceptance_06_homology_certification() {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(45);
    let mut done = 0;
    let mut attempts = 0;
    while done < 50 && attempts < 4000 {
        attempts += 1;
        let Some((s1, s2, z)) = random_config(&mut rng).unwrap() else {
            continue;
        };
        let spec = match hadamard_winding_spec(&s1, &s2, z) {
            Ok(s) => s,
            Err(_) => continue,
        };
        let mut around = s1.clone();
        around
            .boxes
            .extend(s2.inverse().scale(z).boxes.iter().copied());
        let c1 = match synthesize_cycle(&spec, &around, spec.margin * 0.8) {
            Ok(c) => c,
            Err(e) => {
                failures.push(format!("synthesis failed (config {done}): {e}"));
                done += 1;
                continue;
            }
        };
        let report = certify(&c1, &spec);
        if !report.ok {
            failures.push(format!(
                "config {done}: certification violated at {:?}",
                report.violations.first()
            ));
        }
        if report.probes_checked < 64 {
            failures.push(format!(
                "config {done}: only {} probes checked",
                report.probes_checked
            ));
        }
        let c2 = match synthesize_cycle(&spec, &around, spec.margin * 0.4) {
            Ok(c) => c,
            Err(e) => {
                failures.push(format!("re-synthesis failed (config {done}): {e}"));
                done += 1;
                continue;
            }
        };
        // five test integrands: zeta^k/(zeta - a), a in the first box of S1
        let b = &s1.boxes[0];
        let a_pt = Complex64::from_polar(
            (0.5 * (b.rho_lo.max(-3.0) + b.rho_hi.min(3.0))).exp(),
            match b.arc {
                Arc::Full => 0.3,
                Arc::Interval { lo, width } => lo + width / 2.0,
            },
        );
        for k in -2i32..=2 {
            let g = move |zeta: Complex64| Ok(zeta.powi(k) / (zeta - a_pt));
            let i1 = integrate_cycle(g, &c1, 1e-11).unwrap();
            let i2 = integrate_cycle(g, &c2, 1e-11).unwrap();
            let err = (i1.value - i2.value).norm() / (1.0 + i1.value.norm());
            if err >= 1e-8 {
                failures.push(format!(
                    "config {done}, k = {k}: integral mismatch {err:.3e}"
                ));
            }
        }
        done += 1;
    }
    if done < 50 {
        failures.push(format!("only {done} random configurations reached"));
    }
    conclude("06 homology-certification", failures);
}

#[test]
fn acceptance_07_shared_cycle_lemma() {
    let mut failures = Vec::new();
    let pairs = [
        (geometric(2.0), geometric(3.0)),
        (log1p_def(), log1p_def()),
        (geometric(2.0), log1p_def()),
    ];
    for (i, (f1, f2)) in pairs.iter().enumerate() {
        let k = StarSet::new(
            "K",
            vec![LogPolarBox::new(0.4f64.ln(), 0.6f64.ln(), Arc::Full)],
        );
        let grid: Vec<Complex64> = (0..20)
            .map(|j| Complex64::from_polar(0.4 + 0.2 * (j as f64 / 19.0), 0.11 + TAU * j as f64 / 20.0))
            .collect();
        let res = hadamard_grid(f1, f2, &k, &grid).unwrap();
        for (z, v) in res.points.iter().zip(res.values.iter()) {
            let direct = hadamard_at(f1, f2, *z).unwrap();
            let err = (v - direct).norm() / (1.0 + direct.norm());
            if err >= 1e-8 {
                failures.push(format!("pair {i} at {z}: deviation {err:.3e}"));
            }
        }
    }
    conclude("07 shared-cycle-lemma", failures);
}

#[test]
fn acceptance_08_set_calculus() {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(808);

    // exact box-level identity
    let neg = preset(&format!("ray({PI}, 1.0)")).unwrap();
    let prod = neg.product(&neg).unwrap();
    if !prod.same_boxes(&preset("ray(0.0, 1.0)").unwrap(), 1e-12) {
        failures.push("(-inf,-1]^2 is not [1,+inf) at box level".into());
    }

    // sampling soundness of product / inverse / scale at 10^4 each
    let sample_in = |s: &StarSet, rng: &mut ChaCha8Rng| -> Complex64 {
        let b = &s.boxes[rng.gen_range(0..s.boxes.len())];
        let lo = if b.reaches_zero() { b.rho_hi - 3.0 } else { b.rho_lo };
        let hi = if b.reaches_inf() { b.rho_lo + 3.0 } else { b.rho_hi };
        let rho = rng.gen_range(lo..=hi);
        let theta = match b.arc {
            Arc::Full => rng.gen_range(0.0..TAU),
            Arc::Interval { lo, width } => lo + rng.gen_range(0.0..=1.0) * width,
        };
        Complex64::from_polar(rho.exp(), theta)
    };
    let s1 = StarSet::new(
        "A",
        vec![
            LogPolarBox::new(f64::NEG_INFINITY, -0.3, Arc::interval(2.2, 0.8)),
            LogPolarBox::new(0.1, 0.9, Arc::point(0.4)),
        ],
    );
    let s2 = StarSet::new(
        "B",
        vec![
            LogPolarBox::new(-0.5, 0.5, Arc::interval(5.0, 0.4)),
            LogPolarBox::new(0.0, 0.0, Arc::Full),
        ],
    );
    let p = s1.product(&s2).unwrap();
    for _ in 0..10_000 {
        let z1 = sample_in(&s1, &mut rng);
        let z2 = sample_in(&s2, &mut rng);
        if !p.contains(z1 * z2, 1e-9) {
            failures.push(format!("product misses {z1} * {z2}"));
            break;
        }
    }
    let inv = s1.inverse();
    for _ in 0..10_000 {
        let z = sample_in(&s1, &mut rng);
        if !inv.contains(1.0 / z, 1e-9) {
            failures.push(format!("inverse misses 1/{z}"));
            break;
        }
    }
    let w = Complex64::new(-0.7, 1.3);
    let scaled = s2.scale(w);
    for _ in 0..10_000 {
        let z = sample_in(&s2, &mut rng);
        if !scaled.contains(w * z, 1e-9) {
            failures.push(format!("scale misses {w} * {z}"));
            break;
        }
    }

    // properness sweep against a 1000 x 1000 rasterization on 20 random sets
    for cfg in 0..20 {
        let mut boxes = Vec::new();
        for _ in 0..rng.gen_range(1..=3) {
            let lo = rng.gen_range(-1.5..1.0);
            let hi = lo + rng.gen_range(0.0..1.5);
            let arc = if rng.gen_bool(0.3) {
                Arc::Full
            } else {
                Arc::interval(rng.gen_range(0.0..TAU), rng.gen_range(0.3..5.8))
            };
            let lo = if rng.gen_bool(0.2) { f64::NEG_INFINITY } else { lo };
            let hi = if rng.gen_bool(0.2) { f64::INFINITY } else { hi };
            boxes.push(LogPolarBox::new(lo, hi, arc));
        }
        let s = StarSet::new(format!("cfg{cfg}"), boxes);
        let exact = s.is_proper();
        let raster = raster_proper(&s, 1000);
        if exact != raster {
            failures.push(format!(
                "config {cfg}: sweep says proper={exact}, raster says {raster}"
            ));
        }
    }
    conclude("08 set-calculus", failures);
}

fn raster_proper(s: &StarSet, n: usize) -> bool {
    let bounds = s.finite_rho_bounds();
    let (lo, hi) = if bounds.is_empty() {
        (-1.0, 1.0)
    } else {
        (
            bounds.iter().cloned().fold(f64::INFINITY, f64::min) - 1.0,
            bounds.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 1.0,
        )
    };
    for i in 0..n {
        let rho = lo + (hi - lo) * (i as f64 + 0.5) / n as f64;
        let mut covered = true;
        for j in 0..n {
            let theta = TAU * (j as f64 + 0.5) / n as f64;
            if s.distance_cyl(rho, theta) > 0.0 {
                covered = false;
                break;
            }
        }
        if !covered {
            return true;
        }
    }
    false
}

#[test]
fn acceptance_09_quadrature_battery() {
    let mut failures = Vec::new();
    for &radius in &[0.1, 1.0, 10.0] {
        for k in -3i32..=3 {
            let g = move |z: Complex64| Ok(z.powi(k));
            let r = circle_integral(g, Complex64::new(0.0, 0.0), radius, 1, 1e-12).unwrap();
            let expect = if k == -1 {
                Complex64::new(0.0, TAU)
            } else {
                Complex64::new(0.0, 0.0)
            };
            // roundoff scale grows with the magnitude of the integrand
            let scale = 1.0 + radius.powi((k + 1).max(1));
            let err = (r.value - expect).norm();
            if err >= 1e-12 * scale {
                failures.push(format!("residue z^{k} at r = {radius}: error {err:.3e}"));
            }
        }
    }
    let g = |z: Complex64| Ok(z.exp() / (z - Complex64::new(0.3, 0.0)));
    let r = circle_integral(g, Complex64::new(0.0, 0.0), 1.0, 1, 1e-12).unwrap();
    let v = r.value / Complex64::new(0.0, TAU);
    let err = (v - Complex64::new(0.3f64.exp(), 0.0)).norm();
    if err >= 1e-10 {
        failures.push(format!("Cauchy formula: error {err:.3e}"));
    }
    conclude("09 quadrature-battery", failures);
}

#[test]
fn acceptance_10_localized_computation() {
    let f = log1p_def();
    let mut failures = Vec::new();
    let windows = [
        (
            StarSet::new(
                "U1",
                vec![LogPolarBox::new(0.15f64.ln(), 3.0f64.ln(), Arc::Full)],
            ),
            preset("ray(0.0, 1.0)").unwrap().thicken(0.2),
        ),
        (
            StarSet::new(
                "U2",
                vec![LogPolarBox::new(0.3f64.ln(), 5.0f64.ln(), Arc::Full)],
            ),
            preset("ray(0.0, 1.0)").unwrap().thicken(0.35),
        ),
    ];
    // overlap grid on |z| = 2, angles clear of both V windows
    let grid: Vec<Complex64> = (0..8)
        .map(|k| Complex64::from_polar(2.0, 0.6 + (TAU - 1.2) * k as f64 / 8.0))
        .collect();
    let mut results = Vec::new();
    for (u, v) in &windows {
        let res = localized_product(&f, &f, u, v, &grid).unwrap();
        for (z, val) in res.points.iter().zip(res.values.iter()) {
            let direct = hadamard_at(&f, &f, *z).unwrap();
            let err = (val - direct).norm();
            if err >= 1e-8 {
                failures.push(format!("{} at {z}: vs global {err:.3e}", u.label));
            }
        }
        results.push(res);
    }
    for (a, b) in results[0].values.iter().zip(results[1].values.iter()) {
        let err = (a - b).norm();
        if err >= 1e-8 {
            failures.push(format!("windows disagree by {err:.3e}"));
        }
    }
    conclude("10 localized-computation", failures);
}
