//! Named verification suites: fast, self-contained identity checks runnable
//! from the command line. Each suite reports per-check deltas against its
//! tolerance; the full-scale versions live in the integration test suite.

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cycles::{certify, hadamard_winding_spec, synthesize_cycle};
use crate::error::{Error, Result};
use crate::functions::{builtin_singular_set, li2, series_hadamard, taylor_coeffs, FunctionDef};
use crate::hadamard::{
    class_equal_mod_entire, commutativity_defect, hadamard_at, hadamard_grid, jump,
    localized_product, pohlen_at, residue_zero_loop, ProductEvaluator, ProductOptions,
};
use crate::quadrature::circle_integral;
use crate::sets::{preset, Arc, LogPolarBox, StarSet};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub delta: f64,
    pub tol: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub pass: bool,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    fn new(suite: &str) -> SuiteReport {
        SuiteReport {
            suite: suite.to_string(),
            pass: true,
            checks: Vec::new(),
        }
    }

    fn push(&mut self, name: impl Into<String>, delta: f64, tol: f64) {
        let pass = delta < tol;
        self.pass &= pass;
        self.checks.push(Check {
            name: name.into(),
            pass,
            delta,
            tol,
        });
    }

    fn push_bool(&mut self, name: impl Into<String>, ok: bool) {
        self.pass &= ok;
        self.checks.push(Check {
            name: name.into(),
            pass: ok,
            delta: if ok { 0.0 } else { 1.0 },
            tol: 0.5,
        });
    }
}

/// All suite names accepted by `run_suite`.
pub const SUITES: &[&str] = &[
    "series-oracle",
    "dilog",
    "defect",
    "residue",
    "pohlen",
    "sets",
    "quadrature",
    "homology",
    "shared-cycle",
    "localized",
];

fn geometric(p: f64) -> Result<FunctionDef> {
    FunctionDef::from_text(
        &format!("1/(1-z/{p})"),
        preset(&format!("point({p}, 0.0)"))?,
        true,
    )
}

fn log1p_def() -> Result<FunctionDef> {
    FunctionDef::from_text("log1p(z)", builtin_singular_set("log1p")?, false)
}

fn li2_def() -> Result<FunctionDef> {
    FunctionDef::from_text("li2(z)", builtin_singular_set("li2")?, false)
}

pub fn run_suite(name: &str, seed: u64) -> Result<SuiteReport> {
    match name {
        "series-oracle" => series_oracle(),
        "dilog" => dilog(),
        "defect" => defect(),
        "residue" => residue(),
        "pohlen" => pohlen(),
        "sets" => sets_suite(seed),
        "quadrature" => quadrature_suite(),
        "homology" => homology(seed),
        "shared-cycle" => shared_cycle_suite(),
        "localized" => localized(),
        other => Err(Error::InvalidConfig(format!(
            "unknown suite `{other}`; known: {}",
            SUITES.join(", ")
        ))),
    }
}

fn series_oracle() -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("series-oracle");
    let f1 = geometric(2.0)?;
    let f2 = geometric(3.0)?;
    for &(r, t) in &[(0.5, 0.3), (1.0, 2.0), (3.0, 1.1), (0.5, 4.4)] {
        let z = Complex64::from_polar(r, t);
        let v = hadamard_at(&f1, &f2, z)?;
        let expect = 1.0 / (Complex64::new(1.0, 0.0) - z / 6.0);
        rep.push(format!("closed-form at |z|={r}"), (v - expect).norm(), 1e-8);
    }
    // truncated-series cross-check
    let a = taylor_coeffs(&f1, 1.0, 40)?;
    let b = taylor_coeffs(&f2, 1.0, 40)?;
    let ab = series_hadamard(&a, &b);
    let z = Complex64::new(0.5, 0.25);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut zp = Complex64::new(1.0, 0.0);
    for c in &ab {
        sum += c * zp;
        zp *= z;
    }
    let v = hadamard_at(&f1, &f2, z)?;
    rep.push("termwise series at z=0.5+0.25i", (v - sum).norm(), 1e-8);
    Ok(rep)
}

fn dilog() -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("dilog");
    let f = log1p_def()?;
    let li2f = li2_def()?;
    for z in [
        Complex64::new(0.5, 0.0),
        Complex64::new(-0.3, 0.4),
        Complex64::new(0.2, -0.5),
        Complex64::new(-1.8, 0.7),
    ] {
        let v = hadamard_at(&f, &f, z)?;
        let expect = li2(z);
        rep.push(format!("li2 value at {z}"), (v - expect).norm(), 1e-7);
    }
    let eval = ProductEvaluator::new(f.clone(), f.clone(), ProductOptions::default())?;
    let a = jump(&eval, 2.0, 1e-5)?;
    let b = jump(&li2f, 2.0, 1e-5)?;
    rep.push("jump at x=2", (a - b).norm(), 1e-6);
    Ok(rep)
}

fn defect() -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("defect");
    let f1 = FunctionDef::from_text("1/(z-2)", preset("point(2.0, 0.0)")?, true)?;
    let f2 = FunctionDef::from_text("exp(1/z)", preset("punctured_disk(0.5)")?, false)?;
    for &(r, t) in &[(1.5, 0.0), (1.4, 2.0), (2.5, 4.0)] {
        let z = Complex64::from_polar(r, t);
        let d = commutativity_defect(&f1, &f2, z)?;
        rep.push(
            format!("defect at {z}"),
            (d - Complex64::new(-0.5, 0.0)).norm(),
            1e-7,
        );
    }
    let f2v = FunctionDef::from_text("1/(1-2*z)", preset("point(0.5, 0.0)")?, true)?;
    let d = commutativity_defect(&f1, &f2v, Complex64::new(1.5, 0.0))?;
    rep.push("defect vanishes for vanishing f2", d.norm(), 1e-9);
    Ok(rep)
}

fn residue() -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("residue");
    let f1 = FunctionDef::from_text("1/(z-2)", preset("point(2.0, 0.0)")?, true)?;
    let f2 = FunctionDef::from_text("exp(1/z)", preset("punctured_disk(0.01)")?, false)?;
    let z = Complex64::new(1.0, 0.0);
    for &r in &[1e-2, 1e-3] {
        let v = residue_zero_loop(&f1, &f2, z, r)?;
        rep.push(
            format!("residue loop r={r}"),
            (v - Complex64::new(-0.5, 0.0)).norm(),
            1e-8,
        );
    }
    let f2v = geometric(3.0)?;
    let v = residue_zero_loop(&f1, &f2v, z, 1e-2)?;
    rep.push("residue vanishes with f2(inf)=0", v.norm(), 1e-8);
    Ok(rep)
}

fn pohlen() -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("pohlen");
    let f1 = geometric(2.0)?;
    let f2 = geometric(3.0)?;
    for &(r, t) in &[(1.0, 0.5), (0.4, 2.2), (2.0, 3.9)] {
        let z = Complex64::from_polar(r, t);
        let a = hadamard_at(&f1, &f2, z)?;
        let b = pohlen_at(&f1, &f2, z)?;
        rep.push(
            format!("pohlen equivalence at {z}"),
            (a - b).norm() / (1.0 + a.norm()),
            1e-8,
        );
    }
    let g1 = FunctionDef::from_text("1/(z-2)", preset("point(2.0, 0.0)")?, true)?;
    let g2 = FunctionDef::from_text("1/(z-3)", preset("point(3.0, 0.0)")?, true)?;
    let v = pohlen_at(&g1, &g2, Complex64::new(0.01, 0.0))?;
    rep.push(
        "continuity toward f1(0) f2(0)",
        (v - Complex64::new(1.0 / 6.0, 0.0)).norm(),
        1e-3,
    );
    Ok(rep)
}

fn sets_suite(seed: u64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("sets");
    let neg = preset(&format!("ray({}, 1.0)", std::f64::consts::PI))?;
    let prod = neg.product(&neg)?;
    rep.push_bool(
        "(-inf,-1]^2 = [1,+inf) at box level",
        prod.same_boxes(&preset("ray(0.0, 1.0)")?, 1e-12),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = preset("disk_complement(0.7)")?;
    let t = preset("disk_complement(1.3)")?;
    let p = s.product(&t)?;
    let mut worst: f64 = 0.0;
    for _ in 0..2000 {
        let z1 = Complex64::from_polar(
            0.7 * (1.0 + rng.gen_range(0.0..3.0f64)),
            rng.gen_range(0.0..std::f64::consts::TAU),
        );
        let z2 = Complex64::from_polar(
            1.3 * (1.0 + rng.gen_range(0.0..3.0f64)),
            rng.gen_range(0.0..std::f64::consts::TAU),
        );
        worst = worst.max(p.distance(z1 * z2));
    }
    rep.push("sampled product soundness", worst, 1e-9);
    rep.push_bool("properness of the ray", neg.is_proper());
    let all = StarSet::new(
        "all",
        vec![LogPolarBox::new(f64::NEG_INFINITY, f64::INFINITY, Arc::Full)],
    );
    rep.push_bool("full cylinder is improper", !all.is_proper());
    Ok(rep)
}

fn quadrature_suite() -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("quadrature");
    for k in -3i32..=3 {
        let g = move |z: Complex64| Ok(z.powi(k));
        let r = circle_integral(g, Complex64::new(0.0, 0.0), 1.0, 1, 1e-12)?;
        let expect = if k == -1 {
            Complex64::new(0.0, std::f64::consts::TAU)
        } else {
            Complex64::new(0.0, 0.0)
        };
        rep.push(format!("residue of z^{k}"), (r.value - expect).norm(), 1e-12);
    }
    let g = |z: Complex64| Ok(z.exp() / (z - Complex64::new(0.3, 0.0)));
    let r = circle_integral(g, Complex64::new(0.0, 0.0), 1.0, 1, 1e-12)?;
    let v = r.value / Complex64::new(0.0, std::f64::consts::TAU);
    rep.push(
        "Cauchy formula for exp(0.3)",
        (v - Complex64::new(0.3f64.exp(), 0.0)).norm(),
        1e-10,
    );
    Ok(rep)
}

/// Random strongly convolvable configurations with certified syntheses.
pub fn random_config(
    rng: &mut ChaCha8Rng,
) -> Result<Option<(StarSet, StarSet, Complex64)>> {
    let random_set = |rng: &mut ChaCha8Rng, tag: &str| -> StarSet {
        let mut boxes = Vec::new();
        let n = rng.gen_range(1..=2);
        for _ in 0..n {
            let kind = rng.gen_range(0..4);
            let rho = rng.gen_range(-1.2..1.2);
            let theta = rng.gen_range(0.0..std::f64::consts::TAU);
            let b = match kind {
                0 => LogPolarBox::new(rho, rho, Arc::point(theta)),
                1 => LogPolarBox::new(rho, rho + rng.gen_range(0.1..0.6), Arc::point(theta)),
                2 => LogPolarBox::new(
                    rho,
                    rho,
                    Arc::interval(theta, rng.gen_range(0.2..1.2)),
                ),
                _ => LogPolarBox::new(
                    rho,
                    rho + rng.gen_range(0.1..0.4),
                    Arc::interval(theta, rng.gen_range(0.2..0.9)),
                ),
            };
            boxes.push(b);
        }
        // occasionally reach toward infinity
        if rng.gen_bool(0.3) {
            let theta = rng.gen_range(0.0..std::f64::consts::TAU);
            boxes.push(LogPolarBox::new(
                rng.gen_range(0.5..1.5),
                f64::INFINITY,
                Arc::point(theta),
            ));
        }
        StarSet::new(tag, boxes)
    };
    let s1 = random_set(rng, "S1");
    let s2 = random_set(rng, "S2");
    if !crate::sets::strongly_convolvable(&s1, &s2) {
        return Ok(None);
    }
    let product = s1.product(&s2)?;
    for _ in 0..40 {
        let z = Complex64::from_polar(
            rng.gen_range(0.2..3.0),
            rng.gen_range(0.0..std::f64::consts::TAU),
        );
        if product.distance(z) < 0.3 {
            continue;
        }
        match hadamard_winding_spec(&s1, &s2, z) {
            Ok(spec) if spec.margin > 0.02 => return Ok(Some((s1, s2, z))),
            _ => continue,
        }
    }
    Ok(None)
}

fn homology(seed: u64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("homology");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut done = 0;
    let mut attempts = 0;
    while done < 8 && attempts < 400 {
        attempts += 1;
        let Some((s1, s2, z)) = random_config(&mut rng)? else {
            continue;
        };
        let spec = hadamard_winding_spec(&s1, &s2, z)?;
        let mut around = s1.clone();
        around
            .boxes
            .extend(s2.inverse().scale(z).boxes.iter().copied());
        let c1 = synthesize_cycle(&spec, &around, spec.margin * 0.8)?;
        rep.push_bool(format!("certification #{done}"), certify(&c1, &spec).ok);
        let c2 = synthesize_cycle(&spec, &around, spec.margin * 0.4)?;
        // two independent syntheses integrate test forms identically
        let a = rng.gen_range(0..s1.boxes.len());
        let b = &s1.boxes[a];
        let pole = Complex64::from_polar(
            (0.5 * (b.rho_lo.max(-3.0) + b.rho_hi.min(3.0))).exp(),
            match b.arc {
                Arc::Full => 0.1,
                Arc::Interval { lo, width } => lo + width / 2.0,
            },
        );
        let g = move |zeta: Complex64| Ok(zeta.powi(-1) / (zeta - pole));
        let i1 = crate::quadrature::integrate_cycle(g, &c1, 1e-11)?;
        let i2 = crate::quadrature::integrate_cycle(g, &c2, 1e-11)?;
        rep.push(
            format!("integral independence #{done}"),
            (i1.value - i2.value).norm(),
            1e-8,
        );
        done += 1;
    }
    rep.push_bool("enough random configurations", done == 8);
    Ok(rep)
}

fn shared_cycle_suite() -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("shared-cycle");
    let f1 = geometric(2.0)?;
    let f2 = geometric(3.0)?;
    let k = StarSet::new(
        "K",
        vec![LogPolarBox::new(0.4f64.ln(), 0.6f64.ln(), Arc::Full)],
    );
    let grid: Vec<Complex64> = (0..10)
        .map(|i| Complex64::from_polar(0.5, std::f64::consts::TAU * i as f64 / 10.0))
        .collect();
    let res = hadamard_grid(&f1, &f2, &k, &grid)?;
    let mut worst: f64 = 0.0;
    for (z, v) in res.points.iter().zip(res.values.iter()) {
        let direct = hadamard_at(&f1, &f2, *z)?;
        worst = worst.max((v - direct).norm() / (1.0 + direct.norm()));
    }
    rep.push("grid vs pointwise", worst, 1e-8);
    Ok(rep)
}

fn localized() -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("localized");
    let f = log1p_def()?;
    let u = StarSet::new(
        "U",
        vec![LogPolarBox::new(0.15f64.ln(), 3.0f64.ln(), Arc::Full)],
    );
    let v = preset("ray(0.0, 1.0)")?.thicken(0.2);
    let grid: Vec<Complex64> = (1..7)
        .map(|i| Complex64::from_polar(2.0, 0.7 + std::f64::consts::TAU * i as f64 / 8.0))
        .collect();
    let res = localized_product(&f, &f, &u, &v, &grid)?;
    let mut worst: f64 = 0.0;
    for (z, val) in res.points.iter().zip(res.values.iter()) {
        let direct = hadamard_at(&f, &f, *z)?;
        worst = worst.max((val - direct).norm());
    }
    rep.push("localized vs global", worst, 1e-8);
    let li2f = li2_def()?;
    let eval = ProductEvaluator::new(f.clone(), f.clone(), ProductOptions::default())?;
    rep.push_bool(
        "class equality with the dilogarithm",
        class_equal_mod_entire(&eval, &li2f, &builtin_singular_set("li2")?, 3)?,
    );
    Ok(rep)
}
