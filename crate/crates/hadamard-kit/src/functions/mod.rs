//! Holomorphic functions with declared singular sets.
//!
//! An expression AST paired with a `StarSet` declares where the function may
//! be singular; evaluation guards against the declared set and against the
//! principal cuts of `log` / `log1p` / `li2` nodes. Cauchy coefficients on
//! circles provide the classical power-series oracle.

mod dilog;
mod parser;

pub use dilog::li2;
pub use parser::parse_expr;

use std::fmt;

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sets::{preset, StarSet};

/// Distance from a branch cut below which evaluation refuses to pick a side.
pub const BRANCH_TOL: f64 = 1e-13;

/// Distance from the declared singular set below which evaluation refuses.
pub const SINGULAR_TOL: f64 = 1e-12;

/// Expression tree over the variable z.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(Complex64),
    Var,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    PowInt(Box<Expr>, i32),
    Exp(Box<Expr>),
    /// Principal logarithm, cut along (-inf, 0].
    LogP(Box<Expr>),
    /// Principal log(1 + w), cut along (-inf, -1].
    Log1p(Box<Expr>),
    /// Principal dilogarithm, cut along [1, +inf).
    Li2(Box<Expr>),
    /// Truncated Laurent polynomial: the sum of `coeffs[j] * z^(n_min + j)`.
    Laurent { coeffs: Vec<Complex64>, n_min: i32 },
}

/// Constant-fold `e` into `a + b*z` when it is affine in z.
pub(crate) fn affine_parts(e: &Expr) -> Option<(Complex64, Complex64)> {
    let zero = Complex64::new(0.0, 0.0);
    match e {
        Expr::Const(c) => Some((*c, zero)),
        Expr::Var => Some((zero, Complex64::new(1.0, 0.0))),
        Expr::Add(x, y) => {
            let (ax, bx) = affine_parts(x)?;
            let (ay, by) = affine_parts(y)?;
            Some((ax + ay, bx + by))
        }
        Expr::Sub(x, y) => {
            let (ax, bx) = affine_parts(x)?;
            let (ay, by) = affine_parts(y)?;
            Some((ax - ay, bx - by))
        }
        Expr::Neg(x) => {
            let (a, b) = affine_parts(x)?;
            Some((-a, -b))
        }
        Expr::Mul(x, y) => {
            let (ax, bx) = affine_parts(x)?;
            let (ay, by) = affine_parts(y)?;
            if bx == zero {
                Some((ax * ay, ax * by))
            } else if by == zero {
                Some((ax * ay, bx * ay))
            } else {
                None
            }
        }
        Expr::Div(x, y) => {
            let (ax, bx) = affine_parts(x)?;
            let (ay, by) = affine_parts(y)?;
            if by == zero && ay != zero {
                Some((ax / ay, bx / ay))
            } else {
                None
            }
        }
        _ => None,
    }
}

fn fmt_complex(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.re == 0.0 {
        format!("{}i", c.im)
    } else if c.im < 0.0 {
        format!("({}-{}i)", c.re, -c.im)
    } else {
        format!("({}+{}i)", c.re, c.im)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{}", fmt_complex(*c)),
            Expr::Var => write!(f, "z"),
            Expr::Add(a, b) => write!(f, "({} + {})", a, b),
            Expr::Sub(a, b) => write!(f, "({} - {})", a, b),
            Expr::Mul(a, b) => write!(f, "({} * {})", a, b),
            Expr::Div(a, b) => write!(f, "({} / {})", a, b),
            Expr::Neg(a) => write!(f, "(-{})", a),
            Expr::PowInt(a, k) => write!(f, "({})^{}", a, k),
            Expr::Exp(a) => write!(f, "exp({})", a),
            Expr::LogP(a) => write!(f, "log({})", a),
            Expr::Log1p(a) => write!(f, "log1p({})", a),
            Expr::Li2(a) => write!(f, "li2({})", a),
            Expr::Laurent { coeffs, n_min } => {
                write!(f, "laurent([")?;
                for (i, c) in coeffs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{}", fmt_complex(*c))?;
                }
                write!(f, "], {})", n_min)
            }
        }
    }
}

fn dist_to_ray_left(w: Complex64, endpoint: f64) -> f64 {
    // distance to the horizontal cut (-inf, endpoint]
    if w.re <= endpoint {
        w.im.abs()
    } else {
        (w - Complex64::new(endpoint, 0.0)).norm()
    }
}

fn dist_to_ray_right(w: Complex64, endpoint: f64) -> f64 {
    // distance to the horizontal cut [endpoint, +inf)
    if w.re >= endpoint {
        w.im.abs()
    } else {
        (w - Complex64::new(endpoint, 0.0)).norm()
    }
}

/// Evaluate an expression at z. Branch-cut guards use [`BRANCH_TOL`].
pub fn eval_expr(e: &Expr, z: Complex64) -> Result<Complex64> {
    match e {
        Expr::Const(c) => Ok(*c),
        Expr::Var => Ok(z),
        Expr::Add(a, b) => Ok(eval_expr(a, z)? + eval_expr(b, z)?),
        Expr::Sub(a, b) => Ok(eval_expr(a, z)? - eval_expr(b, z)?),
        Expr::Mul(a, b) => Ok(eval_expr(a, z)? * eval_expr(b, z)?),
        Expr::Div(a, b) => {
            let den = eval_expr(b, z)?;
            if den.norm() < 1e-300 {
                return Err(Error::SingularPoint(z));
            }
            Ok(eval_expr(a, z)? / den)
        }
        Expr::Neg(a) => Ok(-eval_expr(a, z)?),
        Expr::PowInt(a, k) => {
            let base = eval_expr(a, z)?;
            if *k < 0 && base.norm() < 1e-300 {
                return Err(Error::SingularPoint(z));
            }
            Ok(base.powi(*k))
        }
        Expr::Exp(a) => Ok(eval_expr(a, z)?.exp()),
        Expr::LogP(a) => {
            let w = eval_expr(a, z)?;
            if dist_to_ray_left(w, 0.0) <= BRANCH_TOL {
                return Err(Error::BranchCut(z));
            }
            Ok(w.ln())
        }
        Expr::Log1p(a) => {
            let w = eval_expr(a, z)?;
            if dist_to_ray_left(w, -1.0) <= BRANCH_TOL {
                return Err(Error::BranchCut(z));
            }
            Ok((Complex64::new(1.0, 0.0) + w).ln())
        }
        Expr::Li2(a) => {
            let w = eval_expr(a, z)?;
            if dist_to_ray_right(w, 1.0) <= BRANCH_TOL {
                return Err(Error::BranchCut(z));
            }
            Ok(li2(w))
        }
        Expr::Laurent { coeffs, n_min } => {
            if *n_min < 0 && z.norm() < 1e-300 {
                return Err(Error::SingularPoint(z));
            }
            let mut sum = Complex64::new(0.0, 0.0);
            let mut zp = z.powi(*n_min);
            for c in coeffs {
                sum += c * zp;
                zp *= z;
            }
            Ok(sum)
        }
    }
}

/// A holomorphic function on C* minus its declared singular set.
#[derive(Debug, Clone)]
pub struct FunctionDef {
    pub expr: Expr,
    pub singular: StarSet,
    pub vanishes_at_inf: bool,
    name: String,
}

impl FunctionDef {
    /// Build and validate: a randomized smoke test checks that evaluation
    /// succeeds away from the declared set, and the vanishing flag is
    /// verified against the actual limit whenever inf is off the closure.
    pub fn new(expr: Expr, singular: StarSet, vanishes_at_inf: bool) -> Result<FunctionDef> {
        let name = format!("{expr}");
        let f = FunctionDef {
            expr,
            singular,
            vanishes_at_inf,
            name,
        };
        f.smoke_test()?;
        if f.vanishes_at_inf && !f.singular.closure_has_inf() {
            let v = f.value_at_infinity()?;
            if v.norm() > 1e-6 {
                return Err(Error::VanishingAtInfinityViolated(f.name));
            }
        }
        Ok(f)
    }

    pub fn from_text(expr: &str, singular: StarSet, vanishes_at_inf: bool) -> Result<FunctionDef> {
        FunctionDef::new(parse_expr(expr)?, singular, vanishes_at_inf)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    fn smoke_test(&self) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut tried = 0;
        let mut attempts = 0;
        while tried < 48 && attempts < 4000 {
            attempts += 1;
            let rho: f64 = rng.gen_range(-2.5..2.5);
            let theta = rng.gen_range(0.0..std::f64::consts::TAU);
            let z = Complex64::from_polar(rho.exp(), theta);
            if self.singular.distance(z) <= 0.05 {
                continue;
            }
            tried += 1;
            self.eval(z).map_err(|e| {
                Error::RejectedExpression(format!(
                    "`{}` fails at {} away from its declared singular set: {}",
                    self.name, z, e
                ))
            })?;
        }
        Ok(())
    }

    /// Evaluate at z, guarding the declared singular set within [`SINGULAR_TOL`].
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        self.eval_with_tol(z, SINGULAR_TOL)
    }

    pub fn eval_with_tol(&self, z: Complex64, tol: f64) -> Result<Complex64> {
        if z.norm() == 0.0 {
            return Err(Error::SingularPoint(z));
        }
        if self.singular.contains(z, tol) {
            return Err(Error::SingularPoint(z));
        }
        eval_expr(&self.expr, z)
    }

    /// Limit at infinity by Richardson extrapolation over |z| = 1e4, 1e5, 1e6.
    pub fn value_at_infinity(&self) -> Result<Complex64> {
        if self.singular.closure_has_inf() {
            return Err(Error::InfinityInSingularSet);
        }
        let radii = [1e4, 1e5, 1e6];
        'dirs: for &angle in &[0.5375, 1.234, 2.741, 4.006, 5.41] {
            let mut vals = [Complex64::new(0.0, 0.0); 3];
            for (i, &r) in radii.iter().enumerate() {
                match self.eval(Complex64::from_polar(r, angle)) {
                    Ok(v) => vals[i] = v,
                    Err(_) => continue 'dirs,
                }
            }
            // v(R) = L + a/R + b/R^2 + ...: eliminate 1/R pairwise, then 1/R^2
            let l1 = (10.0 * vals[1] - vals[0]) / 9.0;
            let l2 = (10.0 * vals[2] - vals[1]) / 9.0;
            let l = (100.0 * l2 - l1) / 99.0;
            let diff = (l2 - l).norm();
            if diff < 1e-8 * (1.0 + l.norm()) {
                return Ok(l);
            }
            return Err(Error::NoLimit(diff));
        }
        Err(Error::NoLimit(f64::INFINITY))
    }
}

/// Taylor coefficients a_0..a_n of f on |z| = r by the trapezoid rule,
/// doubling the node count until two passes agree below 1e-12.
pub fn taylor_coeffs(f: &FunctionDef, r: f64, n: usize) -> Result<Vec<Complex64>> {
    assert!(r > 0.0);
    // the closed disk of radius r must avoid the declared singular set
    for b in &f.singular.boxes {
        if b.rho_lo < r.ln() + 1e-9 {
            return Err(Error::CircleMeetsSingularSet(r));
        }
    }
    let mut m = 8 * (n + 1);
    let mut m_pow = 64usize;
    while m_pow < m {
        m_pow *= 2;
    }
    m = m_pow;

    let mut prev: Option<Vec<Complex64>> = None;
    loop {
        let coeffs = trapezoid_coeffs(f, r, n, m)?;
        if let Some(p) = &prev {
            let diff = coeffs
                .iter()
                .zip(p.iter())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            if diff < 1e-12 {
                return Ok(coeffs);
            }
        }
        prev = Some(coeffs);
        m *= 2;
        if m > (1 << 20) {
            return Err(Error::ToleranceNotMet(f64::NAN));
        }
    }
}

fn trapezoid_coeffs(f: &FunctionDef, r: f64, n: usize, m: usize) -> Result<Vec<Complex64>> {
    let mut values = Vec::with_capacity(m);
    for j in 0..m {
        let theta = std::f64::consts::TAU * j as f64 / m as f64;
        values.push(f.eval(Complex64::from_polar(r, theta))?);
    }
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut sum = Complex64::new(0.0, 0.0);
        for (j, v) in values.iter().enumerate() {
            let theta = std::f64::consts::TAU * j as f64 / m as f64;
            sum += v * Complex64::from_polar(1.0, -(k as f64) * theta);
        }
        out.push(sum / (m as f64 * r.powi(k as i32)));
    }
    Ok(out)
}

/// Coefficient-wise product, padding the shorter list with zeros.
pub fn series_hadamard(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let n = a.len().max(b.len());
    let zero = Complex64::new(0.0, 0.0);
    (0..n)
        .map(|i| a.get(i).copied().unwrap_or(zero) * b.get(i).copied().unwrap_or(zero))
        .collect()
}

/// Singular sets of the builtin functions.
pub fn builtin_singular_set(func_name: &str) -> Result<StarSet> {
    match func_name {
        "log1p" => preset(&format!("ray({}, 1.0)", std::f64::consts::PI)),
        "li2" => preset("ray(0.0, 1.0)"),
        "log" => Ok(StarSet::new(
            "cut(-inf,0]",
            vec![crate::sets::LogPolarBox::new(
                f64::NEG_INFINITY,
                f64::INFINITY,
                crate::sets::Arc::point(std::f64::consts::PI),
            )],
        )),
        "exp" => Ok(StarSet::empty("empty")),
        other => Err(Error::UnknownBuiltin(other.to_string())),
    }
}
