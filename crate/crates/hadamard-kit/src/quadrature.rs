//! Adaptive contour integration along polygonal cycles.
//!
//! Each straight segment is integrated with a 7/15 Gauss-Kronrod pair and
//! bisected recursively until the panel estimate drops below the share of
//! the global tolerance proportional to the panel length.

use num_complex::Complex64;

use crate::cycles::Cycle;
use crate::error::{Error, Result};

/// 15-point Kronrod nodes (positive half; symmetric).
const XK: [f64; 8] = [
    0.000000000000000000000000000000000,
    0.207784955007898467600689403773245,
    0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,
    0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,
    0.949107912342758524526189684047851,
    0.991455371120812639206854697526329,
];

/// Kronrod weights matching `XK`.
const WK: [f64; 8] = [
    0.209482141084727828012999174891714,
    0.204432940075298892414161999234649,
    0.190350578064785409913256402421014,
    0.169004726639267902826583426598550,
    0.140653259715525918745189590510238,
    0.104790010322250183839876322541518,
    0.063092092629978553290700663189204,
    0.022935322010529224963732008058970,
];

/// 7-point Gauss weights for the nodes XK[0], XK[2], XK[4], XK[6].
const WG: [f64; 4] = [
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082,
];

/// Result of a contour integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: Complex64,
    pub error_estimate: f64,
    pub evaluations: u64,
}

/// Knobs for the adaptive scheme.
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub tol: f64,
    pub max_depth: u32,
    /// When false, panels that hit the depth limit are accepted and their
    /// estimate accumulated instead of raising `ToleranceNotMet`.
    pub fail_on_tolerance: bool,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            tol: 1e-10,
            max_depth: 24,
            fail_on_tolerance: true,
        }
    }
}

struct Accum {
    value: Complex64,
    error: f64,
    evals: u64,
}

fn gk15<F>(g: &F, a: Complex64, b: Complex64, acc: &mut Accum) -> Result<(Complex64, f64, f64)>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |t: f64, acc: &mut Accum| -> Result<Complex64> {
        let zeta = mid + half * t;
        acc.evals += 1;
        g(zeta).map_err(|e| match e {
            Error::IntegrandFailure { .. } => e,
            other => Error::IntegrandFailure {
                at: zeta,
                source: Box::new(other),
            },
        })
    };

    let f0 = eval(0.0, acc)?;
    let mut kronrod = WK[0] * f0;
    let mut gauss = WG[0] * f0;
    let mut resabs = WK[0] * f0.norm();
    for i in 1..8 {
        let fp = eval(XK[i], acc)?;
        let fm = eval(-XK[i], acc)?;
        let pair = fp + fm;
        kronrod += WK[i] * pair;
        resabs += WK[i] * (fp.norm() + fm.norm());
        if i % 2 == 0 {
            gauss += WG[i / 2] * pair;
        }
    }
    let value = half * kronrod;
    let err = (half * (kronrod - gauss)).norm();
    Ok((value, err, half.norm() * resabs))
}

fn panel<F>(
    g: &F,
    a: Complex64,
    b: Complex64,
    total_len: f64,
    depth: u32,
    opts: &QuadOptions,
    acc: &mut Accum,
) -> Result<()>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let (value, err, resabs) = gk15(g, a, b, acc)?;
    let len = (b - a).norm();
    // Length-proportional share of the tolerance, floored at roundoff level.
    // Deep panels (which cluster near integrable singularities and stay few
    // per level) get a depth-scaled allowance so their budgets do not shrink
    // faster than Gauss-Kronrod converges on log-type integrands.
    let mut budget = (opts.tol * len / total_len).max(100.0 * f64::EPSILON * resabs);
    if depth >= 8 {
        budget = budget.max(opts.tol / 2f64.powi(depth as i32));
    }
    if err <= budget || len < 1e-300 {
        acc.value += value;
        acc.error += err;
        return Ok(());
    }
    if depth >= opts.max_depth {
        if opts.fail_on_tolerance {
            return Err(Error::ToleranceNotMet(err));
        }
        acc.value += value;
        acc.error += err;
        return Ok(());
    }
    let mid = 0.5 * (a + b);
    panel(g, a, mid, total_len, depth + 1, opts, acc)?;
    panel(g, mid, b, total_len, depth + 1, opts, acc)
}

/// Integrate `g` along the cycle with the default panel scheme.
pub fn integrate_cycle<F>(g: F, c: &Cycle, tol: f64) -> Result<QuadResult>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    integrate_cycle_with(
        g,
        c,
        &QuadOptions {
            tol,
            ..QuadOptions::default()
        },
    )
}

/// Integrate `g` along the cycle: the sum over paths of multiplicity times
/// the sum of per-segment panel integrals.
pub fn integrate_cycle_with<F>(g: F, c: &Cycle, opts: &QuadOptions) -> Result<QuadResult>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let total_len: f64 = c
        .terms
        .iter()
        .map(|(p, _)| p.segments().map(|(a, b)| (b - a).norm()).sum::<f64>())
        .sum();
    let mut acc = Accum {
        value: Complex64::new(0.0, 0.0),
        error: 0.0,
        evals: 0,
    };
    if total_len == 0.0 {
        return Ok(QuadResult {
            value: acc.value,
            error_estimate: 0.0,
            evaluations: 0,
        });
    }
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    for (path, mult) in &c.terms {
        let mut path_acc = Accum {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            evals: acc.evals,
        };
        for (a, b) in path.segments() {
            panel(&g, a, b, total_len, 0, opts, &mut path_acc)?;
        }
        value += (*mult as f64) * path_acc.value;
        error += (*mult as f64).abs() * path_acc.error;
        acc.evals = path_acc.evals;
    }
    Ok(QuadResult {
        value,
        error_estimate: error,
        evaluations: acc.evals,
    })
}

/// Integral over a positively or negatively oriented circle, discretized at
/// the cycle module's default arc step.
pub fn circle_integral<F>(
    g: F,
    center: Complex64,
    radius: f64,
    orientation: i32,
    tol: f64,
) -> Result<QuadResult>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    assert!(radius > 0.0);
    assert!(orientation == 1 || orientation == -1);
    let c = Cycle::circle(center, radius, orientation as i64, 128);
    integrate_cycle(g, &c, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycles::{Cycle, Path};
    use std::f64::consts::TAU;

    fn unit_circle() -> Cycle {
        Cycle::circle(Complex64::new(0.0, 0.0), 1.0, 1, 128)
    }

    #[test]
    fn residue_of_one_over_zeta() {
        let r = integrate_cycle(|z| Ok(1.0 / z), &unit_circle(), 1e-12).unwrap();
        let expect = Complex64::new(0.0, TAU);
        assert!((r.value - expect).norm() < 1e-12, "{}", r.value);
    }

    #[test]
    fn exact_forms_integrate_to_zero() {
        let square = Path::new(vec![
            Complex64::new(1.0, -1.0),
            Complex64::new(1.0, 1.0),
            Complex64::new(-1.0, 1.0),
            Complex64::new(-1.0, -1.0),
        ])
        .unwrap();
        let c = Cycle::from_paths(vec![(square, 1)]);
        let r = integrate_cycle(|z| Ok(z * z), &c, 1e-12).unwrap();
        assert!(r.value.norm() < 1e-12);
    }

    #[test]
    fn cauchy_formula_recovers_exp() {
        let g = |z: Complex64| Ok(z.exp() / (z - Complex64::new(0.3, 0.0)));
        let r = integrate_cycle(g, &unit_circle(), 1e-12).unwrap();
        let v = r.value / Complex64::new(0.0, TAU);
        assert!((v - Complex64::new(0.3f64.exp(), 0.0)).norm() < 1e-12);
    }

    #[test]
    fn residue_battery() {
        for &radius in &[0.1, 1.0, 10.0] {
            for k in -3i32..=3 {
                let g = move |z: Complex64| Ok(z.powi(k));
                let r = circle_integral(g, Complex64::new(0.0, 0.0), radius, 1, 1e-12).unwrap();
                let expect = if k == -1 {
                    Complex64::new(0.0, TAU)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                let scale = 1.0 + radius.powi((k + 1).max(1));
                assert!(
                    (r.value - expect).norm() < 1e-12 * scale,
                    "k = {k}, r = {radius}: {}",
                    r.value
                );
            }
        }
    }

    #[test]
    fn orientation_negates() {
        let g = |z: Complex64| Ok(1.0 / z);
        let plus = circle_integral(g, Complex64::new(0.0, 0.0), 0.1, 1, 1e-12).unwrap();
        let minus = circle_integral(g, Complex64::new(0.0, 0.0), 0.1, -1, 1e-12).unwrap();
        assert!((plus.value + minus.value).norm() < 1e-13);
    }

    #[test]
    fn linearity() {
        let c = unit_circle();
        let g1 = |z: Complex64| Ok(1.0 / z);
        let g2 = |z: Complex64| Ok(z.exp());
        let (alpha, beta) = (Complex64::new(2.0, 1.0), Complex64::new(-0.5, 0.3));
        let lhs = integrate_cycle(
            |z| Ok(alpha * g1(z).unwrap() + beta * g2(z).unwrap()),
            &c,
            1e-12,
        )
        .unwrap();
        let r1 = integrate_cycle(g1, &c, 1e-12).unwrap();
        let r2 = integrate_cycle(g2, &c, 1e-12).unwrap();
        let rhs = alpha * r1.value + beta * r2.value;
        let tol = 2.0 * (lhs.error_estimate + r1.error_estimate + r2.error_estimate) + 1e-13;
        assert!((lhs.value - rhs).norm() <= tol);
    }

    #[test]
    fn halving_tolerance_is_consistent() {
        let g = |z: Complex64| Ok(z.exp() / (z - Complex64::new(0.3, 0.0)));
        let a = integrate_cycle(g, &unit_circle(), 1e-8).unwrap();
        let b = integrate_cycle(g, &unit_circle(), 5e-9).unwrap();
        assert!((a.value - b.value).norm() <= a.error_estimate.max(b.error_estimate) + 1e-15);
    }

    #[test]
    fn integrand_failures_carry_location() {
        let g = |z: Complex64| {
            if (z - Complex64::new(0.0, 1.0)).norm() < 0.3 {
                Err(Error::SingularPoint(z))
            } else {
                Ok(z)
            }
        };
        match integrate_cycle(g, &unit_circle(), 1e-10) {
            Err(Error::IntegrandFailure { at, .. }) => {
                assert!((at - Complex64::new(0.0, 1.0)).norm() < 0.5);
            }
            other => panic!("expected IntegrandFailure, got {other:?}"),
        }
    }

    #[test]
    fn depth_cap_reports_or_accepts() {
        // a step integrand never meets a strict length-proportional budget
        let jumpy = |z: Complex64| Ok(Complex64::new(z.im.signum(), 0.0));
        let seg = Path::new(vec![
            Complex64::new(2.0, -1.0),
            Complex64::new(2.0, 1.3),
            Complex64::new(2.5, 1.3),
        ])
        .unwrap();
        let c = Cycle::from_paths(vec![(seg, 1)]);
        let strict = integrate_cycle_with(
            jumpy,
            &c,
            &QuadOptions {
                tol: 1e-14,
                max_depth: 10,
                fail_on_tolerance: true,
            },
        );
        assert!(matches!(strict, Err(Error::ToleranceNotMet(_))));
        let lenient = integrate_cycle_with(
            jumpy,
            &c,
            &QuadOptions {
                tol: 1e-14,
                max_depth: 10,
                fail_on_tolerance: false,
            },
        )
        .unwrap();
        assert!(lenient.error_estimate > 0.0);
    }

    #[test]
    fn small_circle_picks_up_residues_of_essential_points() {
        // (1/2*pi*i) * integral of exp(1/z)/z over a small loop = 1
        let g = |z: Complex64| Ok((1.0 / z).exp() / z);
        let r = circle_integral(g, Complex64::new(0.0, 0.0), 0.5, 1, 1e-11).unwrap();
        let v = r.value / Complex64::new(0.0, TAU);
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-10, "{v}");
    }
}
