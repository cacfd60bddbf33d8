//! Principal dilogarithm on C minus the cut [1, +inf).
//!
//! Series on |z| <= 1/2; the inversion identity for |z| >= 2; for the middle
//! annulus either the reflection identity (near 1) or the expansion in the
//! Landen variable u = -log(1-z), whose coefficients B_2k/(2k+1)! come from
//! exact small rationals for k <= 6 and from zeta(2k) beyond.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

const PI2_6: f64 = PI * PI / 6.0;

/// Series sum(z^n / n^2), usable for |z| <= ~0.75.
fn li2_series(z: Complex64) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut zn = Complex64::new(1.0, 0.0);
    for n in 1..400u32 {
        zn *= z;
        let term = zn / (n as f64 * n as f64);
        sum += term;
        if term.norm() < 1e-19 * (1.0 + sum.norm()) {
            break;
        }
    }
    sum
}

/// Coefficients c_k = B_{2k} / (2k+1)! of the u-series.
fn u_coeffs() -> &'static [f64] {
    static COEFFS: OnceLock<Vec<f64>> = OnceLock::new();
    COEFFS.get_or_init(|| {
        // B_2..B_12 as exact rationals
        let small = [
            1.0 / 6.0,
            -1.0 / 30.0,
            1.0 / 42.0,
            -1.0 / 30.0,
            5.0 / 66.0,
            -691.0 / 2730.0,
        ];
        let mut out = Vec::with_capacity(40);
        for (i, b) in small.iter().enumerate() {
            let k = i + 1;
            let mut fact = 1.0f64;
            for j in 2..=(2 * k + 1) {
                fact *= j as f64;
            }
            out.push(b / fact);
        }
        // B_{2k}/(2k+1)! = (-1)^{k+1} 2 zeta(2k) / ((2pi)^{2k} (2k+1))
        for k in 7..=40usize {
            let s = 2 * k as i32;
            let mut zeta = 0.0f64;
            for j in (1..=64u64).rev() {
                zeta += (j as f64).powi(-s);
            }
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            let c = sign * 2.0 * zeta / ((2.0 * PI).powi(s) * (2.0 * k as f64 + 1.0));
            out.push(c);
        }
        out
    })
}

/// Expansion Li2(z) = u - u^2/4 + sum c_k u^{2k+1}, u = -log(1-z), |u| < 2*pi.
fn li2_u_series(z: Complex64) -> Complex64 {
    let u = -(Complex64::new(1.0, 0.0) - z).ln();
    let u2 = u * u;
    let mut sum = u - u2 / 4.0;
    let mut upow = u; // u^{2k+1} built incrementally
    for &c in u_coeffs() {
        upow *= u2;
        let term = c * upow;
        sum += term;
        if term.norm() < 1e-19 * (1.0 + sum.norm()) {
            break;
        }
    }
    sum
}

/// Principal Li2. The caller is responsible for staying off the cut [1, +inf).
pub fn li2(z: Complex64) -> Complex64 {
    let r = z.norm();
    if r == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    if r <= 0.5 {
        li2_series(z)
    } else if r >= 2.0 {
        // Li2(z) = -Li2(1/z) - pi^2/6 - log(-z)^2 / 2
        let lnm = (-z).ln();
        -li2(z.inv()) - PI2_6 - 0.5 * lnm * lnm
    } else if (Complex64::new(1.0, 0.0) - z).norm() <= 0.5 {
        // Li2(z) = pi^2/6 - log(z) log(1-z) - Li2(1-z)
        let w = Complex64::new(1.0, 0.0) - z;
        Complex64::new(PI2_6, 0.0) - z.ln() * w.ln() - li2_series(w)
    } else {
        li2_u_series(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn value_at_one_half() {
        // pi^2/12 - log(2)^2/2, and partial sums of sum 2^-n/n^2 agree
        let v = li2(Complex64::new(0.5, 0.0));
        assert!((v.re - 0.5822405264650125).abs() < 1e-15, "{v}");
        assert!(v.im.abs() < 1e-16);
        let direct = li2_series(Complex64::new(0.5, 0.0));
        assert!((v - direct).norm() < 1e-15);
    }

    #[test]
    fn series_and_u_series_agree_on_the_overlap() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..200 {
            let r = rng.gen_range(0.4..0.6);
            let t = rng.gen_range(0.0..std::f64::consts::TAU);
            let z = Complex64::from_polar(r, t);
            let a = li2_series(z);
            let b = li2_u_series(z);
            assert!((a - b).norm() < 1e-14, "mismatch at {z}: {a} vs {b}");
        }
    }

    #[test]
    fn reflection_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let mut checked = 0;
        while checked < 100 {
            let z = Complex64::new(rng.gen_range(-0.95..0.95), rng.gen_range(-0.95..0.95));
            if z.norm() >= 0.98 || z.norm() < 0.05 || (Complex64::new(1.0, 0.0) - z).norm() < 0.05
            {
                continue;
            }
            checked += 1;
            let lhs = li2(z) + li2(Complex64::new(1.0, 0.0) - z);
            let rhs = Complex64::new(PI2_6, 0.0) - z.ln() * (Complex64::new(1.0, 0.0) - z).ln();
            assert!((lhs - rhs).norm() < 1e-12, "z = {z}");
        }
    }

    #[test]
    fn inversion_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let z = Complex64::from_polar(
                rng.gen_range(2.5..8.0),
                rng.gen_range(0.15..std::f64::consts::TAU - 0.15),
            );
            let lhs = li2(z) + li2(z.inv());
            let lnm = (-z).ln();
            let rhs = -Complex64::new(PI2_6, 0.0) - 0.5 * lnm * lnm;
            assert!((lhs - rhs).norm() < 1e-12, "z = {z}");
        }
    }

    #[test]
    fn jump_across_the_cut_is_two_pi_i_log_x() {
        for &x in &[1.5, 2.0, 4.0] {
            let eps = 1e-7;
            let jump = li2(Complex64::new(x, eps)) - li2(Complex64::new(x, -eps));
            let expect = Complex64::new(0.0, std::f64::consts::TAU * x.ln());
            assert!((jump - expect).norm() < 1e-5, "x = {x}: {jump} vs {expect}");
        }
    }
}
