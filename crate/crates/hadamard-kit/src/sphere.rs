//! Extended arithmetic on the Riemann sphere.
//!
//! The complex multiplication extends continuously to the sphere except at
//! the two pairs (0, inf) and (inf, 0); inversion extends everywhere by
//! swapping 0 and inf.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A point of the Riemann sphere: a finite complex number or the point at infinity.
///
/// Infinity is a genuine variant, never a large float.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpherePoint {
    Finite(Complex64),
    Infinity,
}

impl SpherePoint {
    pub fn finite(re: f64, im: f64) -> Self {
        SpherePoint::Finite(Complex64::new(re, im))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, SpherePoint::Finite(v) if v.re == 0.0 && v.im == 0.0)
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, SpherePoint::Infinity)
    }
}

impl From<Complex64> for SpherePoint {
    fn from(v: Complex64) -> Self {
        SpherePoint::Finite(v)
    }
}

/// Extended multiplication. Defined on all pairs except (0, inf) and (inf, 0).
pub fn ext_mul(a: SpherePoint, b: SpherePoint) -> Result<SpherePoint> {
    use SpherePoint::*;
    match (a, b) {
        (Finite(x), Finite(y)) => Ok(Finite(x * y)),
        (Infinity, p) | (p, Infinity) => {
            if p.is_zero() {
                Err(Error::UndefinedProduct)
            } else {
                Ok(Infinity)
            }
        }
    }
}

/// Extended inversion: 1/a on C*, with 0 and inf swapped.
pub fn sphere_inv(a: SpherePoint) -> SpherePoint {
    use SpherePoint::*;
    match a {
        Infinity => Finite(Complex64::new(0.0, 0.0)),
        Finite(v) if v.re == 0.0 && v.im == 0.0 => Infinity,
        Finite(v) => Finite(v.inv()),
    }
}
