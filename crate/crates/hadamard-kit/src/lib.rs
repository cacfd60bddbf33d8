//! Multiplicative Hadamard products of holomorphic functions on C*, computed
//! by synthesizing certified integration cycles from winding prescriptions
//! and evaluating the contour integrals numerically.
//!
//! The building blocks:
//! - [`sets`]: closed subsets of C* as finite unions of log-polar boxes, with
//!   exact products, inverses, scalings, and properness tests;
//! - [`cycles`]: polygonal 1-cycles, robust winding numbers, synthesis of a
//!   cycle realizing a prescribed winding function, and certification;
//! - [`functions`]: a small expression language for holomorphic functions
//!   with declared singular sets, plus a power-series oracle;
//! - [`quadrature`]: adaptive Gauss-Kronrod panels along cycle supports;
//! - [`hadamard`]: the products themselves, residue and commutation
//!   identities, shared-cycle grids, and class-level convolution.


pub mod cli;
pub mod cycles;
pub mod error;
pub mod functions;
pub mod hadamard;
pub mod quadrature;
pub mod sets;
pub mod sphere;
pub mod verify;
pub use error::{Error, Result};
pub use sets::{convolvable, star_eligible, strongly_convolvable, Arc, LogPolarBox, StarSet};
pub use sphere::{ext_mul, sphere_inv, SpherePoint};
