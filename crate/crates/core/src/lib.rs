//! Numerical toolkit for mixed polynomials `f(z, z̄)`.
//!
//! The crate builds the deformation families that join a mixed Brieskorn,
//! chain or loop polynomial to its holomorphic associate, and checks the
//! consequences of their smooth equivalence numerically: absence of mixed
//! singular points, transversality to spheres, value-preserving transport of
//! links and tube fibers, and link component counts.
//!
//! ```
//! use mixed_milnor::family::{build_family, FamilyKind, FamilySpec};
//! use mixed_milnor::Complex64;
//!
//! let fam = build_family(&FamilySpec::new(FamilyKind::Brieskorn, &[2, 3], &[1, 0])).unwrap();
//! let one = [Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
//! assert_eq!(fam.value(0.5, &one).unwrap(), Complex64::new(2.0, 0.0));
//! assert_eq!(fam.polar_weights, vec![3, 2]);
//! ```
//!
//! Every search here produces numerical evidence; none of it is a proof.

pub mod error;
pub mod exact;
pub mod family;
pub mod isotopy;
pub mod link;
pub mod normalize;
pub mod poly;
pub mod real;
pub mod rng;
pub mod root;
pub mod singular;
pub mod transversal;
pub mod weights;

pub use error::{Error, Result};
pub use num_complex::Complex64;
