//! Exact computations on extended Mukai lattices of hyper-Kähler manifolds.
//!
//! The crate models the rational quadratic space `Qα ⊕ H² ⊕ Qβ` attached to a
//! deformation type, the graded `Sym^n` model of the Verbitsky component,
//! isometries induced by derived equivalences, the K3^[n] lattice `Λ` and the
//! lattice side of moduli spaces of sheaves on K3 surfaces.  All arithmetic
//! is exact over the rationals.

pub mod catalog;
pub mod error;
pub mod exact;
pub mod hk_space;
pub mod io;
pub mod isometry;
pub mod lattice;
pub mod moduli;
pub mod report;
pub mod suites;
pub mod verbitsky;

pub use error::{Error, Result};
pub use exact::{RatMatrix, RatVector, Rational};
