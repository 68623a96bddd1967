//! Truncated moment problems on the complex plane and their real,
//! Hamburger and Herglotz relatives.
//!
//! Discrete measures and moment tables use `f64`/`Complex64`; quadrature and
//! Hankel-based recovery run in MPFR floating point at a configurable
//! precision.

pub mod error;
pub mod extensions;
pub mod geometry;
pub mod measures;
pub mod positivity;
pub mod quadrature;
pub mod recovery;
pub mod sequences;

pub use error::{Error, Result};
pub use measures::{Atom, ComplexValue, DiscreteMeasure, Domain};
pub use sequences::{ExtendedMomentTable, HamburgerTable, MomentTable, RealMomentTable2D};
