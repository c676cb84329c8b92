//! Generalized Laguerre functions attached to a fourth-order Bessel-type
//! operator on the half line, together with the special-function substrate,
//! an exact coefficient engine, half-line quadrature, a Meijer-G inversion
//! transform, the structure-constant registry of simple real Jordan algebras
//! and the rank-2 cone calculus.

pub mod combo;
pub mod diffop;
pub mod error;
pub mod exact;
pub mod gtransform;
pub mod identity;
pub mod jordan;
pub mod lambda;
pub mod params;
pub mod quad;
pub mod rank2;
pub mod scalar_fn;
pub mod series;
pub mod suites;

pub use error::{Error, Result};
