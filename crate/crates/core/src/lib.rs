//! Taylor polynomials of the Riemann xi function under degree-dependent
//! rescaling: coefficients, zeros, level curves and the asymptotic formulas
//! that describe them.

pub mod classical;
pub mod completed;
pub mod curves;
pub mod error;
pub mod hurwitz;
pub mod lfunc;
pub mod phase;
pub mod poly;
pub mod precision;
pub mod specfun;
pub mod xi;
pub mod zeros;

pub use error::{Error, Result};
pub use precision::{ComplexAP, PrecisionContext};
