//! Special functions at arbitrary precision.

pub(crate) mod bernoulli;
mod erfc;
mod gamma;
mod lambert;
mod zeta;

pub use erfc::{erfc, erfc_zero, erfc_zero_seed, ErfcZero};
pub use gamma::{digamma, log_gamma};
pub use lambert::{lambert_w0, lambert_w0_f64};
pub use zeta::{hurwitz_zeta, zeta, zeta_with_derivative};

pub(crate) use erfc::erfc_prec;
pub(crate) use gamma::{digamma_prec, lgamma_prec, trigamma_prec};
pub(crate) use zeta::{hurwitz_val_der, zeta_prec, zeta_val_der};
