//! Even, conjugation-symmetric entire functions F(w) = Λ(1/2 + w) that the
//! Taylor, phase and curve machinery is generic over.

use rug::{Complex, Float};

use crate::error::Result;
use crate::specfun::lambert_w0_f64;

/// Gamma-factor data: J real factors, K complex factors, conductor N.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaShape {
    pub j: u32,
    pub k: u32,
    pub conductor: f64,
}

impl GammaShape {
    /// Leading-order scaling factor for degree 2n - 2:
    /// (4n/d) / W((2n/(pi d)) (N/4^K)^{1/d}), d = J + 2K.
    pub fn seed(&self, n: u32) -> f64 {
        let d = (self.j + 2 * self.k) as f64;
        let nf = n as f64;
        let scale = (self.conductor / 4f64.powi(self.k as i32)).powf(1.0 / d);
        4.0 * nf / d / lambert_w0_f64(2.0 * nf / (std::f64::consts::PI * d) * scale)
    }

    /// 2 + (lambda/n)[log(2^K / N^{1/2}) - (J/2 + K) log(lambda / 2 pi)]
    pub fn asymptotic_residual(&self, n: u32, lambda: &Float) -> Float {
        let prec = lambda.prec();
        let two_pi = Float::with_val(prec, crate::precision::pi(prec) * 2u32);
        let mut inner = Float::with_val(prec, 2u32).ln() * self.k;
        inner -= Float::with_val(prec, self.conductor).ln() / 2u32;
        let ll = Float::with_val(prec, lambda / &two_pi).ln();
        inner -= ll * (self.j as f64 / 2.0 + self.k as f64);
        let mut r = Float::with_val(prec, lambda * &inner) / n;
        r += 2u32;
        r
    }
}

pub trait Completed: Send + Sync {
    /// Short name used in exported files.
    fn label(&self) -> String;

    fn shape(&self) -> GammaShape;

    /// F(w) for any complex w.
    fn value(&self, w: &Complex, prec: u32) -> Result<Complex>;

    /// log F(w) for Re w >= 0 on the branch that is real on the positive
    /// real axis and continuous along horizontal paths from it.
    fn log_value(&self, w: &Complex, prec: u32) -> Result<Complex>;

    /// log |F(w)| (no branch bookkeeping).
    fn log_abs(&self, w: &Complex, prec: u32) -> Result<Float> {
        let v = self.value(w, prec + 16)?;
        Ok(Float::with_val(prec, Float::with_val(prec + 16, v.abs_ref()).ln_ref()))
    }

    /// (log F)'(w).
    fn log_deriv(&self, w: &Complex, prec: u32) -> Result<Complex>;

    /// (log F)''(w) for real w > 0.
    fn log_deriv2_real(&self, w: &Float, prec: u32) -> Result<Float>;

    /// Leading-order scaling factor for degree 2n - 2.
    fn scaling_seed(&self, n: u32) -> f64 {
        self.shape().seed(n)
    }
}

/// Representative with non-negative real part (F is even).
pub(crate) fn right_half(w: &Complex) -> Complex {
    if w.real().is_sign_negative() && !w.real().is_zero() {
        Complex::with_val(w.prec(), -w.clone())
    } else {
        w.clone()
    }
}

pub(crate) fn is_left(w: &Complex) -> bool {
    w.real().is_sign_negative() && !w.real().is_zero()
}
