use rug::Float;

use crate::error::{Error, Result};
use crate::precision::PrecisionContext;

fn seed(x: &Float) -> f64 {
    let xf = x.to_f64();
    if xf > 3.0 || !xf.is_finite() {
        let l1 = Float::with_val(64, x.ln_ref()).to_f64();
        let l2 = l1.ln();
        return l1 - l2 + l2 / l1;
    }
    if xf < -0.25 {
        let p = (2.0 * (std::f64::consts::E * xf + 1.0)).max(0.0).sqrt();
        return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
    }
    let l = (1.0 + xf).ln();
    l * (1.0 - (1.0 + l).ln() / (2.0 + l))
}

pub(crate) fn lambert_w0_prec(x: &Float, prec: u32) -> Result<Float> {
    let wp = prec + 24;
    let x = Float::with_val(wp, x);
    let inv_e = Float::with_val(wp, -Float::with_val(wp, 1).exp().recip());
    if x < inv_e {
        let margin = Float::with_val(64, &inv_e - &x);
        if margin > (Float::with_val(64, 1) >> (prec as i32 - 4)) {
            return Err(Error::Domain {
                function: "lambert_w0",
                detail: format!("x = {} < -1/e", x.to_f64()),
            });
        }
    }
    if Float::with_val(64, &x - &inv_e).abs() <= (Float::with_val(64, 1) >> (prec as i32 - 4)) {
        return Ok(Float::with_val(prec, -1));
    }
    if x.is_zero() {
        return Ok(Float::new(prec));
    }
    let mut w = Float::with_val(wp, seed(&x));
    for _ in 0..200 {
        let ew = Float::with_val(wp, w.exp_ref());
        let f = Float::with_val(wp, &w * &ew) - &x;
        let w1 = Float::with_val(wp, &w + 1u32);
        let w2 = Float::with_val(wp, &w + 2u32);
        // Halley: f / (e^w (w+1) - (w+2) f / (2w+2))
        let mut denom = Float::with_val(wp, &ew * &w1);
        denom -= Float::with_val(wp, &w2 * &f) / Float::with_val(wp, &w1 * 2u32);
        let step = Float::with_val(wp, &f / &denom);
        w -= &step;
        let scale = Float::with_val(64, w.abs_ref()).max(&Float::with_val(64, 1e-30));
        if Float::with_val(64, step.abs_ref()) <= (scale >> (wp as i32 - 12)) {
            return Ok(Float::with_val(prec, w));
        }
    }
    Err(Error::NonConvergence {
        what: "Lambert W Halley iteration",
        detail: format!("x = {}", x.to_f64()),
    })
}

/// Principal real branch of Lambert W.
pub fn lambert_w0(x: &Float, ctx: &PrecisionContext) -> Result<Float> {
    lambert_w0_prec(x, ctx.bits())
}

/// W0 in plain f64 (for seeds and heuristics).
pub fn lambert_w0_f64(x: f64) -> f64 {
    let prec = 80;
    lambert_w0_prec(&Float::with_val(prec, x), prec)
        .map(|w| w.to_f64())
        .unwrap_or(f64::NAN)
}
