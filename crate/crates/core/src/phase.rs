//! The scaling law lambda(n), the phase phi, the local conformal map w(z)
//! near the stationary points, the Cauchy kernel h with its stationary-phase
//! approximation h0, and the erfc local model k.
//!
//! With g(u) = F(lambda u) / (u^{2n} F(lambda)) = e^{-n phi(u)}, the rescaled
//! Taylor polynomial satisfies
//!
//! T(lambda z) = F(lambda z) [chi(z) - e^{n phi(z)} h(z) / sqrt(n)],
//! h(z) = (sqrt(n) / 2 pi i) ∫_{Re u = 1} g(u) 2u / (u^2 - z^2) du.

use std::sync::Arc;

use rayon::prelude::*;
use rug::ops::Pow;
use rug::Assign;
use rug::{Complex, Float};
use serde::{Deserialize, Serialize};

use crate::completed::{is_left, right_half, Completed};
use crate::error::{Error, Result};
use crate::precision::{abs_f64, float_to_string, pi, PrecisionContext};
use crate::specfun::erfc_prec;
use crate::xi::Xi;

/// Smallest half-degree for which the scaling equation is solved.
pub const MIN_N: u32 = 8;

/// Default radius of the w-plane disks around the stationary points.
pub const DEFAULT_DELTA: f64 = 0.3;

#[derive(Clone, Debug)]
pub struct ScalingSolution {
    pub n: u32,
    pub lambda: Float,
    /// 2 - (lambda/n) (log F)'(lambda)
    pub residual_exact: Float,
    /// leading-order residual from the Gamma-factor shape
    pub residual_asymp: Float,
    pub phi2_at_1: Complex,
}

#[derive(Serialize, Deserialize)]
struct ScalingJson {
    n: u32,
    lambda: String,
    residual_exact: String,
    residual_asymp: String,
    phi2_re: String,
    phi2_im: String,
}

impl ScalingSolution {
    pub fn to_json(&self) -> Result<String> {
        let j = ScalingJson {
            n: self.n,
            lambda: float_to_string(&self.lambda),
            residual_exact: float_to_string(&self.residual_exact),
            residual_asymp: float_to_string(&self.residual_asymp),
            phi2_re: float_to_string(self.phi2_at_1.real()),
            phi2_im: float_to_string(self.phi2_at_1.imag()),
        };
        Ok(serde_json::to_string_pretty(&j)?)
    }

    pub fn lambda_f64(&self) -> f64 {
        self.lambda.to_f64()
    }
}

/// lambda(n) for the xi function.
pub fn lambda_of_n(n: u32, ctx: &PrecisionContext) -> Result<ScalingSolution> {
    lambda_of_n_for(&Xi, n, ctx)
}

/// Solves 2 - (lambda/n) (log F)'(lambda) = 0 to the right of lambda = 1.
pub fn lambda_of_n_for(
    func: &dyn Completed,
    n: u32,
    ctx: &PrecisionContext,
) -> Result<ScalingSolution> {
    if n < MIN_N {
        return Err(Error::BracketFailure(format!(
            "n = {n} is below the supported minimum {MIN_N}"
        )));
    }
    let prec = ctx.bits();
    let wp = prec + 32;
    let eval = |lam: &Float| -> Result<(Float, Float)> {
        let d = func.log_deriv(&Complex::with_val(wp, (lam, 0)), wp)?;
        let d = d.real().clone();
        let mut r = Float::with_val(wp, lam * &d) / n;
        r = 2u32 - r;
        Ok((r, d))
    };

    let seed = func.scaling_seed(n);
    if !(seed.is_finite() && seed > 1.0) {
        return Err(Error::BracketFailure(format!("seed {seed} for n = {n}")));
    }
    let x0 = Float::with_val(wp, seed);
    let (r0, _) = eval(&x0)?;
    let (mut lo, mut hi);
    if r0.is_sign_positive() {
        lo = x0.clone();
        hi = Float::with_val(wp, &x0 * 1.05f64);
        let mut tries = 0;
        while eval(&hi)?.0.is_sign_positive() {
            lo = hi.clone();
            hi *= 1.05f64;
            tries += 1;
            if tries > 200 {
                return Err(Error::BracketFailure(format!("no sign change above seed {seed}")));
            }
        }
    } else {
        hi = x0.clone();
        lo = Float::with_val(wp, &x0 / 1.05f64);
        while !eval(&lo)?.0.is_sign_positive() {
            hi = lo.clone();
            lo /= 1.05f64;
            if lo <= 1 {
                return Err(Error::BracketFailure(format!(
                    "no sign change between 1 and seed {seed} for n = {n}"
                )));
            }
        }
    }

    let mut x = x0;
    let mut converged = false;
    for _ in 0..200 {
        let (r, d) = eval(&x)?;
        if r.is_zero() {
            converged = true;
            break;
        }
        if r.is_sign_positive() {
            lo = x.clone();
        } else {
            hi = x.clone();
        }
        let d2 = func.log_deriv2_real(&x, wp)?;
        let mut rp = Float::with_val(wp, &x * &d2);
        rp += &d;
        rp = -rp / n;
        let step = Float::with_val(wp, &r / &rp);
        let mut xn = Float::with_val(wp, &x - &step);
        if !(xn > lo && xn < hi) {
            xn = Float::with_val(wp, &lo + &hi) / 2u32;
        }
        let mv = Float::with_val(wp, &xn - &x).abs();
        let scale = Float::with_val(wp, &x >> (prec as i32 + 4));
        x = xn;
        if mv <= scale {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            what: "scaling equation",
            detail: format!("n = {n}"),
        });
    }
    let (r, _) = eval(&x)?;
    let d2 = func.log_deriv2_real(&x, wp)?;
    let mut phi2 = Float::with_val(wp, x.square_ref()) * d2 / n;
    phi2 = -phi2 - 2u32;
    let residual_asymp = func.shape().asymptotic_residual(n, &x);
    Ok(ScalingSolution {
        n,
        lambda: Float::with_val(prec, &x),
        residual_exact: Float::with_val(prec, &r),
        residual_asymp: Float::with_val(prec, &residual_asymp),
        phi2_at_1: Complex::with_val(prec, (phi2, 0)),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    Omega,
    MhoMinus,
    MhoPlus,
    Boundary,
}

/// Which boundary value of the local model: inside (+) or outside (-) the strip.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

/// khat(s) = (1/2 pi i) ∫_R e^{-t^2} dt / (t - s):
/// (1/2) e^{-s^2} erfc(-is) above the axis, -(1/2) e^{-s^2} erfc(is) below.
pub fn k_hat(s: &Complex, side: Side, prec: u32) -> Complex {
    let wp = prec + 16;
    let is = Complex::with_val(wp, s * Complex::with_val(wp, (0, 1)));
    let mut e = Complex::with_val(wp, s.square_ref());
    e = -e;
    let e = e.exp();
    let v = match side {
        Side::Plus => {
            let arg = Complex::with_val(wp, -is);
            Complex::with_val(wp, erfc_prec(&arg, wp) * &e) / 2u32
        }
        Side::Minus => {
            let v = Complex::with_val(wp, erfc_prec(&is, wp) * &e) / 2u32;
            -v
        }
    };
    Complex::with_val(prec, v)
}

/// Everything the phase-level evaluations need for one (F, n).
pub struct PhaseContext {
    func: Arc<dyn Completed>,
    pub scaling: ScalingSolution,
    pub delta: f64,
    ctx: PrecisionContext,
    log_f_lambda: Complex,
    f_lambda: Complex,
}

impl PhaseContext {
    pub fn new(
        func: Arc<dyn Completed>,
        scaling: ScalingSolution,
        delta: f64,
        ctx: &PrecisionContext,
    ) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::Invalid(format!("delta must lie in (0, 1), got {delta}")));
        }
        if !scaling.phi2_at_1.real().is_sign_negative() {
            return Err(Error::Consistency("phi''(1) is not negative".into()));
        }
        let wp = ctx.bits() + 32;
        let lam = Complex::with_val(wp, (&scaling.lambda, 0));
        let log_f_lambda = func.log_value(&lam, wp)?;
        let f_lambda = func.value(&lam, wp)?;
        Ok(Self {
            func,
            scaling,
            delta,
            ctx: *ctx,
            log_f_lambda,
            f_lambda,
        })
    }

    /// Solves the scaling equation for xi and builds the context.
    pub fn for_xi(n: u32, ctx: &PrecisionContext) -> Result<Self> {
        let s = lambda_of_n(n, ctx)?;
        Self::new(Arc::new(Xi), s, DEFAULT_DELTA, ctx)
    }

    pub fn for_function(
        func: Arc<dyn Completed>,
        n: u32,
        ctx: &PrecisionContext,
    ) -> Result<Self> {
        let s = lambda_of_n_for(func.as_ref(), n, ctx)?;
        Self::new(func, s, DEFAULT_DELTA, ctx)
    }

    pub fn with_delta(mut self, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::Invalid(format!("delta must lie in (0, 1), got {delta}")));
        }
        self.delta = delta;
        Ok(self)
    }

    pub fn n(&self) -> u32 {
        self.scaling.n
    }

    pub fn lambda(&self) -> &Float {
        &self.scaling.lambda
    }

    pub fn ctx(&self) -> &PrecisionContext {
        &self.ctx
    }

    pub fn function(&self) -> &Arc<dyn Completed> {
        &self.func
    }

    fn wp(&self) -> u32 {
        self.ctx.bits() + 32
    }

    /// |phi''(1)| as f64.
    pub fn curvature(&self) -> f64 {
        -self.scaling.phi2_at_1.real().to_f64()
    }

    /// phi(z) = 2 log z + (1/n) [log F(lambda) - log F(lambda z)]
    pub fn phi(&self, z: &Complex) -> Result<Complex> {
        let wp = self.wp();
        let zr = Complex::with_val(wp, right_half(z));
        if zr.is_zero() {
            return Err(Error::Pole {
                function: "phi",
                at: "0".into(),
            });
        }
        let lw = Complex::with_val(wp, &zr * self.lambda());
        let lf = self.func.log_value(&lw, wp)?;
        let mut r = Complex::with_val(wp, &self.log_f_lambda - &lf);
        r /= self.n();
        r += Complex::with_val(wp, zr.ln_ref()) * 2u32;
        if zr.imag().is_zero() {
            r.mut_imag().assign(0);
        }
        Ok(Complex::with_val(self.ctx.bits(), r))
    }

    /// Re phi(z) without branch tracking.
    pub fn phi_re(&self, z: &Complex) -> Result<Float> {
        let wp = self.wp();
        let zr = Complex::with_val(wp, right_half(z));
        if zr.is_zero() {
            return Err(Error::Pole {
                function: "phi",
                at: "0".into(),
            });
        }
        let lw = Complex::with_val(wp, &zr * self.lambda());
        let la = self.func.log_abs(&lw, wp)?;
        let mut r = Float::with_val(wp, self.log_f_lambda.real() - &la);
        r /= self.n();
        r += Float::with_val(wp, Float::with_val(wp, zr.abs_ref()).ln_ref()) * 2u32;
        Ok(Float::with_val(self.ctx.bits(), r))
    }

    /// phi'(z) = 2/z - (lambda/n) (log F)'(lambda z)
    pub fn phi_prime(&self, z: &Complex) -> Result<Complex> {
        let wp = self.wp();
        let flip = is_left(z);
        let zr = Complex::with_val(wp, right_half(z));
        if zr.is_zero() {
            return Err(Error::Pole {
                function: "phi'",
                at: "0".into(),
            });
        }
        let lw = Complex::with_val(wp, &zr * self.lambda());
        let d = self.func.log_deriv(&lw, wp)?;
        let mut r = Complex::with_val(wp, &d * self.lambda()) / self.n();
        r = Complex::with_val(wp, zr.recip_ref()) * 2u32 - r;
        if flip {
            r = -r;
        }
        Ok(Complex::with_val(self.ctx.bits(), r))
    }

    pub fn phi_second_at_1(&self) -> Complex {
        self.scaling.phi2_at_1.clone()
    }

    /// e^{-n phi(u)} = F(lambda u) / (u^{2n} F(lambda)), no branch needed.
    pub fn g(&self, u: &Complex, prec: u32) -> Result<Complex> {
        let lw = Complex::with_val(prec, u * self.lambda());
        let fv = self.func.value(&lw, prec)?;
        let p = Complex::with_val(prec, u).pow(2 * self.n());
        let mut r = Complex::with_val(prec, &fv / &p);
        r /= &self.f_lambda;
        Ok(r)
    }

    fn linear_w(&self, zr: &Complex) -> Complex {
        let prec = zr.prec().0;
        let c = Float::with_val(prec, self.curvature() / 2.0).sqrt();
        let d = Complex::with_val(prec, zr - 1u32);
        Complex::with_val(prec, &d * Complex::with_val(prec, (0, -c)))
    }

    /// Membership in B_{1,delta} or B_{-1,delta}.
    pub fn in_ball(&self, z: &Complex) -> Result<bool> {
        let zr = Complex::with_val(self.wp(), right_half(z));
        if abs_f64(&self.linear_w(&zr)) >= 1.5 * self.delta {
            return Ok(false);
        }
        let p = self.phi(z)?;
        Ok(abs_f64(&p) < self.delta * self.delta)
    }

    /// w(z) with w^2 = phi(z) and w ~ -i sqrt(-phi''(1)/2) (z - 1) near 1.
    pub fn w_map(&self, z: &Complex) -> Result<Complex> {
        let wp = self.wp();
        let zr = Complex::with_val(wp, right_half(z));
        let lin = self.linear_w(&zr);
        let out = || {
            Error::OutOfNeighborhood(format!(
                "z = {} + {}i is not in B(+-1, {})",
                z.real().to_f64(),
                z.imag().to_f64(),
                self.delta
            ))
        };
        if abs_f64(&lin) >= 1.5 * self.delta {
            return Err(out());
        }
        let p = self.phi(&zr)?;
        if abs_f64(&p) >= self.delta * self.delta {
            return Err(out());
        }
        let mut w = Complex::with_val(wp, p.sqrt_ref());
        let dp = abs_f64(&Complex::with_val(wp, &w - &lin));
        let dm = abs_f64(&Complex::with_val(wp, &w + &lin));
        if dm < dp {
            w = -w;
        }
        Ok(Complex::with_val(self.ctx.bits(), w))
    }

    /// sqrt(n) e^{-n phi(z)} [chi(z) - (1/2) erfc(i sqrt(n) w(z))]
    pub fn k_model(&self, z: &Complex) -> Result<Complex> {
        let wp = self.wp();
        let zr = Complex::with_val(wp, right_half(z));
        if *zr.real() == 1 {
            return Err(Error::Domain {
                function: "k_model",
                detail: "z lies on the strip boundary".into(),
            });
        }
        let w = self.w_map(&zr)?;
        let sn = Float::with_val(wp, self.n()).sqrt();
        let s = Complex::with_val(wp, &w * &sn);
        let side = if *zr.real() < 1 { Side::Plus } else { Side::Minus };
        let k = k_hat(&s, side, wp) * sn;
        Ok(Complex::with_val(self.ctx.bits(), k))
    }

    /// h0(z) + 1/(2 i sqrt(pi) w(z)), the O(1) part of h - k in B_delta.
    pub fn local_correction(&self, z: &Complex) -> Result<Complex> {
        let wp = self.wp();
        let w = self.w_map(z)?;
        if w.is_zero() {
            return Err(Error::Pole {
                function: "local_correction",
                at: "1".into(),
            });
        }
        let den = Complex::with_val(wp, &w * Complex::with_val(wp, (0, 2))) * pi(wp).sqrt();
        let mut r = Complex::with_val(wp, den.recip_ref());
        r += self.h0(z)?;
        Ok(Complex::with_val(self.ctx.bits(), r))
    }

    /// (1/sqrt(2 pi |phi''(1)|)) 2/(1 - z^2)
    pub fn h0(&self, z: &Complex) -> Result<Complex> {
        let prec = self.ctx.bits();
        let wp = prec + 16;
        let zr = right_half(z);
        let near = Complex::with_val(64, &zr - 1u32);
        if abs_f64(&near) <= 1e-3 {
            return Err(Error::Pole {
                function: "h0",
                at: if is_left(z) { "-1".into() } else { "1".into() },
            });
        }
        let c = Float::with_val(wp, self.scaling.phi2_at_1.real().abs_ref());
        let amp = Float::with_val(wp, pi(wp) * 2u32) * c;
        let amp = amp.sqrt().recip();
        let mut den = Complex::with_val(wp, z.square_ref());
        den = 1u32 - den;
        let r = Complex::with_val(wp, den.recip_ref()) * 2u32 * amp;
        Ok(Complex::with_val(prec, r))
    }

    /// h(z) by trapezoidal quadrature on Re u = 1 with the pole at u = z
    /// subtracted analytically when z is close to the line.
    pub fn h_quadrature(&self, z: &Complex) -> Result<Complex> {
        let prec = self.ctx.bits();
        let zr0 = right_half(z);
        let a = Float::with_val(zr0.prec().0, 1 - zr0.real()).to_f64();
        if *zr0.real() == 1 {
            return Err(Error::Domain {
                function: "h",
                detail: "z lies on the strip boundary".into(),
            });
        }
        let lost = if a.abs() < 1.0 { (-a.abs().log2()).clamp(0.0, 4096.0) as u32 } else { 0 };
        let wp = prec + 24 + lost;
        let zr = Complex::with_val(wp, &zr0);
        let y = zr.imag().to_f64();
        let digits = self.ctx.total_digits() as f64;
        let ln_trunc = -(digits + 10.0) * std::f64::consts::LN_10;
        let subtract = a.abs() < 0.5;
        let kappa = 1.0f64;

        // g extent along the line
        let step = 0.125f64;
        let mut t_g = step;
        let mut below = 0;
        loop {
            let u = Complex::with_val(wp, (1, t_g));
            let gv = self.g(&u, wp)?;
            let lg = crate::precision::log10_abs(&gv) * std::f64::consts::LN_10;
            if lg < ln_trunc {
                below += 1;
                if below == 2 {
                    break;
                }
            } else {
                below = 0;
            }
            t_g += step;
            if t_g > 50.0 {
                return Err(Error::TruncationFailure(format!(
                    "|e^(-n phi)| has not decayed below 1e-{} by |Im s| = 50",
                    digits + 10.0
                )));
            }
        }

        let gz = if subtract { Some(self.g(&zr, wp)?) } else { None };
        let t_total = match &gz {
            Some(gz) => {
                let lgz = crate::precision::log10_abs(gz) * std::f64::consts::LN_10;
                let extra = ((lgz + kappa * a * a - ln_trunc) / kappa).max(0.0).sqrt();
                t_g.max(y.abs() + extra + 1.0)
            }
            None => t_g,
        };

        let i_unit = Complex::with_val(wp, (0, 1));
        let kap = Float::with_val(wp, kappa);
        let integrand = |t: f64| -> Result<Complex> {
            let u = Complex::with_val(wp, (1, t));
            let mut val = Complex::with_val(wp, (0, 0));
            if t.abs() <= t_g {
                let gu = self.g(&u, wp)?;
                let um = Complex::with_val(wp, &u - &zr);
                let up = Complex::with_val(wp, &u + &zr);
                let mut k = Complex::with_val(wp, um.recip_ref());
                k += Complex::with_val(wp, up.recip_ref());
                val += gu * k;
            }
            if let Some(gz) = &gz {
                let d = Complex::with_val(wp, &u - &zr);
                let e = Complex::with_val(wp, d.square_ref()) * &kap;
                let e = e.exp();
                let s = Complex::with_val(wp, gz * &e) / &d;
                val -= s;
            }
            Ok(val * &i_unit)
        };
        let eval_nodes = |ts: &[f64]| -> Result<Complex> {
            let vals: Vec<Complex> = ts
                .par_iter()
                .map(|&t| integrand(t))
                .collect::<Result<Vec<_>>>()?;
            let mut s = Complex::with_val(wp, (0, 0));
            for v in &vals {
                s += v;
            }
            Ok(s)
        };

        let mut hs = 1.0 / 16.0;
        let jmax = (t_total / hs).ceil() as i64;
        let nodes: Vec<f64> = (-jmax..=jmax).map(|j| j as f64 * hs).collect();
        let mut raw = eval_nodes(&nodes)?;
        let mut prev = Complex::with_val(wp, &raw * hs);
        let tol = 10f64.powf(-(digits / 2.0 + 3.0));
        let mut result = None;
        for _ in 0..10 {
            let jmax = (t_total / hs).ceil() as i64;
            let mids: Vec<f64> = (-jmax..jmax).map(|j| (j as f64 + 0.5) * hs).collect();
            raw += eval_nodes(&mids)?;
            hs /= 2.0;
            let cur = Complex::with_val(wp, &raw * hs);
            let diff = abs_f64(&Complex::with_val(wp, &cur - &prev));
            let size = abs_f64(&cur).max(f64::MIN_POSITIVE);
            prev = cur;
            if diff <= tol * size {
                result = Some(prev.clone());
                break;
            }
        }
        let mut integral = result.ok_or_else(|| Error::NonConvergence {
            what: "h quadrature",
            detail: format!("z = {} + {}i", zr0.real().to_f64(), zr0.imag().to_f64()),
        })?;
        if let Some(gz) = &gz {
            let mut c = Complex::with_val(wp, gz * &i_unit) * pi(wp);
            if a < 0.0 {
                c = -c;
            }
            integral += c;
        }
        // sqrt(n) / (2 pi i)
        let sn = Float::with_val(wp, self.n()).sqrt();
        let den = Complex::with_val(wp, &i_unit * pi(wp)) * 2u32;
        let h = Complex::with_val(wp, integral * sn) / den;
        Ok(Complex::with_val(prec, h))
    }

    pub fn region_classify(&self, z: &Complex) -> Result<Region> {
        let re = self.phi_re(z)?;
        let thr = 10f64.powf(-(self.ctx.digits as f64) / 2.0);
        let rf = re.to_f64();
        if rf.abs() < thr {
            return Ok(Region::Boundary);
        }
        let x = z.real().to_f64().abs();
        Ok(if rf > 0.0 {
            Region::MhoPlus
        } else if x < 1.0 {
            Region::Omega
        } else {
            Region::MhoMinus
        })
    }
}
