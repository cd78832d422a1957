//! Completed L-functions with Dirichlet-character coefficients, the
//! generalized scaling law and the leading-order Taylor representation.

use std::f64::consts::PI;
use std::sync::Arc;

use rug::ops::Pow;
use rug::{Complex, Float};
use serde::{Deserialize, Serialize};

use crate::completed::{is_left, right_half, Completed, GammaShape};
use crate::error::{Error, Result};
use crate::phase::{lambda_of_n_for, PhaseContext, ScalingSolution, DEFAULT_DELTA};
use crate::precision::{abs_f64, float_to_string, pi, PrecisionContext};
use crate::specfun::{digamma_prec, erfc_prec, hurwitz_val_der, lgamma_prec, trigamma_prec};
use crate::xi::{eval_taylor, taylor_coeffs_of, QuadratureOptions, TaylorPolynomial};

/// Longest Dirichlet sum evaluated term by term; beyond it the Hurwitz
/// decomposition is used.
pub const MAX_SERIES_TERMS: u64 = 4096;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoeffKind {
    /// a_n = values[n mod modulus]
    DirichletCharacter { modulus: u32, values: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LFunctionDescriptor {
    #[serde(rename = "N")]
    pub conductor: u64,
    pub mu: Vec<f64>,
    pub eta: Vec<f64>,
    pub coeff_kind: CoeffKind,
    /// |a_n| <= coeff_bound for all n
    pub coeff_bound: f64,
}

impl LFunctionDescriptor {
    /// L(s, chi_4), the Dirichlet beta function.
    pub fn dirichlet_beta() -> Self {
        Self {
            conductor: 4,
            mu: vec![1.0],
            eta: vec![],
            coeff_kind: CoeffKind::DirichletCharacter {
                modulus: 4,
                values: vec![0.0, 1.0, 0.0, -1.0],
            },
            coeff_bound: 1.0,
        }
    }

    /// Riemann zeta. Λ has poles at 0 and 1, so only pointwise evaluation and
    /// the scaling solve accept it.
    pub fn riemann_zeta() -> Self {
        Self {
            conductor: 1,
            mu: vec![0.0],
            eta: vec![],
            coeff_kind: CoeffKind::DirichletCharacter {
                modulus: 1,
                values: vec![1.0],
            },
            coeff_bound: 1.0,
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let d: Self = serde_json::from_str(s)?;
        d.validate()?;
        Ok(d)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("descriptor serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.mu.len() + self.eta.len() == 0 {
            return Err(Error::Invalid("descriptor needs at least one Gamma factor".into()));
        }
        if self.conductor == 0 {
            return Err(Error::Invalid("conductor must be a positive integer".into()));
        }
        if let Some(x) = self.mu.iter().chain(&self.eta).find(|x| !(x.is_finite() && **x > -0.5)) {
            return Err(Error::Invalid(format!("Gamma shifts must exceed -1/2, got {x}")));
        }
        if !(self.coeff_bound.is_finite() && self.coeff_bound > 0.0) {
            return Err(Error::Invalid("coeff_bound must be positive".into()));
        }
        match &self.coeff_kind {
            CoeffKind::DirichletCharacter { modulus, values } => {
                if *modulus == 0 || values.len() != *modulus as usize {
                    return Err(Error::Invalid(format!(
                        "expected {modulus} character values, got {}",
                        values.len()
                    )));
                }
                if values.iter().any(|v| !v.is_finite() || v.abs() > self.coeff_bound) {
                    return Err(Error::Invalid("character value exceeds coeff_bound".into()));
                }
                if values[1 % *modulus as usize] != 1.0 {
                    return Err(Error::Invalid("a_1 must equal 1".into()));
                }
            }
        }
        Ok(())
    }

    pub fn coefficient(&self, n: u64) -> f64 {
        match &self.coeff_kind {
            CoeffKind::DirichletCharacter { modulus, values } => values[(n % *modulus as u64) as usize],
        }
    }

    /// L(s) has a pole at s = 1 when the coefficients have non-zero mean.
    pub fn has_pole(&self) -> bool {
        match &self.coeff_kind {
            CoeffKind::DirichletCharacter { values, .. } => values.iter().sum::<f64>() != 0.0,
        }
    }

    pub fn shape(&self) -> GammaShape {
        GammaShape {
            j: self.mu.len() as u32,
            k: self.eta.len() as u32,
            conductor: self.conductor as f64,
        }
    }

    fn modulus(&self) -> u32 {
        match &self.coeff_kind {
            CoeffKind::DirichletCharacter { modulus, .. } => *modulus,
        }
    }
}

/// Γ_R(s) = π^{-s/2} Γ(s/2)
pub fn gamma_r(s: &Complex, prec: u32) -> Result<Complex> {
    let wp = prec + 16;
    let v = log_gamma_r(&Complex::with_val(wp, s), wp)?;
    Ok(Complex::with_val(prec, v.exp_ref()))
}

/// Γ_C(s) = 2 (2π)^{-s} Γ(s)
pub fn gamma_c(s: &Complex, prec: u32) -> Result<Complex> {
    let wp = prec + 16;
    let v = log_gamma_c(&Complex::with_val(wp, s), wp)?;
    Ok(Complex::with_val(prec, v.exp_ref()))
}

fn log_gamma_r(s: &Complex, wp: u32) -> Result<Complex> {
    let half = Complex::with_val(wp, s / 2u32);
    let mut l = lgamma_prec(&half, wp)?;
    l -= Complex::with_val(wp, &half * Float::with_val(wp, pi(wp).ln_ref()));
    Ok(l)
}

fn log_gamma_c(s: &Complex, wp: u32) -> Result<Complex> {
    let mut l = lgamma_prec(s, wp)?;
    let ln2pi = Float::with_val(wp, pi(wp) * 2u32).ln();
    l -= Complex::with_val(wp, s * &ln2pi);
    l += Float::with_val(wp, 2u32).ln();
    Ok(l)
}

/// Index after which the Dirichlet tail is below 10^-(digits + 5), or None
/// when it exceeds MAX_SERIES_TERMS.
fn truncation_index(d: &LFunctionDescriptor, sigma: f64, prec: u32) -> Option<u64> {
    if sigma <= 1.0 {
        return None;
    }
    let digits = prec as f64 * std::f64::consts::LOG10_2;
    // B M^{1-σ}/(σ-1) < 10^{-digits-5}
    let ln_target = -(digits + 5.0) * std::f64::consts::LN_10 - d.coeff_bound.ln() + (sigma - 1.0).ln();
    let m = (-ln_target / (sigma - 1.0)).exp().ceil();
    (m.is_finite() && m <= MAX_SERIES_TERMS as f64).then_some(m.max(1.0) as u64)
}

/// L(s) = sum a_n n^{-s} by direct summation.
pub fn dirichlet_series(s: &Complex, d: &LFunctionDescriptor, prec: u32) -> Result<Complex> {
    Ok(series_val_der(s, d, prec, false)?.0)
}

fn series_val_der(
    s: &Complex,
    d: &LFunctionDescriptor,
    prec: u32,
    deriv: bool,
) -> Result<(Complex, Option<Complex>)> {
    let sigma = s.real().to_f64();
    let m = truncation_index(d, sigma, prec).ok_or_else(|| {
        Error::TruncationFailure(format!(
            "Dirichlet series at Re s = {sigma} needs more than {MAX_SERIES_TERMS} terms"
        ))
    })?;
    let wp = prec + 16 + (m as f64).log2().ceil() as u32;
    let s = Complex::with_val(wp, s);
    let mut v = Complex::new(wp);
    let mut dv = Complex::new(wp);
    for k in 1..=m {
        let a = d.coefficient(k);
        if a == 0.0 {
            continue;
        }
        let lk = Float::with_val(wp, k).ln();
        let t = Complex::with_val(wp, &s * &lk);
        let t = Complex::with_val(wp, (-t).exp()) * a;
        if deriv {
            dv -= Complex::with_val(wp, &t * &lk);
        }
        v += t;
    }
    Ok((Complex::with_val(prec, v), deriv.then(|| Complex::with_val(prec, dv))))
}

/// L(s) = q^{-s} sum_{a=1}^q a_a zeta(s, a/q), valid for every s != 1.
fn hurwitz_l(
    s: &Complex,
    d: &LFunctionDescriptor,
    prec: u32,
    deriv: bool,
) -> Result<(Complex, Option<Complex>)> {
    let q = d.modulus();
    let wp = prec + 16 + (q as f64).log2().ceil() as u32;
    let s = Complex::with_val(wp, s);
    let mut v = Complex::new(wp);
    let mut dv = Complex::new(wp);
    for a in 1..=q {
        let c = d.coefficient(a as u64);
        if c == 0.0 {
            continue;
        }
        let x = Float::with_val(wp, a) / q;
        let (z, dz) = hurwitz_val_der(&s, &x, wp, deriv)?;
        v += Complex::with_val(wp, &z * c);
        if let Some(dz) = dz {
            dv += Complex::with_val(wp, &dz * c);
        }
    }
    let lq = Float::with_val(wp, q).ln();
    let qs = Complex::with_val(wp, &s * &lq);
    let qs = Complex::with_val(wp, (-qs).exp());
    // (q^{-s} S)' = q^{-s} (S' - log q S)
    dv -= Complex::with_val(wp, &v * &lq);
    v *= &qs;
    dv *= &qs;
    Ok((Complex::with_val(prec, v), deriv.then(|| Complex::with_val(prec, dv))))
}

/// L(s) and optionally L'(s): the series when it is short enough, the
/// Hurwitz decomposition otherwise.
fn l_val_der(
    s: &Complex,
    d: &LFunctionDescriptor,
    prec: u32,
    deriv: bool,
) -> Result<(Complex, Option<Complex>)> {
    if truncation_index(d, s.real().to_f64(), prec).is_some() {
        series_val_der(s, d, prec, deriv)
    } else {
        hurwitz_l(s, d, prec, deriv)
    }
}

/// log of N^{s/2} ∏ Γ_R(s + μ_j) ∏ Γ_C(s + η_k).
fn log_gamma_factor(s: &Complex, d: &LFunctionDescriptor, wp: u32) -> Result<Complex> {
    let ln_n = Float::with_val(wp, d.conductor).ln();
    let mut l = Complex::with_val(wp, s * &ln_n) / 2u32;
    for mu in &d.mu {
        l += log_gamma_r(&Complex::with_val(wp, s + *mu), wp)?;
    }
    for eta in &d.eta {
        l += log_gamma_c(&Complex::with_val(wp, s + *eta), wp)?;
    }
    Ok(Complex::with_val(wp, l))
}

/// Λ(s) = N^{s/2} ∏ Γ_R(s + μ_j) ∏ Γ_C(s + η_k) L(s), evaluated directly on
/// both sides of the critical line.
pub fn completed_l(s: &Complex, d: &LFunctionDescriptor, ctx: &PrecisionContext) -> Result<Complex> {
    completed_prec(s, d, ctx.bits())
}

fn completed_prec(s: &Complex, d: &LFunctionDescriptor, prec: u32) -> Result<Complex> {
    let wp = prec + 24 + (abs_f64(s) + 2.0).log2().ceil() as u32;
    let s = Complex::with_val(wp, s);
    let g = log_gamma_factor(&s, d, wp)?.exp();
    let (l, _) = l_val_der(&s, d, wp, false)?;
    Ok(Complex::with_val(prec, &g * &l))
}

/// max |Λ(s) − Λ(1 − s)| / |Λ(s)| over the given points.
pub fn symmetry_residual(
    d: &LFunctionDescriptor,
    points: &[Complex],
    ctx: &PrecisionContext,
) -> Result<f64> {
    let mut worst = 0f64;
    for s in points {
        let a = completed_l(s, d, ctx)?;
        let b = completed_l(&Complex::with_val(ctx.bits(), 1u32 - s), d, ctx)?;
        let diff = abs_f64(&Complex::with_val(ctx.bits(), &a - &b));
        worst = worst.max(diff / abs_f64(&a));
    }
    Ok(worst)
}

/// F(w) = Λ(1/2 + w) for one descriptor.
#[derive(Clone, Debug)]
pub struct LFunction {
    desc: LFunctionDescriptor,
    /// Re s beyond which |L(s) - 1| < 1/2.
    sigma_principal: f64,
}

impl LFunction {
    pub fn new(desc: LFunctionDescriptor) -> Result<Self> {
        desc.validate()?;
        let b = desc.coeff_bound;
        let mut sigma = 2.0f64;
        // sum_{n>=2} B n^{-σ} <= B (2^{-σ} + 2^{1-σ}/(σ-1))
        while b * (2f64.powf(-sigma) + 2f64.powf(1.0 - sigma) / (sigma - 1.0)) >= 0.5 {
            sigma += 0.5;
        }
        Ok(Self {
            desc,
            sigma_principal: sigma,
        })
    }

    pub fn descriptor(&self) -> &LFunctionDescriptor {
        &self.desc
    }

    /// log L(s) continued along the horizontal line from Re s = sigma_principal.
    fn log_l(&self, s: &Complex, prec: u32) -> Result<Complex> {
        let d = &self.desc;
        if s.imag().is_zero() || s.real().to_f64() >= self.sigma_principal {
            let (l, _) = l_val_der(s, d, prec, false)?;
            if s.imag().is_zero() && l.real().is_sign_negative() {
                return Err(Error::BranchAmbiguity(format!(
                    "L(s) is negative at real s = {}",
                    s.real().to_f64()
                )));
            }
            return Ok(Complex::with_val(prec, l.ln_ref()));
        }
        let lp = 96;
        let t = Float::with_val(lp, s.imag());
        let sigma = s.real().to_f64();
        let at = |x: f64| -> Result<Complex> { Ok(l_val_der(&Complex::with_val(lp, (x, &t)), d, lp, false)?.0) };
        let mut x = self.sigma_principal;
        let mut prev = at(x)?;
        let mut acc = Complex::with_val(lp, prev.arg_ref()).real().to_f64();
        let mut h = 0.1f64;
        while x > sigma {
            let step = h.min(x - sigma);
            let x_new = if step == x - sigma { sigma } else { x - step };
            let next = at(x_new)?;
            let d_arg = Complex::with_val(lp, &next / &prev).arg().real().to_f64();
            if d_arg.abs() > PI / 4.0 {
                h = step / 2.0;
                if h < 1e-10 {
                    return Err(Error::BranchAmbiguity(format!(
                        "log L path at Im s = {} passes a zero near Re s = {x_new}",
                        t.to_f64()
                    )));
                }
                continue;
            }
            acc += d_arg;
            x = x_new;
            prev = next;
            h = (step * 1.5).min(0.25);
        }
        let (l, _) = l_val_der(s, d, prec, false)?;
        let mut out = Complex::with_val(prec, l.ln_ref());
        let winding = ((acc - out.imag().to_f64()) / (2.0 * PI)).round();
        if winding != 0.0 {
            *out.mut_imag() += Float::with_val(prec, pi(prec) * 2u32) * winding;
        }
        Ok(out)
    }

    /// (L'/L)(s)
    fn l_log_deriv(&self, s: &Complex, prec: u32) -> Result<Complex> {
        let (l, dl) = l_val_der(s, &self.desc, prec, true)?;
        Ok(Complex::with_val(prec, dl.expect("derivative requested") / &l))
    }
}

impl Completed for LFunction {
    fn label(&self) -> String {
        format!("L(N={})", self.desc.conductor)
    }

    fn shape(&self) -> GammaShape {
        self.desc.shape()
    }

    fn value(&self, w: &Complex, prec: u32) -> Result<Complex> {
        let w = right_half(w);
        let s = Complex::with_val(prec + 8, &w + 0.5f64);
        completed_prec(&s, &self.desc, prec)
    }

    fn log_value(&self, w: &Complex, prec: u32) -> Result<Complex> {
        let wp = prec + 16 + (abs_f64(w) + 2.0).log2().ceil() as u32;
        let w = right_half(w);
        let s = Complex::with_val(wp, &w + 0.5f64);
        let mut l = log_gamma_factor(&s, &self.desc, wp)?;
        l += self.log_l(&s, wp)?;
        Ok(Complex::with_val(prec, l))
    }

    fn log_deriv(&self, w: &Complex, prec: u32) -> Result<Complex> {
        let flip = is_left(w);
        let wp = prec + 16;
        let w = right_half(w);
        let s = Complex::with_val(wp, &w + 0.5f64);
        let d = &self.desc;
        let lnpi = Float::with_val(wp, pi(wp).ln_ref());
        let ln2pi = Float::with_val(wp, pi(wp) * 2u32).ln();
        let mut r = Complex::with_val(wp, Float::with_val(wp, d.conductor).ln() / 2u32);
        for mu in &d.mu {
            let a = Complex::with_val(wp, &s + *mu) / 2u32;
            let psi = digamma_prec(&Complex::with_val(wp, a), wp)?;
            r += Complex::with_val(wp, &psi - &lnpi) / 2u32;
        }
        for eta in &d.eta {
            let psi = digamma_prec(&Complex::with_val(wp, &s + *eta), wp)?;
            r += Complex::with_val(wp, &psi - &ln2pi);
        }
        r += self.l_log_deriv(&s, wp)?;
        if flip {
            r = -r;
        }
        Ok(Complex::with_val(prec, r))
    }

    fn log_deriv2_real(&self, w: &Float, prec: u32) -> Result<Float> {
        let wp = prec + 16;
        let s = Float::with_val(wp, w + 0.5f64);
        let d = &self.desc;
        let mut r = Float::new(wp);
        for mu in &d.mu {
            let a = Complex::with_val(wp, (Float::with_val(wp, &s + *mu) / 2u32, 0));
            r += Float::with_val(wp, trigamma_prec(&a, wp)?.real()) / 4u32;
        }
        for eta in &d.eta {
            let a = Complex::with_val(wp, (Float::with_val(wp, &s + *eta), 0));
            r += trigamma_prec(&a, wp)?.real();
        }
        // (L'/L)' by a central difference at doubled precision
        let hp = 2 * wp + 64;
        let h = Float::with_val(hp, 1) >> (wp / 2 + 24) as i32;
        let sp = Complex::with_val(hp, (Float::with_val(hp, &s + &h), 0));
        let sm = Complex::with_val(hp, (Float::with_val(hp, &s - &h), 0));
        let gp = self.l_log_deriv(&sp, hp)?;
        let gm = self.l_log_deriv(&sm, hp)?;
        let diff = Float::with_val(hp, gp.real() - gm.real());
        r += diff / Float::with_val(hp, &h * 2u32);
        Ok(Float::with_val(prec, r))
    }
}

#[derive(Clone, Debug)]
pub struct LScalingSolution {
    pub scaling: ScalingSolution,
    pub descriptor: LFunctionDescriptor,
    pub seed: f64,
}

impl LScalingSolution {
    pub fn to_json(&self) -> serde_json::Value {
        let s = &self.scaling;
        serde_json::json!({
            "n": s.n,
            "descriptor": serde_json::to_value(&self.descriptor).expect("descriptor serializes"),
            "lambda": float_to_string(&s.lambda),
            "seed": float_to_string(&Float::with_val(53, self.seed)),
            "residual_exact": float_to_string(&s.residual_exact),
            "residual_asymptotic": float_to_string(&s.residual_asymp),
            "phi2_at_1": float_to_string(s.phi2_at_1.real()),
        })
    }
}

/// Solves 2 − (λ/n) ∂_λ log F(λ) = 0 from the Lambert-W seed.
pub fn lambda_of_n_l(
    n: u32,
    d: &LFunctionDescriptor,
    ctx: &PrecisionContext,
) -> Result<LScalingSolution> {
    let f = LFunction::new(d.clone())?;
    let scaling = lambda_of_n_for(&f, n, ctx)?;
    Ok(LScalingSolution {
        scaling,
        descriptor: d.clone(),
        seed: d.shape().seed(n),
    })
}

/// (log F_ζ)'(λ) − (log F_ξ)'(λ) + 2λ/(λ² − 1/4), which vanishes since
/// Λ_ζ(s) = 2 ξ(s)/(s(s − 1)).
pub fn zeta_bridge_residual(lambda: &Float, ctx: &PrecisionContext) -> Result<Float> {
    let wp = ctx.bits() + 16;
    let w = Complex::with_val(wp, (lambda, 0));
    let lz = LFunction::new(LFunctionDescriptor::riemann_zeta())?.log_deriv(&w, wp)?;
    let lx = crate::xi::Xi.log_deriv(&w, wp)?;
    let l2 = Float::with_val(wp, lambda.square_ref()) - 0.25f64;
    let mut r = Float::with_val(wp, lz.real() - lx.real());
    r += Float::with_val(wp, lambda * 2u32) / l2;
    Ok(Float::with_val(ctx.bits(), r))
}

/// Direct Taylor value and leading-order model at one point.
#[derive(Clone, Debug)]
pub struct RepValue {
    pub z: Complex,
    pub t_value: Complex,
    pub model_value: Complex,
    pub in_ball: bool,
}

impl RepValue {
    pub fn relative_error(&self) -> f64 {
        let p = self.t_value.prec().0;
        abs_f64(&Complex::with_val(p, &self.t_value - &self.model_value)) / abs_f64(&self.t_value)
    }
}

/// Leading-order model of T_{2n−2}(F; λz) around the phase data of F.
pub struct LModel {
    pub phase: PhaseContext,
}

impl LModel {
    pub fn new(n: u32, d: &LFunctionDescriptor, ctx: &PrecisionContext) -> Result<Self> {
        if d.has_pole() {
            return Err(Error::Unsupported(
                "the Taylor representation needs an entire completed function; this descriptor has a pole at s = 1".into(),
            ));
        }
        let f = Arc::new(LFunction::new(d.clone())?);
        let scaling = lambda_of_n_for(f.as_ref(), n, ctx)?;
        let phase = PhaseContext::new(f, scaling, DEFAULT_DELTA, ctx)?;
        Ok(Self { phase })
    }

    fn f_at(&self, z: &Complex) -> Result<Complex> {
        let wp = self.phase.ctx().bits() + 16;
        let lz = Complex::with_val(wp, z * self.phase.lambda());
        self.phase.function().value(&lz, wp)
    }

    fn f_lambda_z2n(&self, z: &Complex, wp: u32) -> Result<Complex> {
        let pc = &self.phase;
        let fl = pc.function().value(&Complex::with_val(wp, (pc.lambda(), 0)), wp)?;
        let z2n = Complex::with_val(wp, z.pow(2 * pc.n()));
        Ok(Complex::with_val(wp, &z2n * &fl))
    }

    /// F(λz) χ(z) − z^{2n} F(λ) H₀(z)/√n, using e^{nφ} F(λz) = z^{2n} F(λ).
    pub fn bulk(&self, z: &Complex) -> Result<Complex> {
        let pc = &self.phase;
        let prec = pc.ctx().bits();
        let wp = prec + 32;
        let zr = Complex::with_val(wp, right_half(z));
        let mut m = if *zr.real() < 1 { self.f_at(z)? } else { Complex::new(wp) };
        let mut tail = self.f_lambda_z2n(z, wp)? * pc.h0(z)?;
        tail /= Float::with_val(wp, pc.n()).sqrt();
        m -= tail;
        Ok(Complex::with_val(prec, m))
    }

    /// F(λz) ½ erfc(i √n w(z)) for z in B_δ.
    pub fn erfc_form(&self, z: &Complex) -> Result<Complex> {
        let pc = &self.phase;
        let prec = pc.ctx().bits();
        let wp = prec + 32;
        let w = pc.w_map(z)?;
        let sn = Float::with_val(wp, pc.n()).sqrt();
        let arg = Complex::with_val(wp, &w * &sn) * Complex::with_val(wp, (0, 1));
        let e = erfc_prec(&Complex::with_val(wp, arg), wp);
        let m = Complex::with_val(wp, &e * self.f_at(z)?) / 2u32;
        Ok(Complex::with_val(prec, m))
    }

    /// |F(λ) z^{2n}|/√n, the size of the correction term.
    pub fn correction_scale(&self, z: &Complex) -> Result<f64> {
        let wp = self.phase.ctx().bits() + 32;
        Ok(abs_f64(&self.f_lambda_z2n(z, wp)?) / (self.phase.n() as f64).sqrt())
    }

    /// (erfc form − bulk form)/(z^{2n} F(λ)/√n) minus the O(1) local
    /// correction h₀ + 1/(2i√π w); the remainder is O(1/n).
    pub fn jump_remainder(&self, z: &Complex) -> Result<f64> {
        let wp = self.phase.ctx().bits() + 32;
        let jump = Complex::with_val(wp, self.erfc_form(z)? - self.bulk(z)?);
        let mut unit = self.f_lambda_z2n(z, wp)?;
        unit /= Float::with_val(wp, self.phase.n()).sqrt();
        let mut r = Complex::with_val(wp, &jump / &unit);
        r -= self.phase.local_correction(z)?;
        Ok(abs_f64(&r))
    }

    /// erfc form inside B_δ, bulk form outside.
    pub fn value(&self, z: &Complex) -> Result<(Complex, bool)> {
        if self.phase.in_ball(z)? {
            Ok((self.erfc_form(z)?, true))
        } else {
            Ok((self.bulk(z)?, false))
        }
    }

    /// The point 1 + r e^{iθ} just inside |φ| = δ², by bisection in r.
    pub fn ball_boundary_point(&self, theta: f64) -> Result<Complex> {
        let pc = &self.phase;
        let prec = pc.ctx().bits();
        let d2 = pc.delta * pc.delta;
        let at = |r: f64| cplx_polar(prec, r, theta);
        let size = |r: f64| -> Result<f64> { Ok(abs_f64(&pc.phi(&at(r))?)) };
        let mut lo = 0.0;
        let mut hi = pc.delta / (pc.curvature() / 2.0).sqrt();
        let mut tries = 0;
        while size(hi)? < d2 {
            lo = hi;
            hi *= 1.25;
            tries += 1;
            if tries > 20 {
                return Err(Error::BracketFailure(format!("no exit from B_delta along angle {theta}")));
            }
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if size(mid)? < d2 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(at(lo))
    }
}

fn cplx_polar(prec: u32, r: f64, theta: f64) -> Complex {
    Complex::with_val(prec, (1.0 + r * theta.cos(), r * theta.sin()))
}

/// Taylor polynomial of degree 2n − 2 for F together with its model.
pub struct LRepresentation {
    pub model: LModel,
    pub taylor: TaylorPolynomial,
}

impl LRepresentation {
    pub fn new(n: u32, d: &LFunctionDescriptor, ctx: &PrecisionContext) -> Result<Self> {
        let model = LModel::new(n, d, ctx)?;
        let opts = QuadratureOptions {
            assume_even: false,
            ..QuadratureOptions::default()
        };
        let f = model.phase.function().clone();
        let taylor = taylor_coeffs_of(f.as_ref(), 2 * n as usize - 2, ctx, opts)?;
        Ok(Self { model, taylor })
    }

    /// T_{2n−2}(F; λz)
    pub fn t_value(&self, z: &Complex) -> Complex {
        let lz = Complex::with_val(self.taylor.ctx.bits() + 16, z * self.model.phase.lambda());
        eval_taylor(&self.taylor, &lz)
    }

    pub fn evaluate(&self, z: &Complex) -> Result<RepValue> {
        let (model_value, in_ball) = self.model.value(z)?;
        Ok(RepValue {
            z: z.clone(),
            t_value: self.t_value(z),
            model_value,
            in_ball,
        })
    }
}

/// Direct Taylor value and leading-order model of F at λz.
pub fn taylor_rep_l(
    z: &Complex,
    n: u32,
    d: &LFunctionDescriptor,
    ctx: &PrecisionContext,
) -> Result<RepValue> {
    LRepresentation::new(n, d, ctx)?.evaluate(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::cplx;

    #[test]
    fn descriptor_round_trip() {
        let d = LFunctionDescriptor::dirichlet_beta();
        let j = d.to_json();
        assert!(j.contains("\"N\":4"));
        assert!(j.contains("dirichlet_character"));
        assert_eq!(LFunctionDescriptor::from_json(&j).unwrap(), d);
        let mut bad = d.clone();
        bad.mu.clear();
        assert!(matches!(bad.validate(), Err(Error::Invalid(_))));
        assert!(LFunctionDescriptor::riemann_zeta().has_pole());
        assert!(!d.has_pole());
    }

    #[test]
    fn gamma_c_duplication() {
        let p = 128;
        let s = cplx(p, 2.7, 0.0);
        let c = gamma_c(&s, p).unwrap();
        let r = Complex::with_val(p, gamma_r(&s, p).unwrap() * gamma_r(&cplx(p, 3.7, 0.0), p).unwrap());
        let rel = abs_f64(&Complex::with_val(p, &c - &r)) / abs_f64(&c);
        assert!(rel < 1e-35, "{rel}");
    }

    #[test]
    fn series_and_hurwitz_agree() {
        let d = LFunctionDescriptor::dirichlet_beta();
        let p = 128;
        let s = cplx(p, 20.0, 3.0);
        let a = dirichlet_series(&s, &d, p).unwrap();
        let (b, _) = hurwitz_l(&s, &d, p, false).unwrap();
        assert!(abs_f64(&Complex::with_val(p, &a - &b)) < 1e-35);
        assert!(matches!(
            dirichlet_series(&cplx(p, 1.2, 0.0), &d, p),
            Err(Error::TruncationFailure(_))
        ));
        // beta(2) = Catalan's constant
        let (c, _) = l_val_der(&cplx(p, 2.0, 0.0), &d, p, false).unwrap();
        assert!((c.real().to_f64() - 0.915_965_594_177_219).abs() < 1e-15);
    }

    #[test]
    fn zeta_descriptor_matches_xi() {
        let ctx = PrecisionContext::new(40).unwrap();
        let p = ctx.bits();
        let s = cplx(p, 3.0, 0.0);
        let l = completed_l(&s, &LFunctionDescriptor::riemann_zeta(), &ctx).unwrap();
        let x = crate::xi::eval_xi(&s, &ctx).unwrap();
        let expect = Complex::with_val(p, &x * 2u32) / 6u32;
        let rel = abs_f64(&Complex::with_val(p, &l - &expect)) / abs_f64(&expect);
        assert!(rel < 1e-38, "{rel}");
    }

    #[test]
    fn log_value_consistent() {
        let f = LFunction::new(LFunctionDescriptor::dirichlet_beta()).unwrap();
        let p = 128;
        for (re, im) in [(0.2, 5.0), (3.0, 40.0), (60.0, 0.0), (0.0, 13.0)] {
            let w = cplx(p, re, im);
            let l = f.log_value(&w, p).unwrap();
            let v = f.value(&w, p).unwrap();
            let back = Complex::with_val(p, l.exp_ref());
            let rel = abs_f64(&Complex::with_val(p, &back - &v)) / abs_f64(&v);
            assert!(rel < 1e-30, "w = {re}+{im}i: {rel}");
        }
        let d = f.log_deriv(&cplx(p, 2.0, 7.0), p).unwrap();
        let h = 2f64.powi(-40);
        let lp = f.log_value(&cplx(p, 2.0 + h, 7.0), p).unwrap();
        let lm = f.log_value(&cplx(p, 2.0 - h, 7.0), p).unwrap();
        let fd = Complex::with_val(p, &lp - &lm) / (2.0 * h);
        assert!(abs_f64(&Complex::with_val(p, &d - &fd)) < 1e-18);
    }

    #[test]
    fn scaling_seed_specialises_to_xi() {
        let shape = LFunctionDescriptor::riemann_zeta().shape();
        let w = crate::specfun::lambert_w0_f64(2.0 * 102.0 / PI);
        assert!((shape.seed(102) - 4.0 * 102.0 / w).abs() < 1e-12);
    }

    #[test]
    fn rejects_pole_descriptor() {
        let ctx = PrecisionContext::new(20).unwrap();
        let r = LModel::new(16, &LFunctionDescriptor::riemann_zeta(), &ctx);
        assert!(matches!(r, Err(Error::Unsupported(_))));
    }

    #[test]
    fn boundary_jump_remainder() {
        let ctx = PrecisionContext::new(30).unwrap();
        let m = LModel::new(64, &LFunctionDescriptor::dirichlet_beta(), &ctx).unwrap();
        for theta in [0.3, 1.2, 2.0] {
            let z = m.ball_boundary_point(theta).unwrap();
            assert!(m.phase.in_ball(&z).unwrap());
            assert!(m.jump_remainder(&z).unwrap() * 64.0 < 10.0);
        }
    }
}
