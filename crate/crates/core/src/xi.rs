//! The completed zeta function, f(z) = xi(1/2 + z), and its Maclaurin data.

use std::f64::consts::PI;

use rayon::prelude::*;
use rug::float::Constant;
use rug::{Complex, Float};
use serde::{Deserialize, Serialize};

use crate::completed::{right_half, Completed, GammaShape};
use crate::error::{Error, Result};
use crate::precision::{
    abs_f64, digits_to_bits, float_to_string, log10_abs, parse_float, pi, ComplexAP,
    PrecisionContext,
};
use crate::specfun::{
    digamma_prec, lgamma_prec, trigamma_prec, zeta_prec, zeta_val_der,
};

fn is_one(s: &Complex) -> bool {
    s.imag().is_zero() && *s.real() == 1
}

/// G(s) = (s - 1) zeta(s), entire.
fn g_val(s: &Complex, prec: u32) -> Result<Complex> {
    if is_one(s) {
        return Ok(Complex::with_val(prec, (1, 0)));
    }
    let z = zeta_prec(s, prec)?;
    let sm1 = Complex::with_val(prec, s - 1u32);
    Ok(Complex::with_val(prec, &z * &sm1))
}

/// G'(s)/G(s) = [zeta + (s-1) zeta'] / [(s-1) zeta]; Euler's constant at s = 1.
fn g_log_deriv(s: &Complex, prec: u32) -> Result<Complex> {
    if is_one(s) {
        return Ok(Complex::with_val(prec, Float::with_val(prec, Constant::Euler)));
    }
    let wp = prec + 16;
    let (z, dz) = zeta_val_der(s, wp, true)?;
    let dz = dz.expect("derivative requested");
    let sm1 = Complex::with_val(wp, s - 1u32);
    let mut num = Complex::with_val(wp, &sm1 * &dz);
    num += &z;
    let den = Complex::with_val(wp, &sm1 * &z);
    Ok(Complex::with_val(prec, num / den))
}

/// The Riemann xi function in the normalisation f(w) = xi(1/2 + w).
#[derive(Clone, Copy, Debug, Default)]
pub struct Xi;

impl Xi {
    /// xi(s), evaluated at the representative with Re s >= 1/2.
    pub(crate) fn xi_prec(s: &Complex, prec: u32) -> Result<Complex> {
        let wp = prec + 32 + (abs_f64(s) + 2.0).log2().ceil() as u32;
        let mut s = Complex::with_val(wp, s);
        if *s.real() < 0.5 {
            s = Complex::with_val(wp, 1u32 - &s);
        }
        if is_one(&s) {
            return Ok(Complex::with_val(prec, (0.5, 0)));
        }
        let half_s = Complex::with_val(wp, &s / 2u32);
        let mut e = lgamma_prec(&half_s, wp)?;
        let lnpi = Float::with_val(wp, pi(wp).ln_ref());
        e -= Complex::with_val(wp, &half_s * &lnpi);
        e -= Float::with_val(wp, 2u32).ln();
        let mut v = e.exp();
        v *= &s;
        v *= g_val(&s, wp)?;
        Ok(Complex::with_val(prec, v))
    }

    fn log_g(s: &Complex, prec: u32) -> Result<Complex> {
        if s.imag().is_zero() {
            let g = g_val(s, prec)?;
            return Ok(Complex::with_val(prec, g.ln_ref()));
        }
        if *s.real() >= 2 {
            let sm1 = Complex::with_val(prec, s - 1u32);
            let z = zeta_prec(s, prec)?;
            let mut l = Complex::with_val(prec, sm1.ln_ref());
            l += Complex::with_val(prec, z.ln_ref());
            return Ok(l);
        }
        // Walk left from Re s = 2, where both factors have positive real
        // part, accumulating arg G at low precision.
        let lp = 96;
        let t = Float::with_val(lp, s.imag());
        let sigma = s.real().to_f64();
        let at = |x: f64| g_val(&Complex::with_val(lp, (x, &t)), lp);
        let start = Complex::with_val(lp, (2, &t));
        let mut acc = {
            let sm1 = Complex::with_val(lp, &start - 1u32);
            let z = zeta_prec(&start, lp)?;
            sm1.arg().real().to_f64() + z.arg().real().to_f64()
        };
        let mut g_prev = at(2.0)?;
        let mut x = 2.0;
        let mut h: f64 = 0.1;
        while x > sigma {
            let step = h.min(x - sigma);
            let x_new = if step == x - sigma { sigma } else { x - step };
            let g_new = if x_new == sigma {
                g_val(&Complex::with_val(lp, s), lp)?
            } else {
                at(x_new)?
            };
            let ratio = Complex::with_val(lp, &g_new / &g_prev);
            let d = ratio.arg().real().to_f64();
            if d.abs() > PI / 4.0 {
                h = step / 2.0;
                if h < 1e-10 {
                    return Err(Error::BranchAmbiguity(format!(
                        "log xi path at Im s = {} passes a zero near Re s = {x_new}",
                        t.to_f64()
                    )));
                }
                continue;
            }
            acc += d;
            x = x_new;
            g_prev = g_new;
            h = (step * 1.5).min(0.25);
        }
        let g = g_val(s, prec)?;
        let mut l = Complex::with_val(prec, g.ln_ref());
        let winding = ((acc - l.imag().to_f64()) / (2.0 * PI)).round();
        if winding != 0.0 {
            *l.mut_imag() += Float::with_val(prec, pi(prec) * 2u32) * winding;
        }
        Ok(l)
    }
}

impl Completed for Xi {
    fn label(&self) -> String {
        "xi".into()
    }

    fn value(&self, w: &Complex, prec: u32) -> Result<Complex> {
        let w = right_half(w);
        let s = Complex::with_val(prec + 8, &w + 0.5f64);
        Xi::xi_prec(&s, prec)
    }

    fn log_value(&self, w: &Complex, prec: u32) -> Result<Complex> {
        let wp = prec + 16 + (abs_f64(w) + 2.0).log2().ceil() as u32;
        let w = right_half(w);
        let s = Complex::with_val(wp, &w + 0.5f64);
        let half_s = Complex::with_val(wp, &s / 2u32);
        let mut l = lgamma_prec(&half_s, wp)?;
        let lnpi = Float::with_val(wp, pi(wp).ln_ref());
        l -= Complex::with_val(wp, &half_s * &lnpi);
        l -= Float::with_val(wp, 2u32).ln();
        l += Complex::with_val(wp, s.ln_ref());
        l += Xi::log_g(&s, wp)?;
        Ok(Complex::with_val(prec, l))
    }

    fn log_deriv(&self, w: &Complex, prec: u32) -> Result<Complex> {
        let flip = w.real().is_sign_negative() && !w.real().is_zero();
        let wp = prec + 16;
        let w = right_half(w);
        let s = Complex::with_val(wp, &w + 0.5f64);
        let half_s = Complex::with_val(wp, &s / 2u32);
        let mut d = digamma_prec(&half_s, wp)?;
        d -= Float::with_val(wp, pi(wp).ln_ref());
        d /= 2u32;
        d += Complex::with_val(wp, s.recip_ref());
        d += g_log_deriv(&s, wp)?;
        if flip {
            d = -d;
        }
        Ok(Complex::with_val(prec, d))
    }

    fn log_deriv2_real(&self, w: &Float, prec: u32) -> Result<Float> {
        let wp = prec + 16;
        let s = Float::with_val(wp, w + 0.5f64);
        let sc = Complex::with_val(wp, (&s, 0));
        let half = Complex::with_val(wp, &sc / 2u32);
        let tri = trigamma_prec(&half, wp)?;
        let mut d = Float::with_val(wp, tri.real() / 4u32);
        d -= Float::with_val(wp, s.square_ref()).recip();
        // (G'/G)' by a central difference at doubled precision
        let hp = 2 * wp + 64;
        let h = Float::with_val(hp, 1) >> (wp / 2 + 24) as i32;
        let sp = Complex::with_val(hp, (Float::with_val(hp, &s + &h), 0));
        let sm = Complex::with_val(hp, (Float::with_val(hp, &s - &h), 0));
        let gp = g_log_deriv(&sp, hp)?;
        let gm = g_log_deriv(&sm, hp)?;
        let diff = Float::with_val(hp, gp.real() - gm.real());
        let dd = diff / Float::with_val(hp, &h * 2u32);
        d += dd;
        Ok(Float::with_val(prec, d))
    }

    fn shape(&self) -> GammaShape {
        GammaShape {
            j: 1,
            k: 0,
            conductor: 1.0,
        }
    }
}

/// xi(z) at the context precision; xi(0) = xi(1) = 1/2.
pub fn eval_xi(z: &Complex, ctx: &PrecisionContext) -> Result<Complex> {
    Xi::xi_prec(z, ctx.bits())
}

/// f(z) = xi(1/2 + z).
pub fn eval_f(z: &Complex, ctx: &PrecisionContext) -> Result<Complex> {
    Xi.value(z, ctx.bits())
}

/// Maclaurin polynomial a_0 + a_1 z + ... + a_degree z^degree.
#[derive(Clone, Debug, PartialEq)]
pub struct TaylorPolynomial {
    pub degree: usize,
    pub coeffs: Vec<Complex>,
    pub radius_used: f64,
    pub quad_points: usize,
    pub ctx: PrecisionContext,
    /// Odd coefficients are identically zero.
    pub even: bool,
    pub label: String,
}

#[derive(Serialize, Deserialize)]
struct TaylorJson {
    label: String,
    degree: usize,
    radius: String,
    digits: u32,
    guard_digits: u32,
    quad_points: usize,
    even: bool,
    coeffs: Vec<ComplexAP>,
}

impl TaylorPolynomial {
    pub fn to_json(&self) -> Result<String> {
        let j = TaylorJson {
            label: self.label.clone(),
            degree: self.degree,
            radius: float_to_string(&Float::with_val(64, self.radius_used)),
            digits: self.ctx.digits,
            guard_digits: self.ctx.guard_digits,
            quad_points: self.quad_points,
            even: self.even,
            coeffs: self.coeffs.iter().map(ComplexAP::from_complex).collect(),
        };
        Ok(serde_json::to_string_pretty(&j)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: TaylorJson = serde_json::from_str(s)?;
        let ctx = PrecisionContext::new(j.digits)?.with_guard(j.guard_digits);
        let prec = ctx.bits();
        if j.coeffs.len() != j.degree + 1 {
            return Err(Error::Invalid(format!(
                "degree {} but {} coefficients",
                j.degree,
                j.coeffs.len()
            )));
        }
        let coeffs = j
            .coeffs
            .iter()
            .map(|c| c.to_complex(prec))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            degree: j.degree,
            coeffs,
            radius_used: parse_float(&j.radius, 64)?.to_f64(),
            quad_points: j.quad_points,
            ctx,
            even: j.even,
            label: j.label,
        })
    }

    /// Scaled even coefficients b_m = a_{2m} lambda^{2m}, so that
    /// T(lambda z) = sum_m b_m (z^2)^m.
    pub fn rescaled_even(&self, lambda: &Float, prec: u32) -> Vec<Complex> {
        let l2 = Float::with_val(prec, lambda.square_ref());
        let mut p = Float::with_val(prec, 1);
        let mut out = Vec::with_capacity(self.degree / 2 + 1);
        for m in 0..=self.degree / 2 {
            out.push(Complex::with_val(prec, &self.coeffs[2 * m] * &p));
            p *= &l2;
        }
        out
    }
}

/// Polynomial value by Horner's rule at extra precision.
pub fn eval_taylor(t: &TaylorPolynomial, z: &Complex) -> Complex {
    let prec = t.ctx.bits();
    let wp = prec + 64;
    let z = Complex::with_val(wp, z);
    let mut acc = Complex::new(wp);
    if t.even {
        let u = Complex::with_val(wp, z.square_ref());
        for m in (0..=t.degree / 2).rev() {
            acc *= &u;
            acc += &t.coeffs[2 * m];
        }
    } else {
        for c in t.coeffs.iter().rev() {
            acc *= &z;
            acc += c;
        }
    }
    Complex::with_val(prec, acc)
}

/// Options for the Cauchy quadrature.
#[derive(Clone, Copy, Debug)]
pub struct QuadratureOptions {
    /// Use F(-w) = F(w) and F(conj w) = conj F(w): a quarter of the nodes,
    /// odd coefficients set to zero.
    pub assume_even: bool,
    /// Maximum number of node doublings before giving up.
    pub max_doublings: u32,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            assume_even: true,
            max_doublings: 3,
        }
    }
}

fn unit_root(j: usize, n: usize, prec: u32) -> Complex {
    let theta = Float::with_val(prec, pi(prec) * 2u32) * j as u64 / n as u64;
    let (s, c) = theta.sin_cos(Float::new(prec));
    Complex::with_val(prec, (c, s))
}

/// Trapezoidal Cauchy sums on |w| = r with n nodes.
fn cauchy_coeffs(
    func: &dyn Completed,
    r: &Float,
    nodes: usize,
    degree: usize,
    even: bool,
    wp: u32,
) -> Result<Vec<Complex>> {
    let count = if even { nodes / 4 + 1 } else { nodes };
    let values: Vec<(Complex, Complex)> = (0..count)
        .into_par_iter()
        .map(|j| {
            let e = unit_root(j, nodes, wp);
            let w = Complex::with_val(wp, &e * r);
            func.value(&w, wp).map(|v| (v, e))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut out = vec![Complex::new(wp); degree + 1];
    if even {
        let m = nodes / 4;
        let kmax = degree / 2;
        let sums: Vec<Vec<Float>> = values
            .par_iter()
            .enumerate()
            .map(|(j, (v, e))| {
                // contributions Re(F_j e^{-i k theta_j}) for k = 0, 2, 4, ...
                let mut step = Complex::with_val(wp, e.conj_ref());
                step.square_mut();
                let mut pw = Complex::with_val(wp, (1, 0));
                let mut row = Vec::with_capacity(kmax + 1);
                for k in 0..=kmax {
                    let term = Complex::with_val(wp, v * &pw);
                    let mut re = Float::with_val(wp, term.real());
                    if j == m {
                        // the node i r is self-paired
                        re = Float::with_val(wp, v.real());
                        if k % 2 == 1 {
                            re = -re;
                        }
                    }
                    if j != 0 && j != m {
                        re *= 2u32;
                    }
                    row.push(re);
                    pw *= &step;
                }
                row
            })
            .collect();
        let mut rk = Float::with_val(wp, 1);
        let r2 = Float::with_val(wp, r.square_ref());
        for k in 0..=kmax {
            let mut acc = Float::new(wp);
            for row in &sums {
                acc += &row[k];
            }
            acc *= 2u32;
            acc /= nodes as u64;
            acc /= &rk;
            out[2 * k] = Complex::with_val(wp, (acc, 0));
            rk *= &r2;
        }
    } else {
        let rows: Vec<Vec<Complex>> = values
            .par_iter()
            .map(|(v, e)| {
                let step = Complex::with_val(wp, e.conj_ref());
                let mut pw = Complex::with_val(wp, (1, 0));
                let mut row = Vec::with_capacity(degree + 1);
                for _ in 0..=degree {
                    row.push(Complex::with_val(wp, v * &pw));
                    pw *= &step;
                }
                row
            })
            .collect();
        let mut rk = Float::with_val(wp, 1);
        for (k, slot) in out.iter_mut().enumerate() {
            let mut acc = Complex::new(wp);
            for row in &rows {
                acc += &row[k];
            }
            acc /= nodes as u64;
            acc /= &rk;
            *slot = acc;
            rk *= r;
        }
    }
    Ok(out)
}

/// Rounding level of each Cauchy coefficient: 2^-(wp - 32) max|F| / r^k,
/// with max|F| estimated from the coefficients themselves.
fn rounding_floor(c: &[Complex], r: &Float, wp: u32) -> Vec<Float> {
    let mut rk = Float::with_val(wp, 1);
    let mut m = Float::new(wp);
    for ck in c {
        let v = Float::with_val(wp, ck.abs_ref()) * &rk;
        if v > m {
            m = v;
        }
        rk *= r;
    }
    m >>= (wp - 32) as i32;
    c.iter()
        .map(|_| {
            let f = m.clone();
            m /= r;
            f
        })
        .collect()
}

/// Working decimal digits for coefficients certified to `ctx`: the
/// quadrature loses log10(max|F| on the circle / |a_0|) digits.
fn working_digits(func: &dyn Completed, r_max: f64, ctx: &PrecisionContext) -> Result<u32> {
    let p = 128;
    let top = func.value(&Complex::with_val(p, (r_max, 0)), p)?;
    let bottom = func.value(&Complex::new(p), p)?;
    let loss = (log10_abs(&top) - log10_abs(&bottom)).max(0.0);
    Ok(ctx.total_digits() + loss.ceil() as u32 + 10)
}

/// Maclaurin coefficients of any completed function up to `degree`.
pub fn taylor_coeffs_of(
    func: &dyn Completed,
    degree: usize,
    ctx: &PrecisionContext,
    opts: QuadratureOptions,
) -> Result<TaylorPolynomial> {
    if degree < 2 || (opts.assume_even && degree % 2 == 1) {
        return Err(Error::Invalid(format!(
            "degree must be an even integer >= 2, got {degree}"
        )));
    }
    let n = (degree / 2 + 1) as u32;
    let r1f = func.scaling_seed(n).max(2.0);
    let r2f = 1.5 * r1f;
    let wd = working_digits(func, r2f, ctx)?;
    let wp = digits_to_bits(wd);
    let r1 = Float::with_val(wp, r1f);
    let r2 = Float::with_val(wp, r2f);
    let tol = ctx.guarded_tol();
    let mut nodes = 8 * degree.max(4);
    nodes = nodes.div_ceil(4) * 4;
    for attempt in 0..=opts.max_doublings {
        let c1 = cauchy_coeffs(func, &r1, nodes, degree, opts.assume_even, wp)?;
        let c2 = cauchy_coeffs(func, &r2, nodes, degree, opts.assume_even, wp)?;
        let floor1 = rounding_floor(&c1, &r1, wp);
        let floor2 = rounding_floor(&c2, &r2, wp);
        let mut worst: Option<(usize, f64)> = None;
        for k in 0..=degree {
            if opts.assume_even && k % 2 == 1 {
                continue;
            }
            let d = Complex::with_val(wp, &c1[k] - &c2[k]);
            let scale = Float::with_val(wp, c2[k].abs_ref());
            let dd = Float::with_val(wp, d.abs_ref());
            let mut bound = Float::with_val(wp, &scale * &tol);
            // coefficients that vanish (odd ones of an even F) sit at the
            // quadrature rounding level
            let noise = Float::with_val(wp, &floor1[k] + &floor2[k]);
            if noise > bound {
                bound = noise;
            }
            if dd > bound {
                let rel = crate::precision::log10_float(&dd) - crate::precision::log10_float(&scale);
                if worst.is_none_or(|(_, w)| rel > w) {
                    worst = Some((k, rel));
                }
            }
        }
        match worst {
            None => {
                let prec = ctx.bits();
                let mut coeffs = Vec::with_capacity(degree + 1);
                for (k, c) in c1.into_iter().enumerate() {
                    if opts.assume_even && k % 2 == 1 {
                        coeffs.push(Complex::new(prec));
                        continue;
                    }
                    let im = Float::with_val(64, c.imag().abs_ref());
                    let re = Float::with_val(64, c.real().abs_ref());
                    if !opts.assume_even
                        && im > Float::with_val(64, &re * &tol)
                        && im > tol
                        && im > Float::with_val(64, &floor1[k] * 4u32)
                    {
                        return Err(Error::Consistency(format!(
                            "coefficient {k} has imaginary part {} for a real-coefficient function",
                            im.to_f64()
                        )));
                    }
                    coeffs.push(Complex::with_val(prec, (c.real(), 0)));
                }
                if *coeffs[0].real() <= 0 {
                    return Err(Error::Consistency("a_0 is not positive".into()));
                }
                return Ok(TaylorPolynomial {
                    degree,
                    coeffs,
                    radius_used: r1f,
                    quad_points: nodes,
                    ctx: *ctx,
                    even: opts.assume_even,
                    label: func.label(),
                });
            }
            Some((k, rel)) if attempt == opts.max_doublings => {
                return Err(Error::Consistency(format!(
                    "radii {r1f:.3} and {r2f:.3} disagree at coefficient {k} (relative 1e{rel:.1}) with {nodes} nodes"
                )));
            }
            Some(_) => nodes *= 2,
        }
    }
    unreachable!("loop returns on its last attempt")
}

/// Maclaurin coefficients of f(z) = xi(1/2 + z) up to the even degree given.
pub fn taylor_coeffs(max_degree: usize, ctx: &PrecisionContext) -> Result<TaylorPolynomial> {
    taylor_coeffs_of(&Xi, max_degree, ctx, QuadratureOptions::default())
}

/// Scan step for sign changes of xi(1/2 + it).
const SCAN_STEP: f64 = 0.05;

/// xi(1/2 + it), real for real t.
fn xi_on_line(t: &Float, prec: u32) -> Result<Float> {
    let w = Complex::with_val(prec, (0, t));
    let v = Xi.value(&w, prec)?;
    Ok(v.real().clone())
}

/// Ordinates 0 < t_1 < t_2 < ... <= t_max of zeros of xi(1/2 + it), located
/// by sign changes on a grid and refined by the Illinois method.
pub fn critical_line_zeros(t_max: f64, ctx: &PrecisionContext) -> Result<Vec<Float>> {
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(Error::Invalid(format!("t_max must be positive, got {t_max}")));
    }
    let steps = (t_max / SCAN_STEP).ceil() as usize;
    let lp = 96;
    let signs: Vec<bool> = (0..=steps)
        .into_par_iter()
        .map(|k| {
            let t = Float::with_val(lp, (k as f64 * SCAN_STEP).min(t_max));
            xi_on_line(&t, lp).map(|v| v.is_sign_positive())
        })
        .collect::<Result<Vec<_>>>()?;
    let brackets: Vec<usize> = (0..steps).filter(|&k| signs[k] != signs[k + 1]).collect();
    let prec = ctx.bits();
    brackets
        .into_par_iter()
        .map(|k| {
            let a = Float::with_val(prec, k as f64 * SCAN_STEP);
            let b = Float::with_val(prec, ((k + 1) as f64 * SCAN_STEP).min(t_max));
            illinois(|t| xi_on_line(t, prec + 16), a, b, prec)
        })
        .collect()
}

/// Root of a continuous function on [a, b] with a sign change.
fn illinois<F>(f: F, mut a: Float, mut b: Float, prec: u32) -> Result<Float>
where
    F: Fn(&Float) -> Result<Float>,
{
    let mut fa = f(&a)?;
    let mut fb = f(&b)?;
    let mut side = 0i8;
    for _ in 0..4 * prec {
        let num = Float::with_val(prec, &fb * Float::with_val(prec, &b - &a));
        let den = Float::with_val(prec, &fb - &fa);
        let c = Float::with_val(prec, &b - num / den);
        let fc = f(&c)?;
        if fc.is_zero() {
            return Ok(c);
        }
        if fc.is_sign_positive() == fb.is_sign_positive() {
            b = c;
            fb = fc;
            if side == 1 {
                fa /= 2u32;
            }
            side = 1;
        } else {
            a = c;
            fa = fc;
            if side == -1 {
                fb /= 2u32;
            }
            side = -1;
        }
        let w = Float::with_val(prec, &b - &a).abs();
        if w <= Float::with_val(prec, b.abs_ref()) >> (prec as i32 - 4) {
            break;
        }
    }
    Ok(if Float::with_val(prec, fa.abs_ref()) < Float::with_val(prec, fb.abs_ref()) {
        a
    } else {
        b
    })
}
