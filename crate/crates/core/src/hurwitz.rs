//! Super-exponential convergence of the Taylor zeros that approach zeros of
//! xi: measured errors |lambda z - i t_j|, the predicted exponent, the small
//! factor rho(n) and r_{n,s}.

use rug::ops::Pow;
use rug::{Complex, Float};
use serde::Serialize;

use crate::completed::Completed;
use crate::error::{Error, Result};
use crate::phase::lambda_of_n;
use crate::poly::{horner_with_derivative, newton_polish};
use crate::precision::{abs_f64, float_to_string, log10_float, pi, PrecisionContext};
use crate::specfun::lambert_w0_f64;
use crate::xi::{critical_line_zeros, taylor_coeffs, TaylorPolynomial, Xi};

/// Base-10 values (mantissa, exponent) of the reference Hurwitz errors at
/// n = 102, k = 1..11.
const TABLE2: [(f64, i32); 11] = [
    (3.4293, -34),
    (6.9534, -32),
    (1.4748, -30),
    (9.8245, -26),
    (6.3374, -24),
    (7.1106, -21),
    (1.5374, -18),
    (6.5531, -17),
    (3.6990, -13),
    (6.4702, -12),
    (5.2363, -6),
];

pub fn reference_table2(k: usize) -> (f64, i32) {
    TABLE2[k - 1]
}

/// Smallest coefficient precision accepted for the table at n = 102.
pub const TABLE2_MIN_DIGITS: u32 = 300;

#[derive(Clone, Debug)]
pub struct ConvergenceRow {
    pub n: u32,
    pub lambda: Float,
    pub z_hurwitz: Complex,
    pub abs_err: Float,
    /// exp of the predicted exponent with m = 1
    pub bound: Float,
    pub rho: Float,
    pub r_ns: Float,
}

#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    pub j: usize,
    /// ordinate t_j of s = i t_j
    pub t: Float,
    pub rows: Vec<ConvergenceRow>,
    /// max over rows of abs_err / bound
    pub constant: f64,
}

#[derive(Serialize)]
struct RowJson {
    n: u32,
    lambda: String,
    z_re: String,
    z_im: String,
    abs_err: String,
    bound: String,
    rho: String,
    r_ns: String,
}

impl ConvergenceReport {
    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct J {
            j: usize,
            t: String,
            constant: String,
            rows: Vec<RowJson>,
        }
        let j = J {
            j: self.j,
            t: float_to_string(&self.t),
            constant: float_to_string(&Float::with_val(53, self.constant)),
            rows: self.rows.iter().map(row_json).collect(),
        };
        Ok(serde_json::to_string_pretty(&j)?)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("j,n,lambda,z_re,z_im,abs_err,bound,rho,r_ns\n");
        for r in &self.rows {
            let j = row_json(r);
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                self.j, j.n, j.lambda, j.z_re, j.z_im, j.abs_err, j.bound, j.rho, j.r_ns
            ));
        }
        s
    }
}

fn row_json(r: &ConvergenceRow) -> RowJson {
    RowJson {
        n: r.n,
        lambda: float_to_string(&r.lambda),
        z_re: float_to_string(r.z_hurwitz.real()),
        z_im: float_to_string(r.z_hurwitz.imag()),
        abs_err: float_to_string(&r.abs_err),
        bound: float_to_string(&r.bound),
        rho: float_to_string(&r.rho),
        r_ns: float_to_string(&r.r_ns),
    }
}

/// -2n (log|lambda/s| - 1 + 1/W - (7/8n) W + (1/4n) log n), W = W(2n/pi).
pub fn predicted_exponent(n: u32, lambda: f64, s_abs: f64) -> f64 {
    let nf = n as f64;
    let w = lambert_w0_f64(2.0 * nf / std::f64::consts::PI);
    -2.0 * nf * ((lambda / s_abs).ln() - 1.0 + 1.0 / w - 7.0 * w / (8.0 * nf) + nf.ln() / (4.0 * nf))
}

/// rho = |s^{2n} f(lambda) / (lambda^{2n} sqrt n)|^{1/m} and
/// r = log|lambda| - log|s| - (1/n) log(m! / |f^(m)(s)|).
pub fn rho_and_r(n: u32, s: &Complex, m: u32, ctx: &PrecisionContext) -> Result<(Float, Float)> {
    if m == 0 {
        return Err(Error::Invalid("order m must be positive".into()));
    }
    let sc = lambda_of_n(n, ctx)?;
    rho_and_r_at(n, &sc.lambda, s, m, ctx)
}

fn rho_and_r_at(
    n: u32,
    lambda: &Float,
    s: &Complex,
    m: u32,
    ctx: &PrecisionContext,
) -> Result<(Float, Float)> {
    let prec = ctx.bits();
    let wp = prec + 32;
    let lam_c = Complex::with_val(wp, (lambda, 0));
    let log_f_lam = Xi.log_value(&lam_c, wp)?.real().clone();
    let log_s = Float::with_val(wp, Float::with_val(wp, s.abs_ref()).ln_ref());
    let log_l = Float::with_val(wp, lambda.ln_ref());
    let nf = Float::with_val(wp, n);
    let mut lr = Float::with_val(wp, &log_s - &log_l) * 2u32 * n;
    lr += &log_f_lam;
    lr -= Float::with_val(wp, nf.ln_ref()) / 2u32;
    let rho = Float::with_val(prec, (lr / m).exp());
    let deriv = derivative(s, m, wp)?;
    let dabs = Float::with_val(wp, deriv.abs_ref());
    let floor = crate::precision::pow10(-((ctx.digits / 2) as i64), wp);
    if dabs < floor {
        return Err(Error::DerivativeUnderflow(format!(
            "|f^({m})(s)| = {:.3e}",
            dabs.to_f64()
        )));
    }
    let mf = Float::with_val(wp, Float::factorial(m));
    let mut r = Float::with_val(wp, &log_l - &log_s);
    r -= Float::with_val(wp, (mf / dabs).ln()) / n;
    Ok((rho, Float::with_val(prec, r)))
}

/// f^(m)(s) by the trapezoidal Cauchy integral on |w - s| = 1/4.
fn derivative(s: &Complex, m: u32, prec: u32) -> Result<Complex> {
    let nodes = 64 + 2 * prec as usize / 3;
    let r = Float::with_val(prec, 0.25);
    let mut acc = Complex::new(prec);
    for j in 0..nodes {
        let theta = Float::with_val(prec, pi(prec) * 2u32) * j as u64 / nodes as u64;
        let (sn, cs) = theta.sin_cos(Float::new(prec));
        let e = Complex::with_val(prec, (cs, sn));
        let w = Complex::with_val(prec, &e * &r) + s;
        let v = Xi.value(&w, prec)?;
        let em = Complex::with_val(prec, e.pow(m));
        acc += v / em;
    }
    acc /= nodes as u64;
    acc /= Float::with_val(prec, r.pow(m));
    acc *= Float::with_val(prec, Float::factorial(m));
    Ok(acc)
}

/// log F(lambda) and its leading model
/// (lambda/2) log(lambda/(2 pi e)) + (7/4) log(lambda/2 pi) + log(2 sqrt 2 pi).
pub fn log_f_lambda_check(lambda: &Float, prec: u32) -> Result<(f64, f64)> {
    let exact = Xi
        .log_value(&Complex::with_val(prec, (lambda, 0)), prec)?
        .real()
        .to_f64();
    let l = lambda.to_f64();
    let tp = 2.0 * std::f64::consts::PI;
    let model = l / 2.0 * (l / (tp * std::f64::consts::E)).ln()
        + 1.75 * (l / tp).ln()
        + (2.0 * 2f64.sqrt() * std::f64::consts::PI).ln();
    Ok((exact, model))
}

/// The zero of T(lambda z) reached by Newton from i t / lambda, as z.
fn hurwitz_root(b: &[Complex], lambda: &Float, t: &Float, gap: f64, prec: u32) -> Result<Complex> {
    let ratio = Float::with_val(prec, t / lambda);
    let u0 = Complex::with_val(prec, (-Float::with_val(prec, ratio.square_ref()), 0));
    let u = newton_polish(b, &u0, prec, 200);
    let to_z = |u: &Complex| {
        let mut z = Complex::with_val(prec, u.sqrt_ref());
        if z.imag().is_sign_negative() {
            z = -z;
        }
        z
    };
    let z = to_z(&u);
    // a second root from the same start, with the first deflated
    let mut v = Complex::with_val(prec, &u0 * (1.0 + 1e-6));
    for _ in 0..100 {
        let (p, dp) = horner_with_derivative(b, &v, prec);
        let diff = Complex::with_val(prec, &v - &u);
        if p.is_zero() || diff.is_zero() {
            break;
        }
        let q = Complex::with_val(prec, &p / &diff);
        let den = Complex::with_val(prec, &dp - &q);
        let step = Complex::with_val(prec, &p / &den);
        v -= &step;
        if abs_f64(&step) <= abs_f64(&v) * 2f64.powi(-(prec as i32 - 8)) {
            break;
        }
    }
    let z2 = to_z(&v);
    let lz2 = Complex::with_val(prec, &z2 * lambda);
    let it = Complex::with_val(prec, (0, t));
    let d2 = abs_f64(&Complex::with_val(prec, &lz2 - &it));
    if d2 < 0.25 * gap {
        return Err(Error::MultiplicityAmbiguity(format!(
            "two roots within {d2:.3e} of i t = {:.6}",
            t.to_f64()
        )));
    }
    Ok(z)
}

fn zero_gap(t: &[Float], j: usize) -> f64 {
    let tj = t[j].to_f64();
    let mut g = f64::INFINITY;
    if j > 0 {
        g = g.min(tj - t[j - 1].to_f64());
    }
    if j + 1 < t.len() {
        g = g.min(t[j + 1].to_f64() - tj);
    }
    if g.is_infinite() {
        tj
    } else {
        g
    }
}

fn row_for(
    n: u32,
    lambda: &Float,
    b: &[Complex],
    zeros: &[Float],
    j: usize,
    ctx: &PrecisionContext,
) -> Result<ConvergenceRow> {
    let prec = b[0].prec().0;
    let t = &zeros[j - 1];
    let z = hurwitz_root(b, lambda, t, zero_gap(zeros, j - 1), prec)?;
    let lz = Complex::with_val(prec, &z * lambda);
    let it = Complex::with_val(prec, (0, t));
    let abs_err = Float::with_val(prec, Complex::with_val(prec, &lz - &it).abs().real());
    let e = predicted_exponent(n, lambda.to_f64(), t.to_f64());
    let bound = Float::with_val(64, e).exp();
    let s = Complex::with_val(ctx.bits(), (0, t));
    let (rho, r_ns) = rho_and_r_at(n, lambda, &s, 1, ctx)?;
    Ok(ConvergenceRow {
        n,
        lambda: lambda.clone(),
        z_hurwitz: Complex::with_val(ctx.bits(), &z),
        abs_err: Float::with_val(ctx.bits(), &abs_err),
        bound,
        rho,
        r_ns,
    })
}

fn zeros_through(j: usize, ctx: &PrecisionContext) -> Result<Vec<Float>> {
    // N(T) > j well before T = 2 pi j / log j + 20
    let jf = j as f64;
    let mut t_max = 20.0 + 2.0 * std::f64::consts::PI * jf / (jf + 2.0).ln().max(1.0);
    loop {
        let z = critical_line_zeros(t_max, ctx)?;
        if z.len() > j {
            return Ok(z);
        }
        t_max *= 1.5;
    }
}

fn coefficients(n: u32, ctx: &PrecisionContext) -> Result<(Float, Vec<Complex>, TaylorPolynomial)> {
    let sc = lambda_of_n(n, ctx)?;
    let t = taylor_coeffs(2 * n as usize - 2, ctx)?;
    let b = t.rescaled_even(&sc.lambda, t.ctx.bits());
    Ok((sc.lambda, b, t))
}

/// Hurwitz errors for the j-th zeta zero across several n.
pub fn convergence_sweep(j: usize, n_values: &[u32], ctx: &PrecisionContext) -> Result<ConvergenceReport> {
    if j == 0 {
        return Err(Error::Invalid("zero index starts at 1".into()));
    }
    let zeros = zeros_through(j, ctx)?;
    let mut rows = Vec::new();
    for &n in n_values {
        let (lambda, b, _) = coefficients(n, ctx)?;
        rows.push(row_for(n, &lambda, &b, &zeros, j, ctx)?);
    }
    let constant = rows
        .iter()
        .map(|r| {
            let q = Float::with_val(64, &r.abs_err / &r.bound);
            q.to_f64()
        })
        .fold(0.0, f64::max);
    Ok(ConvergenceReport {
        j,
        t: zeros[j - 1].clone(),
        rows,
        constant,
    })
}

#[derive(Clone, Debug)]
pub struct Table2Row {
    pub k: usize,
    pub t: Float,
    pub abs_err: Float,
    pub log10_err: f64,
    pub reference_exponent: i32,
    /// floor(log10 abs_err) - reference exponent
    pub exponent_diff: i32,
    pub predicted_log10: f64,
}

impl Table2Row {
    pub fn reference_string(&self) -> String {
        let (m, e) = reference_table2(self.k);
        format!("{m}e{e}")
    }
}

/// |lambda z_k - i t_k| for k = 1..11 at n = 102.
pub fn table2(ctx: &PrecisionContext) -> Result<Vec<Table2Row>> {
    if ctx.digits < TABLE2_MIN_DIGITS {
        return Err(Error::PrecisionInsufficient {
            required: TABLE2_MIN_DIGITS,
            available: ctx.digits,
        });
    }
    let n = 102;
    let zeros = zeros_through(11, ctx)?;
    let (lambda, b, _) = coefficients(n, ctx)?;
    let prec = b[0].prec().0;
    (1..=11)
        .map(|k| {
            let t = &zeros[k - 1];
            let z = hurwitz_root(&b, &lambda, t, zero_gap(&zeros, k - 1), prec)?;
            let lz = Complex::with_val(prec, &z * &lambda);
            let it = Complex::with_val(prec, (0, t));
            let err = Float::with_val(prec, Complex::with_val(prec, &lz - &it).abs().real());
            let l10 = log10_float(&err);
            let (_, e) = reference_table2(k);
            Ok(Table2Row {
                k,
                t: Float::with_val(ctx.bits(), t),
                abs_err: Float::with_val(ctx.bits(), &err),
                log10_err: l10,
                reference_exponent: e,
                exponent_diff: l10.floor() as i32 - e,
                predicted_log10: predicted_exponent(n, lambda.to_f64(), t.to_f64())
                    / std::f64::consts::LN_10,
            })
        })
        .collect()
}

pub fn table2_csv(rows: &[Table2Row]) -> String {
    let mut s = String::from("k,t,reference_value,computed_value,log10_computed,exponent_diff,predicted_log10\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.k,
            float_to_string(&r.t),
            r.reference_string(),
            float_to_string(&r.abs_err),
            float_to_string(&Float::with_val(53, r.log10_err)),
            r.exponent_diff,
            float_to_string(&Float::with_val(53, r.predicted_log10))
        ));
    }
    s
}
