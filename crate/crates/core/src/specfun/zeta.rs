//! Riemann and Hurwitz zeta by Euler–Maclaurin summation.

use std::f64::consts::PI;

use rug::{Complex, Float};

use super::bernoulli::scaled_bernoulli;
use super::gamma::{digamma_prec, gamma_prec};
use crate::error::{Error, Result};
use crate::precision::{abs_f64, pi, PrecisionContext};

/// Value and (optionally) s-derivative.
type ValDer = (Complex, Option<Complex>);

fn smallest_prime_factors(n: usize) -> Vec<u32> {
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

fn mag(z: &Complex) -> Float {
    Float::with_val(64, z.abs_ref())
}

/// Partial sums of m^{-s} (and -ln m * m^{-s}) for m = 1..=n. One
/// exponential per prime, products for composites.
fn riemann_partial(s: &Complex, n: usize, wp: u32, deriv: bool) -> ValDer {
    let spf = smallest_prime_factors(n);
    let mut pows: Vec<Complex> = Vec::with_capacity(n + 1);
    let mut logs: Vec<Float> = Vec::with_capacity(n + 1);
    pows.push(Complex::new(wp));
    logs.push(Float::new(wp));
    pows.push(Complex::with_val(wp, (1, 0)));
    logs.push(Float::new(wp));
    let mut sum = Complex::with_val(wp, (1, 0));
    let mut dsum = Complex::new(wp);
    for m in 2..=n {
        let p = spf[m] as usize;
        let (pw, lg) = if p == m {
            let lg = Float::with_val(wp, m as u64).ln();
            let mut e = Complex::with_val(wp, s * &lg);
            e = -e;
            (e.exp(), lg)
        } else {
            let q = m / p;
            (
                Complex::with_val(wp, &pows[p] * &pows[q]),
                Float::with_val(wp, &logs[p] + &logs[q]),
            )
        };
        sum += &pw;
        if deriv {
            dsum -= Complex::with_val(wp, &pw * &lg);
        }
        pows.push(pw);
        logs.push(lg);
    }
    (sum, deriv.then_some(dsum))
}

fn hurwitz_partial(s: &Complex, a: &Float, n: usize, wp: u32, deriv: bool) -> ValDer {
    let mut sum = Complex::new(wp);
    let mut dsum = Complex::new(wp);
    for k in 0..n {
        let lg = Float::with_val(wp, a + k as u64).ln();
        let mut e = Complex::with_val(wp, s * &lg);
        e = -e;
        let pw = e.exp();
        if deriv {
            dsum -= Complex::with_val(wp, &pw * &lg);
        }
        sum += pw;
    }
    (sum, deriv.then_some(dsum))
}

/// Euler–Maclaurin tail at M = n + a. `None` when the asymptotic terms start
/// growing before reaching the tolerance (n too small for this s).
fn em_tail(s: &Complex, m_big: &Float, wp: u32, deriv: bool, scale: &Float) -> Option<ValDer> {
    let ln_m = Float::with_val(wp, m_big.ln_ref());
    let mut e = Complex::with_val(wp, s * &ln_m);
    e = -e;
    let m_pow = e.exp(); // M^{-s}
    let s_minus_1 = Complex::with_val(wp, s - 1u32);

    let mut a_term = Complex::with_val(wp, &m_pow * m_big);
    a_term /= &s_minus_1;
    let b_term = Complex::with_val(wp, &m_pow / 2u32);
    let mut val = Complex::with_val(wp, &a_term + &b_term);
    let mut der = Complex::new(wp);
    if deriv {
        // d/ds of A and B
        let mut da = Complex::with_val(wp, &a_term * &ln_m);
        da += Complex::with_val(wp, &a_term / &s_minus_1);
        let db = Complex::with_val(wp, &b_term * &ln_m);
        der -= da;
        der -= db;
    }

    let inv_m = Float::with_val(wp, m_big.recip_ref());
    let inv_m2 = Float::with_val(wp, inv_m.square_ref());
    let mut u = Complex::with_val(wp, &m_pow * &inv_m);
    let mut du = Complex::new(wp);
    if deriv {
        // (M^{-s}/M)(1 - s ln M)
        let mut t = Complex::with_val(wp, s * &ln_m);
        t = -t;
        t += 1u32;
        du = Complex::with_val(wp, &u * &t);
    }
    u *= s;

    let tol = Float::with_val(64, scale >> wp as i32);
    let jmax = (PI * m_big.to_f64()).ceil() as usize + 8;
    let bern = scaled_bernoulli(jmax, wp);
    let mut prev = Float::with_val(64, f64::INFINITY);
    for j in 1..=jmax {
        let c = &bern[j - 1];
        let term = Complex::with_val(wp, &u * c);
        let tm = mag(&term);
        let mut small = tm < tol;
        val += &term;
        if deriv {
            let dterm = Complex::with_val(wp, &du * c);
            small = small && mag(&dterm) < tol;
            der += dterm;
        }
        if small {
            return Some((val, deriv.then_some(der)));
        }
        if j > 3 && tm > prev {
            return None;
        }
        prev = tm;
        let a1 = Complex::with_val(wp, s + (2 * j - 1) as u64);
        let a2 = Complex::with_val(wp, s + (2 * j) as u64);
        let mut f = Complex::with_val(wp, &a1 * &a2);
        f *= &inv_m2;
        if deriv {
            let mut g = Complex::with_val(wp, s * 2u32);
            g += (4 * j - 1) as u64;
            g *= &inv_m2;
            let mut ndu = Complex::with_val(wp, &du * &f);
            ndu += Complex::with_val(wp, &u * &g);
            du = ndu;
        }
        u *= &f;
    }
    None
}

/// zeta(s, a) by direct Euler–Maclaurin; `a = None` means a = 1.
fn em_zeta(s: &Complex, a: Option<&Float>, prec: u32, deriv: bool) -> Result<ValDer> {
    let sabs = abs_f64(s);
    let sigma = s.real().to_f64();
    let wp0 = prec + 32 + (sabs + 1.0).log2().ceil() as u32;
    let d = wp0 as f64 * std::f64::consts::LN_2;
    let mut n = (1.2 * (d + sabs) / (2.0 * PI)).ceil() as usize + 2;
    for _ in 0..6 {
        let extra = if sigma < 1.0 {
            ((1.0 - sigma) * ((n + 1) as f64).log2()).ceil() as u32
        } else {
            0
        };
        let wp = wp0 + extra + 8;
        let (sum, dsum) = match a {
            None => riemann_partial(s, n, wp, deriv),
            Some(a) => hurwitz_partial(s, a, n, wp, deriv),
        };
        let m_big = match a {
            None => Float::with_val(wp, n as u64 + 1),
            Some(a) => Float::with_val(wp, a + n as u64),
        };
        let mut scale = mag(&sum);
        if let Some(ds) = &dsum {
            scale = scale.max(&mag(ds));
        }
        let scale = scale.max(&Float::with_val(64, 1e-30));
        if let Some((tv, td)) = em_tail(s, &m_big, wp, deriv, &scale) {
            let v = Complex::with_val(prec, &sum + &tv);
            let dv = match (dsum, td) {
                (Some(x), Some(y)) => Some(Complex::with_val(prec, &x + &y)),
                _ => None,
            };
            return Ok((v, dv));
        }
        n = (n as f64 * 1.3).ceil() as usize + 1;
    }
    Err(Error::NonConvergence {
        what: "Euler-Maclaurin zeta",
        detail: format!("s = {s}"),
    })
}

fn is_one(s: &Complex) -> bool {
    s.imag().is_zero() && *s.real() == 1
}

/// zeta(s) and, optionally, zeta'(s) at `prec` bits.
pub(crate) fn zeta_val_der(s: &Complex, prec: u32, deriv: bool) -> Result<ValDer> {
    if is_one(s) {
        return Err(Error::Pole {
            function: "zeta",
            at: "1".into(),
        });
    }
    if s.real().is_sign_negative() && !s.real().is_zero() {
        return reflected(s, prec, deriv);
    }
    em_zeta(s, None, prec, deriv)
}

/// zeta(s) = 2^s pi^{s-1} sin(pi s/2) Gamma(1-s) zeta(1-s).
fn reflected(s: &Complex, prec: u32, deriv: bool) -> Result<ValDer> {
    let wp = prec + 32 + (abs_f64(s) + 1.0).log2().ceil() as u32;
    let s = Complex::with_val(wp, s);
    let one_minus = Complex::with_val(wp, 1u32 - &s);
    let (z1, dz1) = em_zeta(&one_minus, None, wp, deriv)?;
    let g = gamma_prec(&one_minus, wp)?;
    let ln2 = Float::with_val(wp, 2u32).ln();
    let p = pi(wp);
    let lnpi = Float::with_val(wp, p.ln_ref());
    // 2^s pi^{s-1} = exp(s ln 2 + (s-1) ln pi)
    let mut e = Complex::with_val(wp, &s * &ln2);
    let s_m1 = Complex::with_val(wp, &s - 1u32);
    e += Complex::with_val(wp, &s_m1 * &lnpi);
    let pref = e.exp();
    let half_pi_s = Complex::with_val(wp, &s * &p) / 2u32;
    let half_pi_s = Complex::with_val(wp, half_pi_s);
    let (sn, cs) = half_pi_s.sin_cos(Complex::new(wp));

    let gz = Complex::with_val(wp, &g * &z1);
    let mut val = Complex::with_val(wp, &pref * &sn);
    val *= &gz;
    let der = if deriv {
        let psi = digamma_prec(&one_minus, wp)?;
        let dz1 = dz1.expect("derivative requested");
        // pref' = pref (ln2 + ln pi); Gamma(1-s)' = -Gamma(1-s) psi(1-s);
        // zeta(1-s)' = -zeta'(1-s)
        let lsum = Float::with_val(wp, &ln2 + &lnpi);
        let mut inner = Complex::with_val(wp, &sn * &lsum);
        inner += Complex::with_val(wp, &cs * &p) / 2u32;
        inner *= &gz;
        let mut t = Complex::with_val(wp, &psi * &gz);
        t *= &sn;
        inner -= t;
        let mut t2 = Complex::with_val(wp, &g * &dz1);
        t2 *= &sn;
        inner -= t2;
        inner *= &pref;
        Some(Complex::with_val(prec, inner))
    } else {
        None
    };
    Ok((Complex::with_val(prec, val), der))
}

pub(crate) fn zeta_prec(s: &Complex, prec: u32) -> Result<Complex> {
    Ok(zeta_val_der(s, prec, false)?.0)
}

/// Riemann zeta at the context precision.
pub fn zeta(s: &Complex, ctx: &PrecisionContext) -> Result<Complex> {
    zeta_prec(s, ctx.bits())
}

/// (zeta(s), zeta'(s)).
pub fn zeta_with_derivative(s: &Complex, ctx: &PrecisionContext) -> Result<(Complex, Complex)> {
    let (v, d) = zeta_val_der(s, ctx.bits(), true)?;
    Ok((v, d.expect("derivative requested")))
}

/// Hurwitz zeta(s, a) for 0 < a <= 1 by Euler–Maclaurin without reflection.
pub(crate) fn hurwitz_val_der(s: &Complex, a: &Float, prec: u32, deriv: bool) -> Result<ValDer> {
    if is_one(s) {
        return Err(Error::Pole {
            function: "hurwitz_zeta",
            at: "1".into(),
        });
    }
    if *a <= 0 {
        return Err(Error::Domain {
            function: "hurwitz_zeta",
            detail: format!("a = {a} must be positive"),
        });
    }
    em_zeta(s, Some(a), prec, deriv)
}

pub fn hurwitz_zeta(s: &Complex, a: &Float, ctx: &PrecisionContext) -> Result<Complex> {
    Ok(hurwitz_val_der(s, a, ctx.bits(), false)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::cplx;

    fn rel(a: &Complex, b: &Complex) -> f64 {
        let d = Complex::with_val(a.prec().0, a - b);
        let n = Float::with_val(64, d.abs_ref());
        let s = Float::with_val(64, b.abs_ref());
        if n.is_zero() {
            return f64::NEG_INFINITY;
        }
        Float::with_val(64, n / s).log10().to_f64()
    }

    #[test]
    fn classical_values() {
        let ctx = PrecisionContext::new(80).unwrap();
        let p = ctx.bits();
        let z2 = zeta(&cplx(p, 2.0, 0.0), &ctx).unwrap();
        let expect = Complex::with_val(p, (pi(p).square() / 6u32, 0));
        assert!(rel(&z2, &expect) < -80.0);
        let z0 = zeta(&cplx(p, 0.0, 0.0), &ctx).unwrap();
        assert!(rel(&z0, &cplx(p, -0.5, 0.0)) < -80.0);
        assert!(matches!(zeta(&cplx(p, 1.0, 0.0), &ctx), Err(Error::Pole { .. })));
    }

    #[test]
    fn negative_integers_and_trivial_zeros() {
        let ctx = PrecisionContext::new(40).unwrap();
        let p = ctx.bits();
        // zeta(-1) = -1/12
        let v = zeta(&cplx(p, -1.0, 0.0), &ctx).unwrap();
        let e = Complex::with_val(p, (Float::with_val(p, -1) / 12u32, 0));
        assert!(rel(&v, &e) < -40.0);
        let v = zeta(&cplx(p, -2.0, 0.0), &ctx).unwrap();
        assert!(Float::with_val(64, v.abs_ref()) < 1e-40);
    }

    #[test]
    fn reflection_agrees_with_direct_summation() {
        // Direct EM is valid for Re s < 0 too, just with cancellation.
        let ctx = PrecisionContext::new(40).unwrap();
        let p = ctx.bits();
        for (re, im) in [(-0.7, 3.0), (-2.5, -11.0), (-0.1, 25.0)] {
            let s = cplx(p, re, im);
            let refl = zeta(&s, &ctx).unwrap();
            let direct = em_zeta(&s, None, p + 64, false).unwrap().0;
            assert!(rel(&refl, &direct) < -40.0, "s = {re}+{im}i");
        }
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let ctx = PrecisionContext::new(30).unwrap();
        let p = ctx.bits();
        for (re, im) in [(0.5, 14.0), (2.5, 1.0), (-1.5, 4.0)] {
            let s = cplx(p, re, im);
            let (_, d) = zeta_with_derivative(&s, &ctx).unwrap();
            let hp = 2 * p;
            let h = crate::precision::pow10(-35, hp);
            let sp = Complex::with_val(hp, &s + &h);
            let sm = Complex::with_val(hp, &s - &h);
            let mut fd = zeta_prec(&sp, hp).unwrap() - zeta_prec(&sm, hp).unwrap();
            fd /= Float::with_val(hp, &h * 2u32);
            assert!(rel(&d, &Complex::with_val(p, fd)) < -30.0, "s = {re}+{im}i");
        }
    }

    #[test]
    fn hurwitz_reduces_to_riemann() {
        let ctx = PrecisionContext::new(40).unwrap();
        let p = ctx.bits();
        let s = cplx(p, 0.7, 6.0);
        let one = Float::with_val(p, 1);
        let h = hurwitz_zeta(&s, &one, &ctx).unwrap();
        let z = zeta(&s, &ctx).unwrap();
        assert!(rel(&h, &z) < -40.0);
        // zeta(s, 1/2) = (2^s - 1) zeta(s)
        let half = Float::with_val(p, 0.5);
        let h = hurwitz_zeta(&s, &half, &ctx).unwrap();
        let ln2 = Float::with_val(p, 2u32).ln();
        let mut t = Complex::with_val(p, &s * &ln2).exp();
        t -= 1u32;
        t *= &z;
        assert!(rel(&h, &t) < -40.0);
    }

    #[test]
    fn high_on_critical_line() {
        let ctx = PrecisionContext::new(30).unwrap();
        let p = ctx.bits();
        // Compare two precisions at height 1000.
        let s = cplx(p, 0.5, 1000.0);
        let a = zeta(&s, &ctx).unwrap();
        let b = zeta_prec(&Complex::with_val(2 * p, &s), 2 * p).unwrap();
        assert!(rel(&a, &Complex::with_val(p, b)) < -29.0);
    }
}
