use rug::{Complex, Float};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::precision::{abs_f64, pi, ComplexAP, PrecisionContext};

fn switch_radius(prec: u32) -> f64 {
    let nats = prec as f64 * std::f64::consts::LN_2;
    (nats.sqrt() + 2.0).max(8.0)
}

/// erf(z) = (2/sqrt(pi)) e^{-z^2} sum_k 2^k z^{2k+1} / (2k+1)!!
fn erf_series(z: &Complex, prec: u32) -> Complex {
    let a = abs_f64(z);
    let z2f = {
        let re = z.real().to_f64();
        let im = z.imag().to_f64();
        re * re - im * im
    };
    let extra = ((a * a + z2f.max(0.0)) / std::f64::consts::LN_2).ceil() as u32 + 32;
    let wp = prec + extra;
    let z = Complex::with_val(wp, z);
    let z2 = Complex::with_val(wp, z.square_ref());
    let two_z2 = Complex::with_val(wp, &z2 * 2u32);
    let mut term = z.clone();
    let mut sum = z.clone();
    let kmin = (2.0 * a * a) as u64 + 2;
    let mut k = 1u64;
    loop {
        term *= &two_z2;
        term /= 2 * k + 1;
        sum += &term;
        if k > kmin {
            let t = Float::with_val(64, term.abs_ref());
            let s = Float::with_val(64, sum.abs_ref());
            if t.is_zero() || t < (s >> wp as i32) {
                break;
            }
        }
        k += 1;
    }
    let mut e = z2;
    e = -e;
    let mut r = Complex::with_val(wp, e.exp_ref()) * sum;
    let two_over_sqrtpi = Float::with_val(wp, pi(wp).sqrt_ref()).recip() * 2u32;
    r *= two_over_sqrtpi;
    r
}

/// erfc(z) ~ e^{-z^2}/(z sqrt(pi)) sum_m (-1)^m (2m-1)!! / (2 z^2)^m for Re z >= 0.
fn erfc_asymptotic(z: &Complex, prec: u32) -> Option<Complex> {
    let wp = prec + 32;
    let z = Complex::with_val(wp, z);
    let z2 = Complex::with_val(wp, z.square_ref());
    let inv = Complex::with_val(wp, Complex::with_val(wp, &z2 * 2u32).recip_ref());
    let mut term = Complex::with_val(wp, (1, 0));
    let mut sum = term.clone();
    let mut prev = Float::with_val(64, 1);
    let mut m = 1u64;
    loop {
        term *= &inv;
        term *= 2 * m - 1;
        term = -term;
        let t = Float::with_val(64, term.abs_ref());
        if t > prev {
            return None;
        }
        sum += &term;
        if t < (Float::with_val(64, 1) >> wp as i32) {
            break;
        }
        prev = t;
        m += 1;
    }
    let mut e = z2;
    e = -e;
    let mut r = Complex::with_val(wp, e.exp_ref()) * sum;
    r /= &z;
    r /= Float::with_val(wp, pi(wp).sqrt_ref());
    Some(r)
}

pub(crate) fn erfc_prec(z: &Complex, prec: u32) -> Complex {
    if z.real().is_sign_negative() && !z.real().is_zero() {
        let neg = Complex::with_val(prec + 8, -z.clone());
        let v = erfc_prec(&neg, prec + 8);
        return Complex::with_val(prec, 2u32 - v);
    }
    if abs_f64(z) > switch_radius(prec) {
        if let Some(v) = erfc_asymptotic(z, prec) {
            return Complex::with_val(prec, v);
        }
    }
    let erf = erf_series(z, prec);
    Complex::with_val(prec, 1u32 - erf)
}

/// Complementary error function (entire).
pub fn erfc(z: &Complex, ctx: &PrecisionContext) -> Complex {
    erfc_prec(z, ctx.bits())
}

/// erfc'(z) = -(2/sqrt(pi)) e^{-z^2}
pub(crate) fn erfc_deriv_prec(z: &Complex, prec: u32) -> Complex {
    let wp = prec + 16;
    let mut e = Complex::with_val(wp, z.square_ref());
    e = -e;
    let mut r = e.exp();
    r *= Float::with_val(wp, pi(wp).sqrt_ref()).recip() * 2u32;
    Complex::with_val(prec, -r)
}

/// A zero of erfc in the upper half plane; the conjugate is also a zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErfcZero {
    pub k: u32,
    pub value: ComplexAP,
    pub seed: ComplexAP,
}

/// Three-term asymptotic location (mu_k, nu_k) of the k-th zero.
pub fn erfc_zero_seed(k: u32) -> (f64, f64) {
    let kk = k as f64;
    let vs = ((kk - 0.125) * std::f64::consts::PI).sqrt();
    let tau = (2.0 * vs * (2.0 * std::f64::consts::PI).sqrt()).ln();
    let c1 = 0.25 * tau / vs;
    let c3 = (1.0 - tau + 0.5 * tau * tau) / (16.0 * vs.powi(3));
    (-vs + c1 - c3, vs + c1 + c3)
}

fn newton(seed: &Complex, prec: u32, target: &Float) -> Option<Complex> {
    let mut u = seed.clone();
    for _ in 0..200 {
        let v = erfc_prec(&u, prec);
        let d = erfc_deriv_prec(&u, prec);
        let step = Complex::with_val(prec, &v / &d);
        u -= &step;
        let sm = Float::with_val(64, step.abs_ref());
        let ua = Float::with_val(64, u.abs_ref());
        if sm < (ua >> (prec as i32 - 8)) {
            let r = erfc_prec(&u, prec);
            if Float::with_val(64, r.abs_ref()) <= *target {
                return Some(u);
            }
        }
    }
    None
}

/// k-th zero of erfc in the upper half plane, ordered by modulus.
pub fn erfc_zero(k: u32, ctx: &PrecisionContext) -> Result<(ErfcZero, Complex)> {
    if k == 0 {
        return Err(Error::Invalid("erfc zero index starts at 1".into()));
    }
    let prec = ctx.bits();
    let (mu, nu) = erfc_zero_seed(k);
    let seed = Complex::with_val(prec, (mu, nu));
    let target = Float::with_val(64, ctx.guarded_tol());
    let found = newton(&seed, prec, &target).or_else(|| {
        // coarse grid around the seed when the asymptotic start fails
        let mut out = None;
        'grid: for i in -4i32..=4 {
            for j in -4i32..=4 {
                let s = Complex::with_val(prec, (mu + 0.1 * i as f64, nu + 0.1 * j as f64));
                if let Some(u) = newton(&s, prec, &target) {
                    let (dm, dn) = (u.real().to_f64() - mu, u.imag().to_f64() - nu);
                    if dm.hypot(dn) < 0.5 {
                        out = Some(u);
                        break 'grid;
                    }
                }
            }
        }
        out
    });
    match found {
        Some(u) => Ok((
            ErfcZero {
                k,
                value: ComplexAP::from_complex(&u),
                seed: ComplexAP::from_complex(&seed),
            },
            u,
        )),
        None => Err(Error::NonConvergence {
            what: "erfc zero Newton iteration",
            detail: format!("k = {k}"),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::cplx;

    fn absdiff(a: &Complex, b: &Complex) -> f64 {
        let d = Complex::with_val(a.prec().0, a - b);
        Float::with_val(64, d.abs_ref()).to_f64()
    }

    #[test]
    fn basic_values() {
        let ctx = PrecisionContext::new(50).unwrap();
        let p = ctx.bits();
        assert_eq!(erfc(&cplx(p, 0.0, 0.0), &ctx), cplx(p, 1.0, 0.0));
        let z = cplx(p, 0.7, -0.3);
        let mz = cplx(p, -0.7, 0.3);
        let s = Complex::with_val(p, erfc(&z, &ctx) + erfc(&mz, &ctx));
        assert!(absdiff(&s, &cplx(p, 2.0, 0.0)) < 1e-50);
        let e1 = erfc(&cplx(p, 1.0, 0.0), &ctx);
        let oracle = Float::parse("0.157299207050285130658779364917390740703933002034").unwrap();
        let oracle = Complex::with_val(p, (oracle, 0));
        assert!(absdiff(&e1, &oracle) < 1e-47);
    }

    #[test]
    fn asymptotic_and_series_regimes_agree() {
        let ctx = PrecisionContext::new(20).unwrap();
        let p = ctx.bits();
        let r = switch_radius(p);
        for (re, im) in [(r + 0.5, 0.3), (0.7 * (r + 0.5), 0.7 * (r + 0.5)), (0.1, r + 1.0)] {
            let z = cplx(p, re, im);
            let a = erfc_asymptotic(&z, p).unwrap();
            let b = Complex::with_val(p, 1u32 - erf_series(&z, p));
            let rel = absdiff(&a, &b) / Float::with_val(64, b.abs_ref()).to_f64();
            assert!(rel < 1e-20, "z = {re}+{im}i: rel = {rel}");
        }
    }

    #[test]
    fn first_zero() {
        let ctx = PrecisionContext::new(60).unwrap();
        let (zr, u) = erfc_zero(1, &ctx).unwrap();
        assert!((u.real().to_f64() + 1.35481).abs() < 1e-5);
        assert!((u.imag().to_f64() - 1.99147).abs() < 1e-5);
        assert!(Float::with_val(64, erfc(&u, &ctx).abs_ref()) < 1e-50);
        let conj = Complex::with_val(ctx.bits(), u.conj_ref());
        assert!(Float::with_val(64, erfc(&conj, &ctx).abs_ref()) < 1e-50);
        assert_eq!(zr.k, 1);
    }

    #[test]
    fn zero_modulus_law() {
        let ctx = PrecisionContext::new(30).unwrap();
        let mut worst: f64 = 0.0;
        for k in 5..=50u32 {
            let (_, u) = erfc_zero(k, &ctx).unwrap();
            let m2 = Float::with_val(64, u.norm_ref()).to_f64();
            let dev = (m2 - 2.0 * std::f64::consts::PI * (k as f64 - 0.125)).abs();
            let kk = k as f64;
            worst = worst.max(dev * kk / kk.ln().powi(2));
        }
        assert!(worst < 1.0, "fitted constant {worst}");
    }
}
