//! Log-gamma and polygamma functions on the complex plane.
//!
//! All three functions shift the argument right by the recurrence until
//! |w| exceeds D/(2 pi) (D = working precision in nats) and then sum the
//! Stirling-type asymptotic series up to its smallest term.

use std::f64::consts::PI;

use rug::{Complex, Float};

use super::bernoulli::scaled_bernoulli;
use crate::error::{Error, Result};
use crate::precision::{pi, PrecisionContext};

fn is_pole(z: &Complex) -> bool {
    z.imag().is_zero() && z.real().is_integer() && *z.real() <= 0
}

fn nats(prec: u32) -> f64 {
    prec as f64 * std::f64::consts::LN_2
}

/// Number of unit shifts needed so that Re(z+m) >= 0 and |z+m| >= radius.
fn shift_count(z: &Complex, radius: f64) -> u64 {
    let re = z.real().to_f64();
    let im = z.imag().to_f64();
    if re >= 0.0 && re.hypot(im) >= radius {
        return 0;
    }
    let need_re = if im.abs() < radius {
        (radius * radius - im * im).sqrt()
    } else {
        0.0
    };
    let m = (need_re - re).max(-re).max(0.0).ceil();
    m as u64
}

fn tiny_term(term: &Complex, acc: &Complex, prec: u32) -> bool {
    let t = Float::with_val(64, term.abs_ref());
    let a = Float::with_val(64, acc.abs_ref()).max(&Float::with_val(64, 1));
    let scaled = a >> (prec as i32);
    t < scaled
}

/// Principal log-gamma: the analytic continuation of the real log Gamma to
/// C minus (-inf, 0], with Im taken from the continuous sum of logarithms.
pub(crate) fn lgamma_prec(z: &Complex, prec: u32) -> Result<Complex> {
    if is_pole(z) {
        return Err(Error::Pole {
            function: "log_gamma",
            at: z.to_string(),
        });
    }
    let wp = prec + 24 + (abs_bits(z) as u32);
    let d = nats(wp);
    let radius = d / (2.0 * PI) + 2.0;
    let m = shift_count(z, radius);
    let z = Complex::with_val(wp, z);
    let w = Complex::with_val(wp, &z + m);

    let mut acc = stirling(&w, wp)?;
    if m > 0 {
        let mut prod = Complex::with_val(wp, (1, 0));
        let mut arg_sum = 0.0f64;
        for k in 0..m {
            let f = Complex::with_val(wp, &z + k);
            arg_sum += arg_f64(&f);
            prod *= &f;
        }
        let log_prod = Complex::with_val(wp, prod.ln_ref());
        let winding = ((arg_sum - log_prod.imag().to_f64()) / (2.0 * PI)).round();
        acc -= &log_prod;
        if winding != 0.0 {
            let two_pi = Float::with_val(wp, pi(wp) * 2u32);
            *acc.mut_imag() -= Float::with_val(wp, &two_pi * winding);
        }
    }
    Ok(Complex::with_val(prec, acc))
}

fn abs_bits(z: &Complex) -> f64 {
    let a = super::super::precision::abs_f64(z);
    if a > 2.0 {
        a.log2().ceil()
    } else {
        0.0
    }
}

fn arg_f64(z: &Complex) -> f64 {
    let re = z.real().to_f64();
    let mut im = z.imag().to_f64();
    if im == 0.0 && z.imag().is_sign_negative() {
        im = -0.0;
    }
    im.atan2(re)
}

fn stirling(w: &Complex, wp: u32) -> Result<Complex> {
    let half = Float::with_val(wp, 0.5);
    let ln_w = Complex::with_val(wp, w.ln_ref());
    let mut acc = Complex::with_val(wp, w - &half);
    acc *= &ln_w;
    acc -= w;
    let ln2pi = Float::with_val(wp, pi(wp) * 2u32).ln();
    acc += Float::with_val(wp, &ln2pi * &half);

    let kmax = (nats(wp) / 2.0).ceil() as usize + 16;
    let bern = scaled_bernoulli(kmax, wp);
    let inv = Complex::with_val(wp, w.recip_ref());
    let inv2 = Complex::with_val(wp, inv.square_ref());
    let mut wpow = inv;
    let mut fact = Float::with_val(wp, 1);
    for k in 1..=kmax {
        let mut term = Complex::with_val(wp, &wpow * &bern[k - 1]);
        term *= &fact;
        let done = tiny_term(&term, &acc, wp);
        acc += &term;
        if done {
            return Ok(acc);
        }
        wpow *= &inv2;
        fact *= (2 * k - 1) as u64 * (2 * k) as u64;
    }
    Err(Error::NonConvergence {
        what: "Stirling series",
        detail: format!("|w| = {}", super::super::precision::abs_f64(w)),
    })
}

/// log Gamma(z) at the context precision.
pub fn log_gamma(z: &Complex, ctx: &PrecisionContext) -> Result<Complex> {
    lgamma_prec(z, ctx.bits())
}

/// Gamma(z) = exp(log Gamma(z)).
pub(crate) fn gamma_prec(z: &Complex, prec: u32) -> Result<Complex> {
    let lg = lgamma_prec(z, prec + 16)?;
    Ok(Complex::with_val(prec, lg.exp_ref()))
}

pub(crate) fn digamma_prec(z: &Complex, prec: u32) -> Result<Complex> {
    if is_pole(z) {
        return Err(Error::Pole {
            function: "digamma",
            at: z.to_string(),
        });
    }
    let wp = prec + 24;
    let d = nats(wp);
    let radius = d / (2.0 * PI) + 2.0;
    let m = shift_count(z, radius);
    let z = Complex::with_val(wp, z);
    let w = Complex::with_val(wp, &z + m);

    let inv = Complex::with_val(wp, w.recip_ref());
    let inv2 = Complex::with_val(wp, inv.square_ref());
    let mut acc = Complex::with_val(wp, w.ln_ref());
    acc -= Complex::with_val(wp, &inv / 2u32);

    let kmax = (d / 2.0).ceil() as usize + 16;
    let bern = scaled_bernoulli(kmax, wp);
    let mut wpow = inv2.clone();
    let mut fact = Float::with_val(wp, 1);
    let mut converged = false;
    for k in 1..=kmax {
        let mut term = Complex::with_val(wp, &wpow * &bern[k - 1]);
        term *= &fact;
        let done = tiny_term(&term, &acc, wp);
        acc -= &term;
        if done {
            converged = true;
            break;
        }
        wpow *= &inv2;
        fact *= (2 * k) as u64 * (2 * k + 1) as u64;
    }
    if !converged {
        return Err(Error::NonConvergence {
            what: "digamma asymptotic series",
            detail: String::new(),
        });
    }
    for k in 0..m {
        let f = Complex::with_val(wp, &z + k);
        acc -= f.recip();
    }
    Ok(Complex::with_val(prec, acc))
}

/// psi(z) = Gamma'(z)/Gamma(z).
pub fn digamma(z: &Complex, ctx: &PrecisionContext) -> Result<Complex> {
    digamma_prec(z, ctx.bits())
}

/// psi'(z) by its own asymptotic series (no numerical differentiation).
pub(crate) fn trigamma_prec(z: &Complex, prec: u32) -> Result<Complex> {
    if is_pole(z) {
        return Err(Error::Pole {
            function: "trigamma",
            at: z.to_string(),
        });
    }
    let wp = prec + 24;
    let d = nats(wp);
    let radius = d / (2.0 * PI) + 2.0;
    let m = shift_count(z, radius);
    let z = Complex::with_val(wp, z);
    let w = Complex::with_val(wp, &z + m);

    let inv = Complex::with_val(wp, w.recip_ref());
    let inv2 = Complex::with_val(wp, inv.square_ref());
    let mut acc = inv.clone();
    acc += Complex::with_val(wp, &inv2 / 2u32);
    let kmax = (d / 2.0).ceil() as usize + 16;
    let bern = scaled_bernoulli(kmax, wp);
    let mut wpow = Complex::with_val(wp, &inv2 * &inv);
    let mut fact = Float::with_val(wp, 2);
    let mut converged = false;
    for k in 1..=kmax {
        let mut term = Complex::with_val(wp, &wpow * &bern[k - 1]);
        term *= &fact;
        let done = tiny_term(&term, &acc, wp);
        acc += &term;
        if done {
            converged = true;
            break;
        }
        wpow *= &inv2;
        fact *= (2 * k + 1) as u64 * (2 * k + 2) as u64;
    }
    if !converged {
        return Err(Error::NonConvergence {
            what: "trigamma asymptotic series",
            detail: String::new(),
        });
    }
    for k in 0..m {
        let f = Complex::with_val(wp, &z + k);
        acc += f.square().recip();
    }
    Ok(Complex::with_val(prec, acc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::{cplx, euler_gamma};

    fn close(a: &Complex, b: &Complex, tol_exp: i32) -> bool {
        let d = Complex::with_val(a.prec().0, a - b);
        let d = Float::with_val(64, d.abs_ref());
        let s = Float::with_val(64, b.abs_ref()).max(&Float::with_val(64, 1));
        let ratio = Float::with_val(64, &d / &s);
        ratio.is_zero() || ratio.log10().to_f64() < tol_exp as f64
    }

    #[test]
    fn log_gamma_one_and_half() {
        let ctx = PrecisionContext::new(60).unwrap();
        let p = ctx.bits();
        let v = log_gamma(&cplx(p, 1.0, 0.0), &ctx).unwrap();
        assert!(close(&v, &cplx(p, 0.0, 0.0), -60));
        let v = log_gamma(&cplx(p, 0.5, 0.0), &ctx).unwrap();
        let half_ln_pi = Complex::with_val(p, (pi(p).ln() / 2u32, 0));
        assert!(close(&v, &half_ln_pi, -60));
    }

    #[test]
    fn log_gamma_recurrence() {
        let ctx = PrecisionContext::new(80).unwrap();
        let p = ctx.bits();
        let z = Complex::with_val(p, (Float::parse("3.7").unwrap(), Float::parse("2.1").unwrap()));
        let z1 = Complex::with_val(p, &z + 1u32);
        let lhs = log_gamma(&z1, &ctx).unwrap();
        let rhs = log_gamma(&z, &ctx).unwrap() + Complex::with_val(p, z.ln_ref());
        assert!(close(&lhs, &rhs, -80));
    }

    #[test]
    fn log_gamma_is_continuous_across_branch_of_summed_logs() {
        // Large imaginary part and negative real part: the shifted product
        // winds several times around the origin.
        let ctx = PrecisionContext::new(30).unwrap();
        let p = ctx.bits();
        let z = cplx(p, -40.5, 3.0);
        let z1 = Complex::with_val(p, &z + 1u32);
        let lhs = log_gamma(&z1, &ctx).unwrap();
        let rhs = log_gamma(&z, &ctx).unwrap() + Complex::with_val(p, z.ln_ref());
        assert!(close(&lhs, &rhs, -28));
    }

    #[test]
    fn poles_are_rejected() {
        let ctx = PrecisionContext::new(20).unwrap();
        let p = ctx.bits();
        assert!(matches!(log_gamma(&cplx(p, -3.0, 0.0), &ctx), Err(Error::Pole { .. })));
        assert!(matches!(digamma(&cplx(p, 0.0, 0.0), &ctx), Err(Error::Pole { .. })));
    }

    #[test]
    fn digamma_classical_values() {
        let ctx = PrecisionContext::new(60).unwrap();
        let p = ctx.bits();
        let g = euler_gamma(p);
        let v = digamma(&cplx(p, 1.0, 0.0), &ctx).unwrap();
        assert!(close(&v, &Complex::with_val(p, (-g.clone(), 0)), -60));
        let v = digamma(&cplx(p, 0.5, 0.0), &ctx).unwrap();
        let expect = -g - Float::with_val(p, 2u32).ln() * 2u32;
        assert!(close(&v, &Complex::with_val(p, (expect, 0)), -60));
    }

    #[test]
    fn digamma_recurrence() {
        let ctx = PrecisionContext::new(50).unwrap();
        let p = ctx.bits();
        let z = Complex::with_val(p, (Float::parse("2.3").unwrap(), Float::parse("1.1").unwrap()));
        let z1 = Complex::with_val(p, &z + 1u32);
        let mut r = digamma(&z1, &ctx).unwrap() - digamma(&z, &ctx).unwrap();
        r -= Complex::with_val(p, z.recip_ref());
        assert!(close(&r, &cplx(p, 0.0, 0.0), -50));
    }

    #[test]
    fn trigamma_matches_differenced_digamma() {
        let ctx = PrecisionContext::new(30).unwrap();
        let p = ctx.bits();
        let z = cplx(p, 0.8, -1.7);
        let t = trigamma_prec(&z, p).unwrap();
        // central difference of digamma at doubled precision
        let hp = 2 * p;
        let h = crate::precision::pow10(-30, hp);
        let zp = Complex::with_val(hp, &z + &h);
        let zm = Complex::with_val(hp, &z - &h);
        let mut fd = digamma_prec(&zp, hp).unwrap() - digamma_prec(&zm, hp).unwrap();
        fd /= Float::with_val(hp, &h * 2u32);
        assert!(close(&t, &Complex::with_val(p, fd), -28));
        // psi'(1) = pi^2 / 6
        let t1 = trigamma_prec(&cplx(p, 1.0, 0.0), p).unwrap();
        let z2 = Float::with_val(p, pi(p).square() / 6u32);
        assert!(close(&t1, &Complex::with_val(p, (z2, 0)), -30));
    }
}
