//! Simultaneous (Ehrlich–Aberth) root finding for polynomials whose
//! coefficients span hundreds of orders of magnitude.

use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Complex, Float};

use crate::error::{Error, Result};
use crate::precision::log10_float;

/// p(z) and p'(z) by Horner's rule; coefficients ascending.
pub fn horner_with_derivative(c: &[Complex], z: &Complex, prec: u32) -> (Complex, Complex) {
    let mut p = Complex::new(prec);
    let mut dp = Complex::new(prec);
    for ck in c.iter().rev() {
        dp *= z;
        dp += &p;
        p *= z;
        p += ck;
    }
    (p, dp)
}

pub fn horner(c: &[Complex], z: &Complex, prec: u32) -> Complex {
    let mut p = Complex::new(prec);
    for ck in c.iter().rev() {
        p *= z;
        p += ck;
    }
    p
}

/// sum_k |c_k| r^k, the natural scale for a residual at |z| = r.
pub fn abs_sum(c: &[Complex], r: &Float, prec: u32) -> Float {
    let mut s = Float::new(prec);
    for ck in c.iter().rev() {
        s *= r;
        s += Float::with_val(prec, ck.abs_ref());
    }
    s
}

/// |p(z)| / sum_k |c_k| |z|^k
pub fn relative_residual(c: &[Complex], z: &Complex, prec: u32) -> Float {
    let p = horner(c, z, prec);
    let r = Float::with_val(prec, z.abs_ref());
    let s = abs_sum(c, &r, prec);
    Float::with_val(prec, p.abs_ref()) / s
}

/// Starting points on circles read off the upper convex hull of
/// (k, log|c_k|).
pub fn initial_guesses(c: &[Complex], prec: u32) -> Vec<Complex> {
    let pts: Vec<(usize, f64)> = c
        .iter()
        .enumerate()
        .filter(|(_, ck)| !ck.is_zero())
        .map(|(k, ck)| (k, log10_float(&Float::with_val(prec, ck.abs_ref()))))
        .collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            let cross = (x2 as f64 - x1 as f64) * (p.1 - y1) - (y2 - y1) * (p.0 as f64 - x1 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let d = c.len() - 1;
    let mut out = Vec::with_capacity(d);
    for (e, win) in hull.windows(2).enumerate() {
        let (i, li) = win[0];
        let (j, lj) = win[1];
        let m = j - i;
        let log_r = (li - lj) / m as f64;
        let r = Float::with_val(prec, 10).pow(Float::with_val(prec, log_r));
        for q in 0..m {
            let theta = 2.0 * std::f64::consts::PI * (q as f64 / m as f64 + e as f64 / d as f64) + 0.4;
            let dir = Complex::with_val(prec, (theta.cos(), theta.sin()));
            out.push(Complex::with_val(prec, dir * &r));
        }
    }
    out
}

/// All roots of sum_k c_k z^k (c_0 != 0, c_d != 0) at the given precision.
pub fn aberth(
    c: &[Complex],
    prec: u32,
    seeds: Option<Vec<Complex>>,
    max_iter: usize,
) -> Result<Vec<Complex>> {
    let d = c.len().saturating_sub(1);
    if d == 0 {
        return Ok(Vec::new());
    }
    if c[d].is_zero() || c[0].is_zero() {
        return Err(Error::Invalid("leading and constant coefficients must be nonzero".into()));
    }
    let c: Vec<Complex> = c.iter().map(|x| Complex::with_val(prec, x)).collect();
    let mut z = match seeds {
        Some(s) if s.len() == d => s.into_iter().map(|x| Complex::with_val(prec, x)).collect(),
        Some(s) => {
            return Err(Error::Invalid(format!("{} seeds for degree {d}", s.len())));
        }
        None => initial_guesses(&c, prec),
    };
    let mut done = vec![false; d];
    let step_tol = prec as i32 - 8;
    let log2d = (d as f64).log2().ceil() as i32;
    for _ in 0..max_iter {
        let snapshot = &z;
        let updates: Vec<Option<(Complex, bool)>> = (0..d)
            .into_par_iter()
            .map(|i| {
                if done[i] {
                    return None;
                }
                let zi = &snapshot[i];
                let (p, dp) = horner_with_derivative(&c, zi, prec);
                if p.is_zero() {
                    return Some((Complex::new(prec), true));
                }
                let r = Float::with_val(prec, zi.abs_ref());
                let scale = abs_sum(&c, &r, prec);
                let tiny = Float::with_val(prec, p.abs_ref()) <= (scale >> (step_tol - log2d - 4));
                let ratio = Complex::with_val(prec, &p / &dp);
                let mut s = Complex::new(prec);
                for (j, zj) in snapshot.iter().enumerate() {
                    if j != i {
                        let diff = Complex::with_val(prec, zi - zj);
                        s += Complex::with_val(prec, diff.recip_ref());
                    }
                }
                let mut den = Complex::with_val(prec, &ratio * &s);
                den = 1u32 - den;
                let w = Complex::with_val(prec, &ratio / &den);
                let small = Float::with_val(prec, w.abs_ref()) <= (r >> step_tol);
                Some((w, tiny || small))
            })
            .collect();
        let mut all = true;
        for (i, u) in updates.into_iter().enumerate() {
            if let Some((w, conv)) = u {
                if w.real().is_finite() && w.imag().is_finite() {
                    z[i] -= &w;
                }
                if conv {
                    done[i] = true;
                } else {
                    all = false;
                }
            }
        }
        if all {
            return Ok(z);
        }
    }
    let pending: Vec<usize> = (0..d).filter(|&i| !done[i]).collect();
    Err(Error::NonConvergence {
        what: "Aberth iteration",
        detail: format!("{} of {d} roots unconverged: {:?}", pending.len(), pending),
    })
}

/// Newton refinement of a single root at the coefficients' precision.
pub fn newton_polish(c: &[Complex], z: &Complex, prec: u32, max_iter: usize) -> Complex {
    let mut z = Complex::with_val(prec, z);
    for _ in 0..max_iter {
        let (p, dp) = horner_with_derivative(c, &z, prec);
        if p.is_zero() || dp.is_zero() {
            break;
        }
        let step = Complex::with_val(prec, &p / &dp);
        z -= &step;
        let sa = Float::with_val(prec, step.abs_ref());
        let za = Float::with_val(prec, z.abs_ref());
        if sa <= (za >> (prec as i32 - 4)) {
            break;
        }
    }
    z
}
