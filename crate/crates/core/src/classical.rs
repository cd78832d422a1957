//! Partial sums of exp and cosh: zeros, the cosh Hurwitz table and the
//! rate at which exp zeros approach the Szegő curve and its correction.

use rayon::prelude::*;
use rug::{Complex, Float};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{aberth, newton_polish, relative_residual};
use crate::precision::{abs_f64, float_to_string, log10_float, pi, PrecisionContext};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SumKind {
    Exp,
    Cosh,
}

/// T(F; scale·z) for F = exp (degree n - 1, scale n) or cosh (degree n,
/// scale n + 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PartialSum {
    pub kind: SumKind,
    pub degree: usize,
    pub scale: u32,
}

impl PartialSum {
    pub fn exp(n: u32) -> Self {
        Self {
            kind: SumKind::Exp,
            degree: n as usize - 1,
            scale: n,
        }
    }

    pub fn cosh(n: u32) -> Self {
        Self {
            kind: SumKind::Cosh,
            degree: n as usize,
            scale: n + 1,
        }
    }

    /// Coefficients in z (exp) or in u = z^2 (cosh), ascending.
    fn coefficients(&self, prec: u32) -> Vec<Complex> {
        let s = Float::with_val(prec, self.scale);
        let mut out = Vec::new();
        let mut term = Float::with_val(prec, 1);
        match self.kind {
            SumKind::Exp => {
                for k in 0..=self.degree {
                    if k > 0 {
                        term *= &s;
                        term /= k as u32;
                    }
                    out.push(Complex::with_val(prec, (&term, 0)));
                }
            }
            SumKind::Cosh => {
                for k in 0..=self.degree {
                    if k > 0 {
                        term *= &s;
                        term /= k as u32;
                    }
                    if k % 2 == 0 {
                        out.push(Complex::with_val(prec, (&term, 0)));
                    }
                }
            }
        }
        out
    }

    /// Value of the rescaled partial sum at z.
    pub fn eval(&self, z: &Complex, prec: u32) -> Complex {
        let c = self.coefficients(prec);
        let x = match self.kind {
            SumKind::Exp => Complex::with_val(prec, z),
            SumKind::Cosh => Complex::with_val(prec, z.square_ref()),
        };
        crate::poly::horner(&c, &x, prec)
    }
}

/// All roots of the rescaled partial sum, residual-certified.
pub fn roots_partial_sum(ps: &PartialSum, ctx: &PrecisionContext) -> Result<Vec<Complex>> {
    if ps.degree < 2 || (ps.kind == SumKind::Cosh && ps.degree % 2 == 1) {
        return Err(Error::Invalid(format!(
            "unsupported degree {} for {:?}",
            ps.degree, ps.kind
        )));
    }
    // e^{scale (|z| - Re z)} cancellation on the zero set
    let prec = ctx.bits() + ps.scale + 16;
    let c = ps.coefficients(prec);
    let roots = aberth(&c, prec, None, 2000)?;
    let tol = Float::with_val(64, 10f64.powf(-(ctx.digits as f64) / 3.0));
    let mut bad = Vec::new();
    for (i, r) in roots.iter().enumerate() {
        if relative_residual(&c, r, prec) > tol {
            bad.push(i);
        }
    }
    if !bad.is_empty() {
        return Err(Error::NonConvergence {
            what: "partial-sum roots",
            detail: format!("residual above tolerance at indices {bad:?}"),
        });
    }
    Ok(match ps.kind {
        SumKind::Exp => roots,
        SumKind::Cosh => {
            let mut out = Vec::with_capacity(ps.degree);
            for u in roots {
                let z = Complex::with_val(prec, u.sqrt_ref());
                out.push(Complex::with_val(prec, -z.clone()));
                out.push(z);
            }
            out
        }
    })
}

/// Reference distance for row k as (mantissa, base-10 exponent); k = 1 is
/// below the f64 range.
pub fn reference_table1(k: usize) -> (f64, i32) {
    const EXACT: [(f64, i32); 24] = [
        (6.4203, -343),
        (1.5341, -246),
        (9.9742, -202),
        (3.2819, -172),
        (3.6516, -150),
        (1.4648, -132),
        (6.6037, -118),
        (2.3563, -105),
        (2.2431, -94),
        (1.2781, -84),
        (7.6667, -76),
        (7.2966, -68),
        (1.4982, -60),
        (8.4059, -54),
        (1.5514, -47),
        (1.0925, -41),
        (3.3118, -36),
        (4.7719, -31),
        (3.5500, -26),
        (1.4618, -21),
        (3.5351, -17),
        (5.2813, -13),
        (5.0926, -9),
        (3.2346, -5),
    ];
    EXACT[k - 1]
}

#[derive(Clone, Debug)]
pub struct Table1Row {
    pub k: usize,
    pub computed: Float,
    /// computed / reference
    pub ratio: f64,
}

impl Table1Row {
    pub fn reference_string(&self) -> String {
        let (m, e) = reference_table1(self.k);
        format!("{m:.4}e{e}")
    }
}

/// |(2k-1)pi/402 - z_k| for the 24 lowest roots of T_200(cosh; 201 z) on the
/// positive imaginary axis.
pub fn table1(ctx: &PrecisionContext) -> Result<Vec<Table1Row>> {
    const MIN_DIGITS: u32 = 400;
    if ctx.digits < MIN_DIGITS {
        return Err(Error::PrecisionInsufficient {
            required: MIN_DIGITS,
            available: ctx.digits,
        });
    }
    let ps = PartialSum::cosh(200);
    let prec = ctx.bits();
    let c = ps.coefficients(prec);
    let roots = aberth(&c, prec, None, 2000)?;
    // negative real u <=> imaginary z
    let mut axis: Vec<Complex> = roots
        .into_iter()
        .filter(|u| {
            let re = u.real().to_f64();
            let im = u.imag().to_f64();
            re < 0.0 && im.abs() <= 1e-20 * re.abs()
        })
        .collect();
    axis.sort_by(|a, b| b.real().partial_cmp(a.real()).expect("finite roots"));
    if axis.len() < 24 {
        return Err(Error::Consistency(format!(
            "{} roots on the imaginary axis, expected at least 24",
            axis.len()
        )));
    }
    let hp = 2 * prec;
    let ch = ps.coefficients(hp);
    let rows = axis[..24]
        .par_iter()
        .enumerate()
        .map(|(i, u)| {
            let start = Complex::with_val(hp, (u.real(), 0));
            let u = newton_polish(&ch, &start, hp, 200);
            let y = Float::with_val(hp, -Float::with_val(hp, u.real())).sqrt();
            let k = i + 1;
            let target = pi(hp) * (2 * k as u32 - 1) / 402u32;
            let diff = Float::with_val(hp, &target - &y).abs();
            let (m, e) = reference_table1(k);
            let ratio = 10f64.powf(log10_float(&diff) - (m.log10() + e as f64));
            Table1Row {
                k,
                computed: Float::with_val(prec, diff),
                ratio,
            }
        })
        .collect();
    Ok(rows)
}

pub fn table1_csv(rows: &[Table1Row]) -> String {
    let mut s = String::from("k,reference_value,computed_value,ratio\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{}\n",
            r.k,
            r.reference_string(),
            float_to_string(&Float::with_val(64, &r.computed)),
            float_to_string(&Float::with_val(53, r.ratio))
        ));
    }
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExpCurve {
    /// |z e^{1-z}| = 1
    Dinf,
    /// |z e^{1-z}|^n / (sqrt(2 pi n) |1 - z|) = 1
    D1,
}

/// Re Phi and Phi' for the exp level functions.
fn exp_level(kind: ExpCurve, n: u32, z: &Complex, prec: u32) -> (Float, Complex) {
    let lz = Complex::with_val(prec, z.ln_ref());
    let mut phi = Complex::with_val(prec, &lz + 1u32);
    phi -= z;
    let mut d = Complex::with_val(prec, z.recip_ref());
    d -= 1u32;
    match kind {
        ExpCurve::Dinf => (phi.real().clone(), d),
        ExpCurve::D1 => {
            let nf = Float::with_val(prec, n);
            let mut v = Float::with_val(prec, phi.real() * &nf);
            let two_pi_n = Float::with_val(prec, pi(prec) * 2u32) * &nf;
            v -= Float::with_val(prec, two_pi_n.ln_ref()) / 2u32;
            let om = Complex::with_val(prec, 1u32 - z);
            v -= Float::with_val(prec, Float::with_val(prec, om.abs_ref()).ln_ref());
            let mut dd = Complex::with_val(prec, &d * &nf);
            dd += Complex::with_val(prec, om.recip_ref());
            (v, dd)
        }
    }
}

/// Distance from z to the level curve by gradient projection.
pub fn distance_to_exp_curve(kind: ExpCurve, n: u32, z: &Complex) -> f64 {
    let prec = 160;
    let z0 = Complex::with_val(prec, z);
    let mut p = z0.clone();
    for _ in 0..60 {
        let (e, d) = exp_level(kind, n, &p, prec);
        let g = Complex::with_val(prec, d.conj_ref());
        let g2 = Float::with_val(prec, d.norm_ref());
        let step = Complex::with_val(prec, &g * &e) / g2;
        p -= &step;
        if abs_f64(&step) < 1e-30 {
            break;
        }
    }
    abs_f64(&Complex::with_val(prec, &p - &z0))
}

/// Level residual used by the curve sampler and the tests.
pub fn exp_level_value(kind: ExpCurve, n: u32, z: &Complex) -> f64 {
    exp_level(kind, n, z, z.prec().0.max(64)).0.to_f64()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DistanceRow {
    pub n: u32,
    pub roots_used: usize,
    pub max_dist_dinf: f64,
    pub max_dist_d1: f64,
    pub max_re: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DistanceScaling {
    pub exclusion: f64,
    pub rows: Vec<DistanceRow>,
    /// p in dist ~ (log n / n)^p
    pub dinf_exponent: f64,
    /// p in dist ~ n^-p
    pub d1_exponent: f64,
}

/// Least-squares slope of y against x.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let m = x.len() as f64;
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Default exclusion radius around the stationary point z = 1.
pub const DEFAULT_EXCLUSION: f64 = 0.5;

/// Max distance of exp zeros with |z - 1| > exclusion to D∞ and to D_n^(1).
pub fn szego_distance_scaling(
    n_values: &[u32],
    exclusion: f64,
    ctx: &PrecisionContext,
) -> Result<DistanceScaling> {
    if n_values.len() < 2 || n_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Invalid("n values must be ascending, at least two".into()));
    }
    let mut rows = Vec::new();
    for &n in n_values {
        let roots = roots_partial_sum(&PartialSum::exp(n), ctx)?;
        let far: Vec<&Complex> = roots
            .iter()
            .filter(|z| abs_f64(&Complex::with_val(64, *z - 1u32)) > exclusion)
            .collect();
        let dists: Vec<(f64, f64)> = far
            .par_iter()
            .map(|z| {
                (
                    distance_to_exp_curve(ExpCurve::Dinf, n, z),
                    distance_to_exp_curve(ExpCurve::D1, n, z),
                )
            })
            .collect();
        let max_re = roots
            .iter()
            .map(|z| z.real().to_f64().abs())
            .fold(0.0, f64::max);
        rows.push(DistanceRow {
            n,
            roots_used: far.len(),
            max_dist_dinf: dists.iter().map(|d| d.0).fold(0.0, f64::max),
            max_dist_d1: dists.iter().map(|d| d.1).fold(0.0, f64::max),
            max_re,
        });
    }
    let xs: Vec<f64> = rows
        .iter()
        .map(|r| ((r.n as f64).ln() / r.n as f64).ln())
        .collect();
    let yi: Vec<f64> = rows.iter().map(|r| r.max_dist_dinf.ln()).collect();
    let ln: Vec<f64> = rows.iter().map(|r| (r.n as f64).ln()).collect();
    let y1: Vec<f64> = rows.iter().map(|r| r.max_dist_d1.ln()).collect();
    Ok(DistanceScaling {
        exclusion,
        dinf_exponent: fit_slope(&xs, &yi),
        d1_exponent: -fit_slope(&ln, &y1),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::cplx;

    #[test]
    fn exp_roots_track_d1() {
        let ctx = PrecisionContext::new(60).unwrap();
        let roots = roots_partial_sum(&PartialSum::exp(60), &ctx).unwrap();
        assert_eq!(roots.len(), 59);
        // just outside D∞, on D1 up to O(1/n) away from z = 1
        for z in &roots {
            assert!(z.real().to_f64().abs() < 1.0);
            let (v, _) = exp_level(ExpCurve::Dinf, 60, z, 128);
            assert!(v > 0.0 && v < 0.06, "{z}: {v}");
            let one_minus = Complex::with_val(128, 1u32 - z);
            if abs_f64(&one_minus) > 0.5 {
                let (w, _) = exp_level(ExpCurve::D1, 60, z, 128);
                assert!(w.to_f64().abs() < 0.05, "{z}: {w}");
            }
        }
    }

    #[test]
    fn exp_roots_at_201_lie_in_a_thin_band() {
        let ctx = PrecisionContext::new(40).unwrap();
        let roots = roots_partial_sum(&PartialSum::exp(201), &ctx).unwrap();
        assert_eq!(roots.len(), 200);
        for z in &roots {
            let mut e = Complex::with_val(128, 1u32 - z).exp();
            e *= z;
            let m = abs_f64(&e);
            // mpmath: 1.01043 ... 1.01918
            assert!(m > 1.0104 && m < 1.0192, "{z}: {m}");
        }
    }

    #[test]
    fn cosh_roots_symmetric() {
        let ctx = PrecisionContext::new(80).unwrap();
        let roots = roots_partial_sum(&PartialSum::cosh(40), &ctx).unwrap();
        assert_eq!(roots.len(), 40);
        let ps = PartialSum::cosh(40);
        let p = ctx.bits();
        let v = ps.eval(&cplx(p, 0.0, 0.0), p);
        assert_eq!(v, cplx(p, 1.0, 0.0));
    }

    #[test]
    fn dinf_contains_one_and_crosses_axis_at_inverse_e() {
        let p = 128;
        assert!(exp_level_value(ExpCurve::Dinf, 10, &cplx(p, 1.0, 0.0)).abs() < 1e-30);
        let y = (-1f64).exp();
        assert!(exp_level_value(ExpCurve::Dinf, 10, &cplx(p, 0.0, y)).abs() < 1e-15);
        // gradient of Re(log z + 1 - z) at i/e is (-1, e)
        let d = distance_to_exp_curve(ExpCurve::Dinf, 10, &cplx(p, 0.0, y + 1e-3));
        let e = std::f64::consts::E;
        assert!((d - 1e-3 * e / (1.0 + e * e).sqrt()).abs() < 1e-5, "{d}");
    }

    #[test]
    fn table1_needs_400_digits() {
        let ctx = PrecisionContext::new(100).unwrap();
        assert!(matches!(table1(&ctx), Err(Error::PrecisionInsufficient { .. })));
    }

    #[test]
    fn slope_fit() {
        let x = [1.0, 2.0, 3.0];
        let y = [2.0, 4.0, 6.0];
        assert!((fit_slope(&x, &y) - 2.0).abs() < 1e-12);
    }
}
