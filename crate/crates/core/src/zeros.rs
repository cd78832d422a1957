//! All 2n - 2 roots of T(lambda z), the approximate zeros alpha_k on D1,
//! root classification and the zero-counting formulas.

use rayon::prelude::*;
use rug::{Complex, Float};
use serde::{Deserialize, Serialize};

use crate::curves::{d1_level, g1, g1_prime, trace, CurveKind, LevelCurve};
use crate::error::{Error, Result};
use crate::phase::{PhaseContext, ScalingSolution};
use crate::poly::{abs_sum, aberth, horner_with_derivative, initial_guesses, newton_polish};
use crate::precision::{abs_f64, float_to_string, log10_float, pi, pow10, PrecisionContext};
use crate::xi::TaylorPolynomial;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootClass {
    Hurwitz,
    Spurious,
    LocalModel,
}

impl RootClass {
    pub fn label(&self) -> &'static str {
        match self {
            RootClass::Hurwitz => "hurwitz",
            RootClass::Spurious => "spurious",
            RootClass::LocalModel => "local_model",
        }
    }
}

#[derive(Clone, Debug)]
pub struct RootRecord {
    pub z: Complex,
    pub class: RootClass,
    /// |T(lambda z)| / sum_k |b_k| |z|^{2k}
    pub residual: Float,
    /// zeta-zero index j (hurwitz) or alpha index k (spurious, first quadrant)
    pub match_index: Option<i64>,
}

#[derive(Clone, Debug)]
pub struct ZeroSet {
    pub n: u32,
    pub lambda: Float,
    pub digits: u32,
    pub roots: Vec<RootRecord>,
    /// log10 of the worst root condition number
    pub log10_condition: f64,
}

impl ZeroSet {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("re,im,class,residual,match_index\n");
        for r in &self.roots {
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                float_to_string(r.z.real()),
                float_to_string(r.z.imag()),
                r.class.label(),
                float_to_string(&Float::with_val(64, &r.residual)),
                r.match_index.map(|k| k.to_string()).unwrap_or_default()
            ));
        }
        s
    }

    /// 10^(-digits/3)
    pub fn tolerance(&self) -> f64 {
        10f64.powf(-(self.digits as f64) / 3.0)
    }

    /// Roots with |Re z| below the tolerance.
    pub fn on_imaginary_axis(&self) -> usize {
        let tol = self.tolerance();
        self.roots
            .iter()
            .filter(|r| r.z.real().to_f64().abs() < tol)
            .count()
    }

    /// Largest distance from a root's images under z -> -z, z -> conj z
    /// to the nearest root.
    pub fn quartet_defect(&self) -> f64 {
        let pts: Vec<(f64, f64)> = self
            .roots
            .iter()
            .map(|r| (r.z.real().to_f64(), r.z.imag().to_f64()))
            .collect();
        let nearest = |x: f64, y: f64| {
            pts.iter()
                .map(|&(a, b)| (a - x).hypot(b - y))
                .fold(f64::INFINITY, f64::min)
        };
        pts.iter()
            .map(|&(x, y)| nearest(-x, y).max(nearest(x, -y)).max(nearest(-x, -y)))
            .fold(0.0, f64::max)
    }
}

fn sort_key(z: &Complex) -> (f64, f64) {
    (z.real().to_f64(), z.imag().to_f64())
}

/// All roots of T(lambda z) without seeds.
pub fn find_all_roots(
    t: &TaylorPolynomial,
    sc: &ScalingSolution,
    ctx: &PrecisionContext,
) -> Result<ZeroSet> {
    find_all_roots_seeded(t, sc, ctx, &[])
}

/// All roots of T(lambda z); `seeds` (in z) replace the first default
/// starting points in u = z^2.
pub fn find_all_roots_seeded(
    t: &TaylorPolynomial,
    sc: &ScalingSolution,
    ctx: &PrecisionContext,
    seeds: &[Complex],
) -> Result<ZeroSet> {
    let n = sc.n;
    if t.degree != 2 * n as usize - 2 || !t.even {
        return Err(Error::Invalid(format!(
            "need an even polynomial of degree {}, got degree {}",
            2 * n - 2,
            t.degree
        )));
    }
    if t.ctx.digits < ctx.digits {
        return Err(Error::PrecisionInsufficient {
            required: ctx.digits,
            available: t.ctx.digits,
        });
    }
    let prec = t.ctx.bits();
    let b = t.rescaled_even(&sc.lambda, prec);
    let d = b.len() - 1;
    let start = if seeds.is_empty() {
        None
    } else {
        let mut u: Vec<Complex> = Vec::with_capacity(d);
        for z in seeds.iter().take(d) {
            let s = Complex::with_val(prec, z.square_ref());
            if !u.iter().any(|v| abs_f64(&Complex::with_val(64, v - &s)) < 1e-12) {
                u.push(s);
            }
        }
        let defaults = initial_guesses(&b, prec);
        let mut rest = defaults.into_iter();
        while u.len() < d {
            u.push(rest.next().expect("default guesses cover the degree"));
        }
        Some(u)
    };
    let us = aberth(&b, prec, start, 4000)?;
    let polished: Vec<(Complex, Float, f64)> = us
        .par_iter()
        .map(|u| {
            let u = newton_polish(&b, u, prec, 8);
            let r = Float::with_val(prec, u.abs_ref());
            let scale = abs_sum(&b, &r, prec);
            let (p, dp) = horner_with_derivative(&b, &u, prec);
            let res = Float::with_val(prec, p.abs_ref()) / &scale;
            let denom = Float::with_val(prec, dp.abs_ref()) * &r;
            let kappa = if denom.is_zero() {
                f64::INFINITY
            } else {
                log10_float(&Float::with_val(prec, &scale / &denom))
            };
            (u, res, kappa)
        })
        .collect();
    let log10_condition = polished.iter().map(|p| p.2).fold(f64::NEG_INFINITY, f64::max);
    // forward error ~ condition x coefficient accuracy, held to digits/3
    let needed = (ctx.digits as f64 / 3.0 + log10_condition).ceil() as u32;
    if needed > t.ctx.digits {
        return Err(Error::PrecisionInsufficient {
            required: needed,
            available: t.ctx.digits,
        });
    }
    let tol = pow10(-((ctx.digits / 3) as i64), prec);
    let mut roots = Vec::with_capacity(2 * d);
    for (u, res, _) in polished {
        if res > tol {
            return Err(Error::NonConvergence {
                what: "root certification",
                detail: format!("relative residual {:.3e}", res.to_f64()),
            });
        }
        let z = Complex::with_val(prec, u.sqrt_ref());
        let zm = Complex::with_val(prec, -&z);
        for z in [z, zm] {
            roots.push(RootRecord {
                z,
                class: RootClass::Spurious,
                residual: res.clone(),
                match_index: None,
            });
        }
    }
    roots.sort_by(|a, b| {
        let (ka, kb) = (sort_key(&a.z), sort_key(&b.z));
        ka.partial_cmp(&kb).unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(ZeroSet {
        n,
        lambda: sc.lambda.clone(),
        digits: ctx.digits,
        roots,
        log10_condition,
    })
}

#[derive(Clone, Debug)]
pub struct ApproxZero {
    pub k: i64,
    pub alpha: Complex,
}

#[derive(Clone, Debug)]
pub struct ApproxZeroSet {
    pub n: u32,
    pub lambda: Float,
    /// consecutive k, alpha in U (first quadrant)
    pub alphas: Vec<ApproxZero>,
}

impl ApproxZeroSet {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,re,im\n");
        for a in &self.alphas {
            s.push_str(&format!(
                "{},{},{}\n",
                a.k,
                float_to_string(a.alpha.real()),
                float_to_string(a.alpha.imag())
            ));
        }
        s
    }
}

/// alpha_k for every k whose target Im G1 = 2 pi k / n is attained on the
/// traced D1 curve.
pub fn approximate_zeros(pc: &PhaseContext) -> Result<ApproxZeroSet> {
    let curve = trace(CurveKind::D1, pc, 64)?;
    approximate_zeros_on(pc, &curve)
}

/// Target G1 value log n / 2n + 2 pi i k / n.
fn target(pc: &PhaseContext, k: i64) -> Complex {
    let prec = pc.ctx().bits();
    let re = d1_level(pc.n(), prec);
    let im = Float::with_val(prec, pi(prec) * 2u32) * k / pc.n();
    Complex::with_val(prec, (re, im))
}

pub fn approximate_zeros_on(pc: &PhaseContext, curve: &LevelCurve) -> Result<ApproxZeroSet> {
    if curve.kind != CurveKind::D1 || curve.n != pc.n() {
        return Err(Error::Invalid("approximate zeros need the D1 curve for this n".into()));
    }
    let prec = pc.ctx().bits();
    let ims: Vec<f64> = curve
        .points
        .iter()
        .map(|p| g1(pc, p).map(|g| g.imag().to_f64()))
        .collect::<Result<Vec<_>>>()?;
    // Im G1 decreases with x: first point (strip edge) is the top
    let top = ims[0];
    let bottom = *ims.last().expect("curve has points");
    let scale = pc.n() as f64 / (2.0 * std::f64::consts::PI);
    let k_lo = (bottom * scale).ceil() as i64;
    let k_hi = (top * scale).floor() as i64;
    if k_hi < k_lo {
        return Err(Error::RangeExhausted(format!(
            "no target between Im G1 = {bottom} and {top}"
        )));
    }
    let x_edge = curve.points[0].real().clone();
    let tol = pow10(-((pc.ctx().digits / 2) as i64), prec);
    let alphas = (k_lo..=k_hi)
        .into_par_iter()
        .map(|k| {
            let want = 2.0 * std::f64::consts::PI * k as f64 / pc.n() as f64;
            let i = ims.windows(2).position(|w| w[0] >= want && want >= w[1]).unwrap_or(0);
            let t = if ims[i] == ims[i + 1] {
                0.0
            } else {
                (ims[i] - want) / (ims[i] - ims[i + 1])
            };
            let dz = Complex::with_val(prec, &curve.points[i + 1] - &curve.points[i]);
            let mut z = Complex::with_val(prec, &curve.points[i] + dz * t);
            let goal = target(pc, k);
            let mut ok = false;
            for _ in 0..60 {
                let e = Complex::with_val(prec, g1(pc, &z)? - &goal);
                if Float::with_val(prec, e.abs_ref()) <= tol {
                    ok = true;
                    break;
                }
                let d = g1_prime(pc, &z)?;
                z -= Complex::with_val(prec, &e / &d);
            }
            if !ok {
                return Err(Error::NonConvergence {
                    what: "approximate-zero Newton",
                    detail: format!("k = {k}"),
                });
            }
            Ok(ApproxZero { k, alpha: z })
        })
        .collect::<Result<Vec<_>>>()?;
    let alphas = alphas
        .into_iter()
        .filter(|a| a.alpha.real() >= &x_edge && !pc.in_ball(&a.alpha).unwrap_or(true))
        .collect();
    Ok(ApproxZeroSet {
        n: pc.n(),
        lambda: pc.lambda().clone(),
        alphas,
    })
}

/// Assigns hurwitz / local_model / spurious.
pub fn classify(zs: &ZeroSet, pc: &PhaseContext, zeta_zeros: &[Float]) -> Result<ZeroSet> {
    let lam = zs.lambda.to_f64();
    let t: Vec<f64> = zeta_zeros.iter().map(|v| v.to_f64()).collect();
    let t_cover = t.last().copied().unwrap_or(0.0);
    let p = pc.ctx().bits();
    let mut out = zs.clone();
    for r in &mut out.roots {
        let x = r.z.real().to_f64() * lam;
        let y = r.z.imag().to_f64() * lam;
        r.match_index = None;
        if x.abs() < 0.5 {
            if y.abs() > t_cover + 1.0 {
                return Err(Error::Coverage(format!("{:.3}", y.abs())));
            }
            let hit = t.iter().enumerate().find(|&(j, &tj)| {
                let gap = match (j.checked_sub(1).map(|i| t[i]), t.get(j + 1)) {
                    (Some(a), Some(&b)) => (tj - a).min(b - tj),
                    (Some(a), None) => tj - a,
                    (None, Some(&b)) => b - tj,
                    (None, None) => tj,
                };
                x.hypot(y.abs() - tj) < 0.25 * gap
            });
            if let Some((j, _)) = hit {
                r.class = RootClass::Hurwitz;
                r.match_index = Some(j as i64 + 1);
                continue;
            }
        }
        let zp = Complex::with_val(p, &r.z);
        r.class = if pc.in_ball(&zp)? {
            RootClass::LocalModel
        } else {
            RootClass::Spurious
        };
    }
    Ok(out)
}

/// floor and ceil of n delta^2 / (2 pi) - 3/8.
pub fn kcount(n: u32, delta: f64) -> (i64, i64) {
    let v = n as f64 * delta * delta / (2.0 * std::f64::consts::PI) - 0.375;
    (v.floor() as i64, v.ceil() as i64)
}

#[derive(Clone, Debug)]
pub struct PairingReport {
    /// (k, index into roots, |z - alpha|)
    pub pairs: Vec<(i64, usize, f64)>,
    pub max_distance: f64,
}

/// Greedy nearest pairing of first-quadrant roots in U with the alpha_k;
/// sets match_index on the paired roots.
pub fn pair_with_alphas(
    zs: &mut ZeroSet,
    az: &ApproxZeroSet,
    pc: &PhaseContext,
) -> Result<PairingReport> {
    let x_edge = 0.5 / zs.lambda.to_f64();
    let p = pc.ctx().bits();
    let mut cand = Vec::new();
    for (i, r) in zs.roots.iter().enumerate() {
        let (x, y) = sort_key(&r.z);
        if x >= x_edge && y >= 0.0 && !pc.in_ball(&Complex::with_val(p, &r.z))? {
            cand.push(i);
        }
    }
    let mut dists = Vec::new();
    for (ai, a) in az.alphas.iter().enumerate() {
        for &i in &cand {
            let d = abs_f64(&Complex::with_val(p, &zs.roots[i].z - &a.alpha));
            dists.push((d, ai, i));
        }
    }
    dists.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let mut used_a = vec![false; az.alphas.len()];
    let mut used_r = vec![false; zs.roots.len()];
    let mut pairs = Vec::new();
    for (d, ai, i) in dists {
        if used_a[ai] || used_r[i] {
            continue;
        }
        used_a[ai] = true;
        used_r[i] = true;
        pairs.push((az.alphas[ai].k, i, d));
        zs.roots[i].match_index = Some(az.alphas[ai].k);
    }
    pairs.sort_by_key(|p| p.0);
    let max_distance = pairs.iter().map(|p| p.2).fold(0.0, f64::max);
    Ok(PairingReport {
        pairs,
        max_distance,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CountReport {
    pub n: u32,
    pub lambda: String,
    pub delta: String,
    /// height where D1 meets the strip edge
    pub y_edge: String,
    pub z_outside_measured: usize,
    pub z_outside_formula: String,
    /// 5 + 3 log log(lambda Y)
    pub z_outside_allowance: String,
    /// both half planes: 2n - 2 - 2 z_outside_measured
    pub strip_count_measured: usize,
    /// upper half only, the quantity the zero-counting formulas describe
    pub strip_count_upper: usize,
    pub strip_formula: String,
    pub rvm_nt: String,
    pub left_mirror: usize,
    pub kminus: i64,
    pub kplus: i64,
    pub local_count_measured: usize,
    pub approx_zero_count: usize,
    pub approx_zero_formula: String,
    pub hurwitz_count: usize,
}

fn fstr(v: f64) -> String {
    float_to_string(&Float::with_val(53, v))
}

/// Every counting formula evaluated against a classified zero set.
pub fn count_report(
    zs: &ZeroSet,
    pc: &PhaseContext,
    curve: &LevelCurve,
    az: Option<&ApproxZeroSet>,
) -> Result<CountReport> {
    if curve.kind != CurveKind::D1 {
        return Err(Error::Invalid("count report needs the D1 curve".into()));
    }
    let n = zs.n;
    let nf = n as f64;
    let lam = zs.lambda.to_f64();
    let x_edge = 0.5 / lam;
    let y = curve.y_edge.to_f64();
    let ty = lam * y;
    let l = (ty / (2.0 * std::f64::consts::PI)).ln();
    let tp = ty / (2.0 * std::f64::consts::PI);
    let quarter = l / (4.0 * std::f64::consts::PI * y);
    let p = pc.ctx().bits();
    let mut outside = 0;
    let mut strip = 0;
    let mut upper = 0;
    let mut left = 0;
    let mut local = 0;
    let mut hurwitz = 0;
    for r in &zs.roots {
        let (x, im) = sort_key(&r.z);
        if x > x_edge {
            outside += 1;
            if pc.in_ball(&Complex::with_val(p, &r.z))? {
                local += 1;
            }
        } else if x < -x_edge {
            left += 1;
        } else {
            strip += 1;
            if im > 0.0 {
                upper += 1;
            }
        }
        if r.class == RootClass::Hurwitz {
            hurwitz += 1;
        }
    }
    let (kminus, kplus) = kcount(n, pc.delta);
    let approx_formula = nf / 2.0 - tp / 2.0 * l + tp / 2.0 - quarter / 2.0
        - nf * pc.delta * pc.delta / (2.0 * std::f64::consts::PI);
    Ok(CountReport {
        n,
        lambda: float_to_string(&zs.lambda),
        delta: fstr(pc.delta),
        y_edge: float_to_string(&curve.y_edge),
        z_outside_measured: outside,
        z_outside_formula: fstr(nf - tp * l + tp - quarter),
        z_outside_allowance: fstr(5.0 + 3.0 * ty.ln().ln()),
        strip_count_measured: strip,
        strip_count_upper: upper,
        strip_formula: fstr(tp * l - tp + quarter),
        rvm_nt: fstr(tp * l - tp),
        left_mirror: left,
        kminus,
        kplus,
        local_count_measured: local,
        approx_zero_count: az.map(|a| a.alphas.len()).unwrap_or(0),
        approx_zero_formula: fstr(approx_formula),
        hurwitz_count: hurwitz,
    })
}

/// Working digits of the phase-level evaluations in a census.
pub const CENSUS_PHASE_DIGITS: u32 = 30;

/// Coefficient digits that keep the root condition numbers covered.
pub fn census_digits(n: u32) -> u32 {
    (0.8 * n as f64 + 40.0).ceil() as u32
}

/// Roots, classification, approximate zeros and counts for one n.
pub struct Census {
    pub zeros: ZeroSet,
    pub phase: PhaseContext,
    pub curve: LevelCurve,
    pub approx: ApproxZeroSet,
    pub pairing: PairingReport,
    pub report: CountReport,
}

pub fn census(n: u32, digits: u32, delta: f64) -> Result<Census> {
    let degree = 2 * n as usize - 2;
    let ctx = PrecisionContext::for_degree(digits, degree)?;
    let sc = crate::phase::lambda_of_n(n, &ctx)?;
    let t = crate::xi::taylor_coeffs(degree, &ctx)?;
    let zs = find_all_roots(&t, &sc, &ctx)?;
    let pctx = PrecisionContext::new(CENSUS_PHASE_DIGITS.min(digits))?;
    let phase = PhaseContext::for_xi(n, &pctx)?.with_delta(delta)?;
    let lam = zs.lambda.to_f64();
    let t_max = zs
        .roots
        .iter()
        .filter(|r| r.z.real().to_f64().abs() * lam < 0.5)
        .map(|r| r.z.imag().to_f64().abs() * lam)
        .fold(0.0, f64::max);
    let zeta_zeros = crate::xi::critical_line_zeros(t_max + 2.0, &pctx)?;
    let mut zeros = classify(&zs, &phase, &zeta_zeros)?;
    let curve = trace(CurveKind::D1, &phase, 64)?;
    let approx = approximate_zeros_on(&phase, &curve)?;
    let pairing = pair_with_alphas(&mut zeros, &approx, &phase)?;
    let report = count_report(&zeros, &phase, &curve, Some(&approx))?;
    Ok(Census {
        zeros,
        phase,
        curve,
        approx,
        pairing,
        report,
    })
}
