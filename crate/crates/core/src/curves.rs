//! Level curves in the first quadrant: D0 (Re phi = 0), D1 (Re G1 = log n / 2n
//! with G1 = phi + (1/n) log h0), their graph y = Y(x) between the strip edge
//! x = 1/(2 lambda) and the disk around z = 1, and the strip-edge height.
//! The exp analogues (D∞ and its first correction) live here too.

use rug::{Complex, Float};
use serde::{Deserialize, Serialize};

use crate::classical::{exp_level_value, ExpCurve};
use crate::error::{Error, Result};
use crate::phase::PhaseContext;
use crate::precision::{abs_f64, float_to_string, pow10};
use crate::specfun::lambert_w0_f64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveKind {
    D0,
    D1,
    ExpDinf,
    ExpD1,
}

impl CurveKind {
    pub fn label(&self) -> &'static str {
        match self {
            CurveKind::D0 => "D0",
            CurveKind::D1 => "D1",
            CurveKind::ExpDinf => "exp-Dinf",
            CurveKind::ExpD1 => "exp-D1",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "D0" | "d0" => Ok(CurveKind::D0),
            "D1" | "d1" => Ok(CurveKind::D1),
            "exp-Dinf" | "Dinf" | "dinf" => Ok(CurveKind::ExpDinf),
            "exp-D1" | "exp-d1" => Ok(CurveKind::ExpD1),
            _ => Err(Error::Invalid(format!("unknown curve kind '{s}'"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct LevelCurve {
    pub kind: CurveKind,
    pub n: u32,
    /// lambda(n) for D0/D1, the scale n for the exp curves
    pub lambda: Float,
    /// ordered by increasing x
    pub points: Vec<Complex>,
    /// Im of the first point: the strip-edge height for D1
    pub y_edge: Float,
}

impl LevelCurve {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("kind,n,lambda,x,y\n");
        let lam = float_to_string(&self.lambda);
        for p in &self.points {
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                self.kind.label(),
                self.n,
                lam,
                float_to_string(p.real()),
                float_to_string(p.imag())
            ));
        }
        s
    }
}

/// G1(z) = phi(z) + (1/n) log h0(z).
pub fn g1(pc: &PhaseContext, z: &Complex) -> Result<Complex> {
    let prec = pc.ctx().bits();
    let mut g = pc.phi(z)?;
    let h = pc.h0(z)?;
    g += Complex::with_val(prec, h.ln_ref()) / pc.n();
    Ok(g)
}

/// G1'(z) = phi'(z) + (1/n) 2z / (1 - z^2).
pub fn g1_prime(pc: &PhaseContext, z: &Complex) -> Result<Complex> {
    let prec = pc.ctx().bits();
    let mut d = pc.phi_prime(z)?;
    let den = Complex::with_val(prec, 1u32 - Complex::with_val(prec, z.square_ref()));
    let t = Complex::with_val(prec, z * 2u32) / den;
    d += t / pc.n();
    Ok(d)
}

/// log n / (2n)
pub fn d1_level(n: u32, prec: u32) -> Float {
    let nf = Float::with_val(prec, n);
    Float::with_val(prec, nf.ln_ref()) / (2 * n)
}

fn check_kind(kind: CurveKind) -> Result<()> {
    match kind {
        CurveKind::D0 | CurveKind::D1 => Ok(()),
        _ => Err(Error::Invalid(format!("{} is not a phase level curve", kind.label()))),
    }
}

/// Signed level residual: Re phi (D0) or Re G1 - log n / 2n (D1).
pub fn level_value(kind: CurveKind, pc: &PhaseContext, z: &Complex) -> Result<Float> {
    let prec = pc.ctx().bits();
    match kind {
        CurveKind::D0 => pc.phi_re(z),
        CurveKind::D1 => {
            let mut r = pc.phi_re(z)?;
            let h = pc.h0(z)?;
            let lh = Float::with_val(prec, h.abs_ref()).ln();
            r += lh / pc.n();
            r -= d1_level(pc.n(), prec);
            Ok(r)
        }
        _ => Err(Error::Invalid("exp curves have no phase level".into())),
    }
}

fn level_deriv(kind: CurveKind, pc: &PhaseContext, z: &Complex) -> Result<Complex> {
    match kind {
        CurveKind::D0 => pc.phi_prime(z),
        _ => g1_prime(pc, z),
    }
}

/// 10^(-digits/2)
fn level_tol(pc: &PhaseContext) -> Float {
    pow10(-((pc.ctx().digits / 2) as i64), pc.ctx().bits())
}

const Y_MAX: f64 = 2.0;
const Y_GRID: usize = 48;

fn point(pc: &PhaseContext, x: &Float, y: &Float) -> Complex {
    Complex::with_val(pc.ctx().bits(), (x, y))
}

/// Number of sign changes of the level function on a uniform grid in y.
pub fn sign_changes(kind: CurveKind, pc: &PhaseContext, x: f64, grid: usize) -> Result<usize> {
    check_kind(kind)?;
    let prec = pc.ctx().bits();
    let xf = Float::with_val(prec, x);
    let mut prev: Option<bool> = None;
    let mut count = 0;
    for k in 1..=grid {
        let y = Float::with_val(prec, Y_MAX * k as f64 / grid as f64);
        let s = level_value(kind, pc, &point(pc, &xf, &y))?.is_sign_positive();
        if let Some(p) = prev {
            if p != s {
                count += 1;
            }
        }
        prev = Some(s);
    }
    Ok(count)
}

/// Newton in y at fixed x; None when the iteration leaves y > 0 or stalls.
fn newton_y(kind: CurveKind, pc: &PhaseContext, x: &Float, y0: &Float) -> Result<Option<Float>> {
    let prec = pc.ctx().bits();
    let tol = level_tol(pc);
    let step_tol = Float::with_val(prec, &tol * 1e-3f64);
    let mut y = y0.clone();
    for _ in 0..40 {
        let z = point(pc, x, &y);
        let l = level_value(kind, pc, &z)?;
        let d = level_deriv(kind, pc, &z)?;
        // d Re G / dy = -Im G'
        let dl = Float::with_val(prec, -d.imag());
        if dl.is_zero() {
            return Ok(None);
        }
        let step = Float::with_val(prec, &l / &dl);
        y -= &step;
        if !y.is_finite() || y.is_sign_negative() || y.is_zero() || y > Y_MAX * 2.0 {
            return Ok(None);
        }
        if Float::with_val(prec, step.abs_ref()) <= step_tol {
            let r = level_value(kind, pc, &point(pc, x, &y))?;
            if Float::with_val(prec, r.abs_ref()) <= tol {
                return Ok(Some(y));
            }
        }
    }
    Ok(None)
}

/// The unique y > 0 with the point x + iy on the curve: grid bracket,
/// bisection, then Newton.
pub fn y_of_x(x: f64, kind: CurveKind, pc: &PhaseContext) -> Result<Float> {
    check_kind(kind)?;
    let prec = pc.ctx().bits();
    let xf = Float::with_val(prec, x);
    let lv = |y: &Float| -> Result<Float> { level_value(kind, pc, &point(pc, &xf, y)) };
    let mut lo = Float::with_val(prec, 1e-3);
    if lv(&lo)?.is_sign_positive() {
        return Err(Error::BracketFailure(format!(
            "level is positive at y = 0.001 for x = {x}"
        )));
    }
    let mut hi = None;
    for k in 1..=Y_GRID {
        let y = Float::with_val(prec, Y_MAX * k as f64 / Y_GRID as f64);
        if lv(&y)?.is_sign_positive() {
            hi = Some(y);
            break;
        }
        lo = y;
    }
    let mut hi = hi.ok_or_else(|| {
        Error::BracketFailure(format!("no sign change in y <= {Y_MAX} at x = {x}"))
    })?;
    for _ in 0..30 {
        let mid = Float::with_val(prec, &lo + &hi) / 2u32;
        if lv(&mid)?.is_sign_positive() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mid = Float::with_val(prec, &lo + &hi) / 2u32;
    newton_y(kind, pc, &xf, &mid)?.ok_or_else(|| Error::NonConvergence {
        what: "level-curve Newton",
        detail: format!("x = {x}"),
    })
}

/// Leading-order graph near the strip edge:
/// (8n/(pi lambda)) W((pi lambda / 8n) e^{-1 + x + (lambda + log n)/(4n)}).
pub fn y_lambert(x: f64, pc: &PhaseContext) -> f64 {
    let n = pc.n() as f64;
    let lam = pc.lambda().to_f64();
    let a = std::f64::consts::PI * lam / (8.0 * n);
    lambert_w0_f64(a * (-1.0 + x + (lam + n.ln()) / (4.0 * n)).exp()) / a
}

/// Height at which D1 meets the strip edge x = 1/(2 lambda).
pub fn y_edge(pc: &PhaseContext) -> Result<Float> {
    let x0 = strip_edge(pc);
    y_of_x(x0, CurveKind::D1, pc)
}

pub fn strip_edge(pc: &PhaseContext) -> f64 {
    Float::with_val(64, pc.lambda().recip_ref()).to_f64() / 2.0
}

/// |phi(z)| - delta^2: negative inside B_{1,delta}.
fn ball_gap(pc: &PhaseContext, z: &Complex) -> Result<f64> {
    let p = pc.phi(z)?;
    Ok(abs_f64(&p) - pc.delta * pc.delta)
}

/// Predictor-corrector continuation from the strip edge to the boundary of
/// B_{1,delta}, parameterised by x.
pub fn trace(kind: CurveKind, pc: &PhaseContext, samples: usize) -> Result<LevelCurve> {
    check_kind(kind)?;
    if samples < 16 {
        return Err(Error::Invalid(format!("samples must be at least 16, got {samples}")));
    }
    let prec = pc.ctx().bits();
    let x0 = strip_edge(pc);
    // span up to the linearised disk edge, so roughly `samples` points
    let r_ball = pc.delta / (pc.curvature() / 2.0).sqrt();
    let cap = (1.0 - x0 - r_ball).max(0.25 * (1.0 - x0)) / samples as f64;
    let min_step = cap * 2f64.powi(-24);
    let y0 = y_of_x(x0, kind, pc)?;
    let mut xs = Float::with_val(prec, x0);
    let mut ys = y0.clone();
    let mut points = vec![point(pc, &xs, &ys)];
    loop {
        let z = point(pc, &xs, &ys);
        let d = level_deriv(kind, pc, &z)?;
        // dy/dx = Re G' / Im G'
        let slope = Float::with_val(prec, d.real() / d.imag());
        let s = slope.to_f64().abs();
        let mut dx = cap / s.max(1.0);
        let (x1, y1) = loop {
            let x1 = Float::with_val(prec, &xs + dx);
            let pred = Float::with_val(prec, &ys + Float::with_val(prec, &slope * dx));
            if pred.is_sign_positive() {
                if let Some(y1) = newton_y(kind, pc, &x1, &pred)? {
                    let jump = Float::with_val(prec, &y1 - &pred).to_f64().abs();
                    if jump <= cap {
                        break (x1, y1);
                    }
                }
            }
            dx /= 2.0;
            if dx < min_step {
                return Err(Error::ContinuationStall(format!(
                    "step underflow at x = {}",
                    xs.to_f64()
                )));
            }
        };
        let z1 = point(pc, &x1, &y1);
        if ball_gap(pc, &z1)? < 0.0 || x1 >= 1.0 {
            let exit = ball_exit(kind, pc, (&xs, &ys), (&x1, &y1))?;
            points.push(exit);
            break;
        }
        xs = x1;
        ys = y1;
        points.push(z1);
        if points.len() > 64 * samples {
            return Err(Error::ContinuationStall("too many steps".into()));
        }
    }
    Ok(LevelCurve {
        kind,
        n: pc.n(),
        lambda: pc.lambda().clone(),
        y_edge: y0,
        points,
    })
}

/// Bisection in x for the point where the curve crosses the disk boundary.
fn ball_exit(
    kind: CurveKind,
    pc: &PhaseContext,
    outside: (&Float, &Float),
    inside: (&Float, &Float),
) -> Result<Complex> {
    let prec = pc.ctx().bits();
    let (mut xa, mut ya) = (outside.0.clone(), outside.1.clone());
    let (mut xb, mut yb) = (inside.0.clone(), inside.1.clone());
    for _ in 0..40 {
        let xm = Float::with_val(prec, &xa + &xb) / 2u32;
        let guess = Float::with_val(prec, &ya + &yb) / 2u32;
        let ym = newton_y(kind, pc, &xm, &guess)?.ok_or_else(|| Error::NonConvergence {
            what: "disk-exit bisection",
            detail: format!("x = {}", xm.to_f64()),
        })?;
        let zm = point(pc, &xm, &ym);
        if xm < 1.0 && ball_gap(pc, &zm)? >= 0.0 {
            xa = xm;
            ya = ym;
        } else {
            xb = xm;
            yb = ym;
        }
        if Float::with_val(prec, &xb - &xa).to_f64() < 1e-12 {
            break;
        }
    }
    Ok(point(pc, &xa, &ya))
}

/// Samples of the exp level curves |z e^{1-z}| = 1 and
/// |z e^{1-z}|^n = sqrt(2 pi n) |1 - z| in the upper half plane, |Re z| < 1.
pub fn szego_exp_curves(n: u32, kind: CurveKind, samples: usize) -> Result<LevelCurve> {
    if n < 4 {
        return Err(Error::Invalid(format!("n must be at least 4, got {n}")));
    }
    if samples < 2 {
        return Err(Error::Invalid("at least two samples".into()));
    }
    let prec = 128;
    let ec = match kind {
        CurveKind::ExpDinf => ExpCurve::Dinf,
        CurveKind::ExpD1 => ExpCurve::D1,
        _ => return Err(Error::Invalid(format!("{} is not an exp curve", kind.label()))),
    };
    let lv = |x: f64, y: f64| exp_level_value(ec, n, &Complex::with_val(prec, (x, y)));
    // left end on the real axis: x = -e^{x-1}, i.e. x = -W(1/e)
    let x_left = -lambert_w0_f64((-1f64).exp());
    let mut points = Vec::new();
    for k in 0..=samples {
        let x = x_left + (1.0 - x_left) * k as f64 / samples as f64;
        let y = match ec {
            ExpCurve::Dinf => {
                let v = (2.0 * (x - 1.0)).exp() - x * x;
                if k == 0 || k == samples || v <= 0.0 {
                    0.0
                } else {
                    v.sqrt()
                }
            }
            ExpCurve::D1 => {
                // level -> -inf at the axis far from 1 and +inf at large y
                let (mut lo, mut hi) = (1e-12, 2.0);
                if !(lv(x, lo) < 0.0 && lv(x, hi) > 0.0) {
                    continue;
                }
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if lv(x, mid) > 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                0.5 * (lo + hi)
            }
        };
        points.push(Complex::with_val(prec, (x, y)));
    }
    let y_edge = points
        .iter()
        .find(|p| p.real().is_sign_positive())
        .map(|p| p.imag().clone())
        .unwrap_or_else(|| Float::new(prec));
    Ok(LevelCurve {
        kind,
        n,
        lambda: Float::with_val(prec, n),
        points,
        y_edge,
    })
}
