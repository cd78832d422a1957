//! Working precision and arbitrary-precision number helpers.
//!
//! Every numerical routine receives a [`PrecisionContext`] explicitly; there is
//! no global precision state. Reals and complex numbers are MPFR/MPC values
//! from `rug`, whose basic operations are correctly rounded, so results are
//! reproducible bit for bit for a given context.

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// log2(10)
pub const LOG2_10: f64 = std::f64::consts::LOG2_10;

/// Decimal working precision plus internal guard digits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrecisionContext {
    pub digits: u32,
    pub guard_digits: u32,
}

impl PrecisionContext {
    pub const MIN_DIGITS: u32 = 16;
    pub const DEFAULT_GUARD: u32 = 10;

    pub fn new(digits: u32) -> Result<Self> {
        if digits < Self::MIN_DIGITS {
            return Err(Error::Invalid(format!(
                "digits must be at least {}, got {digits}",
                Self::MIN_DIGITS
            )));
        }
        Ok(Self {
            digits,
            guard_digits: Self::DEFAULT_GUARD,
        })
    }

    /// Context for work on polynomials of the given degree:
    /// guard = 10 + ceil(log10(degree)).
    pub fn for_degree(digits: u32, degree: usize) -> Result<Self> {
        let mut ctx = Self::new(digits)?;
        ctx.guard_digits = Self::DEFAULT_GUARD + (degree.max(1) as f64).log10().ceil() as u32;
        Ok(ctx)
    }

    pub fn with_guard(mut self, guard_digits: u32) -> Self {
        self.guard_digits = guard_digits;
        self
    }

    /// Same guard, different digit count (clamped at the minimum).
    pub fn with_digits(mut self, digits: u32) -> Self {
        self.digits = digits.max(Self::MIN_DIGITS);
        self
    }

    pub fn total_digits(&self) -> u32 {
        self.digits + self.guard_digits
    }

    /// Binary precision used for stored values.
    pub fn bits(&self) -> u32 {
        digits_to_bits(self.total_digits())
    }

    /// 10^(-digits)
    pub fn eps(&self) -> Float {
        pow10(-(self.digits as i64), self.bits())
    }

    /// 10^(-digits + guard): the tolerance the derived quantities are held to.
    pub fn guarded_tol(&self) -> Float {
        pow10(
            -(self.digits as i64) + self.guard_digits as i64,
            self.bits(),
        )
    }
}

pub fn digits_to_bits(digits: u32) -> u32 {
    (digits as f64 * LOG2_10).ceil() as u32 + 16
}

pub fn bits_to_digits(bits: u32) -> u32 {
    (bits as f64 / LOG2_10).floor() as u32
}

/// 10^e at the given binary precision.
pub fn pow10(e: i64, prec: u32) -> Float {
    let ten = Float::with_val(prec, 10);
    ten.pow(e as i32)
}

pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

pub fn euler_gamma(prec: u32) -> Float {
    Float::with_val(prec, Constant::Euler)
}

pub fn real(prec: u32, v: f64) -> Float {
    Float::with_val(prec, v)
}

pub fn cplx(prec: u32, re: f64, im: f64) -> Complex {
    Complex::with_val(prec, (re, im))
}

/// |z| as f64, for step control and heuristics only.
pub fn abs_f64(z: &Complex) -> f64 {
    let re = z.real().to_f64();
    let im = z.imag().to_f64();
    re.hypot(im)
}

/// log10|z| that stays finite for values outside the f64 exponent range.
pub fn log10_abs(z: &Complex) -> f64 {
    let prec = z.prec().0.max(64);
    let a = Float::with_val(prec, z.abs_ref());
    log10_float(&a)
}

pub fn log10_float(x: &Float) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let a = Float::with_val(x.prec().max(64), x.abs_ref());
    Float::with_val(64, a.log10_ref()).to_f64()
}

/// Decimal string that reads back to exactly the same binary value.
pub fn float_to_string(x: &Float) -> String {
    x.to_string_radix(10, None)
}

pub fn parse_float(s: &str, prec: u32) -> Result<Float> {
    let parsed = Float::parse(s.trim())
        .map_err(|e| Error::Invalid(format!("cannot parse decimal {s:?}: {e}")))?;
    Ok(Float::with_val(prec, parsed))
}

/// Serializable complex value (decimal strings).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexAP {
    pub re: String,
    pub im: String,
}

impl ComplexAP {
    pub fn from_complex(z: &Complex) -> Self {
        Self {
            re: float_to_string(z.real()),
            im: float_to_string(z.imag()),
        }
    }

    pub fn to_complex(&self, prec: u32) -> Result<Complex> {
        let re = parse_float(&self.re, prec)?;
        let im = parse_float(&self.im, prec)?;
        Ok(Complex::with_val(prec, (re, im)))
    }
}
