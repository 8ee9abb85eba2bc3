//! Real-number backends.
//!
//! Every real-valued computation in [`primes`](crate::primes),
//! [`jet`](crate::jet) and [`resonator`](crate::resonator) is generic over
//! [`Real`], so the same code runs in hardware double precision or in
//! decimal arbitrary precision ([`BigReal`]). The backend is picked per run
//! through [`Precision`].

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use dashu_float::DBig;
use dashu_int::IBig;
use serde::{Deserialize, Serialize};

/// Scalar field used by the exact-identity and weighted-sum code paths.
pub trait Real:
    Clone
    + fmt::Debug
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Construction context (unit for `f64`, digit count for [`BigReal`]).
    type Ctx: Copy + fmt::Debug + Send + Sync;

    fn from_i64(ctx: Self::Ctx, v: i64) -> Self;
    fn from_f64(ctx: Self::Ctx, v: f64) -> Self;
    /// Parses a decimal literal, rounding to the context precision.
    fn parse_decimal(ctx: Self::Ctx, s: &str) -> Self;
    /// Significant decimal digits carried by the context.
    fn digits(ctx: Self::Ctx) -> u32;
    fn ctx(&self) -> Self::Ctx;

    fn ln(&self) -> Self;
    fn exp(&self) -> Self;
    fn powi(&self, n: u32) -> Self;
    fn abs(&self) -> Self;
    fn to_f64(&self) -> f64;

    fn zero(ctx: Self::Ctx) -> Self {
        Self::from_i64(ctx, 0)
    }

    fn one(ctx: Self::Ctx) -> Self {
        Self::from_i64(ctx, 1)
    }

    fn from_ratio(ctx: Self::Ctx, num: i64, den: i64) -> Self {
        Self::from_i64(ctx, num) / Self::from_i64(ctx, den)
    }

    /// `10^-digits`, the relative resolution of the context.
    fn epsilon(ctx: Self::Ctx) -> Self {
        Self::one(ctx) / Self::from_i64(ctx, 10).powi(Self::digits(ctx))
    }
}

impl Real for f64 {
    type Ctx = ();

    fn from_i64(_: (), v: i64) -> Self {
        v as f64
    }
    fn from_f64(_: (), v: f64) -> Self {
        v
    }
    fn parse_decimal(_: (), s: &str) -> Self {
        s.parse().expect("malformed decimal literal")
    }
    fn digits(_: ()) -> u32 {
        15
    }
    fn ctx(&self) {}

    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn powi(&self, n: u32) -> Self {
        if n == 0 {
            1.0
        } else {
            f64::powi(*self, n as i32)
        }
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn epsilon(_: ()) -> Self {
        f64::EPSILON
    }
}

/// Decimal floating point with a fixed number of significant digits.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct BigReal(DBig);

impl BigReal {
    fn rounded(value: DBig, digits: u32) -> Self {
        BigReal(value.with_precision(digits as usize).value())
    }

    pub fn inner(&self) -> &DBig {
        &self.0
    }
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigReal({})", self.0)
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: BigReal) -> BigReal {
                BigReal($trait::$method(self.0, rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal(-self.0)
    }
}

impl Real for BigReal {
    type Ctx = u32;

    fn from_i64(digits: u32, v: i64) -> Self {
        Self::rounded(DBig::from(v), digits)
    }
    fn from_f64(digits: u32, v: f64) -> Self {
        assert!(v.is_finite(), "non-finite value {v}");
        // 17 significant digits reproduce the binary value.
        Self::parse_decimal(digits, &format!("{v:.16e}"))
    }
    fn parse_decimal(digits: u32, s: &str) -> Self {
        let parsed = DBig::from_str(s).expect("malformed decimal literal");
        Self::rounded(parsed, digits)
    }
    fn digits(digits: u32) -> u32 {
        digits
    }
    fn ctx(&self) -> u32 {
        self.0.precision() as u32
    }

    fn ln(&self) -> Self {
        BigReal(self.0.ln())
    }
    fn exp(&self) -> Self {
        BigReal(self.0.exp())
    }
    fn powi(&self, n: u32) -> Self {
        if n == 0 {
            Self::one(self.ctx())
        } else {
            BigReal(self.0.powi(IBig::from(n)))
        }
    }
    fn abs(&self) -> Self {
        if self.0 < DBig::ZERO {
            BigReal(-self.0.clone())
        } else {
            self.clone()
        }
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64().value()
    }
}

/// Runtime choice of real backend.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(tag = "mode", content = "digits", rename_all = "snake_case")]
pub enum Precision {
    /// IEEE-754 binary64.
    #[default]
    Double,
    /// Decimal arbitrary precision with the given number of significant digits.
    Decimal(u32),
}

impl Precision {
    /// Default digits for the high-precision mode.
    pub const HIGH_DIGITS: u32 = 50;

    pub fn high() -> Self {
        Precision::Decimal(Self::HIGH_DIGITS)
    }

    /// Double for up to 15 digits, decimal beyond.
    pub fn from_digits(digits: u32) -> Self {
        if digits <= 15 {
            Precision::Double
        } else {
            Precision::Decimal(digits)
        }
    }

    pub fn digits(self) -> u32 {
        match self {
            Precision::Double => 15,
            Precision::Decimal(d) => d,
        }
    }
}

/// Runs a computation generic over [`Real`] with the backend chosen by `$prec`,
/// binding the construction context to `$ctx` and the backend type to `$ty`.
#[macro_export]
macro_rules! with_precision {
    ($prec:expr, |$ty:ident, $ctx:ident| $body:expr) => {
        match $prec {
            $crate::precision::Precision::Double => {
                #[allow(unused_variables)]
                let $ctx = ();
                type $ty = f64;
                $body
            }
            $crate::precision::Precision::Decimal(digits) => {
                let $ctx = digits;
                type $ty = $crate::precision::BigReal;
                $body
            }
        }
    };
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn big_division_keeps_digits() {
        let third = BigReal::from_ratio(50, 1, 3);
        let s = third.to_string();
        assert!(s.starts_with("0.3333333333333333333333333333333333333333333333333"));
        assert_eq!(third.ctx(), 50);
    }

    #[test]
    fn big_ln_exp_roundtrip() {
        let x = BigReal::from_ratio(60, 7, 3);
        let back = x.ln().exp();
        let err = (back - x).abs().to_f64();
        assert!(err < 1e-55, "{err}");
    }

    #[test]
    fn powi_zero_is_one_even_at_zero() {
        assert_eq!(Real::powi(&0.0f64, 0), 1.0);
        assert_eq!(BigReal::zero(30).powi(0).to_f64(), 1.0);
    }

    #[test]
    fn from_f64_is_faithful() {
        let v = std::f64::consts::PI;
        assert_eq!(BigReal::from_f64(40, v).to_f64(), v);
    }

    #[test]
    fn precision_selection() {
        assert_eq!(Precision::from_digits(15), Precision::Double);
        assert_eq!(Precision::from_digits(50), Precision::Decimal(50));
        assert_eq!(Precision::high().digits(), 50);
    }

    #[test]
    fn dispatch_macro_runs_both_backends() {
        for prec in [Precision::Double, Precision::high()] {
            let v = with_precision!(prec, |R, ctx| {
                (R::from_i64(ctx, 2).ln() * R::from_i64(ctx, 3)).to_f64()
            });
            assert!((v - 3.0 * 2f64.ln()).abs() < 1e-15);
        }
    }
}
