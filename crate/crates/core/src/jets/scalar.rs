use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;
use num_rational::Rational64;

use crate::error::{Error, Result};

/// Scalar field carried by a [`Jet1`](super::Jet1): `f64` or `Complex64`.
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(x: f64) -> Self;
    /// Absolute value (modulus for complex numbers).
    fn modulus(self) -> f64;
    fn exp(self) -> Self;
    fn ln(self) -> Result<Self>;
    /// `self^r` on the branch documented for the field.
    ///
    /// Reals: negative bases are allowed only for odd denominators, where the
    /// real root `sign(x)|x|^r` is taken. Complex: principal branch.
    fn pow_rational(self, r: Rational64) -> Result<Self>;
    fn is_finite(self) -> bool;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Result<Self> {
        if self > 0.0 {
            Ok(f64::ln(self))
        } else {
            Err(Error::BranchError(format!("log of non-positive real {self}")))
        }
    }
    fn pow_rational(self, r: Rational64) -> Result<Self> {
        let (p, q) = (*r.numer(), *r.denom());
        if q == 1 {
            if self == 0.0 && p < 0 {
                return Err(Error::DivisionByZeroJet);
            }
            return Ok(self.powi(p as i32));
        }
        let e = p as f64 / q as f64;
        if self > 0.0 {
            Ok(self.powf(e))
        } else if self == 0.0 {
            if p > 0 {
                Ok(0.0)
            } else {
                Err(Error::DivisionByZeroJet)
            }
        } else if q % 2 != 0 {
            let mag = (-self).powf(e);
            Ok(if p % 2 == 0 { mag } else { -mag })
        } else {
            Err(Error::BranchError(format!("({self})^({p}/{q}) has no real value")))
        }
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn exp(self) -> Self {
        Complex64::exp(self)
    }
    fn ln(self) -> Result<Self> {
        if self.norm() == 0.0 {
            Err(Error::BranchError("log of zero".into()))
        } else {
            Ok(Complex64::ln(self))
        }
    }
    fn pow_rational(self, r: Rational64) -> Result<Self> {
        let (p, q) = (*r.numer(), *r.denom());
        if self.norm() == 0.0 {
            return if p > 0 { Ok(Self::zero()) } else { Err(Error::DivisionByZeroJet) };
        }
        if q == 1 {
            return Ok(self.powi(p as i32));
        }
        Ok(self.powf(p as f64 / q as f64))
    }
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Shorthand for building rationals.
pub fn rat(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

/// Rational as `f64`.
pub fn ratf(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}
