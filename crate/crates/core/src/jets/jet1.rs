use std::ops::{Add, Mul, Neg, Sub};

use num_rational::Rational64;

use super::scalar::{ratf, Scalar};
use crate::error::{Error, Result};

/// Highest supported truncation order.
pub const MAX_ORDER: usize = 8;

/// Univariate truncated Taylor expansion.
///
/// `coeffs[k]` holds `f^(k)(basepoint) / k!`. Binary operations truncate to
/// the smaller order of the two operands.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet1<T: Scalar = f64> {
    base: T,
    coeffs: Vec<T>,
}

pub(crate) fn same_point<T: Scalar>(a: T, b: T) -> bool {
    (a - b).modulus() <= 1e-10 * a.modulus().max(b.modulus()).max(1.0)
}

impl<T: Scalar> Jet1<T> {
    /// Jet from raw Taylor coefficients. Panics if `coeffs` is empty.
    pub fn from_coeffs(base: T, mut coeffs: Vec<T>) -> Self {
        assert!(!coeffs.is_empty(), "a jet needs at least one coefficient");
        coeffs.truncate(MAX_ORDER + 1);
        Self { base, coeffs }
    }

    /// Jet from derivative values `f(x0), f'(x0), f''(x0), ...`.
    pub fn from_derivs(base: T, derivs: &[T]) -> Self {
        let mut fact = 1.0;
        let coeffs = derivs
            .iter()
            .enumerate()
            .map(|(k, &d)| {
                if k > 0 {
                    fact *= k as f64;
                }
                d * T::from_f64(1.0 / fact)
            })
            .collect();
        Self::from_coeffs(base, coeffs)
    }

    pub fn constant(value: T, base: T, order: usize) -> Self {
        let mut coeffs = vec![T::zero(); order.min(MAX_ORDER) + 1];
        coeffs[0] = value;
        Self { base, coeffs }
    }

    /// The independent variable `x` expanded at `base`.
    pub fn variable(base: T, order: usize) -> Self {
        let mut j = Self::constant(base, base, order);
        if order > 0 {
            j.coeffs[1] = T::one();
        }
        j
    }

    pub fn zero(base: T, order: usize) -> Self {
        Self::constant(T::zero(), base, order)
    }

    pub fn basepoint(&self) -> T {
        self.base
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn value(&self) -> T {
        self.coeffs[0]
    }

    /// Taylor coefficient `c_k`, zero beyond the order.
    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).copied().unwrap_or_else(T::zero)
    }

    /// `f^(k)(basepoint) = k! c_k`.
    pub fn deriv(&self, k: usize) -> T {
        self.coeff(k) * T::from_f64(factorial(k))
    }

    pub fn truncate(&self, order: usize) -> Self {
        let n = order.min(self.order());
        Self { base: self.base, coeffs: self.coeffs[..=n].to_vec() }
    }

    /// Same coefficients re-anchored at a new basepoint (no re-expansion).
    pub fn with_basepoint(mut self, base: T) -> Self {
        self.base = base;
        self
    }

    pub fn scale(&self, s: T) -> Self {
        Self { base: self.base, coeffs: self.coeffs.iter().map(|&c| c * s).collect() }
    }

    pub fn add_scalar(&self, s: T) -> Self {
        let mut out = self.clone();
        out.coeffs[0] += s;
        out
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    fn check_base(&self, other: &Self) -> Result<()> {
        if same_point(self.base, other.base) {
            Ok(())
        } else {
            Err(Error::BasepointMismatch { expected: format!("{:?}", self.base), got: format!("{:?}", other.base) })
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_base(other)?;
        let n = self.order().min(other.order());
        let coeffs = (0..=n).map(|k| self.coeffs[k] + other.coeffs[k]).collect();
        Ok(Self { base: self.base, coeffs })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_base(other)?;
        let n = self.order().min(other.order());
        let mut coeffs = vec![T::zero(); n + 1];
        for (k, out) in coeffs.iter_mut().enumerate() {
            for j in 0..=k {
                *out += self.coeffs[j] * other.coeffs[k - j];
            }
        }
        Ok(Self { base: self.base, coeffs })
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.check_base(other)?;
        let b0 = other.coeffs[0];
        if b0.modulus() == 0.0 {
            return Err(Error::DivisionByZeroJet);
        }
        let n = self.order().min(other.order());
        let mut c: Vec<T> = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let mut acc = self.coeffs[k];
            for j in 1..=k {
                acc -= other.coeffs[j] * c[k - j];
            }
            c.push(acc / b0);
        }
        Ok(Self { base: self.base, coeffs: c })
    }

    pub fn recip(&self) -> Result<Self> {
        Self::constant(T::one(), self.base, self.order()).checked_div(self)
    }

    pub fn exp(&self) -> Self {
        let n = self.order();
        let mut e = vec![T::zero(); n + 1];
        e[0] = self.coeffs[0].exp();
        for k in 1..=n {
            let mut acc = T::zero();
            for j in 1..=k {
                acc += T::from_f64(j as f64) * self.coeffs[j] * e[k - j];
            }
            e[k] = acc * T::from_f64(1.0 / k as f64);
        }
        Self { base: self.base, coeffs: e }
    }

    /// Natural logarithm. Over the reals the constant term must be positive.
    pub fn ln(&self) -> Result<Self> {
        let a0 = self.coeffs[0];
        let l0 = a0.ln()?;
        let n = self.order();
        let mut l = vec![T::zero(); n + 1];
        l[0] = l0;
        for k in 1..=n {
            let mut acc = T::zero();
            for j in 1..k {
                acc += T::from_f64(j as f64) * l[j] * self.coeffs[k - j];
            }
            l[k] = (self.coeffs[k] - acc * T::from_f64(1.0 / k as f64)) / a0;
        }
        Ok(Self { base: self.base, coeffs: l })
    }

    /// `self^r` for rational `r`, using the real-branch rule of [`Scalar::pow_rational`].
    pub fn pow_rational(&self, r: Rational64) -> Result<Self> {
        let a0 = self.coeffs[0];
        if *r.denom() == 1 && *r.numer() >= 0 {
            return Ok(self.powi(*r.numer() as u32));
        }
        let p0 = a0.pow_rational(r)?;
        if a0.modulus() == 0.0 {
            return Err(Error::DivisionByZeroJet);
        }
        Ok(self.pow_series(p0, ratf(r)))
    }

    pub fn sqrt(&self) -> Result<Self> {
        self.pow_rational(Rational64::new(1, 2))
    }

    /// Power recurrence given the already-chosen branch value `p0 = a0^alpha`.
    fn pow_series(&self, p0: T, alpha: f64) -> Self {
        let a0 = self.coeffs[0];
        let n = self.order();
        let mut p = vec![T::zero(); n + 1];
        p[0] = p0;
        for k in 1..=n {
            let mut acc = T::zero();
            for j in 1..=k {
                let w = (alpha + 1.0) * j as f64 - k as f64;
                acc += T::from_f64(w) * self.coeffs[j] * p[k - j];
            }
            p[k] = acc / (T::from_f64(k as f64) * a0);
        }
        Self { base: self.base, coeffs: p }
    }

    /// Nonnegative integer power by repeated multiplication.
    pub fn powi(&self, m: u32) -> Self {
        let mut out = Self::constant(T::one(), self.base, self.order());
        for _ in 0..m {
            out = &out * self;
        }
        out
    }

    /// Formal derivative `d/dx`; the order drops by one (order 0 stays a zero jet).
    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            return Self::zero(self.base, 0);
        }
        let coeffs = (1..=self.order()).map(|k| self.coeffs[k] * T::from_f64(k as f64)).collect();
        Self { base: self.base, coeffs }
    }

    /// Antiderivative taking the value `constant` at the basepoint.
    pub fn antiderivative(&self, constant: T) -> Self {
        let n = (self.order() + 1).min(MAX_ORDER);
        let mut coeffs = Vec::with_capacity(n + 1);
        coeffs.push(constant);
        for k in 1..=n {
            coeffs.push(self.coeffs[k - 1] * T::from_f64(1.0 / k as f64));
        }
        Self { base: self.base, coeffs }
    }

    /// `d/dx log f = f'/f`, defined for any nonvanishing `f` (no branch issue).
    pub fn log_derivative(&self) -> Result<Self> {
        self.derivative().checked_div(&self.truncate(self.order().saturating_sub(1)))
    }

    /// `outer ∘ inner`, expanded at the basepoint of `inner`.
    pub fn compose(outer: &Self, inner: &Self) -> Result<Self> {
        if !same_point(outer.base, inner.coeffs[0]) {
            return Err(Error::BasepointMismatch {
                expected: format!("{:?}", outer.base),
                got: format!("{:?}", inner.coeffs[0]),
            });
        }
        let n = outer.order().min(inner.order());
        let mut h = inner.truncate(n);
        h.coeffs[0] = T::zero();
        let mut acc = Self::constant(outer.coeffs[0], inner.base, n);
        let mut hp = Self::constant(T::one(), inner.base, n);
        for k in 1..=n {
            hp = &hp * &h;
            acc = &acc + &hp.scale(outer.coeffs[k]);
        }
        Ok(acc)
    }

    /// Functional inverse: a jet `g` at `f(x0)` with `g ∘ f = x`.
    pub fn invert(&self) -> Result<Self> {
        if self.order() == 0 {
            return Err(Error::NonInvertibleJet);
        }
        let c1 = self.coeffs[1];
        if c1.modulus() == 0.0 {
            return Err(Error::NonInvertibleJet);
        }
        let n = self.order();
        let mut h = self.clone();
        h.coeffs[0] = T::zero();
        // powers of h, each starting at t^k
        let mut hpow = vec![Self::constant(T::one(), self.base, n)];
        for k in 1..=n {
            let next = &hpow[k - 1] * &h;
            hpow.push(next);
        }
        let mut b = vec![T::zero(); n + 1];
        b[0] = self.base;
        b[1] = T::one() / c1;
        let mut c1k = c1;
        for k in 2..=n {
            c1k *= c1;
            let mut acc = T::zero();
            for j in 1..k {
                acc += b[j] * hpow[j].coeffs[k];
            }
            b[k] = -acc / c1k;
        }
        Ok(Self { base: self.coeffs[0], coeffs: b })
    }

    /// Evaluates the truncated polynomial at `x`.
    pub fn eval(&self, x: T) -> T {
        let h = x - self.base;
        self.coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * h + c)
    }
}

impl Jet1<f64> {
    /// Real power with an arbitrary exponent; the base must be positive.
    pub fn powf(&self, alpha: f64) -> Result<Self> {
        let a0 = self.coeffs[0];
        if a0 <= 0.0 {
            return Err(Error::BranchError(format!("({a0})^{alpha} over the reals")));
        }
        Ok(self.pow_series(a0.powf(alpha), alpha))
    }

    /// `|self|`, i.e. the jet multiplied by the sign of its constant term.
    pub fn abs(&self) -> Result<Self> {
        let a0 = self.coeffs[0];
        if a0 == 0.0 {
            return Err(Error::DegenerateError("absolute value at a zero".into()));
        }
        Ok(if a0 < 0.0 { -self } else { self.clone() })
    }

    pub fn to_complex(&self) -> Jet1<num_complex::Complex64> {
        Jet1 {
            base: num_complex::Complex64::new(self.base, 0.0),
            coeffs: self.coeffs.iter().map(|&c| num_complex::Complex64::new(c, 0.0)).collect(),
        }
    }
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

macro_rules! binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl<T: Scalar> $tr<&Jet1<T>> for &Jet1<T> {
            type Output = Jet1<T>;
            /// Panics on basepoint mismatch; use the `checked_*` form to recover.
            fn $method(self, rhs: &Jet1<T>) -> Jet1<T> {
                self.$checked(rhs).expect("jet basepoint mismatch")
            }
        }
        impl<T: Scalar> $tr<Jet1<T>> for Jet1<T> {
            type Output = Jet1<T>;
            fn $method(self, rhs: Jet1<T>) -> Jet1<T> {
                (&self).$method(&rhs)
            }
        }
        impl<T: Scalar> $tr<&Jet1<T>> for Jet1<T> {
            type Output = Jet1<T>;
            fn $method(self, rhs: &Jet1<T>) -> Jet1<T> {
                (&self).$method(rhs)
            }
        }
        impl<T: Scalar> $tr<Jet1<T>> for &Jet1<T> {
            type Output = Jet1<T>;
            fn $method(self, rhs: Jet1<T>) -> Jet1<T> {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl<T: Scalar> Neg for &Jet1<T> {
    type Output = Jet1<T>;
    fn neg(self) -> Jet1<T> {
        Jet1 { base: self.base, coeffs: self.coeffs.iter().map(|&c| -c).collect() }
    }
}

impl<T: Scalar> Neg for Jet1<T> {
    type Output = Jet1<T>;
    fn neg(self) -> Jet1<T> {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::scalar::rat;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn exp_of_zero_jet() {
        let j = Jet1::zero(0.0, 3).exp();
        assert_eq!(j.coeffs(), &[1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn square_of_q_at_two() {
        let q = Jet1::variable(2.0, 6);
        let sq = &q * &q;
        assert_eq!(sq.coeffs(), &[4.0, 4.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn ln_series_at_one() {
        let l = Jet1::variable(1.0, 4).ln().unwrap();
        let want = [0.0, 1.0, -0.5, 1.0 / 3.0, -0.25];
        for (a, b) in l.coeffs().iter().zip(want) {
            assert!(close(*a, b, 1e-14));
        }
    }

    #[test]
    fn div_by_zero_constant_term() {
        let x = Jet1::variable(0.0, 3);
        let one = Jet1::constant(1.0, 0.0, 3);
        assert_eq!(one.checked_div(&x), Err(Error::DivisionByZeroJet));
    }

    #[test]
    fn branch_rule_for_cube_root() {
        let x = Jet1::variable(-8.0, 4);
        let r = x.pow_rational(rat(1, 3)).unwrap();
        assert!(close(r.value(), -2.0, 1e-14));
        // d/dx x^{1/3} = x^{-2/3}/3 = 1/12 at -8
        assert!(close(r.coeff(1), 1.0 / 12.0, 1e-14));
        assert!(matches!(x.pow_rational(rat(1, 2)), Err(Error::BranchError(_))));
    }

    #[test]
    fn compose_exp_with_linear() {
        let outer = Jet1::variable(0.0, 5).exp();
        let inner = Jet1::variable(0.0, 5).scale(2.0);
        let c = Jet1::compose(&outer, &inner).unwrap();
        for k in 0..=5 {
            assert!(close(c.coeff(k), 2f64.powi(k as i32) / factorial(k), 1e-14));
        }
    }

    #[test]
    fn compose_checks_basepoint() {
        let outer = Jet1::variable(1.0, 3);
        let inner = Jet1::variable(0.0, 3);
        assert!(matches!(Jet1::compose(&outer, &inner), Err(Error::BasepointMismatch { .. })));
    }

    #[test]
    fn invert_linear_and_identity() {
        let id = Jet1::variable(0.7, 6);
        assert_eq!(id.invert().unwrap(), id);
        let f = Jet1::variable(0.0, 6).scale(2.0);
        let g = f.invert().unwrap();
        assert!(close(g.coeff(1), 0.5, 1e-15));
        assert!(g.coeffs()[2..].iter().all(|&c| c == 0.0));
        let flat = Jet1::constant(1.0, 0.0, 4);
        assert_eq!(flat.invert(), Err(Error::NonInvertibleJet));
    }

    #[test]
    fn invert_round_trip_exp() {
        let f = Jet1::variable(0.3, 8).exp();
        let g = f.invert().unwrap();
        let id = Jet1::compose(&g, &f).unwrap();
        assert!(close(id.coeff(0), 0.3, 1e-14));
        assert!(close(id.coeff(1), 1.0, 1e-13));
        for k in 2..=8 {
            assert!(id.coeff(k).abs() < 1e-11, "k={k} {}", id.coeff(k));
        }
    }

    #[test]
    fn antiderivative_cases() {
        let z = Jet1::zero(0.0, 4).antiderivative(5.0);
        assert_eq!(z.value(), 5.0);
        assert!(z.coeffs()[1..].iter().all(|&c| c == 0.0));
        let e = Jet1::variable(0.0, 6).exp();
        let twice = e.antiderivative(0.0).antiderivative(0.0);
        assert_eq!(twice.order(), MAX_ORDER);
        assert_eq!(twice.coeff(0), 0.0);
        assert_eq!(twice.coeff(1), 0.0);
        for k in 2..=MAX_ORDER {
            assert!(close(twice.coeff(k), 1.0 / factorial(k), 1e-15));
        }
        // exact up to one rounding per coefficient
        let back = e.antiderivative(3.0).derivative();
        for k in 0..=6 {
            assert!((back.coeff(k) - e.coeff(k)).abs() <= 2.0 * f64::EPSILON * e.coeff(k).abs());
        }
    }

    #[test]
    fn mixed_order_truncates() {
        let a = Jet1::variable(1.0, 6);
        let b = Jet1::variable(1.0, 3);
        assert_eq!((&a * &b).order(), 3);
    }

    #[test]
    fn powf_matches_pow_rational() {
        let x = Jet1::variable(2.5, 6).add_scalar(0.0);
        let a = x.powf(2.0 / 3.0).unwrap();
        let b = x.pow_rational(rat(2, 3)).unwrap();
        for k in 0..=6 {
            assert!(close(a.coeff(k), b.coeff(k), 1e-14));
        }
    }
}
