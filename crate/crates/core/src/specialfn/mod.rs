//! Gauss hypergeometric series as jets, the tabulated closed-form solutions,
//! the Wronskian law and algebraic transformation identities.

mod closed_form;
mod transform;

pub use closed_form::{
    all_families, closed_form_solution, entry_residual, ode1_residual, wronskian_check, ClosedFormFamily, ClosedFormId,
    DEFAULT_CONSTANTS,
};
pub use transform::{transform_identity_check, TransformKind};

use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::jets::{binomial, rat, ratf, Jet1, Scalar};

/// Parameters `(a, b, c)` of the hypergeometric equation
/// `s(1-s) z'' + (c - (a+b+1)s) z' - ab z = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HyperTriple {
    pub a: Rational64,
    pub b: Rational64,
    pub c: Rational64,
}

impl HyperTriple {
    pub fn new(a: Rational64, b: Rational64, c: Rational64) -> Self {
        Self { a, b, c }
    }

    /// Shorthand from `(numerator, denominator)` pairs.
    pub fn from_pairs(a: (i64, i64), b: (i64, i64), c: (i64, i64)) -> Self {
        Self::new(rat(a.0, a.1), rat(b.0, b.1), rat(c.0, c.1))
    }

    pub fn af(&self) -> f64 {
        ratf(self.a)
    }
    pub fn bf(&self) -> f64 {
        ratf(self.b)
    }
    pub fn cf(&self) -> f64 {
        ratf(self.c)
    }

    /// Number of the last nonzero term when `a` or `b` is a nonpositive integer.
    pub fn terminates_at(&self) -> Option<usize> {
        [self.a, self.b].iter().filter(|x| nonpositive_integer(**x)).map(|x| (-*x.numer()) as usize).min()
    }

    /// Parameters of the second solution `s^{1-c} 2F1(a-c+1, b-c+1; 2-c; s)`.
    pub fn second(&self) -> Self {
        let one = Rational64::from_integer(1);
        Self::new(self.a - self.c + one, self.b - self.c + one, one + one - self.c)
    }
}

fn nonpositive_integer(x: Rational64) -> bool {
    *x.denom() == 1 && *x.numer() <= 0
}

const MAX_TERMS: usize = 200_000;

/// Scalar value of `2F1(a, b; c; s)`.
pub fn hyp2f1_value<T: Scalar>(p: HyperTriple, s: T) -> Result<T> {
    let (a, b, c) = (p.af(), p.bf(), p.cf());
    if let Some(n) = p.terminates_at() {
        check_termination_pole(p, n)?;
        let mut term = T::one();
        let mut sum = T::one();
        for k in 0..n {
            let kf = k as f64;
            term *= T::from_f64((a + kf) * (b + kf) / ((c + kf) * (kf + 1.0))) * s;
            sum += term;
        }
        return Ok(sum);
    }
    if nonpositive_integer(p.c) {
        return Err(Error::PoleError(format!("c = {} with a non-terminating series", p.c)));
    }
    let r = s.modulus();
    if r >= 1.0 {
        return Err(Error::SeriesDomainError(r));
    }
    let mut term = T::one();
    let mut sum = T::one();
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        let ratio = T::from_f64((a + kf) * (b + kf) / ((c + kf) * (kf + 1.0))) * s;
        let next = term * ratio;
        sum += next;
        // future ratios stay below max(|current ratio|, |s|) for large k
        let rmax = ratio.modulus().max(r);
        if rmax < 1.0 && k > 2 {
            let tail = next.modulus() * rmax / (1.0 - rmax);
            if tail <= 1e-15 * sum.modulus() || tail < 1e-300 {
                return Ok(sum);
            }
        }
        term = next;
    }
    Err(Error::SeriesDomainError(r))
}

fn check_termination_pole(p: HyperTriple, n: usize) -> Result<()> {
    if nonpositive_integer(p.c) && n as i64 > -*p.c.numer() {
        return Err(Error::PoleError(format!("c = {} is hit before the series terminates", p.c)));
    }
    Ok(())
}

/// Jet of `2F1(a, b; c; s)` at `s0`.
///
/// Terminating series are expanded exactly as polynomials. Otherwise the
/// k-th coefficient uses `d^k/ds^k 2F1 = (a)_k (b)_k / (c)_k 2F1(a+k, b+k; c+k; s)`.
pub fn hyp2f1_jet<T: Scalar>(p: HyperTriple, s0: T, order: usize) -> Result<Jet1<T>> {
    let order = order.min(crate::jets::MAX_ORDER);
    if let Some(n) = p.terminates_at() {
        check_termination_pole(p, n)?;
        let (a, b, c) = (p.af(), p.bf(), p.cf());
        let mut t = vec![1.0f64];
        for k in 0..n {
            let kf = k as f64;
            let last = t[k];
            t.push(last * (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)));
        }
        let mut coeffs = vec![T::zero(); order + 1];
        for (k, ck) in coeffs.iter_mut().enumerate() {
            let mut acc = T::zero();
            let mut pw = T::one();
            for (n, &tn) in t.iter().enumerate().skip(k) {
                if n > k {
                    pw *= s0;
                }
                acc += T::from_f64(tn * binomial(n, k)) * pw;
            }
            *ck = acc;
        }
        return Ok(Jet1::from_coeffs(s0, coeffs));
    }
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut pref = 1.0;
    let one = Rational64::from_integer(1);
    let mut q = p;
    for k in 0..=order {
        if k > 0 {
            let kf = (k - 1) as f64;
            pref *= (p.af() + kf) * (p.bf() + kf) / ((p.cf() + kf) * k as f64);
            q = HyperTriple::new(q.a + one, q.b + one, q.c + one);
        }
        coeffs.push(T::from_f64(pref) * hyp2f1_value(q, s0)?);
    }
    Ok(Jet1::from_coeffs(s0, coeffs))
}

/// The two standard solutions `2F1(a,b;c;s)` and `s^{1-c} 2F1(a-c+1, b-c+1; 2-c; s)`.
///
/// Integer `c` works whenever the relevant series terminates; `c = 1` is rejected.
pub fn hypergeom_pair<T: Scalar>(p: HyperTriple, s0: T, order: usize) -> Result<(Jet1<T>, Jet1<T>)> {
    if p.c == Rational64::from_integer(1) {
        return Err(Error::InvalidParam("c = 1 gives a logarithmic second solution".into()));
    }
    let z1 = hyp2f1_jet(p, s0, order)?;
    let s = Jet1::variable(s0, order);
    let pw = s.pow_rational(Rational64::from_integer(1) - p.c)?;
    let z2 = pw.checked_mul(&hyp2f1_jet(p.second(), s0, order)?)?;
    Ok((z1, z2))
}

/// Relative residual of the hypergeometric equation for the jet `z` at its basepoint.
pub fn hypergeom_residual<T: Scalar>(z: &Jet1<T>, p: HyperTriple) -> f64 {
    let s = z.basepoint();
    let (a, b, c) = (p.af(), p.bf(), p.cf());
    let p2 = s * (T::one() - s);
    let p1 = T::from_f64(c) - T::from_f64(a + b + 1.0) * s;
    let terms = [p2 * z.deriv(2), p1 * z.deriv(1), -T::from_f64(a * b) * z.value()];
    // floor the scale at |z| times the leading coefficients, so that a solution
    // with every term at rounding level (e.g. z = 1 when ab = 0) is not judged noise-relative
    let floor = z.value().modulus() * p2.modulus().max(p1.modulus());
    let sum = terms.iter().fold(T::zero(), |acc, &t| acc + t);
    let scale = terms.iter().map(|t| t.modulus()).fold(floor, f64::max);
    if scale == 0.0 {
        sum.modulus()
    } else {
        sum.modulus() / scale
    }
}

/// `|Σ terms| / max |term|`, or `|Σ terms|` when every term vanishes.
pub fn relative<T: Scalar>(terms: &[T]) -> f64 {
    let sum = terms.iter().fold(T::zero(), |acc, &t| acc + t);
    let scale = terms.iter().map(|t| t.modulus()).fold(0.0, f64::max);
    if scale == 0.0 {
        sum.modulus()
    } else {
        sum.modulus() / scale
    }
}
