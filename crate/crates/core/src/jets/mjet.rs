use std::ops::{Add, Mul, Neg, Sub};

use super::jet1::Jet1;
use crate::error::{Error, Result};

/// Largest supported number of coordinates.
pub const MAX_DIM: usize = 5;

/// Order-2 multivariate jet: value, gradient and symmetric Hessian.
///
/// The Hessian is stored as its upper triangle in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct MJet2 {
    dim: usize,
    value: f64,
    grad: Vec<f64>,
    hess: Vec<f64>,
}

fn tri(dim: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * dim - i * (i + 1) / 2 + j
}

impl MJet2 {
    pub fn constant(value: f64, dim: usize) -> Self {
        assert!(dim <= MAX_DIM, "MJet2 supports at most {MAX_DIM} coordinates");
        Self { dim, value, grad: vec![0.0; dim], hess: vec![0.0; dim * (dim + 1) / 2] }
    }

    /// Coordinate function `x_i` at the point where `x_i = value`.
    pub fn coordinate(i: usize, value: f64, dim: usize) -> Self {
        let mut m = Self::constant(value, dim);
        m.grad[i] = 1.0;
        m
    }

    /// Lift of a univariate jet `f(u)` in coordinate `i` (needs order ≥ 2).
    pub fn from_jet1(f: &Jet1<f64>, i: usize, dim: usize) -> Self {
        let mut m = Self::constant(f.value(), dim);
        m.grad[i] = f.deriv(1);
        m.hess[tri(dim, i, i)] = f.deriv(2);
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn grad(&self, i: usize) -> f64 {
        self.grad[i]
    }

    pub fn gradient(&self) -> &[f64] {
        &self.grad
    }

    pub fn hess(&self, i: usize, j: usize) -> f64 {
        self.hess[tri(self.dim, i, j)]
    }

    fn check_dim(&self, other: &Self) {
        assert_eq!(self.dim, other.dim, "MJet2 dimension mismatch");
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            value: self.value * s,
            grad: self.grad.iter().map(|g| g * s).collect(),
            hess: self.hess.iter().map(|h| h * s).collect(),
        }
    }

    /// Applies a univariate function given by its jet at `self.value()`.
    pub fn apply(&self, f: &Jet1<f64>) -> Self {
        let (f0, f1, f2) = (f.value(), f.deriv(1), f.deriv(2));
        let mut out = Self::constant(f0, self.dim);
        for i in 0..self.dim {
            out.grad[i] = f1 * self.grad[i];
            for j in i..self.dim {
                out.hess[tri(self.dim, i, j)] = f1 * self.hess(i, j) + f2 * self.grad[i] * self.grad[j];
            }
        }
        out
    }

    pub fn recip(&self) -> Result<Self> {
        if self.value == 0.0 {
            return Err(Error::DivisionByZeroJet);
        }
        let v = self.value;
        let f = Jet1::from_coeffs(v, vec![1.0 / v, -1.0 / (v * v), 1.0 / (v * v * v)]);
        Ok(self.apply(&f))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.recip()?)
    }
}

impl Add for &MJet2 {
    type Output = MJet2;
    fn add(self, rhs: &MJet2) -> MJet2 {
        self.check_dim(rhs);
        MJet2 {
            dim: self.dim,
            value: self.value + rhs.value,
            grad: self.grad.iter().zip(&rhs.grad).map(|(a, b)| a + b).collect(),
            hess: self.hess.iter().zip(&rhs.hess).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &MJet2 {
    type Output = MJet2;
    fn sub(self, rhs: &MJet2) -> MJet2 {
        self + &(-rhs)
    }
}

impl Neg for &MJet2 {
    type Output = MJet2;
    fn neg(self) -> MJet2 {
        self.scale(-1.0)
    }
}

impl Mul for &MJet2 {
    type Output = MJet2;
    fn mul(self, rhs: &MJet2) -> MJet2 {
        self.check_dim(rhs);
        let n = self.dim;
        let mut out = MJet2::constant(self.value * rhs.value, n);
        for i in 0..n {
            out.grad[i] = self.value * rhs.grad[i] + rhs.value * self.grad[i];
            for j in i..n {
                out.hess[tri(n, i, j)] = self.value * rhs.hess(i, j)
                    + rhs.value * self.hess(i, j)
                    + self.grad[i] * rhs.grad[j]
                    + self.grad[j] * rhs.grad[i];
            }
        }
        out
    }
}

macro_rules! owned {
    ($tr:ident, $m:ident) => {
        impl $tr for MJet2 {
            type Output = MJet2;
            fn $m(self, rhs: MJet2) -> MJet2 {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&MJet2> for MJet2 {
            type Output = MJet2;
            fn $m(self, rhs: &MJet2) -> MJet2 {
                (&self).$m(rhs)
            }
        }
    };
}
owned!(Add, add);
owned!(Sub, sub);
owned!(Mul, mul);

impl Neg for MJet2 {
    type Output = MJet2;
    fn neg(self) -> MJet2 {
        -&self
    }
}
