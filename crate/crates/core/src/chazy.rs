//! Residuals of the Chazy-type equations and builders for their solutions.

use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::jets::{rat, ratf, solve_linear2, Jet1};
use crate::specialfn::HyperTriple;

/// Raw left-hand side together with its largest monomial.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Residual {
    pub raw: f64,
    pub scale: f64,
}

impl Residual {
    pub fn from_terms(terms: &[f64]) -> Self {
        let raw = terms.iter().sum();
        let scale = terms.iter().map(|t| t.abs()).fold(0.0, f64::max);
        Self { raw, scale: if scale == 0.0 { 1.0 } else { scale } }
    }

    /// `|raw| / scale`.
    pub fn relative(&self) -> f64 {
        self.raw.abs() / self.scale
    }
}

fn need(j: &Jet1, order: usize) {
    assert!(j.order() >= order, "jet of order {} where {order} is needed", j.order());
}

/// `y''' - 2 y y'' + 3 y'^2`.
pub fn residual_chazy(y: &Jet1) -> Residual {
    need(y, 3);
    let (y0, y1, y2, y3) = (y.value(), y.deriv(1), y.deriv(2), y.deriv(3));
    Residual::from_terms(&[y3, -2.0 * y0 * y2, 3.0 * y1 * y1])
}

/// Coefficient `4/(36 - k^2)` of the generalised equation.
pub fn chazy_coefficient(k: Rational64) -> Result<f64> {
    let k2 = k * k;
    if k2 == Rational64::from_integer(36) {
        return Err(Error::InvalidParam(format!("k = {k}")));
    }
    Ok(4.0 / (36.0 - ratf(k2)))
}

/// `y''' - 2 y y'' + 3 y'^2 - 4/(36-k^2) (6 y' - y^2)^2`.
pub fn residual_gen_chazy(y: &Jet1, k: Rational64) -> Result<Residual> {
    need(y, 3);
    let coef = chazy_coefficient(k)?;
    let (y0, y1, y2, y3) = (y.value(), y.deriv(1), y.deriv(2), y.deriv(3));
    let w = 6.0 * y1 - y0 * y0;
    Ok(Residual::from_terms(&[y3, -2.0 * y0 * y2, 3.0 * y1 * y1, -coef * w * w]))
}

/// The sixth order equation in `F(q)` whose solutions give flat distributions.
pub fn residual_6th(f: &Jet1) -> Residual {
    need(f, 6);
    let d: Vec<f64> = (2..=6).map(|k| f.deriv(k)).collect();
    let (f2, f3, f4, f5, f6) = (d[0], d[1], d[2], d[3], d[4]);
    Residual::from_terms(&[
        10.0 * f6 * f2.powi(3),
        -80.0 * f2 * f2 * f3 * f5,
        -51.0 * f2 * f2 * f4 * f4,
        336.0 * f2 * f3 * f3 * f4,
        -224.0 * f3.powi(4),
    ])
}

fn ds_form(d: [f64; 5]) -> Residual {
    let [a, b, c, e, g] = d;
    Residual::from_terms(&[
        10.0 * a.powi(3) * g,
        -70.0 * a * a * b * e,
        -49.0 * a * a * c * c,
        280.0 * a * b * b * c,
        -175.0 * b.powi(4),
    ])
}

/// The seventh order equation in `y(t)`.
pub fn residual_7th(y: &Jet1) -> Residual {
    need(y, 7);
    ds_form([y.deriv(3), y.deriv(4), y.deriv(5), y.deriv(6), y.deriv(7)])
}

/// The sixth order form of the seventh order equation, for `H = y'`.
pub fn residual_ds6(h: &Jet1) -> Residual {
    need(h, 6);
    ds_form([h.deriv(2), h.deriv(3), h.deriv(4), h.deriv(5), h.deriv(6)])
}

/// Angles `(α, β, γ)` of the Schwarz triangle behind `V(s)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SchwarzTriple {
    pub alpha: Rational64,
    pub beta: Rational64,
    pub gamma: Rational64,
}

impl SchwarzTriple {
    pub fn new(alpha: Rational64, beta: Rational64, gamma: Rational64) -> Self {
        Self { alpha, beta, gamma }
    }

    pub fn from_pairs(a: (i64, i64), b: (i64, i64), c: (i64, i64)) -> Self {
        Self::new(rat(a.0, a.1), rat(b.0, b.1), rat(c.0, c.1))
    }

    /// Numerators of `V = p/s^2 + q/(s-1)^2 + r/(s(s-1))`.
    pub fn potential_coefficients(&self) -> [f64; 3] {
        let (a, b, c) = (ratf(self.alpha), ratf(self.beta), ratf(self.gamma));
        [1.0 - b * b, 1.0 - c * c, b * b + c * c - a * a - 1.0]
    }

    /// `V(s)` composed with the jet `s`.
    pub fn potential(&self, s: &Jet1) -> Result<Jet1> {
        let [p, q, r] = self.potential_coefficients();
        let sm1 = s.add_scalar(-1.0);
        let t1 = (s * s).recip()?.scale(p);
        let t2 = (&sm1 * &sm1).recip()?.scale(q);
        let t3 = (s * &sm1).recip()?.scale(r);
        Ok(t1 + t2 + t3)
    }

    /// Hypergeometric parameters of `z` in `u = (s-1)^{(1-γ)/2} s^{(1-β)/2} z`.
    pub fn hyper(&self) -> HyperTriple {
        let one = Rational64::from_integer(1);
        let two = Rational64::from_integer(2);
        HyperTriple::new(
            (one - self.alpha - self.beta - self.gamma) / two,
            (one + self.alpha - self.beta - self.gamma) / two,
            one - self.beta,
        )
    }

    /// Solutions of `u'' + V u / 4 = 0` with `(u, u') = (1, 0)` and `(0, 1)` at `s0`.
    pub fn series_pair(&self, s0: f64, order: usize) -> Result<(Jet1, Jet1)> {
        if s0 == 0.0 || s0 == 1.0 {
            return Err(Error::SingularPointError(format!("s = {s0}")));
        }
        let n = order.saturating_sub(2).max(1);
        let v = self.potential(&Jet1::variable(s0, n))?.scale(0.25);
        let p = Jet1::zero(s0, n);
        Ok((solve_linear2(&p, &v, 1.0, 0.0), solve_linear2(&p, &v, 0.0, 1.0)))
    }

    /// `|s-1|^{(1-γ)/2} |s|^{(1-β)/2}`.
    pub fn u_prefactor(&self, s: &Jet1) -> Result<Jet1> {
        let one = Rational64::from_integer(1);
        let two = Rational64::from_integer(2);
        let a = s.add_scalar(-1.0).abs()?.pow_rational((one - self.gamma) / two)?;
        let b = s.abs()?.pow_rational((one - self.beta) / two)?;
        Ok(a * b)
    }
}

impl fmt::Display for SchwarzTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.alpha, self.beta, self.gamma)
    }
}

fn check_slope(s: &Jet1) -> Result<f64> {
    let sd = s.deriv(1);
    if sd == 0.0 {
        return Err(Error::DegenerateError("ds/dq vanishes".into()));
    }
    Ok(sd)
}

/// Schwarzian derivative `s'''/s' - (3/2)(s''/s')^2` as a jet.
pub fn schwarzian(s: &Jet1) -> Result<Jet1> {
    need(s, 3);
    check_slope(s)?;
    let d1 = s.derivative();
    let r = d1.derivative().checked_div(&d1.truncate(d1.order() - 1))?;
    let rd = r.derivative();
    let r = r.truncate(rd.order());
    Ok(rd - (&r * &r).scale(0.5))
}

/// `{s,q} + (s'^2/2) V(s)`.
pub fn residual_schwarzian(s: &Jet1, tr: SchwarzTriple) -> Result<Residual> {
    need(s, 3);
    let sd = check_slope(s)?;
    let s0 = s.value();
    if s0 == 0.0 || s0 == 1.0 {
        return Err(Error::SingularPointError(format!("s = {s0}")));
    }
    let (s2, s3) = (s.deriv(2), s.deriv(3));
    let [p, q, r] = tr.potential_coefficients();
    let h = sd * sd / 2.0;
    Ok(Residual::from_terms(&[
        s3 / sd,
        -1.5 * (s2 / sd).powi(2),
        h * p / (s0 * s0),
        h * q / ((s0 - 1.0) * (s0 - 1.0)),
        h * r / (s0 * (s0 - 1.0)),
    ]))
}

/// `Ω1, Ω2, Ω3` from `s(q)`; the jets have order `s.order() - 2`.
pub fn omegas(s: &Jet1) -> Result<[Jet1; 3]> {
    need(s, 2);
    check_slope(s)?;
    let s0 = s.value();
    if s0 == 0.0 || s0 == 1.0 {
        return Err(Error::SingularPointError(format!("s = {s0}")));
    }
    let n = s.order() - 2;
    let ld = s.derivative().log_derivative()?;
    let ls = s.log_derivative()?.truncate(n);
    let lm = s.add_scalar(-1.0).log_derivative()?.truncate(n);
    Ok([(&ld - &ls - &lm).scale(-0.5), (&ld - &lm).scale(-0.5), (&ld - &ls).scale(-0.5)])
}

/// Ω's together with the largest relative residual of the first order system.
pub fn omega_residuals(s: &Jet1, tr: SchwarzTriple) -> Result<([Jet1; 3], f64)> {
    need(s, 3);
    let om = omegas(s)?;
    let (a2, b2, c2) = (ratf(tr.alpha * tr.alpha), ratf(tr.beta * tr.beta), ratf(tr.gamma * tr.gamma));
    let o = [om[0].value(), om[1].value(), om[2].value()];
    let tau =
        [a2 * (o[0] - o[1]) * (o[2] - o[0]), b2 * (o[1] - o[2]) * (o[0] - o[1]), c2 * (o[2] - o[0]) * (o[1] - o[2])];
    let mut worst = 0.0f64;
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let terms = [om[i].deriv(1), -o[j] * o[k], o[i] * o[j], o[i] * o[k], -tau[0], -tau[1], -tau[2]];
        worst = worst.max(Residual::from_terms(&terms).relative());
    }
    Ok((om, worst))
}

/// Weighted combinations `y = -(a Ω1 + b Ω2 + c Ω3)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parametrization {
    /// `-2(Ω1 + Ω2 + Ω3)`.
    Sum222,
    /// `-Ω1 - 2Ω2 - 3Ω3`.
    W123,
    /// `-Ω1 - 3Ω2 - 2Ω3`.
    W132,
    /// `-4Ω1 - Ω2 - Ω3`.
    W411,
}

impl Parametrization {
    pub fn weights(&self) -> [f64; 3] {
        match self {
            Self::Sum222 => [2.0, 2.0, 2.0],
            Self::W123 => [1.0, 2.0, 3.0],
            Self::W132 => [1.0, 3.0, 2.0],
            Self::W411 => [4.0, 1.0, 1.0],
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Sum222 => "yes",
            Self::W123 => "w123",
            Self::W132 => "w132",
            Self::W411 => "w411",
        }
    }
}

impl FromStr for Parametrization {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "yes" | "sum222" => Ok(Self::Sum222),
            "w123" => Ok(Self::W123),
            "w132" => Ok(Self::W132),
            "w411" => Ok(Self::W411),
            _ => Err(Error::ParseError(format!("unknown parametrisation `{s}`"))),
        }
    }
}

pub fn parametrized_y(s: &Jet1, w: Parametrization) -> Result<Jet1> {
    let om = omegas(s)?;
    let [a, b, c] = w.weights();
    Ok((om[0].scale(a) + om[1].scale(b) + om[2].scale(c)).scale(-1.0))
}

/// `s(q)` as the inverse of `q(s) = u2/u1`, expanded at `q0 = u2(s0)/u1(s0)`.
pub fn s_from_ratio(u1: &Jet1, u2: &Jet1) -> Result<Jet1> {
    if u1.value() == 0.0 {
        return Err(Error::ZeroDenominatorError("u1(s0) = 0".into()));
    }
    u2.checked_div(u1)?.invert().map_err(|_| Error::ZeroWronskianError)
}

/// `y = 6 d/dq log z1` with `q = z2/z1`, as a jet in `q` at `q0`.
pub fn chazy_log_solution(z1: &Jet1, z2: &Jet1) -> Result<(f64, Jet1)> {
    if z1.value() == 0.0 {
        return Err(Error::ZeroDenominatorError("z1(s0) = 0".into()));
    }
    let n = z1.order().min(z2.order());
    let (z1, z2) = (z1.truncate(n), z2.truncate(n));
    let (d1, d2) = (z1.derivative(), z2.derivative());
    let m = n - 1;
    let w = z1.truncate(m) * d2 - z2.truncate(m) * d1.clone();
    let scale = (z1.value() * z2.deriv(1)).abs().max((z2.value() * z1.deriv(1)).abs());
    if w.value().abs() <= 1e-14 * scale || w.value() == 0.0 {
        return Err(Error::ZeroWronskianError);
    }
    let y_s = (z1.truncate(m) * d1).scale(6.0).checked_div(&w)?;
    let q = z2.checked_div(&z1)?;
    let s_of_q = q.invert()?;
    Ok((q.value(), Jet1::compose(&y_s, &s_of_q)?))
}

/// `(k-6)/(2(x+C)) - (k+6)/(2(x+B))`.
pub fn two_pole_solution(k: Rational64, b: f64, c: f64, x0: f64, order: usize) -> Result<Jet1> {
    if x0 + b == 0.0 || x0 + c == 0.0 {
        return Err(Error::PoleError(format!("x0 = {x0} hits a pole")));
    }
    if b == c {
        return Err(Error::PoleError("B = C merges the poles".into()));
    }
    let kf = ratf(k);
    let x = Jet1::variable(x0, order);
    let p = x.add_scalar(c).recip()?.scale((kf - 6.0) / 2.0);
    let q = x.add_scalar(b).recip()?.scale((kf + 6.0) / 2.0);
    Ok(p - q)
}

/// Integration constants dropped by [`reduce_f_to_i`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FConstants {
    pub f0: f64,
    pub f1: f64,
    pub log_e0: f64,
    /// Sign of `F''`.
    pub sign: f64,
}

/// `I = 2 d/dq log|F''|`.
pub fn reduce_f_to_i(f: &Jet1) -> Result<(Jet1, FConstants)> {
    need(f, 3);
    let e = f.derivative().derivative();
    let e0 = e.value();
    if e0 == 0.0 {
        return Err(Error::DegenerateError("F'' = 0".into()));
    }
    let i = e.log_derivative()?.scale(2.0);
    Ok((i, FConstants { f0: f.value(), f1: f.deriv(1), log_e0: e0.abs().ln(), sign: e0.signum() }))
}

/// Inverse of [`reduce_f_to_i`]: `F'' = sign · exp(log E0 + ∫ I/2)`, then two antiderivatives.
pub fn build_f_from_i(i: &Jet1, k: FConstants) -> Jet1 {
    let g = i.scale(0.5).antiderivative(k.log_e0);
    let e = g.exp().scale(k.sign);
    e.antiderivative(k.f1).antiderivative(k.f0)
}

/// `u = (3/2) d/dt log|H''|`, which solves the `k = 3/2` equation when `H` solves the sixth order form.
pub fn reduce_h_to_u(h: &Jet1) -> Result<Jet1> {
    need(h, 3);
    let e = h.derivative().derivative();
    if e.value() == 0.0 {
        return Err(Error::DegenerateError("H'' = 0".into()));
    }
    Ok(e.log_derivative()?.scale(1.5))
}
