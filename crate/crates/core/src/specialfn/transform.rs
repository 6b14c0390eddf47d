use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::{hyp2f1_jet, hypergeom_pair, hypergeom_residual, HyperTriple};
use crate::error::{Error, Result};
use crate::jets::{rat, Jet1, Scalar};

/// Algebraic transformations between hypergeometric equations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TransformKind {
    Euler,
    Quadratic,
    Cubic,
    Degree4,
    Degree6,
    FracLinear1ms,
    FracLinearSOverSm1,
    /// `t = s(9-s)^2/(s+3)^3`, `(-2,-1/2,1/2) -> (-2/3,-1/3,1/2)`.
    GoursatCubic,
    /// `t = -(s-4)^3/(27 s^2)`, `(-2,-1/2,-2) -> (-2/3,5/6,2/3)`.
    GoursatRational,
    /// `t = -1/(4s(s-1))`, `(-4/3,-2/3,-1/2) -> (-2/3,5/6,2/3)`.
    Degree2,
}

impl TransformKind {
    pub const ALL: [TransformKind; 10] = [
        Self::Euler,
        Self::Quadratic,
        Self::Cubic,
        Self::Degree4,
        Self::Degree6,
        Self::FracLinear1ms,
        Self::FracLinearSOverSm1,
        Self::GoursatCubic,
        Self::GoursatRational,
        Self::Degree2,
    ];

    /// The seven required kinds.
    pub const CORE: [TransformKind; 7] = [
        Self::Euler,
        Self::Quadratic,
        Self::Cubic,
        Self::Degree4,
        Self::Degree6,
        Self::FracLinear1ms,
        Self::FracLinearSOverSm1,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Euler => "euler",
            Self::Quadratic => "quadratic",
            Self::Cubic => "cubic",
            Self::Degree4 => "degree4",
            Self::Degree6 => "degree6",
            Self::FracLinear1ms => "frac_linear_1ms",
            Self::FracLinearSOverSm1 => "frac_linear_s_over_sm1",
            Self::GoursatCubic => "goursat_cubic",
            Self::GoursatRational => "goursat_rational",
            Self::Degree2 => "degree2",
        }
    }

    /// Real sampling domain for `s0` (open interval).
    pub fn domain(&self) -> (f64, f64) {
        (0.0, 0.5)
    }
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TransformKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::ParseError(format!("unknown transform kind `{s}`")))
    }
}

const ORDER: usize = 4;

fn tr(a: (i64, i64), b: (i64, i64), c: (i64, i64)) -> HyperTriple {
    HyperTriple::from_pairs(a, b, c)
}

/// Relative mismatch of the named identity at `s0`.
pub fn transform_identity_check(kind: TransformKind, s0: f64) -> Result<f64> {
    let (lo, hi) = kind.domain();
    if !(s0 > lo && s0 < hi) {
        return Err(Error::DomainError(format!("{kind} needs s in ({lo}, {hi}), got {s0}")));
    }
    let s = Jet1::variable(s0, ORDER);
    let one_minus = (-&s).add_scalar(1.0);
    match kind {
        TransformKind::Euler => {
            let lhs = hyp2f1_jet(tr((-7, 6), (-8, 3), (2, 3)), s0, ORDER)?;
            let rhs = one_minus.pow_rational(rat(9, 2))? * hyp2f1_jet(tr((11, 6), (10, 3), (2, 3)), s0, ORDER)?;
            let ode = pair_transfer(
                tr((11, 6), (10, 3), (2, 3)),
                &one_minus.pow_rational(rat(9, 2))?,
                &s,
                tr((-7, 6), (-8, 3), (2, 3)),
            )?;
            Ok(jet_mismatch(&lhs, &rhs).max(ode))
        }
        TransformKind::Quadratic => {
            let t = (&s * &one_minus).scale(4.0);
            let lhs = hyp2f1_jet(tr((1, 6), (1, 6), (2, 3)), s0, ORDER)?;
            let outer = hyp2f1_jet(tr((1, 12), (1, 12), (2, 3)), t.value(), ORDER)?;
            let rhs = Jet1::compose(&outer, &t)?;
            Ok(jet_mismatch(&lhs, &rhs))
        }
        TransformKind::Cubic => cubic_mismatch(s0, false),
        TransformKind::Degree4 => {
            // t = -s(s+8)^3 / (64 (1-s)^3)
            let num = (&s * &s.add_scalar(8.0).powi(3)).scale(-1.0 / 64.0);
            let t = num.checked_div(&one_minus.powi(3))?;
            pair_transfer(
                tr((11, 6), (10, 3), (2, 3)),
                &one_minus.pow_rational(rat(5, 2))?,
                &t,
                tr((5, 6), (-2, 3), (2, 3)),
            )
        }
        TransformKind::Degree6 => {
            let q = (&s * &s - &s).add_scalar(1.0);
            let t = (&s * &s * &one_minus * &one_minus).scale(27.0 / 4.0).checked_div(&q.powi(3))?;
            pair_transfer(
                tr((-4, 1), (-1, 1), (-2, 1)),
                &q.pow_rational(rat(-2, 1))?,
                &t,
                tr((-1, 3), (-2, 3), (-1, 2)),
            )
        }
        TransformKind::FracLinear1ms => pair_transfer(
            tr((-2, 3), (5, 6), (1, 2)),
            &Jet1::constant(1.0, s0, ORDER),
            &one_minus,
            tr((-2, 3), (5, 6), (2, 3)),
        ),
        TransformKind::FracLinearSOverSm1 => {
            let t = s.checked_div(&s.add_scalar(-1.0))?;
            pair_transfer(
                tr((-4, 3), (-1, 1), (2, 3)),
                &one_minus.pow_rational(rat(-4, 3))?,
                &t,
                tr((-4, 3), (5, 3), (2, 3)),
            )
        }
        TransformKind::GoursatCubic => {
            let t = (&s * &(-&s).add_scalar(9.0).powi(2)).checked_div(&s.add_scalar(3.0).powi(3))?;
            let f = s.scale(1.0 / 3.0).add_scalar(1.0).pow_rational(rat(-2, 1))?;
            pair_transfer(tr((-2, 1), (-1, 2), (1, 2)), &f, &t, tr((-2, 3), (-1, 3), (1, 2)))
        }
        TransformKind::GoursatRational => {
            let t = s.add_scalar(-4.0).powi(3).scale(-1.0 / 27.0).checked_div(&(&s * &s))?;
            pair_transfer(tr((-2, 1), (-1, 2), (-2, 1)), &s.pow_rational(rat(-4, 3))?, &t, tr((-2, 3), (5, 6), (2, 3)))
        }
        TransformKind::Degree2 => {
            let ss = &s * &one_minus;
            let t = ss.scale(4.0).recip()?;
            let f = ss.pow_rational(rat(-2, 3))?.scale(0.25);
            pair_transfer(tr((-4, 3), (-2, 3), (-1, 2)), &f, &t, tr((-2, 3), (5, 6), (2, 3)))
        }
    }
}

/// Max over both source solutions `z` of the target residual of `factor(s) z(s)`
/// written in the variable `t = t(s)`.
fn pair_transfer<T: Scalar>(source: HyperTriple, factor: &Jet1<T>, t: &Jet1<T>, target: HyperTriple) -> Result<f64> {
    let s0 = t.basepoint();
    let (z1, z2) = hypergeom_pair(source, s0, t.order())?;
    let s_of_t = t.invert()?;
    let mut worst = 0.0f64;
    for z in [z1, z2] {
        let zt = Jet1::compose(&factor.checked_mul(&z)?, &s_of_t)?;
        worst = worst.max(hypergeom_residual(&zt, target));
    }
    Ok(worst)
}

fn jet_mismatch(a: &Jet1, b: &Jet1) -> f64 {
    let n = a.order().min(b.order());
    let scale = (0..=n).map(|k| a.coeff(k).abs()).fold(0.0, f64::max);
    (0..=n).map(|k| (a.coeff(k) - b.coeff(k)).abs()).fold(0.0, f64::max) / scale
}

/// Cubic map `t = 3(2ω+1)s(s-1)/(s+ω)^3` over complex jets.
///
/// The factor carrying solutions across is `(s+ω)^{-4}`; `literal` uses
/// `(1+ωs)^{-4}` instead, which does not map solutions to solutions.
fn cubic_mismatch(s0: f64, literal: bool) -> Result<f64> {
    let w = Complex64::new(-0.5, 3f64.sqrt() / 2.0);
    let s = Jet1::variable(Complex64::new(s0, 0.0), ORDER);
    let spw = s.add_scalar(w);
    let t = (&s * &s.add_scalar(Complex64::new(-1.0, 0.0))).scale((w * 2.0 + 1.0) * 3.0).checked_div(&spw.powi(3))?;
    let base = if literal { s.scale(w).add_scalar(Complex64::new(1.0, 0.0)) } else { spw };
    let factor = base.pow_rational(rat(-4, 1))?;
    pair_transfer(tr((-4, 1), (-1, 1), (-2, 1)), &factor, &t, tr((-4, 3), (-1, 1), (-2, 1)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn displayed_examples() {
        assert!(transform_identity_check(TransformKind::Quadratic, 0.1).unwrap() < 1e-12);
        assert!(transform_identity_check(TransformKind::Euler, 0.2).unwrap() < 1e-11);
        assert!(transform_identity_check(TransformKind::Cubic, 0.15).unwrap() < 1e-10);
    }

    #[test]
    fn every_kind_on_samples() {
        for kind in TransformKind::ALL {
            for i in 0..10 {
                let s0 = 0.05 + 0.04 * i as f64 + 0.01;
                let m = transform_identity_check(kind, s0).unwrap();
                assert!(m < 1e-10, "{kind} at {s0}: {m}");
            }
        }
    }

    #[test]
    fn literal_cubic_factor_fails() {
        assert!(cubic_mismatch(0.15, true).unwrap() > 1e-3);
    }

    #[test]
    fn domain_and_names() {
        assert!(matches!(transform_identity_check(TransformKind::Degree4, 0.7), Err(Error::DomainError(_))));
        for k in TransformKind::ALL {
            assert_eq!(k.name().parse::<TransformKind>().unwrap(), k);
        }
        assert!("nope".parse::<TransformKind>().is_err());
    }
}
