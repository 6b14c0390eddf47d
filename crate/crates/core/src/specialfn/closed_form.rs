use num_rational::Rational64;

use super::{hyp2f1_jet, hypergeom_pair, hypergeom_residual, relative, HyperTriple};
use crate::chazy::SchwarzTriple;
use crate::error::{Error, Result};
use crate::jets::{rat, Jet1};

/// Tabulated solution families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClosedFormFamily {
    /// Rows 1..=4 of the `k = 2/3`, weights (2,2,2) table.
    Table1(u8),
    /// Rows 1..=3 of the weights (1,2,3) table.
    Table2(u8),
    /// Rows 1..=3 of the weights (4,1,1) table.
    Table3(u8),
    /// `(r-1)^{1/3}(3r+1)` and `(r+1)^{1/3}(3r-1)` in the variable `r = sqrt(s)`.
    ElementaryR,
    /// Hypergeometric pairs for the three `k = 3/2` triples.
    DualK32(u8),
}

/// A family together with the constants `c1..c4` of
/// `z1 = c1 A + c2 B`, `z2 = c3 A + c4 B`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosedFormId {
    pub family: ClosedFormFamily,
    pub constants: [f64; 4],
}

/// Default constants: `z1 = A + B`, `z2 = B`.
pub const DEFAULT_CONSTANTS: [f64; 4] = [1.0, 1.0, 0.0, 1.0];

impl ClosedFormId {
    pub fn new(family: ClosedFormFamily) -> Self {
        Self { family, constants: DEFAULT_CONSTANTS }
    }

    pub fn with_constants(family: ClosedFormFamily, constants: [f64; 4]) -> Self {
        Self { family, constants }
    }

    /// The `(α, β, γ)` of the table row, if the entry solves `u'' + V u / 4 = 0`.
    pub fn schwarz_triple(&self) -> Option<SchwarzTriple> {
        use ClosedFormFamily::*;
        let t = |a: (i64, i64), b: (i64, i64), c: (i64, i64)| {
            Some(SchwarzTriple::new(rat(a.0, a.1), rat(b.0, b.1), rat(c.0, c.1)))
        };
        match self.family {
            Table1(1) => t((3, 1), (3, 1), (3, 1)),
            Table1(2) => t((3, 1), (1, 3), (1, 3)),
            Table1(3) => t((1, 3), (3, 1), (1, 3)),
            Table1(4) => t((1, 3), (1, 3), (3, 1)),
            Table2(1) => t((3, 2), (1, 3), (1, 2)),
            Table2(2) => t((3, 2), (3, 1), (1, 2)),
            Table2(3) => t((3, 2), (1, 3), (9, 2)),
            Table3(1) => t((6, 1), (3, 2), (3, 2)),
            Table3(2) => t((2, 3), (3, 2), (3, 2)),
            Table3(3) => t((2, 3), (1, 6), (1, 6)),
            _ => None,
        }
    }

    /// Hypergeometric parameters solved by the `z` form of the entry.
    ///
    /// For `ElementaryR` this is the triple in `s = r^2`.
    pub fn hyper_triple(&self) -> Result<HyperTriple> {
        match self.family {
            ClosedFormFamily::ElementaryR => Ok(HyperTriple::from_pairs((-2, 3), (5, 6), (1, 2))),
            ClosedFormFamily::DualK32(i) => dual_k32_triple(i),
            _ => self
                .schwarz_triple()
                .map(|t| t.hyper())
                .ok_or_else(|| Error::InvalidParam(format!("no table row {:?}", self.family))),
        }
    }

    /// The `z`-pair in `s` solving the hypergeometric equation of [`Self::hyper_triple`].
    ///
    /// Table entries are divided by the `u = (s-1)^{(1-γ)/2} s^{(1-β)/2} z` prefactor;
    /// `ElementaryR` is re-expressed through `r = sqrt(s)`.
    pub fn hyper_pair(&self, s0: f64, order: usize) -> Result<(Jet1, Jet1)> {
        match self.family {
            ClosedFormFamily::ElementaryR => {
                if s0 <= 0.0 {
                    return Err(Error::DomainError(format!("r = sqrt({s0})")));
                }
                let r = Jet1::variable(s0, order).sqrt()?;
                let (z1, z2) = closed_form_solution(self, r.value(), order)?;
                Ok((Jet1::compose(&z1, &r)?, Jet1::compose(&z2, &r)?))
            }
            ClosedFormFamily::DualK32(_) => closed_form_solution(self, s0, order),
            _ => {
                let tr = self.schwarz_triple().unwrap();
                let (u1, u2) = closed_form_solution(self, s0, order)?;
                let pre = tr.u_prefactor(&Jet1::variable(s0, order))?;
                Ok((u1.checked_div(&pre)?, u2.checked_div(&pre)?))
            }
        }
    }
}

pub(crate) fn dual_k32_triple(i: u8) -> Result<HyperTriple> {
    match i {
        1 => Ok(HyperTriple::from_pairs((-1, 4), (5, 12), (1, 2))),
        2 => Ok(HyperTriple::from_pairs((-1, 4), (5, 12), (2, 3))),
        3 => Ok(HyperTriple::from_pairs((-1, 2), (5, 6), (2, 3))),
        _ => Err(Error::InvalidParam(format!("dual triple index {i}"))),
    }
}

fn poly(x: &Jet1, c: &[f64]) -> Jet1 {
    // Horner with coefficients from the constant term upward
    let mut acc = Jet1::constant(0.0, x.basepoint(), x.order());
    for &ck in c.iter().rev() {
        acc = (&acc * x).add_scalar(ck);
    }
    acc
}

fn apow(x: &Jet1, r: Rational64) -> Result<Jet1> {
    x.abs()?.pow_rational(r)
}

fn rpow(x: &Jet1, n: i64, d: i64) -> Result<Jet1> {
    x.pow_rational(rat(n, d))
}

/// `(A, B)` basis of a family at `x0` (`r` for `ElementaryR`, `s` otherwise).
fn basis(family: ClosedFormFamily, x0: f64, order: usize) -> Result<(Jet1, Jet1)> {
    use ClosedFormFamily::*;
    let x = Jet1::variable(x0, order);
    if let ElementaryR = family {
        if [1.0, -1.0, -1.0 / 3.0].contains(&x0) {
            return Err(Error::SingularPointError(format!("r = {x0}")));
        }
        let a = rpow(&x.add_scalar(-1.0), 1, 3)? * poly(&x, &[1.0, 3.0]);
        let b = rpow(&x.add_scalar(1.0), 1, 3)? * poly(&x, &[-1.0, 3.0]);
        return Ok((a, b));
    }
    if x0 == 0.0 || x0 == 1.0 {
        return Err(Error::SingularPointError(format!("s = {x0}")));
    }
    let s = &x;
    let sm1 = x.add_scalar(-1.0);
    let ss = s * &sm1;
    let h = |p: (i64, i64), q: (i64, i64), r: (i64, i64)| hyp2f1_jet(HyperTriple::from_pairs(p, q, r), x0, order);
    let pair = match family {
        Table1(1) => (poly(s, &[-1.0, 2.0]).checked_div(&ss)?, (s * s * poly(s, &[-2.0, 1.0])).checked_div(&sm1)?),
        Table1(2) => (
            poly(s, &[-2.0, 3.0]) * rpow(s, 2, 3)? * rpow(&sm1, 1, 3)?,
            poly(s, &[-1.0, 3.0]) * rpow(s, 1, 3)? * rpow(&sm1, 2, 3)?,
        ),
        Table1(3) => (
            (poly(s, &[-3.0, 2.0]) * rpow(&sm1, 1, 3)?).checked_div(s)?,
            (poly(s, &[-3.0, 1.0]) * rpow(&sm1, 2, 3)?).checked_div(s)?,
        ),
        Table1(4) => (
            (poly(s, &[1.0, 2.0]) * rpow(s, 1, 3)?).checked_div(&sm1)?,
            (poly(s, &[2.0, 1.0]) * rpow(s, 2, 3)?).checked_div(&sm1)?,
        ),
        Table2(1) => {
            let p = HyperTriple::from_pairs((5, 6), (-2, 3), (2, 3));
            let (f1, f2) = hypergeom_pair(p, x0, order)?;
            let pre = apow(&sm1, rat(1, 4))? * rpow(s, 1, 3)?;
            (&pre * &f1, &pre * &f2)
        }
        Table2(2) => (
            apow(&sm1, rat(3, 4))?.checked_div(s)?,
            (apow(&sm1, rat(1, 4))? * poly(s, &[-8.0, 4.0, 1.0])).checked_div(s)?,
        ),
        Table2(3) => {
            let e = apow(&sm1, rat(11, 4))?;
            (rpow(s, 2, 3)? * &e * h((13, 6), (11, 3), (4, 3))?, rpow(s, 1, 3)? * &e * h((11, 6), (10, 3), (2, 3))?)
        }
        Table3(1) => (
            poly(s, &[-1.0, 2.0]) * apow(&ss, rat(5, 4))?,
            poly(s, &[-1.0, -16.0, 144.0, -256.0, 128.0]).checked_div(&apow(&ss, rat(1, 4))?)?,
        ),
        Table3(2) => (
            apow(&ss, rat(5, 4))? * h((5, 3), (7, 3), (5, 2))?,
            (apow(&sm1, rat(5, 4))? * h((1, 6), (5, 6), (-1, 2))?).checked_div(&apow(s, rat(1, 4))?)?,
        ),
        Table3(3) => (apow(&ss, rat(7, 12))? * h((1, 3), (1, 1), (7, 6))?, apow(&ss, rat(5, 12))?),
        DualK32(i) => hypergeom_pair(dual_k32_triple(i)?, x0, order)?,
        other => return Err(Error::InvalidParam(format!("no closed form {other:?}"))),
    };
    Ok(pair)
}

/// Jets of `z1 = c1 A + c2 B` and `z2 = c3 A + c4 B` at `s0` (`r0` for `ElementaryR`).
pub fn closed_form_solution(id: &ClosedFormId, s0: f64, order: usize) -> Result<(Jet1, Jet1)> {
    let [c1, c2, c3, c4] = id.constants;
    if c1 * c4 - c2 * c3 == 0.0 {
        return Err(Error::LinearDependenceError);
    }
    let (a, b) = basis(id.family, s0, order)?;
    Ok((a.scale(c1) + b.scale(c2), a.scale(c3) + b.scale(c4)))
}

/// Relative residual of `u'' + V(s) u / 4 = 0` at the basepoint of `u`.
pub fn ode1_residual(u: &Jet1, tr: SchwarzTriple) -> f64 {
    let s = u.basepoint();
    let [p, q, r] = tr.potential_coefficients();
    let v = u.value() / 4.0;
    relative(&[u.deriv(2), p / (s * s) * v, q / ((s - 1.0) * (s - 1.0)) * v, r / (s * (s - 1.0)) * v])
}

/// Relative deviation of `W = z1 z2' - z2 z1'` from `w0 |s-1|^{c-a-b-1} s^{-c}`,
/// with `w0` calibrated at `s_ref`.
///
/// `pair` produces the two solutions at a requested basepoint.
pub fn wronskian_check<F>(pair: F, p: HyperTriple, s_ref: f64, s0: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<(Jet1, Jet1)>,
{
    let w = |s: f64| -> Result<f64> {
        let (z1, z2) = pair(s)?;
        let wr = z1.value() * z2.deriv(1) - z2.value() * z1.deriv(1);
        let scale = (z1.value() * z2.deriv(1)).abs().max((z2.value() * z1.deriv(1)).abs());
        if wr.abs() <= 1e-12 * scale || scale == 0.0 {
            return Err(Error::ZeroWronskianError);
        }
        Ok(wr)
    };
    let law = |s: f64| (s - 1.0).abs().powf(p.cf() - p.af() - p.bf() - 1.0) * s.abs().powf(-p.cf());
    let w0 = w(s_ref)? / law(s_ref);
    let expect = w0 * law(s0);
    Ok((w(s0)? - expect).abs() / expect.abs())
}

/// Residual of the entry's own equation: `u'' + V u / 4` for table rows,
/// the `r`-form hypergeometric equation for `ElementaryR`, the hypergeometric one otherwise.
pub fn entry_residual(id: &ClosedFormId, z: &Jet1) -> Result<f64> {
    match (id.family, id.schwarz_triple()) {
        (_, Some(tr)) => Ok(ode1_residual(z, tr)),
        (ClosedFormFamily::ElementaryR, _) => {
            let r = z.basepoint();
            Ok(relative(&[0.25 * (1.0 - r * r) * z.deriv(2), -r / 3.0 * z.deriv(1), 5.0 / 9.0 * z.value()]))
        }
        _ => Ok(hypergeom_residual(z, id.hyper_triple()?)),
    }
}

/// Every tabulated family.
pub fn all_families() -> Vec<ClosedFormFamily> {
    use ClosedFormFamily::*;
    let mut v: Vec<_> = (1..=4).map(Table1).collect();
    v.extend((1..=3).map(Table2));
    v.extend((1..=3).map(Table3));
    v.push(ElementaryR);
    v.extend((1..=3).map(DualK32));
    v
}
