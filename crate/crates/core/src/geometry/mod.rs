//! Nurowski's conformal metric from the adapted coframes, and its curvature.

mod checks;
mod curvature;

pub use checks::{
    conformal_rescale_check, dual_frame_s_mismatch, elementary_q, elementary_rescale_check, elementary_ricci_check,
    flatness_suite, flatness_suite_with, ricci_identity_check, sample_points, weyl_conformal_invariance,
    weyl_equals_residual_check, CaseFrame, DualWeylReport, FlatnessPoint, RescaleReport,
};
pub use curvature::{curvature, CurvatureReport, MetricJet};

use nalgebra::DMatrix;

use crate::chazy::reduce_f_to_i;
use crate::error::{Error, Result};
use crate::jets::{Jet1, MJet2};

/// A 1-form as its coefficients on `dx^0 .. dx^{n-1}`.
pub type Form = Vec<MJet2>;

/// Rows `θ^i = θ^i_a dx^a` evaluated as jets at one point, and the constant `η`.
#[derive(Clone, Debug, PartialEq)]
pub struct Coframe {
    pub dim: usize,
    pub theta: Vec<Form>,
    pub eta: DMatrix<f64>,
}

/// `η` of `g = 2θ¹θ⁵ - 2θ²θ⁴ + (4/3)θ³θ³`.
pub fn nurowski_eta() -> DMatrix<f64> {
    let mut e = DMatrix::zeros(5, 5);
    e[(0, 4)] = 1.0;
    e[(4, 0)] = 1.0;
    e[(1, 3)] = -1.0;
    e[(3, 1)] = -1.0;
    e[(2, 2)] = 4.0 / 3.0;
    e
}

const N: usize = 5;

fn c(v: f64) -> MJet2 {
    MJet2::constant(v, N)
}

fn basis(i: usize) -> Form {
    (0..N).map(|a| c(if a == i { 1.0 } else { 0.0 })).collect()
}

fn add(a: &Form, b: &Form) -> Form {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub(a: &Form, b: &Form) -> Form {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn mul(f: &MJet2, a: &Form) -> Form {
    a.iter().map(|x| f * x).collect()
}

/// Jets of `f, f', .., f^{(k)}` lifted to coordinate 4.
fn lifted_derivatives(f: &Jet1, k: usize) -> Result<Vec<MJet2>> {
    if f.order() < k + 2 {
        return Err(Error::OrderTooHigh(k + 2));
    }
    let mut out = Vec::with_capacity(k + 1);
    let mut d = f.clone();
    for _ in 0..=k {
        out.push(MJet2::from_jet1(&d, 4, N));
        d = d.derivative();
    }
    Ok(out)
}

/// The contact forms `ω1 = dy - p dx`, `ω2 = dp - Q dx`, `ω3 = dz - Z dx`.
fn contact_forms(p: f64, q: &MJet2, z: &MJet2) -> [Form; 3] {
    let mut w1 = basis(1);
    w1[0] = MJet2::coordinate(3, p, N).scale(-1.0);
    let mut w2 = basis(3);
    w2[0] = -q;
    let mut w3 = basis(2);
    w3[0] = -z;
    [w1, w2, w3]
}

/// Coframe on `(x,y,z,p,q)` at `q = f.basepoint()`; `f` needs order ≥ 6.
pub fn coframe_f(f: &Jet1, xyzp: [f64; 4]) -> Result<Coframe> {
    let d = lifted_derivatives(f, 4)?;
    if d[2].value() == 0.0 {
        return Err(Error::DegenerateError("F'' = 0".into()));
    }
    let q = MJet2::coordinate(4, f.basepoint(), N);
    let [w1, w2, w3] = contact_forms(xyzp[3], &q, &d[0]);
    let (w4, w5) = (basis(4), basis(0));
    let a = d[2].recip()?;
    let comb = sub(&mul(&d[1], &w2), &w3);
    let a2 = &a * &a;
    let l = (&d[3] * &a2).scale(0.25);
    let k = (&(&d[3] * &d[3]).scale(7.0) - &(&d[2] * &d[4]).scale(4.0)) * (&a2 * &a).scale(1.0 / 40.0);
    let th2 = mul(&a, &comb);
    let th1 = sub(&w1, &th2);
    let th3 = add(&mul(&(c(1.0) - &d[1] * &l), &w2), &mul(&l, &w3));
    let th4 = sub(&add(&mul(&k, &comb), &w4), &w5);
    let th5 = mul(&c(-1.0), &w4);
    Ok(Coframe { dim: N, theta: vec![th1, th2, th3, th4, th5], eta: nurowski_eta() })
}

/// Legendre-dual coframe on `(x,y,z,p,t)` at `t = h.basepoint()`; `h` needs order ≥ 6.
pub fn coframe_h(h: &Jet1, xyzp: [f64; 4]) -> Result<Coframe> {
    let d = lifted_derivatives(h, 4)?;
    if d[2].value() == 0.0 {
        return Err(Error::DegenerateError("H'' = 0".into()));
    }
    let t = MJet2::coordinate(4, h.basepoint(), N);
    let z = &(&t * &d[1]) - &d[0];
    let [w1, w2, w3] = contact_forms(xyzp[3], &d[1], &z);
    let w4 = mul(&d[2], &basis(4));
    let w5 = basis(0);
    let comb = sub(&mul(&t, &w2), &w3);
    let a = d[2].recip()?;
    let l = (&d[3] * &a).scale(0.25);
    let k = (&(&d[2] * &d[4]).scale(4.0) - &(&d[3] * &d[3]).scale(5.0)) * (&(&a * &a) * &a).scale(1.0 / 40.0);
    let th2 = mul(&d[2], &comb);
    let th1 = sub(&w1, &th2);
    let th3 = sub(&mul(&(c(1.0) + &t * &l), &w2), &mul(&l, &w3));
    let th4 = sub(&add(&mul(&k, &comb), &w4), &w5);
    let th5 = mul(&c(-1.0), &w4);
    Ok(Coframe { dim: N, theta: vec![th1, th2, th3, th4, th5], eta: nurowski_eta() })
}

impl Coframe {
    /// Values `θ^i_a` as a matrix (row `i`).
    pub fn values(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |i, a| self.theta[i][a].value())
    }

    /// Frame dual to the coframe: column `i` is `e_i`.
    pub fn frame(&self) -> Result<DMatrix<f64>> {
        self.values().try_inverse().ok_or(Error::SingularCoframeError)
    }
}

/// No inverse, or one that fails to reproduce the identity to 1e-8.
pub(crate) fn is_singular(m: &DMatrix<f64>) -> bool {
    let n = m.nrows();
    match m.clone().try_inverse() {
        None => true,
        Some(inv) => {
            let e = m * inv - DMatrix::<f64>::identity(n, n);
            e.amax().is_nan() || e.amax() >= 1e-8
        }
    }
}

/// `g_ab = η_ij θ^i_a θ^j_b`.
pub fn metric_at(cf: &Coframe) -> Result<MetricJet> {
    let n = cf.dim;
    if is_singular(&cf.values()) {
        return Err(Error::SingularCoframeError);
    }
    let mut g = vec![vec![MJet2::constant(0.0, n); n]; n];
    for a in 0..n {
        for b in a..n {
            let mut s = MJet2::constant(0.0, n);
            for i in 0..n {
                for j in 0..n {
                    let e = cf.eta[(i, j)];
                    if e != 0.0 {
                        s = &s + &(&cf.theta[i][a] * &cf.theta[j][b]).scale(e);
                    }
                }
            }
            g[b][a] = s.clone();
            g[a][b] = s;
        }
    }
    Ok(g)
}

/// `α β = (α ⊗ β + β ⊗ α)/2` added into `g` with weight `w`.
fn add_sym(g: &mut MetricJet, w: &MJet2, a: &Form, b: &Form) {
    let n = g.len();
    for i in 0..n {
        for j in 0..n {
            let t = &(&a[i] * &b[j]) + &(&b[i] * &a[j]);
            g[i][j] = &g[i][j] + &(&t * w).scale(0.5);
        }
    }
}

/// `2ω̃2ω̃5 - 2ω̃1ω̃4 + (4/3)ω̃3² + b23 ω̃2ω̃3 + b22 ω̃2²`.
fn reduced_assembly(w: &[Form; 5], b23: &MJet2, b22: &MJet2) -> MetricJet {
    let mut g = vec![vec![c(0.0); N]; N];
    add_sym(&mut g, &c(2.0), &w[1], &w[4]);
    add_sym(&mut g, &c(-2.0), &w[0], &w[3]);
    add_sym(&mut g, &c(4.0 / 3.0), &w[2], &w[2]);
    add_sym(&mut g, b23, &w[1], &w[2]);
    add_sym(&mut g, b22, &w[1], &w[1]);
    g
}

/// The simplified F-picture metric written with `I = 2 (log F'')'` and `ω̃2 = (F'ω2 - ω3)/F''`.
pub fn reduced_metric_f(f: &Jet1, xyzp: [f64; 4]) -> Result<MetricJet> {
    let d = lifted_derivatives(f, 2)?;
    let (i, _) = reduce_f_to_i(f)?;
    if i.order() < 3 {
        return Err(Error::OrderTooHigh(6));
    }
    let ij = MJet2::from_jet1(&i, 4, N);
    let ip = MJet2::from_jet1(&i.derivative(), 4, N);
    let q = MJet2::coordinate(4, f.basepoint(), N);
    let [w1, w2, w3] = contact_forms(xyzp[3], &q, &d[0]);
    let wt2 = mul(&d[2].recip()?, &sub(&mul(&d[1], &w2), &w3));
    let b23 = ij.scale(-1.0 / 3.0);
    let b22 = (&ip - &(&ij * &ij).scale(1.0 / 6.0)).scale(0.1);
    Ok(reduced_assembly(&[w1, wt2, w2, basis(4), basis(0)], &b23, &b22))
}

/// The simplified dual metric with `ω̃2 = H''(tω2 - ω3)`, `ω̃4 = H'' dt`.
pub fn reduced_metric_h(h: &Jet1, xyzp: [f64; 4]) -> Result<MetricJet> {
    let d = lifted_derivatives(h, 4)?;
    if d[2].value() == 0.0 {
        return Err(Error::DegenerateError("H'' = 0".into()));
    }
    let t = MJet2::coordinate(4, h.basepoint(), N);
    let z = &(&t * &d[1]) - &d[0];
    let [w1, w2, w3] = contact_forms(xyzp[3], &d[1], &z);
    let wt2 = mul(&d[2], &sub(&mul(&t, &w2), &w3));
    let a = d[2].recip()?;
    let a2 = &a * &a;
    let l = (&d[3] * &a2).scale(0.25);
    let k = (&(&d[2] * &d[4]).scale(4.0) - &(&d[3] * &d[3]).scale(5.0)) * (&a2 * &a2).scale(1.0 / 40.0);
    let b23 = l.scale(8.0 / 3.0);
    let b22 = &(&l * &l).scale(4.0 / 3.0) - &k.scale(2.0);
    Ok(reduced_assembly(&[w1, wt2, w2, mul(&d[2], &basis(4)), basis(0)], &b23, &b22))
}

/// Largest entry-wise difference of two metric jets (values, gradients and Hessians),
/// relative to the largest entry of `a`.
pub fn metric_mismatch(a: &MetricJet, b: &MetricJet) -> f64 {
    let n = a.len();
    let mut diff = 0.0f64;
    let mut scale = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let (x, y) = (&a[i][j], &b[i][j]);
            let mut pairs = vec![(x.value(), y.value())];
            for e in 0..n {
                pairs.push((x.grad(e), y.grad(e)));
                for f in e..n {
                    pairs.push((x.hess(e, f), y.hess(e, f)));
                }
            }
            for (u, v) in pairs {
                diff = diff.max((u - v).abs());
                scale = scale.max(u.abs());
            }
        }
    }
    diff / scale.max(f64::MIN_POSITIVE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{catalog, find, sample_params, Picture};

    const XYZP: [f64; 4] = [0.3, -0.2, 0.5, 0.7];

    #[test]
    fn identity_coframe_gives_eta() {
        let cf = Coframe { dim: N, theta: (0..N).map(basis).collect(), eta: nurowski_eta() };
        let g = metric_at(&cf).unwrap();
        for a in 0..N {
            for b in 0..N {
                assert_eq!(g[a][b].value(), nurowski_eta()[(a, b)]);
            }
        }
    }

    #[test]
    fn q_squared_frame() {
        let f = Jet1::variable(1.5, 6).powi(2);
        let cf = coframe_f(&f, XYZP).unwrap();
        // θ² = (F'ω2 - ω3)/2; its dz coefficient is -1/2
        assert_eq!(cf.theta[1][2].value(), -0.5);
        let g = metric_at(&cf).unwrap();
        let vals = DMatrix::from_fn(N, N, |a, b| g[a][b].value());
        let eig = vals.symmetric_eigen().eigenvalues;
        let pos = eig.iter().filter(|&&x| x > 0.0).count();
        let neg = eig.iter().filter(|&&x| x < 0.0).count();
        assert_eq!((pos.min(neg), pos.max(neg)), (2, 3));
    }

    #[test]
    fn t_squared_dual_frame_is_polynomial() {
        let h = Jet1::variable(0.8, 6).powi(2);
        let cf = coframe_h(&h, XYZP).unwrap();
        // H''' = 0: θ³ = ω2, θ⁴ = ω4 - ω5
        assert_eq!(cf.theta[2][3].value(), 1.0);
        assert_eq!(cf.theta[3][0].value(), -1.0);
        assert_eq!(cf.theta[3][4].value(), 2.0);
    }

    #[test]
    fn degenerate_frames() {
        let f = Jet1::variable(1.0, 6);
        assert!(matches!(coframe_f(&f, XYZP), Err(Error::DegenerateError(_))));
        assert!(matches!(coframe_h(&f, XYZP), Err(Error::DegenerateError(_))));
    }

    #[test]
    fn reduced_assembly_agrees_with_coframe() {
        for spec in catalog() {
            for p in sample_params(&spec, 3, 11).unwrap() {
                let j = spec.jet(p, 8).unwrap().jet;
                let (full, red) = match spec.picture {
                    Picture::FOfQ => {
                        (metric_at(&coframe_f(&j, XYZP).unwrap()).unwrap(), reduced_metric_f(&j, XYZP).unwrap())
                    }
                    Picture::HOfT => {
                        (metric_at(&coframe_h(&j, XYZP).unwrap()).unwrap(), reduced_metric_h(&j, XYZP).unwrap())
                    }
                };
                let m = metric_mismatch(&full, &red);
                assert!(m < 1e-10, "{} at {p}: {m}", spec.id);
                let cf = match spec.picture {
                    Picture::FOfQ => coframe_f(&j, XYZP).unwrap(),
                    Picture::HOfT => coframe_h(&j, XYZP).unwrap(),
                };
                assert!(cf.values().determinant().abs() > 1e-12, "{}", spec.id);
            }
        }
    }

    #[test]
    fn reduced_w22_coefficient() {
        // the ω̃2ω̃2 coefficient is (I' - I²/6)/10; for F = q^{1/3}, I = -10/(3q)
        let spec = find("F-power-1/3").unwrap();
        let f = spec.jet(1.4, 8).unwrap().jet;
        let (i, _) = reduce_f_to_i(&f).unwrap();
        assert!((i.value() + 10.0 / (3.0 * 1.4)).abs() < 1e-12);
        let expect = (i.deriv(1) - i.value() * i.value() / 6.0) / 10.0;
        // dz enters only through ω̃2 = (F'ω2 - ω3)/F'', so g_zz = coefficient / F''^2
        let g = metric_at(&coframe_f(&f, XYZP).unwrap()).unwrap();
        let coeff = g[2][2].value() * f.deriv(2).powi(2);
        assert!((coeff - expect).abs() < 1e-12 * expect.abs().max(1.0));
    }
}
