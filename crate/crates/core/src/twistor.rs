//! Plebański metric with `Θ = Θ(x)` and the circle-twistor distribution over it.

use nalgebra::{DMatrix, DVector};

use crate::chazy::residual_ds6;
use crate::dist::{find, legendre_transform, Picture};
use crate::error::{Error, Result};
use crate::geometry::{curvature, CurvatureReport, MetricJet};
use crate::jets::{Jet1, MJet2};

/// Coordinates on the base are `(w, x, y, z)`; the fibre coordinate is `ξ`.
#[derive(Clone, Debug, PartialEq)]
pub struct PlebanskiData {
    /// `H(x)` at `x0 = h.basepoint()`.
    pub h: Jet1,
    /// `Θ = -∬ H`, both constants zero at `x0`.
    pub theta: Jet1,
    pub point: [f64; 4],
    pub xi: f64,
}

impl PlebanskiData {
    /// `point[1]` is replaced by the basepoint of `h`.
    pub fn new(h: Jet1, mut point: [f64; 4], xi: f64) -> Self {
        point[1] = h.basepoint();
        let theta = h.antiderivative(0.0).antiderivative(0.0).scale(-1.0);
        Self { h, theta, point, xi }
    }

    /// Third-order derivatives of `Θ` as needed by the displays.
    pub fn derivs(&self) -> ThetaDerivs {
        ThetaDerivs {
            xx: self.theta.deriv(2),
            xy: 0.0,
            yy: 0.0,
            xxx: self.theta.deriv(3),
            yxx: 0.0,
            yyx: 0.0,
            yyy: 0.0,
        }
    }
}

/// Second and third derivatives of `Θ` at a point.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct ThetaDerivs {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
    pub xxx: f64,
    pub yxx: f64,
    pub yyx: f64,
    pub yyy: f64,
}

const W: usize = 0;
const X: usize = 1;
const Y: usize = 2;
const Z: usize = 3;

/// `g = dw dx + dz dy + H(x) dz²` as jets in `(w, x, y, z)`, with `αβ = (α⊗β + β⊗α)/2`.
pub fn plebanski_metric(d: &PlebanskiData) -> MetricJet {
    let n = 4;
    let mut g = vec![vec![MJet2::constant(0.0, n); n]; n];
    g[W][X] = MJet2::constant(0.5, n);
    g[X][W] = MJet2::constant(0.5, n);
    g[Y][Z] = MJet2::constant(0.5, n);
    g[Z][Y] = MJet2::constant(0.5, n);
    g[Z][Z] = if d.h.order() >= 2 { MJet2::from_jet1(&d.h, X, n) } else { MJet2::constant(d.h.value(), n) };
    g
}

pub fn curvature_of_plebanski(d: &PlebanskiData) -> Result<CurvatureReport> {
    curvature(&plebanski_metric(d))
}

/// The coframe `θ¹ = dx`, `θ² = dw`, `θ³ = dy + H dz`, `θ⁴ = dz` as coefficient rows.
pub fn plebanski_coframe(d: &PlebanskiData) -> [[f64; 4]; 4] {
    let h = d.h.value();
    [[0.0, 1.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, h], [0.0, 0.0, 0.0, 1.0]]
}

/// The displayed connection 1-forms `(Γ¹₁, Γ¹₃, Γ³₁, Γ³₃)` as coefficients on `(dw, dx, dy, dz)`.
///
/// `θ² = dw` and `θ⁴ = dz` for this coframe.
pub fn connection_forms(t: &ThetaDerivs) -> [[f64; 4]; 4] {
    let form = |a2: f64, a4: f64| [a2, 0.0, 0.0, a4];
    [form(-t.yyx, t.yxx), form(-t.yyy, t.yyx), form(t.yxx, -t.xxx), form(t.yyx, -t.yxx)]
}

/// Levi-Civita connection forms `ω^i_j = θ^i_a (∂_c e_j^a + Γ^a_cb e_j^b) dx^c` of the coframe.
///
/// Entry `[i][j][c]`.
pub fn levi_civita_forms(d: &PlebanskiData) -> Result<([[[f64; 4]; 4]; 4], CurvatureReport)> {
    let g = plebanski_metric(d);
    let rep = curvature(&g)?;
    let th = DMatrix::from_fn(4, 4, |i, a| plebanski_coframe(d)[i][a]);
    let e = th.clone().try_inverse().ok_or(Error::SingularCoframeError)?;
    // only θ³ varies: ∂_x θ³_z = H'
    let mut dth = vec![DMatrix::<f64>::zeros(4, 4); 4];
    dth[X][(2, Z)] = d.h.deriv(1);
    let mut out = [[[0.0; 4]; 4]; 4];
    for c in 0..4 {
        let de = -(&e * &dth[c] * &e);
        for i in 0..4 {
            for j in 0..4 {
                let mut s = 0.0;
                for a in 0..4 {
                    let mut v = de[(a, j)];
                    for b in 0..4 {
                        v += rep.christoffel[(a * 4 + c) * 4 + b] * e[(b, j)];
                    }
                    s += th[(i, a)] * v;
                }
                out[i][j][c] = s;
            }
        }
    }
    Ok((out, rep))
}

/// Self-dual and anti-self-dual parts of the Weyl tensor, `max |C ± *C| / 2`,
/// with the orientation `ε_{wxyz} = -sqrt|g|`, so that `H = x²` is self-dual.
pub fn weyl_halves(r: &CurvatureReport) -> (f64, f64) {
    let n = 4;
    let det = DMatrix::from_fn(n, n, |a, b| r.g(a, b)).determinant();
    let vol = det.abs().sqrt();
    let eps = |a: usize, b: usize, c: usize, d: usize| -> f64 {
        let p = [a, b, c, d];
        for i in 0..4 {
            for j in i + 1..4 {
                if p[i] == p[j] {
                    return 0.0;
                }
            }
        }
        let mut s = 1.0;
        for i in 0..4 {
            for j in i + 1..4 {
                if p[i] > p[j] {
                    s = -s;
                }
            }
        }
        -s * vol
    };
    let mut plus = 0.0f64;
    let mut minus = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let mut star = 0.0;
                    for e in 0..n {
                        for f in 0..n {
                            let mut up = 0.0;
                            for e2 in 0..n {
                                for f2 in 0..n {
                                    up += r.g_inv(e, e2) * r.g_inv(f, f2) * eps(a, b, e2, f2);
                                }
                            }
                            star += 0.5 * up * r.weyl_at(e, f, c, d);
                        }
                    }
                    let w = r.weyl_at(a, b, c, d);
                    plus = plus.max((0.5 * (w + star)).abs());
                    minus = minus.max((0.5 * (w - star)).abs());
                }
            }
        }
    }
    (plus, minus)
}

/// `A(ξ)` and `B(ξ)` as coefficient lists in ascending powers of `ξ`.
pub fn annihilator_polynomials(t: &ThetaDerivs) -> ([f64; 4], [f64; 3]) {
    ([t.xxx, 3.0 * t.yxx, 3.0 * t.yyx, t.yyy], [t.xx, 2.0 * t.xy, t.yy])
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &k| acc * x + k)
}

/// `ω̃³ = dξ - A dz`, `ω̃⁴ = ξ dz + dw`, `ω̃⁵ = dy - ξ dx - B dz` on `(w, x, y, z, ξ)`.
pub fn twistor_annihilators(t: &ThetaDerivs, xi: f64) -> [[f64; 5]; 3] {
    let (a, b) = annihilator_polynomials(t);
    let (a, b) = (horner(&a, xi), horner(&b, xi));
    [[0.0, 0.0, 0.0, -a, 1.0], [1.0, 0.0, 0.0, xi, 0.0], [0.0, -xi, 1.0, -b, 0.0]]
}

/// Pulls the annihilators back along `x = t̃`, `w = ỹ`, `z = x̃`, `ξ = -p̃`, `y = z̃ - p̃ t̃`
/// and returns the largest distance of a pulled-back form from the span of the dual
/// contact forms `ω1, ω2, ω3` at `(x̃, ỹ, z̃, p̃, t̃)`, relative to the size of the form.
pub fn twistor_coordinate_check(d: &PlebanskiData) -> Result<f64> {
    let [w, x, y, z] = d.point;
    let xi = d.xi;
    let (tt, yt, xt, pt) = (x, w, z, -xi);
    let zt = y + pt * tt;
    let _ = (yt, xt, zt);
    // Jacobian ∂(w,x,y,z,ξ)/∂(x̃,ỹ,z̃,p̃,t̃)
    let mut jac = DMatrix::<f64>::zeros(5, 5);
    jac[(0, 1)] = 1.0;
    jac[(1, 4)] = 1.0;
    jac[(2, 2)] = 1.0;
    jac[(2, 3)] = -tt;
    jac[(2, 4)] = -pt;
    jac[(3, 0)] = 1.0;
    jac[(4, 3)] = -1.0;
    let forms = twistor_annihilators(&d.derivs(), xi);
    let (h, h1) = (d.h.value(), d.h.deriv(1));
    // dual contact forms on (x, y, z, p, t)
    let dual = DMatrix::from_row_slice(
        3,
        5,
        &[-pt, 1.0, 0.0, 0.0, 0.0, -h1, 0.0, 0.0, 1.0, 0.0, -(tt * h1 - h), 0.0, 1.0, 0.0, 0.0],
    );
    let basis = dual.transpose();
    let svd = basis.clone().svd(true, true);
    let mut worst = 0.0f64;
    for f in forms {
        let pulled = jac.transpose() * DVector::from_row_slice(&f);
        let coef = svd.solve(&pulled, 1e-14).map_err(|e| Error::DomainError(e.to_string()))?;
        let resid = &basis * coef - &pulled;
        worst = worst.max(resid.amax() / pulled.amax().max(f64::MIN_POSITIVE));
    }
    Ok(worst)
}

/// One item of the list of `H` for which the twistor distribution has split `G₂` symmetry.
#[derive(Clone, Debug, PartialEq)]
pub struct TwistorCase {
    /// `"1"` .. `"5"`, or `"6a"` .. `"6e"` for Legendre transforms of `F`.
    pub label: &'static str,
    pub id: &'static str,
}

/// Every catalog id covered by the list, grouped by item.
pub fn twistor_cases() -> Vec<TwistorCase> {
    let c = |label, id| TwistorCase { label, id };
    vec![
        c("1", "H-schwarz-yes-(4/3,4/3,4/3)"),
        c("1", "H-schwarz-yes-(4/3,1/3,1/3)"),
        c("2", "H-schwarz-w132-(2/3,1/2,1/3)"),
        c("2", "H-schwarz-w132-(2/3,1/2,4/3)"),
        c("2", "H-schwarz-w132-(2/3,2,1/3)"),
        c("3", "H-schwarz-w411-(8/3,2/3,2/3)"),
        c("3", "H-schwarz-w411-(2/3,2/3,2/3)"),
        c("4", "H-power-(-2)"),
        c("4", "H-power-(-1/2)"),
        c("4", "H-power-1/2"),
        c("4", "H-power-2"),
        c("5", "twistor-case-5"),
        c("6a", "F-schwarz-yes-(3,3,3)"),
        c("6a", "F-schwarz-yes-(3,1/3,1/3)"),
        c("6b", "F-schwarz-w123-(3/2,1/3,1/2)"),
        c("6b", "F-schwarz-w123-(3/2,3,1/2)"),
        c("6b", "F-schwarz-w123-(3/2,1/3,9/2)"),
        c("6c", "F-schwarz-w411-(6,3/2,3/2)"),
        c("6c", "F-schwarz-w411-(2/3,3/2,3/2)"),
        c("6d", "F-power-(-1)"),
        c("6d", "F-power-1/3"),
        c("6d", "F-power-2/3"),
        c("6d", "F-power-2"),
        c("6e", "F-two-pole-closed"),
    ]
}

/// `H(x)` of a listed case at the catalog parameter `param`; F-picture cases go through
/// the Legendre transform.
pub fn twistor_case_h(case: &TwistorCase, param: f64) -> Result<Jet1> {
    let spec = find(case.id)?;
    let j = spec.jet(param, 8)?.jet;
    match spec.picture {
        Picture::HOfT => Ok(j),
        Picture::FOfQ => Ok(legendre_transform(&j)?.1),
    }
}

/// `residual_ds6` of the listed case, relative.
pub fn twistor_case_residual(case: &TwistorCase, param: f64) -> Result<f64> {
    Ok(residual_ds6(&twistor_case_h(case, param)?).relative())
}
