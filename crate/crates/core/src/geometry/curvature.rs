use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jets::MJet2;

/// Metric components as order-2 jets at a point.
pub type MetricJet = Vec<Vec<MJet2>>;

/// Curvature of a metric at one point, in coordinate components.
///
/// All four-index arrays are stored row-major with index `((a n + b) n + c) n + d`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CurvatureReport {
    pub dim: usize,
    pub metric: Vec<f64>,
    pub inverse: Vec<f64>,
    /// `Γ^a_bc`, index `(a n + b) n + c`.
    pub christoffel: Vec<f64>,
    /// `R_abcd` with the first index lowered.
    pub riemann: Vec<f64>,
    pub ricci: Vec<f64>,
    pub scalar: f64,
    pub weyl: Vec<f64>,
    pub max_abs_weyl: f64,
    pub max_abs_ricci: f64,
    pub metric_scale: f64,
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Levi-Civita curvature of `g` at the point its jets are expanded at.
///
/// `R^a_bcd = ∂_c Γ^a_db - ∂_d Γ^a_cb + Γ^a_ce Γ^e_db - Γ^a_de Γ^e_cb`, `R_bd = R^a_bad`.
pub fn curvature(g: &MetricJet) -> Result<CurvatureReport> {
    let n = g.len();
    let gv = DMatrix::from_fn(n, n, |a, b| g[a][b].value());
    let metric_scale = gv.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if super::is_singular(&gv) {
        return Err(Error::SingularMetricError);
    }
    let gi = gv.clone().try_inverse().ok_or(Error::SingularMetricError)?;

    let i3 = |a: usize, b: usize, c: usize| (a * n + b) * n + c;
    let i4 = |a: usize, b: usize, c: usize, d: usize| ((a * n + b) * n + c) * n + d;

    // dg[e][a][b] = ∂_e g_ab, ddg[e][f][a][b] = ∂_e ∂_f g_ab
    let dg = |e: usize, a: usize, b: usize| g[a][b].grad(e);
    let ddg = |e: usize, f: usize, a: usize, b: usize| g[a][b].hess(e, f);

    let mut dgi = vec![DMatrix::<f64>::zeros(n, n); n];
    for (e, m) in dgi.iter_mut().enumerate() {
        let d = DMatrix::from_fn(n, n, |a, b| dg(e, a, b));
        *m = -(&gi * d * &gi);
    }

    let mut g1 = vec![0.0; n * n * n];
    let mut dg1 = vec![0.0; n * n * n * n];
    for d in 0..n {
        for b in 0..n {
            for c in 0..n {
                g1[i3(d, b, c)] = 0.5 * (dg(b, d, c) + dg(c, b, d) - dg(d, b, c));
                for e in 0..n {
                    dg1[i4(e, d, b, c)] = 0.5 * (ddg(e, b, d, c) + ddg(e, c, b, d) - ddg(e, d, b, c));
                }
            }
        }
    }
    let mut gam = vec![0.0; n * n * n];
    let mut dgam = vec![0.0; n * n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                gam[i3(a, b, c)] = (0..n).map(|d| gi[(a, d)] * g1[i3(d, b, c)]).sum();
                for e in 0..n {
                    dgam[i4(e, a, b, c)] =
                        (0..n).map(|d| dgi[e][(a, d)] * g1[i3(d, b, c)] + gi[(a, d)] * dg1[i4(e, d, b, c)]).sum();
                }
            }
        }
    }

    let mut rup = vec![0.0; n * n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let mut r = dgam[i4(c, a, d, b)] - dgam[i4(d, a, c, b)];
                    for e in 0..n {
                        r += gam[i3(a, c, e)] * gam[i3(e, d, b)] - gam[i3(a, d, e)] * gam[i3(e, c, b)];
                    }
                    rup[i4(a, b, c, d)] = r;
                }
            }
        }
    }
    let mut ricci = vec![0.0; n * n];
    for b in 0..n {
        for d in 0..n {
            ricci[b * n + d] = (0..n).map(|a| rup[i4(a, b, a, d)]).sum();
        }
    }
    let scalar: f64 =
        (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).map(|(a, b)| gi[(a, b)] * ricci[a * n + b]).sum();
    let mut riemann = vec![0.0; n * n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    riemann[i4(a, b, c, d)] = (0..n).map(|e| gv[(a, e)] * rup[i4(e, b, c, d)]).sum();
                }
            }
        }
    }
    let nf = n as f64;
    let gg = |a: usize, b: usize| gv[(a, b)];
    let rc = |a: usize, b: usize| ricci[a * n + b];
    let mut weyl = vec![0.0; n * n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let p = gg(a, c) * rc(b, d) - gg(a, d) * rc(b, c) - gg(b, c) * rc(a, d) + gg(b, d) * rc(a, c);
                    let s = gg(a, c) * gg(b, d) - gg(a, d) * gg(b, c);
                    weyl[i4(a, b, c, d)] =
                        riemann[i4(a, b, c, d)] - p / (nf - 2.0) + scalar * s / ((nf - 1.0) * (nf - 2.0));
                }
            }
        }
    }
    Ok(CurvatureReport {
        dim: n,
        metric: gv.transpose().iter().copied().collect(),
        inverse: gi.transpose().iter().copied().collect(),
        christoffel: gam,
        max_abs_weyl: max_abs(&weyl),
        max_abs_ricci: max_abs(&ricci),
        riemann,
        ricci,
        scalar,
        weyl,
        metric_scale,
    })
}

impl CurvatureReport {
    fn i4(&self, a: usize, b: usize, c: usize, d: usize) -> usize {
        let n = self.dim;
        ((a * n + b) * n + c) * n + d
    }

    pub fn riemann_at(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.riemann[self.i4(a, b, c, d)]
    }

    pub fn weyl_at(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.weyl[self.i4(a, b, c, d)]
    }

    pub fn ricci_at(&self, a: usize, b: usize) -> f64 {
        self.ricci[a * self.dim + b]
    }

    pub fn g(&self, a: usize, b: usize) -> f64 {
        self.metric[a * self.dim + b]
    }

    pub fn g_inv(&self, a: usize, b: usize) -> f64 {
        self.inverse[a * self.dim + b]
    }

    /// `maxAbsWeyl / metricScale`.
    pub fn weyl_ratio(&self) -> f64 {
        self.max_abs_weyl / self.metric_scale
    }

    /// Size of the terms that make up `R`: the larger of `max|R|` and `max|Γ|²`.
    ///
    /// For a flat metric the Riemann tensor is pure round-off, so it cannot serve as its own scale.
    pub fn curvature_scale(&self) -> f64 {
        let g = max_abs(&self.christoffel);
        max_abs(&self.riemann).max(g * g).max(f64::MIN_POSITIVE)
    }

    /// Largest violation of the pair symmetries and the first Bianchi identity,
    /// relative to [`Self::curvature_scale`].
    pub fn symmetry_residual(&self) -> f64 {
        let n = self.dim;
        let scale = self.curvature_scale();
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let r = self.riemann_at(a, b, c, d);
                        worst = worst
                            .max((r + self.riemann_at(b, a, c, d)).abs())
                            .max((r + self.riemann_at(a, b, d, c)).abs())
                            .max((r - self.riemann_at(c, d, a, b)).abs())
                            .max((r + self.riemann_at(a, c, d, b) + self.riemann_at(a, d, b, c)).abs());
                    }
                }
            }
        }
        worst / scale
    }

    /// Largest trace `g^{ac} C_abcd` relative to [`Self::curvature_scale`] times `max|g^{-1}|`.
    pub fn weyl_trace_residual(&self) -> f64 {
        let n = self.dim;
        let scale = self.curvature_scale() * max_abs(&self.inverse).max(f64::MIN_POSITIVE);
        let mut worst = 0.0f64;
        for b in 0..n {
            for d in 0..n {
                let t: f64 = (0..n)
                    .flat_map(|a| (0..n).map(move |c| (a, c)))
                    .map(|(a, c)| self.g_inv(a, c) * self.weyl_at(a, b, c, d))
                    .sum();
                worst = worst.max(t.abs());
            }
        }
        worst / scale
    }

    /// `C^a_bcd = g^{ae} C_ebcd`.
    pub fn weyl_raised(&self) -> Vec<f64> {
        let n = self.dim;
        let mut out = vec![0.0; n * n * n * n];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        out[self.i4(a, b, c, d)] = (0..n).map(|e| self.g_inv(a, e) * self.weyl_at(e, b, c, d)).sum();
                    }
                }
            }
        }
        out
    }

    /// Frame components `C(e_i, e_j, e_k, e_l)` for the frame whose columns are `e`.
    pub fn weyl_in_frame(&self, e: &DMatrix<f64>) -> Vec<f64> {
        let n = self.dim;
        // contract one index at a time
        let mut cur = self.weyl.clone();
        for slot in 0..4 {
            let mut next = vec![0.0; n * n * n * n];
            for idx in 0..next.len() {
                let mut ix = [idx / (n * n * n), (idx / (n * n)) % n, (idx / n) % n, idx % n];
                let i = ix[slot];
                let mut s = 0.0;
                for a in 0..n {
                    ix[slot] = a;
                    s += e[(a, i)] * cur[self.i4(ix[0], ix[1], ix[2], ix[3])];
                }
                next[idx] = s;
            }
            cur = next;
        }
        cur
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::Jet1;

    fn constant_metric(m: &[&[f64]]) -> MetricJet {
        let n = m.len();
        m.iter().map(|row| row.iter().map(|&v| MJet2::constant(v, n)).collect()).collect()
    }

    #[test]
    fn flat_eta() {
        let z = [0.0; 5];
        let mut rows = [z; 5];
        rows[0][4] = 1.0;
        rows[4][0] = 1.0;
        rows[1][3] = -1.0;
        rows[3][1] = -1.0;
        rows[2][2] = 4.0 / 3.0;
        let refs: Vec<&[f64]> = rows.iter().map(|r| &r[..]).collect();
        let r = curvature(&constant_metric(&refs)).unwrap();
        assert_eq!(r.max_abs_weyl, 0.0);
        assert_eq!(r.max_abs_ricci, 0.0);
        assert_eq!(r.scalar, 0.0);
    }

    /// `S^2(a) x S^2(b)` in coordinates `(θ1, φ1, θ2, φ2)`.
    fn two_spheres(a: f64, b: f64, th1: f64, th2: f64) -> MetricJet {
        let n = 4;
        let sin2 = |th: f64, idx: usize, r: f64| {
            let c = Jet1::from_derivs(th, &[th.sin().powi(2), (2.0 * th).sin(), 2.0 * (2.0 * th).cos()]);
            MJet2::from_jet1(&c, idx, n).scale(r * r)
        };
        let mut g = vec![vec![MJet2::constant(0.0, n); n]; n];
        g[0][0] = MJet2::constant(a * a, n);
        g[1][1] = sin2(th1, 0, a);
        g[2][2] = MJet2::constant(b * b, n);
        g[3][3] = sin2(th2, 2, b);
        g
    }

    #[test]
    fn product_of_spheres_matches_closed_form() {
        let (a, b) = (1.3, 0.7);
        let r = curvature(&two_spheres(a, b, 0.9, 1.2)).unwrap();
        // Ricci of a round sphere of radius a is g/a^2; scalar 2/a^2 + 2/b^2
        assert!((r.scalar - (2.0 / (a * a) + 2.0 / (b * b))).abs() < 1e-8);
        assert!((r.ricci_at(0, 0) - 1.0).abs() < 1e-8);
        assert!((r.ricci_at(3, 3) - 1.2f64.sin().powi(2)).abs() < 1e-8);
        assert!((r.riemann_at(0, 1, 0, 1) - a * a * 0.9f64.sin().powi(2)).abs() < 1e-8);
        assert!(r.symmetry_residual() < 1e-12);
        assert!(r.weyl_trace_residual() < 1e-12);
        // a product of spheres with unequal radii is not conformally flat
        assert!(r.weyl_ratio() > 1e-2);
    }

    #[test]
    fn singular_metric() {
        let g = constant_metric(&[&[1.0, 1.0], &[1.0, 1.0]]);
        assert_eq!(curvature(&g), Err(Error::SingularMetricError));
    }
}
