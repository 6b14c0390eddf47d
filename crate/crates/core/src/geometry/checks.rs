use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{coframe_f, coframe_h, curvature, metric_at, Coframe, CurvatureReport, MetricJet};
use crate::chazy::{reduce_f_to_i, residual_ds6};
use crate::dist::{sample_params, Params, Picture, SolutionSpec};
use crate::error::{Error, Result};
use crate::jets::{rat, Jet1, MJet2};
use crate::par::{self, Mode};
use crate::specialfn::{closed_form_solution, hypergeom_pair, ClosedFormFamily, ClosedFormId, HyperTriple};

/// A case evaluated at one sample point: the function jet and its coframe.
#[derive(Clone, Debug)]
pub struct CaseFrame {
    pub param: f64,
    pub jet: Jet1,
    pub xyzp: [f64; 4],
    pub coframe: Coframe,
}

impl CaseFrame {
    pub fn new(spec: &SolutionSpec, param: f64, xyzp: [f64; 4]) -> Result<Self> {
        let jet = spec.jet(param, 8)?.jet;
        let coframe = match spec.picture {
            Picture::FOfQ => coframe_f(&jet, xyzp)?,
            Picture::HOfT => coframe_h(&jet, xyzp)?,
        };
        Ok(Self { param, jet, xyzp, coframe })
    }

    pub fn metric(&self) -> Result<MetricJet> {
        metric_at(&self.coframe)
    }

    pub fn curvature(&self) -> Result<CurvatureReport> {
        curvature(&self.metric()?)
    }
}

/// `n` parameter values with `(x, y, z, p)` drawn from `[-1, 1]`, deterministic in `seed`.
pub fn sample_points(spec: &SolutionSpec, n: usize, seed: u64) -> Result<Vec<(f64, [f64; 4])>> {
    let params = sample_params(spec, n, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x9e3779b97f4a7c15));
    Ok(params.into_iter().map(|p| (p, [0; 4].map(|_: i32| rng.gen_range(-1.0..=1.0)))).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlatnessPoint {
    pub index: usize,
    pub param: f64,
    /// `q0` or `t0`.
    pub base: f64,
    pub weyl_ratio: f64,
    pub pass: bool,
}

/// `maxAbsWeyl / metricScale` at each point, passing when below `tol`.
pub fn flatness_suite(spec: &SolutionSpec, points: &[(f64, [f64; 4])], tol: f64) -> Result<Vec<FlatnessPoint>> {
    flatness_suite_with(Mode::default(), spec, points, tol)
}

/// `flatness_suite` with an explicit execution mode.
pub fn flatness_suite_with(
    mode: Mode,
    spec: &SolutionSpec,
    points: &[(f64, [f64; 4])],
    tol: f64,
) -> Result<Vec<FlatnessPoint>> {
    let indexed: Vec<_> = points.iter().copied().enumerate().collect();
    par::map(mode, &indexed, |&(index, (param, xyzp))| {
        let cf = CaseFrame::new(spec, param, xyzp)?;
        let r = cf.curvature()?;
        let weyl_ratio = r.weyl_ratio();
        Ok(FlatnessPoint { index, param, base: cf.jet.basepoint(), weyl_ratio, pass: weyl_ratio < tol })
    })
    .into_iter()
    .collect()
}

/// `(6I' - I²)` and the natural size `6|I'| + I²` of its terms.
fn ricci_factor(f: &Jet1) -> Result<(Jet1, f64)> {
    let (i, _) = reduce_f_to_i(f)?;
    let ip = i.derivative();
    let n = ip.order();
    let i = i.truncate(n);
    let v = ip.scale(6.0) - &i * &i;
    let size = 6.0 * ip.value().abs() + i.value() * i.value();
    Ok((v, size))
}

/// Largest deviation of `Ric` from `(9/120)(6I' - I²) dq²`, relative to the size of that term.
pub fn ricci_identity_check(f: &Jet1, xyzp: [f64; 4]) -> Result<f64> {
    let r = curvature(&metric_at(&coframe_f(f, xyzp)?)?)?;
    let (v, size) = ricci_factor(f)?;
    let expect = 9.0 / 120.0 * v.value();
    let denom = if size > 0.0 { 9.0 / 120.0 * size } else { 1.0 };
    Ok(qq_mismatch(&r, expect) / denom)
}

/// `max_ab |R_ab - expect δ_a4 δ_b4|`.
fn qq_mismatch(r: &CurvatureReport, expect: f64) -> f64 {
    let n = r.dim;
    let mut worst = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            let e = if a == 4 && b == 4 { expect } else { 0.0 };
            worst = worst.max((r.ricci_at(a, b) - e).abs());
        }
    }
    worst
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RescaleReport {
    /// `R_qq` of `ν^{-2} g`.
    pub ricci_qq: f64,
    /// `(3/(40ν))(40ν'' + (6I' - I²)ν)`.
    pub predicted: f64,
    /// Largest deviation over all components, relative to the natural size.
    pub mismatch: f64,
    /// Largest `|R_ab|` of the rescaled metric relative to the size of the prediction.
    pub max_ricci: f64,
}

/// Ricci of `ĝ = ν(q)^{-2} g` against the rescaling formula.
pub fn conformal_rescale_check(f: &Jet1, nu: &Jet1, xyzp: [f64; 4]) -> Result<RescaleReport> {
    if nu.value() == 0.0 {
        return Err(Error::DomainError("ν = 0".into()));
    }
    if (nu.basepoint() - f.basepoint()).abs() > 1e-12 * (1.0 + f.basepoint().abs()) {
        return Err(Error::BasepointMismatch { expected: f.basepoint().to_string(), got: nu.basepoint().to_string() });
    }
    let g = metric_at(&coframe_f(f, xyzp)?)?;
    let w = MJet2::from_jet1(&nu.pow_rational(rat(-2, 1))?, 4, 5);
    let gh: MetricJet = g.iter().map(|row| row.iter().map(|x| x * &w).collect()).collect();
    let r = curvature(&gh)?;
    let (v, size) = ricci_factor(f)?;
    let n0 = nu.value();
    let predicted = 3.0 / (40.0 * n0) * (40.0 * nu.deriv(2) + v.value() * n0);
    let scale = 3.0 / (40.0 * n0.abs()) * (40.0 * nu.deriv(2).abs() + size * n0.abs());
    let scale = scale.max(f64::MIN_POSITIVE);
    Ok(RescaleReport {
        ricci_qq: r.ricci_at(4, 4),
        predicted,
        mismatch: qq_mismatch(&r, predicted) / scale,
        max_ricci: r.max_abs_ricci / scale,
    })
}

/// Largest difference of `C^a_bcd` between `g` and `ν^{-2} g`, relative to the larger of
/// the two Weyl tensors (or to `1` when both vanish).
pub fn weyl_conformal_invariance(g: &MetricJet, nu: &MJet2) -> Result<f64> {
    let w = nu.recip()?;
    let w = &w * &w;
    let gh: MetricJet = g.iter().map(|row| row.iter().map(|x| x * &w).collect()).collect();
    let a = curvature(g)?.weyl_raised();
    let b = curvature(&gh)?.weyl_raised();
    let scale = a.iter().chain(&b).fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
    Ok(a.iter().zip(&b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / scale)
}

/// The dual-picture Weyl tensor against the sixth-order residual.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualWeylReport {
    /// `C(e2,e5,e2,e5)` at each point.
    pub component: Vec<f64>,
    /// `100 H''^8 C(e2,e5,e2,e5) / ds6` at each point (`NaN` where the residual vanishes).
    pub ratio: Vec<f64>,
    /// `|100 H''^8 C(e2,e5,e2,e5) - ds6|` relative to the size of the residual terms.
    pub mismatch: f64,
    /// Largest frame component not related to `(2,5,2,5)` by the Riemann symmetries,
    /// relative to the largest frame component.
    pub max_other: f64,
    /// Spread `max|ratio_i / ratio_0 - 1|` over the points with nonzero residual.
    pub ratio_spread: f64,
}

/// Evaluates the single surviving Weyl frame component of the dual metric for each `H`.
pub fn weyl_equals_residual_check(hs: &[Jet1], xyzp: [f64; 4]) -> Result<DualWeylReport> {
    let mut component = Vec::new();
    let mut ratio = Vec::new();
    let mut mismatch = 0.0f64;
    let mut max_other = 0.0f64;
    for h in hs {
        let cf = coframe_h(h, xyzp)?;
        let r = curvature(&metric_at(&cf)?)?;
        let e = cf.frame()?;
        let fc = r.weyl_in_frame(&e);
        let n = r.dim;
        let idx = |a: usize, b: usize, c: usize, d: usize| ((a * n + b) * n + c) * n + d;
        let c = fc[idx(1, 4, 1, 4)];
        let big = fc.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let tied = [idx(1, 4, 1, 4), idx(4, 1, 1, 4), idx(1, 4, 4, 1), idx(4, 1, 4, 1)];
        if big > 0.0 {
            let other =
                fc.iter().enumerate().filter(|(k, _)| !tied.contains(k)).fold(0.0f64, |m, (_, x)| m.max(x.abs()));
            max_other = max_other.max(other / big);
        }
        let res = residual_ds6(h);
        let lhs = 100.0 * h.deriv(2).powi(8) * c;
        mismatch = mismatch.max((lhs - res.raw).abs() / res.scale);
        component.push(c);
        ratio.push(if res.raw != 0.0 { lhs / res.raw } else { f64::NAN });
    }
    let finite: Vec<f64> = ratio.iter().copied().filter(|x| x.is_finite()).collect();
    let ratio_spread = match finite.first() {
        Some(&r0) => finite.iter().fold(0.0f64, |m, r| m.max((r / r0 - 1.0).abs())),
        None => 0.0,
    };
    Ok(DualWeylReport { component, ratio, mismatch, max_other, ratio_spread })
}

/// Compares the `w`-parametrised dual coframe coefficients with the `H`-jet ones at `s0`.
///
/// `t = w2/w1`, `H'' = w1^4`; checked are the `ω2`, `ω3` coefficients of `θ³` and the
/// `(tω2 - ω3)` coefficient of `θ⁴`.
pub fn dual_frame_s_mismatch(triple: HyperTriple, constants: [f64; 4], s0: f64, h: &Jet1) -> Result<f64> {
    let (a, b) = hypergeom_pair(triple, s0, 4)?;
    let [c1, c2, c3, c4] = constants;
    let w1 = a.scale(c1) + b.scale(c2);
    let w2 = a.scale(c3) + b.scale(c4);
    let (v1, d1, dd1) = (w1.value(), w1.deriv(1), w1.deriv(2));
    let (v2, d2, dd2) = (w2.value(), w2.deriv(1), w2.deriv(2));
    let w = v1 * d2 - v2 * d1;
    if w == 0.0 {
        return Err(Error::ZeroWronskianError);
    }
    let s_path = [1.0 + v2 * d1 / w, -v1 * d1 / w, 2.0 * (dd1 * d2 - dd2 * d1) / (5.0 * w.powi(3))];
    let t = h.basepoint();
    let (h2, h3, h4) = (h.deriv(2), h.deriv(3), h.deriv(4));
    let h_path = [1.0 + t * h3 / (4.0 * h2), -h3 / (4.0 * h2), (4.0 * h2 * h4 - 5.0 * h3 * h3) / (40.0 * h2.powi(3))];
    Ok(s_path.iter().zip(&h_path).fold(0.0f64, |m, (x, y)| m.max((x - y).abs() / x.abs().max(y.abs()).max(1.0))))
}

/// `(q(r), F(q))` of the elementary example at `r0`.
fn elementary_chart(c1: f64, c2: f64, r0: f64) -> Result<(Jet1, Jet1)> {
    let spec = SolutionSpec { params: Params::ElementaryR { c1, c2 }, ..crate::dist::find("F-elementary-r")? };
    let f = spec.jet(r0, 8)?.jet;
    let id = ClosedFormId::with_constants(ClosedFormFamily::ElementaryR, [c1, 0.0, 0.0, c2]);
    let (z1, z2) = closed_form_solution(&id, r0, 8)?;
    Ok((z2.checked_div(&z1)?, f))
}

/// `q(r) = z2/z1` of the elementary example, for converting `q`-chart tensors to `r`.
pub fn elementary_q(c1: f64, c2: f64, r0: f64) -> Result<Jet1> {
    Ok(elementary_chart(c1, c2, r0)?.0)
}

/// Relative error of `R_rr = 6/(r²-1)` (and of all other components vanishing)
/// for the elementary example, converting `R_qq` with `q'(r)²`.
pub fn elementary_ricci_check(c1: f64, c2: f64, r0: f64, xyzp: [f64; 4]) -> Result<f64> {
    let (q, f) = elementary_chart(c1, c2, r0)?;
    let r = curvature(&metric_at(&coframe_f(&f, xyzp)?)?)?;
    let expect = 6.0 / (r0 * r0 - 1.0);
    let dq = q.deriv(1);
    Ok(qq_mismatch(&r, expect / (dq * dq)) * dq * dq / expect.abs())
}

/// Ricci of the elementary metric rescaled by `Ω = 1/ν = (4/3)(3r+1)(r-1)^{1/3}/(a1(r-1)^{1/3} - a2(r+1)^{1/3})`.
pub fn elementary_rescale_check(c1: f64, c2: f64, a1: f64, a2: f64, r0: f64, xyzp: [f64; 4]) -> Result<RescaleReport> {
    let (q, f) = elementary_chart(c1, c2, r0)?;
    let r = Jet1::variable(r0, 8);
    let m = r.add_scalar(-1.0).pow_rational(rat(1, 3))?;
    let p = r.add_scalar(1.0).pow_rational(rat(1, 3))?;
    let omega =
        (r.scale(3.0).add_scalar(1.0) * m.clone()).scale(4.0 / 3.0).checked_div(&(m.scale(a1) - p.scale(a2)))?;
    let nu = Jet1::compose(&omega.recip()?, &q.invert()?)?;
    conformal_rescale_check(&f, &nu, xyzp)
}
