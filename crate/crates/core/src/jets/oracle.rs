use super::jet1::binomial;
use crate::error::{Error, Result};

/// Largest derivative order the oracle supports.
pub const ORACLE_MAX_ORDER: usize = 6;

/// Suggested initial step for [`derivative_oracle`]: `0.1 * max(|x0|, 1)`.
///
/// The stencil half-width is `order/2 * h`, so callers near a singularity
/// must pass a smaller step.
pub fn oracle_step(x0: f64) -> f64 {
    0.1 * x0.abs().max(1.0)
}

fn central_difference<F: Fn(f64) -> f64>(f: &F, x0: f64, order: usize, h: f64) -> Result<f64> {
    let half = order as f64 / 2.0;
    let mut acc = 0.0;
    for j in 0..=order {
        let x = x0 + (half - j as f64) * h;
        let fx = f(x);
        if !fx.is_finite() {
            return Err(Error::StencilEvaluationError(x));
        }
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * binomial(order, j) * fx;
    }
    Ok(acc / h.powi(order as i32))
}

/// Finite-difference estimate of `f^(order)(x0)`.
///
/// Symmetric stencil `Σ_j (-1)^j C(k,j) f(x0 + (k/2 - j)h) / h^k`, refined by
/// Richardson extrapolation in `h²` (Ridders' tableau, step ratio 1.4, up to
/// 12 columns). Only test code relies on this.
pub fn derivative_oracle<F: Fn(f64) -> f64>(f: F, x0: f64, order: usize, h: f64) -> Result<f64> {
    if order > ORACLE_MAX_ORDER {
        return Err(Error::OrderTooHigh(order));
    }
    if order == 0 {
        let v = f(x0);
        return if v.is_finite() { Ok(v) } else { Err(Error::StencilEvaluationError(x0)) };
    }
    const CON: f64 = 1.4;
    const CON2: f64 = CON * CON;
    const NTAB: usize = 12;
    let mut a = [[0.0f64; NTAB]; NTAB];
    let mut step = h;
    a[0][0] = central_difference(&f, x0, order, step)?;
    let mut best = a[0][0];
    let mut err = f64::INFINITY;
    for i in 1..NTAB {
        step /= CON;
        a[0][i] = central_difference(&f, x0, order, step)?;
        let mut fac = CON2;
        for j in 1..=i {
            a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1.0);
            fac *= CON2;
            let e = (a[j][i] - a[j - 1][i]).abs().max((a[j][i] - a[j - 1][i - 1]).abs());
            if e <= err {
                err = e;
                best = a[j][i];
            }
        }
        if (a[i][i] - a[i - 1][i - 1]).abs() >= 2.0 * err {
            break;
        }
    }
    Ok(best)
}
