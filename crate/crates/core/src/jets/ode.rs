use super::jet1::Jet1;
use super::scalar::Scalar;

/// Taylor jet of the solution of `y'' + p(x) y' + q(x) y = 0` at the common
/// basepoint of `p` and `q`, with `y = y0`, `y' = y1` there.
///
/// Coefficients are extended one order at a time from the recurrence
/// `(k+1)(k+2) y_{k+2} = -Σ_j [p_j (k-j+1) y_{k-j+1} + q_j y_{k-j}]`.
/// The result has order `min(p.order(), q.order()) + 2`, capped at the jet maximum.
pub fn solve_linear2<T: Scalar>(p: &Jet1<T>, q: &Jet1<T>, y0: T, y1: T) -> Jet1<T> {
    let n = (p.order().min(q.order()) + 2).min(super::MAX_ORDER);
    let mut y = vec![T::zero(); n + 1];
    y[0] = y0;
    if n >= 1 {
        y[1] = y1;
    }
    for k in 0..n.saturating_sub(1) {
        let mut acc = T::zero();
        for j in 0..=k {
            acc += p.coeff(j) * T::from_f64((k - j + 1) as f64) * y[k - j + 1];
            acc += q.coeff(j) * y[k - j];
        }
        y[k + 2] = -acc / T::from_f64(((k + 1) * (k + 2)) as f64);
    }
    Jet1::from_coeffs(p.basepoint(), y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator() {
        // y'' + y = 0, y(0)=0, y'(0)=1 -> sin
        let p = Jet1::zero(0.0, 6);
        let q = Jet1::constant(1.0, 0.0, 6);
        let y = solve_linear2(&p, &q, 0.0, 1.0);
        assert_eq!(y.order(), 8);
        let want = [0.0, 1.0, 0.0, -1.0 / 6.0, 0.0, 1.0 / 120.0, 0.0, -1.0 / 5040.0, 0.0];
        for (k, w) in want.iter().enumerate() {
            assert!((y.coeff(k) - w).abs() < 1e-15);
        }
    }

    #[test]
    fn euler_equation() {
        // x^2 y'' - 2y = 0 has y = x^2; in normal form q = -2/x^2
        let x = Jet1::variable(1.5, 6);
        let q = (&x * &x).recip().unwrap().scale(-2.0);
        let p = Jet1::zero(1.5, 6);
        let y = solve_linear2(&p, &q, 2.25, 3.0);
        let want = Jet1::variable(1.5, 8).powi(2);
        for k in 0..=8 {
            assert!((y.coeff(k) - want.coeff(k)).abs() < 1e-12, "k={k}");
        }
    }
}
