//! Finite-difference helpers.

/// Step for the second-order central difference: `∛ε · max(1, |x|)`.
pub fn central_step(x: f64) -> f64 {
    f64::EPSILON.cbrt() * x.abs().max(1.0)
}

/// Second-order central-difference gradient.
pub fn central_gradient<F>(f: F, x: &[f64]) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            let h = central_step(x[i]);
            probe[i] = x[i] + h;
            let up = f(&probe);
            probe[i] = x[i] - h;
            let down = f(&probe);
            probe[i] = x[i];
            (up - down) / (2.0 * h)
        })
        .collect()
}

// Antisymmetric weights of the 9-point first-derivative stencil at offsets 1..=4.
const STENCIL8: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];

/// Relative step used by [`stencil_gradient`].
pub const STENCIL_STEP: f64 = 1e-2;

/// Eighth-order central-difference gradient (9-point stencil, step
/// `STENCIL_STEP · max(1, |x|)`). Exact up to rounding for polynomials of degree ≤ 8.
pub fn stencil_gradient<F>(f: F, x: &[f64]) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            let h = STENCIL_STEP * x[i].abs().max(1.0);
            let mut acc = 0.0;
            for (k, w) in STENCIL8.iter().enumerate() {
                let off = (k + 1) as f64 * h;
                probe[i] = x[i] + off;
                let up = f(&probe);
                probe[i] = x[i] - off;
                let down = f(&probe);
                acc += w * (up - down);
            }
            probe[i] = x[i];
            acc / h
        })
        .collect()
}

/// Fourth-order derivative of uniformly sampled values: five-point central
/// stencil in the interior, one-sided five-point stencils at the two ends on each side.
/// Needs at least five samples.
pub fn sampled_derivative(values: &[f64], dt: f64) -> Option<Vec<f64>> {
    let n = values.len();
    if n < 5 {
        return None;
    }
    let v = values;
    let d = 12.0 * dt;
    let forward = |i: usize| {
        (-25.0 * v[i] + 48.0 * v[i + 1] - 36.0 * v[i + 2] + 16.0 * v[i + 3] - 3.0 * v[i + 4]) / d
    };
    let backward = |i: usize| {
        (25.0 * v[i] - 48.0 * v[i - 1] + 36.0 * v[i - 2] - 16.0 * v[i - 3] + 3.0 * v[i - 4]) / d
    };
    let out = (0..n)
        .map(|i| {
            if i < 2 {
                forward(i)
            } else if i + 2 >= n {
                backward(i)
            } else {
                (-v[i + 2] + 8.0 * v[i + 1] - 8.0 * v[i - 1] + v[i - 2]) / d
            }
        })
        .collect();
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn central_gradient_of_quadratic() {
        let g = central_gradient(|x| x[0] * x[0] + 3.0 * x[0] * x[1], &[2.0, -1.0]);
        assert!((g[0] - 1.0).abs() < 1e-9);
        assert!((g[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn stencil_is_exact_for_degree_eight() {
        let f = |x: &[f64]| x[0].powi(8) - 2.0 * x[0].powi(5) * x[1] + x[1].powi(3);
        let x = [1.3, -0.7];
        let g = stencil_gradient(f, &x);
        let exact0 = 8.0 * x[0].powi(7) - 10.0 * x[0].powi(4) * x[1];
        let exact1 = -2.0 * x[0].powi(5) + 3.0 * x[1].powi(2);
        assert!((g[0] - exact0).abs() < 1e-11 * exact0.abs().max(1.0));
        assert!((g[1] - exact1).abs() < 1e-11 * exact1.abs().max(1.0));
    }

    #[test]
    fn sampled_derivative_of_exponential() {
        let dt = 1e-2;
        let v: Vec<f64> = (0..50).map(|k| (-0.3 * k as f64 * dt).exp()).collect();
        let d = sampled_derivative(&v, dt).unwrap();
        for (k, dk) in d.iter().enumerate() {
            let exact = -0.3 * (-0.3 * k as f64 * dt).exp();
            assert!((dk - exact).abs() < 1e-10, "k={k}");
        }
        assert!(sampled_derivative(&v[..4], dt).is_none());
    }
}
