//! Modal Legendre basis on the reference interval [-1, 1].
//!
//! Modal coefficients make the element mass matrix diagonal and parent/child
//! re-expansion exact, which keeps inter-mesh transfer and projection
//! closed-form.

use super::quadrature::QuadratureRule;

/// P_0..P_p at `xi`.
pub fn legendre_all(p: usize, xi: f64) -> Vec<f64> {
    let mut vals = Vec::with_capacity(p + 1);
    vals.push(1.0);
    if p >= 1 {
        vals.push(xi);
    }
    for k in 1..p {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * xi * vals[k] - kf * vals[k - 1]) / (kf + 1.0);
        vals.push(next);
    }
    vals
}

/// P_0'..P_p' at `xi`, via P_n' = P_{n-2}' + (2n - 1) P_{n-1}.
pub fn legendre_deriv_all(p: usize, xi: f64) -> Vec<f64> {
    let vals = legendre_all(p, xi);
    let mut derivs = Vec::with_capacity(p + 1);
    derivs.push(0.0);
    if p >= 1 {
        derivs.push(1.0);
    }
    for k in 2..=p {
        let d = derivs[k - 2] + (2.0 * k as f64 - 1.0) * vals[k - 1];
        derivs.push(d);
    }
    derivs
}

/// Modal expansion value at reference coordinate `xi`.
pub fn eval_modal(coeffs: &[f64], xi: f64) -> f64 {
    let p = coeffs.len() - 1;
    legendre_all(p, xi)
        .iter()
        .zip(coeffs)
        .map(|(phi, c)| phi * c)
        .sum()
}

/// Reference-coordinate derivative of the modal expansion at `xi`.
/// Multiply by `2 / h` for the physical derivative.
pub fn eval_modal_deriv(coeffs: &[f64], xi: f64) -> f64 {
    let p = coeffs.len() - 1;
    legendre_deriv_all(p, xi)
        .iter()
        .zip(coeffs)
        .map(|(dphi, c)| dphi * c)
        .sum()
}

/// ||P_k||^2 on [-1, 1].
#[inline]
pub fn mode_norm_sq(k: usize) -> f64 {
    2.0 / (2.0 * k as f64 + 1.0)
}

/// L2 projection of `f` (physical coordinates) onto degree `p` modes over
/// [a, b], using the supplied quadrature rule.
pub fn project_function(
    f: &mut impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    p: usize,
    quad: &QuadratureRule,
) -> Vec<f64> {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut coeffs = vec![0.0; p + 1];
    for (&xi, &w) in quad.points().iter().zip(quad.weights()) {
        let fx = f(mid + half * xi);
        let phis = legendre_all(p, xi);
        for (k, phi) in phis.iter().enumerate() {
            coeffs[k] += w * fx * phi;
        }
    }
    for (k, c) in coeffs.iter_mut().enumerate() {
        // The h/2 Jacobian cancels against the one in ||P_k||^2 on [a, b].
        *c /= mode_norm_sq(k);
    }
    coeffs
}

/// Stiffness-type matrix S_ij = int P_i' P_j dxi on [-1, 1].
pub fn stiffness_matrix(p: usize) -> Vec<Vec<f64>> {
    let quad = QuadratureRule::gauss_legendre(p + 1);
    let mut s = vec![vec![0.0; p + 1]; p + 1];
    for (&xi, &w) in quad.points().iter().zip(quad.weights()) {
        let phis = legendre_all(p, xi);
        let dphis = legendre_deriv_all(p, xi);
        for i in 0..=p {
            for j in 0..=p {
                s[i][j] += w * dphis[i] * phis[j];
            }
        }
    }
    s
}
