//! Gauss–Legendre quadrature on the reference interval [-1, 1].

use std::f64::consts::PI;

/// Gauss–Legendre rule, exact for polynomials of degree <= 2n - 1.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    /// Nodes are the roots of the degree-n Legendre polynomial, found by
    /// Newton iteration from the Chebyshev initial guess.
    pub fn gauss_legendre(n: usize) -> Self {
        assert!(n >= 1, "quadrature needs at least one point");
        let mut points = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_with_deriv(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let (_, dp) = legendre_with_deriv(n, x);
            points[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        // Newton from the cosine guess yields descending nodes.
        points.reverse();
        weights.reverse();
        Self { points, weights }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integrate `f` over [-1, 1].
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Integrate `f` over the physical interval [a, b].
    pub fn integrate_on(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        half * self.integrate(|xi| f(mid + half * xi))
    }
}

/// (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre_with_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    // P_n'(x) = n (x P_n - P_{n-1}) / (x^2 - 1); at the endpoints fall back to
    // the closed form n(n+1)/2.
    let dp = if (x * x - 1.0).abs() < 1e-14 {
        let s = if x > 0.0 { 1.0 } else { (-1.0f64).powi(n as i32 + 1) };
        s * (n * (n + 1)) as f64 / 2.0
    } else {
        (n as f64) * (x * p1 - p0) / (x * x - 1.0)
    };
    (p1, dp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomials_integrate_exactly_up_to_degree_2n_minus_1() {
        for n in 1..=16 {
            let rule = QuadratureRule::gauss_legendre(n);
            for k in 0..=(2 * n - 1) {
                let got = rule.integrate(|x| x.powi(k as i32));
                let expect = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
                assert!(
                    (got - expect).abs() < 1e-13,
                    "n={n} k={k}: {got} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn weights_sum_to_interval_length() {
        for n in 1..=12 {
            let rule = QuadratureRule::gauss_legendre(n);
            let total: f64 = rule.weights().iter().sum();
            assert!((total - 2.0).abs() < 1e-13);
        }
    }

    #[test]
    fn physical_interval_mapping() {
        let rule = QuadratureRule::gauss_legendre(4);
        let got = rule.integrate_on(0.0, 2.0, |x| x * x * x);
        assert!((got - 4.0).abs() < 1e-12);
    }
}
