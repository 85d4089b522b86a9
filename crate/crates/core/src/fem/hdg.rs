//! Hybridizable DG solver for the 1D Poisson problem.
//!
//! Element-local solvers eliminate the mixed pair (q, u) in favor of the
//! interface traces; the condensed global system over the trace points is
//! tridiagonal and solved directly. The Dirichlet value is imposed strongly
//! on the trace at the left endpoint, the flux datum enters the transmission
//! condition at the right endpoint.

use super::basis::{legendre_all, mode_norm_sq, stiffness_matrix};
use super::linalg::{BandMatrix, DenseMatrix};
use super::quadrature::QuadratureRule;
use super::solution::{DGSolution, DofCount, DATA_QUAD_EXTRA};
use super::{FemError, PoissonProblem};
use crate::mesh::TreeMesh1D;

/// Primal solution plus the mixed flux and trace unknowns.
#[derive(Debug, Clone)]
pub struct HdgSolution {
    pub u: DGSolution,
    /// Mixed flux `q = -kappa u'`, element-local modal expansion.
    pub flux: DGSolution,
    /// Trace values at the `n + 1` interface points, left to right.
    pub traces: Vec<f64>,
}

impl HdgSolution {
    pub fn dof_count(&self) -> DofCount {
        DofCount {
            element: self.u.n_cells() * (self.u.p_order + 1),
            trace: Some(self.traces.len()),
        }
    }
}

struct LocalSolve {
    /// Element state for unit trace data and for the forcing: [q; u].
    from_forcing: Vec<f64>,
    from_left_trace: Vec<f64>,
    from_right_trace: Vec<f64>,
}

impl LocalSolve {
    /// q(x_R) + tau u(x_R) of a local state; the right-face transmission term.
    fn right_face(&self, state: &[f64], phi_r: &[f64], tau: f64, nb: usize) -> f64 {
        (0..nb).map(|j| phi_r[j] * (state[j] + tau * state[nb + j])).sum()
    }

    /// -q(x_L) + tau u(x_L) of a local state; the left-face transmission term.
    fn left_face(&self, state: &[f64], phi_l: &[f64], tau: f64, nb: usize) -> f64 {
        (0..nb).map(|j| phi_l[j] * (-state[j] + tau * state[nb + j])).sum()
    }
}

pub fn solve_poisson_hdg(
    problem: &PoissonProblem,
    mesh: &TreeMesh1D,
    p_order: usize,
) -> Result<HdgSolution, FemError> {
    assert!(p_order >= 1, "polynomial order must be at least 1");
    assert!(problem.stabilization > 0.0, "stabilization must be positive");
    let cells = mesh.active_intervals();
    let n = cells.len();
    let nb = p_order + 1;
    let m = 2 * nb;
    let kappa = problem.diffusivity;
    let tau = problem.stabilization;
    // Operator terms are polynomial and exact at nb points; the forcing
    // moment needs the finer data rule.
    let quad = QuadratureRule::gauss_legendre(nb + DATA_QUAD_EXTRA);
    let stiff = stiffness_matrix(p_order);
    let phi_r = legendre_all(p_order, 1.0);
    let phi_l = legendre_all(p_order, -1.0);

    // Element-local condensation: [q; u] = X_f + X_L u^_L + X_R u^_R.
    let mut locals = Vec::with_capacity(n);
    for &(a, b) in &cells {
        let h = b - a;
        let mut mat = DenseMatrix::zeros(m);
        // (v, q / kappa) - (v', u) + <v n, u^> = 0
        for i in 0..nb {
            mat.set(i, i, 0.5 * h * mode_norm_sq(i) / kappa);
            for j in 0..nb {
                mat.add(i, nb + j, -stiff[i][j]);
            }
        }
        // (w, q') + <w, tau (u - u^)> = (w, f)
        for i in 0..nb {
            for j in 0..nb {
                mat.add(nb + i, j, stiff[j][i]);
                mat.add(nb + i, nb + j, tau * (phi_r[i] * phi_r[j] + phi_l[i] * phi_l[j]));
            }
        }
        let lu = mat.factor()?;

        let half = 0.5 * h;
        let mid = 0.5 * (a + b);
        let mut from_forcing = vec![0.0; m];
        for (&xi, &w) in quad.points().iter().zip(quad.weights()) {
            let fx = (problem.forcing)(mid + half * xi);
            let phis = legendre_all(p_order, xi);
            for (k, phi) in phis.iter().enumerate() {
                from_forcing[nb + k] += half * w * fx * phi;
            }
        }
        lu.solve(&mut from_forcing);

        let mut from_left_trace = vec![0.0; m];
        for i in 0..nb {
            from_left_trace[i] = phi_l[i];
            from_left_trace[nb + i] = tau * phi_l[i];
        }
        lu.solve(&mut from_left_trace);

        let mut from_right_trace = vec![0.0; m];
        for i in 0..nb {
            from_right_trace[i] = -phi_r[i];
            from_right_trace[nb + i] = tau * phi_r[i];
        }
        lu.solve(&mut from_right_trace);

        locals.push(LocalSolve { from_forcing, from_left_trace, from_right_trace });
    }

    // Condensed tridiagonal system over the n + 1 trace points.
    let nt = n + 1;
    let mut global = BandMatrix::zeros(nt, 1, 1);
    let mut rhs = vec![0.0; nt];

    // Strong Dirichlet trace at the left domain endpoint.
    global.set(0, 0, 1.0);
    rhs[0] = problem.dirichlet;

    for face in 1..n {
        let left = &locals[face - 1];
        let right = &locals[face];
        let c_prev = left.right_face(&left.from_left_trace, &phi_r, tau, nb);
        let c_self = left.right_face(&left.from_right_trace, &phi_r, tau, nb)
            + right.left_face(&right.from_left_trace, &phi_l, tau, nb)
            - 2.0 * tau;
        let c_next = right.left_face(&right.from_right_trace, &phi_l, tau, nb);
        global.set(face, face - 1, c_prev);
        global.set(face, face, c_self);
        global.set(face, face + 1, c_next);
        rhs[face] = -left.right_face(&left.from_forcing, &phi_r, tau, nb)
            - right.left_face(&right.from_forcing, &phi_l, tau, nb);
    }

    // Prescribed outward flux at the right endpoint enters the transmission
    // condition of the last element.
    let last = &locals[n - 1];
    global.set(n, n - 1, last.right_face(&last.from_left_trace, &phi_r, tau, nb));
    global.set(
        n,
        n,
        last.right_face(&last.from_right_trace, &phi_r, tau, nb) - tau,
    );
    rhs[n] = problem.neumann_flux - last.right_face(&last.from_forcing, &phi_r, tau, nb);

    let lu = global.factor()?;
    lu.solve(&mut rhs);
    if rhs.iter().any(|v| !v.is_finite()) {
        return Err(FemError::SingularSystem);
    }
    let traces = rhs;

    let mut u_coeffs = Vec::with_capacity(n);
    let mut q_coeffs = Vec::with_capacity(n);
    for (e, local) in locals.iter().enumerate() {
        let (ul, ur) = (traces[e], traces[e + 1]);
        let state: Vec<f64> = (0..m)
            .map(|k| {
                local.from_forcing[k]
                    + ul * local.from_left_trace[k]
                    + ur * local.from_right_trace[k]
            })
            .collect();
        q_coeffs.push(state[..nb].to_vec());
        u_coeffs.push(state[nb..].to_vec());
    }

    Ok(HdgSolution {
        u: DGSolution { cells: cells.clone(), p_order, coeffs: u_coeffs },
        flux: DGSolution { cells, p_order, coeffs: q_coeffs },
        traces,
    })
}
