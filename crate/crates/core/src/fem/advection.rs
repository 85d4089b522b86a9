//! Upwind DG discretization of 1D linear advection, steady and unsteady.

use super::basis::{legendre_all, stiffness_matrix};
use super::solution::DATA_QUAD_EXTRA;
use super::linalg::BandMatrix;
use super::quadrature::QuadratureRule;
use super::solution::DGSolution;
use super::{AdvectionProblem, FemError};
use crate::mesh::TreeMesh1D;

/// Carpenter–Kennedy five-stage fourth-order low-storage coefficients.
const LSERK_A: [f64; 5] = [
    0.0,
    -567_301_805_773.0 / 1_357_537_059_087.0,
    -2_404_267_990_393.0 / 2_016_746_695_238.0,
    -3_550_918_686_646.0 / 2_091_501_179_385.0,
    -1_275_806_237_668.0 / 842_570_457_699.0,
];
const LSERK_B: [f64; 5] = [
    1_432_997_174_477.0 / 9_575_080_441_755.0,
    5_161_836_677_717.0 / 13_612_068_292_357.0,
    1_720_146_321_549.0 / 2_090_206_949_498.0,
    3_134_564_353_537.0 / 4_481_467_310_338.0,
    2_277_821_191_437.0 / 14_882_151_754_819.0,
];
const LSERK_C: [f64; 5] = [
    0.0,
    1_432_997_174_477.0 / 9_575_080_441_755.0,
    2_526_269_341_429.0 / 6_820_363_962_896.0,
    2_006_345_519_317.0 / 3_224_310_063_776.0,
    2_802_321_613_138.0 / 2_924_317_926_251.0,
];

/// Largest stable step for an explicit upwind-DG update:
/// `h_min / (|c| (2 p + 1))`.
pub fn straight_stable_dt(mesh_min_width: f64, speed: f64, p_order: usize) -> f64 {
    mesh_min_width / (speed.abs() * (2 * p_order + 1) as f64)
}

/// Moment vector of the forcing on one cell. Manufactured forcings are not
/// polynomials, so the data term gets a finer rule than the (exactly
/// integrated) operator terms; otherwise quadrature noise in the right-hand
/// side breaks the monotone error decrease under refinement.
fn forcing_moments(
    problem: &AdvectionProblem,
    cell: (f64, f64),
    t: f64,
    p: usize,
    quad: &QuadratureRule,
) -> Vec<f64> {
    let (a, b) = cell;
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut out = vec![0.0; p + 1];
    for (&xi, &w) in quad.points().iter().zip(quad.weights()) {
        let fx = (problem.forcing)(mid + half * xi, t);
        let phis = legendre_all(p, xi);
        for (k, phi) in phis.iter().enumerate() {
            out[k] += half * w * fx * phi;
        }
    }
    out
}

/// Solve the steady weak form `-(w', c u) + upwind face terms = (w, f)` with
/// inflow data imposed weakly, via a banded direct factorization.
pub fn solve_steady_advection(
    problem: &AdvectionProblem,
    mesh: &TreeMesh1D,
    p_order: usize,
) -> Result<DGSolution, FemError> {
    assert!(p_order >= 1, "polynomial order must be at least 1");
    let cells = mesh.active_intervals();
    let n = cells.len();
    let nb = p_order + 1;
    let c = problem.speed;
    let quad = QuadratureRule::gauss_legendre(nb + DATA_QUAD_EXTRA);
    let stiff = stiffness_matrix(p_order);
    let g_in = (problem.inflow)(0.0);

    let phi_r = legendre_all(p_order, 1.0);
    let phi_l = legendre_all(p_order, -1.0);

    // Each cell block couples to at most one neighbor block.
    let mut mat = BandMatrix::zeros(n * nb, 2 * nb - 1, 2 * nb - 1);
    let mut rhs = vec![0.0; n * nb];

    for (e, &cell) in cells.iter().enumerate() {
        let row0 = e * nb;
        for i in 0..nb {
            for j in 0..nb {
                // Volume term: -c int P_i' P_j (Jacobians cancel in 1D).
                mat.add(row0 + i, row0 + j, -c * stiff[i][j]);
            }
        }
        if c >= 0.0 {
            // Upwind trace at the right face is the cell's own; at the left
            // face it comes from the left neighbor (or the inflow datum).
            for i in 0..nb {
                for j in 0..nb {
                    mat.add(row0 + i, row0 + j, c * phi_r[i] * phi_r[j]);
                }
            }
            if e > 0 {
                let nbr0 = (e - 1) * nb;
                for i in 0..nb {
                    for j in 0..nb {
                        mat.add(row0 + i, nbr0 + j, -c * phi_l[i] * phi_r[j]);
                    }
                }
            } else {
                for i in 0..nb {
                    rhs[row0 + i] += c * phi_l[i] * g_in;
                }
            }
        } else {
            for i in 0..nb {
                for j in 0..nb {
                    mat.add(row0 + i, row0 + j, -c * phi_l[i] * phi_l[j]);
                }
            }
            if e + 1 < n {
                let nbr0 = (e + 1) * nb;
                for i in 0..nb {
                    for j in 0..nb {
                        mat.add(row0 + i, nbr0 + j, c * phi_r[i] * phi_l[j]);
                    }
                }
            } else {
                for i in 0..nb {
                    rhs[row0 + i] -= c * phi_r[i] * g_in;
                }
            }
        }
        let f_mom = forcing_moments(problem, cell, 0.0, p_order, &quad);
        for i in 0..nb {
            rhs[row0 + i] += f_mom[i];
        }
    }

    let lu = mat.factor()?;
    lu.solve(&mut rhs);
    if rhs.iter().any(|v| !v.is_finite()) {
        return Err(FemError::SingularSystem);
    }
    let coeffs = rhs.chunks(nb).map(|c| c.to_vec()).collect();
    Ok(DGSolution { cells, p_order, coeffs })
}

/// Semi-discrete right-hand side du/dt for the current state at time `t`.
fn advection_rhs(problem: &AdvectionProblem, u: &DGSolution, t: f64) -> Vec<Vec<f64>> {
    let p = u.p_order;
    let nb = p + 1;
    let n = u.n_cells();
    let c = problem.speed;
    let quad = QuadratureRule::gauss_legendre(nb);
    let stiff = stiffness_matrix(p);
    let phi_r = legendre_all(p, 1.0);
    let phi_l = legendre_all(p, -1.0);
    let g_in = (problem.inflow)(t);

    // Upwind single-valued trace at every interface, including the domain
    // boundaries (inflow uses the boundary datum, outflow the interior trace).
    let mut star = vec![0.0; n + 1];
    for i in 0..=n {
        star[i] = if c >= 0.0 {
            if i == 0 { g_in } else { u.trace_right(i - 1) }
        } else if i == n {
            g_in
        } else {
            u.trace_left(i)
        };
    }

    let mut out = vec![vec![0.0; nb]; n];
    for e in 0..n {
        let (a, b) = u.cells[e];
        let h = b - a;
        let mut r = forcing_moments(problem, (a, b), t, p, &quad);
        for (i, ri) in r.iter_mut().enumerate() {
            let mut vol = 0.0;
            for j in 0..nb {
                vol += stiff[i][j] * u.coeffs[e][j];
            }
            *ri += c * vol;
            *ri -= c * (star[e + 1] * phi_r[i] - star[e] * phi_l[i]);
        }
        // Diagonal modal mass matrix: M_kk = (h/2) * 2/(2k+1).
        for (k, rk) in r.iter_mut().enumerate() {
            *rk *= (2.0 * k as f64 + 1.0) / h;
        }
        out[e] = r;
    }
    out
}

/// One Carpenter–Kennedy low-storage step of the semi-discrete system.
///
/// The step size is validated against the explicit stability bound for the
/// finest cell before any work happens.
pub fn step_unsteady_advection(
    problem: &AdvectionProblem,
    u: &DGSolution,
    t: f64,
    dt: f64,
) -> Result<DGSolution, FemError> {
    assert!(dt > 0.0, "time step must be positive");
    let h_min = u
        .cells
        .iter()
        .map(|&(a, b)| b - a)
        .fold(f64::INFINITY, f64::min);
    if dt > straight_stable_dt(h_min, problem.speed, u.p_order) {
        return Err(FemError::UnstableStep);
    }
    let mut next = u.clone();
    let mut reg = vec![vec![0.0; u.p_order + 1]; u.n_cells()];
    for stage in 0..5 {
        let rhs = advection_rhs(problem, &next, t + LSERK_C[stage] * dt);
        for e in 0..next.n_cells() {
            for k in 0..=u.p_order {
                reg[e][k] = LSERK_A[stage] * reg[e][k] + dt * rhs[e][k];
                next.coeffs[e][k] += LSERK_B[stage] * reg[e][k];
            }
        }
    }
    if next
        .coeffs
        .iter()
        .any(|cell| cell.iter().any(|v| !v.is_finite()))
    {
        return Err(FemError::UnstableStep);
    }
    Ok(next)
}
