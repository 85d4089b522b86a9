//! Inter-mesh solution transfer and solution-change measurement.

use super::basis::{legendre_all, mode_norm_sq};
use super::quadrature::QuadratureRule;
use super::solution::{DGSolution, MEASURE_EXTRA_POINTS};
use super::FemError;

/// Re-expand `u` on `target_cells`.
///
/// Moving to finer cells re-expands the covering polynomial exactly; moving
/// to a coarser cell L2-projects the piecewise polynomial onto a single one.
/// Every target cell must either nest inside one source cell or be tiled
/// exactly by a run of source cells.
pub fn transfer(u: &DGSolution, target_cells: &[(f64, f64)]) -> Result<DGSolution, FemError> {
    let p = u.p_order;
    let quad = QuadratureRule::gauss_legendre(p + 1);
    let src = &u.cells;
    if src.is_empty() || target_cells.is_empty() {
        return Err(FemError::IncompatibleMeshes);
    }
    if src[0].0 != target_cells[0].0 || src.last().unwrap().1 != target_cells.last().unwrap().1 {
        return Err(FemError::IncompatibleMeshes);
    }

    let mut coeffs = Vec::with_capacity(target_cells.len());
    let mut si = 0usize;
    for &(ta, tb) in target_cells {
        // Skip source cells that end at or before the target start.
        while si < src.len() && src[si].1 <= ta {
            si += 1;
        }
        if si >= src.len() {
            return Err(FemError::IncompatibleMeshes);
        }
        let (sa, sb) = src[si];
        if sa <= ta && tb <= sb {
            // Restriction: project the source polynomial onto the target
            // interval; exact for matching degree.
            let mut c = vec![0.0; p + 1];
            let half = 0.5 * (tb - ta);
            let mid = 0.5 * (ta + tb);
            for (&xi, &w) in quad.points().iter().zip(quad.weights()) {
                let x = mid + half * xi;
                let val = u.eval_in_cell(si, x);
                let phis = legendre_all(p, xi);
                for (k, phi) in phis.iter().enumerate() {
                    c[k] += w * val * phi;
                }
            }
            for (k, ck) in c.iter_mut().enumerate() {
                *ck /= mode_norm_sq(k);
            }
            coeffs.push(c);
            continue;
        }
        // Coarsening: the target must be tiled exactly by source cells.
        if sa != ta {
            return Err(FemError::IncompatibleMeshes);
        }
        let mut c = vec![0.0; p + 1];
        let t_half = 0.5 * (tb - ta);
        let t_mid = 0.5 * (ta + tb);
        let mut end = sa;
        while si < src.len() && src[si].1 <= tb {
            let (ka, kb) = src[si];
            let half = 0.5 * (kb - ka);
            let mid = 0.5 * (ka + kb);
            for (&xi, &w) in quad.points().iter().zip(quad.weights()) {
                let x = mid + half * xi;
                let val = u.eval_in_cell(si, x);
                let xi_t = (x - t_mid) / t_half;
                let phis = legendre_all(p, xi_t);
                // Physical-space inner product, normalized on the target cell.
                for (k, phi) in phis.iter().enumerate() {
                    c[k] += w * half * val * phi;
                }
            }
            end = kb;
            si += 1;
        }
        if end != tb {
            return Err(FemError::IncompatibleMeshes);
        }
        for (k, ck) in c.iter_mut().enumerate() {
            *ck /= t_half * mode_norm_sq(k);
        }
        coeffs.push(c);
    }
    Ok(DGSolution { cells: target_cells.to_vec(), p_order: p, coeffs })
}

/// Integral of |u_after - u_before| over the domain, evaluated on the overlay
/// of the two partitions so both fields are compared on the finer resolution.
pub fn delta_u(before: &DGSolution, after: &DGSolution) -> Result<f64, FemError> {
    if before.p_order != after.p_order {
        return Err(FemError::IncompatibleMeshes);
    }
    if before.cells.is_empty() || after.cells.is_empty() {
        return Err(FemError::IncompatibleMeshes);
    }
    if before.cells[0].0 != after.cells[0].0
        || before.cells.last().unwrap().1 != after.cells.last().unwrap().1
    {
        return Err(FemError::IncompatibleMeshes);
    }
    let quad = QuadratureRule::gauss_legendre(before.p_order + 1 + MEASURE_EXTRA_POINTS);
    let mut total = 0.0;
    let (mut i, mut j) = (0usize, 0usize);
    let mut x = before.cells[0].0;
    let x_end = before.cells.last().unwrap().1;
    while x < x_end && i < before.n_cells() && j < after.n_cells() {
        let seg_end = before.cells[i].1.min(after.cells[j].1);
        if seg_end > x {
            total += quad.integrate_on(x, seg_end, |xx| {
                (after.eval_in_cell(j, xx) - before.eval_in_cell(i, xx)).abs()
            });
        }
        if before.cells[i].1 <= seg_end {
            i += 1;
        }
        if after.cells[j].1 <= seg_end {
            j += 1;
        }
        x = seg_end;
    }
    Ok(total)
}
