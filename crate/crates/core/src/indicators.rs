//! Classical cell-wise error indicators and marking strategies: the
//! SOLVE -> ESTIMATE -> MARK -> REFINE baseline loop.

use std::str::FromStr;

use thiserror::Error;

use crate::fem::{
    solve_poisson_hdg, solve_steady_advection, AdvectionProblem, DGSolution, FemError,
    PoissonProblem,
};
use crate::mesh::{CoarsenOutcome, TreeMesh1D};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndicatorKind {
    Kelly,
    GradientBased,
}

impl FromStr for IndicatorKind {
    type Err = MarkError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "kelly" => Ok(Self::Kelly),
            "gradient" => Ok(Self::GradientBased),
            other => Err(MarkError::UnknownIndicator(other.to_string())),
        }
    }
}

/// Bulk marking selects by estimated error mass, fixed-fraction by cell count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MarkingStrategy {
    Bulk { refine_frac: f64, coarsen_frac: f64 },
    FixedFraction { refine_frac: f64, coarsen_frac: f64 },
}

#[derive(Debug, Error, PartialEq)]
pub enum MarkError {
    #[error("marking fractions must lie in [0, 1] (and sum to at most 1 for fixed-fraction)")]
    InvalidFractions,
    #[error("unknown indicator '{0}' (expected 'kelly' or 'gradient')")]
    UnknownIndicator(String),
    #[error("unknown strategy '{0}' (expected 'bulk:<r>:<c>' or 'fixed:<r>:<c>')")]
    UnknownStrategy(String),
}

impl MarkingStrategy {
    pub fn validate(&self) -> Result<(), MarkError> {
        let (r, c) = match *self {
            Self::Bulk { refine_frac, coarsen_frac } => (refine_frac, coarsen_frac),
            Self::FixedFraction { refine_frac, coarsen_frac } => (refine_frac, coarsen_frac),
        };
        let in_range = (0.0..=1.0).contains(&r) && (0.0..=1.0).contains(&c);
        let sum_ok = match self {
            Self::Bulk { .. } => true,
            Self::FixedFraction { .. } => r + c <= 1.0 + 1e-12,
        };
        if in_range && sum_ok {
            Ok(())
        } else {
            Err(MarkError::InvalidFractions)
        }
    }
}

impl FromStr for MarkingStrategy {
    /// CLI form: `bulk:0.5:0.5` or `fixed:0.4:0.6`.
    type Err = MarkError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(MarkError::UnknownStrategy(s.to_string()));
        }
        let r: f64 = parts[1].parse().map_err(|_| MarkError::UnknownStrategy(s.to_string()))?;
        let c: f64 = parts[2].parse().map_err(|_| MarkError::UnknownStrategy(s.to_string()))?;
        let strategy = match parts[0] {
            "bulk" => Self::Bulk { refine_frac: r, coarsen_frac: c },
            "fixed" => Self::FixedFraction { refine_frac: r, coarsen_frac: c },
            _ => return Err(MarkError::UnknownStrategy(s.to_string())),
        };
        strategy.validate()?;
        Ok(strategy)
    }
}

/// Kelly indicator: eta_K^2 sums `c_F [a du/dn]^2` over the cell's faces with
/// `c_F = h_K / 24`; a face term contributes fully to both adjacent cells. A
/// Neumann boundary face adds the flux mismatch `n_F |g - a du/dn|^2`.
#[derive(Debug, Clone, Copy)]
pub struct KellyContext {
    /// Diffusion coefficient in the flux jump (1 for advection problems).
    pub coefficient: f64,
    /// Prescribed outward flux `(-a u') . n` at the right domain endpoint,
    /// when that face carries a Neumann condition.
    pub neumann_flux: Option<f64>,
}

impl KellyContext {
    pub fn advection() -> Self {
        Self { coefficient: 1.0, neumann_flux: None }
    }

    pub fn poisson(problem: &PoissonProblem) -> Self {
        Self {
            coefficient: problem.diffusivity,
            neumann_flux: Some(problem.neumann_flux),
        }
    }
}

pub fn kelly_indicator(u: &DGSolution, ctx: &KellyContext) -> Vec<f64> {
    let n = u.n_cells();
    let a = ctx.coefficient;
    // Squared jump of the scaled normal derivative at each interior interface.
    let face_sq: Vec<f64> = (0..n.saturating_sub(1))
        .map(|i| {
            let x = u.cells[i].1;
            let jump = a * (u.deriv_in_cell(i, x) - u.deriv_in_cell(i + 1, x));
            jump * jump
        })
        .collect();
    (0..n)
        .map(|i| {
            let h = u.width(i);
            let c_f = h / 24.0;
            let mut eta_sq = 0.0;
            if i > 0 {
                eta_sq += c_f * face_sq[i - 1];
            }
            if i < n - 1 {
                eta_sq += c_f * face_sq[i];
            }
            if i == n - 1 {
                if let Some(g) = ctx.neumann_flux {
                    // Outward flux of the discrete solution at the right end.
                    let q = -a * u.deriv_in_cell(i, u.cells[i].1);
                    eta_sq += c_f * (g - q) * (g - q);
                }
            }
            eta_sq.sqrt()
        })
        .collect()
}

/// Gradient indicator: least-squares difference quotient over the existing
/// neighbors of each cell (one-sided at the boundary), evaluated from
/// midpoint values and scaled by `h^{3/2}`.
pub fn gradient_indicator(u: &DGSolution) -> Vec<f64> {
    let n = u.n_cells();
    let centers: Vec<f64> = (0..n).map(|i| u.midpoint(i)).collect();
    let values: Vec<f64> = (0..n).map(|i| u.eval_in_cell(i, centers[i])).collect();
    (0..n)
        .map(|i| {
            let mut y_sum = 0.0;
            let mut grad_sum = 0.0;
            let mut add = |j: usize| {
                let y: f64 = centers[j] - centers[i];
                y_sum += 1.0;
                grad_sum += (values[j] - values[i]) / y.abs() * y.signum();
            };
            if i > 0 {
                add(i - 1);
            }
            if i + 1 < n {
                add(i + 1);
            }
            if y_sum == 0.0 {
                return 0.0;
            }
            let grad = grad_sum / y_sum;
            u.width(i).powf(1.5) * grad.abs()
        })
        .collect()
}

/// Select cells for refinement and coarsening.
///
/// Bulk: descending sort, refine the smallest prefix holding at least
/// `refine_frac` of the total score mass; coarsen the smallest ascending
/// suffix holding `coarsen_frac`, skipping refine-marked cells. Fixed
/// fraction: `ceil(frac * n)` cells from each end. Ties break toward the
/// lower cell index; the returned sets are disjoint, refinement taking
/// precedence.
pub fn mark(scores: &[f64], strategy: MarkingStrategy) -> Result<(Vec<usize>, Vec<usize>), MarkError> {
    strategy.validate()?;
    let n = scores.len();
    let total: f64 = scores.iter().sum();

    // Descending by score, index ascending on ties.
    let mut desc: Vec<usize> = (0..n).collect();
    desc.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .unwrap()
            .then(a.cmp(&b))
    });

    match strategy {
        MarkingStrategy::Bulk { refine_frac, coarsen_frac } => {
            let mut refine = Vec::new();
            let mut acc = 0.0;
            if refine_frac > 0.0 && total > 0.0 {
                for &i in &desc {
                    if acc >= refine_frac * total {
                        break;
                    }
                    refine.push(i);
                    acc += scores[i];
                }
            }
            let marked: Vec<bool> = {
                let mut m = vec![false; n];
                for &i in &refine {
                    m[i] = true;
                }
                m
            };
            // Ascending by score, index ascending on ties.
            let mut asc: Vec<usize> = (0..n).collect();
            asc.sort_by(|&a, &b| {
                scores[a]
                    .partial_cmp(&scores[b])
                    .unwrap()
                    .then(a.cmp(&b))
            });
            let mut coarsen = Vec::new();
            let mut acc = 0.0;
            if coarsen_frac > 0.0 && total > 0.0 {
                for &i in &asc {
                    if acc >= coarsen_frac * total {
                        break;
                    }
                    if marked[i] {
                        continue;
                    }
                    coarsen.push(i);
                    acc += scores[i];
                }
            }
            refine.sort_unstable();
            coarsen.sort_unstable();
            Ok((refine, coarsen))
        }
        MarkingStrategy::FixedFraction { refine_frac, coarsen_frac } => {
            let n_refine = (refine_frac * n as f64).ceil() as usize;
            let n_coarsen = (coarsen_frac * n as f64).ceil() as usize;
            let mut refine: Vec<usize> = desc.iter().copied().take(n_refine).collect();
            let marked: Vec<bool> = {
                let mut m = vec![false; n];
                for &i in &refine {
                    m[i] = true;
                }
                m
            };
            let mut coarsen: Vec<usize> = desc
                .iter()
                .rev()
                .filter(|&&i| !marked[i])
                .take(n_coarsen)
                .copied()
                .collect();
            refine.sort_unstable();
            coarsen.sort_unstable();
            Ok((refine, coarsen))
        }
    }
}

/// Steady problems the heuristic loop can re-solve.
#[derive(Debug, Clone)]
pub enum SteadyProblem {
    Advection(AdvectionProblem, usize),
    Poisson(PoissonProblem, usize),
}

impl SteadyProblem {
    pub fn solve(&self, mesh: &TreeMesh1D) -> Result<DGSolution, FemError> {
        match self {
            Self::Advection(p, order) => solve_steady_advection(p, mesh, *order),
            Self::Poisson(p, order) => Ok(solve_poisson_hdg(p, mesh, *order)?.u),
        }
    }

    pub fn scores(&self, u: &DGSolution, indicator: IndicatorKind) -> Vec<f64> {
        match indicator {
            IndicatorKind::GradientBased => gradient_indicator(u),
            IndicatorKind::Kelly => match self {
                Self::Advection(..) => kelly_indicator(u, &KellyContext::advection()),
                Self::Poisson(p, _) => kelly_indicator(u, &KellyContext::poisson(p)),
            },
        }
    }
}

/// Outcome counters for one heuristic cycle.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CycleCounts {
    pub refined: usize,
    pub coarsened: usize,
    pub unchanged: usize,
}

/// Apply marked actions to the mesh: coarsening first (only sibling pairs
/// that are both marked and active merge; the rest are skipped), then
/// refinement, optionally capped at `max_level`.
pub fn execute_marks(
    mesh: &mut TreeMesh1D,
    refine: &[usize],
    coarsen: &[usize],
    max_level: Option<u32>,
) -> CycleCounts {
    let cells = mesh.active_cells();
    let mut counts = CycleCounts::default();

    let coarsen_ids: std::collections::HashSet<_> =
        coarsen.iter().map(|&i| cells[i].id).collect();
    for &i in coarsen {
        let id = cells[i].id;
        if !mesh.is_active(id) {
            // Removed as the sibling of an earlier merge.
            continue;
        }
        let sibling_marked = mesh
            .node(id)
            .and_then(|n| n.parent)
            .and_then(|p| mesh.node(p))
            .and_then(|p| p.children)
            .map(|(l, r)| {
                let sib = if l == id { r } else { l };
                coarsen_ids.contains(&sib)
            })
            .unwrap_or(false);
        if !sibling_marked {
            counts.unchanged += 1;
            continue;
        }
        match mesh.coarsen(id) {
            Ok(CoarsenOutcome::Coarsened(_)) => counts.coarsened += 1,
            _ => counts.unchanged += 1,
        }
    }

    for &i in refine {
        let id = cells[i].id;
        if !mesh.is_active(id) {
            counts.unchanged += 1;
            continue;
        }
        if let Some(cap) = max_level {
            if cells[i].level >= cap {
                counts.unchanged += 1;
                continue;
            }
        }
        match mesh.refine(id) {
            Ok(_) => counts.refined += 1,
            Err(_) => counts.unchanged += 1,
        }
    }
    counts
}

/// One SOLVE -> ESTIMATE -> MARK -> REFINE cycle. Returns the re-solved
/// solution and the executed action counts.
pub fn heuristic_cycle(
    problem: &SteadyProblem,
    mesh: &mut TreeMesh1D,
    u: &DGSolution,
    indicator: IndicatorKind,
    strategy: MarkingStrategy,
    max_level: Option<u32>,
) -> Result<(DGSolution, CycleCounts), FemError> {
    let scores = problem.scores(u, indicator);
    let (refine, coarsen) =
        mark(&scores, strategy).expect("strategy validated before the cycle");
    let counts = execute_marks(mesh, &refine, &coarsen, max_level);
    let next = problem.solve(mesh)?;
    Ok((next, counts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::sync::Arc;

    fn piecewise(values: &[f64], p: usize) -> DGSolution {
        let n = values.len();
        let cells: Vec<(f64, f64)> = (0..n).map(|i| (i as f64, (i + 1) as f64)).collect();
        let coeffs = values
            .iter()
            .map(|&v| {
                let mut c = vec![0.0; p + 1];
                c[0] = v;
                c
            })
            .collect();
        DGSolution { cells, p_order: p, coeffs }
    }

    #[test]
    fn kelly_vanishes_for_globally_linear_solution() {
        let cells = vec![(0.0, 0.5), (0.5, 1.0), (1.0, 2.0)];
        let u = DGSolution::project(cells, 2, &|x| 3.0 * x - 1.0);
        let eta = kelly_indicator(&u, &KellyContext::advection());
        for e in eta {
            assert!(e < 1e-12);
        }
    }

    #[test]
    fn kelly_two_cell_unit_derivative_jump() {
        // u = 0 on [0,1], u = x - 1 on [1,2]: derivative jump 1 at x = 1.
        let u = DGSolution {
            cells: vec![(0.0, 1.0), (1.0, 2.0)],
            p_order: 1,
            // On [1,2], x - 1 = 0.5 + 0.5 xi.
            coeffs: vec![vec![0.0, 0.0], vec![0.5, 0.5]],
        };
        let eta = kelly_indicator(&u, &KellyContext::advection());
        for e in eta {
            assert!((e * e - 1.0 / 24.0).abs() < 1e-14, "eta^2 = {}", e * e);
        }
    }

    #[test]
    fn kelly_scales_linearly_with_solution() {
        let u = DGSolution::project(vec![(0.0, 1.0), (1.0, 2.0)], 2, &|x| (2.0 * x).sin());
        let mut doubled = u.clone();
        for c in &mut doubled.coeffs {
            for v in c.iter_mut() {
                *v *= 2.0;
            }
        }
        let eta = kelly_indicator(&u, &KellyContext::advection());
        let eta2 = kelly_indicator(&doubled, &KellyContext::advection());
        for (a, b) in eta.iter().zip(eta2.iter()) {
            assert!((b - 2.0 * a).abs() < 1e-12);
        }
    }

    #[test]
    fn kelly_neumann_mismatch_contributes() {
        // Exact flux match leaves the boundary cell untouched; a mismatch adds.
        let u = DGSolution::project(vec![(0.0, 1.0), (1.0, 2.0)], 2, &|x| x);
        let matched = kelly_indicator(
            &u,
            &KellyContext { coefficient: 1.0, neumann_flux: Some(-1.0) },
        );
        assert!(matched.iter().all(|&e| e < 1e-12));
        let mismatched = kelly_indicator(
            &u,
            &KellyContext { coefficient: 1.0, neumann_flux: Some(0.5) },
        );
        assert!(mismatched[1] > 0.1);
        assert!(mismatched[0] < 1e-12);
    }

    #[test]
    fn gradient_indicator_on_constant_is_zero() {
        let u = piecewise(&[2.0, 2.0, 2.0], 1);
        assert!(gradient_indicator(&u).iter().all(|&g| g == 0.0));
    }

    #[test]
    fn gradient_indicator_center_difference() {
        // Centers 0, 1, 2 with values 0, 1, 4: middle-cell slope (1 + 3)/2 = 2.
        let cells = vec![(-0.5, 0.5), (0.5, 1.5), (1.5, 2.5)];
        let coeffs = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![4.0, 0.0]];
        let u = DGSolution { cells, p_order: 1, coeffs };
        let g = gradient_indicator(&u);
        assert!((g[1] - 2.0).abs() < 1e-13, "middle {}", g[1]);
        // Boundary cells fall back to one-sided differences: 1 and 3.
        assert!((g[0] - 1.0).abs() < 1e-13);
        assert!((g[2] - 3.0).abs() < 1e-13);
    }

    #[test]
    fn indicators_are_nonnegative_and_scale_homogeneously() {
        let u = DGSolution::project(vec![(0.0, 0.7), (0.7, 1.3), (1.3, 2.0)], 3, &|x| {
            (3.0 * x).sin() - 0.4 * x * x
        });
        let mut tripled = u.clone();
        for c in &mut tripled.coeffs {
            c.iter_mut().for_each(|v| *v *= 3.0);
        }
        let g = gradient_indicator(&u);
        let g3 = gradient_indicator(&tripled);
        for (a, b) in g.iter().zip(&g3) {
            assert!(*a >= 0.0);
            assert!((b - 3.0 * a).abs() < 1e-12, "gradient is 1-homogeneous");
        }
        let k = kelly_indicator(&u, &KellyContext::advection());
        assert!(k.iter().all(|&e| e >= 0.0));
    }

    #[test]
    fn bulk_marking_takes_smallest_prefix() {
        let scores = [4.0, 3.0, 2.0, 1.0];
        let (refine, coarsen) =
            mark(&scores, MarkingStrategy::Bulk { refine_frac: 0.5, coarsen_frac: 0.0 }).unwrap();
        assert_eq!(refine, vec![0, 1]); // 4 + 3 = 7 >= 5
        assert!(coarsen.is_empty());
    }

    #[test]
    fn fixed_fraction_takes_ceil_counts() {
        let scores = [4.0, 3.0, 2.0, 1.0];
        let (refine, coarsen) = mark(
            &scores,
            MarkingStrategy::FixedFraction { refine_frac: 0.25, coarsen_frac: 0.25 },
        )
        .unwrap();
        assert_eq!(refine, vec![0]);
        assert_eq!(coarsen, vec![3]);
    }

    #[test]
    fn equal_scores_tie_break_by_index() {
        let scores = [1.0, 1.0, 1.0, 1.0];
        let (refine, coarsen) =
            mark(&scores, MarkingStrategy::Bulk { refine_frac: 0.5, coarsen_frac: 0.5 }).unwrap();
        assert_eq!(refine, vec![0, 1]);
        assert_eq!(coarsen, vec![2, 3]);
        assert!(refine.iter().all(|i| !coarsen.contains(i)));
    }

    #[test]
    fn all_zero_scores_mark_nothing_under_bulk() {
        let scores = [0.0, 0.0, 0.0];
        let (refine, coarsen) =
            mark(&scores, MarkingStrategy::Bulk { refine_frac: 0.5, coarsen_frac: 0.5 }).unwrap();
        assert!(refine.is_empty());
        assert!(coarsen.is_empty());
    }

    #[test]
    fn invalid_fractions_are_rejected() {
        assert_eq!(
            mark(&[1.0], MarkingStrategy::Bulk { refine_frac: 1.5, coarsen_frac: 0.0 }),
            Err(MarkError::InvalidFractions)
        );
        assert_eq!(
            mark(&[1.0], MarkingStrategy::FixedFraction { refine_frac: 0.7, coarsen_frac: 0.7 }),
            Err(MarkError::InvalidFractions)
        );
    }

    #[test]
    fn strategy_strings_parse() {
        assert_eq!(
            "bulk:0.5:0.5".parse::<MarkingStrategy>().unwrap(),
            MarkingStrategy::Bulk { refine_frac: 0.5, coarsen_frac: 0.5 }
        );
        assert_eq!(
            "fixed:0.4:0.6".parse::<MarkingStrategy>().unwrap(),
            MarkingStrategy::FixedFraction { refine_frac: 0.4, coarsen_frac: 0.6 }
        );
        assert!("bulk:0.5".parse::<MarkingStrategy>().is_err());
        assert!("median:0.5:0.5".parse::<MarkingStrategy>().is_err());
    }

    #[test]
    fn zero_marks_leave_mesh_unchanged() {
        let problem = SteadyProblem::Advection(
            AdvectionProblem::steady(1.0, Arc::new(|_| 0.0), 1.0),
            2,
        );
        let mut mesh = TreeMesh1D::new((0.0, 1.0), 4, 100);
        let u = problem.solve(&mesh).unwrap();
        let before = mesh.active_intervals();
        let (next, counts) = heuristic_cycle(
            &problem,
            &mut mesh,
            &u,
            IndicatorKind::GradientBased,
            MarkingStrategy::FixedFraction { refine_frac: 0.0, coarsen_frac: 0.0 },
            None,
        )
        .unwrap();
        assert_eq!(mesh.active_intervals(), before);
        assert_eq!(counts, CycleCounts::default());
        assert!(next.l2_error(&|_| 1.0) < 1e-12);
    }

    #[test]
    fn root_level_coarsen_marks_are_skipped() {
        let problem = SteadyProblem::Advection(
            AdvectionProblem::steady(1.0, Arc::new(|_| 0.0), 1.0),
            2,
        );
        let mut mesh = TreeMesh1D::new((0.0, 1.0), 4, 100);
        let u = problem.solve(&mesh).unwrap();
        let before = mesh.active_count();
        let (_, counts) = heuristic_cycle(
            &problem,
            &mut mesh,
            &u,
            IndicatorKind::GradientBased,
            MarkingStrategy::FixedFraction { refine_frac: 0.0, coarsen_frac: 1.0 },
            None,
        )
        .unwrap();
        assert_eq!(mesh.active_count(), before);
        assert_eq!(counts.coarsened, 0);
        assert_eq!(counts.unchanged, 4);
    }

    #[test]
    fn max_level_caps_refinement() {
        let problem = SteadyProblem::Advection(
            AdvectionProblem::steady(1.0, Arc::new(|x| (6.0 * x).sin()), 0.0),
            2,
        );
        let mut mesh = TreeMesh1D::new((0.0, 1.0), 2, 100);
        let mut u = problem.solve(&mesh).unwrap();
        for _ in 0..4 {
            let (next, _) = heuristic_cycle(
                &problem,
                &mut mesh,
                &u,
                IndicatorKind::GradientBased,
                MarkingStrategy::FixedFraction { refine_frac: 1.0, coarsen_frac: 0.0 },
                Some(2),
            )
            .unwrap();
            u = next;
        }
        assert!(mesh.active_cells().iter().all(|c| c.level <= 2));
        assert_eq!(mesh.active_count(), 8);
    }

    proptest! {
        /// Marked sets are disjoint and within bounds for random inputs.
        #[test]
        fn mark_sets_are_disjoint(
            scores in proptest::collection::vec(0.0..10.0f64, 1..20),
            r in 0.0..1.0f64,
            c in 0.0..1.0f64,
        ) {
            for strategy in [
                MarkingStrategy::Bulk { refine_frac: r, coarsen_frac: c },
                MarkingStrategy::FixedFraction { refine_frac: r, coarsen_frac: (1.0 - r).min(c) },
            ] {
                let (refine, coarsen) = mark(&scores, strategy).unwrap();
                prop_assert!(refine.len() + coarsen.len() <= scores.len());
                for i in &refine {
                    prop_assert!(!coarsen.contains(i));
                }
            }
        }

        /// The bulk refine prefix is the minimal descending-sorted prefix
        /// reaching the requested mass, checked against brute force.
        #[test]
        fn bulk_prefix_is_minimal(
            scores in proptest::collection::vec(0.0..10.0f64, 1..12),
            r in 0.01..1.0f64,
        ) {
            let (refine, _) = mark(&scores, MarkingStrategy::Bulk { refine_frac: r, coarsen_frac: 0.0 }).unwrap();
            let total: f64 = scores.iter().sum();
            let mut desc: Vec<usize> = (0..scores.len()).collect();
            desc.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap().then(a.cmp(&b)));
            // Brute force: try every prefix length, keep the first that reaches the mass.
            let mut best = None;
            for len in 0..=desc.len() {
                let mass: f64 = desc[..len].iter().map(|&i| scores[i]).sum();
                if mass >= r * total {
                    best = Some(len);
                    break;
                }
            }
            let expected_len = best.unwrap_or(desc.len());
            prop_assert_eq!(refine.len(), expected_len);
            let mut expected: Vec<usize> = desc[..expected_len].to_vec();
            expected.sort_unstable();
            prop_assert_eq!(refine, expected);
        }
    }
}
