//! Discontinuous Galerkin and hybridizable DG discretizations on the tree
//! mesh: modal Legendre basis, Gauss quadrature, steady/unsteady advection,
//! a condensed Poisson solver, inter-mesh transfer, and error measurement.

pub mod advection;
pub mod basis;
pub mod hdg;
pub mod linalg;
pub mod quadrature;
pub mod solution;
pub mod transfer;

use std::sync::Arc;

use thiserror::Error;

pub use advection::{solve_steady_advection, step_unsteady_advection, straight_stable_dt};
pub use hdg::{solve_poisson_hdg, HdgSolution};
pub use quadrature::QuadratureRule;
pub use solution::{DGSolution, DofCount, JumpReport};
pub use transfer::{delta_u, transfer};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FemError {
    #[error("direct solve failed: singular or ill-posed system")]
    SingularSystem,
    #[error("meshes are not nested cell-locally")]
    IncompatibleMeshes,
    #[error("time step unstable for the current mesh")]
    UnstableStep,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// Scalar function of space.
pub type SpaceFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
/// Scalar function of space and time.
pub type SpaceTimeFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Linear advection problem `u_t + (c u)_x = f` with inflow data on the
/// boundary where the velocity points into the domain.
#[derive(Clone)]
pub struct AdvectionProblem {
    /// Constant signed advection speed.
    pub speed: f64,
    /// Forcing `f(x, t)`; steady solves evaluate it at `t = 0`.
    pub forcing: SpaceTimeFn,
    /// Inflow boundary value `g_D(t)`.
    pub inflow: SpaceFn,
    /// Exact solution `u(x, t)`, for error reporting only.
    pub exact: Option<SpaceTimeFn>,
}

impl std::fmt::Debug for AdvectionProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AdvectionProblem")
            .field("speed", &self.speed)
            .field("exact", &self.exact.is_some())
            .finish()
    }
}

impl AdvectionProblem {
    pub fn steady(speed: f64, forcing: SpaceFn, inflow_value: f64) -> Self {
        Self {
            speed,
            forcing: Arc::new(move |x, _| forcing(x)),
            inflow: Arc::new(move |_| inflow_value),
            exact: None,
        }
    }
}

/// Poisson problem `-(kappa u')' = f` with a Dirichlet value at the left
/// endpoint and a prescribed outward flux `q . n` (with `q = -kappa u'`) at
/// the right endpoint.
#[derive(Clone)]
pub struct PoissonProblem {
    pub diffusivity: f64,
    pub forcing: SpaceFn,
    /// Dirichlet value at the left domain endpoint.
    pub dirichlet: f64,
    /// Outward normal flux datum at the right endpoint: `(-kappa u') . n`.
    pub neumann_flux: f64,
    /// Face stabilization `tau = kappa / ell + |c . n|`; advection-free here,
    /// with diffusion length scale `ell = 1/5`.
    pub stabilization: f64,
    pub exact: Option<SpaceFn>,
}

impl std::fmt::Debug for PoissonProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PoissonProblem")
            .field("diffusivity", &self.diffusivity)
            .field("stabilization", &self.stabilization)
            .field("exact", &self.exact.is_some())
            .finish()
    }
}

/// Diffusion length scale used for the default stabilization parameter.
pub const DIFFUSION_LENGTH: f64 = 0.2;

impl PoissonProblem {
    pub fn new(forcing: SpaceFn, dirichlet: f64, neumann_flux: f64) -> Self {
        let kappa = 1.0;
        Self {
            diffusivity: kappa,
            forcing,
            dirichlet,
            neumann_flux,
            stabilization: kappa / DIFFUSION_LENGTH,
            exact: None,
        }
    }
}
