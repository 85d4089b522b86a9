//! Benchmark experiment definitions: manufactured solutions, forcings, and
//! per-case defaults.

use std::sync::Arc;

use amrbench_core::env::EnvProblem;
use amrbench_core::fem::{AdvectionProblem, PoissonProblem};
use amrbench_core::indicators::SteadyProblem;

use crate::CliError;

/// Steepness of the tanh profile in the steady advection case.
const TANH_STEEPNESS: f64 = 10.0;
/// Gaussian pulse parameters of the unsteady case.
const PULSE_CENTER: f64 = -4.0;
const PULSE_VARIANCE: f64 = 0.25;
/// Triple-Gaussian parameters of the Poisson case.
const POISSON_SIGMA: f64 = 0.1;
const POISSON_CENTERS: [f64; 3] = [-1.0 / 3.0, 0.0, 1.0 / 3.0];
/// Default oscillation count in the generalization case.
pub const DEFAULT_SIN_MODES: u32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentCase {
    /// Steady advection of a smooth step on [0, 1].
    SteadyAdv,
    /// Steady advection of a Gaussian-enveloped oscillation on (-4, 4).
    SteadyAdvGen { sin_modes: u32 },
    /// Advecting Gaussian pulse on (-4, 4), dt = 0.01.
    UnsteadyAdv,
    /// Triple-Gaussian Poisson problem on (-1, 1), Dirichlet left / flux right.
    PoissonHdg,
}

impl ExperimentCase {
    pub fn parse(name: &str, sin_modes: Option<u32>) -> Result<Self, CliError> {
        match name {
            "steady-adv" => Ok(Self::SteadyAdv),
            "steady-adv-gen" => Ok(Self::SteadyAdvGen {
                sin_modes: sin_modes.unwrap_or(DEFAULT_SIN_MODES),
            }),
            "unsteady-adv" => Ok(Self::UnsteadyAdv),
            "poisson-hdg" => Ok(Self::PoissonHdg),
            other => Err(CliError::Config(format!(
                "unknown case '{other}' (expected steady-adv, steady-adv-gen, unsteady-adv, poisson-hdg)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::SteadyAdv => "steady-adv",
            Self::SteadyAdvGen { .. } => "steady-adv-gen",
            Self::UnsteadyAdv => "unsteady-adv",
            Self::PoissonHdg => "poisson-hdg",
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        match self {
            Self::SteadyAdv => (0.0, 1.0),
            Self::SteadyAdvGen { .. } | Self::UnsteadyAdv => (-4.0, 4.0),
            Self::PoissonHdg => (-1.0, 1.0),
        }
    }

    pub fn default_p_order(&self) -> usize {
        3
    }

    pub fn default_n_roots(&self) -> usize {
        match self {
            Self::UnsteadyAdv => 8,
            _ => 4,
        }
    }

    pub fn default_budget(&self) -> usize {
        match self {
            Self::SteadyAdv => 25,
            Self::SteadyAdvGen { .. } => 100,
            Self::UnsteadyAdv => 100,
            Self::PoissonHdg => 36,
        }
    }

    pub fn is_unsteady(&self) -> bool {
        matches!(self, Self::UnsteadyAdv)
    }

    /// Time step of the unsteady case.
    pub fn dt(&self) -> f64 {
        0.01
    }

    /// Exact solution at time `t` (steady cases ignore `t`).
    pub fn exact_at(&self, t: f64) -> Arc<dyn Fn(f64) -> f64 + Send + Sync> {
        match *self {
            Self::SteadyAdv => Arc::new(steady_adv_exact),
            Self::SteadyAdvGen { sin_modes } => {
                Arc::new(move |x| steady_adv_gen_exact(sin_modes, x))
            }
            Self::UnsteadyAdv => Arc::new(move |x| pulse(x - t)),
            Self::PoissonHdg => Arc::new(poisson_exact),
        }
    }

    /// Environment problem (drives training, deployment, and unsteady runs).
    pub fn env_problem(&self) -> EnvProblem {
        match *self {
            Self::SteadyAdv => EnvProblem::SteadyAdvection {
                problem: self.advection_problem().unwrap(),
                domain: self.domain(),
            },
            Self::SteadyAdvGen { .. } => EnvProblem::SteadyAdvection {
                problem: self.advection_problem().unwrap(),
                domain: self.domain(),
            },
            Self::UnsteadyAdv => EnvProblem::UnsteadyAdvection {
                problem: self.advection_problem().unwrap(),
                domain: self.domain(),
                initial: Arc::new(pulse),
                dt: self.dt(),
            },
            Self::PoissonHdg => EnvProblem::Poisson {
                problem: self.poisson_problem().unwrap(),
                domain: self.domain(),
            },
        }
    }

    /// Steady re-solvable problem for the heuristic baseline loop.
    pub fn steady_problem(&self, p_order: usize) -> Result<SteadyProblem, CliError> {
        match self {
            Self::SteadyAdv | Self::SteadyAdvGen { .. } => Ok(SteadyProblem::Advection(
                self.advection_problem().unwrap(),
                p_order,
            )),
            Self::PoissonHdg => Ok(SteadyProblem::Poisson(
                self.poisson_problem().unwrap(),
                p_order,
            )),
            Self::UnsteadyAdv => Err(CliError::Config(
                "the unsteady case has no steady solve; use the unsteady command".into(),
            )),
        }
    }

    pub fn advection_problem(&self) -> Option<AdvectionProblem> {
        match *self {
            Self::SteadyAdv => Some(AdvectionProblem {
                speed: 1.0,
                forcing: Arc::new(|x, _| steady_adv_forcing(x)),
                inflow: Arc::new(|_| steady_adv_exact(0.0)),
                exact: Some(Arc::new(|x, _| steady_adv_exact(x))),
            }),
            Self::SteadyAdvGen { sin_modes } => Some(AdvectionProblem {
                speed: 1.0,
                forcing: Arc::new(move |x, _| steady_adv_gen_forcing(sin_modes, x)),
                inflow: Arc::new(move |_| steady_adv_gen_exact(sin_modes, -4.0)),
                exact: Some(Arc::new(move |x, _| steady_adv_gen_exact(sin_modes, x))),
            }),
            Self::UnsteadyAdv => Some(AdvectionProblem {
                speed: 1.0,
                forcing: Arc::new(|_, _| 0.0),
                inflow: Arc::new(|t| pulse(-4.0 - t)),
                exact: Some(Arc::new(|x, t| pulse(x - t))),
            }),
            Self::PoissonHdg => None,
        }
    }

    pub fn poisson_problem(&self) -> Option<PoissonProblem> {
        match self {
            Self::PoissonHdg => Some(PoissonProblem {
                exact: Some(Arc::new(poisson_exact)),
                ..PoissonProblem::new(
                    Arc::new(poisson_forcing),
                    poisson_exact(-1.0),
                    // Outward flux datum q . n = -kappa u'(x_hi).
                    -poisson_exact_deriv(1.0),
                )
            }),
            _ => None,
        }
    }
}

/// u(x) = 1 - tanh(alpha (1 - 4 (x - 1/4))); the layer sits at x = 1/2.
pub fn steady_adv_exact(x: f64) -> f64 {
    1.0 - (TANH_STEEPNESS * (1.0 - 4.0 * (x - 0.25))).tanh()
}

/// f = c u' with c = 1: 4 alpha sech^2(alpha (1 - 4 (x - 1/4))).
pub fn steady_adv_forcing(x: f64) -> f64 {
    let s = 1.0 / (TANH_STEEPNESS * (1.0 - 4.0 * (x - 0.25))).cosh();
    4.0 * TANH_STEEPNESS * s * s
}

/// u(x) = sin(n x) exp(-x^2 / 2).
pub fn steady_adv_gen_exact(n: u32, x: f64) -> f64 {
    (n as f64 * x).sin() * (-0.5 * x * x).exp()
}

/// f = c u' with c = 1.
pub fn steady_adv_gen_forcing(n: u32, x: f64) -> f64 {
    let nf = n as f64;
    let env = (-0.5 * x * x).exp();
    (nf * (nf * x).cos() - x * (nf * x).sin()) * env
}

/// Gaussian pulse initial condition of the unsteady case.
pub fn pulse(x: f64) -> f64 {
    let d = x - PULSE_CENTER;
    (-d * d / (2.0 * PULSE_VARIANCE)).exp()
}

/// Superposition of three narrow Gaussians.
pub fn poisson_exact(x: f64) -> f64 {
    let amp = 1.0 / (POISSON_SIGMA * (2.0 * std::f64::consts::PI).sqrt());
    POISSON_CENTERS
        .iter()
        .map(|&r| amp * (-(x - r) * (x - r) / (POISSON_SIGMA * POISSON_SIGMA)).exp())
        .sum()
}

pub fn poisson_exact_deriv(x: f64) -> f64 {
    let s2 = POISSON_SIGMA * POISSON_SIGMA;
    let amp = 1.0 / (POISSON_SIGMA * (2.0 * std::f64::consts::PI).sqrt());
    POISSON_CENTERS
        .iter()
        .map(|&r| amp * (-(x - r) * (x - r) / s2).exp() * (-2.0 * (x - r) / s2))
        .sum()
}

/// f = -u''.
pub fn poisson_forcing(x: f64) -> f64 {
    let s2 = POISSON_SIGMA * POISSON_SIGMA;
    let amp = 1.0 / (POISSON_SIGMA * (2.0 * std::f64::consts::PI).sqrt());
    -POISSON_CENTERS
        .iter()
        .map(|&r| {
            let d = x - r;
            amp * (-d * d / s2).exp() * (4.0 * d * d / (s2 * s2) - 2.0 / s2)
        })
        .sum::<f64>()
}
