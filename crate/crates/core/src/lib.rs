//! 1D adaptive-mesh-refinement workbench.
//!
//! The crate couples a binary-tree mesh ([`mesh`]) with modal discontinuous
//! Galerkin and hybridizable DG discretizations ([`fem`]), classical
//! error-indicator refinement heuristics ([`indicators`]), a cell-local
//! decision environment whose reward trades solution change against a
//! resource barrier ([`mod@env`]), and a from-scratch deep Q-learning stack
//! ([`rl`]) that learns per-cell coarsen / do-nothing / refine policies.

pub mod env;
pub mod fem;
pub mod indicators;
pub mod mesh;
pub mod rl;
