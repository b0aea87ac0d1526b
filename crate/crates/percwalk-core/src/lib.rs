//! Random walks on supercritical bond percolation clusters, at desk scale.
//!
//! The crate samples Bernoulli bond configurations on a periodic box of
//! `Z^d`, decomposes them into clusters, runs the constant-speed random
//! walk (hold `Exp(1)`, jump uniformly among open neighbors), solves the
//! discrete cell problem for the corrector on the largest cluster, and
//! computes the effective diffusivity two independent ways together with
//! the sublinearity, Poincare and heat-kernel statistics used to
//! cross-validate them.
//!
//! Everything here is deterministic given explicit seeds: bond sampling is
//! counter-based (the decision for an edge depends only on `(seed, edge)`),
//! walks derive their stream from `base_seed + walk_index`, and all
//! reductions run in a fixed order.
//!
//! The crate is `no_std`-compatible (`alloc` required): disable default
//! features and enable `libm` for builds without the standard library.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("percwalk-core needs either the `std` feature or the `libm` feature");

mod float;

pub mod cluster;
pub mod corrector;
pub mod diffusivity;
pub mod error;
pub mod field;
pub mod gaussian;
pub mod heat_kernel;
pub mod lattice;
pub mod percolation;
pub mod poincare;
pub mod rng;
pub mod solver;
pub mod stats;
pub mod sublinearity;
pub mod twoscale;
pub mod walk;

pub use cluster::{decompose_clusters, ClusterDecomposition};
pub use corrector::{integrate_corrector, verify_cocycle, verify_harmonic, CorrectorField, SpanningTree};
pub use diffusivity::{msd_sigma2, variational_sigma2, DiffusivityReport, MsdEstimate, TildeQWeights};
pub use error::{Error, Result};
pub use field::{divergence, gradient, hat_field, DirectedEdgeValues, DirectionField, EdgeField, HatField};
pub use gaussian::{gaussianity_test, KsResult};
pub use heat_kernel::{heat_kernel_return, HeatKernelReport, ReturnEstimate};
pub use lattice::{Direction, LatticeSpec};
pub use percolation::{sample_bonds, BondConfiguration};
pub use poincare::{poincare_ratio, PoincareEstimate};
pub use solver::{solve_cell_problem, CellSolution, Preconditioner, SolverOptions};
pub use sublinearity::{
    box_average_statistic, chopped_box_bound, sublinearity_statistic, Rectangle,
    SublinearityPoint, SublinearityReport,
};
pub use twoscale::{two_scale_ibp_check, TensorBump, TestFunction};
pub use walk::{
    rescaled_endpoint_for_walk,
    rescaled_endpoints, simulate_walk, EnsembleSpec, RescaledEndpoints, StartPolicy, Trajectory,
};
