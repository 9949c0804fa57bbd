//! Neighborhood-graph Laplacians with density reweighting and their
//! continuum limits.
//!
//! The crate builds radius neighborhood graphs from sampled points with
//! kernel weights `k_h(|x - y|^2) / [d(x) d(y)]^lambda`, applies the
//! random-walk, unnormalized and normalized graph Laplacians (both as
//! matrices on the sample and as extensions to arbitrary points), and
//! compares them against the closed-form operators they approximate as the
//! sample grows and the bandwidth shrinks.
//!
//! Degree convention: every degree and every operator in this crate carries
//! a 1/n averaging (`d_i = (1/n) sum_j w_ij`). The constants in the
//! analytic limits depend on this choice, so it is part of the public
//! contract and not an implementation detail.

pub mod error;
pub mod graph;
pub mod harness;
pub mod io;
pub mod kernel;
pub mod manifold;
pub mod neighborhood;
pub mod numerics;
pub mod oracle;

pub use error::{Error, Result};
pub use graph::{
    EdgeFunction, GraphStructure, LaplacianKind, PresetKind, WeightedGraph, preset_structure,
};
pub use kernel::{KernelMoments, KernelProfile};
pub use manifold::{Box2Uniform, Gauss2, Manifold, SphereCluster, manifold_by_name};
pub use neighborhood::NeighborhoodGraph;
pub use oracle::{LimitSpec, TestFunction};
