//! Ergodic structure of directed graphs under the PageRank random walk.
//!
//! The library answers a chain of questions about a directed graph viewed
//! through the damped random surfer: where does the walk live (bow-tie and
//! extended-SCC census), how much PageRank mass the extended SCC retains as
//! a function of the damping factor, what the ranking degenerates to as the
//! damping factor approaches one, and which damping factor treats the
//! extended SCC "fairly" under three different reference distributions.
//!
//! Everything is built around sparse, non-materializing operators: dangling
//! rows and teleportation are rank-one corrections, the extended-SCC block
//! is a restriction of the same edge structure, and the only dense solve in
//! the crate is the small resolvent path intended for cross-checking.
//!
//! The crate is `no_std` (with `alloc`); all file and terminal handling
//! lives in the companion CLI crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod damping;
pub mod error;
pub mod graph;
pub mod pagerank;
pub mod perturbation;
pub mod spectral;
pub mod structure;

mod block;
mod math;

pub use error::Error;
pub use graph::{TransitionOperator, WebGraph};
pub use pagerank::{MassCurve, PageRankVector};
pub use spectral::{QuasiStationary, SpectralSummary};
pub use structure::{BowTie, Census, StructureDecomposition};
