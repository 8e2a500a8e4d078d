//! Certified sweep-outs of closed triangulated surfaces by one-cycles.
//!
//! The pipeline turns a Euclidean triangle mesh into a unit-equilateral
//! simplicial surface ([`equilateralize`]), cuts it along a short cycle
//! found from the Fiedler vector ([`spectral`], [`decompose`]), cones off
//! both sides, sweeps the pieces recursively and pastes the sweeps back
//! together ([`builder`]). Every emitted sweep-out carries two-chain
//! certificates that [`chains::verify_sweep_out`] checks independently.

pub mod builder;
pub mod chains;
pub mod corpus;
pub mod decompose;
pub mod equilateralize;
pub mod io;
pub mod oracle;
pub mod report;
pub mod snap;
pub mod spectral;
pub mod surface;

pub use surface::{GenusConvention, Ring, SimplicialSurface, SurfaceError, TopologySummary};
