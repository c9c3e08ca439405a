//! Normal surface theory on the join triangulation of S³ carried by an arc
//! presentation: the triangulation itself, matching equations, vertex
//! enumeration for small arc index, surface reconstruction and a scan for
//! splitting spheres.

use thiserror::Error;

pub mod enumerate;
pub mod split;
pub mod surface;
pub mod triangulation;
pub mod vector;

pub use enumerate::{vertex_enumerate, vertex_enumerate_face, MAX_N};
pub use split::{splitting_sphere_scan, SplittingSphere};
pub use surface::{euler_functional, reconstruct, SurfaceReport};
pub use triangulation::{build_triangulation, Audit, Gluing, JoinTriangulation};
pub use vector::{coordinate_bound, haken_sum, matching_matrix, vertex_link, NormalVector};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NormalError {
    #[error("arc index {0} is below 2")]
    TooSmall(usize),
    #[error("arc index {n} is above the enumeration limit {max}")]
    TooLarge { n: usize, max: usize },
    #[error("vector fails the matching equations or compatibility")]
    NotAdmissible,
    #[error("surface too large to reconstruct")]
    TooManyDiscs,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error("could not start worker pool: {0}")]
    Workers(String),
}
