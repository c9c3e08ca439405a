//! Grid diagrams of knots and links: the move calculus with exact Reidemeister
//! cost accounting, conversion from braid words and PD codes, and a monotone
//! simplification engine for unknot recognition and split detection.

pub mod grid;
pub mod moves;

pub use grid::{Component, Crossing, GridDiagram, GridError, Marker, SplitCertificate, ValidationReport, Violation};
pub use moves::{Axis, Corner, GridMove, MoveKind, Rejection};
pub mod transcript;
pub mod convert;
pub mod simplify;
