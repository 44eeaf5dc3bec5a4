//! Brute-force reference oracles for the phiconv test suites.
//!
//! Nothing in here shares code with `phiconv-core`; each oracle answers its
//! question by exhaustive enumeration or textbook planar geometry so that it
//! can be used to check the LP-based decision procedures.

pub mod hull2d;
pub mod lp;

pub use hull2d::{convex_hull_vertices, on_segment, point_in_convex_polygon};
pub use lp::{vertex_enumeration, OracleConstraint, OracleOutcome, OracleRelation};
