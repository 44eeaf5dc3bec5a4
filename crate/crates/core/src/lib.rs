//! Abstract Φ-convexity on finite metric spaces.
//!
//! The function class Φ is a finite-dimensional span of dictionary functions
//! evaluated on a finite ground set. Every decision procedure (hull
//! membership, betweenness, exposure, dual-ball vertex tests) reduces to a
//! small linear program over dictionary coefficients, solved by the dense
//! simplex kernel in [`lp`].
//!
//! Finite ground sets make closures trivial, so density and closure
//! statements from the continuous theory become exact set equalities here.
//! One consequence worth keeping in mind: on infinite compacta the inclusion
//! of Φ-exposed points in the Choquet boundary can be strict, while on a
//! finite ground set the two coincide.

pub mod boundary;
pub mod error;
pub mod ground;
pub mod hull;
pub mod lp;
pub mod phi_space;
pub mod points;
pub mod sampling;
pub mod tol;
pub mod variational;

pub use error::{Error, Result};
pub use ground::{ExtendedFunction, GroundSet, MetricSpec, PointId, PointSubset};
pub use phi_space::{Dictionary, DualVector, NormKind, PhiSpace, PhiVector, Separation};
