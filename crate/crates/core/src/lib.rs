//! Exact computations for the hexagonal polygon model on the torus.
//!
//! Partition functions and two-edge correlations are computed as four-Pfaffian
//! combinations of Kasteleyn matrices of the (augmented) Fisher graph, and checked
//! against brute-force enumeration on small tori. The [`spectral`] and [`limits`]
//! modules handle the infinite-volume side: the characteristic polynomial, phase
//! classification and the long-range order parameter.

pub mod error;
pub mod kasteleyn;
pub mod lattice;
pub mod limits;
pub mod oracle;
pub mod params;
pub mod skewlinalg;
pub mod spectral;
pub mod verify;

pub use error::{HexError, Result};
pub use params::{DimerWeights, HalfEdgeWeights, OneTwoParams, PolygonParams};
