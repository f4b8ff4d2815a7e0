//! Toroidal hexagonal lattice, Fisher graphs and correlation paths.

mod dimer;
mod export;
mod hex;
mod orientation;
mod path;

pub use dimer::{
    aug_label, build_aug_fisher, build_fisher, AugFisherGraph, Crossing, DimerEdge, DimerGraph, DimerVertex,
    EdgePart, EdgeRole, FisherGraph, HomologyCycles,
};
pub use export::{dimer_edge_kind, export_dimer, export_hex};
pub use hex::{build_hex_torus, Color, EdgeKind, HexEdge, HexVertex, TorusHexLattice, U1, U2};
pub use orientation::{rotation_system, trace_faces, verify_clockwise_odd, Face, OrientationReport};
pub use path::{build_path, half_edge_boundary, nw_partner, CorrelationPath, HalfEdge, PERIOD_LABELS};
