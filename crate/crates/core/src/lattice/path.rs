//! Staircase paths of horizontal and NW half-edges between two NW edges.

use super::dimer::{aug_label, AugFisherGraph};
use super::hex::{Color, EdgeKind, TorusHexLattice, U1};
use crate::error::{HexError, Result};

/// Half of a lattice edge, identified by the edge and the endpoint it touches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfEdge {
    pub edge: usize,
    pub side: Color,
}

impl HalfEdge {
    /// Dense index `2 * edge + side` with black = 0.
    pub fn id(&self) -> usize {
        2 * self.edge + usize::from(self.side == Color::White)
    }

    pub fn from_id(id: usize) -> Self {
        let side = if id % 2 == 0 { Color::Black } else { Color::White };
        Self { edge: id / 2, side }
    }
}

/// Path from the midpoint of `e` to the midpoint of `f`.
///
/// One period starting at domain `(p, q)` is: black half of the NW edge at `(p, q)`,
/// both halves of the horizontal edge at `(p, q)`, white half of the NW edge at
/// `(p + 1, q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationPath {
    pub e: usize,
    pub f: usize,
    /// Number of periods.
    pub periods: usize,
    /// Domain of the first period.
    pub start: (usize, usize),
    pub half_edges: Vec<HalfEdge>,
    /// Outer thirds of `AF_n` under the half-edges, same order as `half_edges`.
    pub e_ell: Vec<usize>,
    /// Endpoints of `e_ell`, eight per period in the order b3, b4, a1, a2, a3, a4, b1, b2.
    pub v_ell: Vec<usize>,
    /// Euclidean distance between the midpoints of `e` and `f`.
    pub separation: f64,
}

/// Per-period vertex labels of `V_ell`.
pub const PERIOD_LABELS: [usize; 8] = [
    aug_label::B3,
    aug_label::B4,
    aug_label::A1,
    aug_label::A2,
    aug_label::A3,
    aug_label::A4,
    aug_label::B1,
    aug_label::B2,
];

fn nw_domain(lat: &TorusHexLattice, id: usize) -> Result<(usize, usize)> {
    let e = lat.edge(id)?;
    if e.kind != EdgeKind::B {
        return Err(HexError::NotNorthwest(id));
    }
    Ok((e.p, e.q))
}

/// Canonical path between two distinct NW edges in the same domain column `q`.
/// The path runs in the `+p` direction, wrapping around the torus if needed.
pub fn build_path(lat: &TorusHexLattice, e: usize, f: usize) -> Result<CorrelationPath> {
    let (p0, q0) = nw_domain(lat, e)?;
    let (p1, q1) = nw_domain(lat, f)?;
    if e == f {
        return Err(HexError::SameEdge);
    }
    if q0 != q1 {
        return Err(HexError::UnsupportedPair { e, f });
    }
    let n = lat.n();
    let periods = (p1 + n - p0) % n;
    let mut half_edges = Vec::with_capacity(4 * periods);
    let mut e_ell = Vec::with_capacity(4 * periods);
    let mut v_ell = Vec::with_capacity(8 * periods);
    for j in 0..periods {
        let p = (p0 + j) as i64;
        let q = q0 as i64;
        let b_here = lat.edge_id(p, q, EdgeKind::B);
        let a_here = lat.edge_id(p, q, EdgeKind::A);
        let b_next = lat.edge_id(p + 1, q, EdgeKind::B);
        for h in [
            HalfEdge { edge: b_here, side: Color::Black },
            HalfEdge { edge: a_here, side: Color::Black },
            HalfEdge { edge: a_here, side: Color::White },
            HalfEdge { edge: b_next, side: Color::White },
        ] {
            half_edges.push(h);
            e_ell.push(AugFisherGraph::third_edge_index(h.edge, h.side));
        }
        let base = lat.domain(p, q) * AugFisherGraph::LABELS;
        v_ell.extend(PERIOD_LABELS.iter().map(|l| base + l));
    }
    let separation = periods as f64 * (U1[0] * U1[0] + U1[1] * U1[1]).sqrt();
    Ok(CorrelationPath { e, f, periods, start: (p0, q0), half_edges, e_ell, v_ell, separation })
}

/// The NW edge `k` periods further along the path direction.
pub fn nw_partner(lat: &TorusHexLattice, e: usize, k: usize) -> Result<usize> {
    let (p, q) = nw_domain(lat, e)?;
    Ok(lat.edge_id((p + k) as i64, q as i64, EdgeKind::B))
}

/// Lattice vertices of odd degree in a half-edge set, each half-edge counted at the
/// endpoint it touches and at the midpoint it leaves. Returns the odd midpoints
/// (edge ids) and odd vertices separately.
pub fn half_edge_boundary(lat: &TorusHexLattice, halves: &[HalfEdge]) -> (Vec<usize>, Vec<usize>) {
    let mut mid = vec![0u8; lat.edge_count()];
    let mut vert = vec![0u8; lat.vertex_count()];
    for h in halves {
        mid[h.edge] ^= 1;
        let e = lat.edges()[h.edge];
        let v = if h.side == Color::Black { e.black } else { e.white };
        vert[v] ^= 1;
    }
    let odd = |xs: Vec<u8>| xs.iter().enumerate().filter(|(_, &b)| b == 1).map(|(i, _)| i).collect();
    (odd(mid), odd(vert))
}
