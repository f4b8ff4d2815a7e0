//! Fisher graph `F_n` and augmented Fisher graph `AF_n` on the torus.
//!
//! Both graphs are stored as a [`DimerGraph`]: `n x n` copies of a fixed fundamental
//! domain, vertices indexed domain-major and label-minor, every edge carrying a
//! Kasteleyn orientation `tail -> head`.
//!
//! Fisher domain labels (0-based; the usual 1-based labels are one higher):
//!
//! | label | corner                          |
//! |-------|---------------------------------|
//! | 0,1,2 | black triangle, a/b/c corner    |
//! | 3,4,5 | white triangle, a/b/c corner    |
//!
//! Augmented domain labels follow the `v_{a1..a4}, v_{b1..b4}, v_{c1..c4}` naming:
//! the a-edge is labelled black to white (`a1` black corner, `a2`, `a3`, `a4` white
//! corner) and the b- and c-edges white to black (`b1` white corner, `b2`, `b3`,
//! `b4` black corner). The two subdivision vertices of an edge belong to the domains
//! of their adjacent triangle corners, so the middle thirds of b- and c-edges are the
//! only edges that leave a domain.

use super::hex::{Color, EdgeKind, TorusHexLattice, U1, U2};
use crate::error::Result;
use crate::params::{DimerWeights, HalfEdgeWeights};

/// Which portion of a lattice edge a dimer edge represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgePart {
    /// Undivided lattice edge (Fisher graph).
    Whole,
    /// Third adjacent to the white triangle.
    WhiteThird,
    Middle,
    /// Third adjacent to the black triangle.
    BlackThird,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeRole {
    /// Fisher-triangle edge; `opposite` names the lattice kind of the corner it avoids,
    /// so its Fisher weight is `A`, `B` or `C` respectively (vertical, NE, NW).
    Triangle { color: Color, opposite: EdgeKind },
    Lattice { kind: EdgeKind, part: EdgePart, lattice_edge: usize },
}

/// Homology crossing of an edge, read in its `tail -> head` direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Crossing {
    None,
    /// Crosses `gamma_x`; the `(tail, head)` entry picks up `z^k`.
    X(i32),
    /// Crosses `gamma_y`; the `(tail, head)` entry picks up `w^k`.
    Y(i32),
}

impl Crossing {
    pub fn label(&self) -> &'static str {
        match self {
            Crossing::None => "none",
            Crossing::X(k) if *k > 0 => "x+",
            Crossing::X(_) => "x-",
            Crossing::Y(k) if *k > 0 => "y+",
            Crossing::Y(_) => "y-",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DimerVertex {
    pub p: usize,
    pub q: usize,
    pub label: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DimerEdge {
    pub tail: usize,
    pub head: usize,
    pub role: EdgeRole,
    /// Domain offset of the head relative to the tail in the unwrapped plane.
    pub shift: [i32; 2],
    /// Seam crossings of the `tail -> head` traversal; the phase exponents of entry `(tail, head)`.
    pub wrap: [i32; 2],
}

impl DimerEdge {
    pub fn crossing(&self) -> Crossing {
        match self.wrap {
            [0, 0] => Crossing::None,
            [k, 0] => Crossing::X(k),
            [0, k] => Crossing::Y(k),
            // b- and c-edges only ever shift along one axis
            _ => unreachable!("edge crosses both seams"),
        }
    }
}

/// Edge sets crossed by the two dual homology cycles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomologyCycles {
    pub gamma_x: Vec<usize>,
    pub gamma_y: Vec<usize>,
}

/// A doubly periodic oriented graph on the `n x n` torus.
#[derive(Debug, Clone, PartialEq)]
pub struct DimerGraph {
    n: usize,
    labels: usize,
    vertices: Vec<DimerVertex>,
    edges: Vec<DimerEdge>,
    positions: Vec<[f64; 2]>,
    seams: [usize; 2],
}

impl DimerGraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn labels_per_domain(&self) -> usize {
        self.labels
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[DimerVertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[DimerEdge] {
        &self.edges
    }

    pub fn seams(&self) -> [usize; 2] {
        self.seams
    }

    /// Row index of a vertex: domain-major, label-minor.
    pub fn vertex_id(&self, p: i64, q: i64, label: usize) -> usize {
        let n = self.n as i64;
        ((p.rem_euclid(n) * n + q.rem_euclid(n)) as usize) * self.labels + label
    }

    /// Position of a label inside its fundamental domain (black vertex at the origin).
    pub fn local_position(&self, label: usize) -> [f64; 2] {
        self.positions[label]
    }

    /// Displacement vector of the `tail -> head` traversal in the unwrapped plane.
    pub fn edge_vector(&self, id: usize) -> [f64; 2] {
        let e = &self.edges[id];
        let t = self.positions[self.vertices[e.tail].label];
        let h = self.positions[self.vertices[e.head].label];
        let [sp, sq] = e.shift;
        [
            h[0] + sp as f64 * U1[0] + sq as f64 * U2[0] - t[0],
            h[1] + sp as f64 * U1[1] + sq as f64 * U2[1] - t[1],
        ]
    }

    pub fn homology_cycles(&self) -> HomologyCycles {
        let mut gamma_x = Vec::new();
        let mut gamma_y = Vec::new();
        for (id, e) in self.edges.iter().enumerate() {
            match e.crossing() {
                Crossing::X(_) => gamma_x.push(id),
                Crossing::Y(_) => gamma_y.push(id),
                Crossing::None => {}
            }
        }
        HomologyCycles { gamma_x, gamma_y }
    }

    /// Copy with the orientation of one edge reversed.
    pub fn with_flipped_edge(&self, id: usize) -> DimerGraph {
        let mut g = self.clone();
        let e = &mut g.edges[id];
        std::mem::swap(&mut e.tail, &mut e.head);
        e.shift = [-e.shift[0], -e.shift[1]];
        e.wrap = [-e.wrap[0], -e.wrap[1]];
        g
    }

    /// Copy with the seams (`gamma_x` between domain rows `sx - 1` and `sx`, `gamma_y`
    /// between columns `sy - 1` and `sy`) moved.
    pub fn with_seams(&self, sx: usize, sy: usize) -> DimerGraph {
        let mut g = self.clone();
        g.seams = [sx % self.n, sy % self.n];
        for e in g.edges.iter_mut() {
            let t = self.vertices[e.tail];
            e.wrap = wrap_of(self.n, g.seams, [t.p, t.q], e.shift);
        }
        g
    }
}

fn wrap_of(n: usize, seams: [usize; 2], tail: [usize; 2], shift: [i32; 2]) -> [i32; 2] {
    let n = n as i64;
    let mut out = [0; 2];
    for axis in 0..2 {
        let rel = (tail[axis] as i64 - seams[axis] as i64).rem_euclid(n);
        out[axis] = (rel + shift[axis] as i64).div_euclid(n) as i32;
    }
    out
}

struct Builder {
    n: usize,
    labels: usize,
    edges: Vec<DimerEdge>,
}

impl Builder {
    fn id(&self, p: i64, q: i64, label: usize) -> usize {
        let n = self.n as i64;
        ((p.rem_euclid(n) * n + q.rem_euclid(n)) as usize) * self.labels + label
    }

    /// Edge from `(tp, tq, tl)` to the head label in domain `(tp, tq) + shift`.
    fn push(&mut self, tail: (usize, usize, usize), head_label: usize, shift: [i32; 2], role: EdgeRole) {
        let (tp, tq, tl) = tail;
        let t = self.id(tp as i64, tq as i64, tl);
        let h = self.id(tp as i64 + shift[0] as i64, tq as i64 + shift[1] as i64, head_label);
        let wrap = wrap_of(self.n, [0, 0], [tp, tq], shift);
        self.edges.push(DimerEdge { tail: t, head: h, role, shift, wrap });
    }

    fn finish(self, positions: Vec<[f64; 2]>) -> DimerGraph {
        let mut vertices = Vec::with_capacity(self.n * self.n * self.labels);
        for p in 0..self.n {
            for q in 0..self.n {
                for label in 0..self.labels {
                    vertices.push(DimerVertex { p, q, label });
                }
            }
        }
        DimerGraph { n: self.n, labels: self.labels, vertices, edges: self.edges, positions, seams: [0, 0] }
    }
}

const CORNER_RADIUS: f64 = 0.2;
const SQRT3_2: f64 = 0.866_025_403_784_438_6;

/// Unit direction from the black vertex to its a/b/c neighbour.
fn black_direction(kind: EdgeKind) -> [f64; 2] {
    match kind {
        EdgeKind::A => [1.0, 0.0],
        EdgeKind::B => [-0.5, SQRT3_2],
        EdgeKind::C => [-0.5, -SQRT3_2],
    }
}

fn black_corner_position(kind: EdgeKind) -> [f64; 2] {
    let d = black_direction(kind);
    [CORNER_RADIUS * d[0], CORNER_RADIUS * d[1]]
}

fn white_corner_position(kind: EdgeKind) -> [f64; 2] {
    let d = black_direction(kind);
    [1.0 - CORNER_RADIUS * d[0], -CORNER_RADIUS * d[1]]
}

/// Unwrapped domain offset from the white endpoint of a `kind` edge to its black endpoint.
fn white_to_black_shift(kind: EdgeKind) -> [i32; 2] {
    match kind {
        EdgeKind::A => [0, 0],
        EdgeKind::B => [1, 0],
        EdgeKind::C => [0, 1],
    }
}

/// The triangle edges of one color, oriented as in the Fisher fundamental domain:
/// `b -> a`, `a -> c`, `c -> b` (tail corner, head corner, opposite corner).
const TRIANGLE: [(EdgeKind, EdgeKind, EdgeKind); 3] = [
    (EdgeKind::B, EdgeKind::A, EdgeKind::C),
    (EdgeKind::A, EdgeKind::C, EdgeKind::B),
    (EdgeKind::C, EdgeKind::B, EdgeKind::A),
];

/// Fisher graph `F_n`: each vertex of `H_n` replaced by a triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct FisherGraph {
    base: TorusHexLattice,
    graph: DimerGraph,
}

pub fn build_fisher(lat: &TorusHexLattice) -> FisherGraph {
    FisherGraph::new(lat)
}

impl FisherGraph {
    pub const LABELS: usize = 6;

    pub fn black_corner(kind: EdgeKind) -> usize {
        kind.index()
    }

    pub fn white_corner(kind: EdgeKind) -> usize {
        3 + kind.index()
    }

    pub fn new(lat: &TorusHexLattice) -> Self {
        let n = lat.n();
        let mut b = Builder { n, labels: Self::LABELS, edges: Vec::with_capacity(9 * n * n) };
        for p in 0..n {
            for q in 0..n {
                for (color, corner) in [
                    (Color::Black, Self::black_corner as fn(EdgeKind) -> usize),
                    (Color::White, Self::white_corner),
                ] {
                    for (t, h, opposite) in TRIANGLE {
                        b.push((p, q, corner(t)), corner(h), [0, 0], EdgeRole::Triangle { color, opposite });
                    }
                }
                for kind in EdgeKind::ALL {
                    let shift = white_to_black_shift(kind);
                    let wp = (p + n - shift[0] as usize) % n;
                    let wq = (q + n - shift[1] as usize) % n;
                    let lattice_edge = lat.edge_id(p as i64, q as i64, kind);
                    b.push(
                        (wp, wq, Self::white_corner(kind)),
                        Self::black_corner(kind),
                        shift,
                        EdgeRole::Lattice { kind, part: EdgePart::Whole, lattice_edge },
                    );
                }
            }
        }
        let mut positions = vec![[0.0; 2]; Self::LABELS];
        for kind in EdgeKind::ALL {
            positions[Self::black_corner(kind)] = black_corner_position(kind);
            positions[Self::white_corner(kind)] = white_corner_position(kind);
        }
        Self { base: lat.clone(), graph: b.finish(positions) }
    }

    pub fn base(&self) -> &TorusHexLattice {
        &self.base
    }

    pub fn graph(&self) -> &DimerGraph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    /// Edge weights: `A`, `B`, `C` on triangle edges by opposite corner, 1 on lattice edges.
    pub fn edge_weights(&self, w: &DimerWeights) -> Vec<f64> {
        self.graph
            .edges()
            .iter()
            .map(|e| match e.role {
                EdgeRole::Triangle { opposite, .. } => w.get(opposite),
                EdgeRole::Lattice { .. } => 1.0,
            })
            .collect()
    }

    /// Index of the Fisher edge inherited from a lattice edge.
    pub fn lattice_edge_index(&self, lattice_edge: usize) -> usize {
        // 9 edges per domain: 6 triangle edges then a, b, c
        let domain = lattice_edge / 3;
        9 * domain + 6 + lattice_edge % 3
    }

    pub fn with_graph(&self, graph: DimerGraph) -> FisherGraph {
        FisherGraph { base: self.base.clone(), graph }
    }
}

/// Augmented Fisher graph `AF_n`: every lattice edge of `F_n` split into thirds.
/// Triangle and middle edges weigh 1, the outer thirds `1 / eps_s`.
#[derive(Debug, Clone, PartialEq)]
pub struct AugFisherGraph {
    base: TorusHexLattice,
    graph: DimerGraph,
    eps: HalfEdgeWeights,
    weights: Vec<f64>,
    cycles: HomologyCycles,
}

pub fn build_aug_fisher(fg: &FisherGraph, eps: HalfEdgeWeights) -> Result<AugFisherGraph> {
    AugFisherGraph::new(fg.base(), eps)
}

/// Augmented-domain labels.
pub mod aug_label {
    pub const A1: usize = 0;
    pub const A2: usize = 1;
    pub const A3: usize = 2;
    pub const A4: usize = 3;
    pub const B1: usize = 4;
    pub const B2: usize = 5;
    pub const B3: usize = 6;
    pub const B4: usize = 7;
    pub const C1: usize = 8;
    pub const C2: usize = 9;
    pub const C3: usize = 10;
    pub const C4: usize = 11;

    pub const NAMES: [&str; 12] = ["a1", "a2", "a3", "a4", "b1", "b2", "b3", "b4", "c1", "c2", "c3", "c4"];
}

impl AugFisherGraph {
    pub const LABELS: usize = 12;
    /// Edges per domain: 6 triangle edges, then (white third, middle, black third) for a, b, c.
    pub const EDGES_PER_DOMAIN: usize = 15;

    pub fn black_corner(kind: EdgeKind) -> usize {
        use aug_label::*;
        [A1, B4, C4][kind.index()]
    }

    pub fn white_corner(kind: EdgeKind) -> usize {
        use aug_label::*;
        [A4, B1, C1][kind.index()]
    }

    pub fn black_subdivision(kind: EdgeKind) -> usize {
        use aug_label::*;
        [A2, B3, C3][kind.index()]
    }

    pub fn white_subdivision(kind: EdgeKind) -> usize {
        use aug_label::*;
        [A3, B2, C2][kind.index()]
    }

    pub fn new(lat: &TorusHexLattice, eps: HalfEdgeWeights) -> Result<Self> {
        let eps = HalfEdgeWeights::new(eps.eps[0], eps.eps[1], eps.eps[2])?;
        let n = lat.n();
        let mut b = Builder { n, labels: Self::LABELS, edges: Vec::with_capacity(15 * n * n) };
        for p in 0..n {
            for q in 0..n {
                for (color, corner) in [
                    (Color::Black, Self::black_corner as fn(EdgeKind) -> usize),
                    (Color::White, Self::white_corner),
                ] {
                    for (t, h, opposite) in TRIANGLE {
                        b.push((p, q, corner(t)), corner(h), [0, 0], EdgeRole::Triangle { color, opposite });
                    }
                }
                for kind in EdgeKind::ALL {
                    let shift = white_to_black_shift(kind);
                    let wp = (p + n - shift[0] as usize) % n;
                    let wq = (q + n - shift[1] as usize) % n;
                    let lattice_edge = lat.edge_id(p as i64, q as i64, kind);
                    let role = |part| EdgeRole::Lattice { kind, part, lattice_edge };
                    b.push(
                        (wp, wq, Self::white_corner(kind)),
                        Self::white_subdivision(kind),
                        [0, 0],
                        role(EdgePart::WhiteThird),
                    );
                    b.push(
                        (wp, wq, Self::white_subdivision(kind)),
                        Self::black_subdivision(kind),
                        shift,
                        role(EdgePart::Middle),
                    );
                    b.push(
                        (p, q, Self::black_subdivision(kind)),
                        Self::black_corner(kind),
                        [0, 0],
                        role(EdgePart::BlackThird),
                    );
                }
            }
        }
        let mut positions = vec![[0.0; 2]; Self::LABELS];
        for kind in EdgeKind::ALL {
            let bc = black_corner_position(kind);
            let s = white_to_black_shift(kind);
            // white corner of the neighbouring domain, seen from this black vertex
            let wc_local = white_corner_position(kind);
            let wc = [
                wc_local[0] - s[0] as f64 * U1[0] - s[1] as f64 * U2[0],
                wc_local[1] - s[0] as f64 * U1[1] - s[1] as f64 * U2[1],
            ];
            let d = [bc[0] - wc[0], bc[1] - wc[1]];
            positions[Self::black_corner(kind)] = bc;
            positions[Self::white_corner(kind)] = wc_local;
            positions[Self::black_subdivision(kind)] = [bc[0] - d[0] / 3.0, bc[1] - d[1] / 3.0];
            positions[Self::white_subdivision(kind)] = [wc_local[0] + d[0] / 3.0, wc_local[1] + d[1] / 3.0];
        }
        let graph = b.finish(positions);
        let weights = Self::weights_for(&graph, &eps);
        let cycles = graph.homology_cycles();
        Ok(Self { base: lat.clone(), graph, eps, weights, cycles })
    }

    fn weights_for(graph: &DimerGraph, eps: &HalfEdgeWeights) -> Vec<f64> {
        graph
            .edges()
            .iter()
            .map(|e| match e.role {
                EdgeRole::Triangle { .. } => 1.0,
                EdgeRole::Lattice { part: EdgePart::Middle | EdgePart::Whole, .. } => 1.0,
                EdgeRole::Lattice { kind, .. } => 1.0 / eps.get(kind),
            })
            .collect()
    }

    pub fn base(&self) -> &TorusHexLattice {
        &self.base
    }

    pub fn graph(&self) -> &DimerGraph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn eps(&self) -> &HalfEdgeWeights {
        &self.eps
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn cycles(&self) -> &HomologyCycles {
        &self.cycles
    }

    /// Index of the outer third of `lattice_edge` on the given side.
    pub fn third_edge_index(lattice_edge: usize, side: Color) -> usize {
        let domain = lattice_edge / 3;
        let kind = lattice_edge % 3;
        let offset = match side {
            Color::White => 0,
            Color::Black => 2,
        };
        Self::EDGES_PER_DOMAIN * domain + 6 + 3 * kind + offset
    }

    /// Replace the underlying graph (orientation fault injection, seam moves).
    pub fn with_graph(&self, graph: DimerGraph) -> AugFisherGraph {
        let cycles = graph.homology_cycles();
        AugFisherGraph { base: self.base.clone(), graph, eps: self.eps, weights: self.weights.clone(), cycles }
    }
}
