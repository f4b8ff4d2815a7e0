use crate::error::{HexError, Result};

/// Lattice edge type by direction in the embedding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeKind {
    /// Horizontal.
    A,
    /// Northwest.
    B,
    /// Northeast.
    C,
}

impl EdgeKind {
    pub const ALL: [EdgeKind; 3] = [EdgeKind::A, EdgeKind::B, EdgeKind::C];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> EdgeKind {
        Self::ALL[i]
    }

    pub fn letter(self) -> char {
        match self {
            EdgeKind::A => 'a',
            EdgeKind::B => 'b',
            EdgeKind::C => 'c',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Color {
    Black,
    White,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HexVertex {
    pub p: usize,
    pub q: usize,
    pub color: Color,
}

/// An edge of `H_n`. Every edge is attached to the black vertex of domain `(p, q)`;
/// its white endpoint sits in `(p, q)` for A, `(p - 1, q)` for B and `(p, q - 1)` for C.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HexEdge {
    pub p: usize,
    pub q: usize,
    pub kind: EdgeKind,
    pub black: usize,
    pub white: usize,
}

/// Lattice basis vectors of the embedding (unit edge length). Domain `(p, q)` has its
/// black vertex at `p * U1 + q * U2` and its white vertex one unit to the right.
pub const U1: [f64; 2] = [1.5, -0.866_025_403_784_438_6];
pub const U2: [f64; 2] = [1.5, 0.866_025_403_784_438_6];

/// Toroidal hexagonal lattice `H_n`: `n x n` fundamental domains, each holding one
/// black and one white vertex and one edge of each kind.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusHexLattice {
    n: usize,
    vertices: Vec<HexVertex>,
    edges: Vec<HexEdge>,
}

pub fn build_hex_torus(n: usize) -> Result<TorusHexLattice> {
    TorusHexLattice::new(n)
}

impl TorusHexLattice {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(HexError::TorusTooSmall { got: 0, min: 1 });
        }
        let mut vertices = Vec::with_capacity(2 * n * n);
        for p in 0..n {
            for q in 0..n {
                vertices.push(HexVertex { p, q, color: Color::Black });
                vertices.push(HexVertex { p, q, color: Color::White });
            }
        }
        let mut edges = Vec::with_capacity(3 * n * n);
        for p in 0..n {
            for q in 0..n {
                let black = 2 * (p * n + q);
                for kind in EdgeKind::ALL {
                    let (wp, wq) = match kind {
                        EdgeKind::A => (p, q),
                        EdgeKind::B => ((p + n - 1) % n, q),
                        EdgeKind::C => (p, (q + n - 1) % n),
                    };
                    edges.push(HexEdge { p, q, kind, black, white: 2 * (wp * n + wq) + 1 });
                }
            }
        }
        Ok(Self { n, vertices, edges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> &[HexVertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[HexEdge] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn domain(&self, p: i64, q: i64) -> usize {
        let n = self.n as i64;
        (p.rem_euclid(n) * n + q.rem_euclid(n)) as usize
    }

    pub fn vertex_id(&self, p: i64, q: i64, color: Color) -> usize {
        2 * self.domain(p, q) + usize::from(color == Color::White)
    }

    pub fn edge_id(&self, p: i64, q: i64, kind: EdgeKind) -> usize {
        3 * self.domain(p, q) + kind.index()
    }

    pub fn edge(&self, id: usize) -> Result<&HexEdge> {
        self.edges
            .get(id)
            .ok_or(HexError::EdgeOutOfRange { id, count: self.edges.len() })
    }

    /// The three edges at a vertex, indexed by kind.
    pub fn incident_edges(&self, vertex: usize) -> [usize; 3] {
        let v = self.vertices[vertex];
        let (p, q) = (v.p as i64, v.q as i64);
        match v.color {
            Color::Black => EdgeKind::ALL.map(|k| self.edge_id(p, q, k)),
            Color::White => [
                self.edge_id(p, q, EdgeKind::A),
                self.edge_id(p + 1, q, EdgeKind::B),
                self.edge_id(p, q + 1, EdgeKind::C),
            ],
        }
    }

    pub fn count_of_kind(&self, kind: EdgeKind) -> usize {
        self.edges.iter().filter(|e| e.kind == kind).count()
    }

    /// Midpoint of an edge in the unwrapped plane (domain `(p, q)` taken literally).
    pub fn midpoint(&self, id: usize) -> [f64; 2] {
        let e = self.edges[id];
        let origin = [
            e.p as f64 * U1[0] + e.q as f64 * U2[0],
            e.p as f64 * U1[1] + e.q as f64 * U2[1],
        ];
        let offset = match e.kind {
            EdgeKind::A => [0.5, 0.0],
            EdgeKind::B => [-0.25, 0.433_012_701_892_219_3],
            EdgeKind::C => [-0.25, -0.433_012_701_892_219_3],
        };
        [origin[0] + offset[0], origin[1] + offset[1]]
    }
}
