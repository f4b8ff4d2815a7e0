//! Face tracing on the embedded torus graph and the clockwise-odd audit.
//!
//! A dart is `2 * edge + dir` with `dir = 0` for `tail -> head`. Faces are traced
//! counterclockwise (face on the left), so a dart with `dir = 1` is co-oriented
//! with the clockwise traversal of its face.

use super::dimer::DimerGraph;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    /// Darts in counterclockwise order.
    pub darts: Vec<usize>,
    /// Edges oriented along the clockwise traversal.
    pub clockwise_co_oriented: usize,
}

impl Face {
    pub fn len(&self) -> usize {
        self.darts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.darts.is_empty()
    }

    pub fn edges(&self) -> impl Iterator<Item = usize> + '_ {
        self.darts.iter().map(|d| d / 2)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrientationReport {
    pub face_count: usize,
    pub offending: Vec<Face>,
}

impl OrientationReport {
    pub fn is_clockwise_odd(&self) -> bool {
        self.offending.is_empty()
    }
}

fn dart_tail(g: &DimerGraph, d: usize) -> usize {
    let e = &g.edges()[d / 2];
    if d % 2 == 0 {
        e.tail
    } else {
        e.head
    }
}

fn dart_angle(g: &DimerGraph, d: usize) -> f64 {
    let v = g.edge_vector(d / 2);
    if d % 2 == 0 {
        v[1].atan2(v[0])
    } else {
        (-v[1]).atan2(-v[0])
    }
}

/// Outgoing darts at every vertex, sorted counterclockwise by angle.
pub fn rotation_system(g: &DimerGraph) -> Vec<Vec<usize>> {
    let mut rot = vec![Vec::with_capacity(3); g.vertex_count()];
    for d in 0..2 * g.edge_count() {
        rot[dart_tail(g, d)].push(d);
    }
    for darts in rot.iter_mut() {
        darts.sort_by(|&x, &y| dart_angle(g, x).total_cmp(&dart_angle(g, y)));
    }
    rot
}

/// All faces of the embedding.
pub fn trace_faces(g: &DimerGraph) -> Vec<Face> {
    let rot = rotation_system(g);
    let mut pos = vec![0usize; 2 * g.edge_count()];
    for darts in &rot {
        for (i, &d) in darts.iter().enumerate() {
            pos[d] = i;
        }
    }
    let mut seen = vec![false; 2 * g.edge_count()];
    let mut faces = Vec::new();
    for start in 0..seen.len() {
        if seen[start] {
            continue;
        }
        let mut darts = Vec::new();
        let mut d = start;
        while !seen[d] {
            seen[d] = true;
            darts.push(d);
            // arrive at the head, turn to the clockwise neighbour of the reverse dart
            let back = d ^ 1;
            let around = &rot[dart_tail(g, back)];
            d = around[(pos[back] + around.len() - 1) % around.len()];
        }
        let clockwise_co_oriented = darts.iter().filter(|&&d| d % 2 == 1).count();
        faces.push(Face { darts, clockwise_co_oriented });
    }
    faces
}

/// True iff every face has an odd number of clockwise co-oriented edges.
pub fn verify_clockwise_odd(g: &DimerGraph) -> OrientationReport {
    let faces = trace_faces(g);
    let face_count = faces.len();
    let offending = faces.into_iter().filter(|f| f.clockwise_co_oriented % 2 == 0).collect();
    OrientationReport { face_count, offending }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_hex_torus, AugFisherGraph, FisherGraph};
    use crate::params::HalfEdgeWeights;

    #[test]
    fn fisher_is_clockwise_odd() {
        for n in 1..=4 {
            let fg = FisherGraph::new(&build_hex_torus(n).unwrap());
            let r = verify_clockwise_odd(fg.graph());
            assert!(r.is_clockwise_odd(), "n = {n}: {:?}", r.offending);
            // torus Euler characteristic
            assert_eq!(fg.graph().vertex_count() + r.face_count, fg.graph().edge_count());
        }
    }

    #[test]
    fn augmented_is_clockwise_odd() {
        for n in 1..=4 {
            let af = AugFisherGraph::new(&build_hex_torus(n).unwrap(), HalfEdgeWeights::unit()).unwrap();
            let r = verify_clockwise_odd(af.graph());
            assert!(r.is_clockwise_odd(), "n = {n}: {:?}", r.offending);
            assert_eq!(af.graph().vertex_count() + r.face_count, af.graph().edge_count());
        }
    }

    #[test]
    fn faces_are_triangles_and_dodecagons() {
        let fg = FisherGraph::new(&build_hex_torus(3).unwrap());
        let mut sizes: Vec<usize> = trace_faces(fg.graph()).iter().map(Face::len).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, [vec![3; 18], vec![12; 9]].concat());
    }

    #[test]
    fn flipped_edge_is_reported() {
        let fg = FisherGraph::new(&build_hex_torus(2).unwrap());
        // a triangle edge borders one triangle and one dodecagon
        let g = fg.graph().with_flipped_edge(0);
        let r = verify_clockwise_odd(&g);
        assert_eq!(r.offending.len(), 2);
        assert!(r.offending.iter().all(|f| f.edges().any(|e| e == 0)));
    }
}
