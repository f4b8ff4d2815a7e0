//! Brute-force ground truth on small tori.
//!
//! Even subgraphs of `H_n` are enumerated as the span of a fundamental-cycle basis
//! (Gray-code order, one XOR per step). Edge and half-edge sets are `u128` bitsets,
//! which bounds the polygon oracles to `n <= 4`.

use crate::error::{HexError, Result};
use crate::lattice::{
    build_path, half_edge_boundary, Color, CorrelationPath, EdgeKind, FisherGraph, HalfEdge, TorusHexLattice,
};
use crate::params::{DimerWeights, OneTwoParams, PolygonParams};

/// Largest torus side for the even-subgraph oracles.
pub const MAX_POLYGON_N: usize = 4;
/// Largest torus side for the matching and spin-sum oracles.
pub const MAX_SMALL_N: usize = 2;

/// A subset of lattice edges, `open[i]` for edge `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolygonConfig {
    pub open: Vec<bool>,
}

impl PolygonConfig {
    pub fn empty(edges: usize) -> Self {
        Self { open: vec![false; edges] }
    }

    pub fn xor(&self, other: &PolygonConfig) -> PolygonConfig {
        PolygonConfig { open: self.open.iter().zip(&other.open).map(|(a, b)| a ^ b).collect() }
    }

    /// Every vertex meets 0 or 2 open edges.
    pub fn is_even(&self, lat: &TorusHexLattice) -> bool {
        let mut deg = vec![0u8; lat.vertex_count()];
        for (e, &o) in lat.edges().iter().zip(&self.open) {
            if o {
                deg[e.black] += 1;
                deg[e.white] += 1;
            }
        }
        deg.iter().all(|&d| d % 2 == 0)
    }

    pub fn count_of_kind(&self, lat: &TorusHexLattice, kind: EdgeKind) -> usize {
        lat.edges().iter().zip(&self.open).filter(|(e, &o)| o && e.kind == kind).count()
    }

    fn mask(&self) -> u128 {
        self.open.iter().enumerate().filter(|(_, &o)| o).fold(0, |m, (i, _)| m | 1u128 << i)
    }
}

/// Fundamental cycles of a BFS spanning tree; `|E| - |V| + 1` elements.
pub fn cycle_space_basis(lat: &TorusHexLattice) -> Vec<PolygonConfig> {
    let nv = lat.vertex_count();
    let mut parent_edge: Vec<Option<usize>> = vec![None; nv];
    let mut visited = vec![false; nv];
    let mut depth = vec![0usize; nv];
    let mut in_tree = vec![false; lat.edge_count()];
    let mut queue = std::collections::VecDeque::from([0usize]);
    visited[0] = true;
    while let Some(v) = queue.pop_front() {
        for id in lat.incident_edges(v) {
            let e = lat.edges()[id];
            let u = if e.black == v { e.white } else { e.black };
            if !visited[u] {
                visited[u] = true;
                parent_edge[u] = Some(id);
                depth[u] = depth[v] + 1;
                in_tree[id] = true;
                queue.push_back(u);
            }
        }
    }
    let other = |id: usize, v: usize| {
        let e = lat.edges()[id];
        if e.black == v {
            e.white
        } else {
            e.black
        }
    };
    let mut basis = Vec::new();
    for (id, e) in lat.edges().iter().enumerate() {
        if in_tree[id] {
            continue;
        }
        let mut cfg = PolygonConfig::empty(lat.edge_count());
        cfg.open[id] = true;
        let (mut u, mut v) = (e.black, e.white);
        while u != v {
            if depth[u] < depth[v] {
                std::mem::swap(&mut u, &mut v);
            }
            let pe = parent_edge[u].expect("non-root vertex has a parent");
            cfg.open[pe] ^= true;
            u = other(pe, u);
        }
        basis.push(cfg);
    }
    basis
}

fn check_polygon_n(lat: &TorusHexLattice) -> Result<()> {
    if lat.n() > MAX_POLYGON_N {
        Err(HexError::EnumerationTooLarge { n: lat.n(), max: MAX_POLYGON_N })
    } else {
        Ok(())
    }
}

/// Calls `visit(edge_mask, half_edge_mask)` for every even subgraph.
fn for_each_even(lat: &TorusHexLattice, mut visit: impl FnMut(u128, u128)) {
    let basis: Vec<u128> = cycle_space_basis(lat).iter().map(PolygonConfig::mask).collect();
    let spread = |m: u128| (0..64).filter(|i| m >> i & 1 == 1).fold(0u128, |h, i| h | 3u128 << (2 * i));
    let half: Vec<u128> = basis.iter().map(|&m| spread(m)).collect();
    let (mut cur, mut cur_half) = (0u128, 0u128);
    visit(cur, cur_half);
    for g in 1u64..1 << basis.len() {
        let bit = g.trailing_zeros() as usize;
        cur ^= basis[bit];
        cur_half ^= half[bit];
        visit(cur, cur_half);
    }
}

/// All even subgraphs, in Gray-code order.
pub fn polygon_configs(lat: &TorusHexLattice) -> Result<Vec<PolygonConfig>> {
    check_polygon_n(lat)?;
    let mut out = Vec::new();
    for_each_even(lat, |m, _| {
        out.push(PolygonConfig { open: (0..lat.edge_count()).map(|i| m >> i & 1 == 1).collect() });
    });
    Ok(out)
}

fn kind_masks(lat: &TorusHexLattice) -> ([u128; 3], [u128; 3]) {
    let mut edge = [0u128; 3];
    let mut half = [0u128; 3];
    for (i, e) in lat.edges().iter().enumerate() {
        edge[e.kind.index()] |= 1 << i;
        half[e.kind.index()] |= 3 << (2 * i);
    }
    (edge, half)
}

/// `Z_n(P)` as a sum over even subgraphs, with signed edge weights `sq = (alpha, beta, gamma)`.
pub fn brute_z_signed(lat: &TorusHexLattice, sq: [f64; 3]) -> Result<f64> {
    check_polygon_n(lat)?;
    let (masks, _) = kind_masks(lat);
    let mut z = 0.0;
    for_each_even(lat, |m, _| {
        z += (0..3).map(|k| sq[k].powi((m & masks[k]).count_ones() as i32)).product::<f64>();
    });
    Ok(z)
}

/// `Z_n(P) = sum_pi alpha^|pi(a)| beta^|pi(b)| gamma^|pi(c)|`.
pub fn brute_z(lat: &TorusHexLattice, params: &PolygonParams) -> Result<f64> {
    brute_z_signed(lat, params.as_array())
}

/// `Z_{e<->f}` for an arbitrary half-edge set with boundary `{M_e, M_f}`, as
/// `sum_pi' w(H(pi') xor halves)`. Per kind the half-edge count of every term is even,
/// so the weight is `prod_s sq_s^(h_s / 2)` and signed `sq` are allowed.
pub fn brute_z_ef_halves(lat: &TorusHexLattice, halves: &[HalfEdge], sq: [f64; 3]) -> Result<f64> {
    check_polygon_n(lat)?;
    let (mids, verts) = half_edge_boundary(lat, halves);
    if mids.len() != 2 || !verts.is_empty() {
        return Err(HexError::BadPathBoundary(format!("odd midpoints {mids:?}, odd vertices {verts:?}")));
    }
    let (ke, kf) = (lat.edges()[mids[0]].kind, lat.edges()[mids[1]].kind);
    if ke != kf {
        return Err(HexError::UnsupportedPair { e: mids[0], f: mids[1] });
    }
    let ell = halves.iter().fold(0u128, |m, h| m ^ 1u128 << h.id());
    Ok(z_with_defect(lat, ell, sq))
}

fn z_with_defect(lat: &TorusHexLattice, ell: u128, sq: [f64; 3]) -> f64 {
    let (_, hmasks) = kind_masks(lat);
    let mut z = 0.0;
    for_each_even(lat, |_, h| {
        let x = h ^ ell;
        z += (0..3).map(|k| sq[k].powi(((x & hmasks[k]).count_ones() / 2) as i32)).product::<f64>();
    });
    z
}

pub fn brute_z_ef(lat: &TorusHexLattice, path: &CorrelationPath, params: &PolygonParams) -> Result<f64> {
    brute_z_ef_halves(lat, &path.half_edges, params.as_array())
}

/// `M_n(e, f) = Z_{e<->f} / Z_n(P)` with signed squared weights.
pub fn brute_m_signed(lat: &TorusHexLattice, e: usize, f: usize, sq: [f64; 3]) -> Result<f64> {
    let path = build_path(lat, e, f)?;
    Ok(brute_z_ef_halves(lat, &path.half_edges, sq)? / brute_z_signed(lat, sq)?)
}

pub fn brute_m(lat: &TorusHexLattice, e: usize, f: usize, params: &PolygonParams) -> Result<f64> {
    brute_m_signed(lat, e, f, params.as_array())
}

/// Weighted sum over perfect matchings of a graph given as `(u, v, weight)` triples.
pub fn matching_sum(vertex_count: usize, edges: &[(usize, usize, f64)]) -> f64 {
    if vertex_count % 2 == 1 {
        return 0.0;
    }
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); vertex_count];
    for &(u, v, w) in edges {
        adj[u].push((v, w));
        adj[v].push((u, w));
    }
    fn rec(adj: &[Vec<(usize, f64)>], matched: &mut [bool]) -> f64 {
        let Some(v) = matched.iter().position(|&m| !m) else {
            return 1.0;
        };
        matched[v] = true;
        let mut s = 0.0;
        for &(u, w) in &adj[v] {
            if !matched[u] {
                matched[u] = true;
                s += w * rec(adj, matched);
                matched[u] = false;
            }
        }
        matched[v] = false;
        s
    }
    rec(&adj, &mut vec![false; vertex_count])
}

/// `Z_n(D) = sum_D A^|D(v)| B^|D(NE)| C^|D(NW)|` over perfect matchings of `F_n`.
pub fn brute_dimer_z(fg: &FisherGraph, w: &DimerWeights) -> Result<f64> {
    if fg.n() > MAX_SMALL_N {
        return Err(HexError::EnumerationTooLarge { n: fg.n(), max: MAX_SMALL_N });
    }
    let weights = fg.edge_weights(w);
    let edges: Vec<_> = fg.graph().edges().iter().zip(&weights).map(|(e, &x)| (e.tail, e.head, x)).collect();
    Ok(matching_sum(fg.graph().vertex_count(), &edges))
}

/// `<sigma_e sigma_f>` of the 1-2 model as a sum over all `2^(3n^2)` edge spins with
/// vertex factors `1 + A s_b s_c + B s_a s_c + C s_a s_b`.
pub fn brute_one_two_corr(lat: &TorusHexLattice, p: &OneTwoParams, e: usize, f: usize) -> Result<f64> {
    if lat.n() > MAX_SMALL_N {
        return Err(HexError::EnumerationTooLarge { n: lat.n(), max: MAX_SMALL_N });
    }
    lat.edge(e)?;
    lat.edge(f)?;
    let [a, b, c] = p.abc();
    let inc: Vec<[usize; 3]> = (0..lat.vertex_count()).map(|v| lat.incident_edges(v)).collect();
    let (mut num, mut den) = (0.0, 0.0);
    for s in 0u32..1 << lat.edge_count() {
        let spin = |i: usize| if s >> i & 1 == 1 { -1.0 } else { 1.0 };
        let w: f64 = inc
            .iter()
            .map(|&[ea, eb, ec]| {
                let (sa, sb, sc) = (spin(ea), spin(eb), spin(ec));
                1.0 + a * sb * sc + b * sa * sc + c * sa * sb
            })
            .product();
        den += w;
        num += w * spin(e) * spin(f);
    }
    Ok(num / den)
}

/// Half-edges of both halves of every edge in `cfg`, plus those of a path; used by
/// the path-independence checks.
pub fn config_half_edges(cfg: &PolygonConfig) -> Vec<HalfEdge> {
    cfg.open
        .iter()
        .enumerate()
        .filter(|(_, &o)| o)
        .flat_map(|(i, _)| [HalfEdge { edge: i, side: Color::Black }, HalfEdge { edge: i, side: Color::White }])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_hex_torus, nw_partner};
    use crate::params::HalfEdgeWeights;

    #[test]
    fn basis_sizes_and_closure() {
        for n in 1..=3 {
            let lat = build_hex_torus(n).unwrap();
            let basis = cycle_space_basis(&lat);
            assert_eq!(basis.len(), n * n + 1);
            assert!(basis.iter().all(|b| b.is_even(&lat)));
            let all = polygon_configs(&lat).unwrap();
            assert_eq!(all.len(), 1 << (n * n + 1));
            assert!(all.iter().all(|c| c.is_even(&lat)));
            let distinct: std::collections::HashSet<_> = all.iter().collect();
            assert_eq!(distinct.len(), all.len());
        }
    }

    #[test]
    fn unit_weights_count_even_subgraphs() {
        let lat = build_hex_torus(2).unwrap();
        assert_eq!(brute_z(&lat, &PolygonParams::unit()).unwrap(), 32.0);
    }

    #[test]
    fn n1_closed_form() {
        // three parallel edges a, b, c: even subsets are {}, {a,b}, {a,c}, {b,c}
        let lat = build_hex_torus(1).unwrap();
        let p = PolygonParams::new(2.0, 3.0, 5.0).unwrap();
        assert_eq!(brute_z(&lat, &p).unwrap(), 1.0 + 6.0 + 10.0 + 15.0);
    }

    #[test]
    fn rejects_large_tori() {
        let lat = build_hex_torus(5).unwrap();
        assert!(matches!(brute_z(&lat, &PolygonParams::unit()), Err(HexError::EnumerationTooLarge { .. })));
    }

    #[test]
    fn dimer_matches_polygon() {
        let lat = build_hex_torus(2).unwrap();
        let fg = FisherGraph::new(&lat);
        let p = PolygonParams::new(0.7, 1.9, 0.4).unwrap();
        let zd = brute_dimer_z(&fg, &p.dimer_weights()).unwrap();
        let zp = brute_z(&lat, &p).unwrap();
        assert!((zd - zp).abs() < 1e-10 * zp);
    }

    #[test]
    fn matching_parity() {
        assert_eq!(matching_sum(3, &[(0, 1, 1.0), (1, 2, 1.0)]), 0.0);
        assert_eq!(matching_sum(4, &[(0, 1, 2.0), (2, 3, 3.0), (0, 3, 5.0), (1, 2, 7.0)]), 6.0 + 35.0);
    }

    #[test]
    fn unit_weights_give_m_one() {
        let lat = build_hex_torus(3).unwrap();
        let e = lat.edge_id(0, 0, EdgeKind::B);
        for k in 1..3 {
            let f = nw_partner(&lat, e, k).unwrap();
            assert!((brute_m(&lat, e, f, &PolygonParams::unit()).unwrap() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn path_independence() {
        // adding any even subgraph to the path does not change Z_{e<->f}
        let lat = build_hex_torus(2).unwrap();
        let e = lat.edge_id(0, 1, EdgeKind::B);
        let f = nw_partner(&lat, e, 1).unwrap();
        let path = build_path(&lat, e, f).unwrap();
        let sq = [0.6, 1.7, 2.3];
        let base = brute_z_ef_halves(&lat, &path.half_edges, sq).unwrap();
        for cfg in polygon_configs(&lat).unwrap().iter().skip(1).take(8) {
            let mut halves = path.half_edges.clone();
            for h in config_half_edges(cfg) {
                if let Some(i) = halves.iter().position(|x| *x == h) {
                    halves.remove(i);
                } else {
                    halves.push(h);
                }
            }
            let z = brute_z_ef_halves(&lat, &halves, sq).unwrap();
            assert!((z - base).abs() < 1e-12 * base);
        }
        let broken = &path.half_edges[..3];
        assert!(matches!(brute_z_ef_halves(&lat, broken, sq), Err(HexError::BadPathBoundary(_))));
    }

    #[test]
    fn one_two_identity() {
        let lat = build_hex_torus(2).unwrap();
        let e = lat.edge_id(0, 0, EdgeKind::B);
        let f = nw_partner(&lat, e, 1).unwrap();
        let corr = brute_one_two_corr(&lat, &OneTwoParams::new(4.0, 2.0, 1.0).unwrap(), e, f).unwrap();
        let p = PolygonParams::new(15.0 / 7.0, 5.0 / 21.0, 3.0 / 35.0).unwrap();
        let m = brute_m(&lat, e, f, &p).unwrap();
        assert!((corr - m).abs() < 1e-12 * m.abs(), "{corr} vs {m}");
    }

    #[test]
    fn reciprocal_symmetry() {
        let lat = build_hex_torus(2).unwrap();
        let e = lat.edge_id(1, 0, EdgeKind::B);
        let f = nw_partner(&lat, e, 1).unwrap();
        let (a, b, c) = (0.8, 2.5, 0.3);
        let m = brute_m(&lat, e, f, &PolygonParams::new(a, b, c).unwrap()).unwrap();
        let m2 = brute_m(&lat, e, f, &PolygonParams::new(a, 1.0 / b, 1.0 / c).unwrap()).unwrap();
        assert!((m - m2).abs() < 1e-10);
    }

    #[test]
    fn path_xor_path_is_the_plain_sum() {
        let lat = build_hex_torus(2).unwrap();
        let e = lat.edge_id(0, 0, EdgeKind::B);
        let f = nw_partner(&lat, e, 1).unwrap();
        let path = build_path(&lat, e, f).unwrap();
        let p = HalfEdgeWeights::new(1.3, 0.7, 2.0).unwrap().polygon_params();
        let ell = path.half_edges.iter().fold(0u128, |m, h| m ^ 1u128 << h.id());
        let z = brute_z(&lat, &p).unwrap();
        assert!((z_with_defect(&lat, ell ^ ell, p.as_array()) - z).abs() < 1e-12 * z);
        assert!(brute_z_ef(&lat, &path, &p).unwrap() > 0.0);
    }
}
