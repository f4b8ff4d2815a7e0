//! Kasteleyn matrices of the Fisher and augmented Fisher graphs, partition functions
//! and two-edge correlations as four-Pfaffian combinations.
//!
//! Rows are ordered domain-major, label-minor. An oriented edge `u -> v` of weight `x`
//! contributes `K(u, v) = x * z^kx * w^ky` and `K(v, u) = -x * z^-kx * w^-ky`, where
//! `(kx, ky)` counts its crossings of the two seams. For `z, w` in `{-1, 1}` the matrix
//! is real antisymmetric.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{HexError, Result};
use crate::lattice::{
    build_hex_torus, build_path, verify_clockwise_odd, AugFisherGraph, CorrelationPath, DimerGraph, EdgePart,
    EdgeRole, FisherGraph,
};
use crate::params::{DimerWeights, HalfEdgeWeights, PolygonParams};
use crate::skewlinalg::{pfaffian_log, ComplexMatrix, SignedLog, SkewMatrix};

/// The four real sectors `(theta, nu)` in the order used throughout.
pub const SECTORS: [(i8, i8); 4] = [(1, 1), (-1, 1), (1, -1), (-1, -1)];

/// Graph whose Kasteleyn matrix is being combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFamily {
    Fisher,
    Augmented,
}

/// Coefficients of `Pf K(theta, nu)` over [`SECTORS`] in `2 Z = sum_i c_i Pf K_i`,
/// calibrated against enumeration for `n = 1..4` with this vertex ordering.
pub const SIGNS_EVEN: [f64; 4] = [-1.0, 1.0, 1.0, 1.0];
/// Odd `n` on the Fisher graph. The augmented graph keeps [`SIGNS_EVEN`] for odd `n`.
pub const SIGNS_FISHER_ODD: [f64; 4] = [-1.0, -1.0, -1.0, 1.0];

pub fn sector_signs(family: GraphFamily, n: usize) -> [f64; 4] {
    match family {
        GraphFamily::Fisher if n % 2 == 1 => SIGNS_FISHER_ODD,
        _ => SIGNS_EVEN,
    }
}

/// Ratio below which a sector Pfaffian counts as numerically zero.
pub const CRITICAL_PF_RATIO: f64 = 1e-13;

/// A modified Kasteleyn matrix with its phase parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct KasteleynAssembly {
    pub matrix: ComplexMatrix,
    pub z: Complex64,
    pub w: Complex64,
    pub n: usize,
    pub labels_per_domain: usize,
}

impl KasteleynAssembly {
    pub fn vertex_index(&self, p: i64, q: i64, label: usize) -> usize {
        let n = self.n as i64;
        ((p.rem_euclid(n) * n + q.rem_euclid(n)) as usize) * self.labels_per_domain + label
    }

    /// Real antisymmetric form; valid for `z, w` in `{-1, 1}`.
    pub fn to_skew(&self) -> Result<SkewMatrix> {
        self.matrix.to_skew()
    }
}

fn check_weights_len(g: &DimerGraph, weights: &[f64]) -> Result<()> {
    if weights.len() != g.edge_count() {
        return Err(HexError::InvalidParameter(format!(
            "{} weights for {} edges",
            weights.len(),
            g.edge_count()
        )));
    }
    Ok(())
}

fn audit(g: &DimerGraph) -> Result<()> {
    let report = verify_clockwise_odd(g);
    if report.is_clockwise_odd() {
        Ok(())
    } else {
        Err(HexError::OrientationAudit(report.offending.len()))
    }
}

/// Complex assembly of an oriented graph with per-edge weights.
pub fn assemble_graph(g: &DimerGraph, weights: &[f64], z: Complex64, w: Complex64) -> Result<KasteleynAssembly> {
    check_weights_len(g, weights)?;
    audit(g)?;
    if z == Complex64::new(0.0, 0.0) || w == Complex64::new(0.0, 0.0) {
        return Err(HexError::InvalidParameter("z and w must be nonzero".into()));
    }
    let d = g.vertex_count();
    let mut m = ComplexMatrix::zeros(d, d);
    for (e, &x) in g.edges().iter().zip(weights) {
        let phase = z.powi(e.wrap[0]) * w.powi(e.wrap[1]);
        m.add(e.tail, e.head, phase * x);
        m.add(e.head, e.tail, -phase.inv() * x);
    }
    Ok(KasteleynAssembly { matrix: m, z, w, n: g.n(), labels_per_domain: g.labels_per_domain() })
}

/// Real antisymmetric assembly for `theta, nu` in `{-1, 1}`.
pub fn assemble_graph_real(g: &DimerGraph, weights: &[f64], theta: i8, nu: i8) -> Result<SkewMatrix> {
    check_weights_len(g, weights)?;
    audit(g)?;
    Ok(assemble_real_unchecked(g, weights, theta, nu))
}

fn assemble_real_unchecked(g: &DimerGraph, weights: &[f64], theta: i8, nu: i8) -> SkewMatrix {
    let mut m = SkewMatrix::zeros(g.vertex_count());
    for (e, &x) in g.edges().iter().zip(weights) {
        let s = f64::from(theta).powi(e.wrap[0]) * f64::from(nu).powi(e.wrap[1]);
        m.add(e.tail, e.head, s * x);
    }
    m
}

/// The fundamental-domain matrix `K(z, w)` of the Fisher graph, written out entry by entry.
pub fn assemble_k1(weights: &DimerWeights, z: Complex64, w: Complex64) -> Result<ComplexMatrix> {
    let weights = DimerWeights::new(weights.a, weights.b, weights.c)?;
    if z == Complex64::new(0.0, 0.0) || w == Complex64::new(0.0, 0.0) {
        return Err(HexError::InvalidParameter("z and w must be nonzero".into()));
    }
    let r = |x: f64| Complex64::new(x, 0.0);
    let (a, b, c) = (r(weights.a), r(weights.b), r(weights.c));
    let o = r(0.0);
    let one = r(1.0);
    ComplexMatrix::from_rows(&[
        vec![o, -c, b, -one, o, o],
        vec![c, o, -a, o, -z.inv(), o],
        vec![-b, a, o, o, o, -w.inv()],
        vec![one, o, o, o, -c, b],
        vec![o, z, o, c, o, -a],
        vec![o, o, w, -b, a, o],
    ])
}

/// Kasteleyn matrix of `F_n` with dimer weights.
pub fn assemble_kn_fisher(fg: &FisherGraph, weights: &DimerWeights, z: Complex64, w: Complex64) -> Result<KasteleynAssembly> {
    assemble_graph(fg.graph(), &fg.edge_weights(weights), z, w)
}

/// Kasteleyn matrix of `AF_n` with its own edge weights.
pub fn assemble_kn_aug(af: &AugFisherGraph, z: Complex64, w: Complex64) -> Result<KasteleynAssembly> {
    assemble_graph(af.graph(), af.weights(), z, w)
}

/// Augmented weights with the outer thirds of `path` changed from `1/eps_s` to `eps_s`.
pub fn path_weights(af: &AugFisherGraph, path: &CorrelationPath) -> Result<Vec<f64>> {
    if path.e_ell.is_empty() {
        return Err(HexError::EmptyPath);
    }
    let mut weights = af.weights().to_vec();
    for &id in &path.e_ell {
        match af.graph().edges().get(id).map(|e| e.role) {
            Some(EdgeRole::Lattice { kind, part: EdgePart::WhiteThird | EdgePart::BlackThird, .. }) => {
                weights[id] = af.eps().get(kind);
            }
            _ => return Err(HexError::PathEdgeMissing(id)),
        }
    }
    Ok(weights)
}

/// `K'`: the entries of the path thirds rescaled by `eps_s^2`, signs and phases kept.
pub fn modify_for_path(k: &KasteleynAssembly, af: &AugFisherGraph, path: &CorrelationPath) -> Result<KasteleynAssembly> {
    let new = path_weights(af, path)?;
    if k.matrix.dim() != af.graph().vertex_count() {
        return Err(HexError::InvalidParameter("assembly does not belong to this graph".into()));
    }
    let mut out = k.clone();
    for &id in &path.e_ell {
        let e = af.graph().edges()[id];
        let scale = new[id] / af.weights()[id];
        let fwd = out.matrix.get(e.tail, e.head);
        let back = out.matrix.get(e.head, e.tail);
        out.matrix.set(e.tail, e.head, fwd * scale);
        out.matrix.set(e.head, e.tail, back * scale);
    }
    Ok(out)
}

/// Pfaffians of the four real sectors, in [`SECTORS`] order.
pub fn sector_pfaffians(g: &DimerGraph, weights: &[f64]) -> Result<[SignedLog; 4]> {
    check_weights_len(g, weights)?;
    audit(g)?;
    let pfs: Vec<SignedLog> = SECTORS
        .par_iter()
        .map(|&(t, v)| pfaffian_log(&assemble_real_unchecked(g, weights, t, v)))
        .collect::<Result<_>>()?;
    Ok([pfs[0], pfs[1], pfs[2], pfs[3]])
}

/// `sum_i c_i Pf_i / 2` with the frozen sign pattern.
pub fn combine(family: GraphFamily, n: usize, pfs: &[SignedLog; 4]) -> SignedLog {
    let mut s = SignedLog::signed_sum(pfs, &sector_signs(family, n));
    s.ln_abs -= std::f64::consts::LN_2;
    s
}

/// True if some sector Pfaffian is numerically zero next to the largest one.
pub fn near_critical(pfs: &[SignedLog; 4]) -> bool {
    let top = pfs.iter().map(|p| p.ln_abs).fold(f64::NEG_INFINITY, f64::max);
    pfs.iter().any(|p| p.is_zero() || p.ln_abs < top + CRITICAL_PF_RATIO.ln())
}

/// `ln Z_n(P)` via the augmented Fisher graph: `Z_n(P) = (alpha beta gamma)^(n^2) Z_n(AD)`.
pub fn partition_z_log(n: usize, params: &PolygonParams) -> Result<f64> {
    let lat = build_hex_torus(n)?;
    let af = AugFisherGraph::new(&lat, params.half_edge_weights())?;
    let pfs = sector_pfaffians(af.graph(), af.weights())?;
    let z_ad = combine(GraphFamily::Augmented, n, &pfs);
    if z_ad.sign <= 0.0 {
        return Err(HexError::CriticalProximity(format!(
            "four-Pfaffian combination is not positive at n = {n}"
        )));
    }
    let restore = (n * n) as f64 * (params.alpha.ln() + params.beta.ln() + params.gamma.ln());
    Ok(z_ad.ln_abs + restore)
}

/// `Z_n(P)`; overflows to infinity for large tori, see [`partition_z_log`].
pub fn partition_z(n: usize, params: &PolygonParams) -> Result<f64> {
    partition_z_log(n, params).map(f64::exp)
}

/// `Z_n(P)` from the Fisher graph directly: `Z_n(D)` with `A = sqrt(beta gamma)` etc.
pub fn partition_z_fisher_log(n: usize, params: &PolygonParams) -> Result<f64> {
    let lat = build_hex_torus(n)?;
    let fg = FisherGraph::new(&lat);
    let pfs = sector_pfaffians(fg.graph(), &fg.edge_weights(&params.dimer_weights()))?;
    let z = combine(GraphFamily::Fisher, n, &pfs);
    if z.sign <= 0.0 {
        return Err(HexError::CriticalProximity(format!(
            "four-Pfaffian combination is not positive at n = {n}"
        )));
    }
    Ok(z.ln_abs)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationResult {
    pub n: usize,
    /// Number of path periods.
    pub sep: usize,
    /// `M_n(e, f)`, computed even when `critical_proximity` is set.
    pub raw_value: f64,
    /// Sector Pfaffians of `K'`, in [`SECTORS`] order.
    pub pf_modified: [SignedLog; 4],
    /// Sector Pfaffians of `K`.
    pub pf_plain: [SignedLog; 4],
    /// `prod_{g in ell} eps_g^-1`.
    pub prefactor: f64,
    pub critical_proximity: bool,
}

impl CorrelationResult {
    /// `None` when a sector Pfaffian vanished numerically.
    pub fn value(&self) -> Option<f64> {
        (!self.critical_proximity).then_some(self.raw_value)
    }
}

/// `M_n(e, f)` for two NW edges joined by the canonical path.
pub fn correlation_m(n: usize, e: usize, f: usize, params: &PolygonParams) -> Result<CorrelationResult> {
    correlation_m_eps(n, e, f, &params.half_edge_weights())
}

pub fn correlation_m_eps(n: usize, e: usize, f: usize, eps: &HalfEdgeWeights) -> Result<CorrelationResult> {
    let lat = build_hex_torus(n)?;
    let path = build_path(&lat, e, f)?;
    let af = AugFisherGraph::new(&lat, *eps)?;
    let modified = path_weights(&af, &path)?;
    let (pf_plain, pf_modified) = rayon::join(
        || sector_pfaffians(af.graph(), af.weights()),
        || sector_pfaffians(af.graph(), &modified),
    );
    let (pf_plain, pf_modified) = (pf_plain?, pf_modified?);
    let prefactor: f64 = path
        .half_edges
        .iter()
        .map(|h| 1.0 / eps.get(lat.edges()[h.edge].kind))
        .product();
    let ratio = combine(GraphFamily::Augmented, n, &pf_modified).div(combine(GraphFamily::Augmented, n, &pf_plain));
    let critical_proximity = near_critical(&pf_plain) || near_critical(&pf_modified);
    Ok(CorrelationResult {
        n,
        sep: path.periods,
        raw_value: prefactor * ratio.to_f64(),
        pf_modified,
        pf_plain,
        prefactor,
        critical_proximity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{nw_partner, EdgeKind};
    use crate::oracle::{brute_m, brute_z};
    use crate::skewlinalg::det_complex;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn k1_printed_entries() {
        let one = c(1.0, 0.0);
        let k = assemble_k1(&DimerWeights::new(1.0, 1.0, 1.0).unwrap(), one, one).unwrap();
        assert_eq!(k.get(0, 1), c(-1.0, 0.0));
        assert_eq!(k.get(4, 1), one);
        assert_eq!(k.get(2, 5), c(-1.0, 0.0));
        assert!(k.to_skew().is_ok());
        let z = c(0.3, 0.8);
        let w = c(-1.1, 0.2);
        let k = assemble_k1(&DimerWeights::new(2.0, 3.0, 5.0).unwrap(), z, w).unwrap();
        assert_eq!(k.get(1, 4), -z.inv());
        assert_eq!(k.get(5, 2), w);
    }

    #[test]
    fn fisher_n1_is_k1() {
        let lat = build_hex_torus(1).unwrap();
        let fg = FisherGraph::new(&lat);
        let wts = DimerWeights::new(1.5, -0.5, 2.5).unwrap();
        let (z, w) = (c(0.6, 0.8), Complex64::from_polar(1.0, 2.0));
        let a = assemble_kn_fisher(&fg, &wts, z, w).unwrap();
        let b = assemble_k1(&wts, z, w).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                assert!((a.matrix.get(i, j) - b.get(i, j)).norm() < 1e-15, "({i},{j})");
            }
        }
    }

    #[test]
    fn real_sectors_are_antisymmetric() {
        let lat = build_hex_torus(2).unwrap();
        let af = AugFisherGraph::new(&lat, HalfEdgeWeights::unit()).unwrap();
        for (t, v) in SECTORS {
            let k = assemble_kn_aug(&af, c(t.into(), 0.0), c(v.into(), 0.0)).unwrap();
            assert_eq!(k.matrix.dim(), 48);
            let s = k.to_skew().unwrap();
            let direct = assemble_graph_real(af.graph(), af.weights(), t, v).unwrap();
            assert_eq!(s, direct);
        }
    }

    #[test]
    fn unit_augmented_entries() {
        let lat = build_hex_torus(2).unwrap();
        let af = AugFisherGraph::new(&lat, HalfEdgeWeights::unit()).unwrap();
        let (z, w) = (Complex64::from_polar(1.0, 0.7), Complex64::from_polar(1.0, -1.9));
        let k = assemble_kn_aug(&af, z, w).unwrap();
        let allowed = [c(1.0, 0.0), z, z.inv(), w, w.inv()];
        for x in k.matrix.data() {
            if x.norm() > 0.0 {
                assert!(allowed.iter().any(|a| (x - a).norm() < 1e-14 || (x + a).norm() < 1e-14));
            }
        }
    }

    #[test]
    fn characteristic_polynomial_at_sample_points() {
        let wts = DimerWeights::new(0.7, 1.3, 0.4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let z = Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
            let w = Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
            let det = det_complex(&assemble_k1(&wts, z, w).unwrap()).unwrap();
            let (a2, b2, c2) = (wts.a * wts.a, wts.b * wts.b, wts.c * wts.c);
            let p = c(1.0 + a2 * a2 + b2 * b2 + c2 * c2, 0.0)
                + (w + w.inv()) * (a2 * c2 - b2)
                + (z + z.inv()) * (a2 * b2 - c2)
                + (w / z + z / w) * (b2 * c2 - a2);
            assert!((det - p).norm() < 1e-10 * p.norm());
        }
    }

    #[test]
    fn calibrated_partition_function() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=4 {
            let lat = build_hex_torus(n).unwrap();
            for _ in 0..3 {
                let p = PolygonParams::new(rng.gen_range(0.2..3.0), rng.gen_range(0.2..3.0), rng.gen_range(0.2..3.0))
                    .unwrap();
                let exact = brute_z(&lat, &p).unwrap();
                let z = partition_z(n, &p).unwrap();
                assert!((z - exact).abs() < 1e-9 * exact, "n={n}: {z} vs {exact}");
                let zf = partition_z_fisher_log(n, &p).unwrap().exp();
                assert!((zf - exact).abs() < 1e-9 * exact, "fisher n={n}: {zf} vs {exact}");
            }
        }
    }

    #[test]
    fn unit_point_counts() {
        for n in 1..=8 {
            let z = partition_z_log(n, &PolygonParams::unit()).unwrap();
            let expected = (n * n + 1) as f64 * std::f64::consts::LN_2;
            assert!((z - expected).abs() < 1e-9, "n={n}");
        }
    }

    #[test]
    fn correlation_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in 2..=3 {
            let lat = build_hex_torus(n).unwrap();
            for _ in 0..3 {
                let p = PolygonParams::new(rng.gen_range(0.2..3.0), rng.gen_range(0.2..3.0), rng.gen_range(0.2..3.0))
                    .unwrap();
                let e = lat.edge_id(rng.gen_range(0..n as i64), rng.gen_range(0..n as i64), EdgeKind::B);
                for k in 1..n {
                    let f = nw_partner(&lat, e, k).unwrap();
                    let exact = brute_m(&lat, e, f, &p).unwrap();
                    let r = correlation_m(n, e, f, &p).unwrap();
                    assert!(!r.critical_proximity);
                    assert!((r.raw_value - exact).abs() < 1e-9 * exact.abs(), "n={n} k={k}: {} vs {exact}", r.raw_value);
                }
            }
        }
    }

    #[test]
    fn path_modification_structure() {
        let lat = build_hex_torus(2).unwrap();
        let e = lat.edge_id(0, 0, EdgeKind::B);
        let path = build_path(&lat, e, nw_partner(&lat, e, 1).unwrap()).unwrap();
        let af = AugFisherGraph::new(&lat, HalfEdgeWeights::new(2.0, 3.0, 0.5).unwrap()).unwrap();
        let one = c(1.0, 0.0);
        let k = assemble_kn_aug(&af, one, c(-1.0, 0.0)).unwrap();
        let kp = modify_for_path(&k, &af, &path).unwrap();
        let changed = k.matrix.data().iter().zip(kp.matrix.data()).filter(|(a, b)| a != b).count();
        assert_eq!(changed, 2 * path.e_ell.len());

        let af1 = AugFisherGraph::new(&lat, HalfEdgeWeights::new(1.0, 1.0, 0.5).unwrap()).unwrap();
        let k1 = assemble_kn_aug(&af1, one, one).unwrap();
        assert_eq!(modify_for_path(&k1, &af1, &path).unwrap(), k1);

        let mut empty = path.clone();
        empty.e_ell.clear();
        assert_eq!(modify_for_path(&k, &af, &empty), Err(HexError::EmptyPath));
    }

    #[test]
    fn flipped_orientation_is_refused() {
        let lat = build_hex_torus(2).unwrap();
        let fg = FisherGraph::new(&lat);
        let g = fg.graph().with_flipped_edge(3);
        let w = fg.edge_weights(&DimerWeights::new(1.0, 1.0, 1.0).unwrap());
        assert!(matches!(assemble_graph_real(&g, &w, 1, 1), Err(HexError::OrientationAudit(2))));
    }

    #[test]
    fn seam_shift_leaves_z_unchanged() {
        let p = PolygonParams::new(0.6, 1.7, 2.2).unwrap();
        for n in 2..=4 {
            let lat = build_hex_torus(n).unwrap();
            let af = AugFisherGraph::new(&lat, p.half_edge_weights()).unwrap();
            let base = combine(GraphFamily::Augmented, n, &sector_pfaffians(af.graph(), af.weights()).unwrap());
            for (sx, sy) in [(1, 0), (0, 1), (1, 1)] {
                let moved = af.graph().with_seams(sx, sy);
                let z = combine(GraphFamily::Augmented, n, &sector_pfaffians(&moved, af.weights()).unwrap());
                assert_eq!(z.sign, 1.0);
                assert!((z.ln_abs - base.ln_abs).abs() < 1e-10, "n={n} seams ({sx},{sy})");
            }
        }
    }
}
