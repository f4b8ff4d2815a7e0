//! Plain-text adjacency listing: one line per edge,
//! `edge_id u v kind weight orientation crossing`.

use std::fmt::Write as _;

use super::dimer::{DimerGraph, EdgePart, EdgeRole};
use super::hex::{EdgeKind, TorusHexLattice};

fn triangle_kind(opposite: EdgeKind) -> &'static str {
    match opposite {
        EdgeKind::A => "vertical",
        EdgeKind::B => "ne",
        EdgeKind::C => "nw",
    }
}

pub fn dimer_edge_kind(role: &EdgeRole) -> String {
    match role {
        EdgeRole::Triangle { opposite, .. } => triangle_kind(*opposite).to_string(),
        EdgeRole::Lattice { kind, part, .. } => {
            let suffix = match part {
                EdgePart::Whole => "",
                EdgePart::WhiteThird => "_white",
                EdgePart::Middle => "_mid",
                EdgePart::BlackThird => "_black",
            };
            format!("{}{}", kind.letter(), suffix)
        }
    }
}

/// Dimer graph listing; `u -> v` is the Kasteleyn orientation, so the orientation
/// column is always `+`.
pub fn export_dimer(g: &DimerGraph, weights: &[f64]) -> String {
    let mut out = String::new();
    for (id, (e, w)) in g.edges().iter().zip(weights).enumerate() {
        let _ = writeln!(
            out,
            "{id} {} {} {} {w:.16e} + {}",
            e.tail,
            e.head,
            dimer_edge_kind(&e.role),
            e.crossing().label()
        );
    }
    out
}

/// `H_n` listing with `u` black, `v` white and polygon weights per kind. Lattice
/// edges carry no orientation (`0`); crossings refer to the seams at row/column 0.
pub fn export_hex(lat: &TorusHexLattice, weights: [f64; 3]) -> String {
    let mut out = String::new();
    let n = lat.n();
    for (id, e) in lat.edges().iter().enumerate() {
        let crossing = match e.kind {
            EdgeKind::B if e.p == 0 && n > 0 => "x+",
            EdgeKind::C if e.q == 0 => "y+",
            _ => "none",
        };
        let _ = writeln!(
            out,
            "{id} {} {} {} {:.16e} 0 {crossing}",
            e.black,
            e.white,
            e.kind.letter(),
            weights[e.kind.index()]
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_hex_torus, AugFisherGraph};
    use crate::params::HalfEdgeWeights;

    #[test]
    fn listing_has_one_line_per_edge() {
        let lat = build_hex_torus(2).unwrap();
        let af = AugFisherGraph::new(&lat, HalfEdgeWeights::new(1.0, 2.0, 1.0).unwrap()).unwrap();
        let text = export_dimer(af.graph(), af.weights());
        assert_eq!(text.lines().count(), 60);
        let line = text.lines().find(|l| l.contains(" b_white ")).unwrap();
        let cols: Vec<&str> = line.split_whitespace().collect();
        assert_eq!(cols.len(), 7);
        assert_eq!(cols[4].parse::<f64>().unwrap(), 0.5);
        assert_eq!(text.lines().filter(|l| l.ends_with("x+")).count(), 2);

        let hex = export_hex(&lat, [1.0, 2.0, 3.0]);
        assert_eq!(hex.lines().count(), 12);
    }
}
