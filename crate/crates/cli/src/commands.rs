use std::f64::consts::TAU;

use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;

use hexpoly::kasteleyn::{correlation_m, partition_z_log};
use hexpoly::lattice::{build_hex_torus, export_dimer, export_hex, nw_partner, AugFisherGraph, EdgeKind, FisherGraph};
use hexpoly::limits::lambda_estimate;
use hexpoly::spectral::{char_poly_params, classify, from_one_two, ising_couplings, torus_min, Gamma2};
use hexpoly::verify::{all_passed, run_suite, Level, VerifyOptions};
use hexpoly::PolygonParams;

use crate::table::{fmt_f64, Cell, Table};
use crate::{CorrArgs, GraphArgs, GraphKind, LevelArg, LimitArgs, Output, PhaseArgs, PointArgs, SpectralArgs, VerifyArgs, ZnArgs};

/// `x` or `lo:hi:steps` (inclusive, evenly spaced).
pub fn parse_axis(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [x] => Ok(vec![x.trim().parse().with_context(|| format!("bad number {x:?}"))?]),
        [lo, hi, steps] => {
            let lo: f64 = lo.trim().parse().with_context(|| format!("bad range start {lo:?}"))?;
            let hi: f64 = hi.trim().parse().with_context(|| format!("bad range end {hi:?}"))?;
            let steps: usize = steps.trim().parse().with_context(|| format!("bad step count {steps:?}"))?;
            match steps {
                0 => bail!("step count must be positive"),
                1 => Ok(vec![lo]),
                _ => Ok((0..steps).map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64).collect()),
            }
        }
        _ => bail!("expected a number or lo:hi:steps, got {s:?}"),
    }
}

/// `k` or `lo:hi` (inclusive).
pub fn parse_int_range(s: &str) -> Result<Vec<usize>> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [k] => Ok(vec![k.trim().parse().with_context(|| format!("bad integer {k:?}"))?]),
        [lo, hi] => {
            let lo: usize = lo.trim().parse().with_context(|| format!("bad range start {lo:?}"))?;
            let hi: usize = hi.trim().parse().with_context(|| format!("bad range end {hi:?}"))?;
            if hi < lo {
                bail!("empty range {s:?}");
            }
            Ok((lo..=hi).collect())
        }
        _ => bail!("expected k or lo:hi, got {s:?}"),
    }
}

fn params(p: &PointArgs) -> Result<PolygonParams> {
    Ok(PolygonParams::new(p.alpha, p.beta, p.gamma)?)
}

fn gamma2_cell(g: Gamma2) -> Cell {
    Cell::Num(g.finite().unwrap_or(f64::INFINITY))
}

pub fn phase(a: &PhaseArgs) -> Result<Output> {
    let axis = |v: &Option<String>, name: &str| -> Result<Vec<f64>> {
        match (v, &a.sweep) {
            (Some(s), _) | (None, Some(s)) => parse_axis(s),
            (None, None) => Err(anyhow!("--{name} or --sweep is required")),
        }
    };
    let (al, be, ga) = (axis(&a.alpha, "alpha")?, axis(&a.beta, "beta")?, axis(&a.gamma, "gamma")?);
    let mut points = Vec::with_capacity(al.len() * be.len() * ga.len());
    for &x in &al {
        for &y in &be {
            points.extend(ga.iter().map(|&z| [x, y, z]));
        }
    }
    let rows: Vec<Vec<Cell>> = points
        .par_iter()
        .map(|&[x, y, z]| {
            let v = classify(x, y, z, a.tol)?;
            let i = v.indicators;
            Ok(vec![
                x.into(),
                y.into(),
                z.into(),
                i.u.into(),
                i.v.into(),
                i.s.into(),
                i.t.into(),
                v.boundaries.gamma1.into(),
                gamma2_cell(v.boundaries.gamma2),
                v.phase.name().into(),
            ])
        })
        .collect::<Result<_>>()?;
    let mut t = Table::new(vec!["alpha", "beta", "gamma", "U", "V", "S", "T", "gamma1", "gamma2", "phase"]);
    rows.into_iter().for_each(|r| t.push(r));
    Ok(Output { table: t, ok: true })
}

pub fn corr(a: &CorrArgs) -> Result<Output> {
    let p = params(&a.point)?;
    let seps = parse_int_range(&a.sep)?;
    let lat = build_hex_torus(a.n)?;
    if a.n < 2 {
        bail!("corr needs n >= 2");
    }
    let e = lat.edge_id(0, 0, EdgeKind::B);
    let mut t = Table::new(vec!["n", "sep", "M", "M2", "pf_k11", "pf_k1m1", "pf_km11", "pf_km1m1", "status"]);
    for k in seps {
        if k == 0 || k >= a.n {
            bail!("separation must lie in 1..={}, got {k}", a.n - 1);
        }
        let f = nw_partner(&lat, e, k)?;
        let r = correlation_m(a.n, e, f, &p)?;
        // sector order (1,1), (-1,1), (1,-1), (-1,-1)
        let pf = |i: usize| Cell::Text(r.pf_modified[i].to_scientific());
        t.push(vec![
            a.n.into(),
            k.into(),
            r.raw_value.into(),
            (r.raw_value * r.raw_value).into(),
            pf(0),
            pf(2),
            pf(1),
            pf(3),
            if r.critical_proximity { "critical_proximity" } else { "ok" }.into(),
        ]);
    }
    Ok(Output { table: t, ok: true })
}

pub fn zn(a: &ZnArgs) -> Result<Output> {
    let p = params(&a.point)?;
    let mut t = Table::new(vec!["n", "alpha", "beta", "gamma", "ln_Z", "Z"]);
    for &n in &a.n {
        let ln = partition_z_log(n, &p)?;
        t.push(vec![n.into(), p.alpha.into(), p.beta.into(), p.gamma.into(), ln.into(), ln.exp().into()]);
    }
    Ok(Output { table: t, ok: true })
}

pub fn spectral(a: &SpectralArgs) -> Result<Output> {
    if let Some(v) = &a.one_two {
        if v.len() != 3 {
            bail!("--one-two takes exactly three values a,b,c");
        }
        let m = from_one_two(v[0], v[1], v[2])?;
        let letters = ["a", "b", "c"];
        let order: Vec<&str> = m.order.iter().map(|&i| letters[i]).collect();
        let eps = |i: usize| m.eps_squared.map_or(Cell::Text("undefined".into()), |e| Cell::Num(e[i]));
        let mut t = Table::new(vec!["a", "b", "c", "A", "B", "C", "eps2_a", "eps2_b", "eps2_c", "case", "order"]);
        t.push(vec![
            v[0].into(),
            v[1].into(),
            v[2].into(),
            m.abc[0].into(),
            m.abc[1].into(),
            m.abc[2].into(),
            eps(0),
            eps(1),
            eps(2),
            m.case.label().into(),
            order.join(">").into(),
        ]);
        return Ok(Output { table: t, ok: true });
    }
    let (al, be, ga) = (a.alpha.unwrap_or_default(), a.beta.unwrap_or_default(), a.gamma.unwrap_or_default());
    let p = PolygonParams::new(al, be, ga)?;
    let v = classify(al, be, ga, hexpoly::spectral::DEFAULT_CRITICAL_TOL)?;
    let w = p.dimer_weights();
    let m = torus_min(&char_poly_params(&p), a.grid)?;
    let mut headers = vec![
        "alpha", "beta", "gamma", "A", "B", "C", "U", "V", "S", "T", "gamma1", "gamma2", "phase", "min_P", "argmin_theta",
        "argmin_phi", "grid",
    ];
    let i = v.indicators;
    let mut row: Vec<Cell> = vec![
        al.into(),
        be.into(),
        ga.into(),
        w.a.into(),
        w.b.into(),
        w.c.into(),
        i.u.into(),
        i.v.into(),
        i.s.into(),
        i.t.into(),
        v.boundaries.gamma1.into(),
        gamma2_cell(v.boundaries.gamma2),
        v.phase.name().into(),
        m.value.into(),
        (TAU * m.jz as f64 / a.grid as f64).into(),
        (TAU * m.jw as f64 / a.grid as f64).into(),
        a.grid.into(),
    ];
    if a.ising {
        let c = ising_couplings(al, be, ga)?;
        headers.extend(["J_a", "J_b", "J_c", "ising_indicator"]);
        row.extend([c.j[0].into(), c.j[1].into(), c.j[2].into(), c.indicator.into()]);
    }
    let mut t = Table::new(headers);
    t.push(row);
    Ok(Output { table: t, ok: true })
}

pub fn limit(a: &LimitArgs) -> Result<Output> {
    let p = params(&a.point)?;
    let est = lambda_estimate(&p, a.max_sep, a.grid)?;
    let mut t = Table::new(vec!["sep", "m2", "delta_rel"]);
    for r in &est.table {
        t.push(vec![r.sep.into(), r.m2.into(), r.delta_rel.into()]);
    }
    eprintln!(
        "phase {}: lambda estimate {} ({})",
        est.phase.name(),
        fmt_f64(est.value),
        if est.converged { "converged" } else { "not converged" }
    );
    Ok(Output { table: t, ok: true })
}

pub fn verify(a: &VerifyArgs) -> Result<Output> {
    let opts = VerifyOptions {
        level: match a.level {
            LevelArg::Fast => Level::Fast,
            LevelArg::Full => Level::Full,
        },
        corrupt_orientation: a.corrupt_orientation,
        seed: a.seed,
    };
    let outcomes = run_suite(&opts);
    let mut t = Table::new(vec!["id", "name", "status", "seconds", "detail"]);
    for o in &outcomes {
        t.push(vec![o.id.into(), o.name.into(), o.status.label().into(), o.seconds.into(), o.detail.clone().into()]);
    }
    Ok(Output { table: t, ok: all_passed(&outcomes) })
}

pub fn graph(a: &GraphArgs) -> Result<Output> {
    let p = PolygonParams::new(a.alpha, a.beta, a.gamma)?;
    let lat = build_hex_torus(a.n)?;
    let text = match a.kind {
        GraphKind::Hex => export_hex(&lat, p.as_array()),
        GraphKind::Fisher => {
            let fg = FisherGraph::new(&lat);
            export_dimer(fg.graph(), &fg.edge_weights(&p.dimer_weights()))
        }
        GraphKind::Aug => {
            let af = AugFisherGraph::new(&lat, p.half_edge_weights())?;
            export_dimer(af.graph(), af.weights())
        }
    };
    let mut t = Table::new(vec!["edge_id", "u", "v", "kind", "weight", "orientation", "crossing"]);
    for line in text.lines() {
        let f: Vec<&str> = line.split_whitespace().collect();
        let int = |s: &str| -> Result<Cell> { Ok(Cell::Int(s.parse()?)) };
        t.push(vec![
            int(f[0])?,
            int(f[1])?,
            int(f[2])?,
            f[3].into(),
            Cell::Num(f[4].parse()?),
            f[5].into(),
            f[6].into(),
        ]);
    }
    Ok(Output { table: t, ok: true })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_parsing() {
        assert_eq!(parse_axis("0.5").unwrap(), vec![0.5]);
        assert_eq!(parse_axis("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(parse_axis("0:1:0").is_err());
        assert!(parse_axis("a").is_err());
        assert_eq!(parse_int_range("2:4").unwrap(), vec![2, 3, 4]);
        assert!(parse_int_range("4:2").is_err());
    }
}
