//! Infinite-volume quantities: Fourier entries of the limiting inverse Kasteleyn
//! matrix, the path perturbation, the limiting squared order parameter and the
//! long-range order estimate.
//!
//! Convention: for vertices `(P1, r)` and `(P2, s)` of the infinite augmented graph,
//! with `(dp, dq) = P2 - P1`,
//!
//! `K^-1((P1, r), (P2, s)) = (1 / 4 pi^2) ∬ z^-dp w^-dq [K_1(z, w)^-1]_{r,s} dtheta dphi`,
//!
//! where `K_1(z, w)` is the 12 x 12 augmented fundamental-domain matrix. Summing over
//! the `n`-th roots of `theta` and `nu` instead of integrating gives `K_n(theta, nu)^-1`
//! exactly.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{HexError, Result};
use crate::kasteleyn::assemble_kn_aug;
use crate::lattice::{build_hex_torus, build_path, AugFisherGraph, CorrelationPath, EdgeKind, EdgeRole, PERIOD_LABELS};
use crate::params::{HalfEdgeWeights, PolygonParams};
use crate::skewlinalg::{det_complex, det_real_log, inverse_complex, ComplexMatrix};
use crate::spectral::{classify, Phase, DEFAULT_CRITICAL_TOL};

/// Default quadrature resolution per torus axis.
pub const DEFAULT_GRID: usize = 256;
/// Default largest separation, in path periods.
pub const DEFAULT_MAX_SEP: usize = 12;
/// Supercritical convergence: successive relative change below this.
pub const PLATEAU_RTOL: f64 = 1e-6;
/// Subcritical convergence: values below this.
pub const DECAY_FLOOR: f64 = 1e-8;

const L: usize = AugFisherGraph::LABELS;
type Block = [[Complex64; L]; L];

/// The 12 x 12 augmented matrix `K_1(z, w)`, with the edge list audited once.
#[derive(Debug, Clone)]
pub struct AugmentedK1 {
    eps: HalfEdgeWeights,
    edges: Vec<(usize, usize, f64, [i32; 2])>,
}

impl AugmentedK1 {
    pub fn new(eps: HalfEdgeWeights) -> Result<Self> {
        let lat = build_hex_torus(1)?;
        let af = AugFisherGraph::new(&lat, eps)?;
        let one = Complex64::new(1.0, 0.0);
        // runs the orientation audit
        assemble_kn_aug(&af, one, one)?;
        let edges = af
            .graph()
            .edges()
            .iter()
            .zip(af.weights())
            .map(|(e, &x)| (e.tail, e.head, x, e.wrap))
            .collect();
        Ok(Self { eps, edges })
    }

    pub fn eps(&self) -> &HalfEdgeWeights {
        &self.eps
    }

    pub fn matrix(&self, z: Complex64, w: Complex64) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(L, L);
        for &(t, h, x, [kx, ky]) in &self.edges {
            let phase = z.powi(kx) * w.powi(ky);
            m.add(t, h, phase * x);
            m.add(h, t, -phase.inv() * x);
        }
        m
    }

    pub fn inverse(&self, z: Complex64, w: Complex64) -> Result<Block> {
        let inv = inverse_complex(&self.matrix(z, w)).map_err(|e| match e {
            HexError::Singular { .. } => HexError::CriticalProximity(format!(
                "K_1 is singular at z = {z:.6}, w = {w:.6}"
            )),
            other => other,
        })?;
        let mut b = [[Complex64::new(0.0, 0.0); L]; L];
        for (r, row) in b.iter_mut().enumerate() {
            for (s, x) in row.iter_mut().enumerate() {
                *x = inv.get(r, s);
            }
        }
        Ok(b)
    }

    /// `det K_1(z, w)`.
    pub fn det(&self, z: Complex64, w: Complex64) -> Complex64 {
        det_complex(&self.matrix(z, w)).expect("square")
    }
}

/// Node `j` of a `grid`-point rule on the circle, shifted by half a step when `twist = -1`.
fn node(j: usize, grid: usize, twist: i8) -> Complex64 {
    let off = if twist < 0 { 0.5 } else { 0.0 };
    Complex64::from_polar(1.0, TAU * (j as f64 + off) / grid as f64)
}

fn mirror(j: usize, grid: usize, twist: i8) -> usize {
    if twist < 0 {
        grid - 1 - j
    } else {
        (grid - j) % grid
    }
}

/// `w`-averaged inverses `(1/N) sum_w w^-dq K_1^-1(z_j, w)` for every `z` node and every
/// `|dq| <= max_dq`.
#[derive(Debug, Clone)]
pub struct FourierKinvTable {
    grid: usize,
    max_dq: usize,
    twist: (i8, i8),
    /// `moments[dq + max_dq][jz]`.
    moments: Vec<Vec<Block>>,
}

impl FourierKinvTable {
    /// Uniform `grid x grid` torus rule.
    pub fn build(eps: &HalfEdgeWeights, grid: usize, max_dq: usize) -> Result<Self> {
        Self::build_twisted(eps, grid, max_dq, 1, 1)
    }

    /// Rule on the `grid`-th roots of `theta` and `nu`; for `grid = n` the entries are
    /// those of `K_n(theta, nu)^-1`.
    pub fn build_twisted(eps: &HalfEdgeWeights, grid: usize, max_dq: usize, theta: i8, nu: i8) -> Result<Self> {
        if grid == 0 {
            return Err(HexError::InvalidParameter("grid must be positive".into()));
        }
        if theta.abs() != 1 || nu.abs() != 1 {
            return Err(HexError::InvalidParameter("twists must be +1 or -1".into()));
        }
        let k1 = AugmentedK1::new(*eps)?;
        let nq = 2 * max_dq + 1;
        let zero = [[Complex64::new(0.0, 0.0); L]; L];
        // conjugation maps the node z_j to its mirror, so half of the rows suffice
        let half: Vec<usize> = (0..grid).filter(|&j| j <= mirror(j, grid, theta)).collect();
        let computed: Vec<(usize, Vec<Block>)> = half
            .par_iter()
            .map(|&jz| {
                let z = node(jz, grid, theta);
                let mut acc = vec![zero; nq];
                for jw in 0..grid {
                    let w = node(jw, grid, nu);
                    let inv = k1.inverse(z, w)?;
                    for (slot, m) in acc.iter_mut().enumerate() {
                        let dq = slot as i32 - max_dq as i32;
                        let ph = w.powi(-dq) / grid as f64;
                        for r in 0..L {
                            for s in 0..L {
                                m[r][s] += ph * inv[r][s];
                            }
                        }
                    }
                }
                Ok((jz, acc))
            })
            .collect::<Result<_>>()?;
        let mut moments = vec![vec![zero; grid]; nq];
        for (jz, acc) in computed {
            let jm = mirror(jz, grid, theta);
            for (slot, m) in acc.into_iter().enumerate() {
                let mut conj = zero;
                for r in 0..L {
                    for s in 0..L {
                        conj[r][s] = m[r][s].conj();
                    }
                }
                moments[slot][jz] = m;
                if jm != jz {
                    moments[slot][jm] = conj;
                }
            }
        }
        Ok(Self { grid, max_dq, twist: (theta, nu), moments })
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    /// Limiting `K^-1` entry with row `(P, r)` and column `(P + (dp, dq), s)`.
    pub fn entry(&self, dp: i64, dq: i64, r: usize, s: usize) -> Result<Complex64> {
        if dq.unsigned_abs() as usize > self.max_dq {
            return Err(HexError::InvalidParameter(format!("|dq| = {} exceeds table range {}", dq.abs(), self.max_dq)));
        }
        if r >= L || s >= L {
            return Err(HexError::InvalidParameter(format!("labels must be below {L}")));
        }
        let row = &self.moments[(dq + self.max_dq as i64) as usize];
        let mut sum = Complex64::new(0.0, 0.0);
        for (jz, m) in row.iter().enumerate() {
            let z = node(jz, self.grid, self.twist.0);
            sum += z.powi(-(dp as i32)) * m[r][s];
        }
        Ok(sum / self.grid as f64)
    }

    /// `(1 / 2 pi) ∫ K_1^-1(z_j, e^{i phi}) dphi` at the `jz`-th node.
    pub fn w_average(&self, jz: usize) -> &Block {
        &self.moments[self.max_dq][jz]
    }
}

fn require_power_grid(grid: usize) -> Result<()> {
    if grid < 64 || !grid.is_power_of_two() {
        return Err(HexError::InvalidParameter(format!("grid must be a power of two >= 64, got {grid}")));
    }
    Ok(())
}

fn require_off_critical(params: &PolygonParams) -> Result<Phase> {
    let v = classify(params.alpha, params.beta, params.gamma, DEFAULT_CRITICAL_TOL)?;
    if v.phase == Phase::Critical {
        return Err(HexError::CriticalProximity(format!(
            "({}, {}, {}) is critical: {} vanishes",
            params.alpha,
            params.beta,
            params.gamma,
            v.zero_factor.map_or("?", |i| i.name())
        )));
    }
    Ok(v.phase)
}

/// One limiting entry of `K_n^-1` by uniform torus quadrature.
pub fn fourier_kinv(params: &PolygonParams, dp: i64, dq: i64, vs: usize, vr: usize, grid: usize) -> Result<Complex64> {
    require_power_grid(grid)?;
    require_off_critical(params)?;
    let table = FourierKinvTable::build(&params.half_edge_weights(), grid, dq.unsigned_abs() as usize)?;
    table.entry(dp, dq, vr, vs)
}

/// The perturbation `X` on `V_ell`: `K' - K` restricted to the endpoints of the path
/// thirds, with vertices given relative to the first period's domain.
#[derive(Debug, Clone, PartialEq)]
pub struct PathPerturbation {
    /// `(dp, dq, label)` for each vertex of `V_ell`, in path order.
    pub vertices: Vec<(i64, i64, usize)>,
    /// Row-major `X`.
    pub x: Vec<f64>,
    /// `X(v_{2k}, v_{2k+1}) = +-(eps - 1/eps)` for the `k`-th path third.
    pub lambdas: Vec<f64>,
    /// Half-edge weight of the path third at each vertex.
    pub vertex_eps: Vec<f64>,
    /// `prod_g (eps_g - 1/eps_g)^2`.
    pub det_x: f64,
}

impl PathPerturbation {
    pub fn dim(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_zero(&self) -> bool {
        self.x.iter().all(|&v| v == 0.0)
    }

    /// `det X` by elimination, for comparison with `det_x`.
    pub fn det_dense(&self) -> f64 {
        det_real_log(self.dim(), &self.x).to_f64()
    }
}

/// Builds `X` for a path of `af`.
pub fn build_x(af: &AugFisherGraph, path: &CorrelationPath) -> Result<PathPerturbation> {
    if path.e_ell.is_empty() {
        return Err(HexError::EmptyPath);
    }
    let g = af.graph();
    let n = g.n() as i64;
    let (p0, q0) = (path.start.0 as i64, path.start.1 as i64);
    let periods = path.periods as i64;
    if n < periods + 3 {
        return Err(HexError::TorusTooSmall { got: n as usize, min: path.periods + 3 });
    }
    // path vertices sit in domains -1..=periods along p and -1..=1 along q
    let unwrap = |d: i64, hi: i64| {
        let d = d.rem_euclid(n);
        if d > hi {
            d - n
        } else {
            d
        }
    };
    let vertices: Vec<(i64, i64, usize)> = path
        .v_ell
        .iter()
        .map(|&id| {
            let v = g.vertices()[id];
            (unwrap(v.p as i64 - p0, periods + 1), unwrap(v.q as i64 - q0, 1), v.label)
        })
        .collect();
    let d = vertices.len();
    let mut x = vec![0.0; d * d];
    let mut lambdas = Vec::with_capacity(path.e_ell.len());
    let mut vertex_eps = vec![0.0; d];
    let mut det_x = 1.0;
    for (k, &id) in path.e_ell.iter().enumerate() {
        let e = g.edges()[id];
        let EdgeRole::Lattice { kind, .. } = e.role else {
            return Err(HexError::PathEdgeMissing(id));
        };
        let eps = af.eps().get(kind);
        let lam = eps - 1.0 / eps;
        let (i, j) = (2 * k, 2 * k + 1);
        let (first, second) = (path.v_ell[i], path.v_ell[j]);
        let sign = if (e.tail, e.head) == (first, second) {
            1.0
        } else if (e.tail, e.head) == (second, first) {
            -1.0
        } else {
            return Err(HexError::PathEdgeMissing(id));
        };
        x[i * d + j] = sign * lam;
        x[j * d + i] = -sign * lam;
        lambdas.push(sign * lam);
        vertex_eps[i] = eps;
        vertex_eps[j] = eps;
        det_x *= lam * lam;
    }
    Ok(PathPerturbation { vertices, x, lambdas, vertex_eps, det_x })
}

/// `X` for the canonical path of `periods` periods.
pub fn canonical_perturbation(eps: &HalfEdgeWeights, periods: usize) -> Result<PathPerturbation> {
    if periods == 0 {
        return Err(HexError::EmptyPath);
    }
    let n = periods + 3;
    let lat = build_hex_torus(n)?;
    let af = AugFisherGraph::new(&lat, *eps)?;
    let e = lat.edge_id(0, 0, EdgeKind::B);
    let f = lat.edge_id(periods as i64, 0, EdgeKind::B);
    build_x(&af, &build_path(&lat, e, f)?)
}

/// `K_ell`: the limiting `K^-1` on `V_ell`.
pub fn k_ell(table: &FourierKinvTable, pert: &PathPerturbation) -> Result<ComplexMatrix> {
    let d = pert.dim();
    let mut m = ComplexMatrix::zeros(d, d);
    for (i, &(p1, q1, r)) in pert.vertices.iter().enumerate() {
        for (j, &(p2, q2, s)) in pert.vertices.iter().enumerate() {
            m.set(i, j, table.entry(p2 - p1, q2 - q1, r, s)?);
        }
    }
    Ok(m)
}

/// `det(D + Lambda K_ell)` with `D = diag(1/eps)` and `Lambda = D X`; equal to
/// `det(I + X K_ell) prod_g eps_g^-2` without the large prefactor.
pub fn m2_from_kell(pert: &PathPerturbation, kell: &ComplexMatrix) -> Result<Complex64> {
    let d = pert.dim();
    let mut a = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        let dinv = 1.0 / pert.vertex_eps[i];
        for j in 0..d {
            let mut s = Complex64::new(0.0, 0.0);
            for k in 0..d {
                let x = pert.x[i * d + k];
                if x != 0.0 {
                    s += kell.get(k, j) * x;
                }
            }
            let diag = if i == j { dinv } else { 0.0 };
            a.set(i, j, s * dinv + diag);
        }
    }
    det_complex(&a)
}

/// `det(I + X K_ell) prod_g eps_g^-2`, the unscaled form.
pub fn m2_from_kell_unscaled(pert: &PathPerturbation, kell: &ComplexMatrix) -> Result<Complex64> {
    let d = pert.dim();
    let mut a = ComplexMatrix::identity(d);
    for i in 0..d {
        for k in 0..d {
            let x = pert.x[i * d + k];
            if x == 0.0 {
                continue;
            }
            for j in 0..d {
                a.add(i, j, kell.get(k, j) * x);
            }
        }
    }
    let pref: f64 = pert.vertex_eps.iter().map(|e| 1.0 / e).product();
    Ok(det_complex(&a)? * pref)
}

/// `lim M(e, f)^2` for two NW edges `sep` periods apart, from a prebuilt table.
pub fn m_inf_squared_with(table: &FourierKinvTable, eps: &HalfEdgeWeights, sep: usize) -> Result<f64> {
    let pert = canonical_perturbation(eps, sep)?;
    let kell = k_ell(table, &pert)?;
    Ok(m2_from_kell(&pert, &kell)?.re)
}

/// `lim M(e, f)^2` for two NW edges `sep` periods apart.
pub fn m_inf_squared(params: &PolygonParams, sep: usize, grid: usize) -> Result<f64> {
    require_power_grid(grid)?;
    require_off_critical(params)?;
    let eps = params.half_edge_weights();
    let table = FourierKinvTable::build(&eps, grid, 0)?;
    m_inf_squared_with(&table, &eps, sep)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayRow {
    pub sep: usize,
    pub m2: f64,
    /// `|m2 - previous| / |m2|`; NaN in the first row.
    pub delta_rel: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LambdaEstimate {
    pub value: f64,
    pub phase: Phase,
    pub table: Vec<DecayRow>,
    pub converged: bool,
}

/// `lim M^2` at separations `1..=max_sep`; the estimate is the last value.
pub fn lambda_estimate(params: &PolygonParams, max_sep: usize, grid: usize) -> Result<LambdaEstimate> {
    require_power_grid(grid)?;
    let phase = require_off_critical(params)?;
    if max_sep == 0 {
        return Err(HexError::InvalidParameter("max_sep must be positive".into()));
    }
    let eps = params.half_edge_weights();
    let table = FourierKinvTable::build(&eps, grid, 0)?;
    let values: Vec<f64> = (1..=max_sep)
        .into_par_iter()
        .map(|k| m_inf_squared_with(&table, &eps, k))
        .collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(max_sep);
    for (i, &m2) in values.iter().enumerate() {
        let delta_rel = if i == 0 { f64::NAN } else { (m2 - values[i - 1]).abs() / m2.abs() };
        rows.push(DecayRow { sep: i + 1, m2, delta_rel });
    }
    let last = *rows.last().unwrap();
    let converged = match phase {
        Phase::Supercritical => last.delta_rel < PLATEAU_RTOL,
        _ => last.m2.abs() < DECAY_FLOOR,
    };
    Ok(LambdaEstimate { value: last.m2, phase, table: rows, converged })
}

/// `psi(zeta) = D + Lambda (1 / 2 pi) ∫ K_1^-1(zeta, e^{i phi})_{V,V} dphi` over one period,
/// rows and columns in path order b3, b4, a1, a2, a3, a4, b1, b2.
pub fn toeplitz_symbol(params: &PolygonParams, zeta: Complex64, grid: usize) -> Result<ComplexMatrix> {
    if ((zeta.norm() - 1.0).abs()) > 1e-12 {
        return Err(HexError::InvalidParameter("zeta must lie on the unit circle".into()));
    }
    if grid < 4 {
        return Err(HexError::InvalidParameter(format!("grid must be at least 4, got {grid}")));
    }
    require_off_critical(params)?;
    let eps = params.half_edge_weights();
    let k1 = AugmentedK1::new(eps)?;
    let mut avg = ComplexMatrix::zeros(8, 8);
    for jw in 0..grid {
        let inv = k1.inverse(zeta, node(jw, grid, 1))?;
        for (i, &r) in PERIOD_LABELS.iter().enumerate() {
            for (j, &s) in PERIOD_LABELS.iter().enumerate() {
                avg.add(i, j, inv[r][s] / grid as f64);
            }
        }
    }
    symbol_from_average(&canonical_perturbation(&eps, 1)?, &avg)
}

fn symbol_from_average(pert: &PathPerturbation, avg: &ComplexMatrix) -> Result<ComplexMatrix> {
    let mut psi = ComplexMatrix::zeros(8, 8);
    for i in 0..8 {
        let dinv = 1.0 / pert.vertex_eps[i];
        psi.set(i, i, Complex64::new(dinv, 0.0));
        for k in 0..8 {
            let x = pert.x[i * 8 + k];
            if x != 0.0 {
                for j in 0..8 {
                    psi.add(i, j, avg.get(k, j) * (x * dinv));
                }
            }
        }
    }
    Ok(psi)
}

/// `det` of the `sep`-block truncation of the block Toeplitz matrix with symbol `psi`,
/// whose `(j1, j2)` block is `(1 / 2 pi) ∮ zeta^-(j2 - j1) psi(zeta)`.
pub fn toeplitz_m2(params: &PolygonParams, sep: usize, grid: usize) -> Result<f64> {
    require_power_grid(grid)?;
    require_off_critical(params)?;
    if sep == 0 {
        return Err(HexError::EmptyPath);
    }
    let eps = params.half_edge_weights();
    let table = FourierKinvTable::build(&eps, grid, 0)?;
    let pert = canonical_perturbation(&eps, 1)?;
    let symbols: Vec<ComplexMatrix> = (0..grid)
        .map(|jz| {
            let w = table.w_average(jz);
            let mut avg = ComplexMatrix::zeros(8, 8);
            for (i, &r) in PERIOD_LABELS.iter().enumerate() {
                for (j, &s) in PERIOD_LABELS.iter().enumerate() {
                    avg.set(i, j, w[r][s]);
                }
            }
            symbol_from_average(&pert, &avg)
        })
        .collect::<Result<_>>()?;
    let coeff = |delta: i64, i: usize, j: usize| {
        let mut s = Complex64::new(0.0, 0.0);
        for (jz, psi) in symbols.iter().enumerate() {
            s += node(jz, grid, 1).powi(-(delta as i32)) * psi.get(i, j);
        }
        s / grid as f64
    };
    let d = 8 * sep;
    let mut big = ComplexMatrix::zeros(d, d);
    for b1 in 0..sep {
        for b2 in 0..sep {
            for i in 0..8 {
                for j in 0..8 {
                    big.set(8 * b1 + i, 8 * b2 + j, coeff(b2 as i64 - b1 as i64, i, j));
                }
            }
        }
    }
    Ok(det_complex(&big)?.re)
}

/// Largest change of any `K_ell` entry (separation `sep`) between grids `g` and `2g`.
pub fn grid_doubling_defect(params: &PolygonParams, sep: usize, grid: usize) -> Result<f64> {
    require_off_critical(params)?;
    let eps = params.half_edge_weights();
    let pert = canonical_perturbation(&eps, sep)?;
    let coarse = k_ell(&FourierKinvTable::build(&eps, grid, 0)?, &pert)?;
    let fine = k_ell(&FourierKinvTable::build(&eps, 2 * grid, 0)?, &pert)?;
    Ok(coarse.data().iter().zip(fine.data()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
}

/// `det K_1^aug(z, w) / P(z, w)`, which should equal `(eps_a eps_b eps_c)^-4`.
pub fn aug_det_ratio(params: &PolygonParams, z: Complex64, w: Complex64) -> Result<Complex64> {
    let k1 = AugmentedK1::new(params.half_edge_weights())?;
    let p = crate::spectral::char_poly_params(params).eval(z, w);
    Ok(k1.det(z, w) / p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kasteleyn::{assemble_kn_aug, correlation_m};
    use crate::lattice::nw_partner;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn bloch_sum_reproduces_finite_inverse() {
        let params = PolygonParams::new(0.7, 1.3, 0.9).unwrap();
        let eps = params.half_edge_weights();
        let n = 3;
        let lat = build_hex_torus(n).unwrap();
        let af = AugFisherGraph::new(&lat, eps).unwrap();
        for (theta, nu) in [(1i8, 1i8), (-1, 1), (1, -1), (-1, -1)] {
            let k = assemble_kn_aug(&af, c(theta as f64), c(nu as f64)).unwrap();
            let inv = inverse_complex(&k.matrix).unwrap();
            let t = FourierKinvTable::build_twisted(&eps, n, 2, theta, nu).unwrap();
            let g = af.graph();
            for (i, vi) in g.vertices().iter().enumerate().step_by(5) {
                for (j, vj) in g.vertices().iter().enumerate().step_by(3) {
                    let dp = vj.p as i64 - vi.p as i64;
                    let dq = vj.q as i64 - vi.q as i64;
                    let got = t.entry(dp, dq, vi.label, vj.label).unwrap();
                    assert!((got - inv.get(i, j)).norm() < 1e-11, "({theta},{nu}) {i} {j}: {got} vs {}", inv.get(i, j));
                }
            }
        }
    }

    #[test]
    fn sectors_agree_in_the_limit() {
        let eps = PolygonParams::new(0.5, 0.8, 1.4).unwrap().half_edge_weights();
        let base = FourierKinvTable::build_twisted(&eps, 128, 0, 1, 1).unwrap();
        for (theta, nu) in [(-1i8, 1i8), (1, -1), (-1, -1)] {
            let t = FourierKinvTable::build_twisted(&eps, 128, 0, theta, nu).unwrap();
            for dp in [-2, 0, 3] {
                for (r, s) in [(0, 1), (5, 6), (2, 7)] {
                    let a = base.entry(dp, 0, r, s).unwrap();
                    let b = t.entry(dp, 0, r, s).unwrap();
                    assert!((a - b).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn augmented_determinant_factor() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let p = PolygonParams::new(rng.gen_range(0.2..3.0), rng.gen_range(0.2..3.0), rng.gen_range(0.2..3.0)).unwrap();
            let e = p.half_edge_weights();
            let want = (e.eps[0] * e.eps[1] * e.eps[2]).powi(-4);
            let z = Complex64::from_polar(1.0, rng.gen_range(0.0..TAU));
            let w = Complex64::from_polar(1.0, rng.gen_range(0.0..TAU));
            let r = aug_det_ratio(&p, z, w).unwrap();
            assert!((r - want).norm() < 1e-9 * want, "{r} vs {want}");
        }
    }

    #[test]
    fn perturbation_shape() {
        let eps = HalfEdgeWeights::new(2.0, 3.0, 1.0).unwrap();
        let x = canonical_perturbation(&eps, 1).unwrap();
        assert_eq!(x.dim(), 8);
        let mags: Vec<f64> = x.lambdas.iter().map(|l| l.abs()).collect();
        assert_eq!(mags.iter().filter(|&&m| (m - 1.5).abs() < 1e-15).count(), 2);
        assert_eq!(mags.iter().filter(|&&m| (m - 8.0 / 3.0).abs() < 1e-15).count(), 2);
        let want = 1.5f64.powi(4) * (8.0f64 / 3.0).powi(4);
        assert!((x.det_x - want).abs() < 1e-12 * want);
        assert!((x.det_dense() - want).abs() < 1e-12 * want);
        assert!(x.vertices.iter().all(|&(_, dq, _)| dq == 0));

        let unit = canonical_perturbation(&HalfEdgeWeights::unit(), 3).unwrap();
        assert!(unit.is_zero());
        assert_eq!(unit.dim(), 24);
    }

    #[test]
    fn unit_path_weights_give_one() {
        let p = PolygonParams::new(1.0, 1.0, 0.5).unwrap();
        for k in [1, 3] {
            assert!((m_inf_squared(&p, k, 64).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn scaled_and_unscaled_forms_agree() {
        let p = PolygonParams::new(0.6, 0.9, 1.2).unwrap();
        let eps = p.half_edge_weights();
        let table = FourierKinvTable::build(&eps, 64, 0).unwrap();
        let pert = canonical_perturbation(&eps, 2).unwrap();
        let kell = k_ell(&table, &pert).unwrap();
        let a = m2_from_kell(&pert, &kell).unwrap();
        let b = m2_from_kell_unscaled(&pert, &kell).unwrap();
        assert!((a - b).norm() < 1e-10 * (1.0 + a.norm()));
        assert!(a.im.abs() < 1e-10);
    }

    #[test]
    fn finite_correlation_approaches_limit() {
        let p = PolygonParams::new(0.6, 0.9, 1.2).unwrap();
        let limit = m_inf_squared(&p, 2, 128).unwrap();
        let gap = |n: usize| {
            let lat = build_hex_torus(n).unwrap();
            let e = lat.edge_id(0, 0, EdgeKind::B);
            let f = nw_partner(&lat, e, 2).unwrap();
            (correlation_m(n, e, f, &p).unwrap().raw_value.powi(2) - limit).abs()
        };
        let (g4, g8) = (gap(4), gap(8));
        assert!(g8 < g4, "{g8} !< {g4}");
        assert!(g8 < 1e-3);
    }

    #[test]
    fn toeplitz_route_matches() {
        let p = PolygonParams::new(0.6, 0.9, 1.2).unwrap();
        for k in [1, 2] {
            let a = m_inf_squared(&p, k, 64).unwrap();
            let b = toeplitz_m2(&p, k, 64).unwrap();
            assert!((a - b).abs() < 1e-10 * (1.0 + a.abs()), "{k}: {a} vs {b}");
        }
        let psi = toeplitz_symbol(&PolygonParams::new(1.0, 1.0, 0.7).unwrap(), c(1.0), 64).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((psi.get(i, j) - want).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn refuses_critical_and_bad_grids() {
        let x = 3f64.powf(-0.5);
        let crit = PolygonParams::new(x, x, x).unwrap();
        assert!(matches!(m_inf_squared(&crit, 1, 64), Err(HexError::CriticalProximity(_))));
        let p = PolygonParams::new(0.5, 0.5, 0.5).unwrap();
        assert!(m_inf_squared(&p, 1, 100).is_err());
        assert!(fourier_kinv(&p, 0, 0, 0, 1, 32).is_err());
    }
}
