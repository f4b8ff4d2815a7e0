//! Characteristic polynomial `P(z, w)`, the criticality indicators `U, V, S, T`,
//! phase boundaries and classification, and parameter maps.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{HexError, Result};
use crate::params::{DimerWeights, OneTwoParams, PolygonParams};

/// Default relative band for [`classify`].
pub const DEFAULT_CRITICAL_TOL: f64 = 1e-9;

/// Laurent polynomial `sum c[j+1][k+1] z^j w^k` for `j, k` in `{-1, 0, 1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaurentPoly2 {
    pub coeff: [[f64; 3]; 3],
}

impl LaurentPoly2 {
    pub fn coeff(&self, j: i32, k: i32) -> f64 {
        self.coeff[(j + 1) as usize][(k + 1) as usize]
    }

    /// Reciprocal: `c[j][k] = c[-j][-k]`.
    pub fn is_reciprocal(&self) -> bool {
        (0..3).all(|j| (0..3).all(|k| self.coeff[j][k] == self.coeff[2 - j][2 - k]))
    }

    pub fn eval(&self, z: Complex64, w: Complex64) -> Complex64 {
        let zs = [z.inv(), Complex64::new(1.0, 0.0), z];
        let ws = [w.inv(), Complex64::new(1.0, 0.0), w];
        let mut s = Complex64::new(0.0, 0.0);
        for j in 0..3 {
            for k in 0..3 {
                if self.coeff[j][k] != 0.0 {
                    s += zs[j] * ws[k] * self.coeff[j][k];
                }
            }
        }
        s
    }

    /// `P(e^{i theta}, e^{i phi})` for a reciprocal polynomial, which is real on the torus.
    pub fn eval_torus(&self, theta: f64, phi: f64) -> f64 {
        let mut s = self.coeff[1][1];
        for (j, k) in [(1, 0), (0, 1), (1, 1), (1, -1)] {
            let c = self.coeff(j, k);
            if c != 0.0 {
                s += 2.0 * c * (j as f64 * theta + k as f64 * phi).cos();
            }
        }
        s
    }
}

fn poly_from_terms(constant: f64, w_term: f64, z_term: f64, cross: f64) -> LaurentPoly2 {
    let mut c = [[0.0; 3]; 3];
    c[1][1] = constant;
    c[1][2] = w_term;
    c[1][0] = w_term;
    c[2][1] = z_term;
    c[0][1] = z_term;
    // w/z and z/w
    c[0][2] = cross;
    c[2][0] = cross;
    LaurentPoly2 { coeff: c }
}

/// `P(z, w) = 1 + A^4 + B^4 + C^4 + (A^2C^2 - B^2)(w + 1/w) + (A^2B^2 - C^2)(z + 1/z)
/// + (B^2C^2 - A^2)(w/z + z/w)`.
pub fn char_poly_closed(w: &DimerWeights) -> LaurentPoly2 {
    let (a2, b2, c2) = (w.a * w.a, w.b * w.b, w.c * w.c);
    poly_from_terms(1.0 + a2 * a2 + b2 * b2 + c2 * c2, a2 * c2 - b2, a2 * b2 - c2, b2 * c2 - a2)
}

/// The same polynomial written in `(alpha, beta, gamma)`.
pub fn char_poly_params(p: &PolygonParams) -> LaurentPoly2 {
    let (al, be, ga) = (p.alpha, p.beta, p.gamma);
    poly_from_terms(
        1.0 + al * al * be * be + al * al * ga * ga + be * be * ga * ga,
        al * ga * (be * be - 1.0),
        al * be * (ga * ga - 1.0),
        be * ga * (al * al - 1.0),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Indicator {
    U,
    V,
    S,
    T,
}

impl Indicator {
    pub fn name(&self) -> &'static str {
        match self {
            Indicator::U => "U",
            Indicator::V => "V",
            Indicator::S => "S",
            Indicator::T => "T",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalityIndicators {
    pub u: f64,
    pub v: f64,
    pub s: f64,
    pub t: f64,
}

impl CriticalityIndicators {
    pub fn as_array(&self) -> [(Indicator, f64); 4] {
        [(Indicator::U, self.u), (Indicator::V, self.v), (Indicator::S, self.s), (Indicator::T, self.t)]
    }

    pub fn product(&self) -> f64 {
        self.u * self.v * self.s * self.t
    }

    /// The indicator of smallest magnitude.
    pub fn smallest(&self) -> (Indicator, f64) {
        self.as_array().into_iter().min_by(|a, b| a.1.abs().total_cmp(&b.1.abs())).unwrap()
    }

    pub fn min_abs(&self) -> f64 {
        self.smallest().1.abs()
    }
}

pub fn uvst(alpha: f64, beta: f64, gamma: f64) -> CriticalityIndicators {
    let (ab, bg, ga) = (alpha * beta, beta * gamma, gamma * alpha);
    CriticalityIndicators { u: ab + bg + ga - 1.0, v: -ab + bg + ga + 1.0, s: ab - bg + ga + 1.0, t: ab + bg - ga + 1.0 }
}

/// Upper boundary `gamma_2`, infinite when `alpha = beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gamma2 {
    Finite(f64),
    Infinite,
}

impl Gamma2 {
    pub fn exceeds(&self, gamma: f64) -> bool {
        match self {
            Gamma2::Finite(g) => gamma < *g,
            Gamma2::Infinite => true,
        }
    }

    pub fn below(&self, gamma: f64) -> bool {
        match self {
            Gamma2::Finite(g) => gamma > *g,
            Gamma2::Infinite => false,
        }
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            Gamma2::Finite(g) => Some(*g),
            Gamma2::Infinite => None,
        }
    }
}

impl fmt::Display for Gamma2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gamma2::Finite(g) => write!(f, "{g:.16e}"),
            Gamma2::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseBoundaries {
    pub gamma1: f64,
    pub gamma2: Gamma2,
}

/// `gamma_1 = |1 - alpha beta| / (alpha + beta)`, `gamma_2 = (1 + alpha beta) / |alpha - beta|`.
pub fn phase_boundaries(alpha: f64, beta: f64) -> PhaseBoundaries {
    let gamma1 = (1.0 - alpha * beta).abs() / (alpha + beta);
    let gamma2 = if alpha == beta {
        Gamma2::Infinite
    } else {
        Gamma2::Finite((1.0 + alpha * beta) / (alpha - beta).abs())
    };
    PhaseBoundaries { gamma1, gamma2 }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    Supercritical,
    SubcriticalR1,
    SubcriticalR2,
    SubcriticalR3,
    SubcriticalR4,
    Critical,
}

impl Phase {
    pub fn name(&self) -> &'static str {
        match self {
            Phase::Supercritical => "supercritical",
            Phase::SubcriticalR1 => "subcritical_R1",
            Phase::SubcriticalR2 => "subcritical_R2",
            Phase::SubcriticalR3 => "subcritical_R3",
            Phase::SubcriticalR4 => "subcritical_R4",
            Phase::Critical => "critical",
        }
    }

    pub fn is_subcritical(&self) -> bool {
        matches!(self, Phase::SubcriticalR1 | Phase::SubcriticalR2 | Phase::SubcriticalR3 | Phase::SubcriticalR4)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseVerdict {
    pub phase: Phase,
    /// The vanishing indicator when `phase` is `Critical`.
    pub zero_factor: Option<Indicator>,
    pub indicators: CriticalityIndicators,
    pub boundaries: PhaseBoundaries,
}

/// Critical if `min |U|,|V|,|S|,|T| <= tol (1 + alpha beta + beta gamma + gamma alpha)`;
/// otherwise supercritical for `gamma_1 < gamma < gamma_2` and one of the four
/// subcritical components elsewhere.
pub fn classify(alpha: f64, beta: f64, gamma: f64, tol: f64) -> Result<PhaseVerdict> {
    PolygonParams::new(alpha, beta, gamma)?;
    if !(tol >= 0.0) {
        return Err(HexError::InvalidParameter(format!("tolerance must be nonnegative, got {tol}")));
    }
    let indicators = uvst(alpha, beta, gamma);
    let boundaries = phase_boundaries(alpha, beta);
    let scale = 1.0 + alpha * beta + beta * gamma + gamma * alpha;
    let (which, value) = indicators.smallest();
    let (phase, zero_factor) = if value.abs() <= tol * scale {
        (Phase::Critical, Some(which))
    } else if boundaries.gamma1 < gamma && boundaries.gamma2.exceeds(gamma) {
        (Phase::Supercritical, None)
    } else if gamma < boundaries.gamma1 {
        (if alpha * beta < 1.0 { Phase::SubcriticalR1 } else { Phase::SubcriticalR2 }, None)
    } else if alpha < beta {
        (Phase::SubcriticalR3, None)
    } else {
        (Phase::SubcriticalR4, None)
    };
    Ok(PhaseVerdict { phase, zero_factor, indicators, boundaries })
}

/// `{(a, b, g), (a, 1/b, 1/g), (1/a, b, 1/g), (1/a, 1/b, g)}`.
pub fn symmetry_orbit(alpha: f64, beta: f64, gamma: f64) -> [[f64; 3]; 4] {
    [
        [alpha, beta, gamma],
        [alpha, 1.0 / beta, 1.0 / gamma],
        [1.0 / alpha, beta, 1.0 / gamma],
        [1.0 / alpha, 1.0 / beta, gamma],
    ]
}

/// Sign structure of the half-edge weights of a 1-2 model, for sorted `a >= b >= c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OneTwoCase {
    /// `a < b + c`, `a^2 < b^2 + c^2`: imaginary, all `|eps| < 1`.
    ImaginaryInside,
    /// `a < b + c`, `a^2 = b^2 + c^2`: imaginary, `|eps_a| = 1`.
    ImaginaryUnit,
    /// `a < b + c`, `a^2 > b^2 + c^2`: imaginary, `|eps_a| > 1`.
    ImaginaryOutside,
    /// `a = b + c`: `|eps_a| = inf`, `eps_b = eps_c = 0`.
    Degenerate,
    /// `a > b + c`: real, `|eps_a| > 1`.
    Real,
}

impl OneTwoCase {
    pub fn label(&self) -> &'static str {
        match self {
            OneTwoCase::ImaginaryInside => "a(i)",
            OneTwoCase::ImaginaryUnit => "a(ii)",
            OneTwoCase::ImaginaryOutside => "a(iii)",
            OneTwoCase::Degenerate => "b",
            OneTwoCase::Real => "c",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneTwoMap {
    /// `(A, B, C)` in input order.
    pub abc: [f64; 3],
    /// Signed `(eps_a^2, eps_b^2, eps_c^2)` in input order; `None` in the degenerate case.
    pub eps_squared: Option<[f64; 3]>,
    /// Input indices sorted so that the parameters are nonincreasing.
    pub order: [usize; 3],
    pub case: OneTwoCase,
}

const BOUNDARY_RTOL: f64 = 1e-12;

/// Dimer weights and signed squared half-edge weights of a 1-2 model, classified by
/// the case analysis for sorted parameters.
pub fn from_one_two(a: f64, b: f64, c: f64) -> Result<OneTwoMap> {
    let p = OneTwoParams::new(a, b, c)?;
    let abc = p.abc();
    let x = [a, b, c];
    let mut order = [0, 1, 2];
    order.sort_by(|&i, &j| x[j].total_cmp(&x[i]));
    let (s0, s1, s2) = (x[order[0]], x[order[1]], x[order[2]]);
    let scale = s0.max(1e-300);
    let case = if (s0 - s1 - s2).abs() <= BOUNDARY_RTOL * scale {
        OneTwoCase::Degenerate
    } else if s0 > s1 + s2 {
        OneTwoCase::Real
    } else {
        let d = s0 * s0 - s1 * s1 - s2 * s2;
        if d.abs() <= BOUNDARY_RTOL * scale * scale {
            OneTwoCase::ImaginaryUnit
        } else if d < 0.0 {
            OneTwoCase::ImaginaryInside
        } else {
            OneTwoCase::ImaginaryOutside
        }
    };
    let eps_squared = if case == OneTwoCase::Degenerate || abc.iter().any(|&v| v == 0.0) {
        None
    } else {
        let [ca, cb, cc] = abc;
        Some([cb * cc / ca, ca * cc / cb, ca * cb / cc])
    };
    Ok(OneTwoMap { abc, eps_squared, order, case })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsingCouplings {
    /// `J_s = artanh(sqrt(param_s))`.
    pub j: [f64; 3],
    /// `alpha beta + beta gamma + gamma alpha - 1`; zero on the Ising critical surface.
    pub indicator: f64,
}

/// Couplings of the Ising model whose high-temperature expansion is the polygon model,
/// defined for parameters in `(0, 1)`.
pub fn ising_couplings(alpha: f64, beta: f64, gamma: f64) -> Result<IsingCouplings> {
    PolygonParams::new(alpha, beta, gamma)?;
    for (name, value) in [("alpha", alpha), ("beta", beta), ("gamma", gamma)] {
        if value >= 1.0 {
            return Err(HexError::OutsideHighTemperature { name, value });
        }
    }
    Ok(IsingCouplings {
        j: [alpha.sqrt().atanh(), beta.sqrt().atanh(), gamma.sqrt().atanh()],
        indicator: alpha * beta + beta * gamma + gamma * alpha - 1.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusMin {
    pub value: f64,
    /// Grid indices of the minimizer: `z = e^{2 pi i jz / grid}`.
    pub jz: usize,
    pub jw: usize,
    pub z: Complex64,
    pub w: Complex64,
}

/// Minimum of a reciprocal `P` over the `grid x grid` roots-of-unity lattice, which
/// contains `(+-1, +-1)` for even `grid`. Ties go to the first node in row-major order.
pub fn torus_min(p: &LaurentPoly2, grid: usize) -> Result<TorusMin> {
    if grid < 4 {
        return Err(HexError::InvalidParameter(format!("grid must be at least 4, got {grid}")));
    }
    let angle = |j: usize| TAU * j as f64 / grid as f64;
    let rows: Vec<(f64, usize)> = (0..grid)
        .into_par_iter()
        .map(|jz| {
            let th = angle(jz);
            let mut best = (f64::INFINITY, 0);
            for jw in 0..grid {
                let v = p.eval_torus(th, angle(jw));
                if v < best.0 {
                    best = (v, jw);
                }
            }
            best
        })
        .collect();
    let (mut value, mut jz, mut jw) = (f64::INFINITY, 0, 0);
    for (r, &(v, c)) in rows.iter().enumerate() {
        if v < value {
            (value, jz, jw) = (v, r, c);
        }
    }
    Ok(TorusMin { value, jz, jw, z: Complex64::from_polar(1.0, angle(jz)), w: Complex64::from_polar(1.0, angle(jw)) })
}
