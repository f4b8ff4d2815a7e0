//! The three parameter coordinate systems of the model and the maps between them.
//!
//! * polygon parameters `(alpha, beta, gamma)`, the squared half-edge weights;
//! * half-edge weights `(eps_a, eps_b, eps_c)`;
//! * dimer weights `(A, B, C)` on the Fisher triangles, `A = eps_b * eps_c` and cyclically.
//!
//! 1-2 model weights `(a, b, c)` map to dimer weights via [`OneTwoParams::abc`]; their
//! classification lives in [`crate::spectral`].

use crate::error::{HexError, Result};
use crate::lattice::EdgeKind;

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(HexError::InvalidParameter(format!("{name} must be positive and finite, got {v}")))
    }
}

/// `(alpha, beta, gamma)` = squared half-edge weights of the a/b/c edge types.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolygonParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl PolygonParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        check_positive("alpha", alpha)?;
        check_positive("beta", beta)?;
        check_positive("gamma", gamma)?;
        Ok(Self { alpha, beta, gamma })
    }

    /// The all-ones point, where every even subgraph has weight 1.
    pub fn unit() -> Self {
        Self { alpha: 1.0, beta: 1.0, gamma: 1.0 }
    }

    pub fn get(&self, kind: EdgeKind) -> f64 {
        match kind {
            EdgeKind::A => self.alpha,
            EdgeKind::B => self.beta,
            EdgeKind::C => self.gamma,
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.alpha, self.beta, self.gamma]
    }

    /// Positive square roots.
    pub fn half_edge_weights(&self) -> HalfEdgeWeights {
        HalfEdgeWeights {
            eps: [self.alpha.sqrt(), self.beta.sqrt(), self.gamma.sqrt()],
        }
    }

    pub fn dimer_weights(&self) -> DimerWeights {
        self.half_edge_weights().dimer_weights()
    }
}

/// Half-edge weights `eps_s`, indexed by [`EdgeKind`]. Signs are allowed; zero is not.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfEdgeWeights {
    pub eps: [f64; 3],
}

impl HalfEdgeWeights {
    pub fn new(eps_a: f64, eps_b: f64, eps_c: f64) -> Result<Self> {
        for (name, v) in [("eps_a", eps_a), ("eps_b", eps_b), ("eps_c", eps_c)] {
            if !v.is_finite() || v == 0.0 {
                return Err(HexError::InvalidParameter(format!(
                    "{name} must be finite and nonzero, got {v}"
                )));
            }
        }
        Ok(Self { eps: [eps_a, eps_b, eps_c] })
    }

    pub fn unit() -> Self {
        Self { eps: [1.0; 3] }
    }

    pub fn get(&self, kind: EdgeKind) -> f64 {
        self.eps[kind.index()]
    }

    pub fn polygon_params(&self) -> PolygonParams {
        PolygonParams {
            alpha: self.eps[0] * self.eps[0],
            beta: self.eps[1] * self.eps[1],
            gamma: self.eps[2] * self.eps[2],
        }
    }

    pub fn dimer_weights(&self) -> DimerWeights {
        let [ea, eb, ec] = self.eps;
        DimerWeights { a: eb * ec, b: ea * ec, c: ea * eb }
    }

    /// `eps_a * eps_b * eps_c`.
    pub fn product(&self) -> f64 {
        self.eps.iter().product()
    }
}

/// Fisher-triangle weights: `a` on vertical, `b` on NE and `c` on NW triangle edges.
/// Each weight is named after the lattice edge type of the opposite triangle corner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimerWeights {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl DimerWeights {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        for (name, v) in [("A", a), ("B", b), ("C", c)] {
            if !v.is_finite() || v == 0.0 {
                return Err(HexError::InvalidParameter(format!(
                    "{name} must be finite and nonzero, got {v}"
                )));
            }
        }
        Ok(Self { a, b, c })
    }

    pub fn get(&self, opposite: EdgeKind) -> f64 {
        match opposite {
            EdgeKind::A => self.a,
            EdgeKind::B => self.b,
            EdgeKind::C => self.c,
        }
    }

    /// Inverse of [`HalfEdgeWeights::dimer_weights`]: `eps_a^2 = BC/A` and cyclically.
    /// The squares may be negative, so they are returned as signed reals.
    pub fn eps_squared(&self) -> [f64; 3] {
        [
            self.b * self.c / self.a,
            self.a * self.c / self.b,
            self.a * self.b / self.c,
        ]
    }
}

/// 1-2 model vertex weights `(a, b, c)`: nonnegative, not all zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneTwoParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl OneTwoParams {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        for (name, v) in [("a", a), ("b", b), ("c", c)] {
            if !v.is_finite() || v < 0.0 {
                return Err(HexError::InvalidParameter(format!("{name} must be nonnegative and finite, got {v}")));
            }
        }
        if a + b + c == 0.0 {
            return Err(HexError::InvalidParameter("(a, b, c) must not all vanish".into()));
        }
        Ok(Self { a, b, c })
    }

    /// `A = (a - b - c) / (a + b + c)` and cyclically. Entries may vanish, so this is not
    /// a validated [`DimerWeights`].
    pub fn abc(&self) -> [f64; 3] {
        let s = self.a + self.b + self.c;
        [(self.a - self.b - self.c) / s, (self.b - self.a - self.c) / s, (self.c - self.a - self.b) / s]
    }

    pub fn dimer_weights(&self) -> Result<DimerWeights> {
        let [a, b, c] = self.abc();
        DimerWeights::new(a, b, c)
    }
}
