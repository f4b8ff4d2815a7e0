//! Dense kernels: Pfaffians of real antisymmetric matrices (skew Gaussian elimination
//! with pivoting), determinants and inverses of complex matrices (LU with partial
//! pivoting).

use num_complex::Complex64;

use crate::error::{HexError, Result};

/// Relative tolerance for accepting a matrix as antisymmetric.
pub const ANTISYMMETRY_TOL: f64 = 1e-12;

/// A real number stored as `sign * exp(ln_abs)`; Pfaffians of the large augmented
/// matrices overflow `f64`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLog {
    /// -1, 0 or 1.
    pub sign: f64,
    pub ln_abs: f64,
}

impl SignedLog {
    pub const ZERO: SignedLog = SignedLog { sign: 0.0, ln_abs: f64::NEG_INFINITY };

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            Self { sign: x.signum(), ln_abs: x.abs().ln() }
        }
    }

    pub fn to_f64(self) -> f64 {
        if self.sign == 0.0 {
            0.0
        } else {
            self.sign * self.ln_abs.exp()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0.0
    }

    pub fn neg(self) -> Self {
        Self { sign: -self.sign, ..self }
    }

    pub fn mul(self, other: SignedLog) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::ZERO;
        }
        Self { sign: self.sign * other.sign, ln_abs: self.ln_abs + other.ln_abs }
    }

    /// Ratio `self / other`; `other` must be nonzero.
    pub fn div(self, other: SignedLog) -> Self {
        if self.is_zero() {
            return Self::ZERO;
        }
        Self { sign: self.sign * other.sign, ln_abs: self.ln_abs - other.ln_abs }
    }

    /// `sum_i coeffs[i] * terms[i]` with `coeffs[i]` in {-1, 1}, computed relative to the
    /// largest term.
    pub fn signed_sum(terms: &[SignedLog], coeffs: &[f64]) -> SignedLog {
        let top = terms.iter().filter(|t| !t.is_zero()).map(|t| t.ln_abs).fold(f64::NEG_INFINITY, f64::max);
        if top == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        let s: f64 = terms.iter().zip(coeffs).map(|(t, c)| c * t.sign * (t.ln_abs - top).exp()).sum();
        let mut out = Self::from_f64(s);
        out.ln_abs += top;
        out
    }

    /// Decimal scientific notation, valid far outside the `f64` range.
    pub fn to_scientific(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let log10 = self.ln_abs / std::f64::consts::LN_10;
        let exp = log10.floor();
        // `{:e}` renormalizes a mantissa that rounds up to 10
        let mant = format!("{:.16e}", 10f64.powf(log10 - exp));
        let (digits, shift) = mant.split_once('e').unwrap();
        let shift: f64 = shift.parse().unwrap();
        let sign = if self.sign < 0.0 { "-" } else { "" };
        format!("{sign}{digits}e{}", exp + shift)
    }
}

/// Dense real antisymmetric matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SkewMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![0.0; dim * dim] }
    }

    /// Validate antisymmetry to [`ANTISYMMETRY_TOL`] relative to the largest entry,
    /// then store `(M - M^T) / 2`.
    pub fn from_dense(dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(HexError::NotSquare { rows: dim, cols: data.len() / dim.max(1) });
        }
        let scale = data.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let mut out = Self::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                let (a, b) = (data[i * dim + j], data[j * dim + i]);
                let defect = (a + b).abs();
                if defect > ANTISYMMETRY_TOL * scale || !defect.is_finite() {
                    return Err(HexError::NotAntisymmetric { i, j, defect });
                }
                let v = 0.5 * (a - b);
                out.data[i * dim + j] = v;
                out.data[j * dim + i] = -v;
            }
        }
        Ok(out)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != dim) {
            return Err(HexError::NotSquare { rows: dim, cols: r.len() });
        }
        Self::from_dense(dim, rows.concat())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    /// Set entry `(i, j)` to `v` and `(j, i)` to `-v`.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
        self.data[j * self.dim + i] = -v;
    }

    /// Add `v` to `(i, j)` and `-v` to `(j, i)`.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] += v;
        self.data[j * self.dim + i] -= v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Symmetric row/column permutation: result `(i, j)` = `self(perm[i], perm[j])`.
    pub fn permuted(&self, perm: &[usize]) -> SkewMatrix {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.data[i * d + j] = self.data[perm[i] * d + perm[j]];
            }
        }
        out
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.dim,
            cols: self.dim,
            data: self.data.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }
}

/// Pfaffian in sign/log form.
///
/// Skew Gaussian elimination: at step `k` the largest entry of row `k` right of the
/// diagonal is moved to `(k, k+1)` by a symmetric swap (flipping the sign), then rows
/// and columns `k, k+1` are eliminated with a rank-2 update. Only the upper triangle
/// is maintained, and the update touches only the columns where rows `k` and `k+1` are
/// nonzero, which keeps banded Kasteleyn matrices cheap.
pub fn pfaffian_log(m: &SkewMatrix) -> Result<SignedLog> {
    let d = m.dim;
    if d % 2 == 1 {
        return Err(HexError::OddDimension(d));
    }
    let mut a = m.data.clone();
    let mut sign = 1.0;
    let mut ln_abs = 0.0;
    let mut cols: Vec<usize> = Vec::with_capacity(d);
    let mut uk: Vec<f64> = Vec::with_capacity(d);
    let mut vk: Vec<f64> = Vec::with_capacity(d);
    for k in (0..d).step_by(2) {
        let s = k + 1;
        let row = &a[k * d..(k + 1) * d];
        let (mut p, mut best) = (s, 0.0f64);
        for (j, x) in row.iter().enumerate().skip(s) {
            if x.abs() > best {
                best = x.abs();
                p = j;
            }
        }
        if best == 0.0 {
            return Ok(SignedLog::ZERO);
        }
        if p != s {
            a.swap(k * d + s, k * d + p);
            for t in s + 1..p {
                let ts = s * d + t;
                let tp = t * d + p;
                let old_st = a[ts];
                a[ts] = -a[tp];
                a[tp] = -old_st;
            }
            for t in p + 1..d {
                a.swap(s * d + t, p * d + t);
            }
            a[s * d + p] = -a[s * d + p];
            sign = -sign;
        }
        let piv = a[k * d + s];
        sign *= piv.signum();
        ln_abs += piv.abs().ln();

        cols.clear();
        uk.clear();
        vk.clear();
        for j in s + 1..d {
            let (u, v) = (a[k * d + j], a[s * d + j]);
            if u != 0.0 || v != 0.0 {
                cols.push(j);
                uk.push(u / piv);
                vk.push(v);
            }
        }
        for (x, &i) in cols.iter().enumerate() {
            let (ui, vi) = (uk[x], vk[x]);
            let row = &mut a[i * d..(i + 1) * d];
            for y in x + 1..cols.len() {
                // C[i][j] += (v_i u_j - u_i v_j) / a
                row[cols[y]] += vi * uk[y] - ui * vk[y];
            }
        }
    }
    Ok(SignedLog { sign, ln_abs })
}

pub fn pfaffian(m: &SkewMatrix) -> Result<f64> {
    pfaffian_log(m).map(SignedLog::to_f64)
}

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(HexError::NotSquare { rows, cols });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|x| x.len() != c) {
            return Err(HexError::NotSquare { rows: r, cols: c });
        }
        Self::from_vec(r, c, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dim(&self) -> usize {
        self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] += v;
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != other.rows {
            return Err(HexError::NotSquare { rows: self.cols, cols: other.rows });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.data[k * other.cols + j];
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> ComplexMatrix {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }

    /// Real part as a validated [`SkewMatrix`]; fails if an imaginary part survives.
    pub fn to_skew(&self) -> Result<SkewMatrix> {
        if self.rows != self.cols {
            return Err(HexError::NotSquare { rows: self.rows, cols: self.cols });
        }
        let scale = self.max_abs();
        if let Some(pos) = self.data.iter().position(|z| z.im.abs() > ANTISYMMETRY_TOL * scale) {
            let (i, j) = (pos / self.cols, pos % self.cols);
            return Err(HexError::NotAntisymmetric { i, j, defect: self.data[pos].im.abs() });
        }
        SkewMatrix::from_dense(self.rows, self.data.iter().map(|z| z.re).collect())
    }
}

fn require_square(m: &ComplexMatrix) -> Result<usize> {
    if m.rows != m.cols {
        Err(HexError::NotSquare { rows: m.rows, cols: m.cols })
    } else {
        Ok(m.rows)
    }
}

/// Determinant by LU with partial pivoting; exactly singular input gives 0.
pub fn det_complex(m: &ComplexMatrix) -> Result<Complex64> {
    let d = require_square(m)?;
    let mut a = m.data.clone();
    let mut det = Complex64::new(1.0, 0.0);
    for k in 0..d {
        let p = (k..d).max_by(|&x, &y| a[x * d + k].norm().total_cmp(&a[y * d + k].norm())).unwrap();
        let piv = a[p * d + k];
        if piv.norm() == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        if p != k {
            for j in 0..d {
                a.swap(k * d + j, p * d + j);
            }
            det = -det;
        }
        det *= piv;
        for i in k + 1..d {
            let f = a[i * d + k] / piv;
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in k + 1..d {
                let t = a[k * d + j];
                a[i * d + j] -= f * t;
            }
        }
    }
    Ok(det)
}

/// Inverse by Gauss-Jordan elimination with partial pivoting. A pivot below
/// `1e-12 * max|m|` is reported as singular.
pub fn inverse_complex(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let d = require_square(m)?;
    let threshold = 1e-12 * m.max_abs();
    let mut a = m.data.clone();
    let mut inv = ComplexMatrix::identity(d).data;
    for k in 0..d {
        let p = (k..d).max_by(|&x, &y| a[x * d + k].norm().total_cmp(&a[y * d + k].norm())).unwrap();
        let piv = a[p * d + k];
        if !(piv.norm() > threshold) {
            return Err(HexError::Singular { step: k, pivot: piv.norm() });
        }
        if p != k {
            for j in 0..d {
                a.swap(k * d + j, p * d + j);
                inv.swap(k * d + j, p * d + j);
            }
        }
        let r = piv.inv();
        for j in 0..d {
            a[k * d + j] *= r;
            inv[k * d + j] *= r;
        }
        for i in 0..d {
            if i == k {
                continue;
            }
            let f = a[i * d + k];
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..d {
                let (t, u) = (a[k * d + j], inv[k * d + j]);
                a[i * d + j] -= f * t;
                inv[i * d + j] -= f * u;
            }
        }
    }
    Ok(ComplexMatrix { rows: d, cols: d, data: inv })
}

/// Real determinant by LU with partial pivoting, in sign/log form.
pub fn det_real_log(dim: usize, data: &[f64]) -> SignedLog {
    let d = dim;
    let mut a = data.to_vec();
    let mut sign = 1.0;
    let mut ln_abs = 0.0;
    for k in 0..d {
        let p = (k..d).max_by(|&x, &y| a[x * d + k].abs().total_cmp(&a[y * d + k].abs())).unwrap();
        let piv = a[p * d + k];
        if piv == 0.0 {
            return SignedLog::ZERO;
        }
        if p != k {
            for j in 0..d {
                a.swap(k * d + j, p * d + j);
            }
            sign = -sign;
        }
        sign *= piv.signum();
        ln_abs += piv.abs().ln();
        for i in k + 1..d {
            let f = a[i * d + k] / piv;
            if f == 0.0 {
                continue;
            }
            for j in k + 1..d {
                a[i * d + j] -= f * a[k * d + j];
            }
        }
    }
    SignedLog { sign, ln_abs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    pub(crate) fn random_skew(rng: &mut ChaCha8Rng, dim: usize) -> SkewMatrix {
        let mut m = SkewMatrix::zeros(dim);
        for i in 0..dim {
            for j in i + 1..dim {
                m.set(i, j, rng.gen_range(-1.0..1.0));
            }
        }
        m
    }

    #[test]
    fn small_pfaffians() {
        let m = SkewMatrix::from_rows(&[vec![0.0, 5.0], vec![-5.0, 0.0]]).unwrap();
        assert!((pfaffian(&m).unwrap() - 5.0).abs() < 1e-14);

        let (a12, a13, a14, a23, a24, a34) = (2.0, -3.0, 5.0, 7.0, 11.0, -13.0);
        let mut m = SkewMatrix::zeros(4);
        m.set(0, 1, a12);
        m.set(0, 2, a13);
        m.set(0, 3, a14);
        m.set(1, 2, a23);
        m.set(1, 3, a24);
        m.set(2, 3, a34);
        let expected = a12 * a34 - a13 * a24 + a14 * a23;
        assert!((pfaffian(&m).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(pfaffian(&SkewMatrix::zeros(3)), Err(HexError::OddDimension(3)));
        let bad = SkewMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert!(matches!(bad, Err(HexError::NotAntisymmetric { .. })));
        assert_eq!(pfaffian(&SkewMatrix::zeros(4)).unwrap(), 0.0);
    }

    #[test]
    fn symmetrizes_within_tolerance() {
        let m = SkewMatrix::from_rows(&[vec![0.0, 1.0 + 1e-14], vec![-1.0, 0.0]]).unwrap();
        assert_eq!(m.get(0, 1), -m.get(1, 0));
    }

    #[test]
    fn pfaffian_squared_is_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for dim in (2..=40).step_by(2) {
            let m = random_skew(&mut rng, dim);
            let pf = pfaffian_log(&m).unwrap();
            let det = det_real_log(dim, m.data());
            assert_eq!(det.sign, 1.0);
            assert!((2.0 * pf.ln_abs - det.ln_abs).abs() < 1e-10, "dim {dim}");
        }
    }

    #[test]
    fn sparse_update_matches_dense_expansion() {
        // banded matrix with a wrap-around corner, as produced by torus assemblies
        let d = 16;
        let mut m = SkewMatrix::zeros(d);
        for i in 0..d {
            m.set(i, (i + 1) % d, 1.0 + i as f64 * 0.1);
            m.set(i, (i + 3) % d, 0.5 - i as f64 * 0.05);
        }
        let pf = pfaffian(&m).unwrap();
        let det = det_real_log(d, m.data());
        assert!(((pf * pf).ln() - det.ln_abs).abs() < 1e-10);
    }

    #[test]
    fn signed_log_arithmetic() {
        let t = [SignedLog::from_f64(3.0), SignedLog::from_f64(-1.0), SignedLog::from_f64(0.5)];
        let s = SignedLog::signed_sum(&t, &[1.0, 1.0, -1.0]);
        assert!((s.to_f64() - 1.5).abs() < 1e-15);
        let big = SignedLog { sign: -1.0, ln_abs: 2000.0 * std::f64::consts::LN_10 };
        let text = big.to_scientific();
        let (m, e) = text.split_once('e').unwrap();
        let value = m.parse::<f64>().unwrap() * 10f64.powf(e.parse::<f64>().unwrap() - 2000.0);
        assert!((value + 1.0).abs() < 1e-10, "{text}");
        assert_eq!(SignedLog::ZERO.to_scientific(), "0");
        assert_eq!(SignedLog::from_f64(2.0).div(SignedLog::from_f64(-4.0)).to_f64(), -0.5);
    }

    #[test]
    fn complex_det_and_inverse() {
        assert_eq!(det_complex(&ComplexMatrix::identity(5)).unwrap(), c(1.0, 0.0));
        let d = ComplexMatrix::from_rows(&[vec![c(2.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 3.0)]]).unwrap();
        assert!((det_complex(&d).unwrap() - c(0.0, 6.0)).norm() < 1e-15);

        let k = ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(-2.0, 0.0)], vec![c(2.0, 0.0), c(0.0, 0.0)]]).unwrap();
        let inv = inverse_complex(&k).unwrap();
        assert!((inv.get(0, 1) - c(0.5, 0.0)).norm() < 1e-15);
        assert!((inv.get(1, 0) - c(-0.5, 0.0)).norm() < 1e-15);

        let sing = ComplexMatrix::from_rows(&[vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(2.0, 0.0), c(4.0, 0.0)]]).unwrap();
        assert!(matches!(inverse_complex(&sing), Err(HexError::Singular { .. })));
        assert_eq!(det_complex(&sing).unwrap().norm(), 0.0);
    }

    #[test]
    fn inverse_residual_on_phase_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let d = 12;
            let data = (0..d * d)
                .map(|_| Complex64::from_polar(rng.gen_range(0.1..2.0), rng.gen_range(0.0..std::f64::consts::TAU)))
                .collect();
            let m = ComplexMatrix::from_vec(d, d, data).unwrap();
            let inv = inverse_complex(&m).unwrap();
            let prod = m.matmul(&inv).unwrap();
            let id = ComplexMatrix::identity(d);
            let res = prod.data().iter().zip(id.data()).fold(0.0f64, |r, (a, b)| r.max((a - b).norm()));
            assert!(res < 1e-9, "residual {res}");
            let dd = det_complex(&m).unwrap() * det_complex(&inv).unwrap();
            assert!((dd - c(1.0, 0.0)).norm() < 1e-9);
        }
    }
}
