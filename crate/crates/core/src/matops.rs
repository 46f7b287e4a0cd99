//! Dense complex matrix operations.
//!
//! Everything downstream (states, channels, entropies, optimizers) is built on
//! [`ComplexMatrix`], a row-major dense matrix of `Complex64` entries, and on
//! the Hermitian eigendecomposition provided by [`hermitian_eig`]. The solver
//! is a cyclic Jacobi iteration: for the matrix sizes this crate works with
//! (well under 256) it is accurate to close to machine precision and keeps the
//! numerical kernel free of external dependencies.
//!
//! Logarithms are base 2 throughout the crate; [`matrix_log_on_support`]
//! follows that convention.

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Eigenvalues with magnitude below this are treated as zero when deciding
/// support membership.
pub const ZERO_TOL: f64 = 1e-12;

/// Relative Frobenius tolerance for accepting a matrix as Hermitian.
pub const HERMITICITY_TOL: f64 = 1e-10;

/// Hard cap on either dimension of a tensor (Kronecker) product result.
pub const TENSOR_DIM_CAP: usize = 4096;

/// Jacobi sweep cap; the iteration converges quadratically, so hitting this
/// limit indicates a malformed input rather than a hard problem.
const JACOBI_MAX_SWEEPS: usize = 100;

/// Off-diagonal mass (relative to the Frobenius norm) at which the Jacobi
/// iteration is declared converged.
const JACOBI_OFF_TOL: f64 = 1e-14;

#[derive(Debug, Error)]
pub enum MatError {
    #[error("entry ({row},{col}) is not finite")]
    NonFiniteEntry { row: usize, col: usize },
    #[error("expected {rows}x{cols} = {} entries, got {len}", rows * cols)]
    EntryCountMismatch { rows: usize, cols: usize, len: usize },
    #[error("shape mismatch: {0}x{1} vs {2}x{3}", left.0, left.1, right.0, right.1)]
    ShapeMismatch { left: (usize, usize), right: (usize, usize) },
    #[error("matrix is not Hermitian (relative deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("Jacobi iteration did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("eigenvalue {value:.3e} below the negativity tolerance")]
    NegativeEigenvalue { value: f64 },
    #[error("tensor product dimension {rows}x{cols} exceeds cap {cap}")]
    DimensionOverflow { rows: usize, cols: usize, cap: usize },
    #[error("bad dimensions: {0}")]
    BadDims(String),
}

pub type Result<T> = std::result::Result<T, MatError>;

/// Dense complex matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting non-finite values.
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(MatError::EntryCountMismatch { rows, cols, len: entries.len() });
        }
        for (k, z) in entries.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(MatError::NonFiniteEntry { row: k / cols, col: k % cols });
            }
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                entries.push(f(r, c));
            }
        }
        Self { rows, cols, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.entries[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Ok(Self { rows: self.rows, cols: self.cols, entries })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        Ok(Self { rows: self.rows, cols: self.cols, entries })
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let entries = self.entries.iter().map(|a| a * factor).collect();
        Self { rows: self.rows, cols: self.cols, entries }
    }

    pub fn scale_re(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(MatError::ShapeMismatch {
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for c in 0..other.cols {
                    let v = out.get(r, c) + a * other.get(k, c);
                    out.set(r, c, v);
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).conj())
    }

    pub fn trace(&self) -> Complex64 {
        let n = self.rows.min(self.cols);
        (0..n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Hermitian part `(M + M†)/2`; used to shave off accumulated round-off
    /// after operations that are Hermitian in exact arithmetic.
    pub fn symmetrized(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| {
            (self.get(r, c) + self.get(c, r).conj()) * 0.5
        })
    }

    /// Relative deviation from Hermiticity, `||M - M†||_F / max(1, ||M||_F)`.
    pub fn hermiticity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev2 = 0.0;
        for r in 0..self.rows {
            for c in 0..self.cols {
                let d = self.get(r, c) - self.get(c, r).conj();
                dev2 += d.norm_sqr();
            }
        }
        dev2.sqrt() / self.frobenius_norm().max(1.0)
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(MatError::ShapeMismatch {
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        Ok(())
    }
}

/// Wire representation: nested rows of `[re, im]` pairs.
impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = (0..self.rows)
            .map(|r| (0..self.cols).map(|c| [self.get(r, c).re, self.get(r, c).im]).collect())
            .collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(deserializer)?;
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.len());
        let mut entries = Vec::with_capacity(n_rows * n_cols);
        for row in &rows {
            if row.len() != n_cols {
                return Err(D::Error::custom("ragged matrix rows"));
            }
            for &[re, im] in row {
                entries.push(Complex64::new(re, im));
            }
        }
        ComplexMatrix::new(n_rows, n_cols, entries).map_err(D::Error::custom)
    }
}

/// Result of a Hermitian eigendecomposition: `M = V diag(λ) V†` with real
/// eigenvalues sorted ascending and the columns of `V` orthonormal.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl EigenDecomposition {
    /// Reassembles `V diag(f(λ)) V†` for a scalar function of the spectrum.
    pub fn assemble(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let v = &self.vectors;
        ComplexMatrix::from_fn(n, n, |r, c| {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                acc += v.get(r, k) * f(self.eigenvalues[k]) * v.get(c, k).conj();
            }
            acc
        })
    }
}

/// Jacobi diagonalization core. Rotates `a` toward diagonal form in place,
/// accumulating the unitary into `v` when provided.
fn jacobi(a: &mut ComplexMatrix, mut v: Option<&mut ComplexMatrix>) -> Result<()> {
    let n = a.rows();
    let scale = a.frobenius_norm().max(1.0);
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let mut off2 = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off2 += a.get(p, q).norm_sqr();
            }
        }
        if (2.0 * off2).sqrt() <= JACOBI_OFF_TOL * scale {
            return Ok(());
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                let b = apq.norm();
                if b <= f64::MIN_POSITIVE {
                    continue;
                }
                // Phase e^{iφ} of the pivot, then a real Jacobi rotation on
                // the phase-aligned 2x2 block. The combined unitary is
                //   U[p,p]=c, U[p,q]=s, U[q,p]=-s·e^{-iφ}, U[q,q]=c·e^{-iφ}.
                let phase = apq / b;
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                let tau = (aqq - app) / (2.0 * b);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let u_qp = -s * phase.conj();
                let u_qq = c * phase.conj();

                // Column update A <- A·U on columns p, q.
                for j in 0..n {
                    let ajp = a.get(j, p);
                    let ajq = a.get(j, q);
                    a.set(j, p, ajp * c + ajq * u_qp);
                    a.set(j, q, ajp * s + ajq * u_qq);
                }
                // Row update A <- U†·A on rows p, q.
                for j in 0..n {
                    let apj = a.get(p, j);
                    let aqj = a.get(q, j);
                    a.set(p, j, apj * c + aqj * u_qp.conj());
                    a.set(q, j, apj * s + aqj * u_qq.conj());
                }
                // The pivot is zero in exact arithmetic; pin it and keep the
                // diagonal real to stop round-off from drifting.
                a.set(p, q, Complex64::new(0.0, 0.0));
                a.set(q, p, Complex64::new(0.0, 0.0));
                let dpp = a.get(p, p).re;
                let dqq = a.get(q, q).re;
                a.set(p, p, Complex64::new(dpp, 0.0));
                a.set(q, q, Complex64::new(dqq, 0.0));

                if let Some(v) = v.as_deref_mut() {
                    for j in 0..n {
                        let vjp = v.get(j, p);
                        let vjq = v.get(j, q);
                        v.set(j, p, vjp * c + vjq * u_qp);
                        v.set(j, q, vjp * s + vjq * u_qq);
                    }
                }
            }
        }
    }
    Err(MatError::NoConvergence { sweeps: JACOBI_MAX_SWEEPS })
}

fn check_hermitian_input(m: &ComplexMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(MatError::BadDims(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let dev = m.hermiticity_deviation();
    if dev > HERMITICITY_TOL {
        return Err(MatError::NotHermitian { deviation: dev });
    }
    Ok(())
}

/// Full eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<EigenDecomposition> {
    check_hermitian_input(m)?;
    let n = m.rows();
    let mut a = m.symmetrized();
    let mut v = ComplexMatrix::identity(n);
    jacobi(&mut a, Some(&mut v))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).re.partial_cmp(&a.get(j, j).re).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a.get(i, i).re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| v.get(r, order[c]));
    Ok(EigenDecomposition { eigenvalues, vectors })
}

/// Eigenvalues only (ascending); skips eigenvector accumulation, which is the
/// dominant cost when entropies are evaluated inside optimizer loops.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    check_hermitian_input(m)?;
    let mut a = m.symmetrized();
    jacobi(&mut a, None)?;
    let mut eigenvalues: Vec<f64> = (0..a.rows()).map(|i| a.get(i, i).re).collect();
    eigenvalues.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(eigenvalues)
}

/// Base-2 matrix logarithm restricted to the support: eigenvalues above
/// `zero_tol` map to `log2(λ)`, eigenvalues in `[-zero_tol, zero_tol]` map to
/// zero, and anything below `-zero_tol` is rejected.
pub fn matrix_log_on_support(m: &ComplexMatrix, zero_tol: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(m)?;
    if let Some(&bad) = eig.eigenvalues.iter().find(|&&l| l < -zero_tol) {
        return Err(MatError::NegativeEigenvalue { value: bad });
    }
    Ok(eig.assemble(|l| if l > zero_tol { l.log2() } else { 0.0 }))
}

/// Kronecker product `a ⊗ b`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let rows = a.rows() * b.rows();
    let cols = a.cols() * b.cols();
    if rows > TENSOR_DIM_CAP || cols > TENSOR_DIM_CAP {
        return Err(MatError::DimensionOverflow { rows, cols, cap: TENSOR_DIM_CAP });
    }
    let mut out = ComplexMatrix::zeros(rows, cols);
    for ra in 0..a.rows() {
        for ca in 0..a.cols() {
            let va = a.get(ra, ca);
            if va.norm_sqr() == 0.0 {
                continue;
            }
            for rb in 0..b.rows() {
                for cb in 0..b.cols() {
                    out.set(ra * b.rows() + rb, ca * b.cols() + cb, va * b.get(rb, cb));
                }
            }
        }
    }
    Ok(out)
}

/// Partial trace over the factors *not* listed in `keep`.
///
/// `dims` lists the tensor factor dimensions of the square input (row index =
/// most significant factor first); `keep` selects the factors to retain, and
/// the result orders them by ascending factor index.
pub fn partial_trace(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(MatError::BadDims(format!("partial trace needs a square matrix, got {}x{}", m.rows(), m.cols())));
    }
    let total: usize = dims.iter().product();
    if total != m.rows() || dims.iter().any(|&d| d == 0) {
        return Err(MatError::BadDims(format!(
            "factor dims {dims:?} do not multiply to matrix dim {}",
            m.rows()
        )));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.len() != keep.len() || kept.iter().any(|&k| k >= dims.len()) {
        return Err(MatError::BadDims(format!("keep set {keep:?} invalid for {} factors", dims.len())));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !kept.contains(i)).collect();
    let dim_keep: usize = kept.iter().map(|&i| dims[i]).product();
    let dim_trace: usize = traced.iter().map(|&i| dims[i]).product();

    let index_of = |keep_digits: usize, trace_digits: usize| -> usize {
        let mut idx = 0;
        let mut kd = keep_digits;
        let mut td = trace_digits;
        // Decompose the group indices back into per-factor digits. Digits are
        // stored most-significant-first, so peel from the least significant
        // side of each group and assemble factor by factor.
        let mut digits = vec![0usize; dims.len()];
        for &f in kept.iter().rev() {
            digits[f] = kd % dims[f];
            kd /= dims[f];
        }
        for &f in traced.iter().rev() {
            digits[f] = td % dims[f];
            td /= dims[f];
        }
        for (f, &d) in dims.iter().enumerate() {
            idx = idx * d + digits[f];
        }
        idx
    };

    let mut out = ComplexMatrix::zeros(dim_keep, dim_keep);
    for rk in 0..dim_keep {
        for ck in 0..dim_keep {
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..dim_trace {
                acc += m.get(index_of(rk, t), index_of(ck, t));
            }
            out.set(rk, ck, acc);
        }
    }
    Ok(out)
}

/// Frobenius distance `||a - b||_F`.
pub fn frobenius_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(MatError::ShapeMismatch {
            left: (a.rows(), a.cols()),
            right: (b.rows(), b.cols()),
        });
    }
    let mut acc = 0.0;
    for (x, y) in a.entries().iter().zip(b.entries()) {
        acc += (x - y).norm_sqr();
    }
    Ok(acc.sqrt())
}
