//! Density matrices, ensembles, and von Neumann entropy.

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matops::{self, ComplexMatrix, MatError};

/// Relative tolerance for the Hermiticity check on candidate states.
pub const STATE_HERMITICITY_TOL: f64 = 1e-10;

/// Eigenvalues in `[EIG_FLOOR, 0)` are clamped to zero; anything lower is a
/// validation error, not a silent repair.
pub const EIG_FLOOR: f64 = -1e-10;

/// Tolerance on `|Tr ρ - 1|`.
pub const TRACE_TOL: f64 = 1e-10;

/// Tolerance on `|Σ p_i - 1|` for ensemble weights.
pub const PROB_SUM_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum StateError {
    #[error("matrix is not Hermitian (relative deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:.3e})")]
    NotPSD { eigenvalue: f64 },
    #[error("trace is {trace:.12}, expected 1")]
    TraceNotOne { trace: f64 },
    #[error("rank {rank} invalid for dimension {dim}")]
    BadRank { rank: usize, dim: usize },
    #[error("ensemble weights sum to {sum:.12}, expected 1")]
    BadProbabilities { sum: f64 },
    #[error("ensemble member dimension {got} does not match {expected}")]
    MemberDimMismatch { expected: usize, got: usize },
    #[error("ensemble must have at least one member")]
    EmptyEnsemble,
    #[error(transparent)]
    Mat(#[from] MatError),
}

pub type Result<T> = std::result::Result<T, StateError>;

/// A validated density matrix: Hermitian, positive semidefinite (up to the
/// clamp window), unit trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityMatrix {
    dim: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Maximally mixed state `I/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self { dim, matrix: ComplexMatrix::identity(dim).scale_re(1.0 / dim as f64) }
    }

    /// Pure state `|ψ⟩⟨ψ|` from an amplitude vector (normalized internally).
    pub fn pure(amplitudes: &[Complex64]) -> Result<Self> {
        let norm2: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if norm2 <= 0.0 || !norm2.is_finite() {
            return Err(StateError::TraceNotOne { trace: norm2 });
        }
        let dim = amplitudes.len();
        let matrix = ComplexMatrix::from_fn(dim, dim, |r, c| {
            amplitudes[r] * amplitudes[c].conj() / norm2
        });
        Ok(Self { dim, matrix })
    }

    /// Computational basis state `|k⟩⟨k|`.
    pub fn basis_state(dim: usize, k: usize) -> Self {
        let mut matrix = ComplexMatrix::zeros(dim, dim);
        matrix.set(k, k, Complex64::new(1.0, 0.0));
        Self { dim, matrix }
    }

    /// Wraps a matrix that is a density matrix by construction (e.g. the
    /// output of a completeness-checked channel on a valid state). Only the
    /// Hermitian symmetrization is applied; no spectral check is run.
    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        let dim = matrix.rows();
        Self { dim, matrix: matrix.symmetrized() }
    }

    /// Eigenvalues of the state, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        matops::hermitian_eigenvalues(&self.matrix)
            .expect("density matrix invariant guarantees a Hermitian matrix")
    }

    pub fn purity(&self) -> f64 {
        self.matrix.mul(&self.matrix).unwrap().trace().re
    }
}

/// Validates an arbitrary matrix as a density matrix.
///
/// Checks run in order: Hermiticity, unit trace, positive semidefiniteness.
/// Eigenvalues in `[-1e-10, 0)` are clamped to zero (the matrix is rebuilt
/// from the clamped spectrum); anything below the floor is rejected.
pub fn validate_state(matrix: &ComplexMatrix) -> Result<DensityMatrix> {
    if !matrix.is_square() {
        return Err(StateError::NotHermitian { deviation: f64::INFINITY });
    }
    let dev = matrix.hermiticity_deviation();
    if dev > STATE_HERMITICITY_TOL {
        return Err(StateError::NotHermitian { deviation: dev });
    }
    let trace = matrix.trace();
    if (trace.re - 1.0).abs() > TRACE_TOL {
        return Err(StateError::TraceNotOne { trace: trace.re });
    }
    let eig = matops::hermitian_eig(&matrix.symmetrized())?;
    if let Some(&lowest) = eig.eigenvalues.first() {
        if lowest < EIG_FLOOR {
            return Err(StateError::NotPSD { eigenvalue: lowest });
        }
        if lowest < 0.0 {
            let clamped = eig.assemble(|l| l.max(0.0));
            return Ok(DensityMatrix { dim: clamped.rows(), matrix: clamped });
        }
    }
    Ok(DensityMatrix { dim: matrix.rows(), matrix: matrix.clone() })
}

/// Von Neumann entropy `S(ρ) = -Σ λ log₂ λ` in bits.
///
/// Panics if an eigenvalue sits below the clamp floor; that can only happen
/// when the density-matrix invariant has been broken upstream.
pub fn von_neumann_entropy(state: &DensityMatrix) -> f64 {
    entropy_of_spectrum(&state.eigenvalues())
}

/// Entropy of a raw spectrum; shared by the state and channel-output paths.
pub(crate) fn entropy_of_spectrum(eigenvalues: &[f64]) -> f64 {
    let mut s = 0.0;
    for &l in eigenvalues {
        assert!(l >= EIG_FLOOR, "eigenvalue {l:.3e} below clamp floor; invariant broken upstream");
        if l > 0.0 {
            s -= l * l.log2();
        }
    }
    s.max(0.0)
}

/// A finite ensemble `{(p_i, ρ_i)}` with weights summing to one.
#[derive(Debug, Clone, Serialize)]
pub struct Ensemble {
    members: Vec<EnsembleMember>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnsembleMember {
    pub probability: f64,
    pub state: DensityMatrix,
}

impl Ensemble {
    pub fn new(members: Vec<(f64, DensityMatrix)>) -> Result<Self> {
        if members.is_empty() {
            return Err(StateError::EmptyEnsemble);
        }
        let dim = members[0].1.dim();
        let mut sum = 0.0;
        for (p, state) in &members {
            if !(0.0..=1.0 + PROB_SUM_TOL).contains(p) {
                return Err(StateError::BadProbabilities { sum: *p });
            }
            if state.dim() != dim {
                return Err(StateError::MemberDimMismatch { expected: dim, got: state.dim() });
            }
            sum += p;
        }
        if (sum - 1.0).abs() > PROB_SUM_TOL {
            return Err(StateError::BadProbabilities { sum });
        }
        Ok(Self {
            members: members
                .into_iter()
                .map(|(probability, state)| EnsembleMember { probability, state })
                .collect(),
        })
    }

    /// Single-member ensemble `{(1, ρ)}`.
    pub fn single(state: DensityMatrix) -> Self {
        Self { members: vec![EnsembleMember { probability: 1.0, state }] }
    }

    pub fn members(&self) -> &[EnsembleMember] {
        &self.members
    }

    pub fn dim(&self) -> usize {
        self.members[0].state.dim()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Weighted average `Σ p_i ρ_i` of an ensemble.
pub fn average_state(ensemble: &Ensemble) -> DensityMatrix {
    let dim = ensemble.dim();
    let mut acc = ComplexMatrix::zeros(dim, dim);
    for m in ensemble.members() {
        acc = acc.add(&m.state.matrix().scale_re(m.probability)).unwrap();
    }
    DensityMatrix::from_matrix_unchecked(acc)
}

/// Standard complex Gaussian sample via Box-Muller.
pub(crate) fn complex_gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.gen();
    let r = (-2.0 * u1.ln()).sqrt();
    let theta = 2.0 * std::f64::consts::PI * u2;
    // Real and imaginary parts each N(0, 1/2) so |z|² has unit mean; the
    // overall scale cancels in GG†/Tr anyway.
    Complex64::new(r * theta.cos(), r * theta.sin()) * std::f64::consts::FRAC_1_SQRT_2
}

/// Normalized `G G† / Tr(G G†)` for a factor matrix `G`.
pub(crate) fn density_from_factor(g: &ComplexMatrix) -> DensityMatrix {
    let gg = g.mul(&g.adjoint()).unwrap();
    let tr = gg.trace().re;
    DensityMatrix::from_matrix_unchecked(gg.scale_re(1.0 / tr))
}

/// Random density matrix of the requested rank, `ρ = GG†/Tr(GG†)` with `G`
/// a `dim × rank` matrix of standard complex Gaussians. Deterministic in the
/// seed.
pub fn random_state(dim: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    if rank == 0 || rank > dim {
        return Err(StateError::BadRank { rank, dim });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = ComplexMatrix::from_fn(dim, rank, |_, _| complex_gaussian(&mut rng));
    Ok(density_from_factor(&g))
}

/// Wire format for a state file: `{ "dim": .., "matrix": [[ [re,im], ..]] }`.
#[derive(Debug, Deserialize)]
struct StateSpec {
    dim: usize,
    matrix: ComplexMatrix,
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let spec = StateSpec::deserialize(deserializer)?;
        if spec.matrix.rows() != spec.dim || spec.matrix.cols() != spec.dim {
            return Err(D::Error::custom(format!(
                "declared dim {} does not match a {}x{} matrix",
                spec.dim,
                spec.matrix.rows(),
                spec.matrix.cols()
            )));
        }
        validate_state(&spec.matrix).map_err(D::Error::custom)
    }
}
