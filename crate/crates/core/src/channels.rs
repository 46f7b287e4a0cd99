//! Quantum channels in Kraus representation.
//!
//! A channel is a set of Kraus operators `{A_k}` with `Σ A_k† A_k = I`
//! (checked at construction). The Stinespring dilation and the complementary
//! channel use an environment of dimension equal to the number of Kraus
//! operators, with the dilation ordered output-major: `V = Σ_k A_k ⊗ |k⟩_env`.

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

use crate::matops::{self, ComplexMatrix, MatError};
use crate::states::{self, DensityMatrix};

/// Tolerance on `||Σ A_k† A_k - I||_F`.
pub const COMPLETENESS_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("channel needs at least one Kraus operator")]
    EmptyKraus,
    #[error("{count} Kraus operators exceed the dim_in*dim_out bound {bound}")]
    TooManyKraus { count: usize, bound: usize },
    #[error("Kraus operator {index} is {rows}x{cols}, expected {dim_out}x{dim_in}")]
    KrausShapeMismatch { index: usize, rows: usize, cols: usize, dim_out: usize, dim_in: usize },
    #[error("completeness violated: ||Σ A†A - I||_F = {deviation:.3e}")]
    CompletenessViolation { deviation: f64 },
    #[error("input dimension {got} does not match channel input {expected}")]
    DimMismatch { expected: usize, got: usize },
    #[error("unknown channel family '{0}'")]
    UnknownChannel(String),
    #[error("bad channel parameter: {0}")]
    BadParam(String),
    #[error("channel spec parse error: {0}")]
    ParseError(String),
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error(transparent)]
    State(#[from] states::StateError),
}

pub type Result<T> = std::result::Result<T, ChannelError>;

/// A completely positive trace-preserving map in Kraus form.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumChannel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<ComplexMatrix>,
}

impl QuantumChannel {
    /// Builds and validates a channel from its Kraus operators.
    pub fn new(dim_in: usize, dim_out: usize, kraus: Vec<ComplexMatrix>) -> Result<Self> {
        if kraus.is_empty() {
            return Err(ChannelError::EmptyKraus);
        }
        if kraus.len() > dim_in * dim_out {
            return Err(ChannelError::TooManyKraus {
                count: kraus.len(),
                bound: dim_in * dim_out,
            });
        }
        for (index, a) in kraus.iter().enumerate() {
            if a.rows() != dim_out || a.cols() != dim_in {
                return Err(ChannelError::KrausShapeMismatch {
                    index,
                    rows: a.rows(),
                    cols: a.cols(),
                    dim_out,
                    dim_in,
                });
            }
        }
        let deviation = completeness_deviation(dim_in, &kraus);
        if deviation > COMPLETENESS_TOL {
            return Err(ChannelError::CompletenessViolation { deviation });
        }
        Ok(Self { dim_in, dim_out, kraus })
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// Environment dimension of the Stinespring dilation.
    pub fn env_dim(&self) -> usize {
        self.kraus.len()
    }

    /// Applies the channel: `ρ ↦ Σ A_k ρ A_k†`.
    pub fn apply(&self, state: &DensityMatrix) -> Result<DensityMatrix> {
        if state.dim() != self.dim_in {
            return Err(ChannelError::DimMismatch { expected: self.dim_in, got: state.dim() });
        }
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for a in &self.kraus {
            let t = a.mul(state.matrix())?.mul(&a.adjoint())?;
            out = out.add(&t)?;
        }
        // CPTP on a valid state: Hermitian, PSD, unit trace by construction.
        Ok(DensityMatrix::from_matrix_unchecked(out))
    }

    /// Stinespring isometry `V = Σ_k A_k ⊗ |k⟩_env`, shape
    /// `(dim_out * env_dim) × dim_in`, output index major.
    pub fn stinespring_isometry(&self) -> ComplexMatrix {
        let k_count = self.kraus.len();
        ComplexMatrix::from_fn(self.dim_out * k_count, self.dim_in, |row, i| {
            let o = row / k_count;
            let k = row % k_count;
            self.kraus[k].get(o, i)
        })
    }

    /// Complementary channel to the environment: Kraus operators `B_j`
    /// (one per output index `j`) with `(B_j)_{k,i} = (A_k)_{j,i}`.
    pub fn complementary(&self) -> QuantumChannel {
        let env = self.kraus.len();
        let kraus: Vec<ComplexMatrix> = (0..self.dim_out)
            .map(|j| {
                ComplexMatrix::from_fn(env, self.dim_in, |k, i| self.kraus[k].get(j, i))
            })
            .collect();
        // Completeness transfers exactly from the base channel, so this
        // cannot fail for a validated channel.
        QuantumChannel::new(self.dim_in, env, kraus)
            .expect("complementary of a valid channel is valid")
    }
}

fn completeness_deviation(dim_in: usize, kraus: &[ComplexMatrix]) -> f64 {
    let mut acc = ComplexMatrix::zeros(dim_in, dim_in);
    for a in kraus {
        acc = acc.add(&a.adjoint().mul(a).unwrap()).unwrap();
    }
    matops::frobenius_distance(&acc, &ComplexMatrix::identity(dim_in)).unwrap()
}

/// Tensor product of two channels: Kraus set `{A_i ⊗ B_j}`, first factor
/// major.
pub fn tensor_channels(a: &QuantumChannel, b: &QuantumChannel) -> Result<QuantumChannel> {
    let mut kraus = Vec::with_capacity(a.kraus.len() * b.kraus.len());
    for ka in &a.kraus {
        for kb in &b.kraus {
            kraus.push(matops::tensor(ka, kb)?);
        }
    }
    QuantumChannel::new(a.dim_in * b.dim_in, a.dim_out * b.dim_out, kraus)
}

/// `n`-fold tensor power of a channel.
pub fn tensor_power(ch: &QuantumChannel, n: usize) -> Result<QuantumChannel> {
    assert!(n >= 1, "tensor power needs n >= 1");
    let mut out = ch.clone();
    for _ in 1..n {
        out = tensor_channels(&out, ch)?;
    }
    Ok(out)
}

// ---- channel zoo ----

/// Identity channel on dimension `d`.
pub fn identity(d: usize) -> Result<QuantumChannel> {
    if d == 0 {
        return Err(ChannelError::BadParam("identity needs dimension >= 1".into()));
    }
    QuantumChannel::new(d, d, vec![ComplexMatrix::identity(d)])
}

/// Erasure channel on dimension `d`: with probability `p` the input is
/// replaced by the flag state `|d⟩` appended to the output space.
pub fn erasure(d: usize, p: f64) -> Result<QuantumChannel> {
    if d == 0 {
        return Err(ChannelError::BadParam("erasure needs dimension >= 1".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(ChannelError::BadParam(format!("erasure probability {p} outside [0,1]")));
    }
    let keep = ComplexMatrix::from_fn(d + 1, d, |r, c| {
        if r == c { Complex64::new((1.0 - p).sqrt(), 0.0) } else { Complex64::new(0.0, 0.0) }
    });
    let mut kraus = vec![keep];
    for i in 0..d {
        let mut flag = ComplexMatrix::zeros(d + 1, d);
        flag.set(d, i, Complex64::new(p.sqrt(), 0.0));
        kraus.push(flag);
    }
    QuantumChannel::new(d, d + 1, kraus)
}

/// Qubit depolarizing channel: `ρ ↦ (1-p)ρ + p·I/2`.
pub fn depolarizing(p: f64) -> Result<QuantumChannel> {
    if !(0.0..=1.0).contains(&p) {
        return Err(ChannelError::BadParam(format!("depolarizing probability {p} outside [0,1]")));
    }
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let w0 = (1.0 - 0.75 * p).sqrt();
    let w = (0.25 * p).sqrt();
    let i2 = ComplexMatrix::identity(2).scale_re(w0);
    let x = ComplexMatrix::new(2, 2, vec![c(0.0, 0.0), c(w, 0.0), c(w, 0.0), c(0.0, 0.0)]).unwrap();
    let y = ComplexMatrix::new(2, 2, vec![c(0.0, 0.0), c(0.0, -w), c(0.0, w), c(0.0, 0.0)]).unwrap();
    let z = ComplexMatrix::new(2, 2, vec![c(w, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-w, 0.0)]).unwrap();
    QuantumChannel::new(2, 2, vec![i2, x, y, z])
}

/// Qubit amplitude damping channel with decay probability `gamma`.
pub fn amplitude_damping(gamma: f64) -> Result<QuantumChannel> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(ChannelError::BadParam(format!("damping rate {gamma} outside [0,1]")));
    }
    let c = |re: f64| Complex64::new(re, 0.0);
    let k0 = ComplexMatrix::new(2, 2, vec![c(1.0), c(0.0), c(0.0), c((1.0 - gamma).sqrt())])
        .unwrap();
    let k1 = ComplexMatrix::new(2, 2, vec![c(0.0), c(gamma.sqrt()), c(0.0), c(0.0)]).unwrap();
    QuantumChannel::new(2, 2, vec![k0, k1])
}

/// Qubit phase damping channel with dephasing probability `lambda`.
pub fn phase_damping(lambda: f64) -> Result<QuantumChannel> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(ChannelError::BadParam(format!("dephasing rate {lambda} outside [0,1]")));
    }
    let c = |re: f64| Complex64::new(re, 0.0);
    let k0 = ComplexMatrix::new(2, 2, vec![c(1.0), c(0.0), c(0.0), c((1.0 - lambda).sqrt())])
        .unwrap();
    let k1 = ComplexMatrix::new(2, 2, vec![c(0.0), c(0.0), c(0.0), c(lambda.sqrt())]).unwrap();
    QuantumChannel::new(2, 2, vec![k0, k1])
}

/// Instantiates a zoo channel from an inline spec such as `erasure(2,0.25)`
/// or `identity(3)`.
pub fn zoo(spec: &str) -> Result<QuantumChannel> {
    let spec = spec.trim();
    let open = spec.find('(').ok_or_else(|| {
        ChannelError::ParseError(format!("'{spec}' is not of the form NAME(P1,..)"))
    })?;
    if !spec.ends_with(')') {
        return Err(ChannelError::ParseError(format!("'{spec}' is missing a closing parenthesis")));
    }
    let name = spec[..open].trim();
    let args: Vec<&str> = spec[open + 1..spec.len() - 1]
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();

    let want = |n: usize| -> Result<()> {
        if args.len() != n {
            Err(ChannelError::BadParam(format!(
                "{name} takes {n} parameter(s), got {}",
                args.len()
            )))
        } else {
            Ok(())
        }
    };
    let int = |s: &str| -> Result<usize> {
        s.parse::<usize>()
            .map_err(|_| ChannelError::BadParam(format!("'{s}' is not a non-negative integer")))
    };
    let real = |s: &str| -> Result<f64> {
        s.parse::<f64>().map_err(|_| ChannelError::BadParam(format!("'{s}' is not a number")))
    };

    match name {
        "identity" => {
            want(1)?;
            identity(int(args[0])?)
        }
        "erasure" => {
            want(2)?;
            erasure(int(args[0])?, real(args[1])?)
        }
        "depolarizing" => {
            want(1)?;
            depolarizing(real(args[0])?)
        }
        "amplitude_damping" => {
            want(1)?;
            amplitude_damping(real(args[0])?)
        }
        "phase_damping" => {
            want(1)?;
            phase_damping(real(args[0])?)
        }
        other => Err(ChannelError::UnknownChannel(other.to_string())),
    }
}

/// Random channel with `k` Kraus operators, built from a Haar-ish random
/// isometry (eigenvectors of a seeded random Hermitian matrix). Deterministic
/// in the seed; intended for randomized identity checks.
pub fn random_channel(dim_in: usize, dim_out: usize, k: usize, seed: u64) -> Result<QuantumChannel> {
    let dil = dim_out * k;
    if dil < dim_in || k == 0 {
        return Err(ChannelError::BadParam(format!(
            "dilation {dim_out}x{k} cannot embed input dimension {dim_in}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = {
        let raw = ComplexMatrix::from_fn(dil, dil, |_, _| states::complex_gaussian(&mut rng));
        raw.add(&raw.adjoint()).unwrap().scale_re(0.5)
    };
    let basis = matops::hermitian_eig(&h).unwrap().vectors;
    // First dim_in columns of a unitary form an isometry V; slice it into
    // Kraus blocks A_k[o,i] = V[(o,k),i].
    let kraus: Vec<ComplexMatrix> = (0..k)
        .map(|kk| {
            ComplexMatrix::from_fn(dim_out, dim_in, |o, i| basis.get(o * k + kk, i))
        })
        .collect();
    QuantumChannel::new(dim_in, dim_out, kraus)
}

// ---- file I/O ----

/// Wire format: `{ "dim_in": .., "dim_out": .., "kraus": [matrix, ..] }`.
/// Unknown fields (e.g. a "description") are tolerated on load.
#[derive(Debug, Serialize, Deserialize)]
struct ChannelSpec {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<ComplexMatrix>,
}

impl Serialize for QuantumChannel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ChannelSpec { dim_in: self.dim_in, dim_out: self.dim_out, kraus: self.kraus.clone() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuantumChannel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let spec = ChannelSpec::deserialize(d)?;
        QuantumChannel::new(spec.dim_in, spec.dim_out, spec.kraus).map_err(D::Error::custom)
    }
}

/// Loads and validates a channel-spec JSON file.
pub fn load_channel(path: &Path) -> Result<QuantumChannel> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ChannelError::ParseError(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| match completeness_in(&text) {
        Some(deviation) => ChannelError::CompletenessViolation { deviation },
        None => ChannelError::ParseError(format!("{}: {e}", path.display())),
    })
}

/// Distinguishes completeness failures from syntactic ones when a load fails:
/// re-parse structurally and recompute the deviation if the shape is fine.
fn completeness_in(text: &str) -> Option<f64> {
    let spec: ChannelSpec = serde_json::from_str(text).ok()?;
    if spec.kraus.is_empty()
        || spec.kraus.iter().any(|a| a.rows() != spec.dim_out || a.cols() != spec.dim_in)
    {
        return None;
    }
    let deviation = completeness_deviation(spec.dim_in, &spec.kraus);
    (deviation > COMPLETENESS_TOL).then_some(deviation)
}

/// Writes a channel-spec JSON file; `load_channel` restores it bit-exactly.
pub fn save_channel(path: &Path, channel: &QuantumChannel) -> Result<()> {
    let text = serde_json::to_string_pretty(channel)
        .map_err(|e| ChannelError::ParseError(e.to_string()))?;
    std::fs::write(path, text)
        .map_err(|e| ChannelError::ParseError(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{random_state, validate_state, DensityMatrix};

    const TOL: f64 = 1e-10;

    #[test]
    fn identity_channel_is_a_no_op() {
        let ch = identity(3).unwrap();
        let rho = random_state(3, 3, 1).unwrap();
        let out = ch.apply(&rho).unwrap();
        assert!(matops::frobenius_distance(out.matrix(), rho.matrix()).unwrap() < TOL);
    }

    #[test]
    fn erasure_on_maximally_mixed() {
        let ch = erasure(2, 0.3).unwrap();
        let out = ch.apply(&DensityMatrix::maximally_mixed(2)).unwrap();
        assert_eq!(out.dim(), 3);
        assert!((out.matrix().get(0, 0).re - 0.35).abs() < TOL);
        assert!((out.matrix().get(1, 1).re - 0.35).abs() < TOL);
        assert!((out.matrix().get(2, 2).re - 0.30).abs() < TOL);
        for r in 0..3 {
            for c in 0..3 {
                if r != c {
                    assert!(out.matrix().get(r, c).norm() < TOL);
                }
            }
        }
    }

    #[test]
    fn full_depolarizing_erases_everything() {
        let ch = depolarizing(1.0).unwrap();
        let out = ch.apply(&DensityMatrix::basis_state(2, 0)).unwrap();
        let half = DensityMatrix::maximally_mixed(2);
        assert!(matops::frobenius_distance(out.matrix(), half.matrix()).unwrap() < TOL);
    }

    #[test]
    fn full_amplitude_damping_collapses_to_ground() {
        let ch = amplitude_damping(1.0).unwrap();
        let rho = random_state(2, 2, 5).unwrap();
        let out = ch.apply(&rho).unwrap();
        let ground = DensityMatrix::basis_state(2, 0);
        assert!(matops::frobenius_distance(out.matrix(), ground.matrix()).unwrap() < TOL);
    }

    #[test]
    fn rejects_incomplete_kraus_set() {
        let half = ComplexMatrix::identity(2).scale_re(0.5);
        let err = QuantumChannel::new(2, 2, vec![half]).unwrap_err();
        match err {
            ChannelError::CompletenessViolation { deviation } => {
                assert!(deviation > 0.5, "deviation should be reported, got {deviation}");
            }
            other => panic!("expected completeness violation, got {other}"),
        }
    }

    #[test]
    fn rejects_empty_and_oversized_kraus_sets() {
        assert!(matches!(QuantumChannel::new(2, 2, vec![]), Err(ChannelError::EmptyKraus)));
        let id = ComplexMatrix::identity(2);
        let too_many = vec![id; 5];
        assert!(matches!(
            QuantumChannel::new(2, 2, too_many).unwrap_err(),
            ChannelError::TooManyKraus { count: 5, bound: 4 }
        ));
    }

    #[test]
    fn apply_preserves_trace_and_validity() {
        for seed in 0..8u64 {
            let ch = random_channel(3, 2, 4, seed).unwrap();
            let rho = random_state(3, 3, seed + 50).unwrap();
            let out = ch.apply(&rho).unwrap();
            assert!((out.matrix().trace().re - 1.0).abs() < 1e-12);
            assert!(validate_state(out.matrix()).is_ok());
        }
    }

    #[test]
    fn apply_rejects_dimension_mismatch() {
        let ch = identity(2).unwrap();
        let rho = DensityMatrix::maximally_mixed(3);
        assert!(matches!(ch.apply(&rho), Err(ChannelError::DimMismatch { .. })));
    }

    #[test]
    fn stinespring_dilation_is_an_isometry_and_marginalizes_correctly() {
        for seed in 0..4u64 {
            let ch = random_channel(2, 3, 3, seed).unwrap();
            let v = ch.stinespring_isometry();
            let vtv = v.adjoint().mul(&v).unwrap();
            assert!(
                matops::frobenius_distance(&vtv, &ComplexMatrix::identity(2)).unwrap() < 1e-9,
                "V†V should be the identity"
            );
            let rho = random_state(2, 2, seed + 9).unwrap();
            let dilated = v.mul(rho.matrix()).unwrap().mul(&v.adjoint()).unwrap();
            let dims = [ch.dim_out(), ch.env_dim()];
            let out = matops::partial_trace(&dilated, &dims, &[0]).unwrap();
            let env = matops::partial_trace(&dilated, &dims, &[1]).unwrap();
            let direct = ch.apply(&rho).unwrap();
            let compl = ch.complementary().apply(&rho).unwrap();
            assert!(matops::frobenius_distance(&out, direct.matrix()).unwrap() < 1e-9);
            assert!(matops::frobenius_distance(&env, compl.matrix()).unwrap() < 1e-9);
        }
    }

    #[test]
    fn complementary_of_identity_is_constant() {
        let ch = identity(2).unwrap();
        let compl = ch.complementary();
        assert_eq!(compl.dim_out(), 1);
        let out = compl.apply(&random_state(2, 2, 3).unwrap()).unwrap();
        assert!((out.matrix().get(0, 0).re - 1.0).abs() < TOL);
    }

    #[test]
    fn tensor_of_channels_factorizes_on_product_states() {
        let a = erasure(2, 0.25).unwrap();
        let b = depolarizing(0.5).unwrap();
        let joint = tensor_channels(&a, &b).unwrap();
        assert_eq!(joint.dim_in(), 4);
        assert_eq!(joint.dim_out(), 6);
        let ra = random_state(2, 2, 11).unwrap();
        let rb = random_state(2, 2, 12).unwrap();
        let prod = DensityMatrix::from_matrix_unchecked(
            matops::tensor(ra.matrix(), rb.matrix()).unwrap(),
        );
        let lhs = joint.apply(&prod).unwrap();
        let rhs = matops::tensor(
            a.apply(&ra).unwrap().matrix(),
            b.apply(&rb).unwrap().matrix(),
        )
        .unwrap();
        assert!(matops::frobenius_distance(lhs.matrix(), &rhs).unwrap() < 1e-10);
    }

    #[test]
    fn choi_matrix_is_positive() {
        // (id ⊗ N) on the maximally entangled state must be PSD.
        for spec in ["erasure(2,0.4)", "depolarizing(0.7)", "amplitude_damping(0.2)"] {
            let ch = zoo(spec).unwrap();
            let d = ch.dim_in();
            let omega: Vec<Complex64> = (0..d * d)
                .map(|idx| {
                    let (i, j) = (idx / d, idx % d);
                    if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }
                })
                .collect();
            let omega = DensityMatrix::pure(&omega).unwrap();
            let ext = tensor_channels(&identity(d).unwrap(), &ch).unwrap();
            let choi = ext.apply(&omega).unwrap();
            let min = matops::hermitian_eigenvalues(choi.matrix()).unwrap()[0];
            assert!(min >= -1e-9, "Choi matrix of {spec} has eigenvalue {min}");
        }
    }

    #[test]
    fn zoo_parses_and_rejects() {
        assert!(zoo("identity(2)").is_ok());
        assert!(zoo(" erasure( 2 , 0.25 ) ").is_ok());
        assert!(matches!(zoo("erasure(2,1.5)"), Err(ChannelError::BadParam(_))));
        assert!(matches!(zoo("erasure(2)"), Err(ChannelError::BadParam(_))));
        assert!(matches!(zoo("squeeze(0.1)"), Err(ChannelError::UnknownChannel(_))));
        assert!(matches!(zoo("identity"), Err(ChannelError::ParseError(_))));
        assert!(matches!(zoo("identity(x)"), Err(ChannelError::BadParam(_))));
    }

    #[test]
    fn channel_file_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ch.json");
        let ch = random_channel(2, 3, 2, 77).unwrap();
        save_channel(&path, &ch).unwrap();
        let back = load_channel(&path).unwrap();
        assert_eq!(ch, back, "save -> load must preserve Kraus entries exactly");
    }

    #[test]
    fn load_reports_parse_and_completeness_errors() {
        let dir = tempfile::tempdir().unwrap();
        let garbage = dir.path().join("bad.json");
        std::fs::write(&garbage, "{ not json").unwrap();
        assert!(matches!(load_channel(&garbage), Err(ChannelError::ParseError(_))));

        let incomplete = dir.path().join("incomplete.json");
        std::fs::write(
            &incomplete,
            r#"{ "dim_in": 2, "dim_out": 2, "kraus": [[[[0.5,0.0],[0.0,0.0]],[[0.0,0.0],[0.5,0.0]]]] }"#,
        )
        .unwrap();
        match load_channel(&incomplete) {
            Err(ChannelError::CompletenessViolation { deviation }) => assert!(deviation > 0.1),
            other => panic!("expected completeness violation, got {other:?}"),
        }
    }
}
