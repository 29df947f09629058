//! Representations of qubit states and channels: density matrices, Bloch
//! vectors, Pauli transfer matrices, Choi states and Kraus sets, plus the
//! lossless conversions between them.

use crate::linalg::{c, hermitian_eigen, kron2, min_eig_hermitian, pauli, CMat2, CMat4};
use crate::{tol, TriState, RANK_TOL};
use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ChanError {
    #[error("Kraus set is not trace preserving (‖ΣK†K − 1‖ = {0:.3e})")]
    NotTracePreserving(f64),
    #[error("Choi matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotCompletelyPositive(f64),
    #[error("channel is not CPTP")]
    NotCptp,
    #[error("parse error: {0}")]
    Parse(String),
}

/// Qubit density matrix ρ = ½(𝟙 + r·σ).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub m: CMat2,
}

impl DensityMatrix {
    pub fn new(m: CMat2) -> Self {
        DensityMatrix { m }
    }

    pub fn from_bloch(r: Vector3<f64>) -> Self {
        let mut m = pauli(0) * c(0.5, 0.0);
        for k in 0..3 {
            m += pauli(k + 1) * c(0.5 * r[k], 0.0);
        }
        DensityMatrix { m }
    }

    pub fn bloch(&self) -> Vector3<f64> {
        Vector3::from_fn(|k, _| (pauli(k + 1) * self.m).trace().re)
    }

    pub fn purity(&self) -> f64 {
        (self.m * self.m).trace().re
    }

    pub fn trace(&self) -> f64 {
        self.m.trace().re
    }

    pub fn is_valid(&self) -> bool {
        let t = tol();
        let herm = (self.m - self.m.adjoint()).norm() <= t;
        let tr = (self.m.trace().re - 1.0).abs() <= t && self.m.trace().im.abs() <= t;
        herm && tr && self.bloch().norm() <= 1.0 + t
    }
}

/// 4×4 real matrix Ê of a qubit map in the Pauli basis (𝟙, σx, σy, σz),
/// entries Ê_ij = ½ tr(σ_i E[σ_j]).  Trace-preserving maps have row 0 equal
/// to (1, 0, 0, 0); the lower-left column is the Bloch shift t and the
/// lower-right 3×3 block the distortion Δ, so that r ↦ Δr + t.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTransferMatrix {
    pub m: Matrix4<f64>,
}

impl PauliTransferMatrix {
    pub fn new(m: Matrix4<f64>) -> Self {
        PauliTransferMatrix { m }
    }

    pub fn identity() -> Self {
        PauliTransferMatrix::new(Matrix4::identity())
    }

    /// Unital Pauli channel diag(1, λ₁, λ₂, λ₃).
    pub fn from_lambdas(l: Vector3<f64>) -> Self {
        PauliTransferMatrix::new(Matrix4::from_diagonal(&Vector4::new(1.0, l[0], l[1], l[2])))
    }

    pub fn shift(&self) -> Vector3<f64> {
        Vector3::new(self.m[(1, 0)], self.m[(2, 0)], self.m[(3, 0)])
    }

    pub fn distortion(&self) -> Matrix3<f64> {
        Matrix3::from_fn(|i, j| self.m[(i + 1, j + 1)])
    }

    pub fn is_tp(&self) -> bool {
        let t = tol();
        (self.m[(0, 0)] - 1.0).abs() <= t
            && self.m[(0, 1)].abs() <= t
            && self.m[(0, 2)].abs() <= t
            && self.m[(0, 3)].abs() <= t
    }

    pub fn is_unital(&self) -> bool {
        self.shift().norm() <= tol()
    }

    pub fn det(&self) -> f64 {
        self.m.determinant()
    }

    /// Image of an arbitrary 2×2 operator under the map.
    pub fn apply_op(&self, x: &CMat2) -> CMat2 {
        let mut out = CMat2::zeros();
        for j in 0..4 {
            let w = (pauli(j) * x).trace() * c(0.5, 0.0);
            for i in 0..4 {
                out += pauli(i) * (w * c(self.m[(i, j)], 0.0));
            }
        }
        out
    }

    pub fn is_pauli_channel(&self) -> bool {
        let t = tol();
        if !self.is_tp() || self.shift().norm() > t {
            return false;
        }
        let d = self.distortion();
        (0..3).all(|i| (0..3).all(|j| i == j || d[(i, j)].abs() <= t))
    }

    pub fn lambdas(&self) -> Vector3<f64> {
        let d = self.distortion();
        Vector3::new(d[(0, 0)], d[(1, 1)], d[(2, 2)])
    }
}

/// Choi state τ_E = (id ⊗ E)[|Ω⟩⟨Ω|], trace normalized to one.  Basis order
/// is ancilla ⊗ system.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiState {
    pub m: CMat4,
}

impl ChoiState {
    pub fn new(m: CMat4) -> Self {
        ChoiState { m }
    }

    /// R-matrix of the two-qubit state: τ = ¼ Σ R_ij σ_i ⊗ σ_j.
    pub fn r_matrix(&self) -> Matrix4<f64> {
        Matrix4::from_fn(|i, j| (self.m * kron2(&pauli(i), &pauli(j))).trace().re)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eig_hermitian(&self.m)
    }

    /// Matrix rank at `RANK_TOL` relative to the largest eigenvalue.
    pub fn rank(&self) -> usize {
        let (vals, _) = hermitian_eigen(&self.m);
        let max = vals.iter().cloned().fold(0.0_f64, |a, b| a.max(b.abs()));
        if max == 0.0 {
            return 0;
        }
        vals.iter().filter(|v| v.abs() > RANK_TOL * max).count()
    }

    /// Partial transpose over the ancilla factor.
    pub fn partial_transpose(&self) -> CMat4 {
        let mut out = CMat4::zeros();
        for i in 0..2 {
            for j in 0..2 {
                for a in 0..2 {
                    for b in 0..2 {
                        out[(2 * i + a, 2 * j + b)] = self.m[(2 * j + a, 2 * i + b)];
                    }
                }
            }
        }
        out
    }
}

/// Kraus representation E[ρ] = Σ K_i ρ K_i†.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    pub ops: Vec<CMat2>,
}

impl KrausSet {
    pub fn new(ops: Vec<CMat2>) -> Self {
        KrausSet { ops }
    }

    /// ‖Σ K†K − 𝟙‖, zero for trace-preserving sets.
    pub fn tp_defect(&self) -> f64 {
        let mut s = CMat2::zeros();
        for k in &self.ops {
            s += k.adjoint() * k;
        }
        (s - CMat2::identity()).norm()
    }
}

/// Pauli transfer matrix of a Kraus set.
pub fn ptm_from_kraus(ks: &KrausSet) -> PauliTransferMatrix {
    let mut m = Matrix4::zeros();
    for j in 0..4 {
        let mut img = CMat2::zeros();
        for k in &ks.ops {
            img += k * pauli(j) * k.adjoint();
        }
        for i in 0..4 {
            m[(i, j)] = 0.5 * (pauli(i) * img).trace().re;
        }
    }
    PauliTransferMatrix::new(m)
}

/// Choi state τ = ½ Σ_{jk} |j⟩⟨k| ⊗ E[|j⟩⟨k|].
pub fn choi_from_ptm(e: &PauliTransferMatrix) -> ChoiState {
    let mut m = CMat4::zeros();
    for j in 0..2 {
        for k in 0..2 {
            let mut unit = CMat2::zeros();
            unit[(j, k)] = c(1.0, 0.0);
            let img = e.apply_op(&unit);
            for a in 0..2 {
                for b in 0..2 {
                    m[(2 * j + a, 2 * k + b)] += img[(a, b)] * c(0.5, 0.0);
                }
            }
        }
    }
    ChoiState::new(m)
}

/// Pauli transfer matrix recovered from a Choi state via Ê = R Φ_T.
pub fn ptm_from_choi(ch: &ChoiState) -> PauliTransferMatrix {
    let r = ch.r_matrix();
    let phi_t = Matrix4::from_diagonal(&Vector4::new(1.0, 1.0, -1.0, 1.0));
    PauliTransferMatrix::new(r * phi_t)
}

/// Kraus operators from the spectral decomposition of the Choi state; the
/// phase of each operator is fixed by making its largest-magnitude entry
/// real positive.
pub fn kraus_from_choi(ch: &ChoiState) -> Result<KrausSet, ChanError> {
    let (vals, vecs) = hermitian_eigen(&ch.m);
    let min = vals[0];
    if min < -tol() {
        return Err(ChanError::NotCompletelyPositive(min));
    }
    let max = vals.iter().cloned().fold(0.0_f64, |a, b| a.max(b));
    let mut ops = Vec::new();
    for i in (0..4).rev() {
        if vals[i] <= RANK_TOL * max || vals[i] <= 0.0 {
            continue;
        }
        // eigenvector of τ on ancilla⊗system: K_{b,j} = √(2λ) v_{(j,b)}
        let w = (2.0 * vals[i]).sqrt();
        let v = vecs.column(i);
        let mut k = CMat2::zeros();
        for j in 0..2 {
            for b in 0..2 {
                k[(b, j)] = v[2 * j + b] * c(w, 0.0);
            }
        }
        ops.push(canonical_phase(k));
    }
    Ok(KrausSet::new(ops))
}

fn canonical_phase(k: CMat2) -> CMat2 {
    let mut best = c(0.0, 0.0);
    for e in k.iter() {
        if e.norm() > best.norm() {
            best = *e;
        }
    }
    if best.norm() == 0.0 {
        return k;
    }
    let phase = best / best.norm();
    k * phase.conj()
}

/// Diagnostics bundle of the CPTP tests; a value, never an error.
#[derive(Debug, Clone, Serialize)]
pub struct CptpReport {
    pub tp: bool,
    pub cp: bool,
    pub min_choi_eigenvalue: f64,
    pub kraus_rank: usize,
    pub unital: bool,
    pub det: f64,
    /// Boundary-aware CP verdict (min Choi eigenvalue against ±tol).
    pub cp_state: TriState,
}

impl CptpReport {
    pub fn is_cptp(&self) -> bool {
        self.tp && self.cp
    }
}

pub fn is_cptp(e: &PauliTransferMatrix) -> CptpReport {
    let ch = choi_from_ptm(e);
    let min = ch.min_eigenvalue();
    let t = tol();
    CptpReport {
        tp: e.is_tp(),
        cp: min >= -t,
        min_choi_eigenvalue: min,
        kraus_rank: ch.rank(),
        unital: e.is_unital(),
        det: e.det(),
        cp_state: TriState::from_ineq(min, t),
    }
}

/// Bloch-vector action of a trace-preserving map.
pub fn apply(e: &PauliTransferMatrix, rho: &DensityMatrix) -> DensityMatrix {
    let r = e.distortion() * rho.bloch() + e.shift();
    DensityMatrix::from_bloch(r)
}

pub fn compose(e2: &PauliTransferMatrix, e1: &PauliTransferMatrix) -> PauliTransferMatrix {
    PauliTransferMatrix::new(e2.m * e1.m)
}

/// Adjoint with respect to the Hilbert–Schmidt inner product: transpose in
/// the Hermitian basis.  The adjoint of a TP map is unital.
pub fn adjoint(e: &PauliTransferMatrix) -> PauliTransferMatrix {
    PauliTransferMatrix::new(e.m.transpose())
}

// ---------------------------------------------------------------------------
// JSON interface

/// Wire format of a channel: `{"repr": "pauli"|"choi"|"kraus", "data": ...}`.
#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "repr", content = "data", rename_all = "lowercase")]
pub enum ChannelJson {
    /// 16 reals, row major.
    Pauli(Vec<f64>),
    /// 16 complex entries as [re, im] pairs, row major.
    Choi(Vec<[f64; 2]>),
    /// Kraus operators, each 4 complex entries row major.
    Kraus(Vec<[[f64; 2]; 4]>),
}

/// Parse a channel from its JSON wire format.
pub fn parse_channel_json(bytes: &[u8]) -> Result<PauliTransferMatrix, ChanError> {
    let parsed: ChannelJson =
        serde_json::from_slice(bytes).map_err(|e| ChanError::Parse(e.to_string()))?;
    channel_from_json(&parsed)
}

pub fn channel_from_json(j: &ChannelJson) -> Result<PauliTransferMatrix, ChanError> {
    let finite = |x: f64| x.is_finite();
    match j {
        ChannelJson::Pauli(v) => {
            if v.len() != 16 || !v.iter().all(|x| finite(*x)) {
                return Err(ChanError::Parse(
                    "pauli data must be 16 finite reals".into(),
                ));
            }
            Ok(PauliTransferMatrix::new(Matrix4::from_fn(|i, j| {
                v[4 * i + j]
            })))
        }
        ChannelJson::Choi(v) => {
            if v.len() != 16 || !v.iter().all(|p| finite(p[0]) && finite(p[1])) {
                return Err(ChanError::Parse(
                    "choi data must be 16 finite [re,im] pairs".into(),
                ));
            }
            let m = CMat4::from_fn(|i, j| c(v[4 * i + j][0], v[4 * i + j][1]));
            if (m - m.adjoint()).norm() > 1e-6 * (1.0 + m.norm()) {
                return Err(ChanError::Parse("choi matrix is not Hermitian".into()));
            }
            Ok(ptm_from_choi(&ChoiState::new(m)))
        }
        ChannelJson::Kraus(list) => {
            if list.is_empty() || list.len() > 8 {
                return Err(ChanError::Parse(
                    "kraus data must hold between 1 and 8 operators".into(),
                ));
            }
            let mut ops = Vec::new();
            for k in list {
                if !k.iter().all(|p| finite(p[0]) && finite(p[1])) {
                    return Err(ChanError::Parse("kraus entries must be finite".into()));
                }
                ops.push(CMat2::new(
                    c(k[0][0], k[0][1]),
                    c(k[1][0], k[1][1]),
                    c(k[2][0], k[2][1]),
                    c(k[3][0], k[3][1]),
                ));
            }
            Ok(ptm_from_kraus(&KrausSet::new(ops)))
        }
    }
}

/// Canonical wire format: always the Pauli representation.
pub fn channel_to_json(e: &PauliTransferMatrix) -> ChannelJson {
    let mut v = Vec::with_capacity(16);
    for i in 0..4 {
        for j in 0..4 {
            v.push(e.m[(i, j)]);
        }
    }
    ChannelJson::Pauli(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use nalgebra::{Matrix4, Vector3};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn random_cptp(rng: &mut impl Rng, n_ops: usize) -> PauliTransferMatrix {
        // random Kraus operators, then normalize Σ K†K = 1 with S^{-1/2}
        let ops: Vec<CMat2> = (0..n_ops)
            .map(|_| CMat2::from_fn(|_, _| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)))
            .collect();
        let s = ops.iter().fold(CMat2::zeros(), |acc, k| acc + k.adjoint() * k);
        let se = s.symmetric_eigen();
        let inv_sqrt = &se.eigenvectors
            * CMat2::from_diagonal(&se.eigenvalues.map(|x| c(1.0 / x.sqrt(), 0.0)))
            * se.eigenvectors.adjoint();
        ptm_from_kraus(&KrausSet::new(ops.iter().map(|k| k * inv_sqrt).collect()))
    }

    #[test]
    fn identity_fixed_points() {
        let id = PauliTransferMatrix::identity();
        let ch = choi_from_ptm(&id);
        // maximally entangled state, rank 1, trace 1
        assert!((ch.m.trace().re - 1.0).abs() < 1e-14);
        assert_eq!(ch.rank(), 1);
        let ks = kraus_from_choi(&ch).unwrap();
        assert_eq!(ks.ops.len(), 1);
        assert!((ptm_from_kraus(&ks).m - id.m).norm() < 1e-12);
        assert!((ptm_from_choi(&ch).m - id.m).norm() < 1e-12);
    }

    #[test]
    fn amplitude_damping_transfer_matrix() {
        let gamma: f64 = 0.3;
        let k0 = CMat2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c((1.0 - gamma).sqrt(), 0.0));
        let k1 = CMat2::new(c(0.0, 0.0), c(gamma.sqrt(), 0.0), c(0.0, 0.0), c(0.0, 0.0));
        let e = ptm_from_kraus(&KrausSet::new(vec![k0, k1]));
        let s = (1.0 - gamma).sqrt();
        let want = Matrix4::new(
            1.0, 0.0, 0.0, 0.0,
            0.0, s, 0.0, 0.0,
            0.0, 0.0, s, 0.0,
            gamma, 0.0, 0.0, 1.0 - gamma,
        );
        assert!((e.m - want).norm() < 1e-14);
        assert!(is_cptp(&e).is_cptp());
        assert!(!e.is_unital());
    }

    #[test]
    fn depolarizing_channel_lambdas() {
        let p: f64 = 0.4;
        let w0 = (1.0 - 3.0 * p / 4.0).sqrt();
        let w = (p / 4.0).sqrt();
        let ops = vec![
            crate::linalg::pauli(0) * c(w0, 0.0),
            crate::linalg::pauli(1) * c(w, 0.0),
            crate::linalg::pauli(2) * c(w, 0.0),
            crate::linalg::pauli(3) * c(w, 0.0),
        ];
        let e = ptm_from_kraus(&KrausSet::new(ops));
        let want = PauliTransferMatrix::from_lambdas(Vector3::new(1.0 - p, 1.0 - p, 1.0 - p));
        assert!((e.m - want.m).norm() < 1e-14);
        assert_eq!(choi_from_ptm(&e).rank(), 4);
    }

    #[test]
    fn pauli_cp_condition_matches_choi_spectrum() {
        // 1 + λ_i − λ_j − λ_k ≥ 0 and 1 + λ1 + λ2 + λ3 ≥ 0  ⇔  τ ≥ 0
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..2000 {
            let l = Vector3::new(
                rng.gen::<f64>() * 2.0 - 1.0,
                rng.gen::<f64>() * 2.0 - 1.0,
                rng.gen::<f64>() * 2.0 - 1.0,
            );
            let mut ineq = 1.0 + l[0] + l[1] + l[2];
            for i in 0..3 {
                let (j, k) = ((i + 1) % 3, (i + 2) % 3);
                ineq = ineq.min(1.0 + l[i] - l[j] - l[k]);
            }
            let e = PauliTransferMatrix::from_lambdas(l);
            let cp = choi_from_ptm(&e).min_eigenvalue() >= -1e-12;
            assert_eq!(ineq >= -1e-12, cp, "lambdas {:?}", l.as_slice());
        }
    }

    #[test]
    fn adjoint_is_transpose_and_compose_is_product() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        let a = random_cptp(&mut rng, 3);
        let b = random_cptp(&mut rng, 2);
        assert!((adjoint(&a).m - a.m.transpose()).norm() < 1e-14);
        assert!((compose(&a, &b).m - a.m * b.m).norm() < 1e-14);
    }

    #[test]
    fn apply_matches_transfer_matrix_action() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(13);
        let e = random_cptp(&mut rng, 3);
        let rho = DensityMatrix::from_bloch(Vector3::new(0.3, -0.2, 0.5));
        let out = apply(&e, &rho);
        assert!(out.is_valid());
        let r_in = rho.bloch();
        let want = e.distortion() * r_in + e.shift();
        assert!((out.bloch() - want).norm() < 1e-12);
    }

    #[test]
    fn json_roundtrip_and_errors() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(17);
        let e = random_cptp(&mut rng, 4);
        let j = channel_to_json(&e);
        let bytes = serde_json::to_vec(&j).unwrap();
        let back = parse_channel_json(&bytes).unwrap();
        assert!((back.m - e.m).norm() < 1e-15);
        assert!(parse_channel_json(b"not json").is_err());
        assert!(parse_channel_json(b"{\"repr\":\"pauli\",\"data\":[1,2]}").is_err());
    }

    proptest! {
        #[test]
        fn kraus_choi_ptm_roundtrip(seed in 0u64..500, n_ops in 1usize..5) {
            let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
            let e = random_cptp(&mut rng, n_ops);
            prop_assert!(is_cptp(&e).is_cptp());
            let ch = choi_from_ptm(&e);
            let ks = kraus_from_choi(&ch).unwrap();
            prop_assert!(ks.tp_defect() < 1e-9);
            let back = ptm_from_kraus(&ks);
            prop_assert!((back.m - e.m).norm() < 1e-9);
        }
    }
}
