//! Dynamical-map models: the collision implementation of the approximate NOT
//! gate and a two-level atom coupled to a single cavity mode prepared in a
//! coherent state, plus small named static channels.

use crate::chanrep::PauliTransferMatrix;
use crate::divisibility::{classify, DivisibilityReport};
use crate::linalg::{c, pauli, C64, CMat2};
use crate::normalform::special_orthogonal_form;
use nalgebra::{DMatrix, DVector, Matrix4, Vector3};
use num_complex::Complex64;

#[derive(Debug, thiserror::Error)]
pub enum DynError {
    #[error("Fock truncation insufficient: leakage {0:.3e} in the top levels")]
    TruncationInsufficient(f64),
    #[error("operator dimensions are inconsistent")]
    DimensionMismatch,
}

/// Best CPTP approximation of the NOT gate: ρ ↦ (𝟙 − ρ)/3.
pub fn a_not() -> PauliTransferMatrix {
    PauliTransferMatrix::new(Matrix4::from_diagonal(&nalgebra::Vector4::new(
        1.0,
        -1.0 / 3.0,
        -1.0 / 3.0,
        -1.0 / 3.0,
    )))
}

/// Best CPTP approximation of transposition: diag(1, ⅓, −⅓, ⅓).
pub fn approx_transposition() -> PauliTransferMatrix {
    PauliTransferMatrix::new(Matrix4::from_diagonal(&nalgebra::Vector4::new(
        1.0,
        1.0 / 3.0,
        -1.0 / 3.0,
        1.0 / 3.0,
    )))
}

pub fn dephasing_map(t: f64, gamma: f64) -> PauliTransferMatrix {
    let e = (-gamma * t).exp();
    PauliTransferMatrix::new(Matrix4::from_diagonal(&nalgebra::Vector4::new(
        1.0, e, e, 1.0,
    )))
}

/// Collision model interpolating to the approximate NOT gate:
/// Ê(t) = cos²t 𝟙̂ + sin²t Â_NOT + ½ sin(2t) F̂ with F[ϱ] = (i/3) Σ_j [σ_j, ϱ].
pub fn collision_not_map(t: f64) -> PauliTransferMatrix {
    let f_hat = Matrix4::from_fn(|a, b| {
        let mut img = CMat2::zeros();
        for j in 1..4 {
            img += (pauli(j) * pauli(b) - pauli(b) * pauli(j)) * c(0.0, 1.0 / 3.0);
        }
        ((pauli(a) * img).trace() * c(0.5, 0.0)).re
    });
    let (s, cth) = t.sin_cos();
    let m = Matrix4::identity() * (cth * cth) + a_not().m * (s * s) + f_hat * (s * cth);
    PauliTransferMatrix::new(m)
}

// ---------------------------------------------------------------------------
// Jaynes–Cummings model

#[derive(Debug, Clone)]
pub struct JcParams {
    pub alpha: Complex64,
    pub g: f64,
    pub omega_a: f64,
    pub omega_f: f64,
    pub n_fock: usize,
}

impl JcParams {
    pub fn new(alpha: Complex64, g: f64, omega_a: f64, omega_f: f64) -> Self {
        let a = alpha.norm();
        let n_fock = (a * a + 6.0 * a + 10.0).ceil() as usize;
        JcParams {
            alpha,
            g,
            omega_a,
            omega_f,
            n_fock,
        }
    }

    pub fn detuning(&self) -> f64 {
        self.omega_f - self.omega_a
    }
}

/// Caches the eigendecomposition of the truncated atom–field Hamiltonian
/// H = (ω_a/2)σ_z⊗𝟙 + ω_f 𝟙⊗(a†a + ½) + g(σ₋⊗a† + σ₊⊗a), so repeated
/// evaluations at different times are exact and cheap.
pub struct JcSimulator {
    params: JcParams,
    evals: DVector<f64>,
    evecs: DMatrix<C64>,
    /// eigenbasis coordinates of |0⟩⊗|α⟩ and |1⟩⊗|α⟩
    init: [DVector<C64>; 2],
}

impl JcSimulator {
    pub fn new(params: JcParams) -> Self {
        let n = params.n_fock;
        let dim = 2 * n;
        let idx = |q: usize, m: usize| q * n + m;
        let mut h = DMatrix::<C64>::zeros(dim, dim);
        for q in 0..2 {
            let sz = 1.0 - 2.0 * q as f64;
            for m in 0..n {
                h[(idx(q, m), idx(q, m))] = c(
                    0.5 * params.omega_a * sz + params.omega_f * (m as f64 + 0.5),
                    0.0,
                );
            }
        }
        // σ₋ = |1⟩⟨0|, σ₊ = |0⟩⟨1|
        for m in 0..n - 1 {
            let v = params.g * ((m + 1) as f64).sqrt();
            h[(idx(1, m + 1), idx(0, m))] += c(v, 0.0);
            h[(idx(0, m), idx(1, m + 1))] += c(v, 0.0);
        }
        let se = h.symmetric_eigen();

        // truncated, renormalized coherent state
        let mut coh = DVector::<C64>::zeros(n);
        let mut amp = c((-params.alpha.norm_sqr() / 2.0).exp(), 0.0);
        for m in 0..n {
            coh[m] = amp;
            amp = amp * params.alpha / c(((m + 1) as f64).sqrt(), 0.0);
        }
        let coh = &coh / c(coh.norm(), 0.0);

        let mut init = [DVector::zeros(dim), DVector::zeros(dim)];
        for q in 0..2 {
            let mut psi = DVector::<C64>::zeros(dim);
            for m in 0..n {
                psi[idx(q, m)] = coh[m];
            }
            init[q] = se.eigenvectors.adjoint() * psi;
        }
        JcSimulator {
            params,
            evals: se.eigenvalues,
            evecs: se.eigenvectors,
            init,
        }
    }

    pub fn params(&self) -> &JcParams {
        &self.params
    }

    fn evolve(&self, t: f64, q: usize) -> DVector<C64> {
        let phases = DVector::from_fn(self.evals.len(), |i, _| {
            let ph = -self.evals[i] * t;
            c(ph.cos(), ph.sin()) * self.init[q][i]
        });
        &self.evecs * phases
    }

    /// Transfer matrix of the induced qubit channel at time t.
    pub fn channel(&self, t: f64) -> Result<PauliTransferMatrix, DynError> {
        let n = self.params.n_fock;
        let psi = [self.evolve(t, 0), self.evolve(t, 1)];
        let mut leak = 0.0_f64;
        for p in &psi {
            for q in 0..2 {
                for m in n - 2..n {
                    leak += p[q * n + m].norm_sqr();
                }
            }
        }
        if leak > 1e-6 {
            return Err(DynError::TruncationInsufficient(leak));
        }
        // M_ij = tr_field |ψ_i⟩⟨ψ_j|
        let mut m_ops = [[CMat2::zeros(); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let mut mm = CMat2::zeros();
                for q in 0..2 {
                    for qp in 0..2 {
                        let mut s = c(0.0, 0.0);
                        for m in 0..n {
                            s += psi[i][q * n + m] * psi[j][qp * n + m].conj();
                        }
                        mm[(q, qp)] = s;
                    }
                }
                m_ops[i][j] = mm;
            }
        }
        let ptm = Matrix4::from_fn(|a, b| {
            let sb = pauli(b);
            let mut img = CMat2::zeros();
            for i in 0..2 {
                for j in 0..2 {
                    img += m_ops[i][j] * sb[(i, j)];
                }
            }
            ((pauli(a) * img).trace() * c(0.5, 0.0)).re
        });
        Ok(PauliTransferMatrix::new(ptm))
    }
}

pub fn jc_channel(t: f64, p: &JcParams) -> Result<PauliTransferMatrix, DynError> {
    JcSimulator::new(p.clone()).channel(t)
}

/// Closed-form excited-state population for the atom prepared in its ground
/// state and the field in a coherent state:
/// ⟨σ_z(t)⟩ = −Σ P_n [Δ²/(4Ω_n²) + (1 − Δ²/(4Ω_n²)) cos(2Ω_n t)].
pub fn jc_excited_probability(t: f64, p: &JcParams, n_terms: usize) -> f64 {
    let delta = p.detuning();
    let a2 = p.alpha.norm_sqr();
    let mut pn = (-a2).exp();
    let mut sz = 0.0;
    for n in 0..n_terms {
        let omega2 = delta * delta / 4.0 + p.g * p.g * n as f64;
        let ratio = if omega2 > 0.0 {
            delta * delta / (4.0 * omega2)
        } else {
            1.0
        };
        sz -= pn * (ratio + (1.0 - ratio) * (2.0 * omega2.sqrt() * t).cos());
        pn *= a2 / (n + 1) as f64;
    }
    (sz + 1.0) / 2.0
}

// ---------------------------------------------------------------------------
// Trajectory sweeps

#[derive(Debug, Clone)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub report: DivisibilityReport,
    pub lambdas: Vector3<f64>,
    pub tau: Vector3<f64>,
}

/// Classify a time-parameterized channel on a uniform grid; per-point errors
/// are kept in place as gap markers.
pub fn sweep<F>(map: F, t0: f64, t1: f64, steps: usize) -> Vec<Result<TrajectoryPoint, DynError>>
where
    F: Fn(f64) -> Result<PauliTransferMatrix, DynError>,
{
    (0..steps)
        .map(|k| {
            let t = if steps > 1 {
                t0 + (t1 - t0) * k as f64 / (steps - 1) as f64
            } else {
                t0
            };
            map(t).map(|e| {
                let report = classify(&e);
                let so = special_orthogonal_form(&e);
                TrajectoryPoint {
                    t,
                    report,
                    lambdas: so.lambdas,
                    tau: so.gamma,
                }
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// First-order generator of a global unitary coupling

/// L = i tr_E [· ⊗ ρ_E, H] for a Hamiltonian on the qubit ⊗ environment
/// space, as a Pauli-basis 4×4 matrix.  For every H and ρ_E this is a pure
/// commutator generator (vanishing dissipative part).
pub fn exact_first_order_generator(
    h: &DMatrix<C64>,
    rho_e: &DMatrix<C64>,
) -> Result<Matrix4<f64>, DynError> {
    let d_e = rho_e.nrows();
    if rho_e.ncols() != d_e || h.nrows() != 2 * d_e || h.ncols() != 2 * d_e {
        return Err(DynError::DimensionMismatch);
    }
    let out = Matrix4::from_fn(|a, b| {
        let sb = pauli(b);
        // X = σ_b ⊗ ρ_E
        let mut x = DMatrix::<C64>::zeros(2 * d_e, 2 * d_e);
        for i in 0..2 {
            for j in 0..2 {
                for m in 0..d_e {
                    for mp in 0..d_e {
                        x[(i * d_e + m, j * d_e + mp)] = sb[(i, j)] * rho_e[(m, mp)];
                    }
                }
            }
        }
        let comm = &x * h - h * &x;
        // i tr_E
        let mut img = CMat2::zeros();
        for q in 0..2 {
            for qp in 0..2 {
                let mut s = c(0.0, 0.0);
                for m in 0..d_e {
                    s += comm[(q * d_e + m, qp * d_e + m)];
                }
                img[(q, qp)] = s * c(0.0, 1.0);
            }
        }
        ((pauli(a) * img).trace() * c(0.5, 0.0)).re
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chanrep::is_cptp;
    use crate::divisibility::classify;
    use crate::linalg::c;
    use crate::TriState;
    use rand::{Rng, SeedableRng};

    #[test]
    fn collision_map_endpoints_and_symmetry() {
        assert!((collision_not_map(0.0).m - PauliTransferMatrix::identity().m).norm() < 1e-15);
        let half = collision_not_map(std::f64::consts::FRAC_PI_2);
        assert!((half.m - a_not().m).norm() < 1e-14);
        assert!((half.m.determinant() + 1.0 / 27.0).abs() < 1e-15);
        // E(π − t) = E(π/2 + (π/2 − t)) shares the diagonal part with E(t)
        for &t in &[0.3, 0.7, 1.1] {
            let e1 = collision_not_map(t);
            assert!(is_cptp(&e1).is_cptp());
        }
    }

    #[test]
    fn collision_trajectory_crossings() {
        // δ drops from ⅓ to 0 exactly at t = π/3 and recovers at 2π/3, where
        // the determinant changes sign
        let eps = 1e-4;
        let third = std::f64::consts::PI / 3.0;
        for (t, expect_delta) in [
            (third - eps, 1.0 / 3.0),
            (third + eps, 0.0),
            (2.0 * third - eps, 0.0),
            (2.0 * third + eps, 1.0 / 3.0),
        ] {
            let rep = classify(&collision_not_map(t));
            assert_eq!(rep.delta, expect_delta, "t = {t}");
            // the whole open trajectory has unital Kraus rank 3, hence is a
            // product of no pair of non-unitary channels
            assert_eq!(rep.in_div, TriState::No, "t = {t}");
        }
    }

    #[test]
    fn dephasing_is_always_l_divisible() {
        for k in 1..20 {
            let rep = classify(&dephasing_map(0.1 * k as f64, 0.8));
            assert!(rep.in_l.holds());
            assert_eq!(rep.delta, 1.0);
        }
    }

    #[test]
    fn jc_channel_matches_closed_form_excitation_probability() {
        let p = JcParams::new(c(6.0, 0.0), 10.0, 5.0, 20.0);
        let sim = JcSimulator::new(p.clone());
        for k in 0..40 {
            let t = 2.0 * k as f64 / 39.0;
            let e = sim.channel(t).unwrap();
            // atom starts in the ground state: Bloch vector (1, 0, 0, −1)
            let out = e.m * nalgebra::Vector4::new(1.0, 0.0, 0.0, -1.0);
            assert!((out[0] - 1.0).abs() < 1e-8, "trace preservation");
            let pe_num = (out[3] + 1.0) / 2.0;
            let pe_ref = jc_excited_probability(t, &p, p.n_fock + 20);
            assert!((pe_num - pe_ref).abs() < 1e-6, "t = {t}: {pe_num} vs {pe_ref}");
            assert!(is_cptp(&e).min_choi_eigenvalue > -1e-6);
        }
    }

    #[test]
    fn jc_truncation_guard() {
        let mut p = JcParams::new(c(6.0, 0.0), 10.0, 5.0, 20.0);
        p.n_fock = 40; // too small for |α| = 6 under strong coupling
        let sim = JcSimulator::new(p);
        assert!(matches!(sim.channel(1.5), Err(DynError::TruncationInsufficient(_))));
    }

    #[test]
    fn sweep_grid_endpoints() {
        let pts = sweep(|t| Ok(collision_not_map(t)), 0.0, 1.0, 11);
        assert_eq!(pts.len(), 11);
        let first = pts[0].as_ref().unwrap();
        let last = pts[10].as_ref().unwrap();
        assert_eq!(first.t, 0.0);
        assert_eq!(last.t, 1.0);
        assert!((first.report.det - 1.0).abs() < 1e-12);
    }

    #[test]
    fn first_order_generator_is_purely_hamiltonian() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(47);
        for &d_e in &[2usize, 3, 4] {
            let dim = 2 * d_e;
            let a = nalgebra::DMatrix::<crate::linalg::C64>::from_fn(dim, dim, |_, _| {
                c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
            });
            let h = (&a + a.adjoint()) * c(0.5, 0.0);
            // random environment state
            let b = nalgebra::DMatrix::<crate::linalg::C64>::from_fn(d_e, d_e, |_, _| {
                c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
            });
            let mut rho = &b * b.adjoint();
            let tr = (0..d_e).map(|i| rho[(i, i)].re).sum::<f64>();
            rho /= c(tr, 0.0);
            let l = exact_first_order_generator(&h, &rho).unwrap();
            let data = crate::lindblad::hg_decomposition(&l);
            assert!(data.g.norm() < 1e-10, "d_E = {d_e}: ‖G‖ = {:.3e}", data.g.norm());
        }
    }
}
