//! Classification of qubit channels into the divisibility hierarchy
//! C ⊃ C^div ⊃ C^P ⊃ C^CP ⊃ C^L and the entanglement-breaking test.

use crate::chanrep::{choi_from_ptm, is_cptp, ChanError, PauliTransferMatrix};
use crate::lindblad::{is_ccp, real_log_exists, real_logarithms};
use crate::linalg::min_eig_hermitian;
use crate::normalform::lorentz_normal_form;
use crate::{tol, TriState};
use nalgebra::Vector3;

fn require_cptp(e: &PauliTransferMatrix) -> Result<(), ChanError> {
    if is_cptp(e).is_cptp() {
        Ok(())
    } else {
        Err(ChanError::NotCptp)
    }
}

/// Divisibility into two non-trivial factors, decided through the Kraus rank:
/// rank 4 and rank ≤ 2 channels are divisible, unital rank-3 channels are
/// not, non-unital rank-3 channels are out of scope.
pub fn is_divisible(e: &PauliTransferMatrix) -> Result<TriState, ChanError> {
    require_cptp(e)?;
    Ok(divisible_unchecked(e))
}

fn divisible_unchecked(e: &PauliTransferMatrix) -> TriState {
    let rank = choi_from_ptm(e).rank();
    match rank {
        4 => TriState::Yes,
        3 if e.is_unital() => TriState::No,
        3 => TriState::Undecided,
        _ => TriState::Yes,
    }
}

/// P-divisibility: det Ê ≥ 0 is necessary and sufficient for qubit channels.
pub fn is_p_divisible(e: &PauliTransferMatrix) -> Result<bool, ChanError> {
    require_cptp(e)?;
    Ok(e.det() >= -tol())
}

/// CP-divisibility through the Lorentz normal form: for diagonal forms,
/// membership iff the form has rank < 3 or s_min² ≥ s₁s₂s₃ > 0 (evaluated on
/// the normalized channel diagonal).  Non-diagonal forms are undecided.
pub fn is_cp_divisible(e: &PauliTransferMatrix) -> Result<TriState, ChanError> {
    require_cptp(e)?;
    Ok(cp_divisible_unchecked(e))
}

fn cp_divisible_unchecked(e: &PauliTransferMatrix) -> TriState {
    let form = match lorentz_normal_form(e) {
        Ok(f) => f,
        Err(_) => return TriState::Undecided,
    };
    if !form.is_diagonal {
        return TriState::Undecided;
    }
    let v = form.channel_diag();
    let belt = tol();
    let min_abs = v.iter().fold(f64::INFINITY, |a, x| a.min(x.abs()));
    if min_abs <= belt {
        return TriState::Yes; // rank of the form < 3
    }
    let p = v[0] * v[1] * v[2];
    if p < -belt {
        return TriState::No;
    }
    if p <= belt {
        return TriState::Boundary;
    }
    TriState::from_ineq(min_abs * min_abs - p, belt)
}

/// L-divisibility of a Pauli channel, by cases on the signs of λ.
pub fn l_divisible_pauli(lambdas: &Vector3<f64>) -> TriState {
    let belt = tol();
    let l = lambdas;
    let neg: Vec<usize> = (0..3).filter(|&i| l[i] < -belt).collect();
    match neg.len() {
        0 => {
            // λ_i ≥ λ_j λ_k for all permutations
            let mut worst = f64::INFINITY;
            for i in 0..3 {
                let (j, k) = ((i + 1) % 3, (i + 2) % 3);
                worst = worst.min(l[i] - l[j] * l[k]);
            }
            TriState::from_ineq(worst, belt)
        }
        2 => {
            let (a, b) = (l[neg[0]], l[neg[1]]);
            if (a - b).abs() > 1e-7 {
                return TriState::No;
            }
            let eta = l[(0..3).find(|i| !neg.contains(i)).unwrap()];
            let lam = 0.5 * (a.abs() + b.abs());
            TriState::from_ineq(eta - lam * lam, belt)
        }
        _ => TriState::No,
    }
}

/// L-divisibility: closed form for Pauli channels; spectral screening plus a
/// search over real-logarithm branches otherwise.
pub fn is_l_divisible(e: &PauliTransferMatrix) -> Result<TriState, ChanError> {
    require_cptp(e)?;
    Ok(l_divisible_unchecked(e))
}

fn l_divisible_unchecked(e: &PauliTransferMatrix) -> TriState {
    if e.is_pauli_channel() {
        return l_divisible_pauli(&e.lambdas());
    }
    if !real_log_exists(e) {
        return TriState::No;
    }
    let branches = real_logarithms(e, 3);
    let mut best = TriState::Undecided;
    for l in &branches {
        match is_ccp(l) {
            TriState::Yes => return TriState::Yes,
            TriState::Boundary => best = TriState::Boundary,
            _ => {}
        }
    }
    if best == TriState::Boundary {
        TriState::Boundary
    } else {
        TriState::Undecided
    }
}

/// Infinite divisibility of a Pauli channel coincides with L-divisibility.
pub fn is_infinitely_divisible_pauli(lambdas: &Vector3<f64>) -> bool {
    l_divisible_pauli(lambdas).holds()
}

/// Entanglement breaking iff the partial transpose of the Choi state is PSD.
pub fn is_entanglement_breaking(e: &PauliTransferMatrix) -> Result<bool, ChanError> {
    require_cptp(e)?;
    Ok(eb_unchecked(e))
}

fn eb_unchecked(e: &PauliTransferMatrix) -> bool {
    min_eig_hermitian(&choi_from_ptm(e).partial_transpose()) >= -tol()
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct DivisibilityReport {
    pub in_c: bool,
    pub in_div: TriState,
    pub in_p: bool,
    pub in_cp: TriState,
    pub in_l: TriState,
    pub in_infty_pauli: TriState,
    pub eb: bool,
    /// 1 in C^L, ⅔ in C^CP∖C^L, ⅓ in C^P∖C^CP, 0 outside C^P.
    pub delta: f64,
    /// 1 iff entanglement breaking.
    pub chi: u8,
    pub det: f64,
    pub diagnostics: Vec<String>,
}

/// Full classification of a transfer matrix.  Non-CPTP inputs yield a report
/// with `in_c = false` and all memberships undecided.
pub fn classify(e: &PauliTransferMatrix) -> DivisibilityReport {
    let det = e.det();
    let mut diagnostics = Vec::new();
    if !is_cptp(e).is_cptp() {
        diagnostics.push("input is not CPTP".to_string());
        return DivisibilityReport {
            in_c: false,
            in_div: TriState::Undecided,
            in_p: false,
            in_cp: TriState::Undecided,
            in_l: TriState::Undecided,
            in_infty_pauli: TriState::Undecided,
            eb: false,
            delta: 0.0,
            chi: 0,
            det,
            diagnostics,
        };
    }

    let in_div = divisible_unchecked(e);
    let in_p = det >= -tol();
    let mut in_cp = cp_divisible_unchecked(e);
    let in_l = l_divisible_unchecked(e);
    let in_infty_pauli = if e.is_pauli_channel() {
        l_divisible_pauli(&e.lambdas())
    } else {
        TriState::Undecided
    };
    let eb = eb_unchecked(e);

    // repair and record any violation of the monotone chain L ⇒ CP ⇒ P
    if in_l.holds() && in_cp == TriState::No {
        diagnostics.push("monotonicity repair: in_l holds but in_cp was no".to_string());
        in_cp = TriState::Yes;
    }
    if matches!(in_l, TriState::Boundary) || matches!(in_cp, TriState::Boundary) {
        diagnostics.push("boundary case resolved to the more permissive class".to_string());
    }
    if in_cp == TriState::Undecided {
        diagnostics.push("in_cp undecided; delta falls back to the largest decided class".to_string());
    }

    let delta = if in_l.holds() {
        1.0
    } else if in_cp.holds() {
        2.0 / 3.0
    } else if in_p {
        1.0 / 3.0
    } else {
        0.0
    };

    DivisibilityReport {
        in_c: true,
        in_div,
        in_p,
        in_cp,
        in_l,
        in_infty_pauli,
        eb,
        delta,
        chi: eb as u8,
        det,
        diagnostics,
    }
}
