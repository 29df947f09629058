//! Qubit quantum channels, their divisibility hierarchy, and one-mode
//! Gaussian channels.
//!
//! The crate is organised around a handful of small dense-matrix
//! representations:
//!
//! * [`chanrep`] — Pauli transfer matrices, Choi states, Kraus sets and the
//!   conversions between them;
//! * [`normalform`] — the special-orthogonal (Ruskai) and restricted Lorentz
//!   normal forms of a qubit channel;
//! * [`lindblad`] — real matrix logarithms, (H, G) generator decompositions
//!   and conditional complete positivity;
//! * [`divisibility`] — classification into indivisible / divisible /
//!   P- / CP- / L-divisible plus entanglement breaking;
//! * [`dynmaps`] — the collision NOT model and a Jaynes–Cummings simulator;
//! * [`gaussian`] — functional forms of one-mode Gaussian channels, their
//!   affine (T, N, τ) tuples, singular classes, concatenation and
//!   master-equation existence.

pub mod chanrep;
pub mod divisibility;
pub mod dynmaps;
pub mod gaussian;
pub mod lindblad;
pub mod normalform;

pub(crate) mod linalg;

use std::sync::OnceLock;

/// Default tolerance for positivity / trace-preservation checks.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Relative tolerance for rank decisions (Kraus rank, rank of T, ...).
pub const RANK_TOL: f64 = 1e-8;

static TOL: OnceLock<f64> = OnceLock::new();

/// Tolerance used by all positivity / boundary tests.
///
/// Resolved once per process: the `DIVISCHAN_TOL` environment variable
/// overrides [`DEFAULT_TOL`].
pub fn tol() -> f64 {
    *TOL.get_or_init(|| {
        std::env::var("DIVISCHAN_TOL")
            .ok()
            .and_then(|s| s.parse::<f64>().ok())
            .filter(|t| t.is_finite() && *t > 0.0)
            .unwrap_or(DEFAULT_TOL)
    })
}

/// Three-valued verdict for set-membership tests whose defining
/// inequalities may sit on a boundary or be outside the scope of the
/// implemented criteria.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TriState {
    Yes,
    No,
    /// Defining inequality within the boundary belt of zero.
    Boundary,
    /// No implemented criterion decides the case.
    Undecided,
}

impl TriState {
    /// Boundary resolves to the more permissive class.
    pub fn holds(self) -> bool {
        matches!(self, TriState::Yes | TriState::Boundary)
    }

    pub fn from_ineq(value: f64, belt: f64) -> TriState {
        if value > belt {
            TriState::Yes
        } else if value >= -belt {
            TriState::Boundary
        } else {
            TriState::No
        }
    }
}
