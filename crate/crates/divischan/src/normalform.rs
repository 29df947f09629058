//! Normal forms of qubit channels: the special-orthogonal (Ruskai) form
//! Δ = R₁ D R₂ and the restricted Lorentz normal form R = L₁ Σ L₂ᵀ of the
//! Choi R-matrix.

use crate::chanrep::PauliTransferMatrix;
use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};

#[derive(Debug, thiserror::Error)]
pub enum NormalFormError {
    #[error("Lorentz decomposition failed to converge to a recognized shape")]
    DecompositionFailed,
}

// ---------------------------------------------------------------------------
// Special orthogonal form

/// Δ = R₁ diag(λ) R₂ with R₁, R₂ ∈ SO(3); γ = R₁ᵀ t.
#[derive(Debug, Clone)]
pub struct SpecialOrthogonalForm {
    pub lambdas: Vector3<f64>,
    pub gamma: Vector3<f64>,
    pub r1: Matrix3<f64>,
    pub r2: Matrix3<f64>,
}

impl SpecialOrthogonalForm {
    /// Unitary-conjugation transfer matrix for R₁.
    pub fn u1(&self) -> PauliTransferMatrix {
        PauliTransferMatrix::new(embed_rotation(&self.r1))
    }

    pub fn u2(&self) -> PauliTransferMatrix {
        PauliTransferMatrix::new(embed_rotation(&self.r2))
    }

    /// Middle factor: row 0 = (1, 0ᵀ), block (γ, diag λ).
    pub fn d_hat(&self) -> PauliTransferMatrix {
        let mut m = Matrix4::zeros();
        m[(0, 0)] = 1.0;
        for i in 0..3 {
            m[(i + 1, 0)] = self.gamma[i];
            m[(i + 1, i + 1)] = self.lambdas[i];
        }
        PauliTransferMatrix::new(m)
    }

    pub fn reconstruct(&self) -> PauliTransferMatrix {
        PauliTransferMatrix::new(self.u1().m * self.d_hat().m * self.u2().m)
    }
}

fn embed_rotation(r: &Matrix3<f64>) -> Matrix4<f64> {
    let mut m = Matrix4::identity();
    for i in 0..3 {
        for j in 0..3 {
            m[(i + 1, j + 1)] = r[(i, j)];
        }
    }
    m
}

/// Special-orthogonal normal form of a TP qubit map.
///
/// Already-diagonal distortion matrices are kept as-is (identity rotations,
/// reordered only through sign-free even permutations); the general case uses
/// an SVD with any reflection pushed into the sign of λ₃.
pub fn special_orthogonal_form(e: &PauliTransferMatrix) -> SpecialOrthogonalForm {
    let d = e.distortion();
    let t = e.shift();

    let scale = d.norm().max(1.0);
    let offdiag: f64 = (0..3)
        .flat_map(|i| (0..3).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j)
        .map(|(i, j)| d[(i, j)].abs())
        .sum();
    if offdiag <= 1e-12 * scale {
        let diag = [d[(0, 0)], d[(1, 1)], d[(2, 2)]];
        if let Some(perm) = even_sorting_permutation(&diag) {
            let mut p = Matrix3::zeros();
            for k in 0..3 {
                p[(perm[k], k)] = 1.0;
            }
            let lambdas = Vector3::new(diag[perm[0]], diag[perm[1]], diag[perm[2]]);
            let r1 = p;
            let r2 = p.transpose();
            return SpecialOrthogonalForm {
                lambdas,
                gamma: r1.transpose() * t,
                r1,
                r2,
            };
        }
    }

    let svd = d.svd(true, true);
    let u = svd.u.unwrap();
    let v_t = svd.v_t.unwrap();
    // sort singular triplets descending (consistent permutation of both sides)
    let mut idx: Vec<usize> = (0..3).collect();
    idx.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .unwrap()
    });
    let mut r1 = Matrix3::zeros();
    let mut r2 = Matrix3::zeros();
    let mut lambdas = Vector3::zeros();
    for (k, &i) in idx.iter().enumerate() {
        r1.set_column(k, &u.column(i));
        r2.set_row(k, &v_t.row(i));
        lambdas[k] = svd.singular_values[i];
    }
    if r1.determinant() < 0.0 {
        for i in 0..3 {
            r1[(i, 2)] = -r1[(i, 2)];
        }
        lambdas[2] = -lambdas[2];
    }
    if r2.determinant() < 0.0 {
        for j in 0..3 {
            r2[(2, j)] = -r2[(2, j)];
        }
        lambdas[2] = -lambdas[2];
    }
    SpecialOrthogonalForm {
        lambdas,
        gamma: r1.transpose() * t,
        r1,
        r2,
    }
}

/// Permutation sorting `diag` by decreasing magnitude that is even (or the
/// identity); `None` when only an odd permutation sorts.
fn even_sorting_permutation(diag: &[f64; 3]) -> Option<[usize; 3]> {
    const PERMS: [([usize; 3], bool); 6] = [
        ([0, 1, 2], true),
        ([1, 2, 0], true),
        ([2, 0, 1], true),
        ([0, 2, 1], false),
        ([1, 0, 2], false),
        ([2, 1, 0], false),
    ];
    let sorted = |p: &[usize; 3]| {
        diag[p[0]].abs() + 1e-13 >= diag[p[1]].abs() && diag[p[1]].abs() + 1e-13 >= diag[p[2]].abs()
    };
    PERMS
        .iter()
        .filter(|(p, even)| *even && sorted(p))
        .map(|(p, _)| *p)
        .next()
        .or_else(|| {
            // no even permutation sorts: give up on the fast path
            if PERMS.iter().any(|(p, even)| !even && sorted(p)) {
                None
            } else {
                None
            }
        })
}

/// Mixing weights of a Pauli channel: p₀ = (1+λ₁+λ₂+λ₃)/4,
/// p_k = (1+λ_k−λ_j−λ_l)/4.
pub fn pauli_probabilities(lambdas: &Vector3<f64>) -> Vector4<f64> {
    let (l1, l2, l3) = (lambdas[0], lambdas[1], lambdas[2]);
    Vector4::new(
        (1.0 + l1 + l2 + l3) / 4.0,
        (1.0 + l1 - l2 - l3) / 4.0,
        (1.0 - l1 + l2 - l3) / 4.0,
        (1.0 - l1 - l2 + l3) / 4.0,
    )
}

// ---------------------------------------------------------------------------
// Lorentz normal form

pub fn eta() -> Matrix4<f64> {
    Matrix4::from_diagonal(&Vector4::new(1.0, -1.0, -1.0, -1.0))
}

pub fn phi_t() -> Matrix4<f64> {
    Matrix4::from_diagonal(&Vector4::new(1.0, 1.0, -1.0, 1.0))
}

/// LᵀηL = η, det L = 1, L₀₀ > 0.
pub fn is_proper_orthochronous(l: &Matrix4<f64>) -> bool {
    let defect = (l.transpose() * eta() * l - eta()).norm();
    defect <= 1e-9 * (1.0 + l.norm()) && l.determinant() > 0.0 && l[(0, 0)] > 0.0
}

/// R = L₁ Σ L₂ᵀ with L₁, L₂ proper orthochronous.
#[derive(Debug, Clone)]
pub struct LorentzForm {
    pub sigma: Matrix4<f64>,
    pub l1: Matrix4<f64>,
    pub l2: Matrix4<f64>,
    pub alpha: f64,
    pub is_diagonal: bool,
    /// (Σ₁₁, Σ₂₂, Σ₃₃); meaningful when `is_diagonal`.
    pub s: Vector3<f64>,
}

impl LorentzForm {
    /// Diagonal of the normalized channel form α Σ Φ_T (spatial part), i.e.
    /// the λ-like entries of the Lorentz-equivalent Pauli channel.
    pub fn channel_diag(&self) -> Vector3<f64> {
        Vector3::new(
            self.alpha * self.sigma[(1, 1)],
            -self.alpha * self.sigma[(2, 2)],
            self.alpha * self.sigma[(3, 3)],
        )
    }

    pub fn reconstruct(&self) -> Matrix4<f64> {
        self.l1 * self.sigma * self.l2.transpose()
    }
}

/// Lorentz normal form of the Choi R-matrix R = Ê Φ_T.
pub fn lorentz_normal_form(e: &PauliTransferMatrix) -> Result<LorentzForm, NormalFormError> {
    let r = e.m * phi_t();
    if let Some(form) = diagonalizable_path(&r) {
        return Ok(form);
    }
    defective_path(&r).ok_or(NormalFormError::DecompositionFailed)
}

/// Eigenvalue clusters of a real matrix with (near-)real spectrum.
/// Returns (value, multiplicity) sorted descending, or None for genuinely
/// complex spectra.
fn real_eig_clusters(m: &Matrix4<f64>, ctol: f64) -> Option<Vec<(f64, usize)>> {
    let ev = m.complex_eigenvalues();
    let mut vals = Vec::with_capacity(4);
    for v in ev.iter() {
        if v.im.abs() > ctol {
            return None;
        }
        vals.push(v.re);
    }
    vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut clusters: Vec<(f64, usize)> = Vec::new();
    for v in vals {
        match clusters.last_mut() {
            Some((c, n)) if (*c / (*n as f64) - v).abs() <= ctol => {
                *c += v;
                *n += 1;
            }
            _ => clusters.push((v, 1)),
        }
    }
    Some(
        clusters
            .into_iter()
            .map(|(sum, n)| (sum / n as f64, n))
            .collect(),
    )
}

/// Orthonormal (Euclidean) null-space basis of m.  The cutoff is `rel`
/// times `scale` (the magnitude of the unshifted matrix), so that shifts of
/// near-identity matrices — which leave only numerical noise behind — still
/// yield their full null space.
fn real_null_space(m: &Matrix4<f64>, rel: f64, scale: f64) -> Vec<Vector4<f64>> {
    let svd = m.svd(false, true);
    let v_t = svd.v_t.unwrap();
    let cut = rel * scale.max(1e-300);
    let mut out = Vec::new();
    for i in 0..4 {
        if svd.singular_values[i] <= cut {
            out.push(v_t.row(i).transpose());
        }
    }
    out
}

fn eta_dot(a: &Vector4<f64>, b: &Vector4<f64>) -> f64 {
    a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3]
}

/// Deterministic η-orthonormal basis of a subspace given an orthonormal
/// Euclidean basis: greedy η-Gram–Schmidt seeded with coordinate-axis
/// projections (largest projection first).  Returns (vector, η-norm sign)
/// pairs, or None when a light-like direction blocks the construction.
fn eta_basis(euclid: &[Vector4<f64>]) -> Option<Vec<(Vector4<f64>, f64)>> {
    let dim = euclid.len();
    let project = |v: &Vector4<f64>| -> Vector4<f64> {
        let mut out = Vector4::zeros();
        for u in euclid {
            out += u * u.dot(v);
        }
        out
    };
    let mut axes: Vec<(usize, f64)> = (0..4)
        .map(|a| {
            let p = project(&Vector4::ith(a, 1.0));
            (a, p.norm())
        })
        .collect();
    axes.sort_by(|x, y| y.1.partial_cmp(&x.1).unwrap());

    let mut basis: Vec<(Vector4<f64>, f64)> = Vec::new();
    for (a, pn) in axes {
        if basis.len() == dim {
            break;
        }
        if pn < 1e-8 {
            continue;
        }
        let mut v = project(&Vector4::ith(a, 1.0));
        for (u, s) in &basis {
            v -= u * (eta_dot(u, &v) * s);
        }
        let n = eta_dot(&v, &v);
        if n.abs() < 1e-7 * v.norm_squared().max(1e-30) {
            continue;
        }
        let s = n.signum();
        basis.push((v / n.abs().sqrt(), s));
    }
    if basis.len() == dim {
        Some(basis)
    } else {
        None
    }
}

fn diagonalizable_path(r: &Matrix4<f64>) -> Option<LorentzForm> {
    let m1 = r * eta() * r.transpose() * eta();
    let scale = m1.norm().max(1.0);
    let ctol = 1e-7 * scale;
    let clusters = real_eig_clusters(&m1, ctol)?;
    if clusters.iter().any(|&(v, _)| v < -ctol) {
        return None;
    }

    // η-orthonormal eigenbasis of M₁ = R η Rᵀ η; its columns form L₁.
    let mut time: Option<(Vector4<f64>, f64)> = None; // (vector, eigenvalue)
    let mut space: Vec<(Vector4<f64>, f64)> = Vec::new();
    for &(val, mult) in &clusters {
        let ns = real_null_space(&(m1 - Matrix4::identity() * val), 5e-7, scale);
        if ns.len() != mult {
            return None;
        }
        for (v, sign) in eta_basis(&ns)? {
            if sign > 0.0 {
                if time.is_some() {
                    return None;
                }
                time = Some((v, val));
            } else {
                space.push((v, val));
            }
        }
    }
    let (tvec, tval) = time?;
    space.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());

    let mut l1 = Matrix4::zeros();
    let tvec = if tvec[0] < 0.0 { -tvec } else { tvec };
    l1.set_column(0, &tvec);
    for (i, (v, _)) in space.iter().enumerate() {
        l1.set_column(i + 1, v);
    }
    if l1.determinant() < 0.0 {
        for i in 0..4 {
            l1[(i, 3)] = -l1[(i, 3)];
        }
    }

    // Row i of Y = L₁⁻¹ R equals s_i times an η-orthonormal vector: extract
    // Σ and L₂ directly, completing any null rows by η-Gram–Schmidt.
    let eigs = [tval, space[0].1, space[1].1, space[2].1];
    let y = eta() * l1.transpose() * eta() * r;
    let smax = eigs.iter().fold(0.0_f64, |a, &b| a.max(b.abs())).sqrt();
    let mut l2 = Matrix4::zeros();
    let mut s4 = Vector4::zeros();
    let mut pending: Vec<usize> = Vec::new();
    for i in 0..4 {
        let w: Vector4<f64> = y.row(i).transpose();
        let si = eigs[i].max(0.0).sqrt();
        if si <= 1e-9 * smax.max(1.0) {
            pending.push(i);
            continue;
        }
        let n = eta_dot(&w, &w);
        let expected = if i == 0 { 1.0 } else { -1.0 };
        if (n / (si * si) - expected).abs() > 1e-6 {
            return None;
        }
        s4[i] = si;
        l2.set_column(i, &(w / si));
    }
    for &i in &pending {
        // complete an η-orthonormal column for a vanished singular direction
        let mut chosen = None;
        for a in 0..4 {
            let mut v = Vector4::ith(a, 1.0);
            for j in 0..4 {
                if j == i || (s4[j] == 0.0 && !l2.column(j).iter().any(|x| *x != 0.0)) {
                    continue;
                }
                let u: Vector4<f64> = l2.column(j).into_owned();
                let sg = if j == 0 { 1.0 } else { -1.0 };
                v -= u * (eta_dot(&u, &v) * sg);
            }
            let n = eta_dot(&v, &v);
            let expected = if i == 0 { 1.0 } else { -1.0 };
            if n * expected > 1e-7 {
                chosen = Some(v / n.abs().sqrt());
                break;
            }
        }
        l2.set_column(i, &chosen?);
        s4[i] = 0.0;
    }
    if l2[(0, 0)] < 0.0 {
        return None;
    }
    if l2.determinant() < 0.0 {
        for i in 0..4 {
            l2[(i, 3)] = -l2[(i, 3)];
        }
        s4[3] = -s4[3];
    }

    let sigma = Matrix4::from_diagonal(&s4);
    let form = LorentzForm {
        sigma,
        l1,
        l2,
        alpha: if s4[0].abs() > 0.0 { 1.0 / s4[0] } else { 0.0 },
        is_diagonal: true,
        s: Vector3::new(s4[1], s4[2], s4[3]),
    };
    validate(&form, r, true).then_some(form)
}

fn validate(form: &LorentzForm, r: &Matrix4<f64>, diagonal: bool) -> bool {
    let scale = 1.0 + r.norm();
    if (form.reconstruct() - r).norm() > 1e-8 * scale {
        return false;
    }
    if !is_proper_orthochronous(&form.l1) || !is_proper_orthochronous(&form.l2) {
        return false;
    }
    if diagonal {
        let mut off = 0.0_f64;
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    off = off.max(form.sigma[(i, j)].abs());
                }
            }
        }
        if off > 1e-8 * scale {
            return false;
        }
    }
    true
}

/// Closed-form construction for the Lorentz-non-diagonalizable case: the
/// defective invariant plane is spanned by the time axis and one coordinate
/// spatial axis, the restricted map is a Jordan block [[μ, β],[0, μ]] in
/// light-cone coordinates, and the boost gauge is fixed by scaling the
/// off-diagonal to β/√(1+β²).
fn defective_path(r: &Matrix4<f64>) -> Option<LorentzForm> {
    let m1 = r * eta() * r.transpose() * eta();
    let m2 = r.transpose() * eta() * r * eta();
    let l1 = defective_lorentz_factor(&m1)?;
    let l2 = defective_lorentz_factor(&m2)?;
    let sigma = eta() * l1.transpose() * eta() * r * eta() * l2 * eta();

    // accepted sparsity: (0,0),(0,3),(3,0),(3,3) block plus diagonal middle
    let scale = 1.0 + r.norm();
    for i in 0..4 {
        for j in 0..4 {
            let in_block = (i == 0 || i == 3) && (j == 0 || j == 3);
            if !in_block && i != j && sigma[(i, j)].abs() > 1e-8 * scale {
                return None;
            }
        }
    }
    if sigma[(0, 0)] <= 0.0 {
        return None;
    }
    let form = LorentzForm {
        alpha: 1.0 / sigma[(0, 0)],
        is_diagonal: false,
        s: Vector3::new(sigma[(1, 1)], sigma[(2, 2)], sigma[(3, 3)]),
        sigma,
        l1,
        l2,
    };
    validate(&form, r, false).then_some(form)
}

fn defective_lorentz_factor(m: &Matrix4<f64>) -> Option<Matrix4<f64>> {
    let scale = m.norm().max(1.0);
    let ctol = 1e-6 * scale;
    let clusters = real_eig_clusters(m, ctol)?;

    let mut defective: Option<f64> = None;
    let mut spatial: Vec<(Vector4<f64>, f64)> = Vec::new();
    for &(val, mult) in &clusters {
        let ns = real_null_space(&(m - Matrix4::identity() * val), 1e-5, scale);
        if ns.len() == mult {
            for (v, sign) in eta_basis(&ns)? {
                if sign > 0.0 {
                    return None; // diagonalizable timelike part handled elsewhere
                }
                // orientation convention of the defective branch: largest
                // entry negative
                let mx = v.iter().cloned().fold(0.0_f64, |a, b| {
                    if b.abs() > a.abs() {
                        b
                    } else {
                        a
                    }
                });
                spatial.push((if mx > 0.0 { -v } else { v }, val));
            }
        } else if mult == 2 && ns.len() == 1 && defective.is_none() {
            defective = Some(val);
        } else {
            return None;
        }
    }
    let mu = defective?;
    if spatial.len() != 2 {
        return None;
    }
    spatial.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());

    // invariant plane of the Jordan block: eigenvector + generalized vector
    let a = m - Matrix4::identity() * mu;
    let w1 = real_null_space(&a, 1e-5, scale).into_iter().next()?;
    let w2 = {
        let svd = a.svd(true, true);
        svd.solve(&w1, 1e-8).ok()?
    };
    // Euclidean orthonormal basis of the plane
    let q1 = w1.normalize();
    let mut q2 = w2 - q1 * q1.dot(&w2);
    if q2.norm() < 1e-8 {
        return None;
    }
    q2 = q2.normalize();
    let project = |v: &Vector4<f64>| q1 * q1.dot(v) + q2 * q2.dot(v);

    // the plane must be spanned by the time axis and one spatial axis
    let e0: Vector4<f64> = Vector4::ith(0, 1.0);
    if (project(&e0) - e0).norm() > 1e-6 {
        return None;
    }
    let mut axis = 0usize;
    let mut best = 0.0;
    for j in 1..4 {
        let ej: Vector4<f64> = Vector4::ith(j, 1.0);
        let n = project(&ej).norm();
        if n > best {
            best = n;
            axis = j;
        }
    }
    let em: Vector4<f64> = Vector4::ith(axis, 1.0);
    if (project(&em) - em).norm() > 1e-6 {
        return None;
    }

    let sq = 2.0_f64.sqrt();
    let u_plus = (e0 + em) / sq;
    let u_minus = (e0 - em) / sq;
    // matrix of m restricted to the plane in the light-cone basis
    let coeff = |x: &Vector4<f64>| -> (f64, f64) {
        (eta_dot(&u_minus, x), eta_dot(&u_plus, x)) // (along u₊, along u₋)
    };
    let (t11, t21) = coeff(&(m * u_plus));
    let (t12, t22) = coeff(&(m * u_minus));
    if (t11 - mu).abs() > 1e-6 * scale || (t22 - mu).abs() > 1e-6 * scale {
        return None;
    }
    let upper = t21.abs() <= 1e-8 * scale;
    let lower = t12.abs() <= 1e-8 * scale;
    if upper == lower {
        return None;
    }
    let beta = if upper { t12 } else { t21 };
    let f = 1.0 / (1.0 + beta * beta).sqrt();
    let (d1, d2) = if upper {
        (1.0 / f.sqrt(), f.sqrt())
    } else {
        (f.sqrt(), 1.0 / f.sqrt())
    };

    let col0 = (u_plus * d1 + u_minus * d2) / sq;
    let col3 = (u_plus * d1 - u_minus * d2) / sq;
    let mut l = Matrix4::zeros();
    l.set_column(0, &(if col0[0] < 0.0 { -col0 } else { col0 }));
    l.set_column(1, &spatial[0].0);
    l.set_column(2, &spatial[1].0);
    l.set_column(3, &(if col0[0] < 0.0 { -col3 } else { col3 }));
    Some(l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chanrep::{is_cptp, ptm_from_kraus, KrausSet, PauliTransferMatrix};
    use crate::linalg::{c, CMat2};
    use nalgebra::Matrix4;
    use rand::{Rng, SeedableRng};

    fn random_cptp(rng: &mut impl Rng, n_ops: usize) -> PauliTransferMatrix {
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
    fn diagonal_channels_pass_through() {
        let e = PauliTransferMatrix::from_lambdas(Vector3::new(-1.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0));
        let f = special_orthogonal_form(&e);
        for i in 0..3 {
            assert!((f.lambdas[i] + 1.0 / 3.0).abs() < 1e-15);
        }
        assert!((f.r1 - nalgebra::Matrix3::identity()).norm() < 1e-15);
        assert!((f.r2 - nalgebra::Matrix3::identity()).norm() < 1e-15);
    }

    #[test]
    fn diagonal_reordering_uses_even_permutations_only() {
        let e = PauliTransferMatrix::from_lambdas(Vector3::new(0.2, 0.9, 0.5));
        let f = special_orthogonal_form(&e);
        // an even permutation of the inputs, reconstructing exactly
        let mut sorted = [0.2, 0.9, 0.5];
        sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for i in 0..3 {
            assert!((f.lambdas[i] - sorted[i]).abs() < 1e-15);
        }
        assert!(f.r1.determinant() > 0.0 && f.r2.determinant() > 0.0);
        assert!((f.reconstruct().m - e.m).norm() < 1e-12);
    }

    #[test]
    fn special_orthogonal_factors_and_reconstruction() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(23);
        for _ in 0..200 {
            let n = rng.gen_range(1..5);
            let e = random_cptp(&mut rng, n);
            let f = special_orthogonal_form(&e);
            for r in [&f.r1, &f.r2] {
                assert!((r * r.transpose() - nalgebra::Matrix3::identity()).norm() < 1e-9);
                assert!((r.determinant() - 1.0).abs() < 1e-9);
            }
            assert!(f.lambdas[0] >= f.lambdas[1].abs() - 1e-12);
            assert!((f.reconstruct().m - e.m).norm() < 1e-9);
        }
    }

    #[test]
    fn pauli_probability_vectors() {
        let p_id = pauli_probabilities(&Vector3::new(1.0, 1.0, 1.0));
        assert!((p_id - nalgebra::Vector4::new(1.0, 0.0, 0.0, 0.0)).norm() < 1e-15);
        let p_not = pauli_probabilities(&Vector3::new(-1.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0));
        assert!((p_not - nalgebra::Vector4::new(0.0, 1.0, 1.0, 1.0) / 3.0).norm() < 1e-15);
    }

    #[test]
    fn lorentz_reconstruction_on_random_channels() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(29);
        let mut diagonal = 0;
        for _ in 0..200 {
            let n = rng.gen_range(1..5);
            let e = random_cptp(&mut rng, n);
            assert!(is_cptp(&e).is_cptp());
            let f = match lorentz_normal_form(&e) {
                Ok(f) => f,
                Err(_) => continue,
            };
            let r = e.m * phi_t();
            assert!((f.reconstruct() - r).norm() < 1e-7 * (1.0 + r.norm()));
            assert!(is_proper_orthochronous(&f.l1));
            assert!(is_proper_orthochronous(&f.l2));
            if f.is_diagonal {
                diagonal += 1;
            }
        }
        assert!(diagonal >= 195, "diagonal forms should dominate ({diagonal})");
    }

    #[test]
    fn defective_rank_three_channel_matches_closed_form() {
        let third = 1.0 / 3.0;
        let e = PauliTransferMatrix::new(Matrix4::new(
            1.0, 0.0, 0.0, 0.0,
            0.0, -third, 0.0, 0.0,
            0.0, 0.0, -third, 0.0,
            2.0 * third, 0.0, 0.0, third,
        ));
        let f = lorentz_normal_form(&e).unwrap();
        assert!(!f.is_diagonal);
        let g1 = 15.0_f64.sqrt();
        let l1_want = Matrix4::new(
            4.0, 0.0, 0.0, 1.0,
            0.0, -g1, 0.0, 0.0,
            0.0, 0.0, -g1, 0.0,
            1.0, 0.0, 0.0, 4.0,
        ) / g1;
        assert!((f.l1 - l1_want).norm() < 1e-10);
        let s97 = 97.0_f64.sqrt();
        let g3 = 30.0_f64.sqrt();
        let sig_want = Matrix4::new(
            (11.0 + 109.0 / s97).sqrt(), 0.0, 0.0, -(s97 + 1.0) / (89.0 * s97 + 873.0).sqrt(),
            0.0, -g3 / 3.0, 0.0, 0.0,
            0.0, 0.0, g3 / 3.0, 0.0,
            (1.0 + 49.0 / s97).sqrt(), 0.0, 0.0, (-1.0 + 49.0 / s97).sqrt(),
        ) / g3;
        assert!((f.sigma - sig_want).norm() < 1e-10);
    }
}
