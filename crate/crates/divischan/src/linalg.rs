//! Small dense-matrix helpers shared across the crate.

use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMat2 = Matrix2<C64>;
pub type CMat4 = Matrix4<C64>;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Pauli basis (𝟙, σx, σy, σz).
pub fn pauli(i: usize) -> CMat2 {
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    match i {
        0 => CMat2::new(one, z, z, one),
        1 => CMat2::new(z, one, one, z),
        2 => CMat2::new(z, c(0.0, -1.0), c(0.0, 1.0), z),
        3 => CMat2::new(one, z, z, -one),
        _ => panic!("pauli index out of range"),
    }
}

/// Kronecker product of two 2×2 complex matrices, row-major qubit order
/// (first factor is the most significant index).
pub fn kron2(a: &CMat2, b: &CMat2) -> CMat4 {
    let mut out = CMat4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[(2 * i + k, 2 * j + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Eigenvalues (ascending) and eigenvectors of a 4×4 complex Hermitian matrix.
pub fn hermitian_eigen(m: &CMat4) -> (Vector4<f64>, CMat4) {
    let se = m.symmetric_eigen();
    let mut idx: Vec<usize> = (0..4).collect();
    idx.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
    let mut vals = Vector4::zeros();
    let mut vecs = CMat4::zeros();
    for (pos, &i) in idx.iter().enumerate() {
        vals[pos] = se.eigenvalues[i];
        vecs.set_column(pos, &se.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// Smallest eigenvalue of a 4×4 complex Hermitian matrix.
pub fn min_eig_hermitian(m: &CMat4) -> f64 {
    m.symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

/// Orthonormal basis of the (approximate) null space of a complex 4×4 matrix:
/// right-singular vectors whose singular value is below `tol`.
pub fn null_space(m: &CMat4, tol: f64) -> Vec<Vector4<C64>> {
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("svd requested v_t");
    let mut out = Vec::new();
    for i in 0..4 {
        if svd.singular_values[i] <= tol {
            let row = v_t.row(i);
            out.push(Vector4::new(
                row[0].conj(),
                row[1].conj(),
                row[2].conj(),
                row[3].conj(),
            ));
        }
    }
    out
}

/// Matrix exponential of a real 4×4 matrix: scaling and squaring with a
/// [13/13] Padé approximant.
pub fn expm4(a: &Matrix4<f64>) -> Matrix4<f64> {
    const THETA13: f64 = 5.371920351148152;
    let norm = one_norm(a);
    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil().max(0.0) as u32
    } else {
        0
    };
    let a = a / 2f64.powi(s as i32);

    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];
    let id = Matrix4::identity();
    let a2 = a * a;
    let a4 = a2 * a2;
    let a6 = a2 * a4;
    let u = a * (a6 * (B[13] * a6 + B[11] * a4 + B[9] * a2)
        + B[7] * a6
        + B[5] * a4
        + B[3] * a2
        + B[1] * id);
    let v = a6 * (B[12] * a6 + B[10] * a4 + B[8] * a2)
        + B[6] * a6
        + B[4] * a4
        + B[2] * a2
        + B[0] * id;
    let mut r = (v - u)
        .lu()
        .solve(&(v + u))
        .expect("Padé denominator singular");
    for _ in 0..s {
        r = r * r;
    }
    r
}

fn one_norm(a: &Matrix4<f64>) -> f64 {
    (0..4)
        .map(|j| (0..4).map(|i| a[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expm_matches_series_small() {
        let a = Matrix4::new(
            0.0, 0.3, -0.2, 0.1, 0.0, -0.5, 0.4, 0.0, 0.1, 0.0, -0.1, 0.2, 0.0, 0.2, -0.3, -0.4,
        );
        // Taylor series reference
        let mut term = Matrix4::identity();
        let mut sum = Matrix4::identity();
        for k in 1..40 {
            term = term * a / (k as f64);
            sum += term;
        }
        assert!((expm4(&a) - sum).norm() < 1e-13);
    }

    #[test]
    fn expm_scaling_branch() {
        let a = Matrix4::from_diagonal(&nalgebra::Vector4::new(3.0, -8.0, 0.5, 12.0));
        let e = expm4(&a);
        for i in 0..4 {
            assert!((e[(i, i)] - a[(i, i)].exp()).abs() < 1e-9 * a[(i, i)].exp().max(1.0));
        }
    }

    #[test]
    fn null_space_of_projector() {
        let mut m = CMat4::identity();
        m[(0, 0)] = c(0.0, 0.0);
        m[(3, 3)] = c(0.0, 0.0);
        let ns = null_space(&m, 1e-12);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!((m * v).norm() < 1e-12);
        }
    }
}
