//! Real matrix logarithms of transfer matrices, conditional complete
//! positivity, and (H, G) generator decompositions.

use crate::chanrep::{choi_from_ptm, PauliTransferMatrix};
use crate::linalg::{c, expm4, kron2, min_eig_hermitian, pauli, C64, CMat2, CMat4};
use crate::TriState;
use nalgebra::{DMatrix, DVector, Matrix4, Vector4};

/// Spectral screening for the existence of a real logarithm: no vanishing
/// eigenvalue, and every negative real eigenvalue with even multiplicity.
pub fn real_log_exists(e: &PauliTransferMatrix) -> bool {
    let scale = e.m.norm().max(1.0);
    let ev: Vec<C64> = e.m.complex_eigenvalues().iter().cloned().collect();
    if ev.iter().any(|v| v.norm() < 1e-10 * scale) {
        return false;
    }
    let mut neg: Vec<f64> = ev
        .iter()
        .filter(|v| v.im.abs() <= 1e-8 * scale && v.re < 0.0)
        .map(|v| v.re)
        .collect();
    neg.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if neg.len() % 2 != 0 {
        return false;
    }
    neg.chunks(2)
        .all(|p| (p[0] - p[1]).abs() <= 1e-7 * scale.max(p[0].abs()))
}

/// All real logarithms L of Ê (i.e. exp L = Ê) reachable with rotation
/// branch indices |k| ≤ `k_window`, principal branch first.  Branches whose
/// exponential fails to reproduce Ê (after zeroing the trace-preservation
/// row) are dropped; duplicates are merged.
pub fn real_logarithms(e: &PauliTransferMatrix, k_window: i32) -> Vec<Matrix4<f64>> {
    let a = e.m;
    let scale = a.norm().max(1.0);
    let ctol = 1e-8 * scale;

    // cluster the spectrum; conjugate pairs are a single cluster carrier
    let mut evs: Vec<C64> = a.complex_eigenvalues().iter().cloned().collect();
    evs.sort_by(|x, y| {
        (x.re, x.im)
            .partial_cmp(&(y.re, y.im))
            .unwrap()
    });
    let mut clusters: Vec<(C64, usize)> = Vec::new();
    for v in evs {
        match clusters.last_mut() {
            Some((cv, n)) if (*cv / (*n as f64) - v).norm() <= 1e-7 * scale => {
                *cv += v;
                *n += 1;
            }
            _ => clusters.push((v, 1)),
        }
    }
    let clusters: Vec<(C64, usize)> = clusters
        .into_iter()
        .map(|(s, n)| (s / n as f64, n))
        .collect();

    // real 2-column carriers: (columns of V, base block, k-step, has branches)
    struct Block {
        cols: Vec<Vector4<f64>>,
        log_diag: f64,
        theta: f64,
        // angle increment per branch index; 0 for no branching
        step: f64,
    }
    let mut blocks: Vec<Block> = Vec::new();
    let mut used_conj: Vec<C64> = Vec::new();
    for &(v, mult) in &clusters {
        if v.norm() < 1e-10 * scale {
            return Vec::new();
        }
        if v.im.abs() <= ctol {
            let lam = v.re;
            let ns = real_null_space4(&(a - Matrix4::identity() * lam), 1e-6);
            if ns.len() != mult {
                return Vec::new(); // defective: out of scope
            }
            if lam > 0.0 {
                if mult == 2 {
                    blocks.push(Block {
                        cols: ns,
                        log_diag: lam.ln(),
                        theta: 0.0,
                        step: 2.0 * std::f64::consts::PI,
                    });
                } else {
                    for w in ns {
                        blocks.push(Block {
                            cols: vec![w],
                            log_diag: lam.ln(),
                            theta: 0.0,
                            step: 0.0,
                        });
                    }
                }
            } else {
                if mult != 2 {
                    return Vec::new();
                }
                blocks.push(Block {
                    cols: ns,
                    log_diag: lam.abs().ln(),
                    theta: std::f64::consts::PI,
                    step: 2.0 * std::f64::consts::PI,
                });
            }
        } else if v.im > 0.0 {
            if mult != 1 {
                return Vec::new();
            }
            used_conj.push(v);
            // complex null vector w = u + iv̂:  A [u v̂] = [u v̂] [[a, b], [-b, a]]
            let ca = CMat4::from_fn(|i, j| c(a[(i, j)], 0.0)) - CMat4::identity() * c(v.re, v.im);
            let ns = crate::linalg::null_space(&ca, 1e-6 * scale);
            let w = match ns.first() {
                Some(w) => w,
                None => return Vec::new(),
            };
            let u = Vector4::from_fn(|i, _| w[i].re);
            let vv = Vector4::from_fn(|i, _| w[i].im);
            blocks.push(Block {
                cols: vec![u, vv],
                log_diag: v.norm().ln(),
                theta: v.arg(),
                step: 2.0 * std::f64::consts::PI,
            });
        }
        // v.im < 0: conjugate partner, handled with its pair
    }

    // assemble V
    let mut vmat = Matrix4::zeros();
    let mut col = 0;
    let mut spans: Vec<(usize, usize)> = Vec::new(); // (start, len) per block
    for b in &blocks {
        spans.push((col, b.cols.len()));
        for w in &b.cols {
            if col >= 4 {
                return Vec::new();
            }
            vmat.set_column(col, w);
            col += 1;
        }
    }
    if col != 4 {
        return Vec::new();
    }
    let vinv = match vmat.try_inverse() {
        Some(v) => v,
        None => return Vec::new(),
    };

    // branch indices ordered by |k| so the principal branch comes first
    let kvals: Vec<i32> = {
        let mut v = vec![0];
        for k in 1..=k_window {
            v.push(k);
            v.push(-k);
        }
        v
    };
    let branching: Vec<usize> = (0..blocks.len()).filter(|&i| blocks[i].step != 0.0).collect();
    let mut out: Vec<Matrix4<f64>> = Vec::new();
    let mut ks = vec![0i32; branching.len()];
    let mut stack = vec![0usize; branching.len() + 1];
    // iterate the cartesian product of branch indices
    let total: usize = kvals.len().pow(branching.len() as u32);
    for flat in 0..total.max(1) {
        let mut rem = flat;
        for (slot, _) in branching.iter().enumerate() {
            ks[slot] = kvals[rem % kvals.len()];
            rem /= kvals.len();
        }
        let _ = &mut stack;

        let mut bmat = Matrix4::zeros();
        for (bi, b) in blocks.iter().enumerate() {
            let (start, len) = spans[bi];
            if len == 1 {
                bmat[(start, start)] = b.log_diag;
            } else {
                let slot = branching.iter().position(|&x| x == bi);
                let angle = b.theta + b.step * slot.map_or(0.0, |s| ks[s] as f64);
                bmat[(start, start)] = b.log_diag;
                bmat[(start + 1, start + 1)] = b.log_diag;
                bmat[(start, start + 1)] = angle;
                bmat[(start + 1, start)] = -angle;
            }
        }
        let mut l = vmat * bmat * vinv;
        for j in 0..4 {
            l[(0, j)] = 0.0;
        }
        if (expm4(&l) - a).norm() > 1e-7 * scale {
            continue;
        }
        if out.iter().any(|x| (x - l).norm() < 1e-8 * (1.0 + l.norm())) {
            continue;
        }
        out.push(l);
    }
    out
}

fn real_null_space4(m: &Matrix4<f64>, rel: f64) -> Vec<Vector4<f64>> {
    let svd = m.svd(false, true);
    let v_t = svd.v_t.unwrap();
    let max_sv = svd.singular_values.max().max(1e-300);
    let mut out = Vec::new();
    for i in 0..4 {
        if svd.singular_values[i] <= rel * max_sv {
            out.push(v_t.row(i).transpose());
        }
    }
    out
}

/// Projector 𝟙 − |Ω⟩⟨Ω| onto the complement of the maximally entangled state.
fn omega_perp() -> CMat4 {
    let mut p = CMat4::identity();
    // |Ω⟩ = (|00⟩ + |11⟩)/√2
    let idx = [0usize, 3usize];
    for &i in &idx {
        for &j in &idx {
            p[(i, j)] -= c(0.5, 0.0);
        }
    }
    p
}

/// Conditional complete positivity of a generator: ω⊥ τ_L ω⊥ ⪰ 0 where τ_L
/// is the Choi matrix of L.
pub fn is_ccp(l: &Matrix4<f64>) -> TriState {
    let tau = choi_from_ptm(&PauliTransferMatrix::new(*l)).m;
    let p = omega_perp();
    let m = p * tau * p;
    TriState::from_ineq(min_eig_hermitian(&m), crate::tol())
}

/// (H, G) data of a generator in the basis F_i = σ_i/√2.
#[derive(Debug, Clone)]
pub struct LindbladData {
    pub h: CMat2,
    pub g: CMat4,
    /// Eigenvalues of G, descending.
    pub rates: Vector4<f64>,
}

fn f_op(i: usize) -> CMat2 {
    pauli(i) / c(2f64.sqrt(), 0.0)
}

/// Choi matrix of ρ ↦ F_i ρ F_j†.
fn sandwich_choi(i: usize, j: usize) -> CMat4 {
    let fi = f_op(i);
    let fj = f_op(j).adjoint();
    let mut tau = CMat4::zeros();
    for a in 0..2 {
        for b in 0..2 {
            let mut eab = CMat2::zeros();
            eab[(a, b)] = c(1.0, 0.0);
            let img = fi * eab * fj;
            let mut anc = CMat2::zeros();
            anc[(a, b)] = c(0.5, 0.0);
            tau += kron2(&anc, &img);
        }
    }
    tau
}

/// Decompose a trace-preserving generator into Hamiltonian and dissipative
/// parts: L[ρ] = −i[H, ρ] + Σ_ij G_ij (F_i ρ F_j† − ½{F_j† F_i, ρ}).
pub fn hg_decomposition(l: &Matrix4<f64>) -> LindbladData {
    let tau = choi_from_ptm(&PauliTransferMatrix::new(*l)).m;
    let p = omega_perp();
    let target = p * tau * p;

    // spatial G (i, j ∈ {1,2,3}) from least squares on projected Chois
    let mut amat = DMatrix::<C64>::zeros(16, 9);
    let mut bvec = DVector::<C64>::zeros(16);
    for r in 0..4 {
        for s in 0..4 {
            bvec[4 * r + s] = target[(r, s)];
        }
    }
    for i in 1..4 {
        for j in 1..4 {
            let cij = p * sandwich_choi(i, j) * p;
            for r in 0..4 {
                for s in 0..4 {
                    amat[(4 * r + s, 3 * (i - 1) + (j - 1))] = cij[(r, s)];
                }
            }
        }
    }
    let sol = amat
        .svd(true, true)
        .solve(&bvec, 1e-12)
        .expect("least-squares solve");
    let mut g = CMat4::zeros();
    for i in 1..4 {
        for j in 1..4 {
            g[(i, j)] = sol[3 * (i - 1) + (j - 1)];
        }
    }
    g = (g + g.adjoint()) * c(0.5, 0.0);

    // residual L − D_G has the form ρ ↦ κρ + ρκ†; fit κ (8 real parameters)
    let diss = dissipator_ptm(&g);
    let resid = l - diss;
    let mut am = DMatrix::<f64>::zeros(16, 8);
    for par in 0..8 {
        let mut kap = CMat2::zeros();
        let (idx, im) = (par / 2, par % 2 == 1);
        kap[(idx / 2, idx % 2)] = if im { c(0.0, 1.0) } else { c(1.0, 0.0) };
        let pt = affine_ptm(&kap);
        for r in 0..4 {
            for s in 0..4 {
                am[(4 * r + s, par)] = pt[(r, s)];
            }
        }
    }
    let mut bv = DVector::<f64>::zeros(16);
    for r in 0..4 {
        for s in 0..4 {
            bv[4 * r + s] = resid[(r, s)];
        }
    }
    let ksol = am
        .svd(true, true)
        .solve(&bv, 1e-12)
        .expect("least-squares solve");
    let mut kappa = CMat2::zeros();
    for par in 0..8 {
        let (idx, im) = (par / 2, par % 2 == 1);
        kappa[(idx / 2, idx % 2)] += if im {
            c(0.0, ksol[par])
        } else {
            c(ksol[par], 0.0)
        };
    }

    // κ = S − iH with S ≈ −½ Σ G_ij F_j† F_i  ⇒  H = i(κ − S)
    let mut s_op = CMat2::zeros();
    for i in 0..4 {
        for j in 0..4 {
            if g[(i, j)] != c(0.0, 0.0) {
                s_op -= (f_op(j).adjoint() * f_op(i)) * (g[(i, j)] * c(0.5, 0.0));
            }
        }
    }
    let h = (kappa - s_op) * c(0.0, 1.0);
    let h = (h + h.adjoint()) * c(0.5, 0.0);

    let se = g.symmetric_eigen();
    let mut rates: Vec<f64> = se.eigenvalues.iter().cloned().collect();
    rates.sort_by(|a, b| b.partial_cmp(a).unwrap());
    LindbladData {
        h,
        g,
        rates: Vector4::from_iterator(rates),
    }
}

/// Transfer matrix of ρ ↦ κρ + ρκ†.
fn affine_ptm(kappa: &CMat2) -> Matrix4<f64> {
    Matrix4::from_fn(|i, j| {
        let img = kappa * pauli(j) + pauli(j) * kappa.adjoint();
        ((pauli(i) * img).trace() * c(0.5, 0.0)).re
    })
}

/// Transfer matrix of the dissipator Σ_ij G_ij (F_i ρ F_j† − ½{F_j† F_i, ρ}).
fn dissipator_ptm(g: &CMat4) -> Matrix4<f64> {
    Matrix4::from_fn(|i, j| {
        let rho = pauli(j);
        let mut img = CMat2::zeros();
        for a in 0..4 {
            for b in 0..4 {
                if g[(a, b)] == c(0.0, 0.0) {
                    continue;
                }
                let fa = f_op(a);
                let fb = f_op(b).adjoint();
                let ff = fb * fa;
                img += (fa * rho * fb - (ff * rho + rho * ff) * c(0.5, 0.0)) * g[(a, b)];
            }
        }
        ((pauli(i) * img).trace() * c(0.5, 0.0)).re
    })
}

/// Full generator transfer matrix from (H, G) data.
pub fn build_generator(h: &CMat2, g: &CMat4) -> Matrix4<f64> {
    let ham = Matrix4::from_fn(|i, j| {
        let img = (h * pauli(j) - pauli(j) * h) * c(0.0, -1.0);
        ((pauli(i) * img).trace() * c(0.5, 0.0)).re
    });
    ham + dissipator_ptm(g)
}

/// exp(L) as a transfer matrix.
pub fn exp_generator(l: &Matrix4<f64>) -> PauliTransferMatrix {
    PauliTransferMatrix::new(expm4(l))
}
