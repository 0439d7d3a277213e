//! Dense matrix assembly — the brute-force oracle for the verification
//! operations. Production paths never materialize these matrices; only the
//! `verify_*` operations and tests call in here.

use super::HyperbolicSystem;

pub type Mat = Vec<Vec<f64>>;

pub fn zeros(s: usize) -> Mat {
    vec![vec![0.0; s]; s]
}

pub fn matvec(m: &Mat, v: &[f64]) -> Vec<f64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let s = a.len();
    let mut out = zeros(s);
    for i in 0..s {
        for k in 0..s {
            let aik = a[i][k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..s {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub fn transpose(a: &Mat) -> Mat {
    let s = a.len();
    let mut out = zeros(s);
    for i in 0..s {
        for j in 0..s {
            out[j][i] = a[i][j];
        }
    }
    out
}

pub fn add(a: &Mat, b: &Mat) -> Mat {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect())
        .collect()
}

/// Lifted `A~_k(p)`: block diagonal of the base Sylvester matrix.
pub fn assemble_a(sys: &HyperbolicSystem, k: usize, p: usize) -> Mat {
    let n = sys.n;
    let mut m = zeros(sys.size());
    for b in 0..sys.blocks() {
        let base = b * (n + 1);
        m[base + k][base + n] = 1.0;
        m[base + n][base + k] = sys.coeffs.a(k, p);
    }
    m
}

/// Entrywise spatial derivative `d_{x_i} A~_k(p)`.
pub fn assemble_da(sys: &HyperbolicSystem, i: usize, k: usize, p: usize) -> Mat {
    let n = sys.n;
    let mut m = zeros(sys.size());
    for b in 0..sys.blocks() {
        let base = b * (n + 1);
        m[base + n][base + k] = sys.coeffs.da(i, k, p);
    }
    m
}

/// Lifted symmetriser `Q~(p)`.
pub fn assemble_q(sys: &HyperbolicSystem, p: usize) -> Mat {
    let n = sys.n;
    let mut m = zeros(sys.size());
    for b in 0..sys.blocks() {
        let base = b * (n + 1);
        for k in 0..n {
            m[base + k][base + k] = sys.coeffs.a(k, p);
        }
        m[base + n][base + n] = 1.0;
    }
    m
}

/// Entrywise spatial derivative `d_{x_i} Q~(p)`.
pub fn assemble_dq(sys: &HyperbolicSystem, i: usize, p: usize) -> Mat {
    let n = sys.n;
    let mut m = zeros(sys.size());
    for b in 0..sys.blocks() {
        let base = b * (n + 1);
        for k in 0..n {
            m[base + k][base + k] = sys.coeffs.da(i, k, p);
        }
    }
    m
}

/// Lower-order matrix at the system's level: level 1 has blocks
/// `(i, j) = d_{x_i} A_j`; level 2 has superblocks
/// `(i, j) = d_{x_i} A~_j + delta_{ij} B~`.
pub fn assemble_b(sys: &HyperbolicSystem, p: usize) -> Mat {
    let n = sys.n;
    let size = sys.size();
    let mut m = zeros(size);
    match sys.level {
        0 => m,
        1 => {
            for i in 0..n {
                for j in 0..n {
                    // block (i,j): entry (n, j) = d_i a_j
                    m[i * (n + 1) + n][j * (n + 1) + j] = sys.coeffs.da(i, j, p);
                }
            }
            m
        }
        2 => {
            let sb = n * (n + 1);
            for i in 0..n {
                for j in 0..n {
                    // d_i A~_j = diag_h(d_i A_j)
                    for h in 0..n {
                        m[i * sb + h * (n + 1) + n][j * sb + h * (n + 1) + j] +=
                            sys.coeffs.da(i, j, p);
                    }
                }
                // + delta_ij B~ of level 1 inside superblock i
                for bi in 0..n {
                    for j in 0..n {
                        m[i * sb + bi * (n + 1) + n][i * sb + j * (n + 1) + j] +=
                            sys.coeffs.da(bi, j, p);
                    }
                }
            }
            m
        }
        _ => unreachable!(),
    }
}

/// Quadratic form `(d_{x_k}(Q~ A~_k) V, V)` by dense product rule:
/// `d_k(QA) = (d_k Q) A + Q (d_k A)`.
pub fn quadratic_form_dqa(sys: &HyperbolicSystem, k: usize, v: &[Vec<f64>]) -> f64 {
    let pts = sys.coeffs.points;
    let w = sys.coeffs.weight;
    let size = sys.size();
    let mut total = 0.0;
    let mut vp = vec![0.0; size];
    for p in 0..pts {
        let a = assemble_a(sys, k, p);
        let q = assemble_q(sys, p);
        let dq = assemble_dq(sys, k, p);
        let da = assemble_da(sys, k, k, p);
        let m = add(&matmul(&dq, &a), &matmul(&q, &da));
        for (c, comp) in v.iter().enumerate() {
            vp[c] = comp[p];
        }
        let mv = matvec(&m, &vp);
        total += mv.iter().zip(&vp).map(|(x, y)| x * y).sum::<f64>() * w;
    }
    total
}

/// Quadratic form `((Q~ B~ + B~^T Q~) V, V)` by dense assembly.
pub fn quadratic_form_qb_sym(sys: &HyperbolicSystem, v: &[Vec<f64>]) -> f64 {
    let pts = sys.coeffs.points;
    let w = sys.coeffs.weight;
    let size = sys.size();
    let mut total = 0.0;
    let mut vp = vec![0.0; size];
    for p in 0..pts {
        let q = assemble_q(sys, p);
        let b = assemble_b(sys, p);
        let m = add(&matmul(&q, &b), &matmul(&transpose(&b), &q));
        for (c, comp) in v.iter().enumerate() {
            vp[c] = comp[p];
        }
        let mv = matvec(&m, &vp);
        total += mv.iter().zip(&vp).map(|(x, y)| x * y).sum::<f64>() * w;
    }
    total
}

/// Pairing `(Q~ V, F~)` with `F~` the gradient stack of `(0, ..., 0, f)`.
pub fn pairing_qf(sys: &HyperbolicSystem, v: &[Vec<f64>], f_grad: &[Vec<f64>]) -> f64 {
    assert_eq!(sys.level, 1);
    let n = sys.n;
    let pts = sys.coeffs.points;
    let w = sys.coeffs.weight;
    let size = sys.size();
    let mut total = 0.0;
    let mut vp = vec![0.0; size];
    let mut fp = vec![0.0; size];
    for p in 0..pts {
        let q = assemble_q(sys, p);
        for (c, comp) in v.iter().enumerate() {
            vp[c] = comp[p];
        }
        fp.fill(0.0);
        for i in 0..n {
            fp[i * (n + 1) + n] = f_grad[i][p];
        }
        let qv = matvec(&q, &vp);
        total += qv.iter().zip(&fp).map(|(x, y)| x * y).sum::<f64>() * w;
    }
    total
}
