//! First-order reduction of the wave equation and its block-lifted systems.
//!
//! Writing `U = (d_{x_1}u, ..., d_{x_n}u, d_t u)^T` turns the scalar problem
//! into `d_t U = sum_k A_k(x) d_{x_k} U + F` where each `A_k` is a sparse
//! Sylvester-form matrix with exactly two nonzero entries: `(k, n+1) = 1`
//! and `(n+1, k) = a_k` (1-based). The diagonal matrix
//! `Q = diag(a_1, ..., a_n, 1)` symmetrises every `A_k` and defines the
//! energy; differentiating the system in space lifts it to block-diagonal
//! principal parts with lower-order couplings.
//!
//! Matrices are never materialized densely in these code paths: applications
//! walk the sparse structure. A dense assembly of everything lives in
//! [`dense`] as the brute-force oracle for the verification operations.

pub mod dense;

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::C64;

/// Coefficient values and derivatives sampled over an abstract set of grid
/// points. The energy identities are algebraic in these samples, so the
/// verification operations accept any consistent sample set (from a
/// regularized net or from a random stream).
#[derive(Debug, Clone)]
pub struct CoefficientSamples {
    /// Space dimension `n`.
    pub n: usize,
    /// Number of sample points.
    pub points: usize,
    /// Quadrature weight per point (`h^n`).
    pub weight: f64,
    /// `a[k*points + p]`: value of `a_{k+1}` at point `p`.
    a: Vec<f64>,
    /// `grad[(i*n + k)*points + p]`: `d_{x_{i+1}} a_{k+1}` at `p`.
    grad: Vec<f64>,
    /// `hess[((i*n + j)*n + k)*points + p]`: `d_i d_j a_{k+1}`; needed only
    /// for the level-2 forcing coupling.
    hess: Option<Vec<f64>>,
}

impl CoefficientSamples {
    pub fn new(
        n: usize,
        points: usize,
        weight: f64,
        a: Vec<f64>,
        grad: Vec<f64>,
        hess: Option<Vec<f64>>,
    ) -> Result<Self> {
        if a.len() != n * points || grad.len() != n * n * points {
            return Err(Error::Config(format!(
                "coefficient sample shapes do not match n = {n}, points = {points}"
            )));
        }
        if let Some(h) = &hess {
            if h.len() != n * n * n * points {
                return Err(Error::Config("hessian sample shape mismatch".into()));
            }
        }
        Ok(CoefficientSamples {
            n,
            points,
            weight,
            a,
            grad,
            hess,
        })
    }

    /// Random non-negative samples for verification trials.
    pub fn random(n: usize, points: usize, rng: &mut impl Rng) -> Self {
        let a = (0..n * points).map(|_| rng.gen_range(0.0..2.0)).collect();
        let grad = (0..n * n * points)
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect();
        let hess = (0..n * n * n * points)
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect();
        CoefficientSamples {
            n,
            points,
            weight: 1.0 / points as f64,
            a,
            grad,
            hess: Some(hess),
        }
    }

    /// Samples from a shared 1D profile: `a_k(x) = profile_k(x)` on a 1D
    /// grid, with exact derivative tables from the net.
    pub fn from_profiles(
        grid: &Grid,
        profiles: &[(&[C64], &[C64], &[C64])],
    ) -> Result<Self> {
        let n = profiles.len();
        let points = grid.points;
        let mut a = vec![0.0; n * points];
        let mut grad = vec![0.0; n * n * points];
        let mut hess = vec![0.0; n * n * n * points];
        for (k, (v, d1, d2)) in profiles.iter().enumerate() {
            if v.len() != points || d1.len() != points || d2.len() != points {
                return Err(Error::Config("profile length mismatch".into()));
            }
            for p in 0..points {
                a[k * points + p] = v[p].re;
                // layered profile: only the first axis derivative is nonzero
                grad[k * points + p] = d1[p].re;
                hess[k * points + p] = d2[p].re;
            }
        }
        Ok(CoefficientSamples {
            n,
            points,
            weight: grid.cell(),
            a,
            grad,
            hess: Some(hess),
        })
    }

    #[inline]
    pub fn a(&self, k: usize, p: usize) -> f64 {
        self.a[k * self.points + p]
    }

    /// `d_{x_i} a_k` at point `p` (0-based `i`, `k`).
    #[inline]
    pub fn da(&self, i: usize, k: usize, p: usize) -> f64 {
        self.grad[(i * self.n + k) * self.points + p]
    }

    /// `d_i d_j a_k` at `p`; zero if no hessian was supplied.
    #[inline]
    pub fn d2a(&self, i: usize, j: usize, k: usize, p: usize) -> f64 {
        match &self.hess {
            Some(h) => h[((i * self.n + j) * self.n + k) * self.points + p],
            None => 0.0,
        }
    }
}

/// Structural description of the forcing at each lift level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ForcingStructure {
    /// `(0, ..., 0, f)^T`.
    Scalar,
    /// Stack of spatial gradients of the previous level's forcing.
    Gradient,
    /// Gradient stack plus the coupling `(d_{x_i} B~) V` against the
    /// previous level's state.
    GradientWithCoupling,
}

/// The (level-lifted) first-order system. Level 0 is the `U`-system,
/// level 1 the `V`-system, level 2 the `W`-system; the state ordering is
/// `W = (d_{x_1}V, ..., d_{x_n}V)^T` at every lift.
#[derive(Debug, Clone)]
pub struct HyperbolicSystem {
    pub level: usize,
    pub n: usize,
    pub coeffs: Arc<CoefficientSamples>,
}

impl HyperbolicSystem {
    /// State-vector length `(n+1) * n^level`.
    pub fn size(&self) -> usize {
        (self.n + 1) * self.n.pow(self.level as u32)
    }

    /// Number of `(n+1)`-blocks.
    pub fn blocks(&self) -> usize {
        self.n.pow(self.level as u32)
    }

    pub fn forcing_structure(&self) -> ForcingStructure {
        match self.level {
            0 => ForcingStructure::Scalar,
            1 => ForcingStructure::Gradient,
            _ => ForcingStructure::GradientWithCoupling,
        }
    }

    /// Structured application `out = A~_k(p) v` (block-diagonal lift of the
    /// Sylvester matrix).
    pub fn apply_a(&self, k: usize, p: usize, v: &[f64], out: &mut [f64]) {
        let n = self.n;
        let ak = self.coeffs.a(k, p);
        out.fill(0.0);
        for b in 0..self.blocks() {
            let base = b * (n + 1);
            out[base + k] = v[base + n];
            out[base + n] = ak * v[base + k];
        }
    }

    /// Structured application of the symmetriser `Q~` (block diagonal of
    /// `diag(a_1, ..., a_n, 1)`).
    pub fn apply_q(&self, p: usize, v: &[f64], out: &mut [f64]) {
        let n = self.n;
        for b in 0..self.blocks() {
            let base = b * (n + 1);
            for k in 0..n {
                out[base + k] = self.coeffs.a(k, p) * v[base + k];
            }
            out[base + n] = v[base + n];
        }
    }

    /// Structured application of the lower-order matrix `B` at this level
    /// (zero at level 0).
    pub fn apply_b(&self, p: usize, v: &[f64], out: &mut [f64]) {
        let n = self.n;
        out.fill(0.0);
        match self.level {
            0 => {}
            1 => {
                // block (i, j) = d_{x_i} A_j: single entry (n, j) = d_i a_j
                for i in 0..n {
                    let mut acc = 0.0;
                    for j in 0..n {
                        acc += self.coeffs.da(i, j, p) * v[j * (n + 1) + j];
                    }
                    out[i * (n + 1) + n] = acc;
                }
            }
            2 => {
                let sb = n * (n + 1); // superblock size
                for i in 0..n {
                    // S1 part: sum_j diag_h(Q-free d_i A_j) acting on superblock j
                    for h in 0..n {
                        let mut acc = 0.0;
                        for j in 0..n {
                            acc += self.coeffs.da(i, j, p) * v[j * sb + h * (n + 1) + j];
                        }
                        out[i * sb + h * (n + 1) + n] += acc;
                    }
                    // S2 part: B~ (level-1 structure) acting within superblock i
                    for bi in 0..n {
                        let mut acc = 0.0;
                        for j in 0..n {
                            acc += self.coeffs.da(bi, j, p) * v[i * sb + j * (n + 1) + j];
                        }
                        out[i * sb + bi * (n + 1) + n] += acc;
                    }
                }
            }
            _ => unreachable!("levels validated at construction"),
        }
    }

    /// The level-2 forcing coupling `((d_{x_k} B~) V)` for superblock `k`,
    /// evaluated against a level-1 state `v` at point `p`.
    pub fn apply_dxk_b_level1(&self, k: usize, p: usize, v: &[f64], out: &mut [f64]) {
        let n = self.n;
        out.fill(0.0);
        // d_k of block (i, j) = d_k d_i A_j: entry (n, j) = d_k d_i a_j
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                acc += self.coeffs.d2a(k, i, j, p) * v[j * (n + 1) + j];
            }
            out[i * (n + 1) + n] = acc;
        }
    }
}

/// Level-0 system `d_t U = sum_k A_k d_{x_k} U + F`.
pub fn build_system(n: usize, coeffs: CoefficientSamples) -> Result<HyperbolicSystem> {
    if n < 1 {
        return Err(Error::Config("dimension must be >= 1".into()));
    }
    if coeffs.n != n {
        return Err(Error::Config(format!(
            "coefficient samples are for n = {}, requested n = {n}",
            coeffs.n
        )));
    }
    Ok(HyperbolicSystem {
        level: 0,
        n,
        coeffs: Arc::new(coeffs),
    })
}

/// Differentiate the system in space: the state becomes the gradient stack
/// of the previous state and the principal matrices lift block-diagonally.
/// Two lifts are supported; higher Sobolev orders are obtained spectrally
/// from the scalar solution instead.
pub fn derive_system(sys: &HyperbolicSystem) -> Result<HyperbolicSystem> {
    if sys.level >= 2 {
        return Err(Error::UnsupportedLevel(sys.level + 1));
    }
    Ok(HyperbolicSystem {
        level: sys.level + 1,
        n: sys.n,
        coeffs: Arc::clone(&sys.coeffs),
    })
}

/// Max entrywise residual of `Q A_k - A_k^T Q` over all points, matrices and
/// the joint sparsity pattern. The construction is integer-indexed, so the
/// residual must be exactly zero.
pub fn verify_symmetriser(sys: &HyperbolicSystem) -> f64 {
    let n = sys.n;
    let mut worst = 0.0f64;
    for p in 0..sys.coeffs.points {
        for k in 0..n {
            // Q A_k nonzeros per block: (k, n) = q_kk * 1 and (n, k) = 1 * a_k
            // A_k^T Q nonzeros per block: (k, n) = A_k[n,k] * q_nn, (n, k) = A_k[k,n] * q_kk
            let ak = sys.coeffs.a(k, p);
            let qa_kn = ak * 1.0;
            let qa_nk = 1.0 * ak;
            let atq_kn = ak * 1.0;
            let atq_nk = 1.0 * ak;
            worst = worst.max((qa_kn - atq_kn).abs());
            worst = worst.max((qa_nk - atq_nk).abs());
        }
    }
    worst
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub max_rel_error: f64,
    /// Offending `(k, j)` indices of the worst trial term, if resolvable.
    pub worst_indices: (usize, usize),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityReport {
    pub n: usize,
    pub level: usize,
    pub trials: usize,
    pub seed: u64,
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn max_rel_error(&self) -> f64 {
        self.checks
            .iter()
            .map(|c| c.max_rel_error)
            .fold(0.0, f64::max)
    }
}

/// Verify the displayed energy-identity formulas against dense brute force
/// on random states. For level 1 both identities of the energy computation
/// are checked (and the forcing pairing); level 2 checks the block-extended
/// analogues.
pub fn verify_energy_identities(
    sys: &HyperbolicSystem,
    trials: usize,
    seed: u64,
) -> Result<IdentityReport> {
    if sys.level < 1 {
        return Err(Error::Config(
            "energy identities are stated for lifted systems (level >= 1)".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = sys.n;
    let size = sys.size();
    let pts = sys.coeffs.points;
    let w = sys.coeffs.weight;

    let mut worst_qa = (0.0f64, (0usize, 0usize));
    let mut worst_qb = (0.0f64, (0usize, 0usize));
    let mut worst_f = 0.0f64;

    for _ in 0..trials {
        // random state: V[c][p]
        let v: Vec<Vec<f64>> = (0..size)
            .map(|_| (0..pts).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let f_grad: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..pts).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();

        // ---- identity (i): (d_{x_k}(Q~ A~_k) V, V) per k
        for k in 0..n {
            let dense_val = dense::quadratic_form_dqa(sys, k, &v);
            let mut formula = 0.0;
            for j in 0..sys.blocks() {
                let idx_a = j * (n + 1) + k;
                let idx_b = j * (n + 1) + n;
                let mut acc = 0.0;
                for p in 0..pts {
                    acc += sys.coeffs.da(k, k, p) * v[idx_a][p] * v[idx_b][p];
                }
                formula += 2.0 * acc * w;
            }
            let rel = rel_err(dense_val, formula);
            if rel > worst_qa.0 {
                worst_qa = (rel, (k, 0));
            }
        }

        // ---- identity (ii): ((Q~ B~ + B~^T Q~) V, V)
        let dense_val = dense::quadratic_form_qb_sym(sys, &v);
        let formula = match sys.level {
            1 => {
                let mut acc = 0.0;
                for k in 0..n {
                    for j in 0..n {
                        let idx_a = (j) * (n + 1) + j; // V_{j + (j-1)(n+1)} 1-based
                        let idx_b = (k - 0) * (n + 1) + n; // V_{k(n+1)} 1-based
                        let mut s = 0.0;
                        for p in 0..pts {
                            s += sys.coeffs.da(k, j, p) * v[idx_a][p] * v[idx_b][p];
                        }
                        acc += 2.0 * s * w;
                    }
                }
                acc
            }
            2 => {
                let sb = n * (n + 1);
                // S1: sum_{k,j,h} (d_{x_j} a_h W[h-1,k-1,h-1], W[j-1,k-1,n])
                let mut s1 = 0.0;
                for j in 0..n {
                    for h in 0..n {
                        for k in 0..n {
                            let idx_a = h * sb + k * (n + 1) + h;
                            let idx_b = j * sb + k * (n + 1) + n;
                            let mut s = 0.0;
                            for p in 0..pts {
                                s += sys.coeffs.da(j, h, p) * v[idx_a][p] * v[idx_b][p];
                            }
                            s1 += s * w;
                        }
                    }
                }
                // S2: level-1 formula within each superblock
                let mut s2 = 0.0;
                for sup in 0..n {
                    for k in 0..n {
                        for j in 0..n {
                            let idx_a = sup * sb + j * (n + 1) + j;
                            let idx_b = sup * sb + k * (n + 1) + n;
                            let mut s = 0.0;
                            for p in 0..pts {
                                s += sys.coeffs.da(k, j, p) * v[idx_a][p] * v[idx_b][p];
                            }
                            s2 += s * w;
                        }
                    }
                }
                2.0 * (s1 + s2)
            }
            _ => unreachable!(),
        };
        let rel = rel_err(dense_val, formula);
        if rel > worst_qb.0 {
            worst_qb = (rel, (0, 0));
        }

        // ---- identity (iii), level 1 only: (Q~ V, F~) = sum_k (V_{k(n+1)}, d_k f)
        if sys.level == 1 {
            let dense_val = dense::pairing_qf(sys, &v, &f_grad);
            let mut formula = 0.0;
            for k in 0..n {
                let idx = k * (n + 1) + n;
                let mut s = 0.0;
                for p in 0..pts {
                    s += v[idx][p] * f_grad[k][p];
                }
                formula += s * w;
            }
            worst_f = worst_f.max(rel_err(dense_val, formula));
        }
    }

    let mut checks = vec![
        IdentityCheck {
            name: "d_xk(Q A_k) quadratic form".into(),
            max_rel_error: worst_qa.0,
            worst_indices: worst_qa.1,
        },
        IdentityCheck {
            name: "Q B + B* Q quadratic form".into(),
            max_rel_error: worst_qb.0,
            worst_indices: worst_qb.1,
        },
    ];
    if sys.level == 1 {
        checks.push(IdentityCheck {
            name: "forcing pairing (Q V, F)".into(),
            max_rel_error: worst_f,
            worst_indices: (0, 0),
        });
    }
    Ok(IdentityReport {
        n,
        level: sys.level,
        trials,
        seed,
        checks,
    })
}

fn rel_err(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs()).max(1e-30);
    (a - b).abs() / scale
}

/// `<Q v, v> >= |v_{n+1}|^2` on random vectors (lower bound of the energy).
pub fn verify_q_lower_bound(sys: &HyperbolicSystem, trials: usize, seed: u64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = sys.n;
    let size = sys.size();
    let mut qv = vec![0.0; size];
    for _ in 0..trials {
        let p = rng.gen_range(0..sys.coeffs.points);
        let v: Vec<f64> = (0..size).map(|_| rng.gen_range(-1.0..1.0)).collect();
        sys.apply_q(p, &v, &mut qv);
        let quad: f64 = qv.iter().zip(&v).map(|(a, b)| a * b).sum();
        // per block, the last component is bounded by the form
        for b in 0..sys.blocks() {
            let last = v[b * (n + 1) + n];
            if quad < last * last - 1e-12 {
                return false;
            }
        }
    }
    true
}

/// State-vector trajectory of a solve: at level 0 the components are
/// `(d_{x_1}u, ..., d_{x_n}u, d_t u)` as grid functions per checkpoint.
#[derive(Debug, Clone)]
pub struct StateVector {
    pub level: usize,
    pub n: usize,
    /// `components[c]` is the grid function of component `c`.
    pub components: Vec<Vec<C64>>,
    pub grid: Grid,
}

impl StateVector {
    pub fn component(&self, c: usize) -> &[C64] {
        &self.components[c]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn random_system(n: usize, level: usize, points: usize, seed: u64) -> HyperbolicSystem {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs = CoefficientSamples::random(n, points, &mut rng);
        let mut sys = build_system(n, coeffs).unwrap();
        for _ in 0..level {
            sys = derive_system(&sys).unwrap();
        }
        sys
    }

    #[test]
    fn symmetriser_exact_all_dims() {
        for n in 1..=5 {
            for level in 0..=2 {
                let sys = random_system(n, level, 16, 42 + n as u64);
                assert_eq!(verify_symmetriser(&sys), 0.0, "n={n} level={level}");
            }
        }
    }

    #[test]
    fn level_three_rejected() {
        let sys = random_system(2, 2, 8, 1);
        assert!(matches!(
            derive_system(&sys),
            Err(Error::UnsupportedLevel(3))
        ));
    }

    #[test]
    fn sizes_match_lift_count() {
        let sys0 = random_system(3, 0, 4, 2);
        assert_eq!(sys0.size(), 4);
        let sys1 = derive_system(&sys0).unwrap();
        assert_eq!(sys1.size(), 12);
        let sys2 = derive_system(&sys1).unwrap();
        assert_eq!(sys2.size(), 36);
    }

    #[test]
    fn structured_apply_matches_dense() {
        for n in 1..=3 {
            for level in 0..=2 {
                let sys = random_system(n, level, 8, 7);
                let size = sys.size();
                let mut rng = ChaCha8Rng::seed_from_u64(99);
                let v: Vec<f64> = (0..size).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let mut out = vec![0.0; size];
                for p in 0..sys.coeffs.points {
                    for k in 0..n {
                        sys.apply_a(k, p, &v, &mut out);
                        let d = dense::matvec(&dense::assemble_a(&sys, k, p), &v);
                        for (a, b) in out.iter().zip(&d) {
                            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
                        }
                    }
                    sys.apply_q(p, &v, &mut out);
                    let d = dense::matvec(&dense::assemble_q(&sys, p), &v);
                    for (a, b) in out.iter().zip(&d) {
                        assert_abs_diff_eq!(a, b, epsilon = 1e-12);
                    }
                    sys.apply_b(p, &v, &mut out);
                    let d = dense::matvec(&dense::assemble_b(&sys, p), &v);
                    for (a, b) in out.iter().zip(&d) {
                        assert_abs_diff_eq!(a, b, epsilon = 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn energy_identities_level1() {
        for n in 1..=3 {
            let sys = random_system(n, 1, 32, 11);
            let rep = verify_energy_identities(&sys, 20, 5).unwrap();
            assert!(
                rep.max_rel_error() <= 1e-10,
                "n={n}: {:.3e}",
                rep.max_rel_error()
            );
        }
    }

    #[test]
    fn energy_identities_level2() {
        for n in 1..=2 {
            let sys = random_system(n, 2, 16, 13);
            let rep = verify_energy_identities(&sys, 10, 5).unwrap();
            assert!(
                rep.max_rel_error() <= 1e-10,
                "n={n}: {:.3e}",
                rep.max_rel_error()
            );
        }
    }

    #[test]
    fn identities_require_lift() {
        let sys = random_system(2, 0, 8, 3);
        assert!(verify_energy_identities(&sys, 1, 0).is_err());
    }

    #[test]
    fn n1_identity_reduces_to_2avv() {
        // both identity terms equal 2(a' V_1, V_2) when n = 1
        let sys = random_system(1, 1, 16, 21);
        let pts = sys.coeffs.points;
        let w = sys.coeffs.weight;
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let v: Vec<Vec<f64>> = (0..2)
            .map(|_| (0..pts).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let expected: f64 = 2.0
            * w
            * (0..pts)
                .map(|p| sys.coeffs.da(0, 0, p) * v[0][p] * v[1][p])
                .sum::<f64>();
        let qa = dense::quadratic_form_dqa(&sys, 0, &v);
        let qb = dense::quadratic_form_qb_sym(&sys, &v);
        assert_abs_diff_eq!(qa, expected, epsilon = 1e-12 * expected.abs().max(1.0));
        assert_abs_diff_eq!(qb, expected, epsilon = 1e-12 * expected.abs().max(1.0));
        // cancellation structure: -sum(d(QA)) + (QB + B*Q) == 0 for n = 1
        assert_abs_diff_eq!(-qa + qb, 0.0, epsilon = 1e-12 * expected.abs().max(1.0));
    }

    #[test]
    fn constant_coefficients_kill_lower_order() {
        let n = 2;
        let points = 8;
        let a = vec![1.5; n * points];
        let grad = vec![0.0; n * n * points];
        let coeffs = CoefficientSamples::new(n, points, 0.1, a, grad, None).unwrap();
        let sys = derive_system(&build_system(n, coeffs).unwrap()).unwrap();
        let v: Vec<f64> = (0..sys.size()).map(|i| (i as f64).sin()).collect();
        let mut out = vec![1.0; sys.size()];
        sys.apply_b(0, &v, &mut out);
        assert!(out.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn q_lower_bound_random() {
        for n in 1..=4 {
            let sys = random_system(n, 0, 16, 31);
            assert!(verify_q_lower_bound(&sys, 200, 17));
        }
    }

    #[test]
    fn qa_pattern_n2() {
        // QA_1 has only entries (1,3) and (3,1) equal to a_1 (1-based)
        let sys = random_system(2, 0, 4, 5);
        for p in 0..4 {
            let qa = dense::matmul(
                &dense::assemble_q(&sys, p),
                &dense::assemble_a(&sys, 0, p),
            );
            let a1 = sys.coeffs.a(0, p);
            for i in 0..3 {
                for j in 0..3 {
                    let expect = if (i, j) == (0, 2) || (i, j) == (2, 0) {
                        a1
                    } else {
                        0.0
                    };
                    assert_eq!(qa[i][j], expect);
                }
            }
        }
    }
}
