//! Restarted block Krylov iteration with shift-invert for the smallest
//! eigenpairs of a symmetric positive-definite pencil `(S, M)` with diagonal
//! `M`.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sprs::{CsMat, FillInReduction, SymmetryCheck};
use sprs_ldl::{Ldl, LdlNumeric};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Convergence: `‖S x − θ M x‖ / ‖M x‖ ≤ tol · max(θ, 1)`, or below the
    /// roundoff floor `ε √n · max_i Σ_j |S_ij| / M_ii` when that is larger.
    pub tol: f64,
    pub max_iter: usize,
    /// Extra block columns beyond `max(k, 4)`.
    pub guard: usize,
    /// Powers of `S⁻¹M` applied to the block per outer iteration.
    pub krylov_depth: usize,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-11,
            max_iter: 500,
            guard: 4,
            krylov_depth: 6,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Eigenpairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

pub(crate) struct Factorized {
    ldl: LdlNumeric<f64, usize>,
}

impl Factorized {
    pub fn new(s: &CsMat<f64>) -> Result<Self> {
        let ldl = Ldl::new()
            .fill_in_reduction(FillInReduction::ReverseCuthillMcKee)
            .check_symmetry(SymmetryCheck::DontCheckSymmetry)
            .numeric(s.view())
            .map_err(|e| Error::Factorization(format!("LDLᵀ of restricted stiffness: {e}")))?;
        let d = ldl.d();
        let dmax = d.iter().fold(0.0_f64, |a, &x| a.max(x.abs()));
        if let Some(i) = d.iter().position(|&x| !(x > 1e-14 * dmax)) {
            return Err(Error::Factorization(format!(
                "restricted stiffness is not positive definite (pivot {i} = {:e})",
                d[i]
            )));
        }
        Ok(Self { ldl })
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        self.ldl.solve(rhs.to_vec())
    }
}

pub(crate) fn spmv(s: &CsMat<f64>, x: &[f64]) -> Vec<f64> {
    s.outer_iterator()
        .map(|row| row.iter().map(|(c, &v)| v * x[c]).sum())
        .collect()
}

fn m_dot(m: &[f64], x: &[f64], y: &[f64]) -> f64 {
    m.iter().zip(x).zip(y).map(|((m, x), y)| m * x * y).sum()
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (y, x) in y.iter_mut().zip(x) {
        *y += alpha * x;
    }
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

/// M-orthonormalizes `x` against `locked` and `basis` (both M-orthonormal),
/// two passes. Returns `None` when `x` lies numerically inside their span.
fn orthonormalize_against(m: &[f64], locked: &[Vec<f64>], basis: &[Vec<f64>], mut x: Vec<f64>) -> Option<Vec<f64>> {
    let norm0 = m_dot(m, &x, &x).sqrt();
    for _ in 0..2 {
        for b in locked.iter().chain(basis) {
            let c = m_dot(m, b, &x);
            axpy(-c, b, &mut x);
        }
    }
    let norm = m_dot(m, &x, &x).sqrt();
    if !(norm > 1e-13 * norm0) {
        return None;
    }
    x.iter_mut().for_each(|v| *v /= norm);
    Some(x)
}

fn residual(s: &CsMat<f64>, m: &[f64], theta: f64, x: &[f64]) -> f64 {
    let sx = spmv(s, x);
    let mut r2 = 0.0;
    let mut mx2 = 0.0;
    for i in 0..x.len() {
        let mx = m[i] * x[i];
        r2 += (sx[i] - theta * mx).powi(2);
        mx2 += mx * mx;
    }
    (r2 / mx2).sqrt()
}

/// The `k` smallest eigenpairs of `S x = λ M x`, ascending, with eigenvectors
/// normalized to `xᵀ M x = 1` and the largest-magnitude entry positive.
pub(crate) fn smallest_eigenpairs(s: &CsMat<f64>, m: &[f64], k: usize, opts: &SolverOptions) -> Result<Eigenpairs> {
    let n = m.len();
    assert!(k >= 1 && n >= 1);
    let k = k.min(n);
    if n <= DENSE_LIMIT {
        return dense_eigenpairs(s, m, k);
    }
    let width = (k.max(4) + opts.guard).min(n);
    let fact = Factorized::new(s)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let mut locked: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut locked_values: Vec<f64> = Vec::with_capacity(k);
    let mut locked_res: Vec<f64> = Vec::with_capacity(k);
    let mut block: Vec<Vec<f64>> = (0..width).map(|_| random_vector(&mut rng, n)).collect();
    let mut last_residual = f64::INFINITY;
    let gershgorin = s
        .outer_iterator()
        .zip(m)
        .map(|(row, &mi)| row.iter().map(|(_, v)| v.abs()).sum::<f64>() / mi)
        .fold(0.0, f64::max);
    let floor = f64::EPSILON * gershgorin * (n as f64).sqrt();

    for iter in 1..=opts.max_iter {
        let room = n - locked.len();
        // Basis [X, AX, A²X, …] with A = S⁻¹M, each block orthonormalized
        // against everything before it.
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(width * (opts.krylov_depth + 1));
        let mut current: Vec<Vec<f64>> = Vec::with_capacity(width);
        for x in block.drain(..) {
            if basis.len() >= room {
                break;
            }
            if let Some(q) = orthonormalize_against(m, &locked, &basis, x) {
                basis.push(q.clone());
                current.push(q);
            }
        }
        let mut attempts = 0;
        while basis.len() < width.min(room) && attempts < 10 * width {
            attempts += 1;
            if let Some(q) = orthonormalize_against(m, &locked, &basis, random_vector(&mut rng, n)) {
                basis.push(q.clone());
                current.push(q);
            }
        }
        for _ in 0..opts.krylov_depth {
            if basis.len() >= room || current.is_empty() {
                break;
            }
            let images: Vec<Vec<f64>> = current
                .iter()
                .map(|x| {
                    let mx: Vec<f64> = x.iter().zip(m).map(|(x, m)| x * m).collect();
                    fact.solve(&mx)
                })
                .collect();
            current.clear();
            for y in images {
                if basis.len() >= room {
                    break;
                }
                if let Some(q) = orthonormalize_against(m, &locked, &basis, y) {
                    basis.push(q.clone());
                    current.push(q);
                }
            }
        }
        let p = basis.len();
        if p == 0 {
            break;
        }

        // Rayleigh–Ritz on the M-orthonormal basis.
        let sq: Vec<Vec<f64>> = basis.iter().map(|q| spmv(s, q)).collect();
        let a = DMatrix::from_fn(p, p, |i, j| {
            let v: f64 = basis[i].iter().zip(&sq[j]).map(|(x, y)| x * y).sum();
            let w: f64 = basis[j].iter().zip(&sq[i]).map(|(x, y)| x * y).sum();
            0.5 * (v + w)
        });
        let eig = SymmetricEigen::new(a);
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let ritz: Vec<(f64, Vec<f64>)> = order
            .iter()
            .take(width)
            .map(|&c| {
                let mut x = vec![0.0; n];
                for (i, q) in basis.iter().enumerate() {
                    axpy(eig.eigenvectors[(i, c)], q, &mut x);
                }
                (eig.eigenvalues[c], x)
            })
            .collect();

        // Lock the leading converged Ritz pairs; keep the rest iterating.
        let mut newly_locked = 0;
        for (_, x) in &ritz {
            if locked.len() >= k {
                break;
            }
            // The Rayleigh quotient of x itself, immune to small losses of
            // M-orthogonality in the basis.
            let theta = dot(x, &spmv(s, x)) / m_dot(m, x, x);
            let res = residual(s, m, theta, x);
            last_residual = res;
            if res <= (opts.tol * theta.abs().max(1.0)).max(floor) {
                locked.push(x.clone());
                locked_values.push(theta);
                locked_res.push(res);
                newly_locked += 1;
            } else {
                break;
            }
        }
        if locked.len() >= k {
            return Ok(finish(locked_values, locked, locked_res, iter));
        }
        block = ritz.into_iter().skip(newly_locked).map(|(_, x)| x).collect();
        while block.len() < width {
            block.push(random_vector(&mut rng, n));
        }
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iter,
        residual: last_residual,
    })
}

/// Problems this small go straight to a dense symmetric eigensolve.
const DENSE_LIMIT: usize = 16;

fn dense_eigenpairs(s: &CsMat<f64>, m: &[f64], k: usize) -> Result<Eigenpairs> {
    let n = m.len();
    let scale: Vec<f64> = m.iter().map(|&x| 1.0 / x.sqrt()).collect();
    let mut a = DMatrix::<f64>::zeros(n, n);
    for (i, row) in s.outer_iterator().enumerate() {
        for (j, &v) in row.iter() {
            a[(i, j)] += 0.5 * v * scale[i] * scale[j];
            a[(j, i)] += 0.5 * v * scale[i] * scale[j];
        }
    }
    let eig = SymmetricEigen::new(a);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let top = eig.eigenvalues.iter().fold(0.0_f64, |acc, &x| acc.max(x.abs()));
    let low = eig.eigenvalues[order[0]];
    if !(low > 1e-14 * top) {
        return Err(Error::Factorization(format!(
            "restricted stiffness is not positive definite (smallest eigenvalue {low:e})"
        )));
    }
    let mut values = Vec::with_capacity(k);
    let mut vectors = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    for &c in order.iter().take(k) {
        let theta = eig.eigenvalues[c];
        let x: Vec<f64> = (0..n).map(|i| eig.eigenvectors[(i, c)] * scale[i]).collect();
        residuals.push(residual(s, m, theta, &x));
        values.push(theta);
        vectors.push(x);
    }
    Ok(finish(values, vectors, residuals, 1))
}

fn finish(values: Vec<f64>, mut vectors: Vec<Vec<f64>>, residuals: Vec<f64>, iterations: usize) -> Eigenpairs {
    for v in &mut vectors {
        let pivot = v
            .iter()
            .copied()
            .max_by(|a, b| a.abs().total_cmp(&b.abs()))
            .unwrap_or(0.0);
        if pivot < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
    // Pairs lock in convergence order, which need not be ascending.
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    Eigenpairs {
        values: order.iter().map(|&i| values[i]).collect(),
        vectors: order.iter().map(|&i| std::mem::take(&mut vectors[i])).collect(),
        residuals: order.iter().map(|&i| residuals[i]).collect(),
        iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use sprs::TriMat;

    /// Path-graph Laplacian with Dirichlet ends: eigenvalues 2 − 2cos(jπ/(n+1)).
    fn path(n: usize) -> CsMat<f64> {
        let mut t = TriMat::new((n, n));
        for i in 0..n {
            t.add_triplet(i, i, 2.0);
            if i + 1 < n {
                t.add_triplet(i, i + 1, -1.0);
                t.add_triplet(i + 1, i, -1.0);
            }
        }
        t.to_csr()
    }

    #[test]
    fn path_graph_spectrum() {
        let n = 200;
        let s = path(n);
        let m = vec![1.0; n];
        let out = smallest_eigenpairs(&s, &m, 3, &SolverOptions::default()).unwrap();
        for (j, &lam) in out.values.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((j + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((lam - exact).abs() < 1e-10 * exact.max(1.0), "{j}: {lam} vs {exact}");
        }
        assert!(out.residuals.iter().all(|&r| r < 1e-8));
        assert!(out.vectors[0].iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn weighted_mass_scales_spectrum() {
        let n = 50;
        let s = path(n);
        let m = vec![0.25; n];
        let a = smallest_eigenpairs(&s, &vec![1.0; n], 1, &SolverOptions::default()).unwrap();
        let b = smallest_eigenpairs(&s, &m, 1, &SolverOptions::default()).unwrap();
        assert!((b.values[0] - 4.0 * a.values[0]).abs() < 1e-10);
    }

    #[test]
    fn tiny_problem_with_k_equal_n() {
        let s = path(3);
        let out = smallest_eigenpairs(&s, &[1.0; 3], 3, &SolverOptions::default()).unwrap();
        assert_eq!(out.values.len(), 3);
        assert!(out.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn singular_matrix_is_reported() {
        let mut t = TriMat::new((2, 2));
        t.add_triplet(0, 0, 1.0);
        t.add_triplet(0, 1, -1.0);
        t.add_triplet(1, 0, -1.0);
        t.add_triplet(1, 1, 1.0);
        let err = smallest_eigenpairs(&t.to_csr(), &[1.0, 1.0], 1, &SolverOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Factorization(_)), "{err}");
    }

    #[test]
    fn iteration_cap_is_reported() {
        let opts = SolverOptions {
            max_iter: 1,
            krylov_depth: 1,
            ..Default::default()
        };
        let err = smallest_eigenpairs(&path(3000), &vec![1.0; 3000], 1, &opts).unwrap_err();
        assert!(matches!(err, Error::NoConvergence { iterations: 1, .. }));
    }
}
