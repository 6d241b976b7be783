//! Dirichlet eigenpairs of the discrete Laplacian, Rayleigh quotients and
//! the matrix-level Barta bound.
//!
//! Dirichlet conditions are imposed by deleting the constrained rows and
//! columns, so every quantity lives on the free vertices.

mod solver;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mesh::DiscreteLaplacian;

pub use solver::SolverOptions;

#[derive(Debug, Clone, Serialize)]
pub struct SpectralResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// One vector per eigenvalue, indexed like `free`, normalized to `uᵀ M u = 1`.
    pub eigenvectors: Vec<Vec<f64>>,
    /// `‖S u − λ M u‖ / ‖M u‖` per pair.
    pub residuals: Vec<f64>,
    /// Laplacian vertex index of every free position.
    pub free: Vec<usize>,
    pub iterations: usize,
    /// First eigenvector keeps one sign on every connected component of the
    /// free-vertex graph.
    pub ground_state_signed: bool,
}

impl SpectralResult {
    pub fn fundamental_tone(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Eigenvector `j` extended by zero to all vertices.
    pub fn full_vector(&self, j: usize, vertex_count: usize) -> Vec<f64> {
        let mut out = vec![0.0; vertex_count];
        for (&v, &x) in self.free.iter().zip(&self.eigenvectors[j]) {
            out[v] = x;
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BartaCertificate {
    /// Test function on the free vertices.
    pub test_function: Vec<f64>,
    /// `min_i (S_free f)_i / (M f)_i`
    pub bound: f64,
    /// Free vertex (Laplacian index) where the minimum is attained.
    pub argmin: usize,
    /// No positive off-diagonal stiffness among free rows. When true,
    /// `bound ≤ λ₁` holds exactly; otherwise the certificate is advisory.
    pub m_matrix_ok: bool,
}

/// Complement of `dirichlet` in `0..n`, ascending.
pub fn free_vertices(n: usize, dirichlet: &[usize]) -> Vec<usize> {
    let mut is_dir = vec![false; n];
    for &d in dirichlet {
        if d < n {
            is_dir[d] = true;
        }
    }
    (0..n).filter(|&v| !is_dir[v]).collect()
}

/// Connected components of the free-vertex stiffness graph. Returns the
/// component label of every free position and, per component, whether it
/// couples to some Dirichlet vertex.
fn free_components(lap: &DiscreteLaplacian, free: &[usize]) -> (Vec<usize>, Vec<bool>) {
    let n = lap.vertex_count;
    let mut pos = vec![usize::MAX; n];
    for (k, &v) in free.iter().enumerate() {
        pos[v] = k;
    }
    let mut label = vec![usize::MAX; free.len()];
    let mut anchored = Vec::new();
    let mut stack = Vec::new();
    for start in 0..free.len() {
        if label[start] != usize::MAX {
            continue;
        }
        let c = anchored.len();
        anchored.push(false);
        label[start] = c;
        stack.push(start);
        while let Some(k) = stack.pop() {
            let v = free[k];
            if let Some(row) = lap.stiffness.outer_view(v) {
                for (u, &s) in row.iter() {
                    if u == v || s == 0.0 {
                        continue;
                    }
                    match pos[u] {
                        usize::MAX => anchored[c] = true,
                        ku if label[ku] == usize::MAX => {
                            label[ku] = c;
                            stack.push(ku);
                        }
                        _ => {}
                    }
                }
            }
        }
    }
    (label, anchored)
}

pub fn dirichlet_tone(lap: &DiscreteLaplacian, dirichlet: &[usize], k: usize) -> Result<SpectralResult> {
    dirichlet_tone_with(lap, dirichlet, k, &SolverOptions::default())
}

/// The `k` smallest eigenpairs of `S u = λ M u` on the free vertices.
pub fn dirichlet_tone_with(
    lap: &DiscreteLaplacian,
    dirichlet: &[usize],
    k: usize,
    opts: &SolverOptions,
) -> Result<SpectralResult> {
    if k == 0 {
        return Err(Error::domain("k < 1: at least one eigenpair must be requested"));
    }
    let free = free_vertices(lap.vertex_count, dirichlet);
    if free.is_empty() {
        return Err(Error::domain("no free vertex: the Dirichlet set covers the whole mesh"));
    }
    let (label, anchored) = free_components(lap, &free);
    if let Some(c) = anchored.iter().position(|a| !a) {
        let v = free[label.iter().position(|&l| l == c).unwrap_or(0)];
        return Err(Error::Factorization(format!(
            "restricted stiffness is singular: the free component containing vertex {v} has no Dirichlet vertex"
        )));
    }
    let (s, m) = lap.restrict(&free);
    let pairs = solver::smallest_eigenpairs(&s, &m, k, opts)?;

    let u0 = &pairs.vectors[0];
    let scale = u0.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    let mut sign = vec![0i8; anchored.len()];
    let mut ground_state_signed = true;
    for (i, &x) in u0.iter().enumerate() {
        if x.abs() <= 1e-10 * scale {
            continue;
        }
        let sg = if x > 0.0 { 1 } else { -1 };
        let slot = &mut sign[label[i]];
        if *slot == 0 {
            *slot = sg;
        } else if *slot != sg {
            ground_state_signed = false;
        }
    }

    Ok(SpectralResult {
        eigenvalues: pairs.values,
        eigenvectors: pairs.vectors,
        residuals: pairs.residuals,
        free,
        iterations: pairs.iterations,
        ground_state_signed,
    })
}

/// `fᵀ S f / fᵀ M f` with `f` restricted to the free vertices (values on the
/// Dirichlet set are treated as zero). `f` is indexed by Laplacian vertex.
pub fn rayleigh(lap: &DiscreteLaplacian, f: &[f64], dirichlet: &[usize]) -> Result<f64> {
    if f.len() != lap.vertex_count {
        return Err(Error::domain(format!(
            "test function has {} values for {} vertices",
            f.len(),
            lap.vertex_count
        )));
    }
    let free = free_vertices(lap.vertex_count, dirichlet);
    let ff: Vec<f64> = free.iter().map(|&v| f[v]).collect();
    let sf = lap.apply_restricted(&free, &ff);
    let num: f64 = ff.iter().zip(&sf).map(|(a, b)| a * b).sum();
    let den: f64 = free.iter().zip(&ff).map(|(&v, x)| lap.mass[v] * x * x).sum();
    if !(den > 0.0) {
        return Err(Error::ZeroDenominator);
    }
    Ok(num / den)
}

/// Discrete Barta bound `min_i (S_free f)_i / (M f)_i` for a test function
/// positive on every free vertex. `f` is indexed by Laplacian vertex.
pub fn barta_bound(lap: &DiscreteLaplacian, f: &[f64], dirichlet: &[usize]) -> Result<BartaCertificate> {
    if f.len() != lap.vertex_count {
        return Err(Error::domain(format!(
            "test function has {} values for {} vertices",
            f.len(),
            lap.vertex_count
        )));
    }
    let free = free_vertices(lap.vertex_count, dirichlet);
    if free.is_empty() {
        return Err(Error::domain("no free vertex: the Dirichlet set covers the whole mesh"));
    }
    let ff: Vec<f64> = free.iter().map(|&v| f[v]).collect();
    if let Some(k) = ff.iter().position(|&x| !(x > 0.0)) {
        return Err(Error::NonPositive {
            vertex: free[k],
            value: ff[k],
        });
    }
    let sf = lap.apply_restricted(&free, &ff);
    let (argmin, bound) = free
        .iter()
        .enumerate()
        .map(|(k, &v)| (v, sf[k] / (lap.mass[v] * ff[k])))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("free set is nonempty");
    Ok(BartaCertificate {
        test_function: ff,
        bound,
        argmin,
        m_matrix_ok: lap.m_matrix_on(&free),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{assemble_laplacian, Point, TriMesh};

    /// Fan of six triangles around a center vertex.
    fn hexagon() -> TriMesh {
        let mut v = vec![Point::zeros()];
        for j in 0..6 {
            let a = j as f64 * std::f64::consts::PI / 3.0;
            v.push(Point::new(a.cos(), a.sin(), 0.0));
        }
        let faces = (0..6).map(|j| [0, 1 + j, 1 + (j + 1) % 6]).collect();
        TriMesh::new(v, faces).unwrap()
    }

    #[test]
    fn single_free_vertex() {
        let mesh = hexagon();
        let lap = assemble_laplacian(&mesh);
        let dir = mesh.boundary_vertices();
        let res = dirichlet_tone(&lap, &dir, 1).unwrap();
        let expected = lap.stiffness.get(0, 0).unwrap() / lap.mass[0];
        assert!((res.eigenvalues[0] - expected).abs() < 1e-12);
        assert_eq!(res.free, vec![0]);
        assert!(res.ground_state_signed);
    }

    #[test]
    fn rayleigh_is_scale_invariant_and_needs_support() {
        let mesh = hexagon();
        let lap = assemble_laplacian(&mesh);
        let dir = mesh.boundary_vertices();
        let mut f = vec![0.0; 7];
        f[0] = 1.0;
        let a = rayleigh(&lap, &f, &dir).unwrap();
        f[0] = -3.5;
        assert!((rayleigh(&lap, &f, &dir).unwrap() - a).abs() < 1e-12 * a);
        f[0] = 0.0;
        assert!(matches!(rayleigh(&lap, &f, &dir), Err(Error::ZeroDenominator)));
    }

    #[test]
    fn barta_rejects_nonpositive() {
        let mesh = hexagon();
        let lap = assemble_laplacian(&mesh);
        let mut f = vec![1.0; 7];
        f[0] = 0.0;
        assert!(matches!(
            barta_bound(&lap, &f, &mesh.boundary_vertices()),
            Err(Error::NonPositive { vertex: 0, .. })
        ));
    }

    #[test]
    fn unanchored_component_is_singular() {
        let mesh = hexagon();
        let lap = assemble_laplacian(&mesh);
        let err = dirichlet_tone(&lap, &[], 1).unwrap_err();
        assert!(matches!(err, Error::Factorization(_)), "{err}");
        assert!(dirichlet_tone(&lap, &[0, 1, 2, 3, 4, 5, 6], 1).is_err());
        assert!(dirichlet_tone(&lap, &[1], 0).is_err());
    }
}
