use std::collections::BTreeMap;

use sprs::{CsMat, TriMat};

use super::{edge_key, TriMesh};

/// Off-diagonal stiffness entries above this value count as positive
/// (an obtuse-angle violation of the M-matrix sign pattern).
pub const OBTUSE_TOL: f64 = 1e-12;

/// Cotangent stiffness `S` and lumped (barycentric) mass `M`, so that
/// `M⁻¹ S` approximates `−Δ` with a nonnegative spectrum.
#[derive(Debug, Clone)]
pub struct DiscreteLaplacian {
    pub stiffness: CsMat<f64>,
    pub mass: Vec<f64>,
    pub vertex_count: usize,
    /// Edges whose off-diagonal stiffness is positive (`cot α + cot β < 0`).
    pub obtuse_edges: usize,
}

impl DiscreteLaplacian {
    pub fn total_mass(&self) -> f64 {
        self.mass.iter().sum()
    }

    /// `S x`
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.vertex_count);
        let mut y = vec![0.0; self.vertex_count];
        for (row, vec) in self.stiffness.outer_iterator().enumerate() {
            y[row] = vec.iter().map(|(col, &v)| v * x[col]).sum();
        }
        y
    }

    /// `S x` with `x` set to zero outside `free`, evaluated on the rows of `free`.
    pub fn apply_restricted(&self, free: &[usize], x_free: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; self.vertex_count];
        for (&v, &x) in free.iter().zip(x_free) {
            full[v] = x;
        }
        free.iter()
            .map(|&v| {
                self.stiffness
                    .outer_view(v)
                    .map(|row| row.iter().map(|(c, &s)| s * full[c]).sum())
                    .unwrap_or(0.0)
            })
            .collect()
    }

    /// Stiffness restricted to rows and columns in `free` (Dirichlet
    /// conditions by deletion), with the matching mass diagonal.
    pub fn restrict(&self, free: &[usize]) -> (CsMat<f64>, Vec<f64>) {
        let mut index = vec![usize::MAX; self.vertex_count];
        for (k, &v) in free.iter().enumerate() {
            index[v] = k;
        }
        let nf = free.len();
        let mut tri = TriMat::new((nf, nf));
        for (k, &v) in free.iter().enumerate() {
            if let Some(row) = self.stiffness.outer_view(v) {
                for (c, &s) in row.iter() {
                    let kc = index[c];
                    if kc != usize::MAX {
                        tri.add_triplet(k, kc, s);
                    }
                }
            }
        }
        let mass = free.iter().map(|&v| self.mass[v]).collect();
        (tri.to_csr(), mass)
    }

    /// True when no positive off-diagonal entry couples two vertices of `free`.
    pub fn m_matrix_on(&self, free: &[usize]) -> bool {
        let mut is_free = vec![false; self.vertex_count];
        for &v in free {
            is_free[v] = true;
        }
        free.iter().all(|&v| {
            self.stiffness
                .outer_view(v)
                .map(|row| row.iter().all(|(c, &s)| c == v || !is_free[c] || s <= OBTUSE_TOL))
                .unwrap_or(true)
        })
    }
}

/// Assembles the cotangent Laplacian:
/// `S_ij = −(cot α_ij + cot β_ij)/2` on edges, diagonal equal to minus the
/// off-diagonal row sum, `M_ii = (1/3)·Σ area of incident faces`.
pub fn assemble_laplacian(mesh: &TriMesh) -> DiscreteLaplacian {
    let n = mesh.vertex_count();
    let x = mesh.vertices();
    let mut weight: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut mass = vec![0.0; n];

    for &[i, j, k] in mesh.faces() {
        let corners = [(i, j, k), (j, k, i), (k, i, j)];
        let double_area = (x[j] - x[i]).cross(&(x[k] - x[i])).norm();
        for &(o, p, q) in &corners {
            // cotangent of the angle at `o`, opposite edge (p, q)
            let u = x[p] - x[o];
            let v = x[q] - x[o];
            let cot = u.dot(&v) / double_area;
            *weight.entry(edge_key(p, q)).or_insert(0.0) += 0.5 * cot;
        }
        let third = double_area / 6.0;
        mass[i] += third;
        mass[j] += third;
        mass[k] += third;
    }

    let mut diag = vec![0.0; n];
    let mut obtuse_edges = 0;
    let mut tri = TriMat::with_capacity((n, n), n + 2 * weight.len());
    for (&(i, j), &w) in &weight {
        if -w > OBTUSE_TOL {
            obtuse_edges += 1;
        }
        tri.add_triplet(i, j, -w);
        tri.add_triplet(j, i, -w);
        diag[i] += w;
        diag[j] += w;
    }
    for (i, d) in diag.into_iter().enumerate() {
        tri.add_triplet(i, i, d);
    }

    DiscreteLaplacian {
        stiffness: tri.to_csr(),
        mass,
        vertex_count: n,
        obtuse_edges,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Point;

    fn equilateral() -> TriMesh {
        TriMesh::new(
            vec![Point::new(0., 0., 0.), Point::new(1., 0., 0.), Point::new(0.5, 3f64.sqrt() / 2., 0.)],
            vec![[0, 1, 2]],
        )
        .unwrap()
    }

    #[test]
    fn equilateral_triangle_mass_and_kernel() {
        let lap = assemble_laplacian(&equilateral());
        assert!((lap.total_mass() - 3f64.sqrt() / 4.0).abs() < 1e-15);
        let s1 = lap.apply(&[1.0, 1.0, 1.0]);
        assert!(s1.iter().all(|v| v.abs() < 1e-15));
        // cot 60° / 2 on every edge
        let w = 0.5 / 3f64.sqrt();
        assert!((lap.stiffness.get(0, 1).unwrap() + w).abs() < 1e-15);
        assert_eq!(lap.obtuse_edges, 0);
    }

    #[test]
    fn obtuse_pair_is_counted() {
        // Two flat triangles sharing edge (0, 1) with both opposite angles obtuse.
        let v = vec![
            Point::new(0., 0., 0.),
            Point::new(1., 0., 0.),
            Point::new(0.5, 0.1, 0.),
            Point::new(0.5, -0.1, 0.),
        ];
        let m = TriMesh::new(v, vec![[0, 1, 2], [1, 0, 3]]).unwrap();
        let lap = assemble_laplacian(&m);
        assert_eq!(lap.obtuse_edges, 1);
        assert!(*lap.stiffness.get(0, 1).unwrap() > 0.0);
        assert!(!lap.m_matrix_on(&[0, 1, 2, 3]));
        assert!(lap.m_matrix_on(&[0, 2, 3]));
    }

    #[test]
    fn restriction_deletes_rows_and_columns() {
        let lap = assemble_laplacian(&equilateral());
        let (s, m) = lap.restrict(&[0, 2]);
        assert_eq!(s.shape(), (2, 2));
        assert_eq!(m.len(), 2);
        assert_eq!(s.get(0, 1), lap.stiffness.get(0, 2));
        let y = lap.apply_restricted(&[0, 2], &[1.0, 2.0]);
        let full = lap.apply(&[1.0, 0.0, 2.0]);
        assert_eq!(y, vec![full[0], full[2]]);
    }
}
