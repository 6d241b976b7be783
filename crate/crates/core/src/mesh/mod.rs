//! Triangulated surfaces immersed in Euclidean space.

mod laplacian;
pub mod off;
mod surface;

use std::collections::HashMap;

use nalgebra::Vector3;

use crate::error::{Error, Result};

pub use laplacian::{assemble_laplacian, DiscreteLaplacian, OBTUSE_TOL};
pub use surface::{
    composition_check, exterior_region, extrinsic_distance, mean_curvature, AmbientField,
    CompositionCheck, DistanceSquared, ExteriorRegion, ImmersedSurface, LinearField, MeanCurvature,
};

pub type Point = Vector3<f64>;

/// Relative area below which a face counts as degenerate.
const DEGENERATE_RTOL: f64 = 1e-12;

/// A validated triangle mesh. Construction rejects out-of-range indices,
/// repeated corners, zero-area faces, edges shared by more than two faces and
/// vertices that no face references.
#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    vertices: Vec<Point>,
    faces: Vec<[usize; 3]>,
    boundary: Vec<bool>,
}

impl TriMesh {
    pub fn new(vertices: Vec<Point>, faces: Vec<[usize; 3]>) -> Result<Self> {
        let n = vertices.len();
        if faces.is_empty() {
            return Err(Error::InvalidMesh("mesh has no faces".into()));
        }
        if let Some(v) = vertices.iter().position(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(Error::InvalidMesh(format!("vertex {v} has non-finite coordinates")));
        }
        let mut used = vec![false; n];
        let mut edge_count: HashMap<(usize, usize), u32> = HashMap::with_capacity(faces.len() * 2);
        for (fi, f) in faces.iter().enumerate() {
            if f.iter().any(|&i| i >= n) {
                return Err(Error::InvalidMesh(format!("face {fi} references a vertex outside 0..{n}")));
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(Error::DegenerateFace { face: fi });
            }
            let e1 = vertices[f[1]] - vertices[f[0]];
            let e2 = vertices[f[2]] - vertices[f[0]];
            let scale = e1.norm_squared().max(e2.norm_squared());
            if e1.cross(&e2).norm() <= DEGENERATE_RTOL * scale {
                return Err(Error::DegenerateFace { face: fi });
            }
            for k in 0..3 {
                used[f[k]] = true;
                let c = edge_count.entry(edge_key(f[k], f[(k + 1) % 3])).or_insert(0);
                *c += 1;
                if *c > 2 {
                    let (i, j) = edge_key(f[k], f[(k + 1) % 3]);
                    return Err(Error::NonManifoldEdge(i, j));
                }
            }
        }
        if let Some(v) = used.iter().position(|u| !u) {
            return Err(Error::InvalidMesh(format!("vertex {v} is not referenced by any face")));
        }
        let mut boundary = vec![false; n];
        for (&(i, j), &c) in &edge_count {
            if c == 1 {
                boundary[i] = true;
                boundary[j] = true;
            }
        }
        Ok(Self {
            vertices,
            faces,
            boundary,
        })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// Per-vertex flag: the vertex lies on an edge used by exactly one face.
    pub fn boundary_flags(&self) -> &[bool] {
        &self.boundary
    }

    pub fn boundary_vertices(&self) -> Vec<usize> {
        (0..self.vertex_count()).filter(|&v| self.boundary[v]).collect()
    }

    pub fn face_area(&self, f: usize) -> f64 {
        let [i, j, k] = self.faces[f];
        0.5 * (self.vertices[j] - self.vertices[i])
            .cross(&(self.vertices[k] - self.vertices[i]))
            .norm()
    }

    pub fn total_area(&self) -> f64 {
        (0..self.face_count()).map(|f| self.face_area(f)).sum()
    }

    pub fn max_edge_length(&self) -> f64 {
        self.faces
            .iter()
            .flat_map(|f| (0..3).map(move |k| (f[k], f[(k + 1) % 3])))
            .map(|(i, j)| (self.vertices[i] - self.vertices[j]).norm())
            .fold(0.0, f64::max)
    }

    /// Unique undirected edges, each as `(min, max)`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<_> = self
            .faces
            .iter()
            .flat_map(|f| (0..3).map(move |k| edge_key(f[k], f[(k + 1) % 3])))
            .collect();
        e.sort_unstable();
        e.dedup();
        e
    }

    /// Area-weighted unit normals per vertex.
    pub fn vertex_normals(&self) -> Vec<Point> {
        let mut n = vec![Point::zeros(); self.vertex_count()];
        for &[i, j, k] in &self.faces {
            let fnorm = (self.vertices[j] - self.vertices[i]).cross(&(self.vertices[k] - self.vertices[i]));
            n[i] += fnorm;
            n[j] += fnorm;
            n[k] += fnorm;
        }
        for v in &mut n {
            let len = v.norm();
            if len > 0.0 {
                *v /= len;
            }
        }
        n
    }
}

pub(crate) fn edge_key(i: usize, j: usize) -> (usize, usize) {
    if i < j {
        (i, j)
    } else {
        (j, i)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64, z: f64) -> Point {
        Point::new(x, y, z)
    }

    #[test]
    fn single_triangle_boundary_and_area() {
        let m = TriMesh::new(vec![p(0., 0., 0.), p(1., 0., 0.), p(0.5, 3f64.sqrt() / 2., 0.)], vec![[0, 1, 2]]).unwrap();
        assert_eq!(m.boundary_vertices(), vec![0, 1, 2]);
        assert!((m.total_area() - 3f64.sqrt() / 4.0).abs() < 1e-15);
        assert_eq!(m.edges().len(), 3);
    }

    #[test]
    fn rejects_bad_meshes() {
        let tri = vec![p(0., 0., 0.), p(1., 0., 0.), p(0., 1., 0.)];
        assert!(matches!(TriMesh::new(tri.clone(), vec![[0, 1, 3]]), Err(Error::InvalidMesh(_))));
        assert!(matches!(TriMesh::new(tri.clone(), vec![[0, 1, 1]]), Err(Error::DegenerateFace { face: 0 })));
        let collinear = vec![p(0., 0., 0.), p(1., 0., 0.), p(2., 0., 0.)];
        assert!(matches!(TriMesh::new(collinear, vec![[0, 1, 2]]), Err(Error::DegenerateFace { face: 0 })));
        let mut fan = tri.clone();
        fan.push(p(0., -1., 0.));
        fan.push(p(0., 0., 1.));
        assert!(matches!(
            TriMesh::new(fan, vec![[0, 1, 2], [1, 0, 3], [0, 1, 4]]),
            Err(Error::NonManifoldEdge(0, 1))
        ));
        let mut extra = tri;
        extra.push(p(5., 5., 5.));
        assert!(matches!(TriMesh::new(extra, vec![[0, 1, 2]]), Err(Error::InvalidMesh(_))));
    }

    #[test]
    fn closed_tetrahedron_has_no_boundary() {
        let v = vec![p(0., 0., 0.), p(1., 0., 0.), p(0., 1., 0.), p(0., 0., 1.)];
        let m = TriMesh::new(v, vec![[0, 2, 1], [0, 1, 3], [1, 2, 3], [0, 3, 2]]).unwrap();
        assert!(m.boundary_vertices().is_empty());
    }
}
