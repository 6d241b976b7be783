use nalgebra::{Matrix3, Unit};

use super::{assemble_laplacian, DiscreteLaplacian, Point, TriMesh};
use crate::error::{Error, Result};

/// Relative slack for vertices that sit on the sphere `ρ = r_i` itself. Such
/// vertices belong to the boundary of the exterior and are kept as part of
/// the Dirichlet collar.
const ON_SPHERE_RTOL: f64 = 1e-10;

/// A mesh strictly contained in a ball of radius `radius` about `center`, or,
/// when `axis` is set, in the cylinder `B(center, radius) × ℝ` along `axis`.
/// In the cylinder case distances are measured in the ball factor only.
#[derive(Debug, Clone)]
pub struct ImmersedSurface {
    pub mesh: TriMesh,
    pub center: Point,
    pub radius: f64,
    pub axis: Option<Unit<Point>>,
}

impl ImmersedSurface {
    pub fn in_ball(mesh: TriMesh, center: Point, radius: f64) -> Result<Self> {
        Self::build(mesh, center, radius, None)
    }

    pub fn in_cylinder(mesh: TriMesh, center: Point, radius: f64, axis: Point) -> Result<Self> {
        let axis = Unit::try_new(axis, 1e-300)
            .ok_or_else(|| Error::Parameter("cylinder axis must be nonzero".into()))?;
        Self::build(mesh, center, radius, Some(axis))
    }

    fn build(mesh: TriMesh, center: Point, radius: f64, axis: Option<Unit<Point>>) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::Parameter(format!("ball radius must be positive, got {radius}")));
        }
        let s = Self {
            mesh,
            center,
            radius,
            axis,
        };
        for (v, d) in extrinsic_distance(&s).into_iter().enumerate() {
            if !(d < radius) {
                return Err(Error::NotContained {
                    vertex: v,
                    distance: d,
                    radius,
                });
            }
        }
        Ok(s)
    }

    /// Euclidean factor dimension: 0 in a ball, 1 in a cylinder.
    pub fn ell(&self) -> u32 {
        u32::from(self.axis.is_some())
    }

    fn rho(&self, x: &Point) -> f64 {
        let d = x - self.center;
        match &self.axis {
            None => d.norm(),
            Some(a) => (d - a.as_ref() * a.dot(&d)).norm(),
        }
    }

    fn with_mesh(&self, mesh: TriMesh) -> Self {
        Self {
            mesh,
            center: self.center,
            radius: self.radius,
            axis: self.axis,
        }
    }

    pub fn laplacian(&self) -> DiscreteLaplacian {
        assemble_laplacian(&self.mesh)
    }
}

/// Per-vertex distance `ρ = |x − p|` (or its ball-factor part in a cylinder).
pub fn extrinsic_distance(surface: &ImmersedSurface) -> Vec<f64> {
    surface.mesh.vertices().iter().map(|x| surface.rho(x)).collect()
}

#[derive(Debug, Clone)]
pub struct MeanCurvature {
    /// `H` per vertex, pointing toward the center of a sphere.
    pub vectors: Vec<Point>,
    pub norms: Vec<f64>,
    /// Boundary values are biased and excluded from `interior_sup`.
    pub unreliable: Vec<bool>,
    pub interior_sup: f64,
}

/// Mean-curvature vector from the coordinate Laplacian: `Δx = H` with the
/// trace convention, discretized as `H = −M⁻¹ S x`.
pub fn mean_curvature(surface: &ImmersedSurface, lap: &DiscreteLaplacian) -> MeanCurvature {
    let x = surface.mesh.vertices();
    let n = x.len();
    let mut vectors = vec![Point::zeros(); n];
    for c in 0..3 {
        let coord: Vec<f64> = x.iter().map(|p| p[c]).collect();
        let sx = lap.apply(&coord);
        for v in 0..n {
            vectors[v][c] = -sx[v] / lap.mass[v];
        }
    }
    let norms: Vec<f64> = vectors.iter().map(|h| h.norm()).collect();
    let unreliable = surface.mesh.boundary_flags().to_vec();
    let interior_sup = norms
        .iter()
        .zip(&unreliable)
        .filter(|(_, &b)| !b)
        .map(|(&h, _)| h)
        .fold(0.0, f64::max);
    MeanCurvature {
        vectors,
        norms,
        unreliable,
        interior_sup,
    }
}

/// The discrete counterpart of `M ∖ K_i` with `K_i` the preimage of the
/// closed ball of radius `r_i`.
#[derive(Debug, Clone)]
pub struct ExteriorRegion {
    pub surface: ImmersedSurface,
    /// Sub-mesh vertex indices carrying a Dirichlet condition, ascending.
    pub dirichlet: Vec<usize>,
    /// Parent-mesh index of every sub-mesh vertex.
    pub parent_vertex: Vec<usize>,
}

impl ExteriorRegion {
    pub fn free_vertices(&self) -> Vec<usize> {
        let mut is_dir = vec![false; self.surface.mesh.vertex_count()];
        for &d in &self.dirichlet {
            is_dir[d] = true;
        }
        (0..is_dir.len()).filter(|&v| !is_dir[v]).collect()
    }
}

/// Keeps the faces whose three vertices lie outside the closed ball of radius
/// `r_i`. Vertices touching a removed face approximate `∂K_i` and are flagged
/// Dirichlet, as are the original boundary vertices.
pub fn exterior_region(surface: &ImmersedSurface, r_i: f64) -> Result<ExteriorRegion> {
    if !(r_i > 0.0 && r_i < surface.radius) {
        return Err(Error::domain(format!(
            "r_i ∉ (0, r) (r_i = {r_i}, r = {}): exhaustion radius must lie inside the ball",
            surface.radius
        )));
    }
    let rho = extrinsic_distance(surface);
    let cut = r_i * (1.0 - ON_SPHERE_RTOL);
    let outside: Vec<bool> = rho.iter().map(|&d| d >= cut).collect();

    let mesh = &surface.mesh;
    let mut touches_removed = vec![false; mesh.vertex_count()];
    let mut kept = Vec::new();
    for f in mesh.faces() {
        if f.iter().all(|&v| outside[v]) {
            kept.push(*f);
        } else {
            for &v in f {
                touches_removed[v] = true;
            }
        }
    }
    if kept.is_empty() {
        return Err(Error::EmptyRegion(r_i));
    }

    let mut new_index = vec![usize::MAX; mesh.vertex_count()];
    let mut parent_vertex = Vec::new();
    for f in &kept {
        for &v in f {
            if new_index[v] == usize::MAX {
                new_index[v] = parent_vertex.len();
                parent_vertex.push(v);
            }
        }
    }
    // Keep parent order so sub-mesh numbering is deterministic and monotone.
    parent_vertex.sort_unstable();
    for (k, &v) in parent_vertex.iter().enumerate() {
        new_index[v] = k;
    }
    let vertices = parent_vertex.iter().map(|&v| mesh.vertices()[v]).collect();
    let faces = kept
        .iter()
        .map(|f| [new_index[f[0]], new_index[f[1]], new_index[f[2]]])
        .collect();
    let sub = TriMesh::new(vertices, faces)?;

    let original_boundary = mesh.boundary_flags();
    let dirichlet = parent_vertex
        .iter()
        .enumerate()
        .filter(|&(_, &v)| touches_removed[v] || original_boundary[v])
        .map(|(k, _)| k)
        .collect();

    Ok(ExteriorRegion {
        surface: surface.with_mesh(sub),
        dirichlet,
        parent_vertex,
    })
}

/// Ambient scalar field with analytic gradient and Hessian.
pub trait AmbientField {
    fn value(&self, x: &Point) -> f64;
    fn gradient(&self, x: &Point) -> Point;
    fn hessian(&self, x: &Point) -> Matrix3<f64>;
}

/// `g(x) = ⟨c, x⟩ + d`
#[derive(Debug, Clone, Copy)]
pub struct LinearField {
    pub coefficients: Point,
    pub offset: f64,
}

impl AmbientField for LinearField {
    fn value(&self, x: &Point) -> f64 {
        self.coefficients.dot(x) + self.offset
    }
    fn gradient(&self, _x: &Point) -> Point {
        self.coefficients
    }
    fn hessian(&self, _x: &Point) -> Matrix3<f64> {
        Matrix3::zeros()
    }
}

/// `g(x) = |x − p|²`
#[derive(Debug, Clone, Copy)]
pub struct DistanceSquared {
    pub center: Point,
}

impl AmbientField for DistanceSquared {
    fn value(&self, x: &Point) -> f64 {
        (x - self.center).norm_squared()
    }
    fn gradient(&self, x: &Point) -> Point {
        2.0 * (x - self.center)
    }
    fn hessian(&self, _x: &Point) -> Matrix3<f64> {
        2.0 * Matrix3::identity()
    }
}

#[derive(Debug, Clone)]
pub struct CompositionCheck {
    /// Discrete `Δ(g∘φ)` per vertex.
    pub lhs: Vec<f64>,
    /// `tr_T Hess g + ⟨grad g, H⟩` per vertex.
    pub rhs: Vec<f64>,
    pub residuals: Vec<f64>,
    pub max_interior: f64,
}

/// Checks the composition formula `Δ(g∘φ) = Σ Hess g(e_i, e_i) + ⟨grad g, H⟩`
/// at every vertex. The tangent plane is taken orthogonal to the
/// area-weighted vertex normal.
pub fn composition_check<G: AmbientField + ?Sized>(
    surface: &ImmersedSurface,
    lap: &DiscreteLaplacian,
    field: &G,
) -> CompositionCheck {
    let x = surface.mesh.vertices();
    let g: Vec<f64> = x.iter().map(|p| field.value(p)).collect();
    let sg = lap.apply(&g);
    let h = mean_curvature(surface, lap);
    let normals = surface.mesh.vertex_normals();

    let mut lhs = Vec::with_capacity(x.len());
    let mut rhs = Vec::with_capacity(x.len());
    let mut residuals = Vec::with_capacity(x.len());
    let mut max_interior = 0.0_f64;
    for v in 0..x.len() {
        let hess = field.hessian(&x[v]);
        let nrm = normals[v];
        let tangent_trace = hess.trace() - nrm.dot(&(hess * nrm));
        let l = -sg[v] / lap.mass[v];
        let r = tangent_trace + field.gradient(&x[v]).dot(&h.vectors[v]);
        let res = (l - r).abs();
        lhs.push(l);
        rhs.push(r);
        residuals.push(res);
        if !h.unreliable[v] {
            max_interior = max_interior.max(res);
        }
    }
    CompositionCheck {
        lhs,
        rhs,
        residuals,
        max_interior,
    }
}
