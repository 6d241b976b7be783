//! Analytic test immersions, meshed at a target edge length.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{extrinsic_distance, ImmersedSurface, Point, TriMesh};

/// Every generated surface keeps at least this relative distance from the
/// boundary of its ball (or cylinder).
pub const CONTAINMENT_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Shape {
    /// Planar disk through the center, normal to `z`.
    FlatDisk { radius: f64 },
    /// Cap of a sphere of radius `sphere_radius` whose pole sits at the
    /// center; `cap_angle` is the polar angle of its rim.
    SphericalCap { sphere_radius: f64, cap_angle: f64 },
    /// Round sphere about the center (icosphere refinement).
    Sphere { radius: f64 },
    /// `scale·(cosh v cos u, cosh v sin u, v)` for `|v| ≤ half_width`.
    CatenoidBand { half_width: f64, scale: f64 },
    /// Enneper's surface over the parameter disk of radius `parameter_radius`.
    EnneperScaled { parameter_radius: f64, scale: f64 },
    /// Vertical flat strip `{y = 0, |x| ≤ width_ratio·r, |z| ≤ half_height}`
    /// inside the cylinder `B(r) × ℝ` with axis `z`.
    StripInCylinder { width_ratio: f64, half_height: f64 },
    /// Surface of revolution about `z` whose meridian has distance
    /// `r(1 − e^{−s})` from the center and polar angle oscillating at
    /// `spiral_rate`, for `s ∈ [0.2, s_cap]`.
    RevolutionAccumulating { s_cap: f64, spiral_rate: f64 },
}

impl Shape {
    pub fn name(&self) -> &'static str {
        match self {
            Shape::FlatDisk { .. } => "flat_disk",
            Shape::SphericalCap { .. } => "spherical_cap",
            Shape::Sphere { .. } => "sphere",
            Shape::CatenoidBand { .. } => "catenoid_band",
            Shape::EnneperScaled { .. } => "enneper_scaled",
            Shape::StripInCylinder { .. } => "strip_in_cylinder",
            Shape::RevolutionAccumulating { .. } => "revolution_accumulating",
        }
    }
}

pub const GENERATOR_NAMES: [&str; 7] = [
    "flat_disk",
    "spherical_cap",
    "sphere",
    "catenoid_band",
    "enneper_scaled",
    "strip_in_cylinder",
    "revolution_accumulating",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub shape: Shape,
    /// Target maximum edge length.
    pub resolution: f64,
    pub ball_radius: f64,
    pub center: [f64; 3],
}

impl GeneratorSpec {
    pub fn new(shape: Shape, resolution: f64, ball_radius: f64) -> Self {
        Self {
            shape,
            resolution,
            ball_radius,
            center: [0.0; 3],
        }
    }

    /// Default shape parameters and resolution for a generator name, sized to
    /// fit a ball of radius `ball_radius`.
    pub fn default_for(name: &str, ball_radius: f64) -> Result<Self> {
        let r = ball_radius;
        let (shape, res) = match name {
            "flat_disk" => (Shape::FlatDisk { radius: 0.99 * r }, 0.04 * r),
            "spherical_cap" => (
                Shape::SphericalCap {
                    sphere_radius: 2.0 * r,
                    cap_angle: 0.4,
                },
                0.04 * r,
            ),
            "sphere" => (Shape::Sphere { radius: 0.5 * r }, 0.04 * r),
            "catenoid_band" => (
                Shape::CatenoidBand {
                    half_width: 1.0,
                    scale: 0.9 * r / (1f64.cosh().powi(2) + 1.0).sqrt(),
                },
                0.02 * r,
            ),
            "enneper_scaled" => (
                Shape::EnneperScaled {
                    parameter_radius: 0.8,
                    scale: 0.9 * r / enneper_extent(0.8),
                },
                0.03 * r,
            ),
            "strip_in_cylinder" => (
                Shape::StripInCylinder {
                    width_ratio: 0.9,
                    half_height: r,
                },
                0.04 * r,
            ),
            "revolution_accumulating" => (
                Shape::RevolutionAccumulating {
                    s_cap: 4.0,
                    spiral_rate: 3.0,
                },
                0.04 * r,
            ),
            other => {
                return Err(Error::Parameter(format!(
                    "unknown generator {other:?}; expected one of {}",
                    GENERATOR_NAMES.join(", ")
                )))
            }
        };
        Ok(Self::new(shape, res, ball_radius))
    }
}

/// A generated surface with whatever is known about it in closed form.
#[derive(Debug, Clone)]
pub struct GeneratedSurface {
    pub name: &'static str,
    pub surface: ImmersedSurface,
    /// Exact `|H|` when it is constant and known.
    pub exact_h: Option<f64>,
}

pub fn generate(spec: &GeneratorSpec) -> Result<GeneratedSurface> {
    let h = spec.resolution;
    let r = spec.ball_radius;
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::Parameter(format!("resolution must be positive, got {h}")));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Parameter(format!("ball radius must be positive, got {r}")));
    }
    let c = Point::from(spec.center);
    let positive = |what: &str, x: f64| -> Result<()> {
        if x > 0.0 && x.is_finite() {
            Ok(())
        } else {
            Err(Error::Parameter(format!("{what} must be positive, got {x}")))
        }
    };

    let (mesh, exact_h, axis) = match spec.shape {
        Shape::FlatDisk { radius } => {
            positive("disk radius", radius)?;
            if radius >= r {
                return Err(Error::Parameter(format!("disk radius {radius} must be below ball radius {r}")));
            }
            let (pts, faces) = planar_disk(radius, h);
            let v = pts.iter().map(|&(x, y)| c + Point::new(x, y, 0.0)).collect();
            (TriMesh::new(v, faces)?, Some(0.0), None)
        }
        Shape::SphericalCap {
            sphere_radius,
            cap_angle,
        } => {
            positive("sphere radius", sphere_radius)?;
            if !(cap_angle > 0.0 && cap_angle < 0.9 * PI) {
                return Err(Error::Parameter(format!("cap angle must lie in (0, 0.9π), got {cap_angle}")));
            }
            let reach = 2.0 * sphere_radius * (0.5 * cap_angle).sin();
            if reach >= r {
                return Err(Error::Parameter(format!(
                    "cap reaches distance {reach} from the center, exceeding ball radius {r}"
                )));
            }
            let (pts, faces) = planar_disk(sphere_radius * cap_angle, h);
            let pole_center = c + Point::new(0.0, 0.0, sphere_radius);
            let v = pts
                .iter()
                .map(|&(x, y)| {
                    let sigma = x.hypot(y);
                    let theta = sigma / sphere_radius;
                    let psi = y.atan2(x);
                    pole_center
                        + sphere_radius * Point::new(theta.sin() * psi.cos(), theta.sin() * psi.sin(), -theta.cos())
                })
                .collect();
            (TriMesh::new(v, faces)?, Some(2.0 / sphere_radius), None)
        }
        Shape::Sphere { radius } => {
            positive("sphere radius", radius)?;
            if radius >= r {
                return Err(Error::Parameter(format!("sphere radius {radius} must be below ball radius {r}")));
            }
            let (v, faces) = icosphere(radius, h);
            let v = v.into_iter().map(|p| c + p).collect();
            (TriMesh::new(v, faces)?, Some(2.0 / radius), None)
        }
        Shape::CatenoidBand { half_width, scale } => {
            positive("band half-width", half_width)?;
            positive("scale", scale)?;
            let (v, faces) = catenoid_band(half_width, scale, h);
            let v = v.into_iter().map(|p| c + p).collect();
            (TriMesh::new(v, faces)?, Some(0.0), None)
        }
        Shape::EnneperScaled {
            parameter_radius,
            scale,
        } => {
            positive("parameter radius", parameter_radius)?;
            positive("scale", scale)?;
            if parameter_radius >= 3f64.sqrt() {
                return Err(Error::Parameter(format!(
                    "Enneper parameter radius {parameter_radius} must stay below √3"
                )));
            }
            let stretch = scale * (1.0 + parameter_radius * parameter_radius);
            let (pts, faces) = planar_disk(parameter_radius, h / stretch);
            let v = pts.iter().map(|&(u, w)| c + scale * enneper(u, w)).collect();
            (TriMesh::new(v, faces)?, Some(0.0), None)
        }
        Shape::StripInCylinder {
            width_ratio,
            half_height,
        } => {
            positive("width ratio", width_ratio)?;
            positive("half height", half_height)?;
            if width_ratio >= 1.0 {
                return Err(Error::Parameter(format!("strip width ratio {width_ratio} must be below 1")));
            }
            let (v, faces) = rectangle(width_ratio * r, half_height, h);
            let v = v.into_iter().map(|(x, z)| c + Point::new(x, 0.0, z)).collect();
            (TriMesh::new(v, faces)?, Some(0.0), Some(Point::z()))
        }
        Shape::RevolutionAccumulating { s_cap, spiral_rate } => {
            if !(s_cap > 0.2) || s_cap > -CONTAINMENT_MARGIN.ln() {
                return Err(Error::Parameter(format!(
                    "s_cap must lie in (0.2, {}] to keep the containment margin, got {s_cap}",
                    -CONTAINMENT_MARGIN.ln()
                )));
            }
            if !spiral_rate.is_finite() {
                return Err(Error::Parameter("spiral rate must be finite".into()));
            }
            let (v, faces) = revolution(r, s_cap, spiral_rate, h);
            let v = v.into_iter().map(|p| c + p).collect();
            (TriMesh::new(v, faces)?, None, None)
        }
    };

    let surface = match axis {
        None => ImmersedSurface::in_ball(mesh, c, r)?,
        Some(a) => ImmersedSurface::in_cylinder(mesh, c, r, a)?,
    };
    let far = extrinsic_distance(&surface).into_iter().fold(0.0, f64::max);
    if r - far < CONTAINMENT_MARGIN * r {
        return Err(Error::Parameter(format!(
            "surface reaches distance {far}, closer than {CONTAINMENT_MARGIN}·r to the boundary of radius {r}"
        )));
    }
    Ok(GeneratedSurface {
        name: spec.shape.name(),
        surface,
        exact_h,
    })
}

fn orient_ccw(pts: &[(f64, f64)], faces: &mut [[usize; 3]]) {
    for f in faces.iter_mut() {
        let (a, b, c) = (pts[f[0]], pts[f[1]], pts[f[2]]);
        let cross = (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0);
        if cross < 0.0 {
            f.swap(1, 2);
        }
    }
}

fn delaunay(pts: &[(f64, f64)]) -> Vec<[usize; 3]> {
    let dp: Vec<delaunator::Point> = pts.iter().map(|&(x, y)| delaunator::Point { x, y }).collect();
    let tri = delaunator::triangulate(&dp);
    let mut faces: Vec<[usize; 3]> = tri.triangles.chunks_exact(3).map(|t| [t[0], t[1], t[2]]).collect();
    orient_ccw(pts, &mut faces);
    faces
}

/// Concentric rings of spacing `≈ h/1.5`, ring `k` carrying `6k` equally
/// spaced points, Delaunay-triangulated. Near the center this is the
/// triangular lattice bent onto circles. The outer ring lies on the circle of
/// radius `radius`.
pub(crate) fn planar_disk(radius: f64, h: f64) -> (Vec<(f64, f64)>, Vec<[usize; 3]>) {
    let rings = ((1.5 * radius / h).ceil() as usize).max(2);
    let dr = radius / rings as f64;
    let mut pts = vec![(0.0, 0.0)];
    for k in 1..=rings {
        let rho = if k == rings { radius } else { k as f64 * dr };
        let n = 6 * k;
        for j in 0..n {
            let a = 2.0 * PI * j as f64 / n as f64;
            pts.push((rho * a.cos(), rho * a.sin()));
        }
    }
    let faces = delaunay(&pts);
    (pts, faces)
}

fn rectangle(half_w: f64, half_h: f64, h: f64) -> (Vec<(f64, f64)>, Vec<[usize; 3]>) {
    let step = h / 2f64.sqrt();
    let nx = ((2.0 * half_w / step).ceil() as usize).max(1);
    let nz = ((2.0 * half_h / step).ceil() as usize).max(1);
    let mut pts = Vec::with_capacity((nx + 1) * (nz + 1));
    for j in 0..=nz {
        for i in 0..=nx {
            pts.push((
                -half_w + 2.0 * half_w * i as f64 / nx as f64,
                -half_h + 2.0 * half_h * j as f64 / nz as f64,
            ));
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut faces = Vec::with_capacity(2 * nx * nz);
    for j in 0..nz {
        for i in 0..nx {
            faces.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            faces.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    (pts, faces)
}

/// Triangulates the band between two closed rows of `n` vertices whose
/// angular offsets (in units of the row step) are `lo_shift` and `hi_shift`.
fn stitch_rows(lo: usize, hi: usize, n: usize, lo_shift: f64, hi_shift: f64, faces: &mut Vec<[usize; 3]>) {
    let (mut i, mut j) = (0, 0);
    while i < n || j < n {
        let next_lo = (i + 1) as f64 + lo_shift;
        let next_hi = (j + 1) as f64 + hi_shift;
        if j == n || (i < n && next_lo < next_hi) {
            faces.push([lo + i % n, lo + (i + 1) % n, hi + j % n]);
            i += 1;
        } else {
            faces.push([lo + i % n, hi + (j + 1) % n, hi + j % n]);
            j += 1;
        }
    }
}

/// Closed bands swept by `rows` profile points around the `z` axis: row `j`
/// is the circle of radius `radial[j]` at height `height[j]` with `n` vertices.
fn revolve(radial: &[f64], height: &[f64], n: usize) -> (Vec<Point>, Vec<[usize; 3]>) {
    let rows = radial.len();
    let mut v = Vec::with_capacity(rows * n);
    for j in 0..rows {
        let shift = if j % 2 == 1 { 0.5 } else { 0.0 };
        for i in 0..n {
            let u = 2.0 * PI * (i as f64 + shift) / n as f64;
            v.push(Point::new(radial[j] * u.cos(), radial[j] * u.sin(), height[j]));
        }
    }
    let mut faces = Vec::with_capacity(2 * n * (rows - 1));
    for j in 0..rows - 1 {
        let (s0, s1) = if j % 2 == 1 { (0.5, 0.0) } else { (0.0, 0.5) };
        stitch_rows(j * n, (j + 1) * n, n, s0, s1, &mut faces);
    }
    (v, faces)
}

fn catenoid_band(half_width: f64, scale: f64, h: f64) -> (Vec<Point>, Vec<[usize; 3]>) {
    // Rows are equally spaced in meridian arclength sinh v; the widest row
    // has circumferential spacing ≈ step.
    let step = h / (1.12 * scale);
    let s_max = half_width.sinh();
    let rows = ((2.0 * s_max / step).ceil() as usize).max(2) + 1;
    let n = ((2.0 * PI * half_width.cosh() / step).ceil() as usize).max(6);
    let vs: Vec<f64> = (0..rows)
        .map(|j| (-s_max + 2.0 * s_max * j as f64 / (rows - 1) as f64).asinh())
        .collect();
    let radial: Vec<f64> = vs.iter().map(|v| scale * v.cosh()).collect();
    let height: Vec<f64> = vs.iter().map(|v| scale * v).collect();
    revolve(&radial, &height, n)
}

fn revolution(r: f64, s_cap: f64, rate: f64, h: f64) -> (Vec<Point>, Vec<[usize; 3]>) {
    const S0: f64 = 0.2;
    let amp = 0.35 * PI;
    let profile = |s: f64| {
        let rho = r * (1.0 - (-s).exp());
        let psi = 0.5 * PI + amp * (rate * s).sin();
        (rho * psi.sin(), rho * psi.cos())
    };
    // Cumulative meridian arclength on a fine grid, then rows at spacing h.
    let fine = 20_000;
    let mut arc = vec![0.0; fine + 1];
    let mut prev = profile(S0);
    for k in 1..=fine {
        let s = S0 + (s_cap - S0) * k as f64 / fine as f64;
        let p = profile(s);
        arc[k] = arc[k - 1] + (p.0 - prev.0).hypot(p.1 - prev.1);
        prev = p;
    }
    let step = h / 1.12;
    let rows = ((arc[fine] / step).ceil() as usize).max(2) + 1;
    let mut radial = Vec::with_capacity(rows);
    let mut height = Vec::with_capacity(rows);
    let mut k = 0;
    for j in 0..rows {
        let target = arc[fine] * j as f64 / (rows - 1) as f64;
        while k < fine && arc[k + 1] < target {
            k += 1;
        }
        let t = if k < fine && arc[k + 1] > arc[k] {
            ((target - arc[k]) / (arc[k + 1] - arc[k])).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let s = S0 + (s_cap - S0) * (k as f64 + t) / fine as f64;
        let (rad, z) = profile(s);
        radial.push(rad);
        height.push(z);
    }
    let widest = radial.iter().cloned().fold(0.0, f64::max);
    let n = ((2.0 * PI * widest / step).ceil() as usize).max(6);
    revolve(&radial, &height, n)
}

pub(crate) fn enneper(u: f64, v: f64) -> Point {
    Point::new(u - u * u * u / 3.0 + u * v * v, v - v * v * v / 3.0 + u * u * v, u * u - v * v)
}

/// Largest `|X(u, v)|` over the parameter disk of radius `rho` (attained on
/// the rim).
pub fn enneper_extent(rho: f64) -> f64 {
    (0..3600)
        .map(|j| {
            let a = 2.0 * PI * j as f64 / 3600.0;
            enneper(rho * a.cos(), rho * a.sin()).norm()
        })
        .fold(0.0, f64::max)
}

/// Icosphere refined by midpoint subdivision until the longest edge is at
/// most `h`.
fn icosphere(radius: f64, h: f64) -> (Vec<Point>, Vec<[usize; 3]>) {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut v: Vec<Point> = [
        (-1.0, t, 0.0),
        (1.0, t, 0.0),
        (-1.0, -t, 0.0),
        (1.0, -t, 0.0),
        (0.0, -1.0, t),
        (0.0, 1.0, t),
        (0.0, -1.0, -t),
        (0.0, 1.0, -t),
        (t, 0.0, -1.0),
        (t, 0.0, 1.0),
        (-t, 0.0, -1.0),
        (-t, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Point::new(x, y, z).normalize())
    .collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    let max_edge = |v: &[Point], faces: &[[usize; 3]]| {
        faces
            .iter()
            .flat_map(|f| (0..3).map(move |k| (f[k], f[(k + 1) % 3])))
            .map(|(a, b)| (v[a] - v[b]).norm())
            .fold(0.0, f64::max)
    };
    let mut level = 0;
    while radius * max_edge(&v, &faces) > h && level < 9 {
        let mut midpoint = std::collections::HashMap::new();
        let mut mid = |a: usize, b: usize, v: &mut Vec<Point>| -> usize {
            let key = if a < b { (a, b) } else { (b, a) };
            *midpoint.entry(key).or_insert_with(|| {
                v.push((v[a] + v[b]).normalize());
                v.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for &[a, b, c] in &faces {
            let ab = mid(a, b, &mut v);
            let bc = mid(b, c, &mut v);
            let ca = mid(c, a, &mut v);
            next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
        level += 1;
    }
    (v.into_iter().map(|p| radius * p).collect(), faces)
}

/// Subdivision level of an icosphere mesh, recovered from its face count.
pub fn icosphere_level(face_count: usize) -> Option<u32> {
    (0..12).find(|&l| 20 * 4usize.pow(l) == face_count)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_mesh_is_delaunay_quality() {
        let (pts, faces) = planar_disk(1.0, 0.1);
        let v = pts.iter().map(|&(x, y)| Point::new(x, y, 0.0)).collect();
        let mesh = TriMesh::new(v, faces).unwrap();
        let lap = crate::mesh::assemble_laplacian(&mesh);
        assert_eq!(lap.obtuse_edges, 0);
        assert!(mesh.max_edge_length() <= 0.1);
        assert!((mesh.total_area() - PI).abs() < 0.01 * PI);
    }

    #[test]
    fn every_default_generator_builds() {
        for name in GENERATOR_NAMES {
            let spec = GeneratorSpec::default_for(name, 1.0).unwrap();
            let g = generate(&spec).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(g.name, name);
            let far = extrinsic_distance(&g.surface).into_iter().fold(0.0, f64::max);
            assert!(far <= (1.0 - CONTAINMENT_MARGIN), "{name}: {far}");
            assert!(g.surface.mesh.max_edge_length() <= spec.resolution * 1.05, "{name}");
        }
    }

    #[test]
    fn sphere_closed_and_cap_bordered() {
        let s = generate(&GeneratorSpec::new(Shape::Sphere { radius: 0.5 }, 0.1, 1.0)).unwrap();
        assert!(s.surface.mesh.boundary_vertices().is_empty());
        assert_eq!(s.exact_h, Some(4.0));
        let c = generate(&GeneratorSpec::default_for("spherical_cap", 1.0).unwrap()).unwrap();
        assert!(!c.surface.mesh.boundary_vertices().is_empty());
    }

    #[test]
    fn parameter_errors() {
        let too_big = GeneratorSpec::new(
            Shape::SphericalCap {
                sphere_radius: 1.0,
                cap_angle: 2.0,
            },
            0.1,
            1.0,
        );
        assert!(matches!(generate(&too_big), Err(Error::Parameter(_))));
        let disk = GeneratorSpec::new(Shape::FlatDisk { radius: 1.0 }, 0.1, 1.0);
        assert!(matches!(generate(&disk), Err(Error::Parameter(_))));
        let bad_res = GeneratorSpec::new(Shape::FlatDisk { radius: 0.5 }, 0.0, 1.0);
        assert!(generate(&bad_res).is_err());
        let cat = GeneratorSpec::new(
            Shape::CatenoidBand {
                half_width: 1.0,
                scale: 1.0,
            },
            0.1,
            1.0,
        );
        assert!(matches!(generate(&cat), Err(Error::NotContained { .. })));
        assert!(GeneratorSpec::default_for("torus", 1.0).is_err());
    }

    #[test]
    fn icosphere_levels() {
        let s = generate(&GeneratorSpec::new(Shape::Sphere { radius: 1.0 }, 0.1, 2.0)).unwrap();
        assert_eq!(icosphere_level(s.surface.mesh.face_count()), Some(4));
        assert!(s.surface.mesh.max_edge_length() <= 0.1);
    }
}
