//! Independent reference values shared by the integration tests.

#![allow(dead_code)]

use exterior_tone::mesh::{Point, TriMesh};

/// `J₀(x)` from its power series (accurate for `x ≤ 10`).
pub fn bessel_j0(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        term *= q / (k * k) as f64;
        sum += term;
    }
    sum
}

/// First positive zero of `J₀`, by bisection on `[2, 3]`.
pub fn bessel_j0_first_zero() -> f64 {
    let (mut lo, mut hi) = (2.0, 3.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if bessel_j0(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Number of eigenvalues below `x` of the symmetric tridiagonal matrix with
/// diagonal `d` and off-diagonal `e` (Sturm sequence).
fn sturm_count(d: &[f64], e: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = d[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..d.len() {
        let prev = if q == 0.0 { 1e-300 } else { q };
        q = d[i] - x - e[i - 1] * e[i - 1] / prev;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Smallest eigenvalue of `−(ρ u′)′ = λ ρ u` on `[a, b]` with `u(a) = u(b) = 0`,
/// second-order finite differences on `n` intervals.
pub fn radial_annulus_tone(a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let rho = |i: f64| a + i * h;
    let m = n - 1;
    // Symmetrized: D^{-1/2} A D^{-1/2} with D = diag(ρ_i h²).
    let w: Vec<f64> = (1..=m).map(|i| rho(i as f64) * h * h).collect();
    let d: Vec<f64> = (1..=m)
        .map(|i| (rho(i as f64 - 0.5) + rho(i as f64 + 0.5)) / w[i - 1])
        .collect();
    let e: Vec<f64> = (1..m)
        .map(|i| -rho(i as f64 + 0.5) / (w[i - 1] * w[i]).sqrt())
        .collect();
    let (mut lo, mut hi) = (0.0, d.iter().fold(0.0_f64, |acc, &x| acc.max(x)) * 2.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sturm_count(&d, &e, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `[0, 1]²` split into `n × n` squares, each cut along its diagonal.
pub fn unit_square(n: usize) -> TriMesh {
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut v = Vec::new();
    for j in 0..=n {
        for i in 0..=n {
            v.push(Point::new(i as f64 / n as f64, j as f64 / n as f64, 0.0));
        }
    }
    let mut f = Vec::new();
    for j in 0..n {
        for i in 0..n {
            f.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            f.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    TriMesh::new(v, f).unwrap()
}

pub fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs()
}
