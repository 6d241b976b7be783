//! Space-form Jacobi field oracle: integrates `A″ + k A = 0`, `A(0) = 0`,
//! `A′(0) = 1` with an adaptive Dormand–Prince 5(4) pair and returns
//! `A′(t)/A(t)`. This path shares no code with [`super::eval_c`].

use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct JacobiOptions {
    pub atol: f64,
    pub rtol: f64,
    pub max_steps: usize,
}

impl Default for JacobiOptions {
    fn default() -> Self {
        Self {
            atol: 1e-12,
            rtol: 1e-12,
            max_steps: 1_000_000,
        }
    }
}

// Dormand–Prince tableau. The equation is autonomous, so the node row is not needed.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

type State = [f64; 2];

fn rhs(k: f64, y: &State) -> State {
    [y[1], -k * y[0]]
}

/// `A′(t)/A(t)` for the constant-curvature Jacobi equation, which equals
/// `C_k(t)` analytically.
pub fn jacobi_ratio(k: f64, t: f64) -> Result<f64> {
    jacobi_ratio_with(k, t, JacobiOptions::default())
}

pub fn jacobi_ratio_with(k: f64, t: f64, opts: JacobiOptions) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("t ≤ 0 (t = {t}): Jacobi ratio needs t > 0")));
    }
    if !k.is_finite() {
        return Err(Error::domain("curvature must be finite"));
    }
    if k > 0.0 && t >= PI / k.sqrt() {
        return Err(Error::domain(format!(
            "t ≥ π/√k (t = {t}, π/√k = {}): Jacobi field vanishes at the conjugate point",
            PI / k.sqrt()
        )));
    }

    let mut y: State = [0.0, 1.0];
    let mut s = 0.0;
    let mut h = (t * 1e-3).min(1e-3);
    let h_min = t * 1e-14;
    let mut steps = 0;
    let mut stages = [[0.0; 2]; 7];

    while s < t {
        if steps >= opts.max_steps {
            return Err(Error::Integration(s));
        }
        steps += 1;
        let last = s + h >= t;
        if last {
            h = t - s;
        }

        for i in 0..7 {
            let mut yi = y;
            for (j, kj) in stages.iter().enumerate().take(i) {
                yi[0] += h * A[i][j] * kj[0];
                yi[1] += h * A[i][j] * kj[1];
            }
            stages[i] = rhs(k, &yi);
        }
        let mut y5 = y;
        let mut err = 0.0_f64;
        for c in 0..2 {
            let mut d5 = 0.0;
            let mut d4 = 0.0;
            for i in 0..7 {
                d5 += B5[i] * stages[i][c];
                d4 += B4[i] * stages[i][c];
            }
            y5[c] += h * d5;
            let scale = opts.atol + opts.rtol * y[c].abs().max(y5[c].abs());
            err = err.max((h * (d5 - d4)).abs() / scale);
        }

        if err <= 1.0 {
            s = if last { t } else { s + h };
            y = y5;
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if h < h_min && s < t {
            return Err(Error::Integration(s));
        }
    }
    Ok(y[1] / y[0])
}
