//! Principal branch of the Lambert W function on the real line.

use crate::error::{domain, Result};
use std::f64::consts::E;

const BRANCH_POINT: f64 = -1.0 / E;
const MAX_ITERATIONS: usize = 64;

/// `W0(z)`: the solution `w >= -1` of `w * exp(w) = z`, for `z >= -1/e`.
pub fn lambert_w0(z: f64) -> Result<f64> {
    if z.is_nan() || z < BRANCH_POINT {
        return Err(domain(format!("W0 is defined for z >= -1/e, got {z}")));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    if z == BRANCH_POINT {
        return Ok(-1.0);
    }
    if z.is_infinite() {
        return Ok(f64::INFINITY);
    }
    if z > E {
        return Ok(solve_log_form(z));
    }

    let mut w = initial_guess(z);
    for _ in 0..MAX_ITERATIONS {
        let ew = w.exp();
        let f = w * ew - z;
        let wp1 = w + 1.0;
        if wp1 == 0.0 {
            break;
        }
        // Halley
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        let next = (w - step).max(-1.0);
        if (next - w).abs() <= 4.0 * f64::EPSILON * next.abs().max(1e-300) {
            w = next;
            break;
        }
        w = next;
    }
    Ok(w)
}

fn initial_guess(z: f64) -> f64 {
    if z < -0.25 {
        // series around the branch point in s = sqrt(2 (e z + 1))
        let s = (2.0 * (E * z + 1.0)).max(0.0).sqrt();
        -1.0 + s - s * s / 3.0 + 11.0 / 72.0 * s * s * s
    } else if z.abs() < 0.25 {
        z * (1.0 - z * (1.0 - 1.5 * z))
    } else {
        // 0.25 <= z <= e
        (1.0 + z).ln() * 0.75
    }
}

/// For `z > e`, solve `w + ln w = ln z` with Halley steps; avoids
/// overflowing `exp(w)` for huge arguments.
fn solve_log_form(z: f64) -> f64 {
    let lz = z.ln();
    let llz = lz.ln();
    let mut w = lz - llz + llz / lz;
    for _ in 0..MAX_ITERATIONS {
        let f = w + w.ln() - lz;
        let d1 = 1.0 + 1.0 / w;
        let d2 = -1.0 / (w * w);
        let step = f / (d1 - 0.5 * f * d2 / d1);
        let next = w - step;
        if (next - w).abs() <= 2.0 * f64::EPSILON * next {
            return next;
        }
        w = next;
    }
    w
}
