use std::f64::consts::PI;

use super::{ParameterSequence, ScheduleKind};
use crate::error::{invalid, Result};
use crate::subspace::{check_space, IterationParams};

/// Chebyshev polynomial of the first kind for real (possibly fractional)
/// degree, continued analytically outside `[-1, 1]`.
pub fn chebyshev_t(degree: f64, x: f64) -> f64 {
    if x.abs() <= 1.0 {
        (degree * x.acos()).cos()
    } else if x > 1.0 {
        (degree * x.acosh()).cosh()
    } else {
        // Only integral degrees are meaningful for x < -1.
        let sign = if degree.rem_euclid(2.0) == 0.0 {
            1.0
        } else {
            -1.0
        };
        sign * (degree * (-x).acosh()).cosh()
    }
}

/// `η` with `1/η = T_{1/(2L+1)}(1/δ)`.
pub fn fixed_point_eta(iterations: usize, delta: f64) -> f64 {
    let degree = (2 * iterations + 1) as f64;
    1.0 / ((1.0 / delta).acosh() / degree).cosh()
}

/// Chebyshev fixed-point schedule of `iterations` steps with error budget
/// `delta`: once `λ² = M/N ≥ 1 − η²` the final probability is at least `1 − δ²`.
///
/// `β_i = 2 cot⁻¹(tan(2πi/(2L+1)) √(1−η²))` with `cot⁻¹` valued in `(0, π)`,
/// and `γ_i = β_{L−i+1}`.
pub fn fixed_point_sequence(
    n: u32,
    m: u64,
    iterations: usize,
    delta: f64,
) -> Result<ParameterSequence> {
    check_space(n, m)?;
    if iterations == 0 {
        return Err(invalid("fixed-point schedule needs at least one iteration"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid(format!("delta {delta} outside (0, 1)")));
    }
    let degree = (2 * iterations + 1) as f64;
    let eta = fixed_point_eta(iterations, delta);
    let w = (1.0 - eta * eta).sqrt();
    let betas: Vec<f64> = (1..=iterations)
        .map(|i| {
            let x = (2.0 * PI * i as f64 / degree).tan() * w;
            IterationParams::wrapped(2.0 * (PI / 2.0 - x.atan()), 0.0).beta()
        })
        .collect();
    let params = (0..iterations)
        .map(|i| IterationParams::new(betas[i], betas[iterations - 1 - i]))
        .collect::<Result<Vec<_>>>()?;

    let mut seq = ParameterSequence::new(ScheduleKind::FixedPoint, n, m, params);
    seq.delta = Some(delta);
    Ok(seq)
}
