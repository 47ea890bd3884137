//! Two-dimensional dynamics of an iteration `G(β, γ) = D(β) R(γ)` restricted to
//! the plane spanned by the target `|t⟩` and its complement `|t⊥⟩`.
//!
//! A state in the plane is `e^{iφ} sin(θ/2) |t⟩ + cos(θ/2) |t⊥⟩`. The diffusion
//! `D(β) = e^{-iβ|s₀⟩⟨s₀|}` is a phase about the initial state and the oracle
//! `R(γ) = e^{-iγ|t⟩⟨t|}` is a phase on the target. Both keep the plane
//! invariant, so everything here is exact 2×2 arithmetic.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Agreement required between the closed-form and matrix increments.
pub const IDENTITY_TOLERANCE: f64 = 1e-12;

/// Default `c` of the QAAO predicate `B > c / √N`.
pub const DEFAULT_C: f64 = 1.5;

/// Reduce an angle to `[-π, π]`.
pub fn wrap_pi(x: f64) -> f64 {
    if (-PI..=PI).contains(&x) {
        return x;
    }
    let r = x - TAU * (x / TAU).round();
    // `round` leaves values in [-π, π]; guard the last ulp.
    r.clamp(-PI, PI)
}

/// Reduce an angle to `[0, 2π)`.
pub fn wrap_tau(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Position `(θ, φ)` of a state in the target/complement plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateAngles {
    theta: f64,
    phi: f64,
}

impl StateAngles {
    /// `theta` must lie in `[0, π]` (a 1e-12 excursion is clamped); `phi` is
    /// reduced to `[0, 2π)`. At the poles `phi` is gauge and set to 0.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(invalid("state angles must be finite"));
        }
        if !(-IDENTITY_TOLERANCE..=PI + IDENTITY_TOLERANCE).contains(&theta) {
            return Err(invalid(format!("theta {theta} outside [0, π]")));
        }
        Ok(Self::normalized(theta.clamp(0.0, PI), phi))
    }

    pub(crate) fn normalized(theta: f64, phi: f64) -> Self {
        let phi = if theta == 0.0 || theta == PI {
            0.0
        } else {
            wrap_tau(phi)
        };
        Self { theta, phi }
    }

    /// Angles of `a_t |t⟩ + a_perp |t⊥⟩`, global phase and norm discarded.
    pub fn from_amplitudes(target: Complex64, complement: Complex64) -> Self {
        let (rt, rc) = (target.norm(), complement.norm());
        if rt == 0.0 && rc == 0.0 {
            return Self {
                theta: 0.0,
                phi: 0.0,
            };
        }
        let theta = 2.0 * rt.atan2(rc);
        // Relative phase is meaningless when one component vanishes.
        let scale = rt.max(rc);
        let phi = if rt <= 1e-15 * scale || rc <= 1e-15 * scale {
            0.0
        } else {
            target.arg() - complement.arg()
        };
        Self::normalized(theta.clamp(0.0, PI), phi)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// `sin²(θ/2)`.
    pub fn target_probability(&self) -> f64 {
        let s = (self.theta / 2.0).sin();
        s * s
    }

    /// Amplitudes on `(|t⟩, |t⊥⟩)`.
    pub fn amplitudes(&self) -> [Complex64; 2] {
        let half = self.theta / 2.0;
        [
            Complex64::from_polar(half.sin(), self.phi),
            Complex64::new(half.cos(), 0.0),
        ]
    }
}

/// One `(β, γ)` pair, both in `[-π, π]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct IterationParams {
    beta: f64,
    gamma: f64,
}

impl IterationParams {
    /// The Grover iteration `G(π, π)`.
    pub const GROVER: IterationParams = IterationParams {
        beta: PI,
        gamma: PI,
    };

    pub fn new(beta: f64, gamma: f64) -> Result<Self> {
        let ok = |x: f64| x.is_finite() && (-PI..=PI).contains(&x);
        if !ok(beta) || !ok(gamma) {
            return Err(invalid(format!(
                "iteration parameters ({beta}, {gamma}) outside [-π, π]"
            )));
        }
        Ok(Self { beta, gamma })
    }

    /// Builds from arbitrary finite angles, reducing both to `[-π, π]`.
    pub fn wrapped(beta: f64, gamma: f64) -> Self {
        Self {
            beta: wrap_pi(beta),
            gamma: wrap_pi(gamma),
        }
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

impl TryFrom<[f64; 2]> for IterationParams {
    type Error = Error;

    fn try_from(v: [f64; 2]) -> Result<Self> {
        Self::new(v[0], v[1])
    }
}

impl From<IterationParams> for [f64; 2] {
    fn from(p: IterationParams) -> Self {
        [p.beta, p.gamma]
    }
}

/// Coefficients of the closed-form increment `Δ = A cos θ + B sin θ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientSet {
    pub a: f64,
    pub b: f64,
    pub c_coef: f64,
    /// `φ - γ` reduced to `[0, 2π)`.
    pub varphi: f64,
}

/// A 2×2 unitary on the ordered basis `(|t⟩, |t⊥⟩)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubspaceRotation {
    pub m: [[Complex64; 2]; 2],
}

impl SubspaceRotation {
    pub fn identity() -> Self {
        let (o, z) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        Self {
            m: [[o, z], [z, o]],
        }
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    /// `self · rhs` (apply `rhs` first).
    pub fn compose(&self, rhs: &SubspaceRotation) -> SubspaceRotation {
        let (a, b) = (&self.m, &rhs.m);
        let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        SubspaceRotation { m }
    }

    pub fn adjoint(&self) -> SubspaceRotation {
        let m = &self.m;
        SubspaceRotation {
            m: [
                [m[0][0].conj(), m[1][0].conj()],
                [m[0][1].conj(), m[1][1].conj()],
            ],
        }
    }

    /// Largest entry of `|U†U - 1|`.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.adjoint().compose(self);
        let id = Self::identity();
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((p.m[i][j] - id.m[i][j]).norm());
            }
        }
        worst
    }
}

/// `θ₀ = 2 arcsin √(m / 2ⁿ)`.
pub fn initial_theta(n: u32, m: u64) -> Result<f64> {
    check_space(n, m)?;
    let dim = (1u64 << n) as f64;
    Ok(2.0 * (m as f64 / dim).sqrt().asin())
}

/// Angles of the uniform superposition for `m` targets among `2ⁿ` items.
pub fn initial_angles(n: u32, m: u64) -> Result<StateAngles> {
    Ok(StateAngles::normalized(initial_theta(n, m)?, 0.0))
}

pub(crate) fn check_space(n: u32, m: u64) -> Result<()> {
    if !(1..=62).contains(&n) {
        return Err(invalid(format!("qubit count {n} outside 1..=62")));
    }
    let dim = 1u64 << n;
    if m == 0 || m >= dim {
        return Err(invalid(format!(
            "target count {m} must satisfy 1 <= m < 2^{n} = {dim}"
        )));
    }
    Ok(())
}

/// Number of Grover steps before the closing iteration.
///
/// For a single target this is `⌊π√N/4 − 1/2⌋`. With several targets the
/// analogous `⌊π√(N/m)/4 − 1/2⌋` can rotate past the target, in which case the
/// first step count that enters the closing branch `θ ≥ π − 2θ₀` is used.
pub fn optimal_grover_steps(n: u32, m: u64) -> Result<usize> {
    let theta0 = initial_theta(n, m)?;
    let dim = (1u64 << n) as f64;
    let k = ((PI * (dim / m as f64).sqrt() / 4.0 - 0.5).floor()).max(0.0) as usize;
    if m == 1 || ((2 * k + 1) as f64) * theta0 <= PI {
        return Ok(k);
    }
    Ok(((PI - 3.0 * theta0) / (2.0 * theta0)).ceil().max(0.0) as usize)
}

pub fn coefficients(p: IterationParams, s: StateAngles, theta0: f64) -> CoefficientSet {
    let (sb, cb) = (p.beta / 2.0).sin_cos();
    let (st0, ct0) = theta0.sin_cos();
    let varphi = wrap_tau(s.phi - p.gamma);
    let (sv, cv) = varphi.sin_cos();
    let c_coef = cb * sv + sb * cv * ct0;
    CoefficientSet {
        a: sb * sb * st0 * st0,
        b: -c_coef * sb * st0,
        c_coef,
        varphi,
    }
}

/// `D(β) R(γ)` on `(|t⟩, |t⊥⟩)`.
pub fn iteration_matrix(p: IterationParams, theta0: f64) -> SubspaceRotation {
    let (s, c) = (theta0 / 2.0).sin_cos();
    let proj = [[s * s, s * c], [c * s, c * c]];
    let k = Complex64::from_polar(1.0, -p.beta) - 1.0;
    let oracle = Complex64::from_polar(1.0, -p.gamma);
    let one = Complex64::new(1.0, 0.0);
    SubspaceRotation {
        m: [
            [(one + k * proj[0][0]) * oracle, k * proj[0][1]],
            [k * proj[1][0] * oracle, one + k * proj[1][1]],
        ],
    }
}

/// `Δ = A cos θ + B sin θ`.
pub fn increment_closed_form(p: IterationParams, s: StateAngles, theta0: f64) -> f64 {
    let co = coefficients(p, s, theta0);
    co.a * s.theta.cos() + co.b * s.theta.sin()
}

fn increment_matrix(p: IterationParams, s: StateAngles, theta0: f64) -> f64 {
    let out = iteration_matrix(p, theta0).apply(s.amplitudes());
    out[0].norm_sqr() - s.target_probability()
}

/// Change in target probability caused by one iteration.
///
/// Computed both from the closed form and from the 2×2 matrix action; the
/// matrix value is returned and a disagreement beyond 1e-12 is reported as
/// [`Error::IncrementMismatch`].
pub fn increment(p: IterationParams, s: StateAngles, theta0: f64) -> Result<f64> {
    let closed_form = increment_closed_form(p, s, theta0);
    let matrix = increment_matrix(p, s, theta0);
    if (closed_form - matrix).abs() > IDENTITY_TOLERANCE {
        return Err(Error::IncrementMismatch {
            closed_form,
            matrix,
        });
    }
    Ok(matrix)
}

/// `c / √N`.
pub fn qaao_threshold(c: f64, dim: u64) -> f64 {
    c / (dim as f64).sqrt()
}

/// Supremum of `B` over all `(β, γ)`; it does not depend on the state.
///
/// `B = sin θ₀ · sin(β/2) · √(cos²(β/2) + sin²(β/2) cos²θ₀)` at the best `γ`,
/// maximal at `β = π` while `sin²θ₀ ≤ 1/2` and equal to `1/2` beyond.
pub fn max_b(theta0: f64) -> f64 {
    let (s, c) = theta0.sin_cos();
    if s * s <= 0.5 {
        s * c.abs()
    } else {
        0.5
    }
}

/// QAAO predicate `B(β, γ) > c / √N` with `c > 1`.
pub fn is_qaao(p: IterationParams, s: StateAngles, theta0: f64, dim: u64, c: f64) -> Result<bool> {
    if c.is_nan() || c <= 1.0 {
        return Err(invalid(format!("QAAO constant c = {c} must exceed 1")));
    }
    Ok(coefficients(p, s, theta0).b > qaao_threshold(c, dim))
}

pub fn apply_iteration(p: IterationParams, s: StateAngles, theta0: f64) -> StateAngles {
    let [t, c] = iteration_matrix(p, theta0).apply(s.amplitudes());
    StateAngles::from_amplitudes(t, c)
}

/// Parameters maximizing the increment at `s`.
///
/// Far from the target (`θ < π − 2θ₀`) this is the Grover-like `(π, φ − π)`.
/// Inside the closing branch it returns the exact-landing pair
/// `β* = 2 arcsin(cos(θ/2) csc θ₀)`, `γ* = φ + π − arctan(cot(β*/2) sec θ₀)`, with the arctan
/// taken on the quadrant of `(sin(β*/2) cos θ₀, cos(β*/2))`.
pub fn optimal_params(s: StateAngles, theta0: f64) -> IterationParams {
    if s.theta < PI - 2.0 * theta0 {
        return IterationParams::wrapped(PI, s.phi - PI);
    }
    let ratio = ((s.theta / 2.0).cos() / theta0.sin()).clamp(-1.0, 1.0);
    let beta = 2.0 * ratio.asin();
    let (sb, cb) = (beta / 2.0).sin_cos();
    // atan2 picks the branch that still lands exactly when θ₀ > π/2 (m > N/2);
    // for θ₀ < π/2 it coincides with the principal arctan.
    let slope = cb.atan2(sb * theta0.cos());
    IterationParams::wrapped(beta, s.phi + PI - slope)
}

/// One root `φ̃ ∈ [0, π)` of `C(β, φ̃) = 0`; the other root is `φ̃ + π`.
///
/// `C = R sin(φ̃ + α)` with `tan α = tan(β/2) cos θ₀`, so the roots sit at
/// `-α mod π`.
pub fn region_boundary(beta: f64, theta0: f64) -> Result<f64> {
    if !beta.is_finite() || beta == 0.0 {
        return Err(invalid("region boundary undefined at beta = 0"));
    }
    let (sb, cb) = (beta / 2.0).sin_cos();
    let alpha = (sb * theta0.cos()).atan2(cb);
    let root = (-alpha).rem_euclid(PI);
    Ok(if root >= PI { 0.0 } else { root })
}

/// Both roots of `C` in `φ̃`, ascending in `[0, 2π)`.
pub fn region_boundary_roots(beta: f64, theta0: f64) -> Result<[f64; 2]> {
    let r = region_boundary(beta, theta0)?;
    Ok([r, r + PI])
}

const MC_CHUNK: usize = 1 << 16;

/// Monte Carlo estimate of the fraction of `(β, γ) ∈ [-π, π]²` with `B > 0`.
pub fn qaao_region_fraction(s: StateAngles, theta0: f64, samples: usize, seed: u64) -> Result<f64> {
    region_fraction_above(s, theta0, 0.0, samples, seed)
}

/// Fraction of `(β, γ) ∈ [-π, π]²` with `B > threshold`.
///
/// Samples are split into fixed-size chunks; chunk `k` draws from stream `k` of
/// a ChaCha generator seeded with `seed`, so the estimate does not depend on
/// the number of worker threads.
pub fn region_fraction_above(
    s: StateAngles,
    theta0: f64,
    threshold: f64,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    if samples == 0 {
        return Err(invalid("sample count must be at least 1"));
    }
    let chunks = samples.div_ceil(MC_CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let len = MC_CHUNK.min(samples - k * MC_CHUNK);
            let mut hits = 0u64;
            for _ in 0..len {
                let beta = rng.gen_range(-PI..=PI);
                let gamma = rng.gen_range(-PI..=PI);
                let p = IterationParams { beta, gamma };
                if coefficients(p, s, theta0).b > threshold {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    Ok(hits as f64 / samples as f64)
}
