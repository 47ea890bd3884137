//! Parameter schedules: rejection-sampled QAAO sequences, the optimal exact
//! search, δ-perturbed optimal schedules, the Chebyshev fixed-point schedule
//! and the recursive π/3 construction.

mod chebyshev;
mod pi3;

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::subspace::{
    apply_iteration, coefficients, initial_angles, initial_theta, max_b, optimal_grover_steps,
    optimal_params, qaao_threshold, IterationParams, StateAngles, DEFAULT_C,
};

pub use chebyshev::{chebyshev_t, fixed_point_eta, fixed_point_sequence};
pub use pi3::{pi3_sequence, Pi3Program, SubspaceOp, PI3_MAX_DEPTH};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleKind {
    RandomQaao,
    Optimal,
    NoisyOptimal,
    FixedPoint,
    Pi3,
}

impl ScheduleKind {
    pub const ALL: [ScheduleKind; 5] = [
        ScheduleKind::RandomQaao,
        ScheduleKind::Optimal,
        ScheduleKind::NoisyOptimal,
        ScheduleKind::FixedPoint,
        ScheduleKind::Pi3,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ScheduleKind::RandomQaao => "random-qaao",
            ScheduleKind::Optimal => "optimal",
            ScheduleKind::NoisyOptimal => "noisy-optimal",
            ScheduleKind::FixedPoint => "fixed-point",
            ScheduleKind::Pi3 => "pi3",
        }
    }

    /// Oracle calls charged per iteration when reporting query counts.
    pub fn default_queries_per_iteration(&self) -> u32 {
        match self {
            ScheduleKind::FixedPoint => 2,
            _ => 1,
        }
    }
}

impl std::fmt::Display for ScheduleKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ScheduleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| invalid(format!("unknown schedule kind '{s}'")))
    }
}

fn default_m() -> u64 {
    1
}

/// An ordered schedule of iterations plus the settings that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterSequence {
    pub kind: ScheduleKind,
    pub n: u32,
    #[serde(default = "default_m")]
    pub m: u64,
    pub c: Option<f64>,
    pub delta: Option<f64>,
    pub seed: Option<u64>,
    pub queries_per_iteration: u32,
    pub params: Vec<IterationParams>,
}

impl ParameterSequence {
    pub fn new(kind: ScheduleKind, n: u32, m: u64, params: Vec<IterationParams>) -> Self {
        Self {
            kind,
            n,
            m,
            c: None,
            delta: None,
            seed: None,
            queries_per_iteration: kind.default_queries_per_iteration(),
            params,
        }
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    /// Oracle calls charged to step `index` (0-based).
    ///
    /// π/3 programs interleave bare diffusion and bare oracle operations; only
    /// the latter cost a query. Every other schedule pays
    /// `queries_per_iteration` per step.
    pub fn queries_for_step(&self, index: usize) -> u64 {
        match self.kind {
            ScheduleKind::Pi3 => u64::from(self.params[index].gamma() != 0.0),
            _ => u64::from(self.queries_per_iteration),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Settings for the rejection-sampled QAAO generator.
#[derive(Debug, Clone, Copy)]
pub struct QaaoSampling {
    pub c: f64,
    /// Stop once the target probability reaches this value; `1.0` requests an
    /// exact closing step.
    pub threshold: f64,
    /// Rejection attempts allowed per step.
    pub max_attempts: usize,
}

impl Default for QaaoSampling {
    fn default() -> Self {
        Self {
            c: DEFAULT_C,
            threshold: 1.0,
            max_attempts: 10_000,
        }
    }
}

pub fn generate_qaao_sequence(
    n: u32,
    m: u64,
    c: f64,
    seed: u64,
    threshold: f64,
) -> Result<ParameterSequence> {
    generate_qaao_sequence_with(
        n,
        m,
        seed,
        &QaaoSampling {
            c,
            threshold,
            ..QaaoSampling::default()
        },
    )
}

/// Draws `(β, γ)` uniformly on `[-π, π]²` until `B > c/√N` holds at the current
/// state, appends it and advances. Once the state enters the closing branch
/// `θ ≥ π − 2θ₀` the exact closing iteration is appended.
pub fn generate_qaao_sequence_with(
    n: u32,
    m: u64,
    seed: u64,
    cfg: &QaaoSampling,
) -> Result<ParameterSequence> {
    if cfg.c.is_nan() || cfg.c <= 1.0 {
        return Err(invalid(format!(
            "QAAO constant c = {} must exceed 1",
            cfg.c
        )));
    }
    if !(cfg.threshold > 0.0 && cfg.threshold <= 1.0) {
        return Err(invalid(format!(
            "target threshold {} outside (0, 1]",
            cfg.threshold
        )));
    }
    let theta0 = initial_theta(n, m)?;
    let bound = qaao_threshold(cfg.c, 1u64 << n);
    let closing = PI - 2.0 * theta0;
    let max_steps = 64 * (optimal_grover_steps(n, m)? + 2) + 1000;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = initial_angles(n, m)?;
    let mut params = Vec::new();
    loop {
        if cfg.threshold < 1.0 && state.target_probability() >= cfg.threshold {
            break;
        }
        if state.theta() >= closing {
            let p = optimal_params(state, theta0);
            params.push(p);
            break;
        }
        // B does not depend on the state, so this decides feasibility for every step.
        if max_b(theta0) <= bound {
            return Err(invalid(format!(
                "no iteration satisfies B > c/√N = {bound:.6} on {n} qubits (largest B is {:.6}); lower c",
                max_b(theta0)
            )));
        }
        if params.len() >= max_steps {
            return Err(Error::SamplingBudget {
                step: params.len() + 1,
                attempts: cfg.max_attempts,
            });
        }
        let p = sample_qaao(&mut rng, state, theta0, bound, cfg.max_attempts).ok_or(
            Error::SamplingBudget {
                step: params.len() + 1,
                attempts: cfg.max_attempts,
            },
        )?;
        state = apply_iteration(p, state, theta0);
        params.push(p);
    }

    let mut seq = ParameterSequence::new(ScheduleKind::RandomQaao, n, m, params);
    seq.c = Some(cfg.c);
    seq.seed = Some(seed);
    Ok(seq)
}

fn sample_qaao(
    rng: &mut ChaCha8Rng,
    state: StateAngles,
    theta0: f64,
    bound: f64,
    attempts: usize,
) -> Option<IterationParams> {
    (0..attempts).find_map(|_| {
        let p = IterationParams::wrapped(rng.gen_range(-PI..=PI), rng.gen_range(-PI..=PI));
        (coefficients(p, state, theta0).b > bound).then_some(p)
    })
}

/// `K*` Grover iterations followed by one exact closing iteration.
pub fn optimal_sequence(n: u32, m: u64) -> Result<ParameterSequence> {
    let theta0 = initial_theta(n, m)?;
    let k = optimal_grover_steps(n, m)?;
    let mut state = initial_angles(n, m)?;
    let mut params = Vec::with_capacity(k + 1);
    for _ in 0..k {
        let p = IterationParams::wrapped(PI, state.phi() - PI);
        state = apply_iteration(p, state, theta0);
        params.push(p);
    }
    params.push(optimal_params(state, theta0));
    Ok(ParameterSequence::new(ScheduleKind::Optimal, n, m, params))
}

/// Optimal schedule with every parameter drawn uniformly within `±delta` of
/// the optimum for the state actually reached.
///
/// The first `K*` steps perturb the Grover-branch optimum `(π, φ − π)`. If the
/// perturbed run has not yet entered the closing branch, further perturbed
/// Grover-branch steps follow (at most `3(K*+1)`), then one perturbed closing
/// step. With `delta = 0` this is exactly [`optimal_sequence`].
pub fn noisy_optimal_sequence(n: u32, m: u64, delta: f64, seed: u64) -> Result<ParameterSequence> {
    if !(0.0..PI / 2.0).contains(&delta) {
        return Err(invalid(format!("delta {delta} outside [0, π/2)")));
    }
    let theta0 = initial_theta(n, m)?;
    let k = optimal_grover_steps(n, m)?;
    let cap = k + 3 * (k + 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut jitter = |x: f64| {
        if delta == 0.0 {
            x
        } else {
            x + rng.gen_range(-delta..=delta)
        }
    };
    let mut state = initial_angles(n, m)?;
    let mut params = Vec::with_capacity(k + 1);
    while params.len() < k || (state.theta() < PI - 2.0 * theta0 && params.len() < cap) {
        let beta = jitter(PI);
        let gamma = jitter(state.phi() - PI);
        let p = IterationParams::wrapped(beta, gamma);
        state = apply_iteration(p, state, theta0);
        params.push(p);
    }
    let best = optimal_params(state, theta0);
    let beta = jitter(best.beta());
    let gamma = jitter(best.gamma());
    params.push(IterationParams::wrapped(beta, gamma));

    let mut seq = ParameterSequence::new(ScheduleKind::NoisyOptimal, n, m, params);
    seq.delta = Some(delta);
    seq.seed = Some(seed);
    Ok(seq)
}
