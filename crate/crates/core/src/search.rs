//! Running schedules from `|s₀⟩`, recording per-step trajectories and
//! comparing algorithms by oracle queries.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::generators::{
    fixed_point_sequence, pi3_sequence, ParameterSequence, ScheduleKind, PI3_MAX_DEPTH,
};
use crate::statevector::{OracleSpec, StateVector};
use crate::subspace::{
    apply_iteration, coefficients, initial_angles, initial_theta, qaao_threshold, IterationParams,
    StateAngles, DEFAULT_C,
};

/// Per-step agreement required between the two backends.
pub const BACKEND_TOLERANCE: f64 = 1e-10;
/// Largest squared norm allowed outside the target/complement plane.
pub const LEAKAGE_TOLERANCE: f64 = 1e-12;
/// Increments below `-NEGATIVE_TOLERANCE` count as decreases.
pub const NEGATIVE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    Analytic,
    Statevector,
}

impl std::str::FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Backend::Analytic),
            "statevector" => Ok(Backend::Statevector),
            _ => Err(invalid(format!("unknown backend '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    /// 1-based.
    pub index: usize,
    pub theta_before: f64,
    pub phi_before: f64,
    pub beta: f64,
    pub gamma: f64,
    pub probability_after: f64,
    pub increment: f64,
    pub qaao_flag: bool,
    pub cumulative_queries: u64,
}

impl StepRecord {
    pub fn state_before(&self) -> StateAngles {
        StateAngles::normalized(self.theta_before, self.phi_before)
    }

    pub fn params(&self) -> IterationParams {
        IterationParams::wrapped(self.beta, self.gamma)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub n: u32,
    pub m: u64,
    pub kind: String,
    pub initial_probability: f64,
    pub final_probability: f64,
    /// Last step before the first decrease in probability, if any.
    pub turning_index: Option<usize>,
    pub steps: Vec<StepRecord>,
}

impl Trajectory {
    pub fn probabilities(&self) -> Vec<f64> {
        std::iter::once(self.initial_probability)
            .chain(self.steps.iter().map(|s| s.probability_after))
            .collect()
    }

    pub fn negative_steps(&self) -> Vec<usize> {
        self.steps
            .iter()
            .filter(|s| s.increment < -NEGATIVE_TOLERANCE)
            .map(|s| s.index)
            .collect()
    }

    pub fn is_monotone(&self) -> bool {
        self.negative_steps().is_empty()
    }

    /// First step whose resulting probability is at least `threshold`.
    pub fn first_reaching(&self, threshold: f64) -> Option<&StepRecord> {
        self.steps.iter().find(|s| s.probability_after >= threshold)
    }

    pub fn total_queries(&self) -> u64 {
        self.steps.last().map_or(0, |s| s.cumulative_queries)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "index,theta_before,phi_before,beta,gamma,probability_after,increment,qaao_flag,cumulative_queries\n",
        );
        for s in &self.steps {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                s.index,
                fmt6(s.theta_before),
                fmt6(s.phi_before),
                fmt6(s.beta),
                fmt6(s.gamma),
                fmt6(s.probability_after),
                fmt6(s.increment),
                s.qaao_flag,
                s.cumulative_queries
            );
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    fn finish(&mut self) {
        self.final_probability = self
            .steps
            .last()
            .map_or(self.initial_probability, |s| s.probability_after);
        self.turning_index = self
            .steps
            .iter()
            .find(|s| s.increment < -NEGATIVE_TOLERANCE)
            .map(|s| s.index - 1);
    }
}

/// Six fixed decimals with negative zero folded to zero.
pub fn fmt6(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

/// Runs `seq` from the uniform superposition against `oracle`.
///
/// The state-vector backend projects back onto the plane after every step,
/// failing on leakage or on disagreement with the 2×2 model.
pub fn run_search(
    seq: &ParameterSequence,
    oracle: &OracleSpec,
    backend: Backend,
) -> Result<Trajectory> {
    if seq.n != oracle.n() {
        return Err(Error::DimensionMismatch {
            state: seq.n,
            oracle: oracle.n(),
        });
    }
    match backend {
        Backend::Analytic => run_analytic(seq, oracle.m()),
        Backend::Statevector => run_statevector(seq, oracle),
    }
}

/// Subspace-only run; works for any register size.
pub fn run_analytic(seq: &ParameterSequence, m: u64) -> Result<Trajectory> {
    let theta0 = initial_theta(seq.n, m)?;
    let mut state = initial_angles(seq.n, m)?;
    let mut recorder = Recorder::new(seq, m, state.target_probability())?;
    for (i, &p) in seq.params.iter().enumerate() {
        let next = apply_iteration(p, state, theta0);
        recorder.push(i, state, p, next.target_probability());
        state = next;
    }
    Ok(recorder.finish())
}

fn run_statevector(seq: &ParameterSequence, oracle: &OracleSpec) -> Result<Trajectory> {
    let m = oracle.m();
    let theta0 = initial_theta(seq.n, m)?;
    let mut sv = StateVector::uniform(seq.n)?;
    let mut analytic = initial_angles(seq.n, m)?;
    let (mut state, _) = sv.project_to_angles(oracle)?;
    let mut recorder = Recorder::new(seq, m, sv.target_probability(oracle)?)?;
    for (i, &p) in seq.params.iter().enumerate() {
        sv.apply_iteration(p, oracle)?;
        analytic = apply_iteration(p, analytic, theta0);
        let (next, leakage) = sv.project_to_angles(oracle)?;
        if leakage >= LEAKAGE_TOLERANCE {
            return Err(Error::Leakage {
                step: i + 1,
                leakage,
            });
        }
        let prob = sv.target_probability(oracle)?;
        let expected = analytic.target_probability();
        if (prob - expected).abs() > BACKEND_TOLERANCE {
            return Err(Error::BackendMismatch {
                step: i + 1,
                analytic: expected,
                statevector: prob,
            });
        }
        recorder.push(i, state, p, prob);
        state = next;
    }
    Ok(recorder.finish())
}

struct Recorder<'a> {
    seq: &'a ParameterSequence,
    theta0: f64,
    bound: f64,
    queries: u64,
    prev: f64,
    traj: Trajectory,
}

impl<'a> Recorder<'a> {
    fn new(seq: &'a ParameterSequence, m: u64, p0: f64) -> Result<Self> {
        Ok(Self {
            seq,
            theta0: initial_theta(seq.n, m)?,
            bound: qaao_threshold(seq.c.unwrap_or(DEFAULT_C), 1u64 << seq.n),
            queries: 0,
            prev: p0,
            traj: Trajectory {
                n: seq.n,
                m,
                kind: seq.kind.to_string(),
                initial_probability: p0,
                final_probability: p0,
                turning_index: None,
                steps: Vec::with_capacity(seq.len()),
            },
        })
    }

    fn push(&mut self, i: usize, before: StateAngles, p: IterationParams, prob: f64) {
        self.queries += self.seq.queries_for_step(i);
        let b = coefficients(p, before, self.theta0).b;
        self.traj.steps.push(StepRecord {
            index: i + 1,
            theta_before: before.theta(),
            phi_before: before.phi(),
            beta: p.beta(),
            gamma: p.gamma(),
            probability_after: prob,
            increment: prob - self.prev,
            qaao_flag: b > self.bound,
            cumulative_queries: self.queries,
        });
        self.prev = prob;
    }

    fn finish(mut self) -> Trajectory {
        self.traj.finish();
        self.traj
    }
}

/// Re-flags every step with `B > c/√N`.
pub fn classify(traj: &Trajectory, c: f64) -> Result<Trajectory> {
    if c.is_nan() || c <= 1.0 {
        return Err(invalid(format!("QAAO constant c = {c} must exceed 1")));
    }
    reflag(traj, qaao_threshold(c, 1u64 << traj.n))
}

/// Re-flags every step with the sign condition `B > 0`.
pub fn classify_sign(traj: &Trajectory) -> Result<Trajectory> {
    reflag(traj, 0.0)
}

fn reflag(traj: &Trajectory, bound: f64) -> Result<Trajectory> {
    let theta0 = initial_theta(traj.n, traj.m)?;
    let mut out = traj.clone();
    for s in &mut out.steps {
        s.qaao_flag = coefficients(s.params(), s.state_before(), theta0).b > bound;
    }
    Ok(out)
}

/// `steps` repetitions of `G(π, π)`.
pub fn grover_baseline(n: u32, m: u64, steps: usize) -> Result<Trajectory> {
    if steps == 0 {
        return Err(invalid("Grover baseline needs at least one step"));
    }
    let seq = ParameterSequence::new(
        ScheduleKind::Optimal,
        n,
        m,
        vec![IterationParams::GROVER; steps],
    );
    let mut traj = run_analytic(&seq, m)?;
    traj.kind = "grover".to_string();
    Ok(traj)
}

/// One row of the fixed-point schedule table. `gamma` carries the tabulated
/// sign convention, the negative of the phase applied by `R(γ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub step: usize,
    pub theta: f64,
    pub phi: f64,
    pub beta: f64,
    pub gamma: f64,
    pub increment: f64,
    pub qaao: bool,
}

/// Fixed-point run rendered as the state/iteration/increment table. The `qaao`
/// column marks steps that actually raise the target probability; the `B`
/// predicate is available through [`classify`] and [`classify_sign`].
pub fn fixed_point_table(n: u32, iterations: usize, delta: f64) -> Result<Vec<TableRow>> {
    let seq = fixed_point_sequence(n, 1, iterations, delta)?;
    let traj = run_analytic(&seq, 1)?;
    Ok(traj
        .steps
        .iter()
        .map(|s| TableRow {
            step: s.index,
            theta: s.theta_before,
            phi: s.phi_before,
            beta: s.beta,
            gamma: if s.gamma == 0.0 { 0.0 } else { -s.gamma },
            increment: s.increment,
            qaao: s.increment > 0.0,
        })
        .collect())
}

pub fn table_csv(rows: &[TableRow]) -> String {
    let mut out = String::from("step,theta,phi,beta,gamma,increment,qaao\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.step,
            fmt6(r.theta),
            fmt6(r.phi),
            fmt6(r.beta),
            fmt6(r.gamma),
            fmt6(r.increment),
            if r.qaao { "O" } else { "X" }
        );
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pi3Level {
    pub depth: u32,
    pub queries: u64,
    pub success: f64,
    pub failure: f64,
}

pub fn pi3_levels(n: u32, m: u64, max_depth: u32) -> Result<Vec<Pi3Level>> {
    (0..=max_depth)
        .map(|d| {
            let prog = pi3_sequence(d)?;
            Ok(Pi3Level {
                depth: d,
                queries: prog.oracle_queries(),
                success: prog.success_probability(n, m)?,
                failure: prog.failure_probability(n, m)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonEntry {
    pub kind: ScheduleKind,
    pub iterations: usize,
    pub final_probability: f64,
    pub monotone: bool,
    pub negative_steps: Vec<usize>,
    /// Iterations until the threshold is first reached.
    pub iterations_to_threshold: Option<usize>,
    /// Queries under the schedule's own accounting.
    pub queries_to_threshold: Option<u64>,
    pub queries_one_per_iteration: Option<u64>,
    pub queries_two_per_iteration: Option<u64>,
    pub total_queries: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub n: u32,
    pub m: u64,
    pub threshold: f64,
    pub entries: Vec<ComparisonEntry>,
}

/// Compares schedules by the oracle cost of first reaching `threshold`.
///
/// π/3 programs are measured level by level: the intermediate states of a
/// partially applied program are not meaningful, so a depth-`d` program
/// "reaches" the threshold only if the full `U_d` does, and monotonicity is
/// judged across levels. For them `negative_steps` lists depths.
pub fn compare(seqs: &[ParameterSequence], m: u64, threshold: f64) -> Result<ComparisonReport> {
    let Some(first) = seqs.first() else {
        return Err(invalid("nothing to compare"));
    };
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(invalid(format!("threshold {threshold} outside (0, 1]")));
    }
    if let Some(bad) = seqs.iter().find(|s| s.n != first.n) {
        return Err(Error::DimensionMismatch {
            state: first.n,
            oracle: bad.n,
        });
    }
    let entries = seqs
        .iter()
        .map(|seq| compare_one(seq, m, threshold))
        .collect::<Result<Vec<_>>>()?;
    Ok(ComparisonReport {
        n: first.n,
        m,
        threshold,
        entries,
    })
}

fn compare_one(seq: &ParameterSequence, m: u64, threshold: f64) -> Result<ComparisonEntry> {
    let traj = run_analytic(seq, m)?;
    if seq.kind == ScheduleKind::Pi3 {
        let levels = pi3_levels(seq.n, m, pi3_depth_for_len(seq.len()))?;
        let hit = levels.iter().find(|l| l.success >= threshold);
        let q = hit.map(|l| l.queries);
        let negative: Vec<usize> = levels
            .windows(2)
            .filter(|w| w[1].success < w[0].success - NEGATIVE_TOLERANCE)
            .map(|w| w[1].depth as usize)
            .collect();
        return Ok(ComparisonEntry {
            kind: seq.kind,
            iterations: seq.len(),
            final_probability: traj.final_probability,
            monotone: negative.is_empty(),
            negative_steps: negative,
            iterations_to_threshold: hit.map(|l| 3usize.pow(l.depth) - 1),
            queries_to_threshold: q,
            queries_one_per_iteration: q,
            queries_two_per_iteration: q,
            total_queries: traj.total_queries(),
        });
    }
    let hit = traj.first_reaching(threshold);
    Ok(ComparisonEntry {
        kind: seq.kind,
        iterations: seq.len(),
        final_probability: traj.final_probability,
        monotone: traj.is_monotone(),
        negative_steps: traj.negative_steps(),
        iterations_to_threshold: hit.map(|s| s.index),
        queries_to_threshold: hit.map(|s| s.cumulative_queries),
        queries_one_per_iteration: hit.map(|s| s.index as u64),
        queries_two_per_iteration: hit.map(|s| 2 * s.index as u64),
        total_queries: traj.total_queries(),
    })
}

fn pi3_depth_for_len(len: usize) -> u32 {
    (0..=PI3_MAX_DEPTH)
        .find(|&d| 3usize.pow(d) > len)
        .unwrap_or(PI3_MAX_DEPTH)
}

impl ComparisonReport {
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<u64>| v.map_or(String::new(), |x| x.to_string());
        let mut out = String::from(
            "kind,iterations,final_probability,monotone,negative_steps,iterations_to_threshold,queries_to_threshold,queries_one_per_iteration,queries_two_per_iteration,total_queries\n",
        );
        for e in &self.entries {
            let neg: Vec<String> = e.negative_steps.iter().map(|i| i.to_string()).collect();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                e.kind,
                e.iterations,
                fmt6(e.final_probability),
                e.monotone,
                neg.join(";"),
                opt(e.iterations_to_threshold.map(|x| x as u64)),
                opt(e.queries_to_threshold),
                opt(e.queries_one_per_iteration),
                opt(e.queries_two_per_iteration),
                e.total_queries
            );
        }
        out
    }
}
