use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{ParameterSequence, ScheduleKind};
use crate::error::{invalid, Result};
use crate::subspace::{initial_angles, iteration_matrix, IterationParams, SubspaceRotation};

/// Deepest supported recursion level; depth 8 already costs 3280 queries.
pub const PI3_MAX_DEPTH: u32 = 8;

/// A single phase rotation in the target/complement plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SubspaceOp {
    /// `D(β)`: phase `e^{-iβ}` on the initial state.
    Diffusion(f64),
    /// `R(γ)`: phase `e^{-iγ}` on the target.
    Oracle(f64),
}

impl SubspaceOp {
    pub fn adjoint(self) -> Self {
        match self {
            SubspaceOp::Diffusion(b) => SubspaceOp::Diffusion(-b),
            SubspaceOp::Oracle(g) => SubspaceOp::Oracle(-g),
        }
    }

    pub fn params(self) -> IterationParams {
        match self {
            SubspaceOp::Diffusion(b) => IterationParams::wrapped(b, 0.0),
            SubspaceOp::Oracle(g) => IterationParams::wrapped(0.0, g),
        }
    }
}

/// The recursive π/3 construction `U_{k+1} = U_k R_s U_k† R_t U_k`, `U_0 = I`,
/// where `R_s` and `R_t` multiply the initial state and the target by
/// `e^{iπ/3}`. `expanded` lists the operations in application order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pi3Program {
    pub depth: u32,
    pub expanded: Vec<SubspaceOp>,
}

pub fn pi3_sequence(depth: u32) -> Result<Pi3Program> {
    if depth > PI3_MAX_DEPTH {
        return Err(invalid(format!(
            "π/3 depth {depth} exceeds maximum {PI3_MAX_DEPTH}"
        )));
    }
    let mut ops: Vec<SubspaceOp> = Vec::new();
    for _ in 0..depth {
        let adj: Vec<SubspaceOp> = ops.iter().rev().map(|o| o.adjoint()).collect();
        let mut next = Vec::with_capacity(3 * ops.len() + 2);
        next.extend_from_slice(&ops);
        next.push(SubspaceOp::Oracle(-PI / 3.0));
        next.extend(adj);
        next.push(SubspaceOp::Diffusion(-PI / 3.0));
        next.extend_from_slice(&ops);
        ops = next;
    }
    Ok(Pi3Program {
        depth,
        expanded: ops,
    })
}

impl Pi3Program {
    pub fn oracle_queries(&self) -> u64 {
        self.expanded
            .iter()
            .filter(|o| matches!(o, SubspaceOp::Oracle(_)))
            .count() as u64
    }

    /// The full 2×2 unitary `U_depth` for initial angle `theta0`.
    pub fn unitary(&self, theta0: f64) -> SubspaceRotation {
        self.expanded
            .iter()
            .fold(SubspaceRotation::identity(), |acc, op| {
                iteration_matrix(op.params(), theta0).compose(&acc)
            })
    }

    pub fn success_probability(&self, n: u32, m: u64) -> Result<f64> {
        let s = initial_angles(n, m)?;
        let theta0 = s.theta();
        Ok(self.unitary(theta0).apply(s.amplitudes())[0].norm_sqr())
    }

    pub fn failure_probability(&self, n: u32, m: u64) -> Result<f64> {
        let s = initial_angles(n, m)?;
        let theta0 = s.theta();
        Ok(self.unitary(theta0).apply(s.amplitudes())[1].norm_sqr())
    }

    /// One `G(β, 0)` or `G(0, γ)` per operation.
    pub fn to_sequence(&self, n: u32, m: u64) -> ParameterSequence {
        let params = self.expanded.iter().map(|o| o.params()).collect();
        ParameterSequence::new(ScheduleKind::Pi3, n, m, params)
    }
}
