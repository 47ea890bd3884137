//! Simulation and schedule generation for generalized amplitude amplification
//! `G(β, γ) = D(β) R(γ)`.
//!
//! * [`subspace`]: exact 2×2 dynamics, increments, the QAAO predicate and
//!   optimal parameters.
//! * [`statevector`]: dense `2ⁿ` simulation with measurement sampling.
//! * [`generators`]: parameter schedules.
//! * [`search`]: running schedules on either backend and comparing them.
//! * [`qasm`]: OpenQASM 3 export.
//! * [`cli`]: the `qaao` command-line tool.

pub mod cli;
pub mod error;
pub mod generators;
pub mod qasm;
pub mod search;
pub mod statevector;
pub mod subspace;

pub use error::{Error, Result};
pub use generators::{ParameterSequence, ScheduleKind};
pub use statevector::{OracleSpec, StateVector};
pub use subspace::{IterationParams, StateAngles};
