//! Dense `2ⁿ`-amplitude simulation of the iteration circuit.
//!
//! Basis ordering is big-endian: the leftmost character of a bit string is
//! qubit 0 and the most significant bit of the amplitude index.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::subspace::{IterationParams, StateAngles};

/// Largest register the simulator accepts.
pub const MAX_QUBITS: u32 = 24;

/// Rounding residue of `FRAC_1_SQRT_2`: the f64 constant is slightly large,
/// which would inflate the norm by ~1.4e-16 per Hadamard.
const FRAC_1_SQRT_2_LO: f64 = -4.833646656726457e-17;

/// `z / √2`, correctly rounded per component via a fused multiply-add.
fn scale_inv_sqrt2(z: Complex64) -> Complex64 {
    let f = |x: f64| x.mul_add(FRAC_1_SQRT_2, x * FRAC_1_SQRT_2_LO);
    Complex64::new(f(z.re), f(z.im))
}

/// Measurement histogram keyed by bit string.
pub type Histogram = BTreeMap<String, u64>;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSpec {
    n: u32,
    targets: BTreeSet<u64>,
}

impl OracleSpec {
    pub fn new<S: AsRef<str>>(n: u32, targets: &[S]) -> Result<Self> {
        if !(1..=62).contains(&n) {
            return Err(invalid(format!("qubit count {n} outside 1..=62")));
        }
        let mut set = BTreeSet::new();
        for t in targets {
            set.insert(parse_bitstring(t.as_ref(), n)?);
        }
        Self::from_indices(n, set)
    }

    pub fn from_indices(n: u32, targets: BTreeSet<u64>) -> Result<Self> {
        let dim = 1u64 << n;
        if targets.is_empty() || targets.len() as u64 >= dim {
            return Err(invalid(format!(
                "target set size {} must satisfy 1 <= m < {dim}",
                targets.len()
            )));
        }
        if let Some(&bad) = targets.iter().find(|&&t| t >= dim) {
            return Err(invalid(format!(
                "target index {bad} out of range for {n} qubits"
            )));
        }
        Ok(Self { n, targets })
    }

    /// The first `m` basis states `0, 1, …, m-1`.
    pub fn first_m(n: u32, m: u64) -> Result<Self> {
        Self::from_indices(n, (0..m).collect())
    }

    pub fn single(n: u32, target: &str) -> Result<Self> {
        Self::new(n, &[target])
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u64 {
        self.targets.len() as u64
    }

    pub fn targets(&self) -> impl Iterator<Item = u64> + '_ {
        self.targets.iter().copied()
    }

    pub fn contains(&self, index: u64) -> bool {
        self.targets.contains(&index)
    }

    pub fn target_strings(&self) -> Vec<String> {
        self.targets.iter().map(|&t| bitstring(t, self.n)).collect()
    }
}

pub fn parse_bitstring(s: &str, n: u32) -> Result<u64> {
    if s.len() != n as usize || !s.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(invalid(format!("'{s}' is not a {n}-bit string")));
    }
    Ok(u64::from_str_radix(s, 2).expect("validated binary digits"))
}

pub fn bitstring(index: u64, n: u32) -> String {
    format!("{:0width$b}", index, width = n as usize)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: u32,
    amps: Vec<Complex64>,
}

impl StateVector {
    fn check_size(n: u32) -> Result<()> {
        if !(1..=MAX_QUBITS).contains(&n) {
            return Err(invalid(format!(
                "state vector size {n} outside 1..={MAX_QUBITS} qubits"
            )));
        }
        Ok(())
    }

    /// `H^{⊗n}|0⟩`.
    pub fn uniform(n: u32) -> Result<Self> {
        Self::check_size(n)?;
        let dim = 1usize << n;
        let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Ok(Self {
            n,
            amps: vec![a; dim],
        })
    }

    /// `|0…0⟩`.
    pub fn zero(n: u32) -> Result<Self> {
        Self::basis(n, 0)
    }

    pub fn basis(n: u32, index: u64) -> Result<Self> {
        Self::check_size(n)?;
        let dim = 1usize << n;
        if index as usize >= dim {
            return Err(invalid(format!("basis index {index} out of range")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index as usize] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    /// Takes ownership of raw amplitudes; they must have length `2ⁿ` and unit norm.
    pub fn from_amplitudes(n: u32, amps: Vec<Complex64>) -> Result<Self> {
        Self::check_size(n)?;
        if amps.len() != 1usize << n {
            return Err(invalid("amplitude count must equal 2^n"));
        }
        let sv = Self { n, amps };
        if (sv.norm_sqr() - 1.0).abs() > 1e-10 {
            return Err(invalid("amplitudes are not normalized"));
        }
        Ok(sv)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Multiplies every amplitude by a unit scalar.
    pub fn scale_phase(&mut self, phase: Complex64) {
        for a in &mut self.amps {
            *a *= phase;
        }
    }

    fn check_oracle(&self, oracle: &OracleSpec) -> Result<()> {
        if oracle.n != self.n {
            return Err(Error::DimensionMismatch {
                state: self.n,
                oracle: oracle.n,
            });
        }
        Ok(())
    }

    /// `R(γ)`: target amplitudes pick up `e^{-iγ}`.
    pub fn apply_oracle_phase(&mut self, oracle: &OracleSpec, gamma: f64) -> Result<()> {
        self.check_oracle(oracle)?;
        let phase = Complex64::from_polar(1.0, -gamma);
        for t in oracle.targets() {
            self.amps[t as usize] *= phase;
        }
        Ok(())
    }

    /// `D(β) = 1 − (1 − e^{-iβ})|s₀⟩⟨s₀|` as a rank-one update through the mean amplitude.
    pub fn apply_diffusion(&mut self, beta: f64) {
        let dim = self.amps.len() as f64;
        let sum: Complex64 = self.amps.iter().sum();
        let shift = (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -beta)) * sum / dim;
        for a in &mut self.amps {
            *a -= shift;
        }
    }

    /// `G(β, γ) = D(β) R(γ)`: oracle first, then diffusion.
    pub fn apply_iteration(&mut self, p: IterationParams, oracle: &OracleSpec) -> Result<()> {
        self.apply_oracle_phase(oracle, p.gamma())?;
        self.apply_diffusion(p.beta());
        Ok(())
    }

    pub fn target_probability(&self, oracle: &OracleSpec) -> Result<f64> {
        self.check_oracle(oracle)?;
        Ok(oracle
            .targets()
            .map(|t| self.amps[t as usize].norm_sqr())
            .sum::<f64>()
            .clamp(0.0, 1.0))
    }

    /// Components along `|t⟩` (uniform over targets) and `|t⊥⟩` (uniform over
    /// the rest), plus the squared norm left outside that plane.
    pub fn project_to_angles(&self, oracle: &OracleSpec) -> Result<(StateAngles, f64)> {
        self.check_oracle(oracle)?;
        let dim = self.amps.len();
        let m = oracle.m() as usize;
        let mut sum_t = Complex64::new(0.0, 0.0);
        let mut sum_c = Complex64::new(0.0, 0.0);
        for (i, a) in self.amps.iter().enumerate() {
            if oracle.contains(i as u64) {
                sum_t += a;
            } else {
                sum_c += a;
            }
        }
        let mean_t = sum_t / m as f64;
        let mean_c = sum_c / (dim - m) as f64;
        let leakage = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let mean = if oracle.contains(i as u64) {
                    mean_t
                } else {
                    mean_c
                };
                (a - mean).norm_sqr()
            })
            .sum();
        let at = sum_t / (m as f64).sqrt();
        let ac = sum_c / ((dim - m) as f64).sqrt();
        Ok((StateAngles::from_amplitudes(at, ac), leakage))
    }

    /// Multinomial sample of `shots` computational-basis measurements.
    pub fn sample_measurements(&self, shots: u64, seed: u64) -> Result<Histogram> {
        if shots == 0 {
            return Err(invalid("shot count must be at least 1"));
        }
        let weights: Vec<f64> = self.amps.iter().map(|a| a.norm_sqr()).collect();
        let dist = WeightedIndex::new(&weights).map_err(|e| invalid(e.to_string()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut counts = vec![0u64; weights.len()];
        for _ in 0..shots {
            counts[dist.sample(&mut rng)] += 1;
        }
        Ok(counts
            .into_iter()
            .enumerate()
            .filter(|&(_, c)| c > 0)
            .map(|(i, c)| (bitstring(i as u64, self.n), c))
            .collect())
    }

    fn check_qubit(&self, q: usize) -> Result<usize> {
        if q >= self.n as usize {
            return Err(invalid(format!(
                "qubit {q} out of range for {} qubits",
                self.n
            )));
        }
        Ok(self.n as usize - 1 - q)
    }

    /// Hadamard on qubit `q`.
    pub fn apply_h(&mut self, q: usize) -> Result<()> {
        let bit = 1usize << self.check_qubit(q)?;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a, b) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = scale_inv_sqrt2(a + b);
                self.amps[i | bit] = scale_inv_sqrt2(a - b);
            }
        }
        Ok(())
    }

    pub fn apply_x(&mut self, q: usize) -> Result<()> {
        let bit = 1usize << self.check_qubit(q)?;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                self.amps.swap(i, i | bit);
            }
        }
        Ok(())
    }

    /// Multi-controlled `P(α) = diag(1, e^{iα})`; symmetric in its qubits, so
    /// the `|1…1⟩` component of `qubits` picks up `e^{iα}`.
    pub fn apply_controlled_phase(&mut self, qubits: &[usize], alpha: f64) -> Result<()> {
        if qubits.is_empty() {
            return Err(invalid("phase gate needs at least one qubit"));
        }
        let mut mask = 0usize;
        for &q in qubits {
            let bit = 1usize << self.check_qubit(q)?;
            if mask & bit != 0 {
                return Err(invalid(format!("qubit {q} repeated in phase gate")));
            }
            mask |= bit;
        }
        let phase = Complex64::from_polar(1.0, alpha);
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & mask == mask {
                *a *= phase;
            }
        }
        Ok(())
    }

    /// `|⟨other|self⟩|` deviation: `max_i |a_i − e^{iχ} b_i|` after removing the
    /// best global phase `χ`.
    pub fn distance_up_to_phase(&self, other: &StateVector) -> f64 {
        assert_eq!(self.amps.len(), other.amps.len(), "dimension mismatch");
        let overlap: Complex64 = other
            .amps
            .iter()
            .zip(&self.amps)
            .map(|(b, a)| b.conj() * a)
            .sum();
        let phase = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - phase * b).norm())
            .fold(0.0, f64::max)
    }
}
