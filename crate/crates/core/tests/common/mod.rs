//! Reference computations shared by the integration tests. Everything here is
//! deliberately written from scratch (dense matrices, closed forms) rather than
//! calling into the library's own propagation code.

#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;

pub type Matrix = Vec<Vec<Complex64>>;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn identity(dim: usize) -> Matrix {
    (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| c(if i == j { 1.0 } else { 0.0 }))
                .collect()
        })
        .collect()
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let dim = a.len();
    (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| (0..dim).map(|k| a[i][k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

pub fn matvec(a: &Matrix, v: &[Complex64]) -> Vec<Complex64> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

/// `I + (e^{-iβ} - 1)|s₀⟩⟨s₀|` on `n` qubits.
pub fn dense_diffusion(n: u32, beta: f64) -> Matrix {
    let dim = 1usize << n;
    let k = Complex64::from_polar(1.0, -beta) - 1.0;
    let mut m = identity(dim);
    for row in m.iter_mut() {
        for cell in row.iter_mut() {
            *cell += k / dim as f64;
        }
    }
    m
}

/// Diagonal oracle: `e^{-iγ}` on target indices.
pub fn dense_oracle(n: u32, targets: &[usize], gamma: f64) -> Matrix {
    let mut m = identity(1usize << n);
    for &t in targets {
        m[t][t] = Complex64::from_polar(1.0, -gamma);
    }
    m
}

pub fn dense_iteration(n: u32, targets: &[usize], beta: f64, gamma: f64) -> Matrix {
    matmul(&dense_diffusion(n, beta), &dense_oracle(n, targets, gamma))
}

pub fn uniform(n: u32) -> Vec<Complex64> {
    let dim = 1usize << n;
    vec![c(1.0 / (dim as f64).sqrt()); dim]
}

pub fn target_probability(v: &[Complex64], targets: &[usize]) -> f64 {
    targets.iter().map(|&t| v[t].norm_sqr()).sum()
}

/// Largest `|a_i - e^{iχ} b_i|` for the best global phase `χ`.
pub fn distance_up_to_phase(a: &[Complex64], b: &[Complex64]) -> f64 {
    let overlap: Complex64 = b.iter().zip(a).map(|(y, x)| y.conj() * x).sum();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        c(1.0)
    };
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - phase * y).norm())
        .fold(0.0, f64::max)
}

pub fn chebyshev(degree: f64, x: f64) -> f64 {
    if x.abs() <= 1.0 {
        (degree * x.acos()).cos()
    } else {
        (degree * x.acosh()).cosh()
    }
}

/// Success probability of the length-`l` Chebyshev fixed-point schedule:
/// `1 − δ² T_{2L+1}(T_{1/(2L+1)}(1/δ) √(1−λ²))²`.
pub fn fixed_point_success(l: usize, delta: f64, lambda_sq: f64) -> f64 {
    let d = (2 * l + 1) as f64;
    let x = chebyshev(1.0 / d, 1.0 / delta) * (1.0 - lambda_sq).sqrt();
    1.0 - delta * delta * chebyshev(d, x).powi(2)
}

/// Failure probability of the depth-`m` π/3 recursion: `(1 − λ²)^{3^m}`.
pub fn pi3_failure(m: u32, lambda_sq: f64) -> f64 {
    (1.0 - lambda_sq).powf(3f64.powi(m as i32))
}

pub fn grover_steps(dim: f64) -> usize {
    (PI * dim.sqrt() / 4.0 - 0.5).floor() as usize
}

pub struct GoldenRow {
    pub step: usize,
    pub theta: f64,
    pub phi: f64,
    pub beta: f64,
    pub gamma: f64,
    pub increment: f64,
    pub qaao: bool,
}

pub fn golden_table() -> Vec<GoldenRow> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/fixed_point_table.csv");
    let text = std::fs::read_to_string(path).expect("golden table");
    text.lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            let num = |i: usize| f[i].parse::<f64>().expect("number");
            GoldenRow {
                step: f[0].parse().expect("step"),
                theta: num(1),
                phi: num(2),
                beta: num(3),
                gamma: num(4),
                increment: num(5),
                qaao: f[6] == "O",
            }
        })
        .collect()
}

/// Distance between two angles on the circle.
pub fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}
