//! The `qaao` command-line tool.
//!
//! Every subcommand accepts the same settings block. Settings can also come
//! from a JSON object passed with `--config`; flags given on the command line
//! win. Relative `--out` paths are resolved against `$QAAO_OUT_DIR` when set.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::generators::{
    fixed_point_sequence, generate_qaao_sequence, noisy_optimal_sequence, optimal_sequence,
    pi3_sequence, ParameterSequence, ScheduleKind,
};
use crate::qasm::{export_qasm, parse_qasm};
use crate::search::{
    compare, fixed_point_table, fmt6, grover_baseline, pi3_levels, run_analytic, run_search,
    table_csv, Backend, TableRow, Trajectory,
};
use crate::statevector::{OracleSpec, StateVector};
use crate::subspace::{
    coefficients, increment, initial_theta, is_qaao, optimal_grover_steps, IterationParams,
    StateAngles, DEFAULT_C,
};

/// Environment variable naming the directory for relative output paths.
pub const OUT_DIR_ENV: &str = "QAAO_OUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "qaao",
    version,
    about = "Generalized amplitude amplification simulator"
)]
pub struct Cli {
    /// JSON file supplying default settings.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Increment, coefficients and QAAO verdict of one iteration at one state.
    #[command(allow_negative_numbers = true)]
    Increment {
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        gamma: f64,
        /// Defaults to the initial angle θ₀.
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        phi: Option<f64>,
        #[command(flatten)]
        settings: Settings,
    },
    /// Fixed-point schedule table.
    Table {
        #[arg(value_enum, default_value_t = TableKind::Appendix)]
        which: TableKind,
        #[command(flatten)]
        settings: Settings,
    },
    /// Data series for plots.
    Figure {
        #[arg(value_enum)]
        id: FigureId,
        #[command(flatten)]
        settings: Settings,
    },
    /// Run a schedule and record its trajectory.
    Search {
        #[command(flatten)]
        settings: Settings,
    },
    /// Write a schedule as an OpenQASM 3 program.
    ExportQasm {
        #[command(flatten)]
        settings: Settings,
    },
    /// Generate a schedule and print it.
    Schedule {
        #[command(flatten)]
        settings: Settings,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableKind {
    /// Only the first block of decreasing steps.
    Main,
    Appendix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureId {
    Fig1b,
    Fig3,
    Fig4,
    Region,
    Fig7,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Settings shared by all subcommands; each field may also come from the
/// config file under the same name.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    #[arg(long)]
    pub n: Option<u32>,
    /// Number of targets when no explicit target is given.
    #[arg(long)]
    pub m: Option<u64>,
    /// Comma-separated target bit strings (leftmost character is qubit 0).
    #[arg(long)]
    pub target: Option<String>,
    #[arg(long)]
    pub kind: Option<ScheduleKind>,
    /// Schedule JSON file; overrides `--kind`.
    #[arg(long)]
    pub sequence: Option<PathBuf>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    #[arg(long = "L")]
    #[serde(rename = "L")]
    pub iterations: Option<usize>,
    /// π/3 recursion depth.
    #[arg(long)]
    pub depth: Option<u32>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long)]
    pub backend: Option<Backend>,
    /// Grid points per axis for the region figure.
    #[arg(long)]
    pub resolution: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Replay the exported program on the simulator.
    #[arg(long)]
    #[serde(default)]
    pub verify: bool,
}

macro_rules! prefer {
    ($a:expr, $b:expr, $($f:ident),*) => {
        Settings { $($f: $a.$f.or($b.$f),)* verify: $a.verify || $b.verify }
    };
}

impl Settings {
    /// `self` over `base`, field by field.
    pub fn over(self, base: Settings) -> Settings {
        prefer!(
            self, base, n, m, target, kind, sequence, c, delta, iterations, depth, threshold, seed,
            shots, backend, resolution, format, out
        )
    }

    fn n(&self) -> u32 {
        self.n.unwrap_or(8)
    }

    fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    fn format(&self) -> Format {
        self.format.unwrap_or(Format::Csv)
    }

    fn c(&self) -> f64 {
        self.c.unwrap_or(DEFAULT_C)
    }

    fn oracle(&self) -> Result<OracleSpec> {
        let n = self.n();
        match &self.target {
            Some(t) => {
                let targets: Vec<&str> = t.split(',').map(str::trim).collect();
                OracleSpec::new(n, &targets)
            }
            None => OracleSpec::first_m(n, self.m.unwrap_or(1)),
        }
    }

    fn target_count(&self) -> Result<u64> {
        match &self.target {
            Some(_) => Ok(self.oracle()?.m()),
            None => Ok(self.m.unwrap_or(1)),
        }
    }
}

pub fn load_config(path: &Path) -> Result<Settings> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from<I, T>(args: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| invalid(e.to_string()))?;
    run(cli)
}

pub fn run(cli: Cli) -> Result<()> {
    let base = match &cli.config {
        Some(p) => load_config(p)?,
        None => Settings::default(),
    };
    match cli.command {
        Command::Increment {
            beta,
            gamma,
            theta,
            phi,
            settings,
        } => {
            let s = settings.over(base);
            let text = cmd_increment(&s, beta, gamma, theta, phi)?;
            emit(&s, &text)
        }
        Command::Table { which, settings } => {
            let s = settings.over(base);
            emit(&s, &cmd_table(&s, which)?)
        }
        Command::Figure { id, settings } => {
            let s = settings.over(base);
            emit(&s, &cmd_figure(&s, id)?)
        }
        Command::Search { settings } => {
            let s = settings.over(base);
            emit(&s, &cmd_search(&s)?)
        }
        Command::ExportQasm { settings } => {
            let s = settings.over(base);
            let (text, deviation) = cmd_export_qasm(&s)?;
            emit(&s, &text)?;
            if let Some(d) = deviation {
                eprintln!("verify: max deviation {d:e}");
            }
            Ok(())
        }
        Command::Schedule { settings } => {
            let s = settings.over(base);
            let seq = build_sequence(&s)?;
            let text = match s.format() {
                Format::Json => seq.to_json()? + "\n",
                Format::Csv => {
                    let mut out = String::from("index,beta,gamma\n");
                    for (i, p) in seq.params.iter().enumerate() {
                        let _ = writeln!(out, "{},{},{}", i + 1, fmt6(p.beta()), fmt6(p.gamma()));
                    }
                    out
                }
            };
            emit(&s, &text)
        }
    }
}

/// Resolves `--out` against `$QAAO_OUT_DIR` for relative paths.
pub fn output_path(out: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if out.is_relative() => Path::new(&dir).join(out),
        _ => out.to_path_buf(),
    }
}

fn emit(s: &Settings, text: &str) -> Result<()> {
    match &s.out {
        Some(out) => {
            let path = output_path(out);
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::write(path, text)?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

pub fn cmd_increment(
    s: &Settings,
    beta: f64,
    gamma: f64,
    theta: Option<f64>,
    phi: Option<f64>,
) -> Result<String> {
    let n = s.n();
    let m = s.target_count()?;
    let theta0 = initial_theta(n, m)?;
    let state = StateAngles::new(theta.unwrap_or(theta0), phi.unwrap_or(0.0))?;
    let p = IterationParams::new(beta, gamma)?;
    let delta = increment(p, state, theta0)?;
    let co = coefficients(p, state, theta0);
    let verdict = is_qaao(p, state, theta0, 1u64 << n, s.c())?;
    Ok(match s.format() {
        Format::Csv => format!(
            "increment,a,b,c,qaao\n{},{},{},{},{}\n",
            fmt6(delta),
            fmt6(co.a),
            fmt6(co.b),
            fmt6(co.c_coef),
            if verdict { "O" } else { "X" }
        ),
        Format::Json => {
            let v = serde_json::json!({
                "increment": delta,
                "a": co.a,
                "b": co.b,
                "c": co.c_coef,
                "qaao": verdict,
            });
            serde_json::to_string_pretty(&v)? + "\n"
        }
    })
}

pub fn cmd_table(s: &Settings, which: TableKind) -> Result<String> {
    let rows = fixed_point_table(s.n(), s.iterations.unwrap_or(21), s.delta.unwrap_or(0.316))?;
    let rows: Vec<TableRow> = match which {
        TableKind::Appendix => rows,
        TableKind::Main => {
            let start = rows.iter().position(|r| r.increment < 0.0);
            match start {
                Some(i) => rows[i..]
                    .iter()
                    .take_while(|r| r.increment < 0.0)
                    .cloned()
                    .collect(),
                None => Vec::new(),
            }
        }
    };
    Ok(match s.format() {
        Format::Csv => table_csv(&rows),
        Format::Json => serde_json::to_string_pretty(&rows)? + "\n",
    })
}

/// Builds the schedule named by `--sequence` or `--kind`.
pub fn build_sequence(s: &Settings) -> Result<ParameterSequence> {
    if let Some(path) = &s.sequence {
        let seq = ParameterSequence::from_json(&std::fs::read_to_string(path)?)?;
        if s.n.is_some_and(|n| n != seq.n) {
            return Err(invalid(format!(
                "--n {} disagrees with the schedule file ({} qubits)",
                s.n(),
                seq.n
            )));
        }
        return Ok(seq);
    }
    let kind = s
        .kind
        .ok_or_else(|| invalid("a schedule needs --kind or --sequence"))?;
    let (n, m) = (s.n(), s.target_count()?);
    match kind {
        ScheduleKind::RandomQaao => {
            generate_qaao_sequence(n, m, s.c(), s.seed(), s.threshold.unwrap_or(1.0))
        }
        ScheduleKind::Optimal => optimal_sequence(n, m),
        ScheduleKind::NoisyOptimal => {
            noisy_optimal_sequence(n, m, s.delta.unwrap_or(0.05 * PI), s.seed())
        }
        ScheduleKind::FixedPoint => {
            fixed_point_sequence(n, m, s.iterations.unwrap_or(21), s.delta.unwrap_or(0.316))
        }
        ScheduleKind::Pi3 => Ok(pi3_sequence(s.depth.unwrap_or(5))?.to_sequence(n, m)),
    }
}

pub fn cmd_search(s: &Settings) -> Result<String> {
    let seq = build_sequence(s)?;
    let oracle = s.oracle()?;
    let traj = run_search(&seq, &oracle, s.backend.unwrap_or(Backend::Analytic))?;
    let mut out = match s.format() {
        Format::Csv => traj.to_csv(),
        Format::Json => traj.to_json()? + "\n",
    };
    if let Some(shots) = s.shots.filter(|&k| k > 0) {
        let mut sv = StateVector::uniform(seq.n)?;
        for p in &seq.params {
            sv.apply_iteration(*p, &oracle)?;
        }
        let hist = sv.sample_measurements(shots, s.seed())?;
        out.push('\n');
        out.push_str(&serde_json::to_string_pretty(&hist)?);
        out.push('\n');
    }
    Ok(out)
}

/// Returns the program text and, with `--verify`, the largest amplitude
/// deviation between replaying it and simulating the schedule directly.
pub fn cmd_export_qasm(s: &Settings) -> Result<(String, Option<f64>)> {
    let seq = build_sequence(s)?;
    let oracle = s.oracle()?;
    let text = export_qasm(&seq, &oracle)?;
    if !s.verify {
        return Ok((text, None));
    }
    let replayed = parse_qasm(&text)?.simulate()?;
    let mut direct = StateVector::uniform(seq.n)?;
    for p in &seq.params {
        direct.apply_iteration(*p, &oracle)?;
    }
    let d = replayed.distance_up_to_phase(&direct);
    if d > 1e-9 {
        return Err(invalid(format!(
            "exported program deviates from direct simulation by {d:e}"
        )));
    }
    Ok((text, Some(d)))
}

pub fn cmd_figure(s: &Settings, id: FigureId) -> Result<String> {
    match id {
        FigureId::Fig1b => {
            let n = s.n();
            let m = s.target_count()?;
            let k = optimal_grover_steps(n, m)?.max(1);
            series_output(s, &[("grover", grover_baseline(n, m, k)?)])
        }
        FigureId::Fig3 => {
            let n = s.n();
            let m = s.target_count()?;
            let runs = [0.05, 0.2, 0.3]
                .into_iter()
                .map(|f| {
                    let seq = noisy_optimal_sequence(n, m, f * PI, s.seed())?;
                    Ok((delta_label(f), run_analytic(&seq, m)?))
                })
                .collect::<Result<Vec<_>>>()?;
            let refs: Vec<(&str, Trajectory)> =
                runs.iter().map(|(l, t)| (l.as_str(), t.clone())).collect();
            series_output(s, &refs)
        }
        FigureId::Fig7 => {
            let n = s.n();
            let seq =
                fixed_point_sequence(n, 1, s.iterations.unwrap_or(21), s.delta.unwrap_or(0.316))?;
            series_output(s, &[("fixed-point", run_analytic(&seq, 1)?)])
        }
        FigureId::Fig4 => figure4(s),
        FigureId::Region => region(s),
    }
}

fn delta_label(fraction_of_pi: f64) -> String {
    format!("delta={fraction_of_pi}pi")
}

fn series_output(s: &Settings, runs: &[(&str, Trajectory)]) -> Result<String> {
    match s.format() {
        Format::Csv => {
            let mut out = String::from("series,step,queries,probability\n");
            for (label, t) in runs {
                let _ = writeln!(out, "{label},0,0,{}", fmt6(t.initial_probability));
                for st in &t.steps {
                    let _ = writeln!(
                        out,
                        "{label},{},{},{}",
                        st.index,
                        st.cumulative_queries,
                        fmt6(st.probability_after)
                    );
                }
            }
            Ok(out)
        }
        Format::Json => {
            let map: serde_json::Map<String, serde_json::Value> = runs
                .iter()
                .map(|(l, t)| Ok((l.to_string(), serde_json::to_value(t)?)))
                .collect::<Result<_>>()?;
            Ok(serde_json::to_string_pretty(&map)? + "\n")
        }
    }
}

fn figure4(s: &Settings) -> Result<String> {
    let n = s.n();
    let m = s.target_count()?;
    let threshold = s.threshold.unwrap_or(0.9);
    let fixed = fixed_point_sequence(n, m, s.iterations.unwrap_or(21), s.delta.unwrap_or(0.316))?;
    let depth = s.depth.unwrap_or(7);
    let pi3 = pi3_sequence(depth)?.to_sequence(n, m);
    let random = generate_qaao_sequence(n, m, s.c(), s.seed(), 1.0)?;
    let report = compare(&[fixed.clone(), pi3, random.clone()], m, threshold)?;
    let levels = pi3_levels(n, m, depth)?;
    let fixed_traj = run_analytic(&fixed, m)?;
    let random_traj = run_analytic(&random, m)?;

    match s.format() {
        Format::Csv => {
            let mut out = String::from("series,step,queries,probability\n");
            for (label, t) in [("fixed-point", &fixed_traj), ("random-qaao", &random_traj)] {
                let _ = writeln!(out, "{label},0,0,{}", fmt6(t.initial_probability));
                for st in &t.steps {
                    let _ = writeln!(
                        out,
                        "{label},{},{},{}",
                        st.index,
                        st.cumulative_queries,
                        fmt6(st.probability_after)
                    );
                }
            }
            for l in &levels {
                let _ = writeln!(out, "pi3,{},{},{}", l.depth, l.queries, fmt6(l.success));
            }
            out.push('\n');
            out.push_str(&report.to_csv());
            Ok(out)
        }
        Format::Json => {
            let v = serde_json::json!({
                "fixed_point": fixed_traj,
                "random_qaao": random_traj,
                "pi3_levels": levels,
                "comparison": report,
            });
            Ok(serde_json::to_string_pretty(&v)? + "\n")
        }
    }
}

/// Sign of `B` on a cell-centred grid over `[-π, π]²` at the initial state.
fn region(s: &Settings) -> Result<String> {
    let n = s.n();
    let m = s.target_count()?;
    let res = s.resolution.unwrap_or(512);
    if res == 0 {
        return Err(invalid("resolution must be at least 1"));
    }
    let theta0 = initial_theta(n, m)?;
    let state = StateAngles::new(theta0, 0.0)?;
    let step = 2.0 * PI / res as f64;
    let centre = |i: usize| -PI + (i as f64 + 0.5) * step;
    let mut cells = Vec::with_capacity(res * res);
    for i in 0..res {
        for j in 0..res {
            let p = IterationParams::new(centre(i), centre(j))?;
            cells.push((p, coefficients(p, state, theta0).b));
        }
    }
    let positive = cells.iter().filter(|(_, b)| *b > 0.0).count();
    let fraction = positive as f64 / cells.len() as f64;
    Ok(match s.format() {
        Format::Csv => {
            let mut out = String::from("beta,gamma,b,positive\n");
            for (p, b) in &cells {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    fmt6(p.beta()),
                    fmt6(p.gamma()),
                    fmt6(*b),
                    u8::from(*b > 0.0)
                );
            }
            out
        }
        Format::Json => {
            let rows: Vec<[f64; 3]> = cells
                .iter()
                .map(|(p, b)| [p.beta(), p.gamma(), *b])
                .collect();
            let v = serde_json::json!({
                "n": n,
                "resolution": res,
                "positive_fraction": fraction,
                "cells": rows,
            });
            serde_json::to_string_pretty(&v)? + "\n"
        }
    })
}
