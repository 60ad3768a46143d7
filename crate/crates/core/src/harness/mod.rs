//! Experiment driver: parameter sweeps, convergence studies and their
//! CSV output.

mod io;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use io::{
    emit_sweep_csv, emit_trace_csv, load_scenario, save_scenario, scenario_from_json, scenario_to_json, write_sweep_csv,
    write_trace_csv, SWEEP_HEADER, TRACE_HEADER,
};

pub use crate::acs::{ConvergenceTrace, TracePoint};
use crate::acs::{allocate, AcsParams, AdmitAll};
use crate::baselines::{brute_force_optimal, csgc_assignment, random_assignment, AlgorithmKind, PerUserCap};
use crate::error::{Error, Result};
use crate::topology::{build_model, generate_scenario, RewardMode, ScenarioConfig, SpectrumModel};
use crate::utility::{evaluate, is_feasible, Assignment, UtilityKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepVariable {
    Channels,
    Primaries,
    Secondaries,
    Ants,
}

impl SweepVariable {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepVariable::Channels => "channels",
            SweepVariable::Primaries => "primaries",
            SweepVariable::Secondaries => "secondaries",
            SweepVariable::Ants => "ants",
        }
    }

    /// Range swept when none is given.
    pub fn default_values(self) -> Vec<usize> {
        match self {
            SweepVariable::Channels => (2..=12).step_by(2).collect(),
            SweepVariable::Primaries => (2..=20).step_by(2).collect(),
            SweepVariable::Secondaries => (5..=30).step_by(5).collect(),
            SweepVariable::Ants => vec![1, 5, 10, 15, 20],
        }
    }

    fn apply(self, value: usize, cfg: &mut ScenarioConfig, acs: &mut AcsParams) {
        match self {
            SweepVariable::Channels => cfg.channels = value,
            SweepVariable::Primaries => cfg.n_pus = value,
            SweepVariable::Secondaries => cfg.sus_per_nan = value,
            SweepVariable::Ants => acs.n_ants = value,
        }
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "channels" => Ok(SweepVariable::Channels),
            "primaries" => Ok(SweepVariable::Primaries),
            "secondaries" => Ok(SweepVariable::Secondaries),
            "ants" => Ok(SweepVariable::Ants),
            other => Err(Error::Config(format!("unknown sweep variable `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub values: Vec<usize>,
    pub fixed: ScenarioConfig,
    pub algorithms: Vec<AlgorithmKind>,
    pub utilities: Vec<UtilityKind>,
    pub seeds: usize,
    /// Replicate `k` uses scenario seed `base_seed + k`.
    pub base_seed: u64,
    pub acs: AcsParams,
    pub reward: RewardMode,
}

impl SweepSpec {
    pub fn new(variable: SweepVariable, values: Vec<usize>) -> Self {
        SweepSpec {
            variable,
            values,
            fixed: ScenarioConfig::default(),
            algorithms: vec![AlgorithmKind::Acs, AlgorithmKind::Csgc, AlgorithmKind::Random],
            utilities: UtilityKind::ALL.to_vec(),
            seeds: 20,
            base_seed: 1,
            acs: AcsParams::default(),
            reward: RewardMode::Coverage,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::Config("sweep needs at least one value".into()));
        }
        if self.values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("sweep values must be strictly increasing".into()));
        }
        if self.seeds == 0 {
            return Err(Error::Config("seeds must be at least 1".into()));
        }
        if self.algorithms.is_empty() || self.utilities.is_empty() {
            return Err(Error::Config("need at least one algorithm and one utility".into()));
        }
        self.fixed.validate()?;
        self.acs.validate()?;
        for &v in &self.values {
            let (cfg, acs) = self.setup(v);
            cfg.validate()?;
            acs.validate()?;
        }
        Ok(())
    }

    fn setup(&self, value: usize) -> (ScenarioConfig, AcsParams) {
        let mut cfg = self.fixed.clone();
        let mut acs = self.acs.clone();
        self.variable.apply(value, &mut cfg, &mut acs);
        (cfg, acs)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub variable: SweepVariable,
    pub value: usize,
    pub algorithm: AlgorithmKind,
    pub utility: UtilityKind,
    pub mean: f64,
    /// Population standard deviation over seeds.
    pub std: f64,
    pub min: f64,
    pub max: f64,
    pub runtime_ms: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn row(&self, value: usize, algorithm: AlgorithmKind, utility: UtilityKind) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| r.value == value && r.algorithm == algorithm && r.utility == utility)
    }

    /// Seed means for one algorithm and utility, in sweep order.
    pub fn series(&self, algorithm: AlgorithmKind, utility: UtilityKind) -> Vec<(usize, f64)> {
        self.rows
            .iter()
            .filter(|r| r.algorithm == algorithm && r.utility == utility)
            .map(|r| (r.value, r.mean))
            .collect()
    }
}

/// Runs one algorithm. `kind` steers the utility-aware allocators (ACS
/// objective, CSGC scoring, exhaustive search); `seed` only the randomized
/// ones.
pub fn run_algorithm(
    algorithm: AlgorithmKind,
    model: &SpectrumModel,
    nan_of: &[usize],
    acs: &AcsParams,
    kind: UtilityKind,
    seed: u64,
) -> Result<Assignment> {
    let assignment = match algorithm {
        AlgorithmKind::Acs => {
            let params = AcsParams {
                seed,
                objective: kind,
                ..acs.clone()
            };
            allocate(model, nan_of, &params, &AdmitAll)?.assignment
        }
        AlgorithmKind::Csgc => csgc_assignment(model, kind),
        AlgorithmKind::Random => random_assignment(model, seed),
        AlgorithmKind::Exact => brute_force_optimal(model, kind, PerUserCap::Single)?.assignment,
    };
    Ok(assignment)
}

/// Scores of one (value, replicate) cell: per algorithm, utility values in
/// `spec.utilities` order plus runtime per allocator call.
struct Cell {
    scores: Vec<(Vec<f64>, f64)>,
}

fn score(assignment: &Assignment, model: &SpectrumModel, kind: UtilityKind) -> Result<f64> {
    if !is_feasible(assignment, model)? {
        return Err(Error::Infeasible("allocator returned a conflicting assignment".into()));
    }
    evaluate(assignment, model, kind)
}

fn run_cell(spec: &SweepSpec, value: usize, replicate: usize) -> Result<Cell> {
    let (cfg, acs) = spec.setup(value);
    let scenario_seed = spec.base_seed.wrapping_add(replicate as u64);
    let scn = generate_scenario(&cfg, scenario_seed)?;
    let model = build_model(&scn, spec.reward);
    let nan_of = scn.nan_of();
    let algo_seed = acs.seed.wrapping_add(replicate as u64);

    let mut scores = Vec::with_capacity(spec.algorithms.len());
    for &algorithm in &spec.algorithms {
        let per_kind = algorithm != AlgorithmKind::Random;
        let mut values = Vec::with_capacity(spec.utilities.len());
        let mut elapsed_ms = 0.0;
        let mut calls = 0usize;
        let mut shared: Option<Assignment> = None;
        for &kind in &spec.utilities {
            let assignment = match (&shared, per_kind) {
                (Some(a), false) => a.clone(),
                _ => {
                    let start = Instant::now();
                    let a = run_algorithm(algorithm, &model, &nan_of, &acs, kind, algo_seed).map_err(|e| match e {
                        Error::Capacity { space, cap, .. } => Error::Capacity {
                            space,
                            cap,
                            context: format!(" (sweep {}={value})", spec.variable),
                        },
                        other => other,
                    })?;
                    elapsed_ms += start.elapsed().as_secs_f64() * 1e3;
                    calls += 1;
                    if !per_kind {
                        shared = Some(a.clone());
                    }
                    a
                }
            };
            values.push(score(&assignment, &model, kind)?);
        }
        scores.push((values, elapsed_ms / calls as f64));
    }
    Ok(Cell { scores })
}

/// Runs every algorithm on `seeds` paired scenarios per sweep value and
/// aggregates each utility over the replicates.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let jobs: Vec<(usize, usize)> = spec
        .values
        .iter()
        .flat_map(|&v| (0..spec.seeds).map(move |k| (v, k)))
        .collect();
    let cells: Vec<Cell> = jobs
        .par_iter()
        .map(|&(v, k)| run_cell(spec, v, k))
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    for (vi, &value) in spec.values.iter().enumerate() {
        let block = &cells[vi * spec.seeds..(vi + 1) * spec.seeds];
        for (ai, &algorithm) in spec.algorithms.iter().enumerate() {
            let runtime_ms = block.iter().map(|c| c.scores[ai].1).sum::<f64>() / spec.seeds as f64;
            for (ui, &utility) in spec.utilities.iter().enumerate() {
                let samples: Vec<f64> = block.iter().map(|c| c.scores[ai].0[ui]).collect();
                let (mean, std, min, max) = summarize(&samples);
                rows.push(SweepRow {
                    variable: spec.variable,
                    value,
                    algorithm,
                    utility,
                    mean,
                    std,
                    min,
                    max,
                    runtime_ms,
                });
            }
        }
    }
    rows.sort_by_key(|r| (r.value, r.algorithm, r.utility));
    Ok(SweepResult { rows })
}

fn summarize(samples: &[f64]) -> (f64, f64, f64, f64) {
    let n = samples.len() as f64;
    // `+ 0.0` folds any -0.0 into +0.0
    let mean = samples.iter().sum::<f64>() / n + 0.0;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let min = samples.iter().copied().fold(f64::INFINITY, f64::min) + 0.0;
    let max = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 0.0;
    // keep min <= mean <= max despite summation rounding
    (mean.clamp(min, max), var.sqrt(), min, max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeededTrace {
    pub seed: u64,
    pub trace: ConvergenceTrace,
}

/// One ACS trace per replicate. Replicate `k` uses seed `acs.seed + k` both
/// for the scenario and the colony.
pub fn run_convergence(cfg: &ScenarioConfig, acs: &AcsParams, seeds: usize, reward: RewardMode) -> Result<Vec<SeededTrace>> {
    cfg.validate()?;
    acs.validate()?;
    (0..seeds)
        .into_par_iter()
        .map(|k| {
            let seed = acs.seed.wrapping_add(k as u64);
            let scn = generate_scenario(cfg, seed)?;
            let model = build_model(&scn, reward);
            let params = AcsParams { seed, ..acs.clone() };
            let out = allocate(&model, &scn.nan_of(), &params, &AdmitAll)?;
            Ok(SeededTrace { seed, trace: out.trace })
        })
        .collect()
}

pub fn median_converged_at(traces: &[SeededTrace]) -> f64 {
    let mut v: Vec<usize> = traces.iter().map(|t| t.trace.converged_at).collect();
    v.sort_unstable();
    match v.len() {
        0 => 0.0,
        n if n % 2 == 1 => v[n / 2] as f64,
        n => (v[n / 2 - 1] + v[n / 2]) as f64 / 2.0,
    }
}

pub fn mean_final_cost(traces: &[SeededTrace]) -> f64 {
    if traces.is_empty() {
        return 0.0;
    }
    traces.iter().map(|t| t.trace.final_cost()).sum::<f64>() / traces.len() as f64
}
