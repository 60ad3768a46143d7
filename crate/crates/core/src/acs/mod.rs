//! Hierarchical ant colony system allocator.
//!
//! Every iteration releases, for each channel in turn, a colony of ants from
//! the spectrum broker. An ant carrying channel `m` first picks a NAN from
//! the aggregated HGW scores, reinforces every HGW of that NAN, then picks
//! one HGW inside it and reinforces that one again. Each ant visits a given
//! HGW at most once per iteration. Pheromone evaporates after every
//! iteration, and the final assignment takes each HGW's best channel under
//! the iteration-averaged pheromone, repaired greedily into a conflict-free
//! assignment.

mod pheromone;
mod select;
mod trace;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use pheromone::{deposit_amount, global_evaporation, local_update, semi_local_update, PheromoneTensor};
pub use select::{select, select_with};
pub use trace::{ConvergenceTrace, TracePoint, CONFIRMATION_WINDOW};

use crate::error::{Error, Result};
use crate::topology::SpectrumModel;
use crate::utility::{evaluate, Assignment, UtilityKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcsParams {
    pub n_ants: usize,
    pub iterations: usize,
    /// Evaporation coefficient; pheromone is multiplied by it each iteration.
    pub rho: f64,
    /// Exploitation threshold for NAN selection.
    pub g_cap: f64,
    /// Exploitation threshold for HGW selection.
    pub g_prime: f64,
    /// Score interference as `1 + degree` rather than the bare degree, which
    /// would give conflict-free users zero selection mass.
    pub interference_smoothing: bool,
    /// Deposit `(b / b_max)^(M / A_j)` instead of the raw `b^(M / A_j)`.
    pub normalize_deposit: bool,
    /// Utility the per-iteration selections are scored with.
    pub objective: UtilityKind,
    /// Return the best-scoring per-iteration selection rather than the one
    /// taken after the last iteration.
    pub keep_best: bool,
    pub seed: u64,
}

impl Default for AcsParams {
    fn default() -> Self {
        AcsParams {
            n_ants: 15,
            iterations: 100,
            rho: 0.9,
            g_cap: 0.9,
            g_prime: 0.9,
            interference_smoothing: true,
            normalize_deposit: true,
            objective: UtilityKind::Msr,
            keep_best: true,
            seed: 0,
        }
    }
}

impl AcsParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_ants == 0 {
            return Err(Error::Config("n_ants must be at least 1".into()));
        }
        if self.iterations == 0 {
            return Err(Error::Config("iterations must be at least 1".into()));
        }
        for (name, v) in [("rho", self.rho), ("g_cap", self.g_cap), ("g_prime", self.g_prime)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Config(format!("{name} must lie strictly inside (0, 1), got {v}")));
            }
        }
        Ok(())
    }
}

/// Partition of users into NANs. HGW `j` of NAN `i` is the `j`-th user (by
/// ascending id) whose NAN is `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NanGroups {
    members: Vec<Vec<usize>>,
}

impl NanGroups {
    pub fn new(nan_of: &[usize]) -> Result<Self> {
        let n_nans = nan_of.iter().map(|&i| i + 1).max().unwrap_or(0);
        let mut members = vec![Vec::new(); n_nans];
        for (user, &nan) in nan_of.iter().enumerate() {
            members[nan].push(user);
        }
        Ok(NanGroups { members })
    }

    pub fn n_nans(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self, nan: usize) -> &[usize] {
        &self.members[nan]
    }

    pub fn user(&self, nan: usize, hgw: usize) -> usize {
        self.members[nan][hgw]
    }

    pub fn n_users(&self) -> usize {
        self.members.iter().map(Vec::len).sum()
    }
}

/// Admission status of HGW `hgw` in NAN `nan` for channel `m`; a blocked
/// HGW can neither attract nor receive an ant.
pub trait AdmissionPolicy {
    fn admits(&self, nan: usize, hgw: usize, m: usize) -> bool;
}

/// Admits everyone.
#[derive(Debug, Clone, Copy, Default)]
pub struct AdmitAll;

impl AdmissionPolicy for AdmitAll {
    fn admits(&self, _nan: usize, _hgw: usize, _m: usize) -> bool {
        true
    }
}

impl<F> AdmissionPolicy for F
where
    F: Fn(usize, usize, usize) -> bool,
{
    fn admits(&self, nan: usize, hgw: usize, m: usize) -> bool {
        self(nan, hgw, m)
    }
}

/// Walk memory of one ant within an iteration.
#[derive(Debug, Clone)]
pub struct AntState {
    visited: Vec<bool>,
    path: Vec<(usize, usize)>,
    pub carried_channel: usize,
}

impl AntState {
    pub fn new(users: usize) -> Self {
        AntState {
            visited: vec![false; users],
            path: Vec::new(),
            carried_channel: 0,
        }
    }

    pub fn has_visited(&self, user: usize) -> bool {
        self.visited[user]
    }

    /// (NAN, HGW) pairs in the order they were selected.
    pub fn path(&self) -> &[(usize, usize)] {
        &self.path
    }

    fn visit(&mut self, nan: usize, hgw: usize, user: usize) {
        debug_assert!(!self.visited[user], "ant revisited ({nan}, {hgw})");
        self.visited[user] = true;
        self.path.push((nan, hgw));
    }
}

/// Desirability of HGW `j` in NAN `i` for channel `m`: pheromone times
/// normalized reward, scaled by the user's channel count and its
/// interference degree on `m`.
pub fn hgw_score(nan: usize, j: usize, m: usize, t: &PheromoneTensor, model: &SpectrumModel, groups: &NanGroups, params: &AcsParams) -> f64 {
    user_score(groups.user(nan, j), groups.members(nan).len(), m, t, model, params)
}

fn user_score(user: usize, nan_size: usize, m: usize, t: &PheromoneTensor, model: &SpectrumModel, params: &AcsParams) -> f64 {
    if !model.is_available(user, m) || model.b_max() <= 0.0 {
        return 0.0;
    }
    let degree = model.neighbors(user, m).len() as f64;
    let interference = if params.interference_smoothing { 1.0 + degree } else { degree };
    let denom = model.n_channels() as f64 * nan_size as f64 * model.b_max();
    t.get(user, m) * model.reward(user, m) / denom * model.available_count(user) as f64 * interference
}

/// Admitted, not-yet-visited HGW scores of one NAN for channel `m`.
#[allow(clippy::too_many_arguments)]
fn nan_scores(
    nan: usize,
    m: usize,
    t: &PheromoneTensor,
    model: &SpectrumModel,
    groups: &NanGroups,
    policy: &dyn AdmissionPolicy,
    params: &AcsParams,
    visited: Option<&AntState>,
) -> Vec<f64> {
    let members = groups.members(nan);
    members
        .iter()
        .enumerate()
        .map(|(j, &user)| {
            let blocked = visited.is_some_and(|a| a.has_visited(user)) || !policy.admits(nan, j, m);
            if blocked {
                0.0
            } else {
                user_score(user, members.len(), m, t, model, params)
            }
        })
        .collect()
}

fn normalize(mass: Vec<f64>) -> Vec<f64> {
    let total: f64 = mass.iter().sum();
    if total > 0.0 {
        mass.into_iter().map(|x| x / total).collect()
    } else {
        vec![0.0; mass.len()]
    }
}

/// NAN selection distribution for channel `m`. HGWs already visited by
/// `ant` are excluded; the result is all-zero when nothing is eligible.
pub fn nan_probabilities(
    m: usize,
    t: &PheromoneTensor,
    model: &SpectrumModel,
    groups: &NanGroups,
    policy: &dyn AdmissionPolicy,
    params: &AcsParams,
    ant: Option<&AntState>,
) -> Vec<f64> {
    let mass = (0..groups.n_nans())
        .map(|i| nan_scores(i, m, t, model, groups, policy, params, ant).iter().sum())
        .collect();
    normalize(mass)
}

/// Turns mean pheromone levels into a conflict-free assignment.
///
/// HGWs are served in descending order of their best mean level over
/// available channels. Each takes its highest-pheromone available channel
/// not already held by an interfering neighbor, or stays starved.
pub fn final_selection(t: &PheromoneTensor, model: &SpectrumModel) -> Assignment {
    select_from_levels(&t.mean(), model)
}

fn select_from_levels(levels: &[f64], model: &SpectrumModel) -> Assignment {
    let users = model.n_users();
    let channels = model.n_channels();
    let level = |n: usize, m: usize| levels[n * channels + m];

    let mut ranked: Vec<(usize, Vec<usize>)> = (0..users)
        .map(|n| {
            let mut options: Vec<usize> = (0..channels).filter(|&m| model.is_available(n, m)).collect();
            options.sort_by(|&a, &b| level(n, b).total_cmp(&level(n, a)).then(a.cmp(&b)));
            (n, options)
        })
        .filter(|(_, options)| !options.is_empty())
        .collect();
    ranked.sort_by(|(a, oa), (b, ob)| level(*b, ob[0]).total_cmp(&level(*a, oa[0])).then(a.cmp(b)));

    let mut held: Vec<Option<usize>> = vec![None; users];
    for (n, options) in ranked {
        held[n] = options
            .into_iter()
            .find(|&m| model.neighbors(n, m).iter().all(|&k| held[k] != Some(m)));
    }
    Assignment::from_channels(channels, &held)
}

#[derive(Debug, Clone)]
pub struct AcsOutcome {
    pub assignment: Assignment,
    pub trace: ConvergenceTrace,
    pub pheromone: PheromoneTensor,
}

/// Runs the colony for `params.iterations` iterations.
///
/// After every iteration the running-mean pheromone is turned into an
/// assignment by [`final_selection`] and scored with `params.objective`;
/// these scores form the trace. The returned assignment is the best of
/// those selections (earliest on ties) when `keep_best` is set, otherwise
/// the selection after the last iteration.
pub fn allocate(model: &SpectrumModel, nan_of: &[usize], params: &AcsParams, policy: &dyn AdmissionPolicy) -> Result<AcsOutcome> {
    params.validate()?;
    if nan_of.len() != model.n_users() {
        return Err(Error::dimension("nan_of", model.n_users(), nan_of.len()));
    }
    let groups = NanGroups::new(nan_of)?;
    let users = model.n_users();
    let channels = model.n_channels();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut t = PheromoneTensor::new(users, channels);
    let mut utilities = Vec::with_capacity(params.iterations);
    let mut best: Option<(Assignment, f64)> = None;

    for _ in 0..params.iterations {
        let mut ants: Vec<AntState> = (0..params.n_ants).map(|_| AntState::new(users)).collect();
        for m in 0..channels {
            for ant in ants.iter_mut() {
                ant.carried_channel = m;
                let scores: Vec<Vec<f64>> = (0..groups.n_nans())
                    .map(|i| nan_scores(i, m, &t, model, &groups, policy, params, Some(ant)))
                    .collect();
                let nan_mass: Vec<f64> = scores.iter().map(|s| s.iter().sum()).collect();
                let probs = normalize(nan_mass);
                let Ok(nan) = select(&probs, params.g_cap, &mut rng) else {
                    continue;
                };
                semi_local_update(&mut t, nan, m, model, &groups, params);
                let hgw = select(&scores[nan], params.g_prime, &mut rng)?;
                local_update(&mut t, nan, hgw, m, model, &groups, params);
                ant.visit(nan, hgw, groups.user(nan, hgw));
            }
        }
        global_evaporation(&mut t, params);
        t.end_iteration();

        let snapshot = final_selection(&t, model);
        let value = evaluate(&snapshot, model, params.objective)?;
        utilities.push(value);
        if best.as_ref().is_none_or(|(_, top)| value > *top) {
            best = Some((snapshot, value));
        }
    }

    let assignment = match best {
        Some((a, _)) if params.keep_best => a,
        _ => final_selection(&t, model),
    };
    Ok(AcsOutcome {
        assignment,
        trace: ConvergenceTrace::from_utilities(&utilities),
        pheromone: t,
    })
}
