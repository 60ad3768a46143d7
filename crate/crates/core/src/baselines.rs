//! Comparison allocators: conflict-aware random assignment, greedy
//! colour-sensitive graph colouring and exhaustive search.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::topology::SpectrumModel;
use crate::utility::{reward_vector, utility, Assignment, UtilityKind};

/// Upper bound on the candidate assignments exhaustive search may visit.
pub const BRUTE_FORCE_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgorithmKind {
    Acs,
    Csgc,
    Random,
    Exact,
}

impl AlgorithmKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AlgorithmKind::Acs => "acs",
            AlgorithmKind::Csgc => "csgc",
            AlgorithmKind::Random => "random",
            AlgorithmKind::Exact => "exact",
        }
    }
}

impl fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AlgorithmKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "acs" => Ok(AlgorithmKind::Acs),
            "csgc" => Ok(AlgorithmKind::Csgc),
            "random" | "rand" => Ok(AlgorithmKind::Random),
            "exact" => Ok(AlgorithmKind::Exact),
            other => Err(Error::Config(format!("unknown algorithm `{other}`"))),
        }
    }
}

/// Users in random order each take a uniformly drawn channel among those
/// still available and free of interfering holders.
pub fn random_assignment(model: &SpectrumModel, seed: u64) -> Assignment {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..model.n_users()).collect();
    order.shuffle(&mut rng);

    let mut held: Vec<Option<usize>> = vec![None; model.n_users()];
    for n in order {
        let free: Vec<usize> = (0..model.n_channels())
            .filter(|&m| model.is_available(n, m) && model.neighbors(n, m).iter().all(|&k| held[k] != Some(m)))
            .collect();
        held[n] = free.choose(&mut rng).copied();
    }
    Assignment::from_channels(model.n_channels(), &held)
}

/// Greedy label-and-prune colouring.
///
/// Every unassigned user is labelled with its best score over the channels
/// it can still take; score is the raw reward for MSR and the reward divided
/// by one plus the number of unassigned neighbours still competing for the
/// channel otherwise. The top-labelled user takes its best channel, which is
/// then removed from its neighbours' lists. Ties go to the lower user, then
/// the lower channel.
pub fn csgc_assignment(model: &SpectrumModel, kind: UtilityKind) -> Assignment {
    let users = model.n_users();
    let channels = model.n_channels();
    let mut open: Vec<bool> = (0..users)
        .flat_map(|n| (0..channels).map(move |m| (n, m)))
        .map(|(n, m)| model.is_available(n, m) && model.reward(n, m) > 0.0)
        .collect();
    let mut held: Vec<Option<usize>> = vec![None; users];
    let mut done = vec![false; users];

    let score = |n: usize, m: usize, open: &[bool], done: &[bool]| -> f64 {
        let b = model.reward(n, m);
        match kind {
            UtilityKind::Msr => b,
            UtilityKind::Mmr | UtilityKind::Mpf => {
                let degree = model
                    .neighbors(n, m)
                    .iter()
                    .filter(|&&k| !done[k] && open[k * channels + m])
                    .count();
                b / (degree as f64 + 1.0)
            }
        }
    };

    loop {
        let mut best: Option<(usize, usize, f64)> = None;
        for n in (0..users).filter(|&n| !done[n]) {
            for m in (0..channels).filter(|&m| open[n * channels + m]) {
                let s = score(n, m, &open, &done);
                if s > 0.0 && best.is_none_or(|(_, _, top)| s > top) {
                    best = Some((n, m, s));
                }
            }
        }
        let Some((n, m, _)) = best else { break };
        held[n] = Some(m);
        done[n] = true;
        for &k in model.neighbors(n, m) {
            open[k * channels + m] = false;
        }
    }
    Assignment::from_channels(channels, &held)
}

/// Whether exhaustive search may give a user one channel or any subset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PerUserCap {
    #[default]
    Single,
    Multi,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub assignment: Assignment,
    pub utility: f64,
}

/// Size of the unpruned search space for the given per-user cap.
pub fn search_space(model: &SpectrumModel, cap: PerUserCap) -> f64 {
    (0..model.n_users())
        .map(|n| {
            let a = model.available_count(n) as f64;
            match cap {
                PerUserCap::Single => 1.0 + a,
                PerUserCap::Multi => a.exp2(),
            }
        })
        .product()
}

/// Exact maximizer of `kind` over conflict-free assignments.
///
/// Enumerates rows in ascending lexicographic order of the row-major
/// assignment matrix and keeps the first maximizer, so ties resolve to the
/// lexicographically smallest matrix.
pub fn brute_force_optimal(model: &SpectrumModel, kind: UtilityKind, cap: PerUserCap) -> Result<Optimum> {
    let space = search_space(model, cap);
    if space > BRUTE_FORCE_CAP as f64 {
        return Err(Error::Capacity {
            space,
            cap: BRUTE_FORCE_CAP,
            context: String::new(),
        });
    }
    let channels = model.n_channels();
    // Candidate rows per user as channel bitmasks (bit m = channel m),
    // sorted so the row vectors ascend lexicographically.
    let rows: Vec<Vec<u64>> = (0..model.n_users())
        .map(|n| {
            let avail: u64 = (0..channels).filter(|&m| model.is_available(n, m)).map(|m| 1u64 << m).sum();
            let mut options: Vec<u64> = match cap {
                PerUserCap::Single => std::iter::once(0)
                    .chain((0..channels).filter(|&m| avail >> m & 1 == 1).map(|m| 1u64 << m))
                    .collect(),
                PerUserCap::Multi => subsets(avail),
            };
            options.sort_by_key(|&mask| lex_key(mask, channels));
            options
        })
        .collect();

    let mut search = Search {
        model,
        kind,
        rows: &rows,
        current: vec![0; model.n_users()],
        best: None,
    };
    search.descend(0)?;
    let (masks, value) = search.best.expect("the empty assignment is always feasible");
    Ok(Optimum {
        assignment: masks_to_assignment(&masks, channels),
        utility: value,
    })
}

fn subsets(mask: u64) -> Vec<u64> {
    let mut out = vec![0];
    let mut sub = mask;
    while sub != 0 {
        out.push(sub);
        sub = (sub - 1) & mask;
    }
    out
}

/// Sort key making mask order match row-vector lexicographic order, where
/// channel 0 is the most significant position.
fn lex_key(mask: u64, channels: usize) -> u64 {
    (0..channels).filter(|&m| mask >> m & 1 == 1).map(|m| 1u64 << (channels - 1 - m)).sum()
}

fn masks_to_assignment(masks: &[u64], channels: usize) -> Assignment {
    let mut a = Assignment::empty(masks.len(), channels);
    for (n, &mask) in masks.iter().enumerate() {
        for m in (0..channels).filter(|&m| mask >> m & 1 == 1) {
            a.set(n, m, true);
        }
    }
    a
}

struct Search<'a> {
    model: &'a SpectrumModel,
    kind: UtilityKind,
    rows: &'a [Vec<u64>],
    current: Vec<u64>,
    best: Option<(Vec<u64>, f64)>,
}

impl Search<'_> {
    fn descend(&mut self, n: usize) -> Result<()> {
        if n == self.current.len() {
            let a = masks_to_assignment(&self.current, self.model.n_channels());
            let value = utility(&reward_vector(&a, self.model)?, self.kind)?;
            if self.best.as_ref().is_none_or(|(_, top)| value > *top) {
                self.best = Some((self.current.clone(), value));
            }
            return Ok(());
        }
        for &mask in &self.rows[n] {
            if self.compatible(n, mask) {
                self.current[n] = mask;
                self.descend(n + 1)?;
            }
        }
        self.current[n] = 0;
        Ok(())
    }

    /// No earlier user holds a channel in `mask` that interferes with `n`.
    fn compatible(&self, n: usize, mask: u64) -> bool {
        (0..self.model.n_channels())
            .filter(|&m| mask >> m & 1 == 1)
            .all(|m| self.model.neighbors(n, m).iter().all(|&k| k >= n || self.current[k] >> m & 1 == 0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::utility::{evaluate, is_feasible};

    fn conflicting_pair() -> SpectrumModel {
        SpectrumModel::from_rewards(2, 1, vec![4.0, 9.0], &[(0, 1, 0)]).unwrap()
    }

    #[test]
    fn random_single_user() {
        let model = SpectrumModel::from_rewards(1, 2, vec![0.0, 3.0], &[]).unwrap();
        assert_eq!(random_assignment(&model, 5).channel_of(0), Some(1));
    }

    #[test]
    fn random_empty_and_deterministic() {
        let model = SpectrumModel::from_rewards(2, 2, vec![0.0; 4], &[]).unwrap();
        assert_eq!(random_assignment(&model, 1), Assignment::empty(2, 2));

        let model = SpectrumModel::from_rewards(3, 2, vec![1.0; 6], &[(0, 1, 0), (1, 2, 1)]).unwrap();
        for seed in 0..20 {
            let a = random_assignment(&model, seed);
            assert_eq!(a, random_assignment(&model, seed));
            assert!(is_feasible(&a, &model).unwrap());
        }
    }

    #[test]
    fn csgc_non_interfering_pair() {
        let model = SpectrumModel::from_rewards(2, 1, vec![4.0, 9.0], &[]).unwrap();
        let a = csgc_assignment(&model, UtilityKind::Msr);
        assert_eq!(a.channel_of(0), Some(0));
        assert_eq!(a.channel_of(1), Some(0));
    }

    #[test]
    fn csgc_conflicting_pair() {
        let a = csgc_assignment(&conflicting_pair(), UtilityKind::Msr);
        assert!(a.is_starved(0));
        assert_eq!(a.channel_of(1), Some(0));
    }

    #[test]
    fn csgc_chain() {
        let model = SpectrumModel::from_rewards(3, 1, vec![1.0; 3], &[(0, 1, 0), (1, 2, 0)]).unwrap();
        let a = csgc_assignment(&model, UtilityKind::Msr);
        assert_eq!(a.channel_of(0), Some(0));
        assert!(a.is_starved(1));
        assert_eq!(a.channel_of(2), Some(0));
        let exact = brute_force_optimal(&model, UtilityKind::Msr, PerUserCap::Single).unwrap();
        assert_eq!(evaluate(&a, &model, UtilityKind::Msr).unwrap(), exact.utility);
        assert_eq!(exact.utility, 2.0);
    }

    #[test]
    fn csgc_fair_score_prefers_low_degree() {
        // star: user 0 conflicts with 1 and 2; all rewards equal
        let model = SpectrumModel::from_rewards(3, 1, vec![1.0; 3], &[(0, 1, 0), (0, 2, 0)]).unwrap();
        let a = csgc_assignment(&model, UtilityKind::Mpf);
        assert!(a.is_starved(0));
        assert_eq!(a.channel_of(1), Some(0));
        assert_eq!(a.channel_of(2), Some(0));
    }

    #[test]
    fn exact_conflicting_pair() {
        let model = conflicting_pair();
        let msr = brute_force_optimal(&model, UtilityKind::Msr, PerUserCap::Single).unwrap();
        assert_eq!(msr.utility, 9.0);
        assert_eq!(msr.assignment.channel_of(1), Some(0));

        let mmr = brute_force_optimal(&model, UtilityKind::Mmr, PerUserCap::Single).unwrap();
        assert_eq!(mmr.utility, 0.0);
        // every option ties at 0; the lexicographically smallest matrix is empty
        assert_eq!(mmr.assignment, Assignment::empty(2, 1));

        let mpf = brute_force_optimal(&model, UtilityKind::Mpf, PerUserCap::Single).unwrap();
        let expected = (1e-6f64 * 9.000001).sqrt();
        assert!((mpf.utility - expected).abs() <= 1e-9 * expected);
        assert_eq!(mpf.assignment.channel_of(1), Some(0));
    }

    #[test]
    fn exact_multi_mode_sums_channels() {
        let model = SpectrumModel::from_rewards(1, 2, vec![4.0, 9.0], &[]).unwrap();
        let single = brute_force_optimal(&model, UtilityKind::Msr, PerUserCap::Single).unwrap();
        let multi = brute_force_optimal(&model, UtilityKind::Msr, PerUserCap::Multi).unwrap();
        assert_eq!(single.utility, 9.0);
        assert_eq!(multi.utility, 13.0);
    }

    #[test]
    fn exact_ties_pick_lexicographically_smallest() {
        // one user, two equal channels: [0,1] < [1,0]
        let model = SpectrumModel::from_rewards(1, 2, vec![5.0, 5.0], &[]).unwrap();
        let opt = brute_force_optimal(&model, UtilityKind::Msr, PerUserCap::Single).unwrap();
        assert_eq!(opt.assignment.channel_of(0), Some(1));
    }

    #[test]
    fn exact_rejects_large_instances() {
        let model = SpectrumModel::from_rewards(12, 4, vec![1.0; 48], &[]).unwrap();
        assert!(matches!(
            brute_force_optimal(&model, UtilityKind::Msr, PerUserCap::Single),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn lex_key_orders_rows() {
        // channels = 3: [0,0,1] < [0,1,0] < [0,1,1] < [1,0,0]
        let masks = [0b100, 0b010, 0b110, 0b001];
        let keys: Vec<u64> = masks.iter().map(|&m| lex_key(m, 3)).collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
    }
}
