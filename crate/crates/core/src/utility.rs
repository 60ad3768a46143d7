//! Channel assignments, the conflict-free feasible set and the three
//! network utilities (max-sum, max-min and proportional-fair reward).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::topology::SpectrumModel;

/// Shift added to every reward inside the proportional-fair product so that
/// starved users do not zero it out.
pub const MPF_SHIFT: f64 = 1e-6;

/// Binary `N x M` channel allocation matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    users: usize,
    channels: usize,
    a: Vec<bool>,
}

impl Assignment {
    pub fn empty(users: usize, channels: usize) -> Self {
        Assignment {
            users,
            channels,
            a: vec![false; users * channels],
        }
    }

    /// One channel (or none) per user.
    pub fn from_channels(channels: usize, choice: &[Option<usize>]) -> Self {
        let mut out = Assignment::empty(choice.len(), channels);
        for (n, c) in choice.iter().enumerate() {
            if let Some(m) = *c {
                out.set(n, m, true);
            }
        }
        out
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let channels = rows.first().map_or(0, Vec::len);
        let mut out = Assignment::empty(rows.len(), channels);
        for (n, row) in rows.iter().enumerate() {
            if row.len() != channels {
                return Err(Error::dimension("assignment row", channels, row.len()));
            }
            for (m, &v) in row.iter().enumerate() {
                match v {
                    0 => {}
                    1 => out.set(n, m, true),
                    other => return Err(Error::Config(format!("assignment entry ({n},{m}) is {other}"))),
                }
            }
        }
        Ok(out)
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn get(&self, n: usize, m: usize) -> bool {
        self.a[n * self.channels + m]
    }

    pub fn set(&mut self, n: usize, m: usize, value: bool) {
        self.a[n * self.channels + m] = value;
    }

    pub fn row(&self, n: usize) -> &[bool] {
        &self.a[n * self.channels..(n + 1) * self.channels]
    }

    pub fn row_sum(&self, n: usize) -> usize {
        self.row(n).iter().filter(|&&x| x).count()
    }

    /// First assigned channel of user `n`, if any.
    pub fn channel_of(&self, n: usize) -> Option<usize> {
        self.row(n).iter().position(|&x| x)
    }

    pub fn is_starved(&self, n: usize) -> bool {
        self.row_sum(n) == 0
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        (0..self.users).map(|n| self.row(n).iter().map(|&x| u8::from(x)).collect()).collect()
    }

    fn check_dims(&self, model: &SpectrumModel) -> Result<()> {
        if self.users != model.n_users() || self.channels != model.n_channels() {
            return Err(Error::dimension(
                "assignment",
                format!("{}x{}", model.n_users(), model.n_channels()),
                format!("{}x{}", self.users, self.channels),
            ));
        }
        Ok(())
    }

    /// First violated constraint, if any.
    fn first_violation(&self, model: &SpectrumModel) -> Option<String> {
        for n in 0..self.users {
            for m in 0..self.channels {
                if !self.get(n, m) {
                    continue;
                }
                if !model.is_available(n, m) {
                    return Some(format!("user {n} holds unavailable channel {m}"));
                }
                if let Some(&k) = model.neighbors(n, m).iter().find(|&&k| k > n && self.get(k, m)) {
                    return Some(format!("users {n} and {k} interfere on channel {m}"));
                }
            }
        }
        None
    }
}

/// Per-user rewards `r_n = sum_m a_{n,m} b_{n,m}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RewardVector(pub Vec<f64>);

impl RewardVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn starved(&self) -> usize {
        self.0.iter().filter(|&&r| r == 0.0).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UtilityKind {
    Msr,
    Mmr,
    Mpf,
}

impl UtilityKind {
    pub const ALL: [UtilityKind; 3] = [UtilityKind::Msr, UtilityKind::Mmr, UtilityKind::Mpf];

    pub fn as_str(self) -> &'static str {
        match self {
            UtilityKind::Msr => "msr",
            UtilityKind::Mmr => "mmr",
            UtilityKind::Mpf => "mpf",
        }
    }
}

impl fmt::Display for UtilityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for UtilityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "msr" => Ok(UtilityKind::Msr),
            "mmr" => Ok(UtilityKind::Mmr),
            "mpf" => Ok(UtilityKind::Mpf),
            other => Err(Error::Config(format!("unknown utility `{other}`"))),
        }
    }
}

/// Membership in the conflict-free set: every held channel is available and
/// no two interfering users share a channel.
pub fn is_feasible(a: &Assignment, model: &SpectrumModel) -> Result<bool> {
    a.check_dims(model)?;
    Ok(a.first_violation(model).is_none())
}

pub fn reward_vector(a: &Assignment, model: &SpectrumModel) -> Result<RewardVector> {
    a.check_dims(model)?;
    let r = (0..a.users())
        .map(|n| {
            a.row(n)
                .iter()
                .zip(model.reward_row(n))
                .filter(|(&held, _)| held)
                .map(|(_, &b)| b)
                .sum::<f64>()
                + 0.0
        })
        .collect();
    Ok(RewardVector(r))
}

/// Scores a reward vector. The proportional-fair value is the geometric mean
/// of the shifted rewards, computed in log space.
pub fn utility(r: &RewardVector, kind: UtilityKind) -> Result<f64> {
    let r = r.as_slice();
    if r.is_empty() {
        return Err(Error::EmptyRewards);
    }
    Ok(match kind {
        UtilityKind::Msr => r.iter().sum::<f64>() + 0.0,
        UtilityKind::Mmr => r.iter().copied().fold(f64::INFINITY, f64::min),
        UtilityKind::Mpf => {
            let mean_log = r.iter().map(|&x| (x + MPF_SHIFT).ln()).sum::<f64>() / r.len() as f64;
            mean_log.exp()
        }
    })
}

/// Utility of a feasible assignment; infeasible assignments are rejected.
pub fn evaluate(a: &Assignment, model: &SpectrumModel, kind: UtilityKind) -> Result<f64> {
    a.check_dims(model)?;
    if let Some(why) = a.first_violation(model) {
        return Err(Error::Infeasible(why));
    }
    utility(&reward_vector(a, model)?, kind)
}
