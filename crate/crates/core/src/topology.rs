//! Scenario generation and the geometric interference model.
//!
//! A [`Scenario`] places primary users (licensed channel holders with a
//! protection radius) and secondary users (home gateways grouped into
//! neighborhood networks) in a square area. [`build_model`] turns it into a
//! [`SpectrumModel`]: per-channel coverage radii, the availability matrix,
//! the pairwise interference tensor and the reward matrix.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrimaryUser {
    pub id: usize,
    pub position: Point,
    pub channel: usize,
    pub protection_radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SecondaryUser {
    pub id: usize,
    pub nan_id: usize,
    pub position: Point,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub side: f64,
    pub channels: usize,
    pub d_min: f64,
    pub d_max: f64,
    pub primaries: Vec<PrimaryUser>,
    pub secondaries: Vec<SecondaryUser>,
    pub seed: u64,
}

/// Population and geometry knobs for [`generate_scenario`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub side: f64,
    pub channels: usize,
    pub n_nans: usize,
    pub sus_per_nan: usize,
    pub n_pus: usize,
    pub d_min: f64,
    pub d_max: f64,
    pub dp: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            side: 10.0,
            channels: 10,
            n_nans: 5,
            sus_per_nan: 20,
            n_pus: 10,
            d_min: 1.0,
            d_max: 4.0,
            dp: 2.0,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.side.is_finite() && self.side > 0.0) {
            return Err(Error::Config(format!("side must be positive, got {}", self.side)));
        }
        if self.channels == 0 {
            return Err(Error::Config("channels must be at least 1".into()));
        }
        if self.n_nans == 0 || self.sus_per_nan == 0 {
            return Err(Error::Config(
                "at least one NAN with at least one secondary user is required".into(),
            ));
        }
        if !(self.dp.is_finite() && self.dp > 0.0) {
            return Err(Error::Config(format!("dp must be positive, got {}", self.dp)));
        }
        check_ranges(self.d_min, self.d_max)
    }
}

fn check_ranges(d_min: f64, d_max: f64) -> Result<()> {
    if !(d_min.is_finite() && d_max.is_finite() && 0.0 < d_min && d_min < d_max) {
        return Err(Error::Config(format!(
            "need 0 < d_min < d_max, got d_min={d_min}, d_max={d_max}"
        )));
    }
    Ok(())
}

impl Scenario {
    pub fn n_secondaries(&self) -> usize {
        self.secondaries.len()
    }

    pub fn n_nans(&self) -> usize {
        self.secondaries.iter().map(|s| s.nan_id + 1).max().unwrap_or(0)
    }

    /// NAN index of every secondary user, in id order.
    pub fn nan_of(&self) -> Vec<usize> {
        self.secondaries.iter().map(|s| s.nan_id).collect()
    }

    pub fn validate(&self) -> Result<()> {
        check_ranges(self.d_min, self.d_max)?;
        if self.channels == 0 {
            return Err(Error::Config("channels must be at least 1".into()));
        }
        if self.secondaries.is_empty() {
            return Err(Error::Config("scenario has no secondary users".into()));
        }
        if !(self.side.is_finite() && self.side > 0.0) {
            return Err(Error::Config(format!("side must be positive, got {}", self.side)));
        }
        let inside = |p: &Point| {
            p.x.is_finite() && p.y.is_finite() && (0.0..=self.side).contains(&p.x) && (0.0..=self.side).contains(&p.y)
        };
        for pu in &self.primaries {
            if pu.channel >= self.channels {
                return Err(Error::Config(format!(
                    "primary {} occupies channel {} but only {} channels exist",
                    pu.id, pu.channel, self.channels
                )));
            }
            if !(pu.protection_radius.is_finite() && pu.protection_radius > 0.0) {
                return Err(Error::Config(format!("primary {} has non-positive protection radius", pu.id)));
            }
            if !inside(&pu.position) {
                return Err(Error::Config(format!("primary {} lies outside the area", pu.id)));
            }
        }
        let n_nans = self.n_nans();
        let mut seen = vec![false; n_nans];
        for (idx, su) in self.secondaries.iter().enumerate() {
            if su.id != idx {
                return Err(Error::Config(format!("secondary ids must be dense, found {} at {idx}", su.id)));
            }
            if !inside(&su.position) {
                return Err(Error::Config(format!("secondary {} lies outside the area", su.id)));
            }
            seen[su.nan_id] = true;
        }
        if let Some(empty) = seen.iter().position(|s| !s) {
            return Err(Error::Config(format!("NAN {empty} has no secondary users")));
        }
        Ok(())
    }
}

/// Draws a scenario: every PU and SU position is uniform i.i.d. in the
/// square, every PU channel uniform over `0..channels`. SUs are numbered NAN
/// by NAN.
pub fn generate_scenario(cfg: &ScenarioConfig, seed: u64) -> Result<Scenario> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let point = |rng: &mut ChaCha8Rng| Point::new(rng.gen_range(0.0..cfg.side), rng.gen_range(0.0..cfg.side));

    let primaries = (0..cfg.n_pus)
        .map(|id| {
            let position = point(&mut rng);
            let channel = rng.gen_range(0..cfg.channels);
            PrimaryUser {
                id,
                position,
                channel,
                protection_radius: cfg.dp,
            }
        })
        .collect();

    let mut secondaries = Vec::with_capacity(cfg.n_nans * cfg.sus_per_nan);
    for nan_id in 0..cfg.n_nans {
        for _ in 0..cfg.sus_per_nan {
            let position = point(&mut rng);
            secondaries.push(SecondaryUser {
                id: secondaries.len(),
                nan_id,
                position,
            });
        }
    }

    Ok(Scenario {
        side: cfg.side,
        channels: cfg.channels,
        d_min: cfg.d_min,
        d_max: cfg.d_max,
        primaries,
        secondaries,
        seed,
    })
}

/// Largest transmit range SU `n` may use on channel `m` without reaching
/// into the protection area of a PU on that channel, capped at `d_max` and
/// clamped below at zero.
pub fn coverage_radius(scn: &Scenario, n: usize, m: usize) -> f64 {
    let su = &scn.secondaries[n].position;
    scn.primaries
        .iter()
        .filter(|pu| pu.channel == m)
        .map(|pu| pu.position.distance(su) - pu.protection_radius)
        .fold(scn.d_max, f64::min)
        .max(0.0)
}

/// How the reward matrix is derived from coverage radii.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RewardMode {
    /// `ds^2`
    #[default]
    Coverage,
    /// `ln(1 + ds^2)`
    Capacity,
}

impl RewardMode {
    pub fn reward(self, ds: f64) -> f64 {
        match self {
            RewardMode::Coverage => ds * ds,
            RewardMode::Capacity => (ds * ds).ln_1p(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RewardMode::Coverage => "coverage",
            RewardMode::Capacity => "capacity",
        }
    }
}

impl std::str::FromStr for RewardMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "coverage" => Ok(RewardMode::Coverage),
            "capacity" => Ok(RewardMode::Capacity),
            other => Err(Error::Config(format!("unknown reward mode `{other}`"))),
        }
    }
}

/// Derived matrices every allocator works from.
///
/// Matrices are stored row-major: `(n, m)` at `n * M + m` and the
/// interference tensor `(n, k, m)` at `(n * N + k) * M + m`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumModel {
    n_users: usize,
    n_channels: usize,
    ds: Vec<f64>,
    availability: Vec<bool>,
    interference: Vec<bool>,
    reward: Vec<f64>,
    b_max: f64,
    neighbors: Vec<Vec<usize>>,
    available_count: Vec<usize>,
}

impl SpectrumModel {
    /// Assembles a model from raw matrices, checking the consistency
    /// invariants between availability, interference and reward.
    pub fn from_parts(
        n_users: usize,
        n_channels: usize,
        ds: Vec<f64>,
        availability: Vec<bool>,
        interference: Vec<bool>,
        reward: Vec<f64>,
    ) -> Result<Self> {
        let nm = n_users * n_channels;
        if ds.len() != nm {
            return Err(Error::dimension("ds", nm, ds.len()));
        }
        if availability.len() != nm {
            return Err(Error::dimension("availability", nm, availability.len()));
        }
        if reward.len() != nm {
            return Err(Error::dimension("reward", nm, reward.len()));
        }
        if interference.len() != n_users * nm {
            return Err(Error::dimension("interference", n_users * nm, interference.len()));
        }
        let c = |n: usize, k: usize, m: usize| interference[(n * n_users + k) * n_channels + m];
        for m in 0..n_channels {
            for n in 0..n_users {
                let idx = n * n_channels + m;
                if !(reward[idx].is_finite() && reward[idx] >= 0.0) {
                    return Err(Error::Config(format!("reward ({n},{m}) must be finite and nonnegative")));
                }
                if !availability[idx] && reward[idx] != 0.0 {
                    return Err(Error::Config(format!("reward ({n},{m}) is nonzero on an unavailable channel")));
                }
                if c(n, n, m) {
                    return Err(Error::Config(format!("user {n} interferes with itself on channel {m}")));
                }
                for k in 0..n_users {
                    if c(n, k, m) != c(k, n, m) {
                        return Err(Error::Config(format!("interference ({n},{k},{m}) is not symmetric")));
                    }
                    if c(n, k, m) && !(availability[idx] && availability[k * n_channels + m]) {
                        return Err(Error::Config(format!(
                            "interference ({n},{k},{m}) set on an unavailable channel"
                        )));
                    }
                }
            }
        }

        let mut neighbors = vec![Vec::new(); nm];
        for n in 0..n_users {
            for k in 0..n_users {
                for m in 0..n_channels {
                    if c(n, k, m) {
                        neighbors[n * n_channels + m].push(k);
                    }
                }
            }
        }
        let available_count = (0..n_users)
            .map(|n| availability[n * n_channels..(n + 1) * n_channels].iter().filter(|&&a| a).count())
            .collect();
        let b_max = reward.iter().copied().fold(0.0, f64::max);

        Ok(SpectrumModel {
            n_users,
            n_channels,
            ds,
            availability,
            interference,
            reward,
            b_max,
            neighbors,
            available_count,
        })
    }

    /// Synthetic model straight from a reward matrix: a channel is available
    /// wherever its reward is positive, `ds = sqrt(b)`, and `conflicts` lists
    /// interfering `(n, k, m)` triples (symmetry is filled in).
    pub fn from_rewards(
        n_users: usize,
        n_channels: usize,
        reward: Vec<f64>,
        conflicts: &[(usize, usize, usize)],
    ) -> Result<Self> {
        let nm = n_users * n_channels;
        if reward.len() != nm {
            return Err(Error::dimension("reward", nm, reward.len()));
        }
        let availability: Vec<bool> = reward.iter().map(|&b| b > 0.0).collect();
        let ds = reward.iter().map(|&b| b.max(0.0).sqrt()).collect();
        let mut interference = vec![false; n_users * nm];
        for &(n, k, m) in conflicts {
            if n >= n_users || k >= n_users || m >= n_channels {
                return Err(Error::Config(format!("conflict ({n},{k},{m}) out of range")));
            }
            interference[(n * n_users + k) * n_channels + m] = true;
            interference[(k * n_users + n) * n_channels + m] = true;
        }
        SpectrumModel::from_parts(n_users, n_channels, ds, availability, interference, reward)
    }

    pub fn n_users(&self) -> usize {
        self.n_users
    }

    pub fn n_channels(&self) -> usize {
        self.n_channels
    }

    pub fn ds(&self, n: usize, m: usize) -> f64 {
        self.ds[n * self.n_channels + m]
    }

    pub fn is_available(&self, n: usize, m: usize) -> bool {
        self.availability[n * self.n_channels + m]
    }

    pub fn interferes(&self, n: usize, k: usize, m: usize) -> bool {
        self.interference[(n * self.n_users + k) * self.n_channels + m]
    }

    pub fn reward(&self, n: usize, m: usize) -> f64 {
        self.reward[n * self.n_channels + m]
    }

    pub fn b_max(&self) -> f64 {
        self.b_max
    }

    /// Users that interfere with `n` on channel `m`, ascending.
    pub fn neighbors(&self, n: usize, m: usize) -> &[usize] {
        &self.neighbors[n * self.n_channels + m]
    }

    /// Number of channels available to user `n`.
    pub fn available_count(&self, n: usize) -> usize {
        self.available_count[n]
    }

    pub fn reward_row(&self, n: usize) -> &[f64] {
        &self.reward[n * self.n_channels..(n + 1) * self.n_channels]
    }
}

/// Derives coverage radii, availability, interference and rewards.
///
/// A channel is available when its coverage radius reaches `d_min`; two
/// users interfere on a channel both can use when their coverage discs
/// overlap.
pub fn build_model(scn: &Scenario, reward_mode: RewardMode) -> SpectrumModel {
    let n_users = scn.secondaries.len();
    let n_channels = scn.channels;
    let mut ds = Vec::with_capacity(n_users * n_channels);
    for n in 0..n_users {
        for m in 0..n_channels {
            ds.push(coverage_radius(scn, n, m));
        }
    }
    let availability: Vec<bool> = ds.iter().map(|&r| r >= scn.d_min).collect();
    let reward = ds
        .iter()
        .zip(&availability)
        .map(|(&r, &avail)| if avail { reward_mode.reward(r) } else { 0.0 })
        .collect();

    let mut interference = vec![false; n_users * n_users * n_channels];
    for n in 0..n_users {
        for k in (n + 1)..n_users {
            let dist = scn.secondaries[n].position.distance(&scn.secondaries[k].position);
            for m in 0..n_channels {
                let (a, b) = (n * n_channels + m, k * n_channels + m);
                if availability[a] && availability[b] && dist < ds[a] + ds[b] {
                    interference[(n * n_users + k) * n_channels + m] = true;
                    interference[(k * n_users + n) * n_channels + m] = true;
                }
            }
        }
    }

    SpectrumModel::from_parts(n_users, n_channels, ds, availability, interference, reward)
        .expect("geometric construction satisfies model invariants")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario(primaries: Vec<(f64, f64, usize)>, secondaries: Vec<(f64, f64)>, channels: usize) -> Scenario {
        Scenario {
            side: 20.0,
            channels,
            d_min: 1.0,
            d_max: 4.0,
            primaries: primaries
                .into_iter()
                .enumerate()
                .map(|(id, (x, y, channel))| PrimaryUser {
                    id,
                    position: Point::new(x, y),
                    channel,
                    protection_radius: 2.0,
                })
                .collect(),
            secondaries: secondaries
                .into_iter()
                .enumerate()
                .map(|(id, (x, y))| SecondaryUser {
                    id,
                    nan_id: 0,
                    position: Point::new(x, y),
                })
                .collect(),
            seed: 0,
        }
    }

    #[test]
    fn degenerate_population() {
        let cfg = ScenarioConfig {
            side: 10.0,
            channels: 1,
            n_nans: 1,
            sus_per_nan: 1,
            n_pus: 0,
            ..ScenarioConfig::default()
        };
        let scn = generate_scenario(&cfg, 7).unwrap();
        assert_eq!(scn.secondaries.len(), 1);
        assert!(scn.primaries.is_empty());
        assert_eq!(scn.channels, 1);
        scn.validate().unwrap();
    }

    #[test]
    fn paper_scale_scenario_is_valid() {
        let scn = generate_scenario(&ScenarioConfig::default(), 3).unwrap();
        assert_eq!(scn.secondaries.len(), 100);
        assert_eq!(scn.primaries.len(), 10);
        assert_eq!(scn.n_nans(), 5);
        assert!(scn.primaries.iter().all(|p| p.channel < 10 && p.protection_radius == 2.0));
        scn.validate().unwrap();
    }

    #[test]
    fn seeds_change_positions() {
        let cfg = ScenarioConfig::default();
        let a = generate_scenario(&cfg, 1).unwrap();
        let b = generate_scenario(&cfg, 2).unwrap();
        assert_ne!(a.secondaries, b.secondaries);
        assert_eq!(a, generate_scenario(&cfg, 1).unwrap());
    }

    #[test]
    fn rejects_bad_config() {
        let bad = [
            ScenarioConfig { channels: 0, ..Default::default() },
            ScenarioConfig { n_nans: 0, ..Default::default() },
            ScenarioConfig { sus_per_nan: 0, ..Default::default() },
            ScenarioConfig { d_min: 4.0, d_max: 4.0, ..Default::default() },
            ScenarioConfig { dp: 0.0, ..Default::default() },
            ScenarioConfig { side: -1.0, ..Default::default() },
        ];
        for cfg in bad {
            assert!(matches!(generate_scenario(&cfg, 0), Err(Error::Config(_))), "{cfg:?}");
        }
    }

    #[test]
    fn coverage_radius_cases() {
        let free = scenario(vec![], vec![(5.0, 5.0)], 1);
        assert_eq!(coverage_radius(&free, 0, 0), 4.0);

        let far = scenario(vec![(10.0, 5.0, 0)], vec![(5.0, 5.0)], 2);
        assert_eq!(coverage_radius(&far, 0, 0), 3.0);
        assert_eq!(coverage_radius(&far, 0, 1), 4.0);

        let near = scenario(vec![(7.0, 5.0, 0)], vec![(5.0, 5.0)], 1);
        assert_eq!(coverage_radius(&near, 0, 0), 0.0);
        let model = build_model(&near, RewardMode::Coverage);
        assert!(!model.is_available(0, 0));
        assert_eq!(model.reward(0, 0), 0.0);
    }

    #[test]
    fn single_user_model() {
        let scn = scenario(vec![], vec![(5.0, 5.0)], 1);
        let model = build_model(&scn, RewardMode::Coverage);
        assert!(model.is_available(0, 0));
        assert!(!model.interferes(0, 0, 0));
        assert_eq!(model.reward(0, 0), 16.0);
        assert_eq!(model.b_max(), 16.0);
    }

    #[test]
    fn capacity_reward() {
        let scn = scenario(vec![(10.0, 5.0, 0)], vec![(5.0, 5.0)], 1);
        let model = build_model(&scn, RewardMode::Capacity);
        let expected = 10f64.ln();
        assert!((model.reward(0, 0) - expected).abs() <= 1e-9 * expected);
        assert_eq!(expected, std::f64::consts::LN_10);
    }

    #[test]
    fn overlapping_discs_interfere() {
        // Each SU sits 5 from its own PU, capping both radii at 3.
        let scn = scenario(vec![(2.0, 6.0, 0), (13.0, 14.0, 0)], vec![(5.0, 10.0), (10.0, 10.0)], 1);
        let model = build_model(&scn, RewardMode::Coverage);
        assert_eq!(model.ds(0, 0), 3.0);
        assert_eq!(model.ds(1, 0), 3.0);
        assert!(model.interferes(0, 1, 0));
        assert!(model.interferes(1, 0, 0));
        assert_eq!(model.neighbors(0, 0), &[1]);

        // Dist = 6 touches but does not overlap.
        let scn = scenario(vec![(2.0, 6.0, 0), (14.0, 14.0, 0)], vec![(5.0, 10.0), (11.0, 10.0)], 1);
        let model = build_model(&scn, RewardMode::Coverage);
        assert_eq!(model.ds(1, 0), 3.0);
        assert!(!model.interferes(0, 1, 0));
    }

    #[test]
    fn from_rewards_rejects_inconsistent_conflict() {
        let err = SpectrumModel::from_rewards(2, 1, vec![4.0, 0.0], &[(0, 1, 0)]).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }
}
