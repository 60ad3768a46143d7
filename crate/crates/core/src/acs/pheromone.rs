use crate::topology::SpectrumModel;

use super::{AcsParams, NanGroups};

/// Pheromone levels per (user, channel) and per iteration.
///
/// Users are addressed by global id; [`NanGroups`] maps a (NAN, HGW) pair to
/// it. Slice 0 is the all-ones initialization, slice `k` the state at the
/// end of iteration `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PheromoneTensor {
    users: usize,
    channels: usize,
    current: Vec<f64>,
    history: Vec<Vec<f64>>,
    sum: Vec<f64>,
}

impl PheromoneTensor {
    pub fn new(users: usize, channels: usize) -> Self {
        let ones = vec![1.0; users * channels];
        PheromoneTensor {
            users,
            channels,
            current: ones.clone(),
            history: vec![ones],
            sum: vec![0.0; users * channels],
        }
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    /// Level in the working slice of the running iteration.
    pub fn get(&self, user: usize, m: usize) -> f64 {
        self.current[user * self.channels + m]
    }

    pub fn add(&mut self, user: usize, m: usize, delta: f64) {
        self.current[user * self.channels + m] += delta;
    }

    pub fn scale(&mut self, factor: f64) {
        self.current.iter_mut().for_each(|t| *t *= factor);
    }

    /// Freezes the working slice as the state of the iteration just finished.
    pub fn end_iteration(&mut self) {
        for (s, &t) in self.sum.iter_mut().zip(&self.current) {
            *s += t;
        }
        self.history.push(self.current.clone());
    }

    /// Number of completed iterations.
    pub fn iterations(&self) -> usize {
        self.history.len() - 1
    }

    pub fn slice(&self, iteration: usize) -> &[f64] {
        &self.history[iteration]
    }

    pub fn current(&self) -> &[f64] {
        &self.current
    }

    /// Per-(user, channel) mean over completed iterations `1..=k`; the
    /// working slice when none has completed yet.
    pub fn mean(&self) -> Vec<f64> {
        let k = self.iterations();
        if k == 0 {
            return self.current.clone();
        }
        self.sum.iter().map(|&s| s / k as f64).collect()
    }
}

/// Reinforcement for HGW `j` of NAN `nan` on channel `m`: the reward raised
/// to `M / A_j`, `A_j` being the number of channels available to the user.
pub fn deposit_amount(nan: usize, j: usize, m: usize, model: &SpectrumModel, groups: &NanGroups, params: &AcsParams) -> f64 {
    user_deposit(groups.user(nan, j), m, model, params)
}

pub(crate) fn user_deposit(user: usize, m: usize, model: &SpectrumModel, params: &AcsParams) -> f64 {
    if !model.is_available(user, m) {
        return 0.0;
    }
    let available = model.available_count(user);
    if available == 0 {
        return 0.0;
    }
    let base = if params.normalize_deposit {
        model.reward(user, m) / model.b_max()
    } else {
        model.reward(user, m)
    };
    base.powf(model.n_channels() as f64 / available as f64)
}

/// Deposits on every HGW of the selected NAN.
pub fn semi_local_update(t: &mut PheromoneTensor, nan: usize, m: usize, model: &SpectrumModel, groups: &NanGroups, params: &AcsParams) {
    for &user in groups.members(nan) {
        t.add(user, m, user_deposit(user, m, model, params));
    }
}

/// Deposits on the selected HGW only.
pub fn local_update(
    t: &mut PheromoneTensor,
    nan: usize,
    hgw: usize,
    m: usize,
    model: &SpectrumModel,
    groups: &NanGroups,
    params: &AcsParams,
) {
    let user = groups.user(nan, hgw);
    t.add(user, m, user_deposit(user, m, model, params));
}

/// `T <- rho * T` on every entry.
pub fn global_evaporation(t: &mut PheromoneTensor, params: &AcsParams) {
    t.scale(params.rho);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_by_two() -> SpectrumModel {
        // user 0: both channels, b = 16; user 1: channel 0 only, b = 4
        SpectrumModel::from_rewards(2, 2, vec![16.0, 16.0, 4.0, 0.0], &[]).unwrap()
    }

    #[test]
    fn deposit_cases() {
        let model = two_by_two();
        let groups = NanGroups::new(&[0, 0]).unwrap();
        let params = AcsParams::default();
        assert_eq!(deposit_amount(0, 0, 0, &model, &groups, &params), 1.0);
        assert_eq!(deposit_amount(0, 1, 0, &model, &groups, &params), 0.0625);
        assert_eq!(deposit_amount(0, 1, 1, &model, &groups, &params), 0.0);

        let literal = AcsParams {
            normalize_deposit: false,
            ..AcsParams::default()
        };
        assert_eq!(deposit_amount(0, 0, 0, &model, &groups, &literal), 16.0);
    }

    #[test]
    fn semi_local_touches_only_selected_nan() {
        let model = SpectrumModel::from_rewards(3, 2, vec![16.0, 16.0, 16.0, 16.0, 16.0, 0.0], &[]).unwrap();
        let groups = NanGroups::new(&[0, 0, 1]).unwrap();
        let params = AcsParams::default();
        let mut t = PheromoneTensor::new(3, 2);
        semi_local_update(&mut t, 0, 0, &model, &groups, &params);
        assert_eq!(t.get(0, 0), 2.0);
        assert_eq!(t.get(1, 0), 2.0);
        assert_eq!(t.get(2, 0), 1.0);
        assert_eq!(t.get(0, 1), 1.0);

        // channel 1 is unavailable for user 2
        semi_local_update(&mut t, 1, 1, &model, &groups, &params);
        assert_eq!(t.get(2, 1), 1.0);
    }

    #[test]
    fn local_touches_single_entry() {
        let model = two_by_two();
        let groups = NanGroups::new(&[0, 0]).unwrap();
        let params = AcsParams::default();
        let mut t = PheromoneTensor::new(2, 2);
        local_update(&mut t, 0, 0, 1, &model, &groups, &params);
        assert_eq!(t.current(), &[1.0, 2.0, 1.0, 1.0]);
        local_update(&mut t, 0, 1, 1, &model, &groups, &params);
        assert_eq!(t.current(), &[1.0, 2.0, 1.0, 1.0]);
    }

    #[test]
    fn evaporation() {
        let params = AcsParams::default();
        let mut t = PheromoneTensor::new(1, 2);
        t.add(0, 1, 1.0);
        global_evaporation(&mut t, &params);
        assert_eq!(t.get(0, 0), 0.9);
        global_evaporation(&mut t, &params);
        assert_eq!(t.get(0, 1), 2.0 * 0.9 * 0.9);
        assert!((t.get(0, 1) - 1.62).abs() < 1e-12);
        assert!(t.current().iter().all(|&x| x > 0.0));
    }

    #[test]
    fn history_and_mean() {
        let mut t = PheromoneTensor::new(1, 2);
        assert_eq!(t.iterations(), 0);
        assert_eq!(t.slice(0), &[1.0, 1.0]);
        t.add(0, 0, 1.0);
        t.end_iteration();
        t.add(0, 1, 3.0);
        t.end_iteration();
        assert_eq!(t.iterations(), 2);
        assert_eq!(t.slice(1), &[2.0, 1.0]);
        assert_eq!(t.slice(2), &[2.0, 4.0]);
        assert_eq!(t.mean(), vec![2.0, 2.5]);
    }
}
