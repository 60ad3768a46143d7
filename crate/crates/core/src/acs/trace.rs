use serde::{Deserialize, Serialize};

/// Iterations without improvement needed before convergence is confirmed.
pub const CONFIRMATION_WINDOW: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub iteration: usize,
    /// Utility of the assignment the running mean pheromone yields at this
    /// iteration.
    pub utility: f64,
    pub best_utility: f64,
    pub normalized_cost: f64,
}

/// Per-iteration progress of one allocator run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTrace {
    pub points: Vec<TracePoint>,
    pub converged_at: usize,
}

impl ConvergenceTrace {
    /// Builds the trace from per-iteration utilities (iteration 1 first).
    ///
    /// Cost is `(U* - U_k) / (U* - U_min)` against the trace's own extremes,
    /// zero for a flat trace. Convergence is the iteration at which the
    /// best-so-far value was last raised, provided at least
    /// [`CONFIRMATION_WINDOW`] iterations follow it; otherwise the final
    /// iteration.
    pub fn from_utilities(utilities: &[f64]) -> Self {
        let hi = utilities.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = utilities.iter().copied().fold(f64::INFINITY, f64::min);
        let span = hi - lo;

        let mut best = f64::NEG_INFINITY;
        let mut last_improvement = 1;
        let points = utilities
            .iter()
            .enumerate()
            .map(|(idx, &u)| {
                if u > best {
                    best = u;
                    last_improvement = idx + 1;
                }
                let normalized_cost = if span > 0.0 { ((hi - u) / span).clamp(0.0, 1.0) } else { 0.0 };
                TracePoint {
                    iteration: idx + 1,
                    utility: u,
                    best_utility: best,
                    normalized_cost,
                }
            })
            .collect();

        let total = utilities.len();
        let converged_at = if total - last_improvement >= CONFIRMATION_WINDOW {
            last_improvement
        } else {
            total
        };
        ConvergenceTrace { points, converged_at }
    }

    pub fn final_cost(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.normalized_cost)
    }

    pub fn best_utility(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.best_utility)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_iteration() {
        let t = ConvergenceTrace::from_utilities(&[5.0]);
        assert_eq!(t.converged_at, 1);
        assert_eq!(t.points.len(), 1);
        assert_eq!(t.final_cost(), 0.0);
    }

    #[test]
    fn cost_and_convergence() {
        let mut u = vec![1.0, 3.0, 2.0, 5.0];
        u.extend(std::iter::repeat_n(4.0, 12));
        let t = ConvergenceTrace::from_utilities(&u);
        assert_eq!(t.converged_at, 4);
        assert_eq!(t.points[0].normalized_cost, 1.0);
        assert_eq!(t.points[3].normalized_cost, 0.0);
        assert_eq!(t.final_cost(), 0.25);
        assert_eq!(t.best_utility(), 5.0);
        assert!(t.points.windows(2).all(|w| w[0].best_utility <= w[1].best_utility));
    }

    #[test]
    fn late_improvement_is_unconfirmed() {
        let mut u = vec![1.0; 15];
        u[12] = 2.0;
        let t = ConvergenceTrace::from_utilities(&u);
        assert_eq!(t.converged_at, 15);
    }
}
