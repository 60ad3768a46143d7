//! Fair channel assignment for secondary users in cognitive-radio home area
//! networks.
//!
//! The crate is organised bottom-up:
//!
//! * [`topology`] draws scenarios and derives the interference model.
//! * [`utility`] holds assignments, the feasibility check and the
//!   sum / min / proportional-fair utilities.
//! * [`acs`] is the hierarchical ant colony allocator.
//! * [`baselines`] has random, greedy colouring and exhaustive allocators.
//! * [`harness`] runs sweeps and convergence studies and writes CSV.

pub mod acs;
pub mod baselines;
pub mod error;
pub mod harness;
pub mod topology;
pub mod utility;

pub use acs::{allocate, AcsOutcome, AcsParams, AdmissionPolicy, AdmitAll, ConvergenceTrace, PheromoneTensor};
pub use baselines::{brute_force_optimal, csgc_assignment, random_assignment, AlgorithmKind, Optimum, PerUserCap};
pub use error::{Error, Result};
pub use harness::{run_convergence, run_sweep, SweepResult, SweepSpec, SweepVariable};
pub use topology::{build_model, coverage_radius, generate_scenario, RewardMode, Scenario, ScenarioConfig, SpectrumModel};
pub use utility::{evaluate, is_feasible, reward_vector, utility, Assignment, RewardVector, UtilityKind};
