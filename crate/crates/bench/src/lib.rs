//! Shared fixtures for the criterion benches in `benches/`.

use hanspec::{build_model, generate_scenario, RewardMode, Scenario, ScenarioConfig, SpectrumModel};

/// Five NANs of twenty HGWs, ten PUs, ten channels.
pub fn paper_scale(seed: u64) -> (Scenario, SpectrumModel) {
    fixture(&ScenarioConfig::default(), seed)
}

pub fn fixture(cfg: &ScenarioConfig, seed: u64) -> (Scenario, SpectrumModel) {
    let scn = generate_scenario(cfg, seed).expect("valid bench config");
    let model = build_model(&scn, RewardMode::Coverage);
    (scn, model)
}
