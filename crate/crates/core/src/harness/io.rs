//! Scenario files and CSV output.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::topology::{Point, PrimaryUser, Scenario, SecondaryUser};

use super::{SeededTrace, SweepResult};

pub const SWEEP_HEADER: [&str; 9] = ["variable", "value", "algorithm", "utility", "mean", "std", "min", "max", "runtime_ms"];
pub const TRACE_HEADER: [&str; 4] = ["seed", "iteration", "best_utility", "normalized_cost"];

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    side: f64,
    channels: usize,
    d_min: f64,
    d_max: f64,
    primaries: Vec<PrimaryRecord>,
    secondaries: Vec<SecondaryRecord>,
    seed: u64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PrimaryRecord {
    x: f64,
    y: f64,
    channel: usize,
    dp: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SecondaryRecord {
    x: f64,
    y: f64,
    nan: usize,
}

impl From<&Scenario> for ScenarioFile {
    fn from(s: &Scenario) -> Self {
        ScenarioFile {
            side: s.side,
            channels: s.channels,
            d_min: s.d_min,
            d_max: s.d_max,
            primaries: s
                .primaries
                .iter()
                .map(|p| PrimaryRecord {
                    x: p.position.x,
                    y: p.position.y,
                    channel: p.channel,
                    dp: p.protection_radius,
                })
                .collect(),
            secondaries: s
                .secondaries
                .iter()
                .map(|su| SecondaryRecord {
                    x: su.position.x,
                    y: su.position.y,
                    nan: su.nan_id,
                })
                .collect(),
            seed: s.seed,
        }
    }
}

impl From<ScenarioFile> for Scenario {
    fn from(f: ScenarioFile) -> Self {
        Scenario {
            side: f.side,
            channels: f.channels,
            d_min: f.d_min,
            d_max: f.d_max,
            primaries: f
                .primaries
                .into_iter()
                .enumerate()
                .map(|(id, p)| PrimaryUser {
                    id,
                    position: Point::new(p.x, p.y),
                    channel: p.channel,
                    protection_radius: p.dp,
                })
                .collect(),
            secondaries: f
                .secondaries
                .into_iter()
                .enumerate()
                .map(|(id, s)| SecondaryUser {
                    id,
                    nan_id: s.nan,
                    position: Point::new(s.x, s.y),
                })
                .collect(),
            seed: f.seed,
        }
    }
}

pub fn scenario_to_json(scn: &Scenario) -> String {
    serde_json::to_string_pretty(&ScenarioFile::from(scn)).expect("scenario serializes")
}

pub fn scenario_from_json(text: &str) -> std::result::Result<Scenario, serde_json::Error> {
    serde_json::from_str::<ScenarioFile>(text).map(Scenario::from)
}

pub fn save_scenario(scn: &Scenario, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut text = scenario_to_json(scn);
    text.push('\n');
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads and validates a scenario file. Unknown fields are rejected.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let scn = scenario_from_json(&text).map_err(|source| Error::Parse {
        path: path.to_path_buf(),
        source,
    })?;
    scn.validate()?;
    Ok(scn)
}

pub fn write_sweep_csv<W: Write>(result: &SweepResult, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for row in &result.rows {
        w.write_record([
            row.variable.as_str().to_string(),
            row.value.to_string(),
            row.algorithm.as_str().to_string(),
            row.utility.as_str().to_string(),
            row.mean.to_string(),
            row.std.to_string(),
            row.min.to_string(),
            row.max.to_string(),
            row.runtime_ms.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_trace_csv<W: Write>(traces: &[SeededTrace], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER)?;
    for t in traces {
        for p in &t.trace.points {
            w.write_record([
                t.seed.to_string(),
                p.iteration.to_string(),
                p.best_utility.to_string(),
                p.normalized_cost.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn emit(path: &Path, body: impl FnOnce(BufWriter<File>) -> csv::Result<()>) -> Result<()> {
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    body(BufWriter::new(file)).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })
}

pub fn emit_sweep_csv(result: &SweepResult, path: impl AsRef<Path>) -> Result<()> {
    emit(path.as_ref(), |w| write_sweep_csv(result, w))
}

pub fn emit_trace_csv(traces: &[SeededTrace], path: impl AsRef<Path>) -> Result<()> {
    emit(path.as_ref(), |w| write_trace_csv(traces, w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{generate_scenario, ScenarioConfig};

    #[test]
    fn round_trip_is_exact() {
        let scn = generate_scenario(&ScenarioConfig::default(), 11).unwrap();
        let back = scenario_from_json(&scenario_to_json(&scn)).unwrap();
        assert_eq!(back, scn);
    }

    #[test]
    fn field_names() {
        let scn = generate_scenario(
            &ScenarioConfig {
                n_nans: 1,
                sus_per_nan: 1,
                n_pus: 1,
                ..Default::default()
            },
            0,
        )
        .unwrap();
        let v: serde_json::Value = serde_json::from_str(&scenario_to_json(&scn)).unwrap();
        let mut keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        keys.sort();
        assert_eq!(keys, ["channels", "d_max", "d_min", "primaries", "secondaries", "seed", "side"]);
        let mut pu: Vec<&str> = v["primaries"][0].as_object().unwrap().keys().map(String::as_str).collect();
        pu.sort();
        assert_eq!(pu, ["channel", "dp", "x", "y"]);
        let mut su: Vec<&str> = v["secondaries"][0].as_object().unwrap().keys().map(String::as_str).collect();
        su.sort();
        assert_eq!(su, ["nan", "x", "y"]);
    }

    #[test]
    fn missing_and_unknown_fields_are_rejected() {
        let missing = r#"{"side": 10, "channels": 1, "d_min": 1, "d_max": 4, "primaries": [], "secondaries": []}"#;
        let err = scenario_from_json(missing).unwrap_err();
        assert!(err.to_string().contains("seed"), "{err}");

        let extra = r#"{"side": 10, "channels": 1, "d_min": 1, "d_max": 4, "primaries": [],
            "secondaries": [{"x": 1, "y": 1, "nan": 0, "power": 3}], "seed": 0}"#;
        let err = scenario_from_json(extra).unwrap_err();
        assert!(err.to_string().contains("power"), "{err}");
        assert_eq!(err.line(), 2);
    }
}
