use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::ScenarioConfig;
use super::point::PointResult;
use super::sweep::{sweep_csv, SweepRow, SweepSpec};
use crate::error::Result;
use crate::loading::loading_csv;

/// Provenance record written next to every CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    /// Every resolved scenario key, as `defaults` would print it.
    pub parameters: BTreeMap<String, String>,
    pub config: ScenarioConfig,
    pub sweep: Option<SweepInfo>,
    pub outputs: Vec<String>,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepInfo {
    pub variable: String,
    pub values: Vec<f64>,
}

impl Manifest {
    pub fn new(command: &str, cfg: &ScenarioConfig) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            seed: cfg.seed,
            parameters: cfg.to_pairs().into_iter().collect(),
            config: cfg.clone(),
            sweep: None,
            outputs: Vec::new(),
            failures: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }
}

fn write(dir: &Path, name: &str, text: &str, outputs: &mut Vec<String>) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, text)?;
    outputs.push(name.to_string());
    Ok(path)
}

/// Single-row result CSV, per-subcarrier loading CSV and manifest.
pub fn write_point(dir: &Path, cfg: &ScenarioConfig, result: &PointResult) -> Result<Manifest> {
    let mut m = Manifest::new("run", cfg);
    let row = SweepRow {
        x: cfg.length_km,
        pre_fec_ber: result.report.pre_fec_ber,
        fec_pass: result.report.fec_pass,
        p_rec_dbm: result.report.p_rec_dbm,
        gross_bits: result.plan.as_ref().map_or(0, |p| p.gross_bits()),
        seed: result.seed,
        error: result.failure.clone(),
        result: None,
    };
    write(dir, "run.csv", &sweep_csv(&[row]), &mut m.outputs)?;
    if let (Some(snr), Some(plan)) = (&result.snr, &result.plan) {
        write(dir, "loading.csv", &loading_csv(snr, plan)?, &mut m.outputs)?;
    }
    m.failures.extend(result.failure.clone());
    m.outputs.push("manifest.json".into());
    write(dir, "manifest.json", &m.to_json(), &mut Vec::new())?;
    Ok(m)
}

/// Sweep CSV and manifest.
pub fn write_sweep(dir: &Path, spec: &SweepSpec, rows: &[SweepRow]) -> Result<Manifest> {
    let mut m = Manifest::new("sweep", &spec.base);
    m.sweep = Some(SweepInfo {
        variable: match spec.variable {
            super::sweep::SweepVar::ReceivedPower => "received_power_dbm".into(),
            super::sweep::SweepVar::Distance => "distance_km".into(),
        },
        values: spec.values.clone(),
    });
    write(dir, "sweep.csv", &sweep_csv(rows), &mut m.outputs)?;
    m.failures = rows.iter().filter_map(|r| r.error.as_ref().map(|e| format!("x={}: {e}", r.x))).collect();
    m.outputs.push("manifest.json".into());
    write(dir, "manifest.json", &m.to_json(), &mut Vec::new())?;
    Ok(m)
}
