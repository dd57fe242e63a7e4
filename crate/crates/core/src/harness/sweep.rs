use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ScenarioConfig;
use super::point::{run_point, PointResult, FAILED_BER};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepVar {
    ReceivedPower,
    Distance,
}

impl FromStr for SweepVar {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "received_power_dbm" | "power" | "p_rec" => Ok(SweepVar::ReceivedPower),
            "distance_km" | "distance" => Ok(SweepVar::Distance),
            other => Err(Error::Config(format!("unknown sweep variable '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub variable: SweepVar,
    pub values: Vec<f64>,
    pub base: ScenarioConfig,
}

impl SweepSpec {
    pub fn new(variable: SweepVar, values: Vec<f64>, base: ScenarioConfig) -> Result<Self> {
        let s = Self { variable, values, base };
        s.validate()?;
        Ok(s)
    }

    /// At least two finite values, strictly increasing or strictly decreasing.
    pub fn validate(&self) -> Result<()> {
        let v = &self.values;
        if v.len() < 2 || v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Config("a sweep needs at least two finite values".into()));
        }
        let up = v.windows(2).all(|w| w[1] > w[0]);
        let down = v.windows(2).all(|w| w[1] < w[0]);
        if !(up || down) {
            return Err(Error::Config("sweep values must be strictly monotone".into()));
        }
        self.base.validate()
    }

    /// Configuration of point `i`.
    pub fn point_config(&self, i: usize) -> ScenarioConfig {
        let mut cfg = self.base.clone();
        match self.variable {
            SweepVar::ReceivedPower => cfg.target_p_rec_dbm = Some(self.values[i]),
            SweepVar::Distance => cfg.length_km = self.values[i],
        }
        cfg
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub x: f64,
    pub pre_fec_ber: f64,
    pub fec_pass: bool,
    pub p_rec_dbm: f64,
    pub gross_bits: usize,
    pub seed: u64,
    /// Error or failure text when the point produced no measurement.
    pub error: Option<String>,
    #[serde(skip)]
    pub result: Option<PointResult>,
}

impl SweepRow {
    fn from_result(x: f64, cfg: &ScenarioConfig, r: Result<PointResult>) -> Self {
        match r {
            Ok(p) => Self {
                x,
                pre_fec_ber: p.report.pre_fec_ber,
                fec_pass: p.report.fec_pass,
                p_rec_dbm: p.report.p_rec_dbm,
                gross_bits: p.plan.as_ref().map_or(0, |pl| pl.gross_bits()),
                seed: p.seed,
                error: p.failure.clone(),
                result: Some(p),
            },
            Err(e) => Self {
                x,
                pre_fec_ber: FAILED_BER,
                fec_pass: false,
                p_rec_dbm: cfg.link().map_or(f64::NAN, |l| l.p_rec_dbm()),
                gross_bits: 0,
                seed: cfg.seed,
                error: Some(e.to_string()),
                result: None,
            },
        }
    }

    pub fn failed(&self) -> bool {
        self.error.is_some()
    }
}

/// Run every point on a pool of `threads` workers (0 = all cores). Rows come
/// back in input order; a failing point becomes a flagged row.
pub fn sweep(spec: &SweepSpec, threads: usize) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    Ok(pool.install(|| {
        (0..spec.values.len())
            .into_par_iter()
            .map(|i| {
                let cfg = spec.point_config(i);
                SweepRow::from_result(spec.values[i], &cfg, run_point(&cfg))
            })
            .collect()
    }))
}

pub const SWEEP_CSV_HEADER: &str = "x,pre_fec_ber,fec_pass,p_rec_dbm,gross_bits,seed";

/// CSV with columns `x,pre_fec_ber,fec_pass,p_rec_dbm,gross_bits,seed`.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from(SWEEP_CSV_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(s, "{},{:e},{},{:.4},{},{}", r.x, r.pre_fec_ber, r.fec_pass, r.p_rec_dbm, r.gross_bits, r.seed);
    }
    s
}
