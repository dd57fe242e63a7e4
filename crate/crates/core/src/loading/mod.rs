//! Per-subcarrier SNR estimation, water-filling bit/power loading and the
//! analytic QAM bit-error oracle.

mod ber;
mod estimate;
mod waterfill;

pub use ber::{analytic_ber, analytic_ber_bits};
pub use estimate::{estimate_snr, estimate_snr_pilots};
pub(crate) use estimate::ls_gain;
pub use waterfill::{waterfill, waterfill_with, LoadingOptions};

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::dsp::db;
use crate::error::{Error, Result};

/// Linear SNR ceiling; noiseless estimates saturate here (60 dB).
pub const SNR_CAP: f64 = 1e6;
/// Reported dB value for dead subcarriers.
pub const SNR_FLOOR_DB: f64 = -60.0;

/// Estimated linear SNR of subcarriers 1..n-1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnrProfile {
    snr: Vec<f64>,
    pub frames_averaged: usize,
    pub sample_rate: f64,
}

impl SnrProfile {
    pub fn new(snr: Vec<f64>, frames_averaged: usize, sample_rate: f64) -> Result<Self> {
        if let Some(bad) = snr.iter().find(|s| !(s.is_finite() && **s >= 0.0)) {
            return Err(Error::Config(format!("invalid SNR value {bad}")));
        }
        Ok(Self { snr, frames_averaged, sample_rate })
    }

    pub fn from_db(snr_db: &[f64]) -> Self {
        Self {
            snr: snr_db.iter().map(|d| 10f64.powf(d / 10.0).min(SNR_CAP)).collect(),
            frames_averaged: 0,
            sample_rate: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.snr.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snr.is_empty()
    }

    /// Linear SNR of subcarrier `k` (1-based).
    pub fn at(&self, k: usize) -> f64 {
        self.snr[k - 1]
    }

    pub fn linear(&self) -> &[f64] {
        &self.snr
    }

    /// SNR of subcarrier `k` in dB, clamped to [−60, 60].
    pub fn db_at(&self, k: usize) -> f64 {
        let s = self.at(k);
        if s <= 0.0 {
            SNR_FLOOR_DB
        } else {
            db(s).clamp(SNR_FLOOR_DB, db(SNR_CAP))
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { snr: self.snr.iter().map(|s| (s * factor).min(SNR_CAP)).collect(), ..self.clone() }
    }
}

/// Bit and power assignment for every subcarrier 1..n-1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubcarrierPlan {
    bits: Vec<u32>,
    power: Vec<f64>,
    pilot: Vec<bool>,
    /// Equal SNR margin over the gap achieved by every loaded subcarrier, dB.
    pub margin_db: f64,
    pub gap_db: f64,
}

impl SubcarrierPlan {
    /// `bits` on every non-pilot subcarrier, unit power everywhere.
    pub fn uniform(n_usable: usize, bits: u32, pilots: &[usize]) -> Self {
        let pilot: Vec<bool> = (1..=n_usable).map(|k| pilots.contains(&k)).collect();
        let bits = pilot.iter().map(|&p| if p { 0 } else { bits }).collect();
        Self { bits, power: vec![1.0; n_usable], pilot, margin_db: 0.0, gap_db: 0.0 }
    }

    pub fn from_parts(bits: Vec<u32>, power: Vec<f64>, pilot: Vec<bool>) -> Result<Self> {
        if bits.len() != power.len() || bits.len() != pilot.len() {
            return Err(Error::InputSize { expected: bits.len(), actual: power.len().min(pilot.len()) });
        }
        if let Some(b) = bits.iter().find(|&&b| b > crate::dmt::qam::MAX_BITS) {
            return Err(Error::Config(format!("{b} bits exceeds the largest constellation")));
        }
        if power.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::Config("plan powers must be finite and nonnegative".into()));
        }
        Ok(Self { bits, power, pilot, margin_db: 0.0, gap_db: 0.0 })
    }

    pub fn n_usable(&self) -> usize {
        self.bits.len()
    }

    pub fn bits_at(&self, k: usize) -> u32 {
        self.bits[k - 1]
    }

    pub fn power_at(&self, k: usize) -> f64 {
        self.power[k - 1]
    }

    pub fn is_pilot(&self, k: usize) -> bool {
        self.pilot[k - 1]
    }

    pub fn bits(&self) -> &[u32] {
        &self.bits
    }

    pub fn powers(&self) -> &[f64] {
        &self.power
    }

    /// Payload bits per DMT symbol (pilots excluded).
    pub fn gross_bits(&self) -> usize {
        self.bits.iter().zip(&self.pilot).filter(|(_, &p)| !p).map(|(&b, _)| b as usize).sum()
    }

    /// Subcarriers that carry data or pilots.
    pub fn active_count(&self) -> usize {
        self.bits.iter().zip(&self.pilot).filter(|(&b, &p)| b > 0 || p).count()
    }

    /// Sum of powers over active subcarriers.
    pub fn total_power(&self) -> f64 {
        self.bits
            .iter()
            .zip(&self.pilot)
            .zip(&self.power)
            .filter(|((&b, &p), _)| b > 0 || p)
            .map(|(_, &pw)| pw)
            .sum()
    }

    pub fn pilot_indices(&self) -> Vec<usize> {
        (1..=self.n_usable()).filter(|&k| self.is_pilot(k)).collect()
    }
}

/// CSV with columns `index,snr_db,bits,power`, one row per subcarrier.
pub fn loading_csv(snr: &SnrProfile, plan: &SubcarrierPlan) -> Result<String> {
    if snr.len() != plan.n_usable() {
        return Err(Error::InputSize { expected: plan.n_usable(), actual: snr.len() });
    }
    let mut out = String::from("index,snr_db,bits,power\n");
    for k in 1..=plan.n_usable() {
        writeln!(out, "{},{:.4},{},{:.6}", k, snr.db_at(k), plan.bits_at(k), plan.power_at(k)).unwrap();
    }
    Ok(out)
}
