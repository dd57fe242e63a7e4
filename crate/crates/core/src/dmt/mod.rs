//! DMT framing: constellation mapping, Hermitian-symmetric transforms,
//! cyclic prefix, clipping and converter quantization.

mod converter;
mod modem;
pub mod qam;

pub use converter::quantize;
pub use modem::{demodulate, demodulate_frames, map_bits, modulate, modulate_frames, pilot_symbol, synthesize};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Framing and converter parameters of the DMT modem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DmtParams {
    /// Number of subcarriers including DC; the transform size is twice this.
    pub n_subcarriers: usize,
    pub cp_len: usize,
    /// Hz.
    pub sample_rate: f64,
    /// Subcarrier indices carrying the fixed pilot sequence.
    pub pilot_indices: Vec<usize>,
    /// Hard clipping threshold relative to the nominal RMS. `f64::INFINITY`
    /// disables clipping.
    pub clip_ratio: f64,
    pub dac_bits: u32,
    pub adc_bits: u32,
    /// Frame energy (sum of |X_k|² over subcarriers 1..n-1) that the
    /// modulator maps to a unit-RMS waveform.
    pub reference_energy: f64,
}

impl Default for DmtParams {
    fn default() -> Self {
        Self {
            n_subcarriers: 256,
            cp_len: 16,
            sample_rate: 64e9,
            pilot_indices: default_pilots(256),
            clip_ratio: 3.2,
            dac_bits: 8,
            adc_bits: 8,
            reference_energy: 255.0,
        }
    }
}

/// Eight pilots spaced by n/8 starting at n/32: 8, 40, …, 232 for 256 subcarriers.
pub fn default_pilots(n_subcarriers: usize) -> Vec<usize> {
    let step = n_subcarriers / 8;
    let first = n_subcarriers / 32;
    (0..8).map(|i| first + i * step).filter(|&k| k >= 1 && k < n_subcarriers).collect()
}

impl DmtParams {
    pub fn with_sample_rate(sample_rate: f64) -> Self {
        Self { sample_rate, ..Self::default() }
    }

    pub fn fft_size(&self) -> usize {
        2 * self.n_subcarriers
    }

    /// Samples per DMT symbol including the cyclic prefix.
    pub fn symbol_len(&self) -> usize {
        self.fft_size() + self.cp_len
    }

    /// Number of subcarriers that can carry payload or pilots (1..n-1).
    pub fn n_usable(&self) -> usize {
        self.n_subcarriers - 1
    }

    /// Subcarrier spacing in Hz.
    pub fn spacing(&self) -> f64 {
        self.sample_rate / self.fft_size() as f64
    }

    pub fn subcarrier_frequency(&self, k: usize) -> f64 {
        k as f64 * self.spacing()
    }

    pub fn symbol_duration(&self) -> f64 {
        self.symbol_len() as f64 / self.sample_rate
    }

    pub fn is_pilot(&self, k: usize) -> bool {
        self.pilot_indices.contains(&k)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_subcarriers < 2 {
            return Err(Error::Config("n_subcarriers must be at least 2".into()));
        }
        if self.cp_len >= self.fft_size() {
            return Err(Error::Config("cp_len must be smaller than the transform size".into()));
        }
        if !(self.sample_rate > 0.0 && self.sample_rate.is_finite()) {
            return Err(Error::Config("sample_rate must be positive".into()));
        }
        if !(self.clip_ratio > 0.0) {
            return Err(Error::Config("clip_ratio must be positive".into()));
        }
        if !(self.reference_energy > 0.0 && self.reference_energy.is_finite()) {
            return Err(Error::Config("reference_energy must be positive".into()));
        }
        if let Some(&k) = self
            .pilot_indices
            .iter()
            .find(|&&k| k == 0 || k >= self.n_subcarriers)
        {
            return Err(Error::Config(format!("pilot index {k} outside 1..{}", self.n_subcarriers - 1)));
        }
        Ok(())
    }
}

/// Complex symbols on subcarriers 1..n-1. DC and Nyquist are implicitly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyFrame {
    symbols: Vec<Complex64>,
    /// Set once per-subcarrier power scaling from a loading plan was applied.
    pub power_scaled: bool,
}

impl FrequencyFrame {
    pub fn zeros(n_usable: usize) -> Self {
        Self { symbols: vec![Complex64::new(0.0, 0.0); n_usable], power_scaled: false }
    }

    /// Build from symbols ordered by subcarrier index starting at 1.
    pub fn from_symbols(symbols: Vec<Complex64>) -> Self {
        Self { symbols, power_scaled: false }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Symbol on subcarrier `k` (1-based).
    pub fn get(&self, k: usize) -> Complex64 {
        self.symbols[k - 1]
    }

    pub fn set(&mut self, k: usize, value: Complex64) {
        self.symbols[k - 1] = value;
    }

    pub fn symbols(&self) -> &[Complex64] {
        &self.symbols
    }

    pub fn symbols_mut(&mut self) -> &mut [Complex64] {
        &mut self.symbols
    }

    /// Iterate `(subcarrier index, symbol)`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        self.symbols.iter().enumerate().map(|(i, &x)| (i + 1, x))
    }

    /// Sum of |X_k|² over subcarriers 1..n-1.
    pub fn energy(&self) -> f64 {
        self.symbols.iter().map(|x| x.norm_sqr()).sum()
    }

    /// Energy of the full Hermitian-extended spectrum.
    pub fn hermitian_energy(&self) -> f64 {
        2.0 * self.energy()
    }
}

/// What physical quantity a waveform's samples represent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Domain {
    ElectricalVoltage,
    OpticalField,
    Photocurrent,
}

/// Uniformly sampled signal. Electrical signals keep a zero imaginary part.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveformBuffer {
    pub samples: Vec<Complex64>,
    pub sample_rate: f64,
    pub domain: Domain,
}

impl WaveformBuffer {
    pub fn from_real(samples: impl IntoIterator<Item = f64>, sample_rate: f64, domain: Domain) -> Self {
        Self {
            samples: samples.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
            sample_rate,
            domain,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn real(&self) -> Vec<f64> {
        self.samples.iter().map(|v| v.re).collect()
    }

    pub fn rms(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        (self.samples.iter().map(|v| v.norm_sqr()).sum::<f64>() / self.samples.len() as f64).sqrt()
    }

    /// Mean of |x|², i.e. optical power in watts for a field.
    pub fn mean_power(&self) -> f64 {
        self.rms().powi(2)
    }

    pub fn slice(&self, start: usize, len: usize) -> Self {
        Self {
            samples: self.samples[start..start + len].to_vec(),
            sample_rate: self.sample_rate,
            domain: self.domain,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_pilot_layout() {
        assert_eq!(default_pilots(256), vec![8, 40, 72, 104, 136, 168, 200, 232]);
    }

    #[test]
    fn validate_rejects_bad_parameters() {
        let mut p = DmtParams::default();
        assert!(p.validate().is_ok());
        p.cp_len = 512;
        assert!(p.validate().is_err());
        let mut p = DmtParams::default();
        p.pilot_indices.push(0);
        assert!(p.validate().is_err());
        let mut p = DmtParams::default();
        p.pilot_indices.push(256);
        assert!(p.validate().is_err());
        let mut p = DmtParams::default();
        p.clip_ratio = 0.0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn derived_quantities() {
        let p = DmtParams::default();
        assert_eq!(p.fft_size(), 512);
        assert_eq!(p.symbol_len(), 528);
        assert_eq!(p.spacing(), 125e6);
    }
}
