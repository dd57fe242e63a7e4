//! Physical link: driver → EML (intensity and chirp) → SSMF (loss and
//! chromatic dispersion) → PIN/TIA (square law and noise).

mod detect;
mod eml;
mod fiber;
pub mod filter;
mod response;

pub use detect::{detect, noise_bandwidth, overload_factor, Detected};
pub use eml::{eml_modulate, EmlOutput};
pub use fiber::{beta2, dispersion_coefficient, dispersion_memory_samples, fiber_propagate};
pub use response::{fading_phase, imdd_response, notch_frequencies, SPEED_OF_LIGHT};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dmt::{Domain, WaveformBuffer};
use crate::dsp::{fft_in_place, ifft_in_place, watts_to_dbm};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Nonlinearity {
    Off,
    /// u → s·tanh(u/s) on the normalized drive before the power mapping.
    Tanh { saturation: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmlParams {
    pub wavelength_nm: f64,
    /// Modulator 3-dB bandwidth, GHz; `None` for an ideal modulator.
    pub bandwidth_ghz: Option<f64>,
    /// Driver amplifier 3-dB bandwidth, GHz.
    pub driver_bandwidth_ghz: Option<f64>,
    /// Henry factor.
    pub chirp_alpha: f64,
    /// Intensity modulation depth reached at drive = ±`drive_full_scale`.
    pub modulation_index: f64,
    /// Drive amplitude corresponding to full modulation depth.
    pub drive_full_scale: f64,
    pub launch_power_dbm: f64,
    /// DC bias, volts. Recorded for provenance only.
    pub bias_v: f64,
    pub nonlinearity: Nonlinearity,
    /// Power floor as a fraction of the mean power.
    pub clamp_floor: f64,
}

impl EmlParams {
    pub fn o_band() -> Self {
        Self {
            wavelength_nm: 1309.0,
            bandwidth_ghz: Some(25.0),
            driver_bandwidth_ghz: Some(30.0),
            chirp_alpha: 0.7,
            modulation_index: 0.8,
            drive_full_scale: 1.0,
            launch_power_dbm: 2.5,
            bias_v: -1.2,
            nonlinearity: Nonlinearity::Off,
            clamp_floor: 1e-3,
        }
    }

    pub fn c_band() -> Self {
        Self { wavelength_nm: 1565.4, launch_power_dbm: -2.0, bias_v: -1.05, ..Self::o_band() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.modulation_index > 0.0 && self.modulation_index <= 1.0) {
            return Err(Error::Config(format!("modulation index {} outside (0, 1]", self.modulation_index)));
        }
        if self.bandwidth_ghz.is_some_and(|b| b <= 0.0) || self.driver_bandwidth_ghz.is_some_and(|b| b <= 0.0) {
            return Err(Error::Config("modulator bandwidths must be positive".into()));
        }
        if self.launch_power_dbm > 6.0 {
            return Err(Error::Config(format!("launch power {} dBm above the +6 dBm cap", self.launch_power_dbm)));
        }
        if !(self.drive_full_scale > 0.0) || !(self.clamp_floor > 0.0) {
            return Err(Error::Config("drive full scale and clamp floor must be positive".into()));
        }
        if let Nonlinearity::Tanh { saturation } = self.nonlinearity {
            if !(saturation > 0.0) {
                return Err(Error::Config("tanh saturation must be positive".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiberParams {
    pub length_km: f64,
    /// Fixed D in ps/(nm·km); otherwise derived from the slope model.
    pub dispersion_override: Option<f64>,
    pub loss_db_per_km: f64,
    pub zero_disp_nm: f64,
    /// ps/(nm²·km).
    pub disp_slope: f64,
    /// Samples of raised-cosine bridge on each side of the record.
    pub guard_samples: usize,
}

impl Default for FiberParams {
    fn default() -> Self {
        Self {
            length_km: 0.0,
            dispersion_override: None,
            loss_db_per_km: 0.2,
            zero_disp_nm: 1310.0,
            disp_slope: 0.092,
            guard_samples: 1024,
        }
    }
}

impl FiberParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.length_km >= 0.0) || !(self.loss_db_per_km >= 0.0) {
            return Err(Error::Config("fiber length and loss must be nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReceiverParams {
    pub pd_bandwidth_ghz: Option<f64>,
    /// A/W.
    pub responsivity: f64,
    /// Input-referred thermal noise current density, pA/√Hz.
    pub thermal_noise_pa: f64,
    pub shot_noise: bool,
    /// Received power above which the TIA overload penalty applies, dBm.
    pub tia_overload_dbm: f64,
    pub overload_slope_db_per_db: f64,
    pub voa_db: f64,
    /// Fixed loss in front of the diode (VOA at minimum attenuation), dB.
    pub insertion_loss_db: f64,
    /// Normalize the AC output to unit RMS.
    pub agc: bool,
}

impl Default for ReceiverParams {
    fn default() -> Self {
        Self {
            pd_bandwidth_ghz: Some(35.0),
            responsivity: 0.8,
            thermal_noise_pa: 18.0,
            shot_noise: true,
            tia_overload_dbm: -3.0,
            overload_slope_db_per_db: 1.5,
            voa_db: 0.0,
            insertion_loss_db: 0.0,
            agc: true,
        }
    }
}

impl ReceiverParams {
    pub fn validate(&self) -> Result<()> {
        let nonneg = [
            self.responsivity,
            self.thermal_noise_pa,
            self.overload_slope_db_per_db,
            self.voa_db,
            self.insertion_loss_db,
        ];
        if nonneg.iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::Config("receiver parameters must be nonnegative".into()));
        }
        if self.pd_bandwidth_ghz.is_some_and(|b| b <= 0.0) {
            return Err(Error::Config("photodiode bandwidth must be positive".into()));
        }
        Ok(())
    }
}

/// Received power from the loss budget alone:
/// launch − loss·L − VOA − insertion, in dBm.
pub fn received_power_dbm(eml: &EmlParams, fiber: &FiberParams, rx: &ReceiverParams) -> f64 {
    eml.launch_power_dbm - fiber.loss_db_per_km * fiber.length_km - rx.voa_db - rx.insertion_loss_db
}

/// The complete optical path for one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Link {
    pub eml: EmlParams,
    pub fiber: FiberParams,
    pub rx: ReceiverParams,
    /// Simulation rate of the optical section relative to the DMT rate (1 or 2).
    pub oversample: usize,
}

#[derive(Debug, Clone)]
pub struct LinkOutput {
    pub current: WaveformBuffer,
    /// Loss-budget received power, dBm.
    pub p_rec_dbm: f64,
    /// Received power measured on the simulated field, dBm.
    pub measured_p_rec_dbm: f64,
    pub clamp_fraction: f64,
}

impl Link {
    pub fn p_rec_dbm(&self) -> f64 {
        received_power_dbm(&self.eml, &self.fiber, &self.rx)
    }

    /// Drive waveform → photocurrent at the drive's sample rate.
    pub fn transmit(&self, drive: &WaveformBuffer, seed: u64) -> Result<LinkOutput> {
        if !(self.oversample == 1 || self.oversample == 2) {
            return Err(Error::Config(format!("oversample factor {} not supported", self.oversample)));
        }
        let drive = if self.oversample > 1 { resample(drive, self.oversample, 1) } else { drive.clone() };
        let modulated = eml_modulate(&drive, &self.eml)?;
        let propagated = fiber_propagate(&modulated.field, &self.fiber, self.eml.wavelength_nm)?;
        let (current, p_mean) = detect::photocurrent(&propagated, &self.rx)?;
        let mut current = WaveformBuffer { samples: current, sample_rate: propagated.sample_rate, domain: Domain::Photocurrent };
        if self.oversample > 1 {
            current = resample(&current, 1, self.oversample);
        }
        detect::add_noise(&mut current.samples, current.sample_rate, &self.rx, p_mean, seed);
        detect::ac_couple(&mut current.samples, self.rx.agc);
        Ok(LinkOutput {
            current,
            p_rec_dbm: self.p_rec_dbm(),
            measured_p_rec_dbm: watts_to_dbm(p_mean),
            clamp_fraction: modulated.clamp_fraction,
        })
    }
}

/// Band-limited resampling by `up/down` (one of them 1) through the DFT:
/// zero-padding the spectrum to interpolate, truncating it to decimate.
pub fn resample(wave: &WaveformBuffer, up: usize, down: usize) -> WaveformBuffer {
    let n = wave.len();
    let m = n * up / down;
    let mut spec = wave.samples.clone();
    fft_in_place(&mut spec);
    let mut out = vec![Complex64::new(0.0, 0.0); m];
    let keep = n.min(m);
    let half = keep / 2;
    out[..half].copy_from_slice(&spec[..half]);
    for i in 1..=keep - half - 1 {
        out[m - i] = spec[n - i];
    }
    // split the shared Nyquist bin when interpolating
    if m > n && keep % 2 == 0 {
        let nyq = spec[half] * 0.5;
        out[half] = nyq;
        out[m - half] = nyq;
    } else if keep % 2 == 0 {
        out[half] = spec[half];
    }
    ifft_in_place(&mut out);
    let g = m as f64 / n as f64;
    let real = wave.samples.iter().all(|v| v.im == 0.0);
    for v in out.iter_mut() {
        *v *= g;
        if real {
            v.im = 0.0;
        }
    }
    WaveformBuffer { samples: out, sample_rate: wave.sample_rate * up as f64 / down as f64, domain: wave.domain }
}
