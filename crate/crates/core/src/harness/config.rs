//! Flat `key=value` scenario files.
//!
//! Keys are dotted (`channel.loss_db_per_km=0.20`). A key prefixed with
//! `oband.` or `cband.` only applies when that band is selected and wins over
//! the unprefixed key. `include=<path>` merges another file first, relative to
//! the including file. `#` starts a comment.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::{EmlParams, FiberParams, Link, Nonlinearity, ReceiverParams};
use crate::dmt::DmtParams;
use crate::error::{Error, Result};
use crate::rx::{DEFAULT_FEC_OVERHEAD, DEFAULT_FORGETTING, FEC_LIMIT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Band {
    O,
    C,
}

impl Band {
    fn scope(self) -> &'static str {
        match self {
            Band::O => "oband.",
            Band::C => "cband.",
        }
    }
}

impl FromStr for Band {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "O" | "OBAND" | "O-BAND" => Ok(Band::O),
            "C" | "CBAND" | "C-BAND" => Ok(Band::C),
            other => Err(Error::Config(format!("unknown band '{other}'"))),
        }
    }
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Band::O => "O",
            Band::C => "C",
        })
    }
}

/// Ethernet data-rate modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DataRate {
    G25,
    G50,
    G100,
}

impl DataRate {
    /// Net payload rate, bit/s.
    pub fn net_bps(self) -> f64 {
        match self {
            DataRate::G25 => 25.781_25e9,
            DataRate::G50 => 51.5625e9,
            DataRate::G100 => 103.125e9,
        }
    }

    /// DMT sample rate used for the mode.
    pub fn sample_rate(self) -> f64 {
        match self {
            DataRate::G25 => 42e9,
            DataRate::G50 | DataRate::G100 => 64e9,
        }
    }
}

impl FromStr for DataRate {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().trim_end_matches("BPS").trim_end_matches("BIT/S") {
            "25G" | "25" => Ok(DataRate::G25),
            "50G" | "50" => Ok(DataRate::G50),
            "100G" | "100" => Ok(DataRate::G100),
            other => Err(Error::Config(format!("unknown data rate '{other}'"))),
        }
    }
}

impl fmt::Display for DataRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DataRate::G25 => "25G",
            DataRate::G50 => "50G",
            DataRate::G100 => "100G",
        })
    }
}

/// How the attenuator is set when the fiber length changes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VoaMode {
    /// Attenuation stays at `scenario.voa_db`.
    Fixed,
    /// Attenuate down to `receiver.optimum_dbm` while the budget allows it.
    HoldOptimum,
}

impl FromStr for VoaMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "fixed" | "minimum" => Ok(VoaMode::Fixed),
            "hold_optimum" => Ok(VoaMode::HoldOptimum),
            other => Err(Error::Config(format!("unknown VOA mode '{other}'"))),
        }
    }
}

impl fmt::Display for VoaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VoaMode::Fixed => "fixed",
            VoaMode::HoldOptimum => "hold_optimum",
        })
    }
}

/// Every parameter of one measurement point, fully resolved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub band: Band,
    pub rate: DataRate,
    pub length_km: f64,
    pub voa_db: f64,
    /// Set the attenuator so the loss budget lands on this power.
    pub target_p_rec_dbm: Option<f64>,
    pub voa_mode: VoaMode,
    /// Received power the attenuator aims for under [`VoaMode::HoldOptimum`].
    pub optimum_p_rec_dbm: f64,
    pub seed: u64,
    pub output: PathBuf,

    pub training_frames: usize,
    pub probe_frames: usize,
    /// Payload frames; 0 sizes the burst from `min_payload_bits`.
    pub payload_frames: usize,
    pub min_payload_bits: u64,
    pub fec_limit: f64,
    pub fec_overhead: f64,
    pub clip_search: bool,
    pub clip_min: f64,
    pub clip_max: f64,
    pub clip_tolerance: f64,
    pub gap_db: f64,
    pub max_bits: u32,
    pub forgetting: f64,
    /// Samples the FFT window starts inside the cyclic prefix.
    pub timing_backoff: usize,
    /// CW samples before the preamble and after the payload.
    pub guard_samples: usize,

    pub dmt: DmtParams,
    pub eml: EmlParams,
    pub fiber: FiberParams,
    pub rx: ReceiverParams,
    pub oversample: usize,
}

/// Receiver noise density fitted by the default calibration, pA/√Hz.
pub const CALIBRATED_NOISE_PA: f64 = 64.43;
/// C-band Henry factor fitted by the default calibration.
pub const CALIBRATED_C_BAND_ALPHA: f64 = -0.555;

impl ScenarioConfig {
    /// Defaults for a band and rate.
    pub fn new(band: Band, rate: DataRate) -> Self {
        // noise density and C-band chirp come from `calibrate` on the default targets
        let (eml, loss, insertion) = match band {
            Band::O => (EmlParams::o_band(), 0.28, 0.0),
            Band::C => (EmlParams { chirp_alpha: CALIBRATED_C_BAND_ALPHA, ..EmlParams::c_band() }, 0.20, 1.0),
        };
        Self {
            band,
            rate,
            length_km: 0.0,
            voa_db: 0.0,
            target_p_rec_dbm: None,
            voa_mode: VoaMode::HoldOptimum,
            optimum_p_rec_dbm: -3.0,
            seed: 1,
            output: PathBuf::from("out"),
            training_frames: 32,
            probe_frames: 64,
            payload_frames: 0,
            min_payload_bits: 1_000_000,
            fec_limit: FEC_LIMIT,
            fec_overhead: DEFAULT_FEC_OVERHEAD,
            clip_search: true,
            clip_min: 2.0,
            clip_max: 4.5,
            clip_tolerance: 0.05,
            gap_db: 6.0,
            max_bits: 8,
            forgetting: DEFAULT_FORGETTING,
            timing_backoff: 4,
            guard_samples: 256,
            dmt: DmtParams::with_sample_rate(rate.sample_rate()),
            eml,
            fiber: FiberParams { loss_db_per_km: loss, ..FiberParams::default() },
            rx: ReceiverParams {
                insertion_loss_db: insertion,
                thermal_noise_pa: CALIBRATED_NOISE_PA,
                ..ReceiverParams::default()
            },
            oversample: 1,
        }
    }

    /// Parse a scenario file.
    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_pairs(&read_pairs(path)?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_pairs(&parse_pairs(text, None)?)
    }

    /// Build from ordered key/value pairs. Later pairs override earlier ones.
    pub fn from_pairs(pairs: &[(String, String)]) -> Result<Self> {
        let map: BTreeMap<&str, &str> = pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
        let band: Band = map.get("scenario.band").copied().unwrap_or("C").parse()?;
        let rate: DataRate = map.get("scenario.rate").copied().unwrap_or("100G").parse()?;
        let mut cfg = Self::new(band, rate);
        let scope = band.scope();
        let other = match band {
            Band::O => Band::C.scope(),
            Band::C => Band::O.scope(),
        };
        for (k, v) in pairs {
            if !k.starts_with("oband.") && !k.starts_with("cband.") {
                cfg.set(k, v)?;
            }
        }
        for (k, v) in pairs {
            if let Some(rest) = k.strip_prefix(scope) {
                cfg.set(rest, v)?;
            } else if let Some(rest) = k.strip_prefix(other) {
                // validate the key even when it does not apply
                Self::new(band, rate).set(rest, v)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Set one key. Band and rate are fixed at construction.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "scenario.band" => {
                if v.parse::<Band>()? != self.band {
                    return Err(Error::Config("scenario.band cannot change after construction".into()));
                }
            }
            "scenario.rate" => {
                if v.parse::<DataRate>()? != self.rate {
                    return Err(Error::Config("scenario.rate cannot change after construction".into()));
                }
            }
            "scenario.length_km" => self.length_km = num(key, v)?,
            "scenario.voa_db" => self.voa_db = num(key, v)?,
            "scenario.p_rec_dbm" => self.target_p_rec_dbm = opt(key, v)?,
            "scenario.voa_mode" => self.voa_mode = v.parse()?,
            "scenario.seed" => self.seed = num(key, v)?,
            "scenario.output" => self.output = PathBuf::from(v),

            "run.training_frames" => self.training_frames = num(key, v)?,
            "run.probe_frames" => self.probe_frames = num(key, v)?,
            "run.payload_frames" => self.payload_frames = num(key, v)?,
            "run.min_payload_bits" => self.min_payload_bits = num(key, v)?,
            "run.fec_limit" => self.fec_limit = num(key, v)?,
            "run.fec_overhead" => self.fec_overhead = num(key, v)?,
            "run.clip_search" => self.clip_search = boolean(key, v)?,
            "run.clip_min" => self.clip_min = num(key, v)?,
            "run.clip_max" => self.clip_max = num(key, v)?,
            "run.clip_tolerance" => self.clip_tolerance = num(key, v)?,
            "run.timing_backoff" => self.timing_backoff = num(key, v)?,
            "run.guard_samples" => self.guard_samples = num(key, v)?,

            "dmt.n_subcarriers" => {
                self.dmt.n_subcarriers = num(key, v)?;
                self.dmt.pilot_indices = crate::dmt::default_pilots(self.dmt.n_subcarriers);
            }
            "dmt.cp_len" => self.dmt.cp_len = num(key, v)?,
            "dmt.sample_rate_ghz" => self.dmt.sample_rate = num::<f64>(key, v)? * 1e9,
            "dmt.pilots" => self.dmt.pilot_indices = list(key, v)?,
            "dmt.clip_ratio" => self.dmt.clip_ratio = num(key, v)?,
            "dmt.dac_bits" => self.dmt.dac_bits = num(key, v)?,
            "dmt.adc_bits" => self.dmt.adc_bits = num(key, v)?,
            "dmt.reference_energy" => self.dmt.reference_energy = num(key, v)?,

            "loading.gap_db" => self.gap_db = num(key, v)?,
            "loading.max_bits" => self.max_bits = num(key, v)?,
            "equalizer.forgetting" => self.forgetting = num(key, v)?,

            "eml.wavelength_nm" => self.eml.wavelength_nm = num(key, v)?,
            "eml.bandwidth_ghz" => self.eml.bandwidth_ghz = opt(key, v)?,
            "eml.driver_bandwidth_ghz" => self.eml.driver_bandwidth_ghz = opt(key, v)?,
            "eml.chirp_alpha" => self.eml.chirp_alpha = num(key, v)?,
            "eml.modulation_index" => self.eml.modulation_index = num(key, v)?,
            "eml.launch_power_dbm" => self.eml.launch_power_dbm = num(key, v)?,
            "eml.bias_v" => self.eml.bias_v = num(key, v)?,
            "eml.clamp_floor" => self.eml.clamp_floor = num(key, v)?,
            "eml.nonlinearity" => {
                self.eml.nonlinearity = match v {
                    "off" => Nonlinearity::Off,
                    "tanh" => Nonlinearity::Tanh { saturation: 1.0 },
                    other => return Err(Error::Config(format!("{key}: unknown nonlinearity '{other}'"))),
                }
            }
            "eml.tanh_saturation" => {
                let s = num(key, v)?;
                if let Nonlinearity::Tanh { saturation } = &mut self.eml.nonlinearity {
                    *saturation = s;
                } else {
                    self.eml.nonlinearity = Nonlinearity::Tanh { saturation: s };
                }
            }

            "channel.loss_db_per_km" => self.fiber.loss_db_per_km = num(key, v)?,
            "channel.dispersion" => self.fiber.dispersion_override = opt(key, v)?,
            "channel.zero_disp_nm" => self.fiber.zero_disp_nm = num(key, v)?,
            "channel.disp_slope" => self.fiber.disp_slope = num(key, v)?,
            "channel.guard_samples" => self.fiber.guard_samples = num(key, v)?,
            "channel.oversample" => self.oversample = num(key, v)?,

            "receiver.pd_bandwidth_ghz" => self.rx.pd_bandwidth_ghz = opt(key, v)?,
            "receiver.responsivity" => self.rx.responsivity = num(key, v)?,
            "receiver.thermal_noise_pa" => self.rx.thermal_noise_pa = num(key, v)?,
            "receiver.shot_noise" => self.rx.shot_noise = boolean(key, v)?,
            "receiver.tia_overload_dbm" => self.rx.tia_overload_dbm = num(key, v)?,
            "receiver.overload_slope" => self.rx.overload_slope_db_per_db = num(key, v)?,
            "receiver.insertion_loss_db" => self.rx.insertion_loss_db = num(key, v)?,
            "receiver.agc" => self.rx.agc = boolean(key, v)?,
            "receiver.optimum_dbm" => self.optimum_p_rec_dbm = num(key, v)?,
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    /// All keys with their current values, in the order `defaults` prints them.
    pub fn to_pairs(&self) -> Vec<(String, String)> {
        let o = |x: Option<f64>| x.map_or_else(|| "none".to_string(), |v| v.to_string());
        let pilots = self.dmt.pilot_indices.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(",");
        let (nl, sat) = match self.eml.nonlinearity {
            Nonlinearity::Off => ("off", None),
            Nonlinearity::Tanh { saturation } => ("tanh", Some(saturation)),
        };
        let mut v: Vec<(&str, String)> = vec![
            ("scenario.band", self.band.to_string()),
            ("scenario.rate", self.rate.to_string()),
            ("scenario.length_km", self.length_km.to_string()),
            ("scenario.voa_db", self.voa_db.to_string()),
            ("scenario.p_rec_dbm", o(self.target_p_rec_dbm)),
            ("scenario.voa_mode", self.voa_mode.to_string()),
            ("scenario.seed", self.seed.to_string()),
            ("scenario.output", self.output.display().to_string()),
            ("run.training_frames", self.training_frames.to_string()),
            ("run.probe_frames", self.probe_frames.to_string()),
            ("run.payload_frames", self.payload_frames.to_string()),
            ("run.min_payload_bits", self.min_payload_bits.to_string()),
            ("run.fec_limit", self.fec_limit.to_string()),
            ("run.fec_overhead", self.fec_overhead.to_string()),
            ("run.clip_search", self.clip_search.to_string()),
            ("run.clip_min", self.clip_min.to_string()),
            ("run.clip_max", self.clip_max.to_string()),
            ("run.clip_tolerance", self.clip_tolerance.to_string()),
            ("run.timing_backoff", self.timing_backoff.to_string()),
            ("run.guard_samples", self.guard_samples.to_string()),
            ("dmt.n_subcarriers", self.dmt.n_subcarriers.to_string()),
            ("dmt.cp_len", self.dmt.cp_len.to_string()),
            ("dmt.sample_rate_ghz", (self.dmt.sample_rate / 1e9).to_string()),
            ("dmt.pilots", pilots),
            ("dmt.clip_ratio", self.dmt.clip_ratio.to_string()),
            ("dmt.dac_bits", self.dmt.dac_bits.to_string()),
            ("dmt.adc_bits", self.dmt.adc_bits.to_string()),
            ("dmt.reference_energy", self.dmt.reference_energy.to_string()),
            ("loading.gap_db", self.gap_db.to_string()),
            ("loading.max_bits", self.max_bits.to_string()),
            ("equalizer.forgetting", self.forgetting.to_string()),
            ("eml.wavelength_nm", self.eml.wavelength_nm.to_string()),
            ("eml.bandwidth_ghz", o(self.eml.bandwidth_ghz)),
            ("eml.driver_bandwidth_ghz", o(self.eml.driver_bandwidth_ghz)),
            ("eml.chirp_alpha", self.eml.chirp_alpha.to_string()),
            ("eml.modulation_index", self.eml.modulation_index.to_string()),
            ("eml.launch_power_dbm", self.eml.launch_power_dbm.to_string()),
            ("eml.bias_v", self.eml.bias_v.to_string()),
            ("eml.clamp_floor", self.eml.clamp_floor.to_string()),
            ("eml.nonlinearity", nl.to_string()),
        ];
        if let Some(s) = sat {
            v.push(("eml.tanh_saturation", s.to_string()));
        }
        v.extend([
            ("channel.loss_db_per_km", self.fiber.loss_db_per_km.to_string()),
            ("channel.dispersion", o(self.fiber.dispersion_override)),
            ("channel.zero_disp_nm", self.fiber.zero_disp_nm.to_string()),
            ("channel.disp_slope", self.fiber.disp_slope.to_string()),
            ("channel.guard_samples", self.fiber.guard_samples.to_string()),
            ("channel.oversample", self.oversample.to_string()),
            ("receiver.pd_bandwidth_ghz", o(self.rx.pd_bandwidth_ghz)),
            ("receiver.responsivity", self.rx.responsivity.to_string()),
            ("receiver.thermal_noise_pa", self.rx.thermal_noise_pa.to_string()),
            ("receiver.shot_noise", self.rx.shot_noise.to_string()),
            ("receiver.tia_overload_dbm", self.rx.tia_overload_dbm.to_string()),
            ("receiver.overload_slope", self.rx.overload_slope_db_per_db.to_string()),
            ("receiver.insertion_loss_db", self.rx.insertion_loss_db.to_string()),
            ("receiver.agc", self.rx.agc.to_string()),
            ("receiver.optimum_dbm", self.optimum_p_rec_dbm.to_string()),
        ]);
        v.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }

    /// `key=value` lines that reproduce this configuration.
    pub fn to_text(&self) -> String {
        self.to_pairs().into_iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    pub fn validate(&self) -> Result<()> {
        self.dmt.validate()?;
        self.eml.validate()?;
        self.fiber.validate()?;
        self.rx.validate()?;
        if !(self.length_km >= 0.0) || !(self.voa_db >= 0.0) {
            return Err(Error::Config("length and VOA attenuation must be nonnegative".into()));
        }
        if !(self.clip_min > 0.0 && self.clip_min < self.clip_max) || !(self.clip_tolerance > 0.0) {
            return Err(Error::Config("clip search interval must satisfy 0 < min < max".into()));
        }
        if !(self.fec_limit > 0.0 && self.fec_limit < 0.5) || !(self.fec_overhead >= 0.0) {
            return Err(Error::Config("FEC limit must lie in (0, 0.5) and overhead be nonnegative".into()));
        }
        if self.training_frames < crate::rx::MIN_TRAINING_FRAMES || self.probe_frames < 2 {
            return Err(Error::Config(format!(
                "need at least {} training frames and 2 probe frames",
                crate::rx::MIN_TRAINING_FRAMES
            )));
        }
        if self.timing_backoff > self.dmt.cp_len {
            return Err(Error::Config("timing backoff must fit inside the cyclic prefix".into()));
        }
        if !(self.forgetting > 0.0 && self.forgetting <= 1.0) {
            return Err(Error::Config("equalizer forgetting factor outside (0, 1]".into()));
        }
        if !(self.oversample == 1 || self.oversample == 2) {
            return Err(Error::Config("channel.oversample must be 1 or 2".into()));
        }
        Ok(())
    }

    /// Launch power minus fiber and fixed losses, before the attenuator.
    pub fn available_p_rec_dbm(&self) -> f64 {
        self.eml.launch_power_dbm - self.fiber.loss_db_per_km * self.length_km - self.rx.insertion_loss_db
    }

    /// Attenuation actually applied for this point.
    pub fn effective_voa_db(&self) -> Result<f64> {
        let available = self.available_p_rec_dbm();
        if let Some(target) = self.target_p_rec_dbm {
            let voa = available - target;
            if voa < -1e-9 {
                return Err(Error::Config(format!(
                    "received power {target} dBm unreachable, at most {available:.2} dBm available"
                )));
            }
            return Ok(voa.max(0.0));
        }
        Ok(match self.voa_mode {
            VoaMode::Fixed => self.voa_db,
            VoaMode::HoldOptimum => (available - self.optimum_p_rec_dbm).max(self.voa_db),
        })
    }

    /// The physical link for this point.
    pub fn link(&self) -> Result<Link> {
        let mut rx = self.rx.clone();
        rx.voa_db = self.effective_voa_db()?;
        Ok(Link {
            eml: self.eml.clone(),
            fiber: FiberParams { length_km: self.length_km, ..self.fiber.clone() },
            rx,
            oversample: self.oversample,
        })
    }

    /// Payload bits per DMT symbol including FEC overhead.
    pub fn gross_bits(&self) -> usize {
        let symbol_rate = 1.0 / self.dmt.symbol_duration();
        crate::rx::gross_bits_for(self.rate.net_bps(), symbol_rate, self.fec_overhead)
    }
}

fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Config(format!("{key}: cannot parse '{v}'")))
}

fn opt(key: &str, v: &str) -> Result<Option<f64>> {
    match v {
        "none" | "off" | "" => Ok(None),
        _ => num(key, v).map(Some),
    }
}

fn boolean(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(Error::Config(format!("{key}: expected a boolean, got '{v}'"))),
    }
}

fn list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    v.split(',').filter(|s| !s.trim().is_empty()).map(|s| num(key, s.trim())).collect()
}

/// Parse `key=value` lines. `include=` lines are resolved against `base`.
pub fn parse_pairs(text: &str, base: Option<&Path>) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::Parse { line: i + 1, message: format!("expected key=value, got '{line}'") });
        };
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(Error::Parse { line: i + 1, message: "empty key".into() });
        }
        if k == "include" {
            let path = base.map_or_else(|| PathBuf::from(v), |b| b.join(v));
            out.extend(read_pairs(&path)?);
        } else {
            out.push((k.to_string(), v.to_string()));
        }
    }
    Ok(out)
}

/// Read and parse a `key=value` file, following includes.
pub fn read_pairs(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_pairs(&text, path.parent())
}
