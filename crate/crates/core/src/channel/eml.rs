use num_complex::Complex64;

use super::filter::cascade;
use super::{EmlParams, Nonlinearity};
use crate::dmt::{Domain, WaveformBuffer};
use crate::dsp::{dbm_to_watts, filter_circular};
use crate::error::{Error, Result};

/// Optical field leaving the modulator.
#[derive(Debug, Clone)]
pub struct EmlOutput {
    pub field: WaveformBuffer,
    /// Fraction of samples whose power was held at the positivity floor.
    pub clamp_fraction: f64,
}

/// Driver + electro-absorption modulator.
///
/// The drive is low-pass filtered by the driver and modulator responses,
/// optionally compressed, and mapped to power
/// P(t) = P₀·(1 + m·s_f(t)/full_scale), floored at ε·P₀. The field carries
/// transient chirp, E(t) = √P(t)·exp(j·(α/2)·ln(P(t)/P₀)), and is rescaled so
/// its mean power equals the launch power.
pub fn eml_modulate(drive: &WaveformBuffer, params: &EmlParams) -> Result<EmlOutput> {
    if drive.domain != Domain::ElectricalVoltage {
        return Err(Error::Config(format!("modulator expects an electrical drive, got {:?}", drive.domain)));
    }
    params.validate()?;
    let mut s = drive.samples.clone();
    let sections = [params.driver_bandwidth_ghz.map(|b| b * 1e9), params.bandwidth_ghz.map(|b| b * 1e9)];
    if sections.iter().any(Option::is_some) {
        filter_circular(&mut s, drive.sample_rate, |f| cascade(&sections, f));
    }

    let p0 = dbm_to_watts(params.launch_power_dbm);
    let floor = params.clamp_floor * p0;
    let half_alpha = 0.5 * params.chirp_alpha;
    let mut clamped = 0usize;
    let mut field: Vec<Complex64> = s
        .iter()
        .map(|v| {
            let mut u = v.re / params.drive_full_scale;
            if let Nonlinearity::Tanh { saturation } = params.nonlinearity {
                u = saturation * (u / saturation).tanh();
            }
            let mut p = p0 * (1.0 + params.modulation_index * u);
            if p < floor {
                p = floor;
                clamped += 1;
            }
            Complex64::from_polar(p.sqrt(), half_alpha * (p / p0).ln())
        })
        .collect();

    let n = field.len().max(1) as f64;
    let mean = field.iter().map(|e| e.norm_sqr()).sum::<f64>() / n;
    if mean > 0.0 {
        let g = (p0 / mean).sqrt();
        field.iter_mut().for_each(|e| *e *= g);
    }
    Ok(EmlOutput {
        field: WaveformBuffer { samples: field, sample_rate: drive.sample_rate, domain: Domain::OpticalField },
        clamp_fraction: clamped as f64 / n,
    })
}
