use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::filter::BesselLowpass;
use super::ReceiverParams;
use crate::dmt::{Domain, WaveformBuffer};
use crate::dsp::{filter_circular, from_db, watts_to_dbm};
use crate::error::{Error, Result};

const ELECTRON_CHARGE: f64 = 1.602_176_634e-19;

#[derive(Debug, Clone)]
pub struct Detected {
    pub current: WaveformBuffer,
    /// Mean optical power at the photodiode, dBm.
    pub p_rec_dbm: f64,
    /// Factor applied to the thermal noise variance by TIA overload (≥ 1).
    pub overload_factor: f64,
}

/// Variance multiplier on thermal noise for a given received power. Above
/// the overload point the thermal-limited electrical SNR falls by
/// `overload_slope_db_per_db` for every dB of overdrive, so the noise
/// variance grows by (2 + slope) dB per dB (signal power itself rises 2 dB/dB).
pub fn overload_factor(p_rec_dbm: f64, rx: &ReceiverParams) -> f64 {
    let over = p_rec_dbm - rx.tia_overload_dbm;
    if over > 0.0 {
        from_db((2.0 + rx.overload_slope_db_per_db) * over)
    } else {
        1.0
    }
}

/// Bandwidth over which white receiver noise reaches the converter, Hz.
///
/// With a photodiode response this is its equivalent noise bandwidth; the
/// converter has no anti-alias filter, so all of it folds into the sampled
/// band whatever the sample rate. Without one, noise is white up to Nyquist.
pub fn noise_bandwidth(rx: &ReceiverParams, sample_rate: f64) -> f64 {
    match rx.pd_bandwidth_ghz {
        Some(bw) => BesselLowpass::new(bw * 1e9).noise_bandwidth(),
        None => sample_rate / 2.0,
    }
}

/// Attenuation, square law and photodiode response. Returns the current and
/// the mean optical power at the diode in watts.
pub(crate) fn photocurrent(field: &WaveformBuffer, rx: &ReceiverParams) -> Result<(Vec<Complex64>, f64)> {
    if field.domain != Domain::OpticalField {
        return Err(Error::Config(format!("detector expects an optical field, got {:?}", field.domain)));
    }
    rx.validate()?;
    let att = from_db(-(rx.voa_db + rx.insertion_loss_db));
    let mut current: Vec<Complex64> =
        field.samples.iter().map(|e| Complex64::new(rx.responsivity * e.norm_sqr() * att, 0.0)).collect();
    let n = current.len().max(1) as f64;
    let p_mean = field.samples.iter().map(|e| e.norm_sqr()).sum::<f64>() / n * att;
    if let Some(bw) = rx.pd_bandwidth_ghz {
        let f = BesselLowpass::new(bw * 1e9);
        filter_circular(&mut current, field.sample_rate, |freq| f.response(freq));
        current.iter_mut().for_each(|v| v.im = 0.0);
    }
    Ok((current, p_mean))
}

/// Power spectrum of photodiode-filtered white noise sampled at `fs`,
/// Σₘ |H(f + m·fs)|², scaled to unit mean over the sampled band.
fn folded_shape(filter: BesselLowpass, fs: f64) -> impl Fn(f64) -> f64 {
    const GRID: usize = 512;
    const ALIASES: i64 = 400;
    let folded = |f: f64| (-ALIASES..=ALIASES).map(|m| filter.response(f + m as f64 * fs).norm_sqr()).sum::<f64>();
    let table: Vec<f64> = (0..=GRID).map(|i| folded(i as f64 * fs / 2.0 / GRID as f64)).collect();
    // the folded spectrum averages 2·ENB/fs over one Nyquist zone
    let norm = fs / (2.0 * filter.noise_bandwidth());
    move |f: f64| {
        let x = (f.abs() / (fs / 2.0) * GRID as f64).min(GRID as f64);
        let i = (x.floor() as usize).min(GRID - 1);
        let t = x - i as f64;
        (table[i] * (1.0 - t) + table[i + 1] * t) * norm
    }
}

/// Thermal noise (scaled by the overload factor) and optional shot noise,
/// white at the diode, shaped by its response and sampled at `fs` with
/// aliasing.
pub(crate) fn add_noise(current: &mut [Complex64], fs: f64, rx: &ReceiverParams, p_mean: f64, seed: u64) {
    let overload = overload_factor(watts_to_dbm(p_mean), rx);
    let bandwidth = noise_bandwidth(rx, fs);
    let mut variance = (rx.thermal_noise_pa * 1e-12).powi(2) * bandwidth * overload;
    if rx.shot_noise {
        variance += 2.0 * ELECTRON_CHARGE * rx.responsivity * p_mean * bandwidth;
    }
    if !(variance > 0.0) || current.is_empty() {
        return;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut noise: Vec<Complex64> = (0..current.len()).map(|_| Complex64::new(rng.sample(StandardNormal), 0.0)).collect();
    if let Some(bw) = rx.pd_bandwidth_ghz {
        let shape = folded_shape(BesselLowpass::new(bw * 1e9), fs);
        filter_circular(&mut noise, fs, |f| Complex64::new(shape(f).sqrt(), 0.0));
    }
    let sigma = variance.sqrt();
    for (c, w) in current.iter_mut().zip(&noise) {
        c.re += sigma * w.re;
    }
}

/// Remove the mean and, with AGC on, scale to unit RMS.
pub(crate) fn ac_couple(current: &mut [Complex64], agc: bool) {
    let n = current.len().max(1) as f64;
    let mean = current.iter().map(|v| v.re).sum::<f64>() / n;
    current.iter_mut().for_each(|v| v.re -= mean);
    if agc {
        let rms = (current.iter().map(|v| v.re * v.re).sum::<f64>() / n).sqrt();
        // a residue at rounding level is not a signal
        if rms > 1e-12 * mean.abs() {
            current.iter_mut().for_each(|v| v.re /= rms);
        }
    }
}

/// PIN photodiode with linear TIA and AGC.
///
/// VOA and insertion loss act on the field, the diode gives i = R·|E|²
/// through its 35 GHz Bessel response. White Gaussian thermal noise and shot
/// noise (2qR·P̄ per Hz) pass the same response and fold into the sampled
/// band, so their variance is density² times the noise bandwidth at any
/// sample rate. The mean is removed and, with AGC on, the output is scaled
/// to unit RMS.
pub fn detect(field: &WaveformBuffer, rx: &ReceiverParams, seed: u64) -> Result<Detected> {
    let (mut current, p_mean) = photocurrent(field, rx)?;
    add_noise(&mut current, field.sample_rate, rx, p_mean, seed);
    ac_couple(&mut current, rx.agc);
    let p_rec_dbm = watts_to_dbm(p_mean);
    Ok(Detected {
        current: WaveformBuffer { samples: current, sample_rate: field.sample_rate, domain: Domain::Photocurrent },
        p_rec_dbm,
        overload_factor: overload_factor(p_rec_dbm, rx),
    })
}
