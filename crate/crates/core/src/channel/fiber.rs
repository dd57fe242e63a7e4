use std::f64::consts::PI;

use num_complex::Complex64;

use super::response::SPEED_OF_LIGHT;
use super::FiberParams;
use crate::dmt::{Domain, WaveformBuffer};
use crate::dsp::{bin_frequency, fft_in_place, ifft_in_place, smooth_length};
use crate::error::{Error, Result};

/// Dispersion parameter of G.652 fiber at `wavelength_nm`, ps/(nm·km):
/// D(λ) = (S₀/4)·(λ − λ₀⁴/λ³). An override in `fiber` takes precedence.
pub fn dispersion_coefficient(wavelength_nm: f64, fiber: &FiberParams) -> Result<f64> {
    if !(1260.0..=1650.0).contains(&wavelength_nm) {
        return Err(Error::Config(format!("wavelength {wavelength_nm} nm outside 1260..1650 nm")));
    }
    if let Some(d) = fiber.dispersion_override {
        return Ok(d);
    }
    let l0 = fiber.zero_disp_nm;
    Ok(fiber.disp_slope / 4.0 * (wavelength_nm - l0.powi(4) / wavelength_nm.powi(3)))
}

/// Group-velocity dispersion β₂ = −D·λ²/(2πc) in s²/m.
pub fn beta2(d_ps_nm_km: f64, wavelength_nm: f64) -> f64 {
    let lambda = wavelength_nm * 1e-9;
    -d_ps_nm_km * 1e-6 * lambda * lambda / (2.0 * PI * SPEED_OF_LIGHT)
}

/// Spread in samples between the fastest and slowest component of a record
/// occupying the full sampled band.
pub fn dispersion_memory_samples(beta2: f64, length_km: f64, sample_rate: f64) -> f64 {
    let omega_max = PI * sample_rate;
    beta2.abs() * length_km * 1e3 * omega_max * sample_rate
}

/// Linear propagation of a complex envelope through SSMF.
///
/// All-pass dispersion exp(−j·β₂·ω²·L/2) (e^{−jωt} transform convention, so
/// the group delay is β₂·ω·L) applied over the whole record by one FFT, then
/// the scalar field loss 10^(−loss·L/20). The record is made periodic by a
/// raised-cosine bridge of `2·guard_samples` from its last sample back to its
/// first, which is discarded afterwards. `guard_samples = 0` gives a pure
/// circular all-pass.
pub fn fiber_propagate(field: &WaveformBuffer, fiber: &FiberParams, wavelength_nm: f64) -> Result<WaveformBuffer> {
    if field.domain != Domain::OpticalField {
        return Err(Error::Config(format!("fiber expects an optical field, got {:?}", field.domain)));
    }
    fiber.validate()?;
    let d = dispersion_coefficient(wavelength_nm, fiber)?;
    let b2 = beta2(d, wavelength_nm);
    let n = field.len();
    let memory = dispersion_memory_samples(b2, fiber.length_km, field.sample_rate);
    let required = (4.0 * memory).ceil() as usize;
    if n < required {
        return Err(Error::RecordTooShort { len: n, required });
    }
    let loss = 10f64.powf(-fiber.loss_db_per_km * fiber.length_km / 20.0);
    if fiber.length_km == 0.0 || n == 0 {
        let mut out = field.clone();
        out.samples.iter_mut().for_each(|e| *e *= loss);
        return Ok(out);
    }

    let total = if fiber.guard_samples == 0 { n } else { smooth_length(n + 2 * fiber.guard_samples) };
    let mut buf = Vec::with_capacity(total);
    buf.extend_from_slice(&field.samples);
    let (last, first) = (field.samples[n - 1], field.samples[0]);
    let bridge = total - n;
    for i in 0..bridge {
        let w = 0.5 - 0.5 * (PI * (i + 1) as f64 / (bridge + 1) as f64).cos();
        buf.push(last * (1.0 - w) + first * w);
    }

    fft_in_place(&mut buf);
    let length_m = fiber.length_km * 1e3;
    for (k, v) in buf.iter_mut().enumerate() {
        let omega = 2.0 * PI * bin_frequency(k, total, field.sample_rate);
        *v *= Complex64::from_polar(loss, -0.5 * b2 * omega * omega * length_m);
    }
    ifft_in_place(&mut buf);
    buf.truncate(n);
    Ok(WaveformBuffer { samples: buf, sample_rate: field.sample_rate, domain: Domain::OpticalField })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fiber(length_km: f64) -> FiberParams {
        FiberParams { length_km, loss_db_per_km: 0.0, ..FiberParams::default() }
    }

    #[test]
    fn zero_dispersion_wavelength() {
        let f = FiberParams::default();
        assert_eq!(dispersion_coefficient(1310.0, &f).unwrap(), 0.0);
        assert!(dispersion_coefficient(1309.0, &f).unwrap().abs() < 0.1);
        assert!(dispersion_coefficient(1200.0, &f).is_err());
    }

    #[test]
    fn c_band_dispersion_value() {
        // (0.092/4)·(1565.4 − 1310⁴/1565.4³) = 18.348
        let d = dispersion_coefficient(1565.4, &FiberParams::default()).unwrap();
        assert!((d - 18.348).abs() < 0.01, "{d}");
    }

    #[test]
    fn zero_length_is_identity() {
        let w = WaveformBuffer {
            samples: (0..64).map(|i| Complex64::new(i as f64, -(i as f64))).collect(),
            sample_rate: 64e9,
            domain: Domain::OpticalField,
        };
        let out = fiber_propagate(&w, &fiber(0.0), 1565.4).unwrap();
        assert_eq!(out.samples, w.samples);
    }

    #[test]
    fn circular_all_pass_conserves_energy() {
        let w = WaveformBuffer {
            samples: (0..4096).map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos())).collect(),
            sample_rate: 64e9,
            domain: Domain::OpticalField,
        };
        let f = FiberParams { guard_samples: 0, ..fiber(20.0) };
        let out = fiber_propagate(&w, &f, 1565.4).unwrap();
        let e0: f64 = w.samples.iter().map(|e| e.norm_sqr()).sum();
        let e1: f64 = out.samples.iter().map(|e| e.norm_sqr()).sum();
        assert!((e1 / e0 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn guarded_pulse_conserves_energy() {
        let n = 8192;
        let w = WaveformBuffer {
            samples: (0..n)
                .map(|i| {
                    let t = (i as f64 - n as f64 / 2.0) / 8.0;
                    Complex64::new((-t * t).exp(), 0.0)
                })
                .collect(),
            sample_rate: 64e9,
            domain: Domain::OpticalField,
        };
        let out = fiber_propagate(&w, &fiber(30.0), 1565.4).unwrap();
        let e0: f64 = w.samples.iter().map(|e| e.norm_sqr()).sum();
        let e1: f64 = out.samples.iter().map(|e| e.norm_sqr()).sum();
        assert!((e1 / e0 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn loss_scales_power() {
        let w = WaveformBuffer {
            samples: vec![Complex64::new(1.0, 0.0); 1024],
            sample_rate: 64e9,
            domain: Domain::OpticalField,
        };
        let f = FiberParams { length_km: 10.0, loss_db_per_km: 0.2, ..FiberParams::default() };
        let out = fiber_propagate(&w, &f, 1565.4).unwrap();
        assert!((out.mean_power() - 10f64.powf(-0.2)).abs() < 1e-12);
    }

    #[test]
    fn short_record_is_rejected() {
        let w = WaveformBuffer {
            samples: vec![Complex64::new(1.0, 0.0); 16],
            sample_rate: 64e9,
            domain: Domain::OpticalField,
        };
        assert!(matches!(fiber_propagate(&w, &fiber(30.0), 1565.4), Err(Error::RecordTooShort { .. })));
    }
}
