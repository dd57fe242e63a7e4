//! Small-signal response of a chirped intensity modulator followed by
//! dispersive fiber and square-law detection.
//!
//! |H(f)| = √(1+α²) · |cos(θ(f) + arctan α)|,  θ(f) = π·λ²·D·L·f²/c
//!
//! |H(0)| = 1. Positive α moves every notch towards lower frequency when D > 0.

use std::f64::consts::{FRAC_PI_2, PI};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Dispersion-induced phase θ(f) in radians; `d_ps_nm_km` in ps/(nm·km).
pub fn fading_phase(f_hz: f64, d_ps_nm_km: f64, length_km: f64, wavelength_nm: f64) -> f64 {
    let lambda = wavelength_nm * 1e-9;
    let d = d_ps_nm_km * 1e-6; // s/m²
    let l = length_km * 1e3;
    PI * lambda * lambda * d * l * f_hz * f_hz / SPEED_OF_LIGHT
}

/// Linear magnitude of the IM-DD small-signal transfer function.
pub fn imdd_response(f_hz: f64, d_ps_nm_km: f64, length_km: f64, wavelength_nm: f64, alpha: f64) -> f64 {
    let theta = fading_phase(f_hz, d_ps_nm_km, length_km, wavelength_nm);
    (1.0 + alpha * alpha).sqrt() * (theta + alpha.atan()).cos().abs()
}

/// Notch frequencies below `f_max_hz`, ascending. Empty when D·L = 0.
pub fn notch_frequencies(
    d_ps_nm_km: f64,
    length_km: f64,
    wavelength_nm: f64,
    alpha: f64,
    f_max_hz: f64,
) -> Vec<f64> {
    let unit = fading_phase(1.0, d_ps_nm_km, length_km, wavelength_nm);
    if unit == 0.0 {
        return Vec::new();
    }
    // θ = π/2 + kπ − arctan α, θ must share the sign of D·L
    let mut out = Vec::new();
    for k in -64i64..64 {
        let theta = FRAC_PI_2 + k as f64 * PI - alpha.atan();
        let f2 = theta / unit;
        if f2 > 0.0 {
            let f = f2.sqrt();
            if f <= f_max_hz {
                out.push(f);
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out
}
