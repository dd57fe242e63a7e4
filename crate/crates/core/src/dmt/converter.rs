use num_complex::Complex64;

use super::WaveformBuffer;
use crate::error::{Error, Result};

/// Uniform mid-rise quantizer with `2^bits` levels spanning ±`full_scale`.
/// Inputs beyond full scale saturate at the outermost level. Real and
/// imaginary parts are quantized independently.
pub fn quantize(wave: &WaveformBuffer, bits: u32, full_scale: f64) -> Result<WaveformBuffer> {
    if !(4..=12).contains(&bits) {
        return Err(Error::Config(format!("converter resolution {bits} outside 4..=12 bits")));
    }
    if !(full_scale > 0.0 && full_scale.is_finite()) {
        return Err(Error::Config("converter full scale must be positive".into()));
    }
    let levels = 1u32 << bits;
    let step = 2.0 * full_scale / levels as f64;
    let top = (levels - 1) as f64;
    let q = |x: f64| {
        let idx = ((x + full_scale) / step).floor().clamp(0.0, top);
        (idx + 0.5) * step - full_scale
    };
    let samples = wave
        .samples
        .iter()
        .map(|v| Complex64::new(q(v.re), if v.im == 0.0 { 0.0 } else { q(v.im) }))
        .collect();
    Ok(WaveformBuffer { samples, sample_rate: wave.sample_rate, domain: wave.domain })
}
