use num_complex::Complex64;

use super::qam::{Constellation, MAX_BITS};
use super::{DmtParams, Domain, FrequencyFrame, WaveformBuffer};
use crate::dsp::{fft_in_place, ifft_in_place};
use crate::error::{Error, Result};
use crate::loading::SubcarrierPlan;

/// Fixed QPSK pilot symbol for subcarrier `k`.
pub fn pilot_symbol(k: usize) -> Complex64 {
    // splitmix64 of the index; two bits pick the quadrant
    let mut z = (k as u64).wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let re = if z & 1 == 0 { -s } else { s };
    let im = if z & 2 == 0 { -s } else { s };
    Complex64::new(re, im)
}

/// Map a bitstream onto one frame following the loading plan.
///
/// Data subcarriers take `bits_at(k)` bits each in ascending subcarrier order;
/// pilot subcarriers carry [`pilot_symbol`]. Every symbol is scaled by √p_k.
pub fn map_bits(bits: &[u8], plan: &SubcarrierPlan) -> Result<FrequencyFrame> {
    let expected = plan.gross_bits();
    if bits.len() != expected {
        return Err(Error::InputSize { expected, actual: bits.len() });
    }
    let mut frame = FrequencyFrame::zeros(plan.n_usable());
    let mut cursor = 0;
    for k in 1..=plan.n_usable() {
        let amp = plan.power_at(k).sqrt();
        if plan.is_pilot(k) {
            frame.set(k, pilot_symbol(k) * amp);
            continue;
        }
        let b = plan.bits_at(k);
        if b == 0 {
            continue;
        }
        if b > MAX_BITS {
            return Err(Error::Config(format!("subcarrier {k} asks for {b} bits, max is {MAX_BITS}")));
        }
        let c = Constellation::new(b)?;
        frame.set(k, c.map(&bits[cursor..cursor + b as usize]) * amp);
        cursor += b as usize;
    }
    frame.power_scaled = true;
    Ok(frame)
}

/// Unitary Hermitian synthesis of one frame (no cyclic prefix, no scaling):
/// the sum of squared samples equals `frame.hermitian_energy()`.
pub fn synthesize(frame: &FrequencyFrame, params: &DmtParams) -> Result<Vec<f64>> {
    let n = params.fft_size();
    let mut spec = hermitian_spectrum(frame, params)?;
    ifft_in_place(&mut spec);
    let scale = (n as f64).sqrt();
    Ok(spec.iter().map(|v| v.re * scale).collect())
}

fn hermitian_spectrum(frame: &FrequencyFrame, params: &DmtParams) -> Result<Vec<Complex64>> {
    let n = params.fft_size();
    let half = params.n_subcarriers;
    if frame.len() != half - 1 {
        return Err(Error::InputSize { expected: half - 1, actual: frame.len() });
    }
    if frame.symbols().iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
        return Err(Error::Numeric("frequency frame"));
    }
    let mut spec = vec![Complex64::new(0.0, 0.0); n];
    for (k, x) in frame.iter() {
        spec[k] = x;
        spec[n - k] = x.conj();
    }
    Ok(spec)
}

/// One DMT symbol: Hermitian extension, inverse transform, cyclic prefix,
/// scaling so a frame of `params.reference_energy` has unit RMS, then hard
/// clipping at ±`clip_ratio`.
pub fn modulate(frame: &FrequencyFrame, params: &DmtParams) -> Result<WaveformBuffer> {
    let samples = modulate_samples(frame, params)?;
    Ok(WaveformBuffer::from_real(samples, params.sample_rate, Domain::ElectricalVoltage))
}

/// Concatenated symbols for a sequence of frames.
pub fn modulate_frames(frames: &[FrequencyFrame], params: &DmtParams) -> Result<WaveformBuffer> {
    let mut out = Vec::with_capacity(frames.len() * params.symbol_len());
    for f in frames {
        out.extend(modulate_samples(f, params)?);
    }
    Ok(WaveformBuffer::from_real(out, params.sample_rate, Domain::ElectricalVoltage))
}

fn modulate_samples(frame: &FrequencyFrame, params: &DmtParams) -> Result<Vec<f64>> {
    params.validate()?;
    let n = params.fft_size();
    let mut spec = hermitian_spectrum(frame, params)?;
    ifft_in_place(&mut spec);
    // ifft carries 1/N; undo it and apply the unit-RMS reference scale
    let scale = n as f64 / (2.0 * params.reference_energy).sqrt();
    let clip = params.clip_ratio;
    let body: Vec<f64> = spec.iter().map(|v| (v.re * scale).clamp(-clip, clip)).collect();
    let mut out = Vec::with_capacity(n + params.cp_len);
    out.extend_from_slice(&body[n - params.cp_len..]);
    out.extend_from_slice(&body);
    Ok(out)
}

/// Inverse of [`modulate`] for one symbol starting at sample 0 of `wave`.
pub fn demodulate(wave: &WaveformBuffer, params: &DmtParams) -> Result<FrequencyFrame> {
    demodulate_at(&wave.samples, 0, params)
}

/// Demodulate `count` consecutive symbols starting at sample `start`.
pub fn demodulate_frames(
    wave: &WaveformBuffer,
    start: usize,
    count: usize,
    params: &DmtParams,
) -> Result<Vec<FrequencyFrame>> {
    (0..count)
        .map(|i| demodulate_at(&wave.samples, start + i * params.symbol_len(), params))
        .collect()
}

fn demodulate_at(samples: &[Complex64], start: usize, params: &DmtParams) -> Result<FrequencyFrame> {
    let n = params.fft_size();
    let need = start + params.symbol_len();
    if samples.len() < need {
        return Err(Error::InputSize { expected: need, actual: samples.len() });
    }
    let body = start + params.cp_len;
    let mut buf: Vec<Complex64> = samples[body..body + n].iter().map(|v| Complex64::new(v.re, 0.0)).collect();
    fft_in_place(&mut buf);
    let scale = (2.0 * params.reference_energy).sqrt() / n as f64;
    let symbols = buf[1..params.n_subcarriers].iter().map(|v| v * scale).collect();
    Ok(FrequencyFrame::from_symbols(symbols))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn no_clip() -> DmtParams {
        DmtParams { clip_ratio: f64::INFINITY, ..DmtParams::default() }
    }

    #[test]
    fn zero_frame_gives_zero_waveform() {
        let p = DmtParams::default();
        let w = modulate(&FrequencyFrame::zeros(255), &p).unwrap();
        assert_eq!(w.len(), 528);
        assert!(w.samples.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn single_tone_is_a_cosine_with_cyclic_prefix() {
        let p = no_clip();
        let k = 37;
        let mut f = FrequencyFrame::zeros(255);
        f.set(k, Complex64::new(1.0, 0.0));
        let w = modulate(&f, &p).unwrap().real();
        let a = w[16];
        for (i, &x) in w[16..].iter().enumerate() {
            let expect = a * (2.0 * std::f64::consts::PI * k as f64 * i as f64 / 512.0).cos();
            assert!((x - expect).abs() < 1e-12);
        }
        assert_eq!(&w[..16], &w[512..528]);
    }

    #[test]
    fn dc_input_demodulates_to_zero() {
        let p = DmtParams::default();
        let w = WaveformBuffer::from_real(vec![0.7; 528], p.sample_rate, Domain::Photocurrent);
        let f = demodulate(&w, &p).unwrap();
        assert!(f.symbols().iter().all(|x| x.norm() < 1e-12));
    }

    #[test]
    fn demodulate_needs_a_full_symbol() {
        let p = DmtParams::default();
        let w = WaveformBuffer::from_real(vec![0.0; 527], p.sample_rate, Domain::Photocurrent);
        assert!(matches!(demodulate(&w, &p), Err(Error::InputSize { .. })));
    }

    #[test]
    fn non_finite_symbols_are_rejected() {
        let mut f = FrequencyFrame::zeros(255);
        f.set(3, Complex64::new(f64::NAN, 0.0));
        assert!(matches!(modulate(&f, &DmtParams::default()), Err(Error::Numeric(_))));
    }

    #[test]
    fn map_bits_checks_length_and_places_pilots() {
        let plan = SubcarrierPlan::uniform(255, 2, &crate::dmt::default_pilots(256));
        let bits = vec![0u8; plan.gross_bits()];
        let f = map_bits(&bits, &plan).unwrap();
        assert_eq!(f.get(8), pilot_symbol(8));
        assert!(map_bits(&bits[1..], &plan).is_err());
    }

    #[test]
    fn pilot_symbols_are_qpsk() {
        for k in 1..256 {
            assert!((pilot_symbol(k).norm() - 1.0).abs() < 1e-12);
        }
    }
}
