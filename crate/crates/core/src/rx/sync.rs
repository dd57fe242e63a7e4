use num_complex::Complex64;

use crate::dmt::WaveformBuffer;
use crate::dsp::{fft_in_place, ifft_in_place, smooth_length};
use crate::error::{Error, Result};

/// Lowest normalized correlation accepted as a lock.
pub const SYNC_THRESHOLD: f64 = 0.3;

/// Sample offset of `preamble` in `rx`: the argmax of the normalized
/// cross-correlation ρ(d) = Σ r[d+i]·p[i] / (‖p‖·‖r[d..d+L]‖).
pub fn synchronize(rx: &WaveformBuffer, preamble: &[f64]) -> Result<usize> {
    synchronize_within(rx, preamble, usize::MAX)
}

/// [`synchronize`] restricted to offsets `0..=max_offset`.
pub fn synchronize_within(rx: &WaveformBuffer, preamble: &[f64], max_offset: usize) -> Result<usize> {
    let (offset, peak) = correlation_peak(rx, preamble, max_offset)?;
    if peak < SYNC_THRESHOLD {
        return Err(Error::SyncFailure { peak });
    }
    Ok(offset)
}

/// Best offset and its normalized correlation, without the lock threshold.
pub fn correlation_peak(rx: &WaveformBuffer, preamble: &[f64], max_offset: usize) -> Result<(usize, f64)> {
    let l = preamble.len();
    let n = rx.len();
    if l == 0 || n < l {
        return Err(Error::InsufficientData { needed: l.max(1), got: n });
    }
    let p_norm = preamble.iter().map(|v| v * v).sum::<f64>().sqrt();
    if p_norm == 0.0 {
        return Err(Error::Numeric("preamble has no energy"));
    }
    let last = (n - l).min(max_offset);
    let span = last + l;
    let r: Vec<f64> = rx.samples[..span].iter().map(|v| v.re).collect();

    // cross-correlation by FFT over the searched span
    let size = smooth_length(span + l);
    let mut a: Vec<Complex64> = r.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    a.resize(size, Complex64::new(0.0, 0.0));
    let mut b: Vec<Complex64> = preamble.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    b.resize(size, Complex64::new(0.0, 0.0));
    fft_in_place(&mut a);
    fft_in_place(&mut b);
    a.iter_mut().zip(&b).for_each(|(x, y)| *x *= y.conj());
    ifft_in_place(&mut a);

    // sliding window energy from a prefix sum
    let mut prefix = Vec::with_capacity(span + 1);
    prefix.push(0.0);
    for v in &r {
        prefix.push(prefix.last().unwrap() + v * v);
    }
    let total = prefix[span];
    let mut best = (0usize, f64::NEG_INFINITY);
    for d in 0..=last {
        let energy = prefix[d + l] - prefix[d];
        // windows holding only rounding residue carry no signal
        if energy <= 1e-18 * total.max(f64::MIN_POSITIVE) {
            continue;
        }
        let rho = a[d].re / (p_norm * energy.sqrt());
        if rho > best.1 {
            best = (d, rho);
        }
    }
    if !best.1.is_finite() {
        return Ok((0, 0.0));
    }
    Ok(best)
}
