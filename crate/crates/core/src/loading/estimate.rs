use num_complex::Complex64;

use super::{SnrProfile, SNR_CAP};
use crate::dmt::FrequencyFrame;
use crate::error::{Error, Result};

/// Least-squares channel gain of subcarrier `k` over paired frames.
pub(crate) fn ls_gain(rx: &[FrequencyFrame], tx: &[FrequencyFrame], k: usize) -> Complex64 {
    let (num, den) = rx.iter().zip(tx).fold((Complex64::new(0.0, 0.0), 0.0), |(n, d), (y, x)| {
        let x = x.get(k);
        (n + y.get(k) * x.conj(), d + x.norm_sqr())
    });
    if den > 0.0 {
        num / den
    } else {
        Complex64::new(0.0, 0.0)
    }
}

fn snr_at(rx: &[FrequencyFrame], tx: &[FrequencyFrame], k: usize) -> f64 {
    let h = ls_gain(rx, tx, k);
    let n = rx.len() as f64;
    let sig: f64 = tx.iter().map(|x| x.get(k).norm_sqr()).sum::<f64>() / n * h.norm_sqr();
    // one complex parameter fitted: residual has n-1 degrees of freedom
    let noise: f64 = rx.iter().zip(tx).map(|(y, x)| (y.get(k) - h * x.get(k)).norm_sqr()).sum::<f64>() / (n - 1.0);
    if sig <= 0.0 {
        0.0
    } else if noise <= sig / SNR_CAP {
        SNR_CAP
    } else {
        sig / noise
    }
}

fn check(rx: &[FrequencyFrame], tx: &[FrequencyFrame]) -> Result<usize> {
    if rx.len() != tx.len() {
        return Err(Error::InputSize { expected: tx.len(), actual: rx.len() });
    }
    if rx.len() < 2 {
        return Err(Error::InsufficientData { needed: 2, got: rx.len() });
    }
    let n = tx[0].len();
    if let Some(f) = rx.iter().chain(tx).find(|f| f.len() != n) {
        return Err(Error::InputSize { expected: n, actual: f.len() });
    }
    Ok(n)
}

/// Per-subcarrier SNR from received frames and the frames that were sent.
///
/// SNR_k = |Ĥ_k|²·E|X_k|² / E|Y_k − Ĥ_k X_k|², Ĥ_k the least-squares gain.
/// Noiseless subcarriers saturate at 60 dB; subcarriers with no signal report 0.
pub fn estimate_snr(rx_frames: &[FrequencyFrame], tx_frames: &[FrequencyFrame]) -> Result<SnrProfile> {
    let n = check(rx_frames, tx_frames)?;
    let snr = (1..=n).map(|k| snr_at(rx_frames, tx_frames, k)).collect();
    SnrProfile::new(snr, rx_frames.len(), 0.0)
}

/// SNR measured on `pilots` only, linearly interpolated in dB between them
/// and held flat beyond the outermost pilots.
pub fn estimate_snr_pilots(
    rx_frames: &[FrequencyFrame],
    tx_frames: &[FrequencyFrame],
    pilots: &[usize],
) -> Result<SnrProfile> {
    let n = check(rx_frames, tx_frames)?;
    let mut pts: Vec<(usize, f64)> = pilots
        .iter()
        .map(|&k| (k, snr_at(rx_frames, tx_frames, k).max(1.0 / SNR_CAP).log10() * 10.0))
        .collect();
    pts.sort_by_key(|p| p.0);
    if pts.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let snr = (1..=n)
        .map(|k| {
            let db = match pts.iter().position(|&(p, _)| p >= k) {
                Some(0) => pts[0].1,
                None => pts[pts.len() - 1].1,
                Some(i) => {
                    let (k0, d0) = pts[i - 1];
                    let (k1, d1) = pts[i];
                    d0 + (d1 - d0) * (k - k0) as f64 / (k1 - k0) as f64
                }
            };
            10f64.powf(db / 10.0).min(SNR_CAP)
        })
        .collect();
    SnrProfile::new(snr, rx_frames.len(), 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn qpsk_frames(n_frames: usize, n: usize, rng: &mut ChaCha8Rng) -> Vec<FrequencyFrame> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        (0..n_frames)
            .map(|_| {
                FrequencyFrame::from_symbols(
                    (0..n)
                        .map(|_| Complex64::new(if rng.random() { s } else { -s }, if rng.random() { s } else { -s }))
                        .collect(),
                )
            })
            .collect()
    }

    #[test]
    fn noiseless_identity_saturates_at_cap() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let tx = qpsk_frames(16, 31, &mut rng);
        let p = estimate_snr(&tx, &tx).unwrap();
        assert!(p.linear().iter().all(|&s| s == SNR_CAP));
    }

    #[test]
    fn dead_subcarrier_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let tx = qpsk_frames(16, 31, &mut rng);
        let mut rx = tx.clone();
        for f in &mut rx {
            f.set(5, Complex64::new(0.0, 0.0));
        }
        let p = estimate_snr(&rx, &tx).unwrap();
        assert_eq!(p.at(5), 0.0);
        assert_eq!(p.db_at(5), -60.0);
    }

    #[test]
    fn awgn_of_known_variance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sigma2: f64 = 0.05; // 13.01 dB
        let tx = qpsk_frames(256, 255, &mut rng);
        let rx: Vec<_> = tx
            .iter()
            .map(|f| {
                let mut y = f.clone();
                for v in y.symbols_mut() {
                    let a: f64 = rng.sample(StandardNormal);
                    let b: f64 = rng.sample(StandardNormal);
                    *v += Complex64::new(a, b) * (sigma2 / 2.0).sqrt();
                }
                y
            })
            .collect();
        let p = estimate_snr(&rx, &tx).unwrap();
        let expect = 10.0 * (1.0 / sigma2).log10();
        let mean_db = (1..=255).map(|k| p.db_at(k)).sum::<f64>() / 255.0;
        assert!((mean_db - expect).abs() < 0.5, "mean {mean_db} vs {expect}");
        // per-subcarrier scatter of a 256-frame estimate is ~0.27 dB rms
        assert!((1..=255).all(|k| (p.db_at(k) - expect).abs() < 1.5));
    }

    #[test]
    fn needs_two_frames() {
        let f = vec![FrequencyFrame::zeros(4)];
        assert!(matches!(estimate_snr(&f, &f), Err(Error::InsufficientData { .. })));
    }

    #[test]
    fn pilot_interpolation_is_linear_in_db() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let tx = qpsk_frames(64, 9, &mut rng);
        // deterministic residuals: 20 dB on subcarrier 1, 40 dB on subcarrier 9
        let rx: Vec<_> = tx
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let mut y = f.clone();
                let e = if i % 2 == 0 { 1.0 } else { -1.0 };
                y.set(1, y.get(1) + Complex64::new(0.1 * e, 0.0));
                y.set(9, y.get(9) + Complex64::new(0.01 * e, 0.0));
                y
            })
            .collect();
        let p = estimate_snr_pilots(&rx, &tx, &[1, 9]).unwrap();
        let d1 = p.db_at(1);
        let d9 = p.db_at(9);
        assert!((d9 - d1 - 20.0).abs() < 0.5);
        assert!((p.db_at(5) - (d1 + d9) / 2.0).abs() < 1e-9);
    }
}
