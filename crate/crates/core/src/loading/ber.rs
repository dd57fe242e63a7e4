//! Exact bit-error probability of the Gray-labelled rectangular QAM used by
//! the modem, over AWGN.
//!
//! Each axis is an independent Gray-coded L-PAM, so the bit-error rate is the
//! bit-weighted mean of the two per-axis rates. For one axis with levels
//! a_i and decision cells [t_j, t_{j+1}):
//!
//!   BER = 1/(L·log2 L) · Σ_i Σ_j P(cell j | level i) · d_H(gray(i), gray(j))
//!
//! P(cell j | level i) = Q((t_j − a_i)/σ) − Q((t_{j+1} − a_i)/σ). For square
//! orders this is the closed form of which (4/log2 M)(1 − 1/√M)·Q(√(3γ/(M−1)))
//! is the leading term. `snr` is the average symbol energy over the complex
//! noise variance.

use crate::dmt::qam::{gray_encode, Constellation};
use crate::dsp::q_function;
use crate::error::Result;

/// BER of M-QAM (M = 2, 4, …, 256) at linear SNR `snr`.
pub fn analytic_ber(modulation_order: u32, snr: f64) -> Result<f64> {
    let c = Constellation::from_order(modulation_order)?;
    Ok(ber_of(&c, snr))
}

/// Same as [`analytic_ber`] but keyed by bits per symbol.
pub fn analytic_ber_bits(bits: u32, snr: f64) -> Result<f64> {
    let c = Constellation::new(bits)?;
    Ok(ber_of(&c, snr))
}

fn ber_of(c: &Constellation, snr: f64) -> f64 {
    if snr.is_infinite() {
        return 0.0;
    }
    let sigma = (1.0 / (2.0 * snr.max(0.0))).sqrt();
    let (ib, qb) = c.axis_bits();
    let num = ib as f64 * axis_ber(ib, c.scale(), sigma) + qb as f64 * axis_ber(qb, c.scale(), sigma);
    num / c.bits() as f64
}

fn axis_ber(axis_bits: u32, scale: f64, sigma: f64) -> f64 {
    if axis_bits == 0 {
        return 0.0;
    }
    let l = 1usize << axis_bits;
    let level = |i: usize| scale * (2.0 * i as f64 - (l as f64 - 1.0));
    let lower = |j: usize| if j == 0 { f64::NEG_INFINITY } else { level(j) - scale };
    let upper = |j: usize| if j == l - 1 { f64::INFINITY } else { level(j) + scale };
    let mut acc = 0.0;
    for i in 0..l {
        let a = level(i);
        for j in (0..l).filter(|&j| j != i) {
            // evaluate on the tail side to avoid cancellation of values near 1
            let p = if j > i {
                q_function((lower(j) - a) / sigma) - q_function((upper(j) - a) / sigma)
            } else {
                q_function((a - upper(j)) / sigma) - q_function((a - lower(j)) / sigma)
            };
            let d = (gray_encode(i as u32) ^ gray_encode(j as u32)).count_ones();
            acc += p * d as f64;
        }
    }
    acc / (l as f64 * axis_bits as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bpsk_closed_form() {
        for snr_db in [0.0, 4.0, 8.0] {
            let snr: f64 = 10f64.powf(snr_db / 10.0);
            let ber = analytic_ber(2, snr).unwrap();
            let expect = q_function((2.0 * snr).sqrt());
            assert!((ber - expect).abs() <= 1e-12 * expect.max(1e-300));
        }
    }

    #[test]
    fn qpsk_closed_form() {
        let snr = 10f64.powf(0.98);
        let ber = analytic_ber(4, snr).unwrap();
        assert!((ber - q_function(snr.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn vanishes_at_high_snr() {
        assert_eq!(analytic_ber(2, f64::INFINITY).unwrap(), 0.0);
        assert!(analytic_ber(2, 1e4).unwrap() < 1e-300);
    }

    #[test]
    fn leading_term_for_square_orders() {
        // at high SNR the exact value approaches the single-term approximation
        for m in [16u32, 64, 256] {
            let snr = 10f64.powf(3.2);
            let x = (3.0 * snr / (m as f64 - 1.0)).sqrt();
            let approx = 4.0 / (m as f64).log2() * (1.0 - 1.0 / (m as f64).sqrt()) * q_function(x);
            let exact = analytic_ber(m, snr).unwrap();
            assert!((exact / approx - 1.0).abs() < 0.02, "M={m}: {exact} vs {approx}");
        }
    }

    #[test]
    fn unsupported_order_is_config_error() {
        assert!(analytic_ber(3, 1.0).is_err());
        assert!(analytic_ber(512, 1.0).is_err());
    }

    #[test]
    fn monotone_in_snr() {
        for m in [2u32, 8, 32, 128] {
            let mut prev = 1.0;
            for i in 0..40 {
                let b = analytic_ber(m, 10f64.powf(i as f64 / 10.0)).unwrap();
                assert!(b <= prev);
                prev = b;
            }
        }
    }
}
