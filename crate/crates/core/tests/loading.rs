use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use dmtlink::dmt::qam::Constellation;
use dmtlink::dmt::{demodulate, modulate, DmtParams, FrequencyFrame};
use dmtlink::loading::{analytic_ber, estimate_snr, waterfill_with, LoadingOptions, SnrProfile};

/// Bit errors of `symbols` random symbols over complex AWGN at `snr`.
fn monte_carlo(bits: u32, snr: f64, symbols: usize, seed: u64) -> f64 {
    let c = Constellation::new(bits).unwrap();
    let sigma = (0.5 / snr).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut errors = 0u64;
    for _ in 0..symbols {
        let label = rng.random_range(0..c.order());
        let y = c.point(label) + Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)) * sigma;
        errors += (c.slice(y) ^ label).count_ones() as u64;
    }
    errors as f64 / (symbols as f64 * bits as f64)
}

#[test]
fn qpsk_at_9_8_db_matches_monte_carlo() {
    // symbol SNR 9.8 dB puts QPSK at 1e-3, a decade above 1e-4
    let snr = 10f64.powf(0.98);
    let expect = analytic_ber(4, snr).unwrap();
    assert!((expect / 1e-3 - 1.0).abs() < 0.05, "{expect}");
    let measured = monte_carlo(2, snr, 10_000_000, 31);
    assert!((measured / expect - 1.0).abs() < 0.2, "{measured} vs {expect}");
}

#[test]
fn qpsk_near_one_in_ten_thousand() {
    let snr = 10f64.powf(1.14);
    let expect = analytic_ber(4, snr).unwrap();
    assert!((expect / 1e-4 - 1.0).abs() < 0.2, "{expect}");
    let measured = monte_carlo(2, snr, 10_000_000, 34);
    assert!((measured / expect - 1.0).abs() < 0.2, "{measured} vs {expect}");
}

#[test]
fn sixteen_qam_within_counting_error() {
    let snr = 100.0;
    let symbols = 4_000_000;
    let expect = analytic_ber(16, snr).unwrap();
    let measured = monte_carlo(4, snr, symbols, 32);
    let sd = (expect * (1.0 - expect) / (4.0 * symbols as f64)).sqrt();
    assert!((measured - expect).abs() < 3.0 * sd, "{measured} vs {expect} ± {sd}");
}

#[test]
fn snr_estimate_recovers_injected_noise() {
    let p = DmtParams { clip_ratio: f64::INFINITY, ..DmtParams::default() };
    let n = p.n_usable();
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let snr_db = 18.0;
    let sigma = (p.fft_size() as f64 / (2.0 * p.reference_energy * 10f64.powf(snr_db / 10.0))).sqrt();
    let mut tx = Vec::new();
    let mut rx = Vec::new();
    for _ in 0..256 {
        let f = FrequencyFrame::from_symbols(
            (0..n).map(|_| Complex64::new(if rng.random() { s } else { -s }, if rng.random() { s } else { -s })).collect(),
        );
        let mut w = modulate(&f, &p).unwrap();
        w.samples.iter_mut().for_each(|v| v.re += sigma * rng.sample::<f64, _>(StandardNormal));
        rx.push(demodulate(&w, &p).unwrap());
        tx.push(f);
    }
    let est = estimate_snr(&rx, &tx).unwrap();
    let db: Vec<f64> = (1..=n).map(|k| est.db_at(k)).collect();
    let mean = db.iter().sum::<f64>() / n as f64;
    assert!((mean - snr_db).abs() < 0.5, "{mean}");
    assert!(db.iter().all(|d| (d - snr_db).abs() < 1.5));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn loading_hits_the_target_within_limits(
        snr_db in prop::collection::vec(-5.0f64..40.0, 255),
        fill in 0.05f64..0.9,
        max_bits in 2u32..=8,
    ) {
        let pilots = dmtlink::dmt::default_pilots(256);
        let snr = SnrProfile::from_db(&snr_db);
        let capacity = (1..=255).filter(|k| !pilots.contains(k)).count() * max_bits as usize;
        let target = ((capacity as f64 * fill) as usize).max(1);
        let opts = LoadingOptions { max_bits, pilots: pilots.clone(), ..LoadingOptions::default() };
        let plan = waterfill_with(&snr, target, &opts).unwrap();
        prop_assert_eq!(plan.gross_bits(), target);
        for k in 1..=255 {
            prop_assert!(plan.bits_at(k) <= max_bits);
            prop_assert!(plan.power_at(k) >= 0.0);
            if pilots.contains(&k) {
                prop_assert_eq!(plan.bits_at(k), 0);
            }
            if plan.bits_at(k) == 0 && !pilots.contains(&k) {
                prop_assert_eq!(plan.power_at(k), 0.0);
            }
        }
        // powers average to one over active subcarriers
        let active = plan.active_count() as f64;
        prop_assert!((plan.total_power() / active - 1.0).abs() < 1e-9);
        // better subcarriers never carry fewer bits
        let data: Vec<usize> = (1..=255).filter(|k| !pilots.contains(k)).collect();
        for &j in &data {
            for &k in &data {
                if snr.at(k) > snr.at(j) || (snr.at(k) == snr.at(j) && k < j) {
                    prop_assert!(plan.bits_at(k) >= plan.bits_at(j), "k={} j={}", k, j);
                }
            }
        }
    }

    #[test]
    fn higher_snr_never_needs_more_margin_loss(snr_db in prop::collection::vec(5.0f64..30.0, 255), boost in 0.5f64..6.0) {
        let a = SnrProfile::from_db(&snr_db);
        let b = SnrProfile::from_db(&snr_db.iter().map(|s| s + boost).collect::<Vec<_>>());
        let pa = waterfill_with(&a, 600, &LoadingOptions::default()).unwrap();
        let pb = waterfill_with(&b, 600, &LoadingOptions::default()).unwrap();
        prop_assert!((pb.margin_db - pa.margin_db - boost).abs() < 1e-6);
    }
}
