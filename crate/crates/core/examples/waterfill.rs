//! Bit and power loading on a low-pass SNR profile with a dispersion notch.

use dmtlink::loading::{waterfill_with, LoadingOptions, SnrProfile};
use dmtlink::dmt::default_pilots;

fn main() -> dmtlink::Result<()> {
    let snr_db: Vec<f64> = (1..=255)
        .map(|k| {
            let f = k as f64 / 255.0;
            let notch = 25.0 * (-((f - 0.8) / 0.03).powi(2)).exp();
            24.0 - 12.0 * f * f - notch
        })
        .collect();
    let snr = SnrProfile::from_db(&snr_db);
    let opts = LoadingOptions { pilots: default_pilots(256), ..LoadingOptions::default() };
    let plan = waterfill_with(&snr, 908, &opts)?;
    println!("gross bits {} on {} active subcarriers, margin {:.2} dB", plan.gross_bits(), plan.active_count(), plan.margin_db);
    println!("k snr_db bits power");
    for k in (1..=255).step_by(12) {
        println!("{k} {:.1} {} {:.3}", snr.db_at(k), plan.bits_at(k), plan.power_at(k));
    }
    Ok(())
}
