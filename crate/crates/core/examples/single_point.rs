//! One measurement: probe, clip search, loading, payload and BER count,
//! with the SNR and bit-loading profile the receiver ended up using.

use dmtlink::harness::{run_point, ScenarioConfig};

fn main() -> dmtlink::Result<()> {
    let cfg = ScenarioConfig::parse("scenario.band=O\nscenario.rate=100G\nscenario.p_rec_dbm=-3\n")?;
    let r = run_point(&cfg)?;
    println!(
        "P_rec {:.2} dBm  BER {:.3e}  FEC {}  clip {:.2}  bits counted {}",
        r.report.p_rec_dbm,
        r.report.pre_fec_ber,
        if r.report.fec_pass { "pass" } else { "fail" },
        r.clip_ratio,
        r.report.bits_counted
    );
    if let (Some(snr), Some(plan)) = (&r.snr, &r.plan) {
        println!("f_ghz snr_db bits");
        for k in (4..=252).step_by(16) {
            println!("{:.2} {:.1} {}", k as f64 * cfg.dmt.spacing() / 1e9, snr.db_at(k), plan.bits_at(k));
        }
    }
    Ok(())
}
