//! Locate a burst in a delayed, noisy photocurrent by preamble correlation.

use dmtlink::harness::{build_burst, probe_frames, Band, DataRate, ScenarioConfig};
use dmtlink::rx::{correlation_peak, synchronize};

fn main() -> dmtlink::Result<()> {
    let cfg = ScenarioConfig { target_p_rec_dbm: Some(-10.0), ..ScenarioConfig::new(Band::O, DataRate::G50) };
    let params = cfg.dmt.clone();
    let mut link = cfg.link()?;
    link.eml.drive_full_scale = params.clip_ratio;
    let burst = build_burst(&probe_frames(&params, 4, 9), &params, cfg.guard_samples)?;
    for delay in [0usize, 37, 150] {
        let mut drive = burst.drive.clone();
        drive.samples.rotate_right(delay);
        let out = link.transmit(&drive, 3)?;
        let found = synchronize(&out.current, &burst.preamble)?;
        let (_, peak) = correlation_peak(&out.current, &burst.preamble, usize::MAX)?;
        println!("delay {delay:>3}: preamble at {found} (sent at {}), peak {peak:.3}", cfg.guard_samples + delay);
    }
    Ok(())
}
