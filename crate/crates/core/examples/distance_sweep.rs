//! BER against fiber length for C-band 50G with the attenuator at minimum,
//! written as CSV plus manifest.

use std::path::PathBuf;

use dmtlink::harness::{sweep, write_sweep, ScenarioConfig, SweepSpec, SweepVar};

fn main() -> dmtlink::Result<()> {
    let base = ScenarioConfig::parse("scenario.band=C\nscenario.rate=50G\nscenario.voa_mode=fixed\n")?;
    let lengths: Vec<f64> = (0..=9).map(|i| 2.0 * i as f64).collect();
    let spec = SweepSpec::new(SweepVar::Distance, lengths, base)?;
    let rows = sweep(&spec, 0)?;
    let dir = PathBuf::from("out/distance_sweep");
    let manifest = write_sweep(&dir, &spec, &rows)?;
    for r in &rows {
        println!("{:>5.1} km  P_rec {:6.2} dBm  BER {:.3e}", r.x, r.p_rec_dbm, r.pre_fec_ber);
    }
    println!("wrote {} to {}", manifest.outputs.join(", "), dir.display());
    Ok(())
}
