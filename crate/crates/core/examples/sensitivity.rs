//! Back-to-back received power at the FEC limit for every band and rate.

use rayon::prelude::*;

use dmtlink::harness::{sensitivity, Band, DataRate, ScenarioConfig};

fn main() {
    let cases: Vec<(Band, DataRate)> =
        [Band::O, Band::C].into_iter().flat_map(|b| [DataRate::G25, DataRate::G50, DataRate::G100].map(|r| (b, r))).collect();
    let results: Vec<String> = cases
        .par_iter()
        .map(|&(band, rate)| match sensitivity(&ScenarioConfig::new(band, rate), -14.0, -3.0, 0.1) {
            Ok(t) => format!("{band}-band {rate:>4}: {:.2} dBm ({} points)", t.value, t.trace.len()),
            Err(e) => format!("{band}-band {rate:>4}: {e}"),
        })
        .collect();
    for line in results {
        println!("{line}");
    }
}
