//! Small-signal dispersion response of the C- and O-band links and where its
//! notches fall.

use dmtlink::channel::{dispersion_coefficient, imdd_response, notch_frequencies};
use dmtlink::harness::{Band, DataRate, ScenarioConfig};

fn main() -> dmtlink::Result<()> {
    for (band, length) in [(Band::C, 2.2), (Band::C, 10.0), (Band::O, 32.6)] {
        let cfg = ScenarioConfig::new(band, DataRate::G100);
        let lambda = cfg.eml.wavelength_nm;
        let d = dispersion_coefficient(lambda, &cfg.fiber)?;
        for alpha in [0.0, cfg.eml.chirp_alpha] {
            let notches = notch_frequencies(d, length, lambda, alpha, 32e9);
            let edge = imdd_response(32e9, d, length, lambda, alpha);
            let first = notches.first().map_or("none".to_string(), |f| format!("{:.2} GHz", f / 1e9));
            println!(
                "{band}-band {length:>5} km  D={d:6.2}  alpha={alpha:+.3}  first notch {first:>10}  |H(32 GHz)|={edge:.3}"
            );
        }
    }
    Ok(())
}
