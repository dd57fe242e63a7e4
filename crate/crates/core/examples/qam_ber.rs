//! Monte-Carlo bit error rate of Gray-mapped QAM on an AWGN channel against
//! the closed form.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use dmtlink::dmt::qam::Constellation;
use dmtlink::loading::analytic_ber_bits;

fn main() -> dmtlink::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    println!("bits snr_db analytic measured");
    for (bits, snr_db) in [(2u32, 9.0), (4, 16.0), (6, 22.0), (3, 13.0)] {
        let c = Constellation::new(bits)?;
        let snr = 10f64.powf(snr_db / 10.0);
        let sigma = (0.5 / snr).sqrt();
        let symbols = 400_000 / bits as usize;
        let mut errors = 0usize;
        for _ in 0..symbols {
            let label = rng.random_range(0..c.order());
            let noise = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)) * sigma;
            errors += (c.slice(c.point(label) + noise) ^ label).count_ones() as usize;
        }
        let measured = errors as f64 / (symbols * bits as usize) as f64;
        println!("{bits} {snr_db:.1} {:.3e} {measured:.3e}", analytic_ber_bits(bits, snr)?);
    }
    Ok(())
}
