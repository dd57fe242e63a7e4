//! Map random bits onto a mixed-order loading plan, modulate, pass the
//! waveform through a short FIR channel and recover every bit with a one-tap
//! equalizer per subcarrier.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dmtlink::dmt::{default_pilots, demodulate, map_bits, modulate, DmtParams, Domain, WaveformBuffer};
use dmtlink::loading::SubcarrierPlan;
use dmtlink::rx::demap;

fn main() -> dmtlink::Result<()> {
    let params = DmtParams { clip_ratio: f64::INFINITY, ..DmtParams::with_sample_rate(64e9) };
    let n = params.n_usable();
    let pilots = default_pilots(params.n_subcarriers);
    let bits: Vec<u32> = (1..=n).map(|k| if pilots.contains(&k) { 0 } else { 1 + (k % 6) as u32 }).collect();
    let pilot: Vec<bool> = (1..=n).map(|k| pilots.contains(&k)).collect();
    let plan = SubcarrierPlan::from_parts(bits, vec![1.0; n], pilot)?;

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let payload: Vec<u8> = (0..plan.gross_bits()).map(|_| rng.random_range(0..2)).collect();
    let frame = map_bits(&payload, &plan)?;
    let tx = modulate(&frame, &params)?;

    // three-tap channel, shorter than the cyclic prefix
    let taps = [1.0, 0.35, -0.1];
    let x = tx.real();
    let mut y = vec![0.0; x.len()];
    for (i, out) in y.iter_mut().enumerate() {
        for (j, t) in taps.iter().enumerate() {
            if i >= j {
                *out += t * x[i - j];
            }
        }
    }
    let rx = demodulate(&WaveformBuffer::from_real(y, params.sample_rate, Domain::Photocurrent), &params)?;

    let fft = params.fft_size() as f64;
    let mut eq = rx.clone();
    for k in 1..=n {
        let w = 2.0 * std::f64::consts::PI * k as f64 / fft;
        let h: Complex64 = taps.iter().enumerate().map(|(j, t)| Complex64::from_polar(*t, -w * j as f64)).sum();
        eq.set(k, rx.get(k) / h);
    }
    let out = demap(&eq, &plan)?;
    let errors = out.bits.iter().zip(&payload).filter(|(a, b)| a != b).count();
    println!("{} bits per symbol, {} errors after the FIR channel", plan.gross_bits(), errors);
    Ok(())
}
