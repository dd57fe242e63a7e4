use num_complex::Complex64;

use crate::dmt::qam::Constellation;
use crate::dmt::FrequencyFrame;
use crate::error::{Error, Result};
use crate::loading::SubcarrierPlan;

/// Hard decisions for one equalized frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Demapped {
    /// Payload bits in the order [`crate::dmt::map_bits`] consumed them.
    pub bits: Vec<u8>,
    /// Y_k − X̂_k in unit-energy constellation units; zero on pilots and
    /// unloaded subcarriers.
    pub error_vector: Vec<Complex64>,
}

/// Per-axis slicing and Gray de-labelling of every loaded data subcarrier.
pub fn demap(frame: &FrequencyFrame, plan: &SubcarrierPlan) -> Result<Demapped> {
    if frame.len() != plan.n_usable() {
        return Err(Error::InputSize { expected: plan.n_usable(), actual: frame.len() });
    }
    let mut bits = Vec::with_capacity(plan.gross_bits());
    let mut error_vector = vec![Complex64::new(0.0, 0.0); frame.len()];
    for k in 1..=plan.n_usable() {
        let b = plan.bits_at(k);
        if plan.is_pilot(k) || b == 0 {
            continue;
        }
        let c = Constellation::new(b)?;
        let amp = plan.power_at(k).sqrt();
        let y = if amp > 0.0 { frame.get(k) / amp } else { frame.get(k) };
        let label = c.slice(y);
        error_vector[k - 1] = y - c.point(label);
        bits.extend((0..b).rev().map(|i| ((label >> i) & 1) as u8));
    }
    Ok(Demapped { bits, error_vector })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dmt::map_bits;

    #[test]
    fn noiseless_round_trip_with_mixed_loading() {
        let bits: Vec<u32> = vec![1, 2, 0, 3, 4, 5, 6, 7, 8, 2];
        let pilot = vec![false, false, false, false, true, false, false, false, false, false];
        let power = vec![1.0, 0.5, 0.0, 2.0, 1.0, 0.7, 1.3, 0.9, 1.1, 1.0];
        let plan = SubcarrierPlan::from_parts(bits, power, pilot).unwrap();
        let payload: Vec<u8> = (0..plan.gross_bits()).map(|i| ((i * 37 + 11) % 5 % 2) as u8).collect();
        let frame = map_bits(&payload, &plan).unwrap();
        let out = demap(&frame, &plan).unwrap();
        assert_eq!(out.bits, payload);
        assert!(out.error_vector.iter().all(|e| e.norm() < 1e-12));
    }

    #[test]
    fn boundary_tie_takes_lower_label() {
        let plan = SubcarrierPlan::uniform(1, 2, &[]);
        // QPSK on the origin: both axes on their boundary
        let frame = FrequencyFrame::from_symbols(vec![Complex64::new(0.0, 0.0)]);
        assert_eq!(demap(&frame, &plan).unwrap().bits, vec![0, 0]);
    }
}
