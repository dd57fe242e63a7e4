use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::loading::SubcarrierPlan;

/// Pre-FEC BER below which the outer code is taken to be error free.
pub const FEC_LIMIT: f64 = 4.4e-3;
/// Parity overhead of the outer code: line rate = net rate · (1 + overhead).
pub const DEFAULT_FEC_OVERHEAD: f64 = 0.067;

/// Bits needed for a meaningful verdict at `limit`.
pub fn min_bits_for(limit: f64) -> u64 {
    (10.0 / limit).ceil() as u64
}

/// Error statistics of one measurement point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerReport {
    pub bits_counted: u64,
    pub bit_errors: u64,
    pub pre_fec_ber: f64,
    /// BER of each subcarrier (1-based index k at position k−1); 0 where
    /// nothing was counted.
    pub per_subcarrier_ber: Vec<f64>,
    pub fec_pass: bool,
    pub net_rate_bps: f64,
    pub p_rec_dbm: f64,
}

/// Accumulates bit errors per subcarrier across frames.
#[derive(Debug, Clone, PartialEq)]
pub struct BerCounter {
    bits: Vec<u64>,
    errors: Vec<u64>,
}

impl BerCounter {
    pub fn new(n_usable: usize) -> Self {
        Self { bits: vec![0; n_usable], errors: vec![0; n_usable] }
    }

    /// Compare one frame's decided payload with what was sent.
    pub fn add_frame(&mut self, sent: &[u8], decided: &[u8], plan: &SubcarrierPlan) -> Result<()> {
        if sent.len() != plan.gross_bits() || decided.len() != sent.len() {
            return Err(Error::InputSize { expected: plan.gross_bits(), actual: decided.len().min(sent.len()) });
        }
        let mut cursor = 0;
        for k in 1..=plan.n_usable() {
            let b = plan.bits_at(k) as usize;
            if plan.is_pilot(k) || b == 0 {
                continue;
            }
            let e = sent[cursor..cursor + b].iter().zip(&decided[cursor..cursor + b]).filter(|(a, d)| a != d).count();
            self.bits[k - 1] += b as u64;
            self.errors[k - 1] += e as u64;
            cursor += b;
        }
        Ok(())
    }

    pub fn bits(&self) -> u64 {
        self.bits.iter().sum()
    }

    pub fn errors(&self) -> u64 {
        self.errors.iter().sum()
    }

    pub fn per_subcarrier_bits(&self) -> &[u64] {
        &self.bits
    }

    pub fn per_subcarrier_errors(&self) -> &[u64] {
        &self.errors
    }

    /// Report with the gate already applied at `limit`. `net_rate_bps` and
    /// `p_rec_dbm` are filled in by the caller.
    pub fn report(&self, limit: f64) -> BerReport {
        let bits = self.bits();
        let errors = self.errors();
        let pre_fec_ber = if bits > 0 { errors as f64 / bits as f64 } else { 0.0 };
        let per_subcarrier_ber =
            self.bits.iter().zip(&self.errors).map(|(&b, &e)| if b > 0 { e as f64 / b as f64 } else { 0.0 }).collect();
        BerReport {
            bits_counted: bits,
            bit_errors: errors,
            pre_fec_ber,
            per_subcarrier_ber,
            fec_pass: bits > 0 && pre_fec_ber < limit,
            net_rate_bps: 0.0,
            p_rec_dbm: f64::NAN,
        }
    }
}

/// Apply the threshold: pass ⇔ pre_fec_ber < limit.
pub fn fec_gate(report: &mut BerReport, limit: f64) -> Result<bool> {
    let needed = min_bits_for(limit);
    if report.bits_counted < needed {
        return Err(Error::InsufficientStatistics { bits: report.bits_counted, needed });
    }
    report.fec_pass = report.pre_fec_ber < limit;
    Ok(report.fec_pass)
}

/// Net payload rate carried by `gross_bits` per symbol after FEC overhead.
pub fn net_rate(gross_bits: usize, symbol_rate: f64, overhead: f64) -> f64 {
    gross_bits as f64 * symbol_rate / (1.0 + overhead)
}

/// Payload bits per symbol needed to carry `net_rate_bps` including FEC overhead.
pub fn gross_bits_for(net_rate_bps: f64, symbol_rate: f64, overhead: f64) -> usize {
    (net_rate_bps * (1.0 + overhead) / symbol_rate).ceil() as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(ber: f64) -> BerReport {
        BerReport {
            bits_counted: 1_000_000,
            bit_errors: (ber * 1e6) as u64,
            pre_fec_ber: ber,
            per_subcarrier_ber: vec![],
            fec_pass: false,
            net_rate_bps: 0.0,
            p_rec_dbm: 0.0,
        }
    }

    #[test]
    fn gate_is_strict_threshold() {
        assert!(fec_gate(&mut report(3e-3), FEC_LIMIT).unwrap());
        assert!(!fec_gate(&mut report(4.4e-3), FEC_LIMIT).unwrap());
        assert!(fec_gate(&mut report(0.0), FEC_LIMIT).unwrap());
    }

    #[test]
    fn too_few_bits() {
        let mut r = report(0.0);
        r.bits_counted = 2000;
        assert!(matches!(fec_gate(&mut r, FEC_LIMIT), Err(Error::InsufficientStatistics { needed: 2273, .. })));
    }

    #[test]
    fn line_rate_for_100g() {
        let symbol_rate = 64e9 / 528.0;
        let g = gross_bits_for(103.125e9, symbol_rate, DEFAULT_FEC_OVERHEAD);
        assert_eq!(g, 908);
        assert!((103.125e9 * (1.0 + DEFAULT_FEC_OVERHEAD) / 1e9 - 110.03).abs() < 0.01);
        assert!(net_rate(g, symbol_rate, DEFAULT_FEC_OVERHEAD) >= 103.125e9);
    }

    #[test]
    fn counter_attributes_errors_to_subcarriers() {
        let plan = SubcarrierPlan::uniform(3, 2, &[2]);
        let mut c = BerCounter::new(3);
        c.add_frame(&[0, 0, 1, 1], &[0, 1, 1, 1], &plan).unwrap();
        assert_eq!(c.per_subcarrier_errors(), &[1, 0, 0]);
        assert_eq!(c.per_subcarrier_bits(), &[2, 0, 2]);
        let r = c.report(FEC_LIMIT);
        assert_eq!(r.pre_fec_ber, 0.25);
    }
}
