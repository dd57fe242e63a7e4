use num_complex::Complex64;

/// Frequency at which the prototype 3/(s²+3s+3) is 3 dB down, in rad/s
/// normalized to the pole scale.
pub const BESSEL2_3DB: f64 = 1.361_654_128_716_130_5;

/// Second-order Bessel low-pass, H(s) = 3 / (s² + 3s + 3) with
/// s = j·f·1.3616541/f_3dB, evaluated exactly at any frequency.
///
/// Coefficients: numerator 3, denominator [1, 3, 3]; unit DC gain, maximally
/// flat group delay of 1.3616541/(2π·f_3dB) seconds at DC.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselLowpass {
    pub f3db_hz: f64,
}

impl BesselLowpass {
    pub fn new(f3db_hz: f64) -> Self {
        Self { f3db_hz }
    }

    pub fn response(&self, f_hz: f64) -> Complex64 {
        let s = Complex64::new(0.0, f_hz * BESSEL2_3DB / self.f3db_hz);
        Complex64::new(3.0, 0.0) / (s * s + s * 3.0 + 3.0)
    }

    /// Equivalent noise bandwidth ∫₀^∞ |H(f)|² df = π/(2·1.3616541)·f_3dB.
    pub fn noise_bandwidth(&self) -> f64 {
        std::f64::consts::FRAC_PI_2 / BESSEL2_3DB * self.f3db_hz
    }
}

/// Cascade of optional Bessel sections; `None` entries are ideal (all-pass).
pub fn cascade(sections: &[Option<f64>], f_hz: f64) -> Complex64 {
    sections
        .iter()
        .flatten()
        .map(|&bw| BesselLowpass::new(bw).response(f_hz))
        .fold(Complex64::new(1.0, 0.0), |a, b| a * b)
}
