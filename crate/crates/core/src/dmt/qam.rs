//! Gray-labelled rectangular QAM.
//!
//! A `b`-bit constellation is a `2^ceil(b/2)` × `2^floor(b/2)` grid. The
//! first `ceil(b/2)` label bits select the in-phase level and the remaining
//! bits the quadrature level, each through a reflected-binary Gray code, so
//! square orders (4, 16, 64, 256) are the canonical per-axis Gray QAM and odd
//! orders (2, 8, 32, 128) are rectangular grids whose horizontal and vertical
//! neighbours still differ in exactly one bit. Levels sit at odd integers
//! ±1, ±3, … scaled to unit average energy. One bit is BPSK on the real axis,
//! label 0 at −1.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_BITS: u32 = 8;

pub fn gray_encode(n: u32) -> u32 {
    n ^ (n >> 1)
}

pub fn gray_decode(mut g: u32) -> u32 {
    let mut n = g;
    while g > 1 {
        g >>= 1;
        n ^= g;
    }
    n
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constellation {
    bits: u32,
    i_bits: u32,
    q_bits: u32,
    /// Amplitude of the ±1 level after unit-energy normalization.
    scale: f64,
}

impl Constellation {
    pub fn new(bits: u32) -> Result<Self> {
        if bits == 0 || bits > MAX_BITS {
            return Err(Error::Config(format!("unsupported constellation size: {bits} bits")));
        }
        let i_bits = bits.div_ceil(2);
        let q_bits = bits / 2;
        let li = (1u32 << i_bits) as f64;
        let lq = (1u32 << q_bits) as f64;
        let energy = ((li * li - 1.0) + (lq * lq - 1.0)) / 3.0;
        Ok(Self { bits, i_bits, q_bits, scale: 1.0 / energy.sqrt() })
    }

    /// Constellation for modulation order `m` (a power of two, 2..=256).
    pub fn from_order(m: u32) -> Result<Self> {
        if !m.is_power_of_two() || m < 2 {
            return Err(Error::Config(format!("unsupported modulation order {m}")));
        }
        Self::new(m.trailing_zeros())
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn order(&self) -> u32 {
        1 << self.bits
    }

    pub fn axis_bits(&self) -> (u32, u32) {
        (self.i_bits, self.q_bits)
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Map a label (MSB first, `bits` wide) to its point.
    pub fn point(&self, label: u32) -> Complex64 {
        let i_label = label >> self.q_bits;
        let q_label = label & ((1 << self.q_bits) - 1);
        Complex64::new(
            level_amplitude(gray_decode(i_label), self.i_bits),
            level_amplitude(gray_decode(q_label), self.q_bits),
        ) * self.scale
    }

    /// Map a bit slice of exactly `bits` entries (each 0 or 1).
    pub fn map(&self, bits: &[u8]) -> Complex64 {
        debug_assert_eq!(bits.len(), self.bits as usize);
        let label = bits.iter().fold(0u32, |acc, &b| (acc << 1) | u32::from(b & 1));
        self.point(label)
    }

    /// Minimum-distance decision by per-axis slicing. A sample exactly on a
    /// decision boundary resolves to the neighbour with the lower Gray label.
    pub fn slice(&self, y: Complex64) -> u32 {
        let i_label = slice_axis(y.re / self.scale, self.i_bits);
        let q_label = slice_axis(y.im / self.scale, self.q_bits);
        (i_label << self.q_bits) | q_label
    }

    /// Decided point for `y`.
    pub fn decide(&self, y: Complex64) -> Complex64 {
        self.point(self.slice(y))
    }
}

fn level_amplitude(level: u32, axis_bits: u32) -> f64 {
    let l = (1u32 << axis_bits) as f64;
    2.0 * level as f64 - (l - 1.0)
}

fn slice_axis(x: f64, axis_bits: u32) -> u32 {
    if axis_bits == 0 {
        return 0;
    }
    let top = (1u32 << axis_bits) - 1;
    // position in level units: level i sits at t = i
    let t = (x + top as f64) / 2.0;
    if !t.is_finite() {
        return gray_encode(0);
    }
    let lo = t.floor();
    if t - lo == 0.5 {
        let a = lo.clamp(0.0, top as f64) as u32;
        let b = (lo + 1.0).clamp(0.0, top as f64) as u32;
        return gray_encode(a).min(gray_encode(b));
    }
    gray_encode(t.round().clamp(0.0, top as f64) as u32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bpsk_label_zero_is_minus_one() {
        let c = Constellation::new(1).unwrap();
        assert_eq!(c.map(&[0]), Complex64::new(-1.0, 0.0));
        assert_eq!(c.map(&[1]), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn qpsk_gray_points() {
        let c = Constellation::new(2).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let expect = [
            ([0, 0], Complex64::new(-s, -s)),
            ([0, 1], Complex64::new(-s, s)),
            ([1, 1], Complex64::new(s, s)),
            ([1, 0], Complex64::new(s, -s)),
        ];
        for (bits, p) in expect {
            assert!((c.map(&bits) - p).norm() < 1e-15, "{bits:?}");
        }
    }

    #[test]
    fn unit_average_energy_all_orders() {
        for b in 1..=MAX_BITS {
            let c = Constellation::new(b).unwrap();
            let e: f64 = (0..c.order()).map(|l| c.point(l).norm_sqr()).sum::<f64>() / c.order() as f64;
            assert!((e - 1.0).abs() < 1e-12, "bits={b} energy={e}");
        }
    }

    /// Exhaustive audit: every pair of nearest neighbours differs in one bit.
    #[test]
    fn nearest_neighbours_differ_in_one_bit() {
        for b in 1..=MAX_BITS {
            let c = Constellation::new(b).unwrap();
            let pts: Vec<_> = (0..c.order()).map(|l| c.point(l)).collect();
            let dmin = pts
                .iter()
                .enumerate()
                .flat_map(|(i, p)| pts.iter().skip(i + 1).map(move |q| (p - q).norm()))
                .fold(f64::INFINITY, f64::min);
            for (i, p) in pts.iter().enumerate() {
                for (j, q) in pts.iter().enumerate().skip(i + 1) {
                    if ((p - q).norm() - dmin).abs() < 1e-9 {
                        assert_eq!((i as u32 ^ j as u32).count_ones(), 1, "bits={b} labels {i} {j}");
                    }
                }
            }
        }
    }

    #[test]
    fn slicing_inverts_mapping() {
        for b in 1..=MAX_BITS {
            let c = Constellation::new(b).unwrap();
            for l in 0..c.order() {
                assert_eq!(c.slice(c.point(l)), l);
            }
        }
    }

    #[test]
    fn boundary_tie_goes_to_lower_label() {
        let c = Constellation::new(4).unwrap();
        // boundary between the two inner in-phase levels (labels 01 and 11)
        let y = Complex64::new(0.0, 3.0 * c.scale());
        let label = c.slice(y);
        assert_eq!(label >> 2, 0b01);
        // outer boundary between levels 0 (00) and 1 (01)
        let y = Complex64::new(-2.0 * c.scale(), 3.0 * c.scale());
        assert_eq!(c.slice(y) >> 2, 0b00);
    }

    #[test]
    fn gray_round_trip() {
        for n in 0..256 {
            assert_eq!(gray_decode(gray_encode(n)), n);
        }
    }

    #[test]
    fn rejects_unsupported_orders() {
        assert!(Constellation::new(0).is_err());
        assert!(Constellation::new(9).is_err());
        assert!(Constellation::from_order(12).is_err());
    }
}
