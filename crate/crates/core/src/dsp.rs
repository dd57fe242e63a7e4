//! Shared numerical helpers: whole-record FFT filtering and the Gaussian tail
//! function.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;
use libm::erfc;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Gaussian tail probability Q(x) = P(N(0,1) > x).
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Forward DFT in place, no normalization.
pub fn fft_in_place(buf: &mut [Complex64]) {
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(buf.len()));
    fft.process(buf);
}

/// Inverse DFT in place, normalized by 1/N.
pub fn ifft_in_place(buf: &mut [Complex64]) {
    let n = buf.len();
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n));
    fft.process(buf);
    let scale = 1.0 / n as f64;
    buf.iter_mut().for_each(|v| *v *= scale);
}

/// Signed frequency in Hz of DFT bin `k` for a record of `n` samples.
pub fn bin_frequency(k: usize, n: usize, sample_rate: f64) -> f64 {
    let k = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
    k * sample_rate / n as f64
}

/// Apply a frequency response to a whole record as a circular filter.
///
/// `response` receives the signed frequency of each bin in Hz.
pub fn filter_circular<F>(samples: &mut [Complex64], sample_rate: f64, response: F)
where
    F: Fn(f64) -> Complex64,
{
    let n = samples.len();
    if n == 0 {
        return;
    }
    fft_in_place(samples);
    for (k, v) in samples.iter_mut().enumerate() {
        *v *= response(bin_frequency(k, n, sample_rate));
    }
    ifft_in_place(samples);
}

/// Smallest length ≥ `n` whose only prime factors are 2, 3 and 5.
pub fn smooth_length(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut r = m;
        for p in [2, 3, 5] {
            while r % p == 0 {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

pub fn mean_square(x: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, n) = x.into_iter().fold((0.0, 0usize), |(s, n), v| (s + v * v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

pub fn db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    1e-3 * from_db(dbm)
}

pub fn watts_to_dbm(w: f64) -> f64 {
    db(w / 1e-3)
}
