use num_complex::Complex64;

use crate::dmt::pilot_symbol;
use crate::dmt::qam::Constellation;
use crate::dmt::FrequencyFrame;
use crate::error::{Error, Result};
use crate::loading::SubcarrierPlan;

pub const MIN_TRAINING_FRAMES: usize = 16;
pub const REGULARIZER: f64 = 1e-6;
pub const DEFAULT_FORGETTING: f64 = 0.99;

/// How the last background update was driven.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpdateMode {
    DecisionDirected,
    /// Decided-symbol MSE exceeded twice the pilot MSE; only pilot
    /// subcarriers were updated.
    PilotOnly,
}

/// One-tap frequency-domain equalizer with exponential background tracking.
#[derive(Debug, Clone, PartialEq)]
pub struct Equalizer {
    h: Vec<Complex64>,
    w: Vec<Complex64>,
    rho: f64,
    trained: bool,
    pub last_mode: Option<UpdateMode>,
}

fn tap(h: Complex64) -> Complex64 {
    h.conj() / (h.norm_sqr() + REGULARIZER)
}

impl Equalizer {
    /// Least-squares channel estimate over known frames.
    /// `rho = 1` freezes the equalizer after training.
    pub fn train(rx: &[FrequencyFrame], tx: &[FrequencyFrame], rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho <= 1.0) {
            return Err(Error::Config(format!("forgetting factor {rho} outside (0, 1]")));
        }
        if rx.len() < MIN_TRAINING_FRAMES || tx.len() < rx.len() {
            return Err(Error::InsufficientData { needed: MIN_TRAINING_FRAMES, got: rx.len().min(tx.len()) });
        }
        let n = tx[0].len();
        if let Some(f) = rx.iter().chain(tx).find(|f| f.len() != n) {
            return Err(Error::InputSize { expected: n, actual: f.len() });
        }
        let h: Vec<Complex64> = (1..=n).map(|k| crate::loading::ls_gain(rx, tx, k)).collect();
        let w = h.iter().map(|&g| tap(g)).collect();
        Ok(Self { h, w, rho, trained: true, last_mode: None })
    }

    pub fn is_trained(&self) -> bool {
        self.trained
    }

    pub fn forgetting(&self) -> f64 {
        self.rho
    }

    /// Channel estimate Ĥ_k, 1-based.
    pub fn channel(&self, k: usize) -> Complex64 {
        self.h[k - 1]
    }

    /// Tap w_k, 1-based.
    pub fn tap(&self, k: usize) -> Complex64 {
        self.w[k - 1]
    }

    /// Y'_k = w_k·Y_k.
    pub fn equalize(&self, frame: &FrequencyFrame) -> FrequencyFrame {
        let symbols = frame.symbols().iter().zip(&self.w).map(|(y, w)| y * w).collect();
        let mut out = FrequencyFrame::from_symbols(symbols);
        out.power_scaled = frame.power_scaled;
        out
    }

    /// Equalize one frame, then update Ĥ_k ← ρ·Ĥ_k + (1−ρ)·Y_k/X̂_k with hard
    /// decisions from `plan` on data subcarriers and the known symbol on pilots.
    pub fn equalize_and_update(&mut self, frame: &FrequencyFrame, plan: &SubcarrierPlan) -> Result<FrequencyFrame> {
        if frame.len() != self.h.len() || plan.n_usable() != self.h.len() {
            return Err(Error::InputSize { expected: self.h.len(), actual: frame.len().min(plan.n_usable()) });
        }
        let eq = self.equalize(frame);
        let mut reference = vec![None; self.h.len()];
        let (mut data_mse, mut data_n, mut pilot_mse, mut pilot_n) = (0.0, 0usize, 0.0, 0usize);
        for k in 1..=self.h.len() {
            let p = plan.power_at(k);
            if p <= 0.0 {
                continue;
            }
            let amp = p.sqrt();
            let y = eq.get(k);
            if plan.is_pilot(k) {
                let x = pilot_symbol(k) * amp;
                pilot_mse += (y - x).norm_sqr() / p;
                pilot_n += 1;
                reference[k - 1] = Some(x);
            } else if plan.bits_at(k) > 0 {
                let c = Constellation::new(plan.bits_at(k))?;
                let x = c.decide(y / amp) * amp;
                data_mse += (y - x).norm_sqr() / p;
                data_n += 1;
                reference[k - 1] = Some(x);
            }
        }
        let pilot_only = pilot_n > 0 && data_n > 0 && data_mse / data_n as f64 > 2.0 * pilot_mse / pilot_n as f64;
        self.last_mode = Some(if pilot_only { UpdateMode::PilotOnly } else { UpdateMode::DecisionDirected });
        if self.rho < 1.0 {
            for k in 1..=self.h.len() {
                let Some(x) = reference[k - 1] else { continue };
                if pilot_only && !plan.is_pilot(k) {
                    continue;
                }
                let i = k - 1;
                self.h[i] = self.h[i] * self.rho + frame.get(k) / x * (1.0 - self.rho);
                self.w[i] = tap(self.h[i]);
            }
        }
        Ok(eq)
    }
}
