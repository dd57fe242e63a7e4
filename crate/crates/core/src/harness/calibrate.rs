//! Fit of the two free physical parameters, thermal noise density and
//! C-band chirp, to two measured anchors.
//!
//! The noise density is fitted first on a back-to-back O-band sensitivity
//! point, where chirp has no influence. The chirp is then fitted on a C-band
//! point over fiber with the noise held. Each fit is a bisection on the sign
//! of log(BER/target) with common random numbers, so the objective is a
//! deterministic function of the parameter.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{read_pairs, parse_pairs, Band, DataRate, ScenarioConfig, VoaMode};
use super::point::run_point;
use crate::error::{Error, Result};
use crate::rx::FEC_LIMIT;

/// One measured operating point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Anchor {
    pub band: Band,
    pub rate: DataRate,
    pub length_km: f64,
    /// Received power set with the attenuator; `None` keeps it at minimum.
    pub p_rec_dbm: Option<f64>,
    pub target_ber: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationTargets {
    pub sensitivity: Anchor,
    pub reach: Anchor,
    pub noise_range_pa: (f64, f64),
    pub alpha_range: (f64, f64),
    pub max_iterations: usize,
    /// Bracket width at which the noise search stops, in decades.
    pub noise_tolerance_decades: f64,
    pub alpha_tolerance: f64,
    /// Scenario keys applied to both anchors.
    pub overrides: Vec<(String, String)>,
}

impl Default for CalibrationTargets {
    fn default() -> Self {
        Self {
            sensitivity: Anchor {
                band: Band::O,
                rate: DataRate::G25,
                length_km: 0.0,
                p_rec_dbm: Some(-9.4),
                target_ber: FEC_LIMIT,
            },
            reach: Anchor {
                band: Band::C,
                rate: DataRate::G100,
                length_km: 2.2,
                p_rec_dbm: None,
                target_ber: 0.5 * FEC_LIMIT,
            },
            noise_range_pa: (1.0, 1000.0),
            alpha_range: (-1.5, 3.0),
            max_iterations: 50,
            noise_tolerance_decades: 0.002,
            alpha_tolerance: 0.005,
            overrides: Vec::new(),
        }
    }
}

impl CalibrationTargets {
    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_pairs(read_pairs(path)?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_pairs(parse_pairs(text, None)?)
    }

    /// `anchor.*` and `search.*` keys configure the fit; every other key is a
    /// scenario override applied to both anchors.
    pub fn from_pairs(pairs: Vec<(String, String)>) -> Result<Self> {
        let mut t = Self::default();
        for (k, v) in pairs {
            let f = || v.parse::<f64>().map_err(|_| Error::Config(format!("{k}: cannot parse '{v}'")));
            let anchor = if k.starts_with("anchor.sensitivity.") {
                Some(&mut t.sensitivity)
            } else if k.starts_with("anchor.reach.") {
                Some(&mut t.reach)
            } else {
                None
            };
            if let Some(a) = anchor {
                match k.rsplit('.').next().unwrap_or("") {
                    "band" => a.band = v.parse()?,
                    "rate" => a.rate = v.parse()?,
                    "length_km" => a.length_km = f()?,
                    "p_rec_dbm" => a.p_rec_dbm = if v == "none" { None } else { Some(f()?) },
                    "target_ber" => a.target_ber = f()?,
                    other => return Err(Error::Config(format!("unknown anchor field '{other}'"))),
                }
                continue;
            }
            match k.as_str() {
                "search.noise_min_pa" => t.noise_range_pa.0 = f()?,
                "search.noise_max_pa" => t.noise_range_pa.1 = f()?,
                "search.alpha_min" => t.alpha_range.0 = f()?,
                "search.alpha_max" => t.alpha_range.1 = f()?,
                "search.max_iterations" => t.max_iterations = f()? as usize,
                "search.noise_tolerance_decades" => t.noise_tolerance_decades = f()?,
                "search.alpha_tolerance" => t.alpha_tolerance = f()?,
                _ => t.overrides.push((k, v)),
            }
        }
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        let (n0, n1) = self.noise_range_pa;
        let (a0, a1) = self.alpha_range;
        if !(n0 > 0.0 && n1 > n0) || !(a1 > a0) {
            return Err(Error::Config("calibration search ranges must be nonempty, noise positive".into()));
        }
        for a in [&self.sensitivity, &self.reach] {
            if !(a.target_ber > 0.0 && a.target_ber < 0.5) {
                return Err(Error::Config("anchor target BER must lie in (0, 0.5)".into()));
            }
        }
        // validate the overrides against a scenario
        self.scenario(&self.sensitivity, self.noise_range_pa.0, None).map(|_| ())
    }

    /// Scenario for an anchor at a given noise density and chirp.
    pub fn scenario(&self, anchor: &Anchor, noise_pa: f64, alpha: Option<f64>) -> Result<ScenarioConfig> {
        let mut pairs = vec![
            ("scenario.band".to_string(), anchor.band.to_string()),
            ("scenario.rate".to_string(), anchor.rate.to_string()),
        ];
        pairs.extend(self.overrides.iter().cloned());
        let mut cfg = ScenarioConfig::from_pairs(&pairs)?;
        cfg.length_km = anchor.length_km;
        cfg.target_p_rec_dbm = anchor.p_rec_dbm;
        if anchor.p_rec_dbm.is_none() {
            cfg.voa_mode = VoaMode::Fixed;
            cfg.voa_db = 0.0;
        }
        cfg.rx.thermal_noise_pa = noise_pa;
        if let Some(a) = alpha {
            cfg.eml.chirp_alpha = a;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Fitted parameters and how well they reproduce the anchors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub thermal_noise_pa: f64,
    pub chirp_alpha: f64,
    /// Band whose chirp was fitted.
    pub alpha_band: Band,
    /// log10(BER / target) at the fitted values, per anchor.
    pub residuals: (f64, f64),
    pub iterations: usize,
    /// (parameter, log10 BER ratio) for every evaluation, noise then chirp.
    pub trace: Vec<(f64, f64)>,
}

impl Calibration {
    /// Parameter file consumed through `include=`.
    pub fn to_params(&self) -> String {
        let scope = match self.alpha_band {
            Band::O => "oband",
            Band::C => "cband",
        };
        let mut s = String::from("# calibrated parameters\n");
        let _ = writeln!(s, "receiver.thermal_noise_pa={:.6}", self.thermal_noise_pa);
        let _ = writeln!(s, "{scope}.eml.chirp_alpha={:.6}", self.chirp_alpha);
        let _ = writeln!(s, "# residual log10(BER/target): sensitivity {:+.4}, reach {:+.4}", self.residuals.0, self.residuals.1);
        let _ = writeln!(s, "# iterations: {}", self.iterations);
        s
    }
}

fn log_ratio(cfg: &ScenarioConfig, target: f64) -> Result<f64> {
    let r = run_point(cfg)?;
    // zero counted errors sit a decade below one error
    let floor = 0.1 / (r.report.bits_counted.max(1) as f64);
    Ok((r.report.pre_fec_ber.max(floor) / target).log10())
}

/// Bisection for an increasing objective on [lo, hi]; returns (x, f(x)).
fn bisect<F>(
    mut f: F,
    lo: f64,
    hi: f64,
    tol: f64,
    budget: &mut usize,
    trace: &mut Vec<(f64, f64)>,
    map: impl Fn(f64) -> f64,
) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut eval = |x: f64, budget: &mut usize, trace: &mut Vec<(f64, f64)>| -> Result<f64> {
        if *budget == 0 {
            return Err(Error::Calibration { reason: "no convergence within the iteration limit".into(), trace: trace.clone() });
        }
        *budget -= 1;
        let v = f(x)?;
        trace.push((map(x), v));
        Ok(v)
    };
    let f_lo = eval(lo, budget, trace)?;
    if f_lo > 0.0 {
        return Err(Error::Calibration {
            reason: format!("anchor unreachable: BER above target even at {:.4}", map(lo)),
            trace: trace.clone(),
        });
    }
    let f_hi = eval(hi, budget, trace)?;
    if f_hi <= 0.0 {
        return Err(Error::Calibration {
            reason: format!("anchor unreachable: BER below target even at {:.4}", map(hi)),
            trace: trace.clone(),
        });
    }
    let (mut a, mut b, mut fa, mut fb) = (lo, hi, f_lo, f_hi);
    while b - a > tol {
        let m = 0.5 * (a + b);
        let fm = eval(m, budget, trace)?;
        if fm > 0.0 {
            b = m;
            fb = fm;
        } else {
            a = m;
            fa = fm;
        }
    }
    // report the bracket end nearer the target
    Ok(if fa.abs() <= fb.abs() { (a, fa) } else { (b, fb) })
}

/// Fit noise density then chirp to the anchors.
pub fn calibrate(targets: &CalibrationTargets) -> Result<Calibration> {
    targets.validate()?;
    let mut budget = targets.max_iterations;
    let mut trace = Vec::new();

    let base_alpha = targets.scenario(&targets.sensitivity, 1.0, None)?.eml.chirp_alpha;
    let (log_noise, r0) = bisect(
        |x| log_ratio(&targets.scenario(&targets.sensitivity, 10f64.powf(x), Some(base_alpha))?, targets.sensitivity.target_ber),
        targets.noise_range_pa.0.log10(),
        targets.noise_range_pa.1.log10(),
        targets.noise_tolerance_decades,
        &mut budget,
        &mut trace,
        |x| 10f64.powf(x),
    )?;
    let noise = 10f64.powf(log_noise);

    let (alpha, r1) = bisect(
        |a| log_ratio(&targets.scenario(&targets.reach, noise, Some(a))?, targets.reach.target_ber),
        targets.alpha_range.0,
        targets.alpha_range.1,
        targets.alpha_tolerance,
        &mut budget,
        &mut trace,
        |a| a,
    )?;
    Ok(Calibration {
        thermal_noise_pa: noise,
        chirp_alpha: alpha,
        alpha_band: targets.reach.band,
        residuals: (r0, r1),
        iterations: targets.max_iterations - budget,
        trace,
    })
}
