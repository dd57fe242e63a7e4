use super::config::ScenarioConfig;
use super::point::{run_point, PointResult};
use crate::error::{Error, Result};

/// A located threshold and the points visited on the way.
#[derive(Debug, Clone)]
pub struct Threshold {
    pub value: f64,
    /// (x, pre-FEC BER, pass) for every evaluation.
    pub trace: Vec<(f64, f64, bool)>,
}

fn evaluate(cfg: &ScenarioConfig, trace: &mut Vec<(f64, f64, bool)>, x: f64) -> Result<PointResult> {
    let r = run_point(cfg)?;
    trace.push((x, r.report.pre_fec_ber, r.report.fec_pass));
    Ok(r)
}

/// Lowest received power at which the point passes the FEC gate, by
/// bisection on [lo, hi] dBm to within `tol` dB. The result is the passing
/// end of the final bracket.
pub fn sensitivity(cfg: &ScenarioConfig, lo: f64, hi: f64, tol: f64) -> Result<Threshold> {
    let mut trace = Vec::new();
    let at = |p: f64| ScenarioConfig { target_p_rec_dbm: Some(p), ..cfg.clone() };
    if evaluate(&at(lo), &mut trace, lo)?.report.fec_pass {
        return Err(Error::Config(format!("point already passes at {lo} dBm")));
    }
    if !evaluate(&at(hi), &mut trace, hi)?.report.fec_pass {
        return Err(Error::Config(format!("point does not pass at {hi} dBm")));
    }
    let (mut fail, mut pass) = (lo, hi);
    while pass - fail > tol {
        let mid = 0.5 * (fail + pass);
        if evaluate(&at(mid), &mut trace, mid)?.report.fec_pass {
            pass = mid;
        } else {
            fail = mid;
        }
    }
    Ok(Threshold { value: pass, trace })
}

/// Longest fiber on which the point passes, by bisection on [lo, hi] km to
/// within `tol` km. Returns `hi` when it passes there, and an error when
/// even `lo` fails.
pub fn max_reach(cfg: &ScenarioConfig, lo: f64, hi: f64, tol: f64) -> Result<Threshold> {
    let mut trace = Vec::new();
    let at = |l: f64| ScenarioConfig { length_km: l, ..cfg.clone() };
    if evaluate(&at(hi), &mut trace, hi)?.report.fec_pass {
        return Ok(Threshold { value: hi, trace });
    }
    if !evaluate(&at(lo), &mut trace, lo)?.report.fec_pass {
        return Err(Error::Config(format!("point fails already at {lo} km")));
    }
    let (mut pass, mut fail) = (lo, hi);
    while fail - pass > tol {
        let mid = 0.5 * (pass + fail);
        if evaluate(&at(mid), &mut trace, mid)?.report.fec_pass {
            pass = mid;
        } else {
            fail = mid;
        }
    }
    Ok(Threshold { value: pass, trace })
}
