use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::ScenarioConfig;
use crate::channel::Link;
use crate::dmt::qam::Constellation;
use crate::dmt::{demodulate_frames, map_bits, modulate, modulate_frames, pilot_symbol, quantize};
use crate::dmt::{DmtParams, Domain, FrequencyFrame, WaveformBuffer};
use crate::error::{Error, Result};
use crate::loading::{estimate_snr, waterfill_with, LoadingOptions, SnrProfile, SubcarrierPlan};
use crate::rx::{demap, fec_gate, net_rate, synchronize_within, BerCounter, BerReport, Equalizer};

/// BER recorded for points that produced no measurement.
pub const FAILED_BER: f64 = 0.5;

/// Outcome of one simulated measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointResult {
    pub report: BerReport,
    /// SNR measured with the probe at the chosen clip ratio.
    pub snr: Option<SnrProfile>,
    pub plan: Option<SubcarrierPlan>,
    pub clip_ratio: f64,
    /// Bits per symbol the plan was asked to carry.
    pub gross_bits: usize,
    /// Largest loadable bits per symbol when the target was infeasible.
    pub max_bits: Option<usize>,
    pub clamp_fraction: f64,
    pub seed: u64,
    /// Why no BER could be measured, if so.
    pub failure: Option<String>,
}

impl PointResult {
    pub fn failed(&self) -> bool {
        self.failure.is_some()
    }
}

/// Independent stream `stream` derived from `seed`.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const STREAM_PREAMBLE: u64 = 1;
const STREAM_PROBE_DATA: u64 = 2;
const STREAM_PROBE_NOISE: u64 = 3;
const STREAM_PAYLOAD_DATA: u64 = 4;
const STREAM_PAYLOAD_NOISE: u64 = 5;

/// QPSK on every subcarrier at unit power; the same for every run.
pub fn preamble_frame(params: &DmtParams) -> FrequencyFrame {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(0, STREAM_PREAMBLE));
    let c = Constellation::new(2).expect("QPSK");
    FrequencyFrame::from_symbols((0..params.n_usable()).map(|_| c.point(rng.random_range(0..4))).collect())
}

/// Known frames with random QPSK on data subcarriers and pilots in place,
/// all at unit power.
pub fn probe_frames(params: &DmtParams, count: usize, seed: u64) -> Vec<FrequencyFrame> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = Constellation::new(2).expect("QPSK");
    (0..count)
        .map(|_| {
            FrequencyFrame::from_symbols(
                (1..=params.n_usable())
                    .map(|k| if params.is_pilot(k) { pilot_symbol(k) } else { c.point(rng.random_range(0..4)) })
                    .collect(),
            )
        })
        .collect()
}

/// A transmitted burst: CW guard, preamble, frames, CW guard.
pub struct Burst {
    pub drive: WaveformBuffer,
    pub preamble: Vec<f64>,
    pub frames: usize,
}

pub fn build_burst(frames: &[FrequencyFrame], params: &DmtParams, guard: usize) -> Result<Burst> {
    let preamble = modulate(&preamble_frame(params), params)?.real();
    let body = modulate_frames(frames, params)?;
    let mut samples = Vec::with_capacity(2 * guard + preamble.len() + body.len());
    samples.extend(std::iter::repeat_n(0.0, guard));
    samples.extend(&preamble);
    samples.extend(body.samples.iter().map(|v| v.re));
    samples.extend(std::iter::repeat_n(0.0, guard));
    let mut drive = WaveformBuffer::from_real(samples, params.sample_rate, Domain::ElectricalVoltage);
    if params.clip_ratio.is_finite() {
        drive = quantize(&drive, params.dac_bits, params.clip_ratio)?;
    }
    Ok(Burst { drive, preamble, frames: frames.len() })
}

/// Send a burst over the link and return the demodulated frames.
pub fn receive_burst(burst: &Burst, link: &Link, params: &DmtParams, cfg: &ScenarioConfig, seed: u64) -> Result<Vec<FrequencyFrame>> {
    let out = link.transmit(&burst.drive, seed)?;
    receive_prepared(out.current, burst, params, cfg)
}

/// Modem and link parameters at a given clip ratio. The DAC full scale is the
/// clip level, and it drives the modulator to its full modulation depth.
fn at_clip(cfg: &ScenarioConfig, link: &Link, clip: f64) -> (DmtParams, Link) {
    let mut params = cfg.dmt.clone();
    params.clip_ratio = clip;
    let mut link = link.clone();
    if clip.is_finite() {
        link.eml.drive_full_scale = clip;
    }
    (params, link)
}

struct Probe {
    snr: SnrProfile,
    plan: Result<SubcarrierPlan>,
}

impl Probe {
    /// Margin objective: the equal margin when the rate fits, otherwise a
    /// large penalty eased by the fraction of the target that could be loaded.
    fn score(&self, target: usize) -> f64 {
        match &self.plan {
            Ok(p) => p.margin_db,
            Err(Error::InfeasibleRate { max_bits, .. }) => -1000.0 + *max_bits as f64 / target as f64,
            Err(_) => -2000.0,
        }
    }
}

fn probe(cfg: &ScenarioConfig, link: &Link, clip: f64) -> Result<Probe> {
    let (params, link) = at_clip(cfg, link, clip);
    let tx = probe_frames(&params, cfg.probe_frames, derive_seed(cfg.seed, STREAM_PROBE_DATA));
    let burst = build_burst(&tx, &params, cfg.guard_samples)?;
    let rx = receive_burst(&burst, &link, &params, cfg, derive_seed(cfg.seed, STREAM_PROBE_NOISE))?;
    let mut snr = estimate_snr(&rx, &tx)?;
    snr.sample_rate = params.sample_rate;
    let opts = LoadingOptions {
        gap_db: cfg.gap_db,
        max_bits: cfg.max_bits,
        pilots: params.pilot_indices.clone(),
        power_budget: None,
    };
    let plan = waterfill_with(&snr, cfg.gross_bits(), &opts);
    Ok(Probe { snr, plan })
}

/// Golden-section search for the clip ratio with the best loading margin.
fn best_clip(cfg: &ScenarioConfig, link: &Link) -> Result<(f64, Probe)> {
    if !cfg.clip_search {
        return Ok((cfg.dmt.clip_ratio, probe(cfg, link, cfg.dmt.clip_ratio)?));
    }
    let target = cfg.gross_bits();
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (cfg.clip_min, cfg.clip_max);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut pc = probe(cfg, link, c)?;
    let mut pd = probe(cfg, link, d)?;
    while b - a > cfg.clip_tolerance {
        if pc.score(target) >= pd.score(target) {
            b = d;
            d = c;
            pd = pc;
            c = b - inv_phi * (b - a);
            pc = probe(cfg, link, c)?;
        } else {
            a = c;
            c = d;
            pc = pd;
            d = a + inv_phi * (b - a);
            pd = probe(cfg, link, d)?;
        }
    }
    Ok(if pc.score(target) >= pd.score(target) { (c, pc) } else { (d, pd) })
}

fn random_bits(rng: &mut ChaCha8Rng, n: usize) -> Vec<u8> {
    (0..n).map(|_| rng.random_range(0..2u8)).collect()
}

fn failed_point(cfg: &ScenarioConfig, link: &Link, reason: String) -> PointResult {
    PointResult {
        report: BerReport {
            bits_counted: 0,
            bit_errors: 0,
            pre_fec_ber: FAILED_BER,
            per_subcarrier_ber: Vec::new(),
            fec_pass: false,
            net_rate_bps: 0.0,
            p_rec_dbm: link.p_rec_dbm(),
        },
        snr: None,
        plan: None,
        clip_ratio: cfg.dmt.clip_ratio,
        gross_bits: cfg.gross_bits(),
        max_bits: None,
        clamp_fraction: 0.0,
        seed: cfg.seed,
        failure: Some(reason),
    }
}

/// One measurement point: probe and clip search, water-filling to the gross
/// bit target, payload burst with training, synchronization, equalization,
/// demapping and the FEC gate.
///
/// Configuration errors are returned as `Err`. Infeasible loading and
/// synchronization failures produce a result flagged in `failure`.
pub fn run_point(cfg: &ScenarioConfig) -> Result<PointResult> {
    cfg.validate()?;
    let link = cfg.link()?;
    let (clip, probe) = match best_clip(cfg, &link) {
        Ok(x) => x,
        Err(e @ Error::SyncFailure { .. }) => return Ok(failed_point(cfg, &link, e.to_string())),
        Err(e) => return Err(e),
    };
    let plan = match probe.plan {
        Ok(p) => p,
        Err(e) => {
            let mut r = failed_point(cfg, &link, e.to_string());
            if let Error::InfeasibleRate { max_bits, .. } = e {
                r.max_bits = Some(max_bits);
            }
            r.snr = Some(probe.snr);
            r.clip_ratio = clip;
            return Ok(r);
        }
    };
    let (params, link) = at_clip(cfg, &link, clip);

    let gross = plan.gross_bits();
    let n_payload = cfg.payload_frames.max(cfg.min_payload_bits.div_ceil(gross.max(1) as u64) as usize);
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, STREAM_PAYLOAD_DATA));
    let mut sent = Vec::with_capacity(cfg.training_frames + n_payload);
    let mut tx = Vec::with_capacity(sent.capacity());
    for _ in 0..cfg.training_frames + n_payload {
        let bits = random_bits(&mut rng, gross);
        tx.push(map_bits(&bits, &plan)?);
        sent.push(bits);
    }
    let burst = build_burst(&tx, &params, cfg.guard_samples)?;
    let out = link.transmit(&burst.drive, derive_seed(cfg.seed, STREAM_PAYLOAD_NOISE))?;
    let clamp_fraction = out.clamp_fraction;
    let rx = match receive_prepared(out.current, &burst, &params, cfg) {
        Ok(rx) => rx,
        Err(e @ Error::SyncFailure { .. }) => {
            let mut r = failed_point(cfg, &link, e.to_string());
            r.snr = Some(probe.snr);
            r.plan = Some(plan);
            r.clip_ratio = clip;
            return Ok(r);
        }
        Err(e) => return Err(e),
    };

    let t = cfg.training_frames;
    let mut eq = Equalizer::train(&rx[..t], &tx[..t], cfg.forgetting)?;
    let mut counter = BerCounter::new(plan.n_usable());
    for (frame, bits) in rx[t..].iter().zip(&sent[t..]) {
        let y = eq.equalize_and_update(frame, &plan)?;
        let decided = demap(&y, &plan)?;
        counter.add_frame(bits, &decided.bits, &plan)?;
    }
    let mut report = counter.report(cfg.fec_limit);
    report.net_rate_bps = net_rate(gross, 1.0 / params.symbol_duration(), cfg.fec_overhead);
    report.p_rec_dbm = link.p_rec_dbm();
    fec_gate(&mut report, cfg.fec_limit)?;
    Ok(PointResult {
        report,
        snr: Some(probe.snr),
        plan: Some(plan),
        clip_ratio: clip,
        gross_bits: gross,
        max_bits: None,
        clamp_fraction,
        seed: cfg.seed,
        failure: None,
    })
}

fn receive_prepared(
    current: WaveformBuffer,
    burst: &Burst,
    params: &DmtParams,
    cfg: &ScenarioConfig,
) -> Result<Vec<FrequencyFrame>> {
    let rms = current.rms();
    let current = if rms > 0.0 { quantize(&current, params.adc_bits, 4.0 * rms)? } else { current };
    let offset = synchronize_within(&current, &burst.preamble, 2 * cfg.guard_samples)?;
    let start = (offset + params.symbol_len()).saturating_sub(cfg.timing_backoff);
    demodulate_frames(&current, start, burst.frames, params).map_err(|_| Error::SyncFailure { peak: 0.0 })
}
