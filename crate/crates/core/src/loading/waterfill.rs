//! Rate-adaptive bit and power loading.
//!
//! Three stages: continuous water-filling gives a starting point, a
//! Levin–Campello greedy pass turns it into the minimum-power integer
//! allocation with exactly the requested number of bits, and the final powers
//! give every loaded subcarrier the same SNR margin over the gap.

use super::{SnrProfile, SubcarrierPlan};
use crate::dmt::qam::MAX_BITS;
use crate::dsp::{db, from_db};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LoadingOptions {
    pub gap_db: f64,
    pub max_bits: u32,
    /// Subcarriers reserved for pilots; they get unit power and no data.
    pub pilots: Vec<usize>,
    /// Total power available, in units of one subcarrier at the power the
    /// SNR profile was measured with. Defaults to the profile length.
    pub power_budget: Option<f64>,
}

impl Default for LoadingOptions {
    fn default() -> Self {
        Self { gap_db: 6.0, max_bits: MAX_BITS, pilots: Vec::new(), power_budget: None }
    }
}

/// Load `target_bits` onto `snr` without pilots.
pub fn waterfill(snr: &SnrProfile, target_bits: usize, gap_db: f64, max_bits: u32) -> Result<SubcarrierPlan> {
    waterfill_with(snr, target_bits, &LoadingOptions { gap_db, max_bits, ..LoadingOptions::default() })
}

pub fn waterfill_with(snr: &SnrProfile, target_bits: usize, opts: &LoadingOptions) -> Result<SubcarrierPlan> {
    if !(opts.gap_db >= 0.0) {
        return Err(Error::Config("gap must be nonnegative".into()));
    }
    if opts.max_bits > MAX_BITS {
        return Err(Error::Config(format!("max_bits {} exceeds {MAX_BITS}", opts.max_bits)));
    }
    let n = snr.len();
    if let Some(&k) = opts.pilots.iter().find(|&&k| k == 0 || k > n) {
        return Err(Error::Config(format!("pilot {k} outside 1..={n}")));
    }
    let gap = from_db(opts.gap_db);
    let pilot: Vec<bool> = (1..=n).map(|k| opts.pilots.contains(&k)).collect();
    let usable: Vec<usize> = (0..n).filter(|&i| !pilot[i] && snr.linear()[i] > 0.0).collect();
    let max_total = usable.len() * opts.max_bits as usize;
    if target_bits > max_total {
        return Err(Error::InfeasibleRate { target: target_bits, max_bits: max_total });
    }
    let n_pilots = pilot.iter().filter(|&&p| p).count() as f64;
    let budget = opts.power_budget.unwrap_or(n as f64);
    let data_budget = budget - n_pilots;
    if !(data_budget > 0.0) {
        return Err(Error::Config("power budget leaves nothing for data".into()));
    }
    let s = snr.linear();

    // Stage 1: continuous water-filling, starting allocation = floor(b̃)
    let pw = continuous_waterfill(&usable.iter().map(|&i| s[i]).collect::<Vec<_>>(), gap, data_budget);
    let mut bits = vec![0u32; n];
    for (&i, &p) in usable.iter().zip(&pw) {
        let b = (1.0 + p * s[i] / gap).log2().floor();
        bits[i] = (b.max(0.0) as u32).min(opts.max_bits);
    }

    // Stage 2: make the allocation efficient, then walk to the target
    let grant_cost = |i: usize, b: u32| gap * 2f64.powi(b as i32) / s[i];
    let cheapest_grant = |bits: &[u32]| {
        let mut best: Option<(usize, f64)> = None;
        for &i in &usable {
            if bits[i] < opts.max_bits {
                let c = grant_cost(i, bits[i]);
                if best.is_none_or(|(_, bc)| c < bc) {
                    best = Some((i, c));
                }
            }
        }
        best
    };
    let largest_saving = |bits: &[u32]| {
        let mut best: Option<(usize, f64)> = None;
        for &i in &usable {
            if bits[i] > 0 {
                let c = grant_cost(i, bits[i] - 1);
                if best.is_none_or(|(_, bc)| c >= bc) {
                    best = Some((i, c));
                }
            }
        }
        best
    };
    loop {
        match (largest_saving(&bits), cheapest_grant(&bits)) {
            (Some((from, save)), Some((to, cost))) if from != to && save > cost * (1.0 + 1e-12) => {
                bits[from] -= 1;
                bits[to] += 1;
            }
            _ => break,
        }
    }
    let mut total: usize = bits.iter().map(|&b| b as usize).sum();
    while total < target_bits {
        let (i, _) = cheapest_grant(&bits).expect("feasibility checked above");
        bits[i] += 1;
        total += 1;
    }
    while total > target_bits {
        let (i, _) = largest_saving(&bits).expect("total is positive");
        bits[i] -= 1;
        total -= 1;
    }
    canonicalize_ties(&mut bits, s, &usable);

    // Stage 3: equal margin on every loaded subcarrier
    let required: Vec<f64> = (0..n)
        .map(|i| if bits[i] > 0 { gap * (2f64.powi(bits[i] as i32) - 1.0) / s[i] } else { 0.0 })
        .collect();
    let req_total: f64 = required.iter().sum();
    let margin = if req_total > 0.0 { data_budget / req_total } else { f64::INFINITY };
    let mut power: Vec<f64> = (0..n)
        .map(|i| if pilot[i] { 1.0 } else if bits[i] > 0 { required[i] * margin } else { 0.0 })
        .collect();
    let active = (0..n).filter(|&i| pilot[i] || bits[i] > 0).count() as f64;
    let sum: f64 = power.iter().sum();
    if sum > 0.0 {
        power.iter_mut().for_each(|p| *p *= active / sum);
    }

    let mut plan = SubcarrierPlan::from_parts(bits, power, pilot)?;
    plan.gap_db = opts.gap_db;
    plan.margin_db = db(margin);
    Ok(plan)
}

/// p_i = max(0, μ − Γ/snr_i) with Σp = budget, μ by bisection.
fn continuous_waterfill(snr: &[f64], gap: f64, budget: f64) -> Vec<f64> {
    if snr.is_empty() {
        return Vec::new();
    }
    let floors: Vec<f64> = snr.iter().map(|s| gap / s).collect();
    let used = |mu: f64| floors.iter().map(|f| (mu - f).max(0.0)).sum::<f64>();
    let mut lo = 0.0;
    let mut hi = floors.iter().cloned().fold(0.0, f64::max) + budget;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if used(mid) > budget {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    floors.iter().map(|f| (lo - f).max(0.0)).collect()
}

/// Among subcarriers with identical SNR, give the larger counts to the lower
/// indices. Total power is unchanged.
fn canonicalize_ties(bits: &mut [u32], snr: &[f64], usable: &[usize]) {
    let mut order: Vec<usize> = usable.to_vec();
    order.sort_by(|&a, &b| snr[a].total_cmp(&snr[b]).then(a.cmp(&b)));
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && snr[order[end]] == snr[order[start]] {
            end += 1;
        }
        if end - start > 1 {
            let group = &order[start..end];
            let mut vals: Vec<u32> = group.iter().map(|&i| bits[i]).collect();
            vals.sort_unstable_by(|a, b| b.cmp(a));
            for (&i, v) in group.iter().zip(vals) {
                bits[i] = v;
            }
        }
        start = end;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn total_power(bits: &[u32], snr_db: &[f64], gap_db: f64) -> f64 {
        let g = from_db(gap_db);
        bits.iter()
            .zip(snr_db)
            .map(|(&b, &s)| g * (2f64.powi(b as i32) - 1.0) / from_db(s))
            .sum()
    }

    /// Exhaustive minimum over all integer allocations summing to `target`.
    fn brute_force(snr_db: &[f64], target: u32, max_bits: u32, gap_db: f64) -> f64 {
        fn rec(i: usize, left: u32, acc: f64, snr: &[f64], g: f64, maxb: u32, best: &mut f64) {
            if acc >= *best {
                return;
            }
            if i == snr.len() {
                if left == 0 {
                    *best = acc;
                }
                return;
            }
            if left > maxb * (snr.len() - i) as u32 {
                return;
            }
            for b in 0..=maxb.min(left) {
                let c = g * (2f64.powi(b as i32) - 1.0) / snr[i];
                rec(i + 1, left - b, acc + c, snr, g, maxb, best);
            }
        }
        let s: Vec<f64> = snr_db.iter().map(|&d| from_db(d)).collect();
        let mut best = f64::INFINITY;
        rec(0, target, 0.0, &s, from_db(gap_db), max_bits, &mut best);
        best
    }

    #[test]
    fn flat_snr_gives_uniform_plan() {
        let snr = SnrProfile::from_db(&[20.0; 16]);
        let plan = waterfill(&snr, 48, 6.0, 8).unwrap();
        assert!(plan.bits().iter().all(|&b| b == 3));
        assert!(plan.powers().iter().all(|&p| (p - 1.0).abs() < 1e-12));
    }

    #[test]
    fn matches_exhaustive_search_on_paired_snrs() {
        let snr_db = [25.0, 25.0, 20.0, 20.0, 15.0, 15.0, 5.0, 5.0];
        let plan = waterfill(&SnrProfile::from_db(&snr_db), 20, 6.0, 8).unwrap();
        assert_eq!(plan.gross_bits(), 20);
        let got = total_power(plan.bits(), &snr_db, 6.0);
        let best = brute_force(&snr_db, 20, 8, 6.0);
        assert!((got - best).abs() <= 1e-9 * best, "{got} vs {best}");
    }

    #[test]
    fn dead_subcarrier_gets_nothing() {
        let mut lin = vec![100.0; 8];
        lin[3] = 0.0;
        let snr = SnrProfile::new(lin, 1, 1.0).unwrap();
        let plan = waterfill(&snr, 20, 6.0, 8).unwrap();
        assert_eq!(plan.bits_at(4), 0);
        assert_eq!(plan.power_at(4), 0.0);
    }

    #[test]
    fn infeasible_rate_reports_maximum() {
        let snr = SnrProfile::from_db(&[10.0, 10.0, 10.0]);
        match waterfill(&snr, 13, 6.0, 4) {
            Err(Error::InfeasibleRate { target: 13, max_bits: 12 }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn pilots_carry_no_data_and_unit_relative_power() {
        let snr = SnrProfile::from_db(&[20.0; 10]);
        let opts = LoadingOptions { pilots: vec![3, 7], ..LoadingOptions::default() };
        let plan = waterfill_with(&snr, 16, &opts).unwrap();
        assert_eq!(plan.bits_at(3), 0);
        assert!(plan.is_pilot(7));
        assert_eq!(plan.gross_bits(), 16);
        assert!((plan.total_power() - plan.active_count() as f64).abs() < 1e-9);
    }

    #[test]
    fn ties_favour_lower_index() {
        let snr = SnrProfile::from_db(&[20.0; 4]);
        let plan = waterfill(&snr, 10, 6.0, 8).unwrap();
        assert_eq!(plan.bits(), &[3, 3, 2, 2]);
    }

    #[test]
    fn equal_margin_powers() {
        let snr_db = [30.0, 24.0, 18.0, 12.0];
        let plan = waterfill(&SnrProfile::from_db(&snr_db), 12, 6.0, 8).unwrap();
        let g = from_db(6.0);
        let margins: Vec<f64> = (1..=4)
            .filter(|&k| plan.bits_at(k) > 0)
            .map(|k| plan.power_at(k) * from_db(snr_db[k - 1]) / (g * (2f64.powi(plan.bits_at(k) as i32) - 1.0)))
            .collect();
        for m in &margins {
            assert!((m / margins[0] - 1.0).abs() < 1e-12);
        }
    }
}
