use proptest::prelude::*;

use dmtlink::error::Error;
use dmtlink::harness::{
    calibrate, run_point, sweep, sweep_csv, write_point, write_sweep, Anchor, Band, CalibrationTargets, DataRate,
    Manifest, ScenarioConfig, SweepSpec, SweepVar, VoaMode,
};
use dmtlink::rx::FEC_LIMIT;

fn floored_ber(r: &dmtlink::harness::SweepRow) -> f64 {
    let bits = r.result.as_ref().map_or(1, |p| p.report.bits_counted.max(1));
    r.pre_fec_ber.max(0.1 / bits as f64)
}

#[test]
fn ber_rises_as_received_power_falls() {
    let base = ScenarioConfig::new(Band::C, DataRate::G25);
    let spec = SweepSpec::new(SweepVar::ReceivedPower, vec![-7.0, -8.0, -9.0, -10.0, -11.0, -12.0], base).unwrap();
    let rows = sweep(&spec, 0).unwrap();
    let y: Vec<f64> = rows.iter().map(|r| floored_ber(r).log10()).collect();
    // least-squares slope of log BER against point index
    let n = y.len() as f64;
    let mx = (n - 1.0) / 2.0;
    let my = y.iter().sum::<f64>() / n;
    let slope = y.iter().enumerate().map(|(i, v)| (i as f64 - mx) * (v - my)).sum::<f64>()
        / (0..y.len()).map(|i| (i as f64 - mx).powi(2)).sum::<f64>();
    assert!(slope > 0.0, "{y:?}");
    assert!(y[y.len() - 1] > y[0]);
}

#[test]
fn sweeps_are_reproducible_across_thread_counts() {
    let mut base = ScenarioConfig::new(Band::O, DataRate::G50);
    base.min_payload_bits = 200_000;
    let spec = SweepSpec::new(SweepVar::Distance, vec![0.0, 10.0, 20.0], base).unwrap();
    let a = sweep_csv(&sweep(&spec, 1).unwrap());
    let b = sweep_csv(&sweep(&spec, 3).unwrap());
    assert_eq!(a, b);
}

#[test]
fn repeated_values_are_rejected() {
    let base = ScenarioConfig::new(Band::O, DataRate::G25);
    assert!(matches!(SweepSpec::new(SweepVar::Distance, vec![0.0, 0.0], base), Err(Error::Config(_))));
}

#[test]
fn dark_link_fails_the_gate() {
    let mut cfg = ScenarioConfig::new(Band::C, DataRate::G25);
    cfg.eml.launch_power_dbm = -60.0;
    cfg.voa_mode = VoaMode::Fixed;
    let r = run_point(&cfg).unwrap();
    assert!(!r.report.fec_pass);
    assert!(r.failed());
}

#[test]
fn result_files_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ScenarioConfig::new(Band::O, DataRate::G25);
    cfg.min_payload_bits = 100_000;
    let r = run_point(&cfg).unwrap();
    let m = write_point(dir.path(), &cfg, &r).unwrap();
    for f in ["run.csv", "loading.csv", "manifest.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
        assert!(m.outputs.iter().any(|o| o == f));
    }
    let back: Manifest = serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(back.config, cfg);
    assert_eq!(back.seed, cfg.seed);
    assert!(back.failures.is_empty());
    let csv = std::fs::read_to_string(dir.path().join("run.csv")).unwrap();
    assert!(csv.starts_with("x,pre_fec_ber,fec_pass"));

    let spec = SweepSpec::new(SweepVar::ReceivedPower, vec![-10.0, -60.0], cfg).unwrap();
    let rows = sweep(&spec, 0).unwrap();
    let m = write_sweep(dir.path(), &spec, &rows).unwrap();
    assert_eq!(m.failures.len(), 1);
    assert!(m.failures[0].starts_with("x=-60"));
}

#[test]
fn calibration_recovers_known_parameters() {
    let mut targets = CalibrationTargets::default();
    targets.overrides.push(("run.min_payload_bits".into(), "300000".into()));
    let (noise, alpha) = (45.0, 0.8);
    let ber_at = |t: &CalibrationTargets, a: &Anchor, al: Option<f64>| {
        run_point(&t.scenario(a, noise, al).unwrap()).unwrap().report.pre_fec_ber
    };
    targets.sensitivity.target_ber = ber_at(&targets, &targets.sensitivity, None);
    targets.reach.target_ber = ber_at(&targets, &targets.reach, Some(alpha));
    let c = calibrate(&targets).unwrap();
    assert!((c.thermal_noise_pa / noise - 1.0).abs() < 0.05, "{}", c.thermal_noise_pa);
    assert!((c.chirp_alpha - alpha).abs() < 0.05 * alpha.abs(), "{}", c.chirp_alpha);
    assert!(c.iterations < 50);
}

#[test]
fn unreachable_anchor_is_reported() {
    let mut targets = CalibrationTargets::default();
    targets.sensitivity.p_rec_dbm = Some(-45.0);
    assert!(matches!(calibrate(&targets), Err(Error::Calibration { .. })));
}

#[test]
fn targets_file_matches_defaults() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/targets.conf");
    let t = CalibrationTargets::from_file(std::path::Path::new(path)).unwrap();
    let d = CalibrationTargets::default();
    assert_eq!(t.sensitivity, d.sensitivity);
    assert_eq!(t.reach.target_ber, 0.5 * FEC_LIMIT);
    assert_eq!((t.reach.band, t.reach.rate, t.reach.length_km), (d.reach.band, d.reach.rate, d.reach.length_km));
}

#[test]
fn shipped_configs_parse() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs");
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.file_name().is_some_and(|n| n != "targets.conf") {
            ScenarioConfig::from_file(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        }
    }
}

#[test]
fn include_then_override() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("base.conf"), "scenario.band=C\nscenario.rate=50G\nscenario.length_km=7\n").unwrap();
    std::fs::write(dir.path().join("top.conf"), "include=base.conf\nscenario.length_km=9\n").unwrap();
    let cfg = ScenarioConfig::from_file(&dir.path().join("top.conf")).unwrap();
    assert_eq!((cfg.band, cfg.rate, cfg.length_km), (Band::C, DataRate::G50, 9.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn config_text_round_trips(
        c_band in any::<bool>(),
        rate in 0usize..3,
        length in 0.0f64..80.0,
        voa in 0.0f64..20.0,
        alpha in -2.0f64..2.0,
        noise in 1.0f64..200.0,
        seed in any::<u64>(),
        p_rec in prop::option::of(-20.0f64..0.0),
    ) {
        let rate = [DataRate::G25, DataRate::G50, DataRate::G100][rate];
        let mut cfg = ScenarioConfig::new(if c_band { Band::C } else { Band::O }, rate);
        cfg.length_km = length;
        cfg.voa_db = voa;
        cfg.eml.chirp_alpha = alpha;
        cfg.rx.thermal_noise_pa = noise;
        cfg.seed = seed;
        cfg.target_p_rec_dbm = p_rec;
        prop_assert_eq!(ScenarioConfig::parse(&cfg.to_text()).unwrap(), cfg);
    }
}
