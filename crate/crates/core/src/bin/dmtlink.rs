//! Command-line front end: run a point, sweep a variable, calibrate, print
//! notch tables and defaults.
//!
//! Exit status: 0 on success, 2 when some points produced no measurement,
//! 1 on configuration or I/O errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dmtlink::channel::{dispersion_coefficient, imdd_response, notch_frequencies};
use dmtlink::error::{Error, Result};
use dmtlink::harness::{
    calibrate, read_pairs, run_point, sweep, write_point, write_sweep, Band, CalibrationTargets, DataRate,
    ScenarioConfig, SweepSpec, SweepVar,
};

#[derive(Parser)]
#[command(name = "dmtlink", version, about = "IM-DD DMT link simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one scenario and write run.csv, loading.csv and manifest.json.
    Run {
        config: PathBuf,
        /// Extra `key=value` settings applied after the file.
        #[arg(short, long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        /// Output directory (default: `run.output` from the config).
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Run a scenario at several values of one variable.
    Sweep {
        config: PathBuf,
        /// `distance` (km) or `power` (received power, dBm).
        #[arg(long)]
        var: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        values: Vec<f64>,
        #[arg(short, long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Worker threads, 0 for one per core.
        #[arg(short, long, default_value_t = 0)]
        jobs: usize,
    },
    /// Fit receiver noise and chirp to the anchors in a targets file.
    Calibrate {
        targets: PathBuf,
        /// Write the parameter file here as well as to stdout.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Print the small-signal response of fiber plus chirped modulator.
    Notch {
        #[arg(long, default_value = "C")]
        band: Band,
        /// Fiber length, km.
        #[arg(long)]
        length: f64,
        /// Henry factor (default: the band's configured value).
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<f64>,
        /// Highest frequency, GHz.
        #[arg(long, default_value_t = 32.0)]
        fmax: f64,
        /// Frequency step, GHz.
        #[arg(long, default_value_t = 0.5)]
        step: f64,
    },
    /// Print every scenario key with its default value.
    Defaults {
        #[arg(long, default_value = "C")]
        band: Band,
        #[arg(long, default_value = "100G")]
        rate: DataRate,
    },
}

fn load(config: &Path, set: &[String]) -> Result<ScenarioConfig> {
    let mut pairs = read_pairs(config)?;
    for s in set {
        let (k, v) = s
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("expected KEY=VALUE, got '{s}'")))?;
        pairs.push((k.trim().to_string(), v.trim().to_string()));
    }
    ScenarioConfig::from_pairs(&pairs)
}

fn execute(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::Run { config, set, out } => {
            let cfg = load(&config, &set)?;
            let result = run_point(&cfg)?;
            let dir = out.unwrap_or_else(|| cfg.output.clone());
            write_point(&dir, &cfg, &result)?;
            let r = &result.report;
            println!(
                "band={} rate={} length_km={} p_rec_dbm={:.2} ber={:.3e} fec_pass={} bits={} clip={:.2}",
                cfg.band, cfg.rate, cfg.length_km, r.p_rec_dbm, r.pre_fec_ber, r.fec_pass, r.bits_counted, result.clip_ratio
            );
            if let Some(f) = &result.failure {
                eprintln!("point failed: {f}");
                return Ok(ExitCode::from(2));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep { config, var, values, set, out, jobs } => {
            let cfg = load(&config, &set)?;
            let dir = out.unwrap_or_else(|| cfg.output.clone());
            let spec = SweepSpec::new(var.parse::<SweepVar>()?, values, cfg)?;
            let rows = sweep(&spec, jobs)?;
            let manifest = write_sweep(&dir, &spec, &rows)?;
            for r in &rows {
                println!("{:>8} {:.3e} {:>5} {:.2}", r.x, r.pre_fec_ber, r.fec_pass, r.p_rec_dbm);
            }
            for f in &manifest.failures {
                eprintln!("point failed: {f}");
            }
            Ok(if manifest.failures.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
        Command::Calibrate { targets, out } => {
            let t = CalibrationTargets::from_file(&targets)?;
            let c = calibrate(&t)?;
            let text = c.to_params();
            print!("{text}");
            if let Some(path) = out {
                fs::write(path, text)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Notch { band, length, alpha, fmax, step } => {
            if !(step > 0.0) || !(fmax > 0.0) {
                return Err(Error::Config("fmax and step must be positive".into()));
            }
            let cfg = ScenarioConfig::new(band, DataRate::G100);
            let alpha = alpha.unwrap_or(cfg.eml.chirp_alpha);
            let lambda = cfg.eml.wavelength_nm;
            let d = dispersion_coefficient(lambda, &cfg.fiber)?;
            println!("# band={band} wavelength_nm={lambda} length_km={length} D_ps_nm_km={d:.4} alpha={alpha}");
            let notches = notch_frequencies(d, length, lambda, alpha, fmax * 1e9);
            let list: Vec<String> = notches.iter().map(|f| format!("{:.3}", f / 1e9)).collect();
            println!("# notches_ghz={}", list.join(","));
            println!("f_ghz,gain_linear,gain_db");
            let n = (fmax / step).round() as usize;
            for i in 0..=n {
                let f = i as f64 * step;
                let h = imdd_response(f * 1e9, d, length, lambda, alpha);
                println!("{f:.3},{h:.6},{:.3}", 20.0 * h.max(1e-12).log10());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Defaults { band, rate } => {
            print!("{}", ScenarioConfig::new(band, rate).to_text());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
