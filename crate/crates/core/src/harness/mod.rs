//! Scenario configuration, single-point runs, sweeps, threshold searches,
//! calibration and result files.

mod calibrate;
mod config;
mod manifest;
mod point;
mod search;
mod sweep;

pub use calibrate::{calibrate, Anchor, Calibration, CalibrationTargets};
pub use config::{
    parse_pairs, read_pairs, Band, DataRate, ScenarioConfig, VoaMode, CALIBRATED_C_BAND_ALPHA, CALIBRATED_NOISE_PA,
};
pub use manifest::{write_point, write_sweep, Manifest, SweepInfo};
pub use point::{build_burst, derive_seed, preamble_frame, probe_frames, receive_burst, run_point, Burst, PointResult, FAILED_BER};
pub use search::{max_reach, sensitivity, Threshold};
pub use sweep::{sweep, sweep_csv, SweepRow, SweepSpec, SweepVar, SWEEP_CSV_HEADER};
