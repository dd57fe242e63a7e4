//! Bit-true simulation of an intensity-modulated, directly detected
//! discrete multi-tone link for passive optical networks.
//!
//! The crate is organised along the signal path:
//!
//! - [`dmt`]: constellation mapping, Hermitian transforms, cyclic prefix,
//!   clipping and converter quantization;
//! - [`loading`]: SNR estimation, water-filling bit/power loading and the
//!   analytic BER oracle;
//! - [`channel`]: driver and EML with chirp, standard single-mode fiber,
//!   PIN/TIA receiver, and the small-signal dispersion response;
//! - [`rx`]: synchronization, one-tap equalization, demapping, BER counting
//!   and the FEC threshold;
//! - [`harness`]: scenario configuration, single-point runs, sweeps and
//!   calibration.

pub mod channel;
pub mod dmt;
pub mod dsp;
pub mod error;
pub mod harness;
pub mod loading;
pub mod rx;

pub use error::{Error, Result};
