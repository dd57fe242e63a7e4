//! Receiver DSP: preamble synchronization, one-tap equalization with
//! background tracking, demapping, BER counting and the FEC gate.

mod demap;
mod equalizer;
mod fec;
mod sync;

pub use demap::{demap, Demapped};
pub use equalizer::{Equalizer, UpdateMode, DEFAULT_FORGETTING, MIN_TRAINING_FRAMES, REGULARIZER};
pub use fec::{
    fec_gate, gross_bits_for, min_bits_for, net_rate, BerCounter, BerReport, DEFAULT_FEC_OVERHEAD, FEC_LIMIT,
};
pub use sync::{correlation_peak, synchronize, synchronize_within, SYNC_THRESHOLD};
