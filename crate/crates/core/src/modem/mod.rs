//! DCO-OFDM transmit/receive chain with adaptive bit and power loading.

mod bits;
mod burst;
mod config;
pub mod dsp;
mod estimation;
mod frame;
mod loading;
mod mapping;
mod metrics;
pub mod qam;
mod sync;

pub use bits::generate_bits;
pub use burst::{build_burst, receive_burst, Burst, RxBurst};
pub use config::OfdmConfig;
pub use dsp::{clip, Clipped};
pub use estimation::{equalize, estimate_channel, estimate_snr, ChannelEstimate, SubcarrierSnr, MIN_SNR_SYMBOLS};
pub use frame::{assemble_frame, hermitian_spectrum, ofdm_demodulate, ofdm_modulate, OfdmFrame};
pub use loading::{bit_power_loading, load_with_table, snr_gap, BitLoadingPlan, PowerTable};
pub use mapping::{demap_plan, map_plan, pilot_symbols, uniform_plan, PILOT_REPEATS};
pub use metrics::{data_rate, measure_ber};
pub use qam::{qam_demodulate, qam_modulate};
pub use sync::{preamble, preamble_chips, synchronize, SyncResult};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModemError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("unsupported constellation order {0}; expected a power of two in 2..=1024")]
    InvalidOrder(u32),
    #[error("bit count {count} is not a multiple of {bits_per_symbol}")]
    BitCount { count: usize, bits_per_symbol: u32 },
    #[error("expected {expected} data symbols, got {got}")]
    SymbolCount { expected: usize, got: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("synchronisation failed: peak-to-sidelobe ratio {psr_db:.2} dB below {threshold_db} dB")]
    SyncFailure { psr_db: f64, threshold_db: f64 },
    #[error("stream of {got} samples is too short, need {need}")]
    ShortStream { got: usize, need: usize },
    #[error("{got} symbols per carrier, at least {need} required")]
    TooFewSymbols { got: usize, need: usize },
    #[error("BER target {0} outside (0, 0.5)")]
    BerTarget(f64),
    #[error("need at least one pilot frame")]
    NoPilots,
}
