use num_complex::Complex64;

use super::dsp::{clip, filter_delay, matched_filter, shape};
use super::sync::{preamble, preamble_chips, synchronize, SyncResult};
use super::{ofdm_demodulate, ModemError, OfdmConfig};

/// Silent chips before and after the burst content.
const GUARD_CHIPS: usize = 64;

/// Shaped transmit stream: guard, preamble, frames, guard.
#[derive(Debug, Clone, PartialEq)]
pub struct Burst {
    /// Unit-variance samples at the oversampled rate (clipped when requested).
    pub samples: Vec<f64>,
    pub n_frames: usize,
    /// Fraction of samples that were clipped.
    pub clip_fraction: f64,
}

/// Concatenates frame chips behind the preamble, shapes, normalises to unit
/// variance and optionally clips at `cfg.clip_threshold`.
pub fn build_burst(frames: &[Vec<f64>], cfg: &OfdmConfig, clipping: bool) -> Result<Burst, ModemError> {
    let mut chips = vec![0.0; GUARD_CHIPS];
    chips.extend(preamble_chips(cfg));
    for f in frames {
        if f.len() != cfg.symbol_length() {
            return Err(ModemError::LengthMismatch { left: f.len(), right: cfg.symbol_length() });
        }
        chips.extend_from_slice(f);
    }
    chips.extend(std::iter::repeat_n(0.0, GUARD_CHIPS));
    let mut samples = shape(&chips, cfg);
    let n = samples.len() as f64;
    let sigma = (samples.iter().map(|x| x * x).sum::<f64>() / n).sqrt();
    if sigma > 0.0 {
        for x in &mut samples {
            *x /= sigma;
        }
    }
    let (samples, clip_fraction) = if clipping {
        let c = clip(&samples, cfg.clip_threshold);
        (c.samples, c.fraction)
    } else {
        (samples, 0.0)
    };
    Ok(Burst { samples, n_frames: frames.len(), clip_fraction })
}

/// Received frames (data-carrier bins) after matched filtering and sync.
#[derive(Debug, Clone, PartialEq)]
pub struct RxBurst {
    pub frames: Vec<Vec<Complex64>>,
    pub sync: SyncResult,
}

/// Matched filter, preamble search, chip-rate sampling and FFT of `n_frames`.
pub fn receive_burst(samples: &[f64], cfg: &OfdmConfig, n_frames: usize) -> Result<RxBurst, ModemError> {
    let y = matched_filter(samples, cfg);
    let template = preamble(cfg);
    let sync = synchronize(&y, &template, 4 * cfg.oversampling_factor)?;
    let osf = cfg.oversampling_factor;
    let first = sync.index + filter_delay(cfg) + cfg.preamble_length() * osf;
    let sym = cfg.symbol_length();
    let need = first + (n_frames * sym).saturating_sub(1) * osf + 1;
    if n_frames > 0 && y.len() < need {
        return Err(ModemError::ShortStream { got: y.len(), need });
    }
    let frames = (0..n_frames)
        .map(|f| {
            let start = first + f * sym * osf;
            let chips: Vec<f64> = (0..sym).map(|j| y[start + j * osf]).collect();
            ofdm_demodulate(&chips, cfg)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RxBurst { frames, sync })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modem::{generate_bits, ofdm_modulate, qam_modulate};

    #[test]
    fn noiseless_loopback_recovers_symbols() {
        let cfg = OfdmConfig::default();
        let syms: Vec<Vec<Complex64>> = (0..4)
            .map(|s| qam_modulate(&generate_bits(s, 511 * 6), 64).unwrap())
            .collect();
        let chips: Vec<Vec<f64>> = syms.iter().map(|s| ofdm_modulate(s, &cfg).unwrap()).collect();
        let b = build_burst(&chips, &cfg, false).unwrap();
        let rx = receive_burst(&b.samples, &cfg, 4).unwrap();
        // common scale from the unit-variance normalisation
        let g: Complex64 = rx.frames[0].iter().zip(&syms[0]).map(|(r, s)| r / s).sum::<Complex64>() / 511.0;
        let mut worst: f64 = 0.0;
        for (r, s) in rx.frames.iter().zip(&syms) {
            for (a, b) in r.iter().zip(s) {
                worst = worst.max((a / g - b).norm());
            }
        }
        assert!(worst < 1e-2, "{worst}");
    }
}
