use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

use super::dsp::{cross_correlate, matched_filter, shape};
use super::{ModemError, OfdmConfig};

const PSR_THRESHOLD_DB: f64 = 3.0;

/// Real constant-envelope training sequence of
/// [`OfdmConfig::preamble_length`] chips.
///
/// Its spectrum has unit magnitude on every bin except DC and Nyquist, with
/// Zadoff–Chu phases on the positive half and the conjugate mirror on the
/// negative half, so the sequence is real and its periodic
/// autocorrelation is nearly an impulse. Scaled to unit power.
pub fn preamble_chips(cfg: &OfdmConfig) -> Vec<f64> {
    let n = cfg.preamble_length();
    let half = n / 2;
    let zc_len = (half - 1) as f64;
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for k in 1..half {
        let m = (k - 1) as f64;
        let z = Complex64::from_polar(1.0, -PI * m * (m + 1.0) / zc_len);
        x[k] = z;
        x[n - k] = z.conj();
    }
    FftPlanner::<f64>::new().plan_fft_inverse(n).process(&mut x);
    let rms = (x.iter().map(|z| z.re * z.re).sum::<f64>() / n as f64).sqrt();
    x.iter().map(|z| z.re / rms).collect()
}

/// The preamble as it appears after transmit shaping and the receive
/// matched filter; its first chip sits at [`super::dsp::filter_delay`].
pub fn preamble(cfg: &OfdmConfig) -> Vec<f64> {
    matched_filter(&shape(&preamble_chips(cfg), cfg), cfg)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyncResult {
    /// Lag of the correlation peak.
    pub index: usize,
    /// Peak-to-sidelobe ratio of the squared correlation [dB].
    pub psr_db: f64,
}

/// Locates `template` in `stream` by cross-correlation.
///
/// The sidelobe is the largest |correlation| further than `guard` samples
/// from the peak; a peak-to-sidelobe power ratio under 3 dB is a failure.
pub fn synchronize(stream: &[f64], template: &[f64], guard: usize) -> Result<SyncResult, ModemError> {
    if stream.len() < template.len() || template.is_empty() {
        return Err(ModemError::ShortStream { got: stream.len(), need: template.len().max(1) });
    }
    let c = cross_correlate(stream, template);
    let (index, peak) = c
        .iter()
        .enumerate()
        .map(|(i, v)| (i, v.abs()))
        .fold((0, -1.0), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    let side = c
        .iter()
        .enumerate()
        .filter(|(i, _)| i.abs_diff(index) > guard)
        .map(|(_, v)| v.abs())
        .fold(0.0, f64::max);
    let psr_db = if side > 0.0 { 20.0 * (peak / side).log10() } else { f64::INFINITY };
    if !(psr_db >= PSR_THRESHOLD_DB) {
        return Err(ModemError::SyncFailure { psr_db, threshold_db: PSR_THRESHOLD_DB });
    }
    Ok(SyncResult { index, psr_db })
}
