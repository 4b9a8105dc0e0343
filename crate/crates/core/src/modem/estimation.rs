use num_complex::Complex64;

use super::ModemError;

/// Least-squares per-carrier gains averaged over pilot repetitions.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelEstimate {
    pub gains: Vec<Complex64>,
    /// `false` where the gain is zero (or unmeasurable); such carriers carry no bits.
    pub usable: Vec<bool>,
}

pub fn estimate_channel(received: &[Vec<Complex64>], pilot: &[Complex64]) -> Result<ChannelEstimate, ModemError> {
    if received.is_empty() {
        return Err(ModemError::NoPilots);
    }
    for r in received {
        if r.len() != pilot.len() {
            return Err(ModemError::LengthMismatch { left: r.len(), right: pilot.len() });
        }
    }
    let reps = received.len() as f64;
    let gains: Vec<Complex64> = (0..pilot.len())
        .map(|k| {
            if pilot[k].norm_sqr() == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            received.iter().map(|r| r[k] / pilot[k]).sum::<Complex64>() / reps
        })
        .collect();
    let peak = gains.iter().map(|g| g.norm()).fold(0.0, f64::max);
    let usable = gains.iter().map(|g| g.norm() > 1e-12 * peak && g.norm().is_finite()).collect();
    Ok(ChannelEstimate { gains, usable })
}

/// One-tap zero-forcing; unusable carriers map to zero.
pub fn equalize(symbols: &[Complex64], est: &ChannelEstimate) -> Vec<Complex64> {
    symbols
        .iter()
        .zip(est.gains.iter().zip(&est.usable))
        .map(|(&s, (&g, &u))| if u { s / g } else { Complex64::new(0.0, 0.0) })
        .collect()
}

/// Per-carrier SNR; carriers with no reference energy are `omitted`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubcarrierSnr {
    pub snr_linear: Vec<f64>,
    pub omitted: Vec<bool>,
}

impl SubcarrierSnr {
    pub fn flat(n: usize, snr_linear: f64) -> Self {
        Self { snr_linear: vec![snr_linear; n], omitted: vec![false; n] }
    }

    pub fn db(&self) -> Vec<f64> {
        self.snr_linear.iter().map(|s| 10.0 * s.log10()).collect()
    }
}

pub const MIN_SNR_SYMBOLS: usize = 100;

/// EVM-based SNR `E|ref|² / E|eq − ref|²`, capped at `ceiling`.
///
/// `equalized[f][k]` is carrier `k` of frame `f`.
pub fn estimate_snr(equalized: &[Vec<Complex64>], reference: &[Vec<Complex64>], ceiling: f64) -> Result<SubcarrierSnr, ModemError> {
    if equalized.len() != reference.len() {
        return Err(ModemError::LengthMismatch { left: equalized.len(), right: reference.len() });
    }
    if equalized.len() < MIN_SNR_SYMBOLS {
        return Err(ModemError::TooFewSymbols { got: equalized.len(), need: MIN_SNR_SYMBOLS });
    }
    let n = reference[0].len();
    let mut sig = vec![0.0; n];
    let mut err = vec![0.0; n];
    for (e, r) in equalized.iter().zip(reference) {
        if e.len() != n || r.len() != n {
            return Err(ModemError::LengthMismatch { left: e.len(), right: n });
        }
        for k in 0..n {
            sig[k] += r[k].norm_sqr();
            err[k] += (e[k] - r[k]).norm_sqr();
        }
    }
    let mut snr = vec![0.0; n];
    let mut omitted = vec![false; n];
    for k in 0..n {
        if sig[k] == 0.0 {
            omitted[k] = true;
        } else if err[k] == 0.0 {
            snr[k] = ceiling;
        } else {
            snr[k] = (sig[k] / err[k]).min(ceiling);
        }
    }
    Ok(SubcarrierSnr { snr_linear: snr, omitted })
}
