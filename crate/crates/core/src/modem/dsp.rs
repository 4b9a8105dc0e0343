//! Pulse shaping, FFT convolution and clipping.

use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

use super::OfdmConfig;

/// Root-raised-cosine taps spanning `±span` symbols at `osf` samples per
/// symbol, normalised to unit energy.
pub fn rrc_taps(rolloff: f64, osf: usize, span: usize) -> Vec<f64> {
    let b = rolloff;
    let half = (span * osf) as isize;
    let mut h: Vec<f64> = (-half..=half)
        .map(|n| {
            let t = n as f64 / osf as f64;
            if n == 0 {
                1.0 - b + 4.0 * b / PI
            } else if ((4.0 * b * t).abs() - 1.0).abs() < 1e-12 {
                b / 2f64.sqrt() * ((1.0 + 2.0 / PI) * (PI / (4.0 * b)).sin() + (1.0 - 2.0 / PI) * (PI / (4.0 * b)).cos())
            } else {
                let num = (PI * t * (1.0 - b)).sin() + 4.0 * b * t * (PI * t * (1.0 + b)).cos();
                let den = PI * t * (1.0 - (4.0 * b * t).powi(2));
                num / den
            }
        })
        .collect();
    let e = h.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in &mut h {
        *x /= e;
    }
    h
}

/// Linear (full) convolution of two real sequences via FFT.
pub fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let out_len = a.len() + b.len() - 1;
    if a.len().min(b.len()) <= 32 {
        let mut out = vec![0.0; out_len];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        return out;
    }
    let n = out_len.next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut fa: Vec<Complex64> = a.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fa.resize(n, Complex64::new(0.0, 0.0));
    let mut fb: Vec<Complex64> = b.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fb.resize(n, Complex64::new(0.0, 0.0));
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    inv.process(&mut fa);
    fa.truncate(out_len);
    fa.iter().map(|z| z.re / n as f64).collect()
}

/// `c[τ] = Σ_j t[j]·y[τ + j]` for every full overlap `τ`.
pub fn cross_correlate(y: &[f64], template: &[f64]) -> Vec<f64> {
    if template.len() > y.len() || template.is_empty() {
        return Vec::new();
    }
    let rev: Vec<f64> = template.iter().rev().copied().collect();
    let full = convolve(y, &rev);
    full[template.len() - 1..y.len()].to_vec()
}

/// Zero-stuffing by `osf`.
pub fn upsample(x: &[f64], osf: usize) -> Vec<f64> {
    let mut out = vec![0.0; x.len() * osf];
    for (k, &v) in x.iter().enumerate() {
        out[k * osf] = v;
    }
    out
}

/// Transmit shaping: upsample and filter with the RRC pulse.
///
/// The output is `osf·len + taps − 1` long; chip `k` peaks at sample
/// `k·osf + (taps − 1)/2`.
pub fn shape(chips: &[f64], cfg: &OfdmConfig) -> Vec<f64> {
    let taps = rrc_taps(cfg.pulse_shaping_rolloff, cfg.oversampling_factor, cfg.rrc_span);
    convolve(&upsample(chips, cfg.oversampling_factor), &taps)
}

/// Receive matched filter (same RRC pulse); adds another `(taps − 1)/2` delay.
pub fn matched_filter(samples: &[f64], cfg: &OfdmConfig) -> Vec<f64> {
    let taps = rrc_taps(cfg.pulse_shaping_rolloff, cfg.oversampling_factor, cfg.rrc_span);
    convolve(samples, &taps)
}

/// Total group delay of shaping plus matched filtering, in samples.
pub fn filter_delay(cfg: &OfdmConfig) -> usize {
    2 * cfg.rrc_span * cfg.oversampling_factor
}

#[derive(Debug, Clone, PartialEq)]
pub struct Clipped {
    pub samples: Vec<f64>,
    /// Fraction of samples that hit a rail.
    pub fraction: f64,
    /// Standard deviation the rails were derived from.
    pub sigma: f64,
}

/// Symmetric clipping at `±threshold·σ_x`; a zero-variance stream passes
/// through unchanged.
pub fn clip(samples: &[f64], threshold: f64) -> Clipped {
    let n = samples.len();
    if n == 0 {
        return Clipped { samples: Vec::new(), fraction: 0.0, sigma: 0.0 };
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let sigma = (samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64).sqrt();
    if sigma == 0.0 {
        return Clipped { samples: samples.to_vec(), fraction: 0.0, sigma };
    }
    let rail = threshold * sigma;
    let mut hits = 0usize;
    let out = samples
        .iter()
        .map(|&x| {
            if x.abs() > rail {
                hits += 1;
                rail.copysign(x)
            } else {
                x
            }
        })
        .collect();
    Clipped { samples: out, fraction: hits as f64 / n as f64, sigma }
}
