use num_complex::Complex64;
use rustfft::FftPlanner;

use super::dsp::shape;
use super::{ModemError, OfdmConfig};

/// One OFDM symbol with its payload and time-domain chips (CP included).
#[derive(Debug, Clone, PartialEq)]
pub struct OfdmFrame {
    pub payload_bits: Vec<u8>,
    pub symbols: Vec<Complex64>,
    pub samples: Vec<f64>,
    pub pilot: bool,
    /// RMS of the discarded imaginary part relative to the real RMS.
    pub imag_residue: f64,
}

impl OfdmFrame {
    pub fn new(payload_bits: Vec<u8>, symbols: Vec<Complex64>, pilot: bool, cfg: &OfdmConfig) -> Result<Self, ModemError> {
        let (samples, imag_residue) = modulate_with_residue(&symbols, cfg)?;
        Ok(Self { payload_bits, symbols, samples, pilot, imag_residue })
    }
}

/// Full FFT-size spectrum with `X[N−k] = conj(X[k])`, DC and Nyquist zero.
pub fn hermitian_spectrum(symbols: &[Complex64], cfg: &OfdmConfig) -> Result<Vec<Complex64>, ModemError> {
    if symbols.len() != cfg.data_subcarriers {
        return Err(ModemError::SymbolCount { expected: cfg.data_subcarriers, got: symbols.len() });
    }
    let n = cfg.fft_size;
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for (k, &s) in symbols.iter().enumerate() {
        x[k + 1] = s;
        x[n - k - 1] = s.conj();
    }
    Ok(x)
}

fn modulate_with_residue(symbols: &[Complex64], cfg: &OfdmConfig) -> Result<(Vec<f64>, f64), ModemError> {
    let mut x = hermitian_spectrum(symbols, cfg)?;
    let n = cfg.fft_size;
    FftPlanner::<f64>::new().plan_fft_inverse(n).process(&mut x);
    let scale = 1.0 / (n as f64).sqrt();
    let re_rms = (x.iter().map(|z| z.re * z.re).sum::<f64>() / n as f64).sqrt() * scale;
    let im_rms = (x.iter().map(|z| z.im * z.im).sum::<f64>() / n as f64).sqrt() * scale;
    let residue = if re_rms > 0.0 { im_rms / re_rms } else { 0.0 };
    let body: Vec<f64> = x.iter().map(|z| z.re * scale).collect();
    let mut out = Vec::with_capacity(cfg.symbol_length());
    out.extend_from_slice(&body[n - cfg.cp_length..]);
    out.extend_from_slice(&body);
    Ok((out, residue))
}

/// Unitary inverse transform of the Hermitian spectrum with cyclic prefix.
pub fn ofdm_modulate(symbols: &[Complex64], cfg: &OfdmConfig) -> Result<Vec<f64>, ModemError> {
    modulate_with_residue(symbols, cfg).map(|(s, _)| s)
}

/// Drops the cyclic prefix and returns the data-carrier bins.
pub fn ofdm_demodulate(chips: &[f64], cfg: &OfdmConfig) -> Result<Vec<Complex64>, ModemError> {
    if chips.len() != cfg.symbol_length() {
        return Err(ModemError::LengthMismatch { left: chips.len(), right: cfg.symbol_length() });
    }
    let n = cfg.fft_size;
    let mut x: Vec<Complex64> = chips[cfg.cp_length..].iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::<f64>::new().plan_fft_forward(n).process(&mut x);
    let scale = 1.0 / (n as f64).sqrt();
    Ok(x[1..=cfg.data_subcarriers].iter().map(|z| z * scale).collect())
}

/// One frame through IFFT, cyclic prefix, oversampling and RRC shaping.
pub fn assemble_frame(symbols: &[Complex64], cfg: &OfdmConfig) -> Result<Vec<f64>, ModemError> {
    Ok(shape(&ofdm_modulate(symbols, cfg)?, cfg))
}
