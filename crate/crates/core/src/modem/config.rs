use serde::{Deserialize, Serialize};

use super::ModemError;

/// Modem constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OfdmConfig {
    pub fft_size: usize,
    pub data_subcarriers: usize,
    pub cp_length: usize,
    /// Clipping level in multiples of the stream standard deviation.
    pub clip_threshold: f64,
    pub max_qam_order: u32,
    pub oversampling_factor: usize,
    pub pulse_shaping_rolloff: f64,
    /// Half-length of the root-raised-cosine filter, in symbols.
    pub rrc_span: usize,
    /// DAC/ADC sample rate after oversampling [Sa/s].
    pub sample_rate: f64,
    /// Reported SNR for error-free carriers [dB].
    pub snr_ceiling_db: f64,
}

impl Default for OfdmConfig {
    fn default() -> Self {
        Self {
            fft_size: 1024,
            data_subcarriers: 511,
            cp_length: 5,
            clip_threshold: 3.2,
            max_qam_order: 1024,
            oversampling_factor: 4,
            pulse_shaping_rolloff: 0.1,
            rrc_span: 64,
            sample_rate: 16e9,
            snr_ceiling_db: 60.0,
        }
    }
}

impl OfdmConfig {
    pub fn validate(&self) -> Result<(), ModemError> {
        let bad = |m: &str| Err(ModemError::Config(m.to_string()));
        if self.fft_size < 8 || !self.fft_size.is_power_of_two() {
            return bad("fft_size must be a power of two >= 8");
        }
        if self.data_subcarriers != self.fft_size / 2 - 1 {
            return bad("data_subcarriers must equal fft_size/2 - 1 under Hermitian symmetry");
        }
        if self.cp_length >= self.fft_size {
            return bad("cp_length must be < fft_size");
        }
        if !(self.clip_threshold > 0.0) {
            return bad("clip_threshold must be > 0");
        }
        if !self.max_qam_order.is_power_of_two() || !(2..=1024).contains(&self.max_qam_order) {
            return bad("max_qam_order must be a power of two in 2..=1024");
        }
        if self.oversampling_factor == 0 {
            return bad("oversampling_factor must be >= 1");
        }
        if !(0.0..=1.0).contains(&self.pulse_shaping_rolloff) || self.pulse_shaping_rolloff == 0.0 {
            return bad("pulse_shaping_rolloff must lie in (0, 1]");
        }
        if self.rrc_span == 0 {
            return bad("rrc_span must be >= 1");
        }
        if !(self.sample_rate > 0.0 && self.sample_rate.is_finite()) {
            return bad("sample_rate must be > 0");
        }
        Ok(())
    }

    pub fn max_bits(&self) -> u32 {
        self.max_qam_order.trailing_zeros()
    }

    /// Samples per OFDM symbol before oversampling.
    pub fn symbol_length(&self) -> usize {
        self.fft_size + self.cp_length
    }

    /// Rate of un-oversampled samples [Sa/s].
    pub fn chip_rate(&self) -> f64 {
        self.sample_rate / self.oversampling_factor as f64
    }

    /// Baseband frequency of data carrier `index` (0-based) [Hz].
    pub fn carrier_frequency(&self, index: usize) -> f64 {
        (index + 1) as f64 * self.chip_rate() / self.fft_size as f64
    }

    /// A quarter symbol, but never shorter than 64 chips so small test
    /// configurations still synchronise.
    pub fn preamble_length(&self) -> usize {
        (self.fft_size / 4).max(64)
    }

    pub fn snr_ceiling(&self) -> f64 {
        10f64.powf(self.snr_ceiling_db / 10.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = OfdmConfig::default();
        c.validate().unwrap();
        assert_eq!(c.max_bits(), 10);
        assert_eq!(c.preamble_length(), 256);
        assert!((c.carrier_frequency(510) - 511.0 * 4e9 / 1024.0).abs() < 1e-3);
    }

    #[test]
    fn rejects_inconsistent_carriers() {
        let c = OfdmConfig { data_subcarriers: 500, ..OfdmConfig::default() };
        assert!(c.validate().is_err());
        let c = OfdmConfig { max_qam_order: 2048, ..OfdmConfig::default() };
        assert!(c.validate().is_err());
        let c = OfdmConfig { cp_length: 1024, ..OfdmConfig::default() };
        assert!(c.validate().is_err());
    }
}
