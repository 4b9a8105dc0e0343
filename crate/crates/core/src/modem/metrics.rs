use super::{BitLoadingPlan, ModemError, OfdmConfig};

/// Fraction of differing bits.
pub fn measure_ber(tx: &[u8], rx: &[u8]) -> Result<f64, ModemError> {
    if tx.len() != rx.len() {
        return Err(ModemError::LengthMismatch { left: tx.len(), right: rx.len() });
    }
    if tx.is_empty() {
        return Ok(0.0);
    }
    let errors = tx.iter().zip(rx).filter(|(a, b)| a != b).count();
    Ok(errors as f64 / tx.len() as f64)
}

/// `Σ b_k · f_s / ((N + CP) · OSF)` [bit/s].
pub fn data_rate(plan: &BitLoadingPlan, cfg: &OfdmConfig) -> f64 {
    plan.total_bits() as f64 * cfg.sample_rate / (cfg.symbol_length() * cfg.oversampling_factor) as f64
}
