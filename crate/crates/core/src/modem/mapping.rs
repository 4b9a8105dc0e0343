use num_complex::Complex64;

use super::qam::Constellation;
use super::{generate_bits, qam_modulate, BitLoadingPlan, ModemError, OfdmConfig};

/// Repetitions of the known pilot frame per burst.
pub const PILOT_REPEATS: usize = 8;
const PILOT_SEED: u64 = 0x5e_ed0f_d1a7;

/// The known QPSK pilot frame, identical for every burst.
pub fn pilot_symbols(cfg: &OfdmConfig) -> Vec<Complex64> {
    qam_modulate(&generate_bits(PILOT_SEED, 2 * cfg.data_subcarriers), 4).expect("QPSK is always valid")
}

/// Places `bits` on the carriers of `plan`, scaled by the plan amplitudes.
/// Consumes exactly `plan.total_bits()` bits.
pub fn map_plan(bits: &[u8], plan: &BitLoadingPlan) -> Result<Vec<Complex64>, ModemError> {
    let need = plan.total_bits() as usize;
    if bits.len() != need {
        return Err(ModemError::LengthMismatch { left: bits.len(), right: need });
    }
    let mut at = 0;
    plan.bits_per_subcarrier
        .iter()
        .enumerate()
        .map(|(k, &b)| {
            if b == 0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            let c = Constellation::from_bits(b)?;
            let s = c.map(&bits[at..at + b as usize]) * plan.amplitude(k);
            at += b as usize;
            Ok(s)
        })
        .collect()
}

/// Inverse of [`map_plan`] on equalised symbols.
pub fn demap_plan(symbols: &[Complex64], plan: &BitLoadingPlan) -> Result<Vec<u8>, ModemError> {
    if symbols.len() != plan.len() {
        return Err(ModemError::LengthMismatch { left: symbols.len(), right: plan.len() });
    }
    let mut out = Vec::with_capacity(plan.total_bits() as usize);
    for (k, (&s, &b)) in symbols.iter().zip(&plan.bits_per_subcarrier).enumerate() {
        if b == 0 {
            continue;
        }
        Constellation::from_bits(b)?.demap(s / plan.amplitude(k), &mut out);
    }
    Ok(out)
}

/// Plan with `bits` on every carrier at unit power.
pub fn uniform_plan(n: usize, bits: u32) -> BitLoadingPlan {
    BitLoadingPlan {
        bits_per_subcarrier: vec![bits; n],
        power_scale_per_subcarrier: vec![if bits > 0 { 1.0 } else { 0.0 }; n],
    }
}
