use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::qam::Constellation;
use super::{ModemError, OfdmConfig, SubcarrierSnr};

/// SNR gap `Γ = −ln(5·BER)/1.5` of the QAM bound `BER ≤ 0.2·exp(−1.5·SNR/(M−1))`.
pub fn snr_gap(ber_target: f64) -> f64 {
    -(5.0 * ber_target).ln() / 1.5
}

/// Per-carrier SNR needed for `b` bits, `b = 0..=max_bits`.
///
/// Starts from the gap rule `(2^b − 1)·Γ`; entries where the exact Gray BER
/// would miss the target are raised to the exact requirement, then the
/// table is made convex so that incremental costs never decrease.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerTable {
    pub required_snr: Vec<f64>,
}

impl PowerTable {
    pub fn new(ber_target: f64, max_bits: u32) -> Result<Self, ModemError> {
        if !(ber_target > 0.0 && ber_target < 0.5) {
            return Err(ModemError::BerTarget(ber_target));
        }
        let gap = snr_gap(ber_target);
        let mut req = vec![0.0];
        for b in 1..=max_bits {
            let c = Constellation::from_bits(b)?;
            let mut s = ((1u64 << b) - 1) as f64 * gap;
            if c.ber(s) > ber_target {
                s = c.snr_for_ber(ber_target);
            }
            req.push(s);
        }
        for b in 2..req.len() {
            let floor = 2.0 * req[b - 1] - req[b - 2];
            if req[b] < floor {
                req[b] = floor;
            }
        }
        Ok(Self { required_snr: req })
    }

    pub fn max_bits(&self) -> u32 {
        (self.required_snr.len() - 1) as u32
    }

    /// Extra SNR needed to go from `b` to `b + 1` bits.
    pub fn increment(&self, b: u32) -> f64 {
        self.required_snr[b as usize + 1] - self.required_snr[b as usize]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BitLoadingPlan {
    pub bits_per_subcarrier: Vec<u32>,
    /// Power relative to the uniform allocation; mean over active carriers is 1.
    pub power_scale_per_subcarrier: Vec<f64>,
}

impl BitLoadingPlan {
    pub fn zeros(n: usize) -> Self {
        Self { bits_per_subcarrier: vec![0; n], power_scale_per_subcarrier: vec![0.0; n] }
    }

    pub fn total_bits(&self) -> u64 {
        self.bits_per_subcarrier.iter().map(|&b| b as u64).sum()
    }

    pub fn active_carriers(&self) -> usize {
        self.bits_per_subcarrier.iter().filter(|&&b| b > 0).count()
    }

    pub fn len(&self) -> usize {
        self.bits_per_subcarrier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits_per_subcarrier.is_empty()
    }

    /// Amplitude applied to carrier `k` when the whole symbol keeps the
    /// power of a uniformly loaded one.
    pub fn amplitude(&self, k: usize) -> f64 {
        let active = self.active_carriers();
        if active == 0 {
            return 0.0;
        }
        (self.power_scale_per_subcarrier[k] * self.len() as f64 / active as f64).sqrt()
    }
}

#[derive(PartialEq)]
struct Candidate {
    cost: f64,
    carrier: usize,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on cost; lower index first on ties
        other.cost.total_cmp(&self.cost).then_with(|| other.carrier.cmp(&self.carrier))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Greedy incremental allocation against a fixed table.
///
/// Power budget equals the carrier count (unit power per carrier before
/// loading). Each step buys the cheapest next bit; allocation stops at the
/// first increment that does not fit, which with a convex table yields the
/// maximum bit total.
pub fn load_with_table(snr: &[f64], table: &PowerTable) -> BitLoadingPlan {
    let n = snr.len();
    let mut bits = vec![0u32; n];
    let mut power = vec![0.0; n];
    let mut heap = BinaryHeap::new();
    for (k, &s) in snr.iter().enumerate() {
        if s > 0.0 && s.is_finite() && table.max_bits() > 0 {
            heap.push(Candidate { cost: table.increment(0) / s, carrier: k });
        }
    }
    let mut budget = n as f64;
    while let Some(Candidate { cost, carrier }) = heap.pop() {
        if cost > budget {
            break;
        }
        budget -= cost;
        bits[carrier] += 1;
        power[carrier] = table.required_snr[bits[carrier] as usize] / snr[carrier];
        if bits[carrier] < table.max_bits() {
            heap.push(Candidate { cost: table.increment(bits[carrier]) / snr[carrier], carrier });
        }
    }
    let used: f64 = power.iter().sum();
    let active = bits.iter().filter(|&&b| b > 0).count();
    if active > 0 {
        let scale = active as f64 / used;
        for p in &mut power {
            *p *= scale;
        }
    }
    BitLoadingPlan { bits_per_subcarrier: bits, power_scale_per_subcarrier: power }
}

/// Bit and power allocation for a measured SNR profile.
pub fn bit_power_loading(snr: &SubcarrierSnr, ber_target: f64, config: &OfdmConfig) -> Result<BitLoadingPlan, ModemError> {
    let table = PowerTable::new(ber_target, config.max_bits())?;
    let usable: Vec<f64> = snr
        .snr_linear
        .iter()
        .zip(&snr.omitted)
        .map(|(&s, &o)| if o { 0.0 } else { s })
        .collect();
    Ok(load_with_table(&usable, &table))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn snr(v: Vec<f64>) -> SubcarrierSnr {
        let n = v.len();
        SubcarrierSnr { snr_linear: v, omitted: vec![false; n] }
    }

    #[test]
    fn gap_value() {
        assert!((snr_gap(4.7e-3) - 2.500_5).abs() < 1e-4);
    }

    #[test]
    fn table_is_convex_and_safe() {
        let t = PowerTable::new(4.7e-3, 10).unwrap();
        for b in 1..10 {
            assert!(t.increment(b) >= t.increment(b - 1));
        }
        for b in 1..=10 {
            let c = Constellation::from_bits(b).unwrap();
            assert!(c.ber(t.required_snr[b as usize]) <= 4.7e-3 * (1.0 + 1e-9));
        }
    }

    #[test]
    fn zero_snr_loads_nothing() {
        let p = bit_power_loading(&snr(vec![0.0; 16]), 1e-3, &OfdmConfig::default()).unwrap();
        assert_eq!(p.total_bits(), 0);
        assert!(p.power_scale_per_subcarrier.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn flat_snr_closed_form() {
        let gap = snr_gap(1e-3);
        let s = gap * 15.0 * (1.0 + 1e-9);
        let p = bit_power_loading(&snr(vec![s; 64]), 1e-3, &OfdmConfig::default()).unwrap();
        let expect = (1.0 + s / gap).log2().floor() as u32;
        assert!(p.bits_per_subcarrier.iter().all(|&b| b == expect));
    }

    #[test]
    fn power_mean_is_one() {
        let v: Vec<f64> = (0..100).map(|k| 10f64.powf((k as f64 - 20.0) / 10.0)).collect();
        let p = bit_power_loading(&snr(v), 4.7e-3, &OfdmConfig::default()).unwrap();
        let active: Vec<f64> = p
            .bits_per_subcarrier
            .iter()
            .zip(&p.power_scale_per_subcarrier)
            .filter(|(&b, _)| b > 0)
            .map(|(_, &q)| q)
            .collect();
        let mean = active.iter().sum::<f64>() / active.len() as f64;
        assert!((mean - 1.0).abs() < 1e-12);
        assert!(p.bits_per_subcarrier.iter().all(|&b| b <= 10));
    }

    #[test]
    fn seventeen_db_reaches_four_bits() {
        let s = 10f64.powf(1.7);
        let p = bit_power_loading(&snr(vec![s; 511]), 4.7e-3, &OfdmConfig::default()).unwrap();
        assert!(p.bits_per_subcarrier.iter().all(|&b| b >= 4));
    }
}
