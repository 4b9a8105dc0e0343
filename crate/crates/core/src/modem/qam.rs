//! Gray-mapped rectangular QAM with unit average energy.
//!
//! `b` bits per symbol use `2^ceil(b/2)` in-phase and `2^floor(b/2)`
//! quadrature levels; `b = 1` is BPSK on the real axis (0 → −1, 1 → +1).

use num_complex::Complex64;

use super::ModemError;
use crate::numeric::q_function;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constellation {
    pub bits: u32,
    bits_i: u32,
    bits_q: u32,
    /// Half the spacing between adjacent levels.
    pub d: f64,
}

impl Constellation {
    pub fn from_bits(bits: u32) -> Result<Self, ModemError> {
        if !(1..=10).contains(&bits) {
            return Err(ModemError::InvalidOrder(1u32.checked_shl(bits).unwrap_or(0)));
        }
        let bits_i = bits.div_ceil(2);
        let bits_q = bits / 2;
        let li = (1u64 << bits_i) as f64;
        let lq = (1u64 << bits_q) as f64;
        let d = (3.0 / ((li * li - 1.0) + (lq * lq - 1.0))).sqrt();
        Ok(Self { bits, bits_i, bits_q, d })
    }

    pub fn from_order(order: u32) -> Result<Self, ModemError> {
        if !order.is_power_of_two() || !(2..=1024).contains(&order) {
            return Err(ModemError::InvalidOrder(order));
        }
        Self::from_bits(order.trailing_zeros())
    }

    pub fn order(&self) -> u32 {
        1 << self.bits
    }

    fn levels(b: u32) -> usize {
        1 << b
    }

    fn axis_amplitude(&self, b: u32, word: usize) -> f64 {
        if b == 0 {
            return 0.0;
        }
        let idx = gray_decode(word);
        (2.0 * idx as f64 - (Self::levels(b) as f64 - 1.0)) * self.d
    }

    fn axis_word(&self, b: u32, x: f64) -> usize {
        if b == 0 {
            return 0;
        }
        let l = Self::levels(b) as f64;
        let idx = ((x / self.d + l - 1.0) / 2.0).round().clamp(0.0, l - 1.0) as usize;
        idx ^ (idx >> 1)
    }

    /// Symbol for `self.bits` bits, most significant first, in-phase bits leading.
    pub fn map(&self, bits: &[u8]) -> Complex64 {
        let word = bits.iter().fold(0usize, |acc, &b| (acc << 1) | (b & 1) as usize);
        let wi = word >> self.bits_q;
        let wq = word & ((1 << self.bits_q) - 1);
        Complex64::new(self.axis_amplitude(self.bits_i, wi), self.axis_amplitude(self.bits_q, wq))
    }

    /// Hard-decision demapping; appends `self.bits` bits to `out`.
    pub fn demap(&self, s: Complex64, out: &mut Vec<u8>) {
        let word = (self.axis_word(self.bits_i, s.re) << self.bits_q) | self.axis_word(self.bits_q, s.im);
        for k in (0..self.bits).rev() {
            out.push(((word >> k) & 1) as u8);
        }
    }

    pub fn points(&self) -> Vec<Complex64> {
        let mut bits = vec![0u8; self.bits as usize];
        (0..self.order() as usize)
            .map(|w| {
                for (k, b) in bits.iter_mut().enumerate() {
                    *b = ((w >> (self.bits as usize - 1 - k)) & 1) as u8;
                }
                self.map(&bits)
            })
            .collect()
    }

    /// Exact Gray-mapped bit error probability over complex AWGN at
    /// `snr = Es/N0` (linear).
    pub fn ber(&self, snr: f64) -> f64 {
        if snr <= 0.0 {
            return 0.5;
        }
        let sigma = (0.5 / snr).sqrt();
        let errs = axis_bit_errors(self.bits_i, self.d, sigma) + axis_bit_errors(self.bits_q, self.d, sigma);
        errs / self.bits as f64
    }

    /// SNR at which [`Self::ber`] equals `target`.
    pub fn snr_for_ber(&self, target: f64) -> f64 {
        let (mut lo, mut hi) = (-30.0_f64, 90.0_f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.ber(10f64.powf(mid / 10.0)) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        10f64.powf(hi / 10.0)
    }
}

/// Sum over bit positions of the per-bit error probability of a
/// Gray-coded PAM axis with `2^b` levels at spacing `2d`.
fn axis_bit_errors(b: u32, d: f64, sigma: f64) -> f64 {
    if b == 0 {
        return 0.0;
    }
    let l = 1usize << b;
    let mut total = 0.0;
    for k in 1..=b {
        let half = 1usize << (k - 1);
        let upper = l - (l >> k);
        let mut pk = 0.0;
        for i in 0..upper {
            let t = i * half;
            let sign = if (t / l) % 2 == 0 { 1.0 } else { -1.0 };
            let weight = half as f64 - ((2 * t + l) / (2 * l)) as f64;
            pk += sign * weight * q_function((2 * i + 1) as f64 * d / sigma);
        }
        total += 2.0 * pk / l as f64;
    }
    total
}

fn gray_decode(mut g: usize) -> usize {
    let mut shift = 1;
    while shift < usize::BITS {
        g ^= g >> shift;
        shift <<= 1;
    }
    g
}

pub fn qam_modulate(bits: &[u8], order: u32) -> Result<Vec<Complex64>, ModemError> {
    let c = Constellation::from_order(order)?;
    let b = c.bits as usize;
    if bits.len() % b != 0 {
        return Err(ModemError::BitCount { count: bits.len(), bits_per_symbol: c.bits });
    }
    Ok(bits.chunks_exact(b).map(|w| c.map(w)).collect())
}

pub fn qam_demodulate(symbols: &[Complex64], order: u32) -> Result<Vec<u8>, ModemError> {
    let c = Constellation::from_order(order)?;
    let mut out = Vec::with_capacity(symbols.len() * c.bits as usize);
    for &s in symbols {
        c.demap(s, &mut out);
    }
    Ok(out)
}
