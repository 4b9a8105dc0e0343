use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::receiver::response_from;
use super::{ChannelResponse, DcState, LinkError, ReceiverChain, TransmitterModel};
use crate::device::OperatingPoint;
use crate::modem::{
    bit_power_loading, build_burst, data_rate, demap_plan, equalize, estimate_channel, estimate_snr, generate_bits,
    map_plan, measure_ber, ofdm_modulate, pilot_symbols, qam_modulate, receive_burst, BitLoadingPlan, OfdmConfig,
    SubcarrierSnr, MIN_SNR_SYMBOLS, PILOT_REPEATS,
};

/// Burst sizes and pass line for one link run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LinkOptions {
    pub ber_target: f64,
    /// QPSK frames used for SNR estimation.
    pub training_frames: usize,
    /// Loaded frames used for the BER measurement.
    pub payload_frames: usize,
    pub clipping: bool,
    /// Half-width, in carriers, of the window over which the estimated
    /// noise-to-signal ratio is averaged before loading. Zero disables it.
    pub snr_smoothing: usize,
}

impl Default for LinkOptions {
    fn default() -> Self {
        Self { ber_target: 4.7e-3, training_frames: MIN_SNR_SYMBOLS, payload_frames: 24, clipping: true, snr_smoothing: 4 }
    }
}

/// Harmonic-mean smoothing across neighbouring carriers. Loading on raw
/// per-carrier estimates favours carriers whose SNR happened to be
/// overestimated, which pushes the realised BER above target.
fn smooth_snr(snr: &mut SubcarrierSnr, half_width: usize) {
    if half_width == 0 {
        return;
    }
    let valid = |k: usize| !snr.omitted[k] && snr.snr_linear[k] > 0.0;
    let n = snr.snr_linear.len();
    let smoothed: Vec<f64> = (0..n)
        .map(|k| {
            if !valid(k) {
                return snr.snr_linear[k];
            }
            let window = k.saturating_sub(half_width)..(k + half_width + 1).min(n);
            let (sum, count) =
                window.filter(|&j| valid(j)).fold((0.0, 0usize), |(s, c), j| (s + 1.0 / snr.snr_linear[j], c + 1));
            count as f64 / sum
        })
        .collect();
    snr.snr_linear = smoothed;
}

/// Everything measured in one run.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkReport {
    pub label: String,
    pub seed: u64,
    pub load_resistance: f64,
    pub f3db: f64,
    /// Highest carrier frequency before the estimated SNR first drops below
    /// 0 dB; `None` when it never does inside the modem band.
    pub snr_bandwidth: Option<f64>,
    pub channel_gain: f64,
    pub snr: SubcarrierSnr,
    pub plan: BitLoadingPlan,
    pub data_rate: f64,
    pub ber: f64,
    pub payload_bits: usize,
    pub pmp: f64,
    /// Pmp over the transmitter's mean optical output.
    pub pce_emitted: f64,
    /// Pmp over the optical power landing on the active area.
    pub pce_incident: f64,
    pub imp_isc: Option<f64>,
    /// DC harvest at the load-line operating point.
    pub harvest: OperatingPoint,
    pub incident_power: f64,
    pub tx_clip_fraction: f64,
    pub sync_psr_db: f64,
}

/// One labelled link configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkScenario {
    pub label: String,
    pub tx: TransmitterModel,
    pub rx: ReceiverChain,
    pub modem: OfdmConfig,
    pub options: LinkOptions,
    pub seed: u64,
}

struct Channel<'a> {
    tx: &'a TransmitterModel,
    response: ChannelResponse,
    cfg: &'a OfdmConfig,
    /// Received optical power per watt emitted.
    path: f64,
    noise_sigma: f64,
}

impl Channel<'_> {
    /// Laser, optical path, receiver low-pass and additive noise.
    fn propagate(&self, samples: &[f64], rng: &mut ChaCha8Rng) -> (Vec<f64>, f64) {
        let emission = self.tx.modulate(samples, self.cfg.clip_threshold);
        let p0 = self.tx.emitted_power();
        let n = samples.len();
        let len = (n + 1024).next_power_of_two();
        let mut x: Vec<Complex64> = emission.power.iter().map(|&p| Complex64::new((p - p0) * self.path, 0.0)).collect();
        x.resize(len, Complex64::new(0.0, 0.0));
        let mut planner = FftPlanner::<f64>::new();
        planner.plan_fft_forward(len).process(&mut x);
        let fs = self.cfg.sample_rate;
        for (k, v) in x.iter_mut().enumerate() {
            let f = if k <= len / 2 { k as f64 } else { k as f64 - len as f64 } * fs / len as f64;
            *v *= self.response.at(f);
        }
        planner.plan_fft_inverse(len).process(&mut x);
        let normal = Normal::new(0.0, self.noise_sigma).expect("finite sigma");
        let y = x[..n].iter().map(|v| v.re / len as f64 + normal.sample(rng)).collect();
        (y, emission.clip_fraction)
    }
}

fn first_drop_below_unity(snr: &SubcarrierSnr, cfg: &OfdmConfig) -> Option<f64> {
    let k = snr.snr_linear.iter().zip(&snr.omitted).position(|(&s, &o)| !o && s < 1.0)?;
    Some(if k == 0 { 0.0 } else { cfg.carrier_frequency(k - 1) })
}

pub fn run_link(
    tx: &TransmitterModel,
    rx: &ReceiverChain,
    modem: &OfdmConfig,
    ber_target: f64,
    seed: u64,
) -> Result<LinkReport, LinkError> {
    let options = LinkOptions { ber_target, ..LinkOptions::default() };
    run_link_with(tx, rx, modem, &options, seed)
}

/// Probe burst for SNR estimation, loading, then a payload burst for BER.
pub fn run_link_with(
    tx: &TransmitterModel,
    rx: &ReceiverChain,
    modem: &OfdmConfig,
    options: &LinkOptions,
    seed: u64,
) -> Result<LinkReport, LinkError> {
    tx.validate()?;
    rx.validate()?;
    modem.validate()?;
    if rx.bandwidth() > modem.sample_rate / 2.0 {
        log::warn!("receiver bandwidth {:.3e} Hz exceeds the Nyquist rate of the modem", rx.bandwidth());
    }
    let dc: DcState = rx.dc_state()?;
    let response = response_from(rx, &dc);
    let noise = rx.noise.psd(rx.load_resistance, dc.operating_point.current);
    let noise_sigma = rx.amplifier_gain() * (noise.total * modem.sample_rate / 2.0).sqrt();
    let p0 = tx.emitted_power();
    let channel = Channel { tx, response, cfg: modem, path: rx.incident_beam().total_optical_power / p0, noise_sigma };

    let mut seeds = ChaCha8Rng::seed_from_u64(seed);
    let (training_seed, payload_seed) = (seeds.next_u64(), seeds.next_u64());
    let mut noise_rng = ChaCha8Rng::seed_from_u64(seeds.next_u64());
    let n = modem.data_subcarriers;
    let pilot = pilot_symbols(modem);
    let pilot_chips = ofdm_modulate(&pilot, modem)?;

    let training_bits = generate_bits(training_seed, options.training_frames * 2 * n);
    let training: Vec<Vec<Complex64>> =
        training_bits.chunks(2 * n).map(|b| qam_modulate(b, 4)).collect::<Result<_, _>>()?;
    let mut chips = vec![pilot_chips.clone(); PILOT_REPEATS];
    for t in &training {
        chips.push(ofdm_modulate(t, modem)?);
    }
    let burst = build_burst(&chips, modem, options.clipping)?;
    let (y, mut tx_clip) = channel.propagate(&burst.samples, &mut noise_rng);
    let probe = receive_burst(&y, modem, chips.len())?;
    let est = estimate_channel(&probe.frames[..PILOT_REPEATS], &pilot)?;
    let equalized: Vec<Vec<Complex64>> = probe.frames[PILOT_REPEATS..].iter().map(|f| equalize(f, &est)).collect();
    let mut snr = estimate_snr(&equalized, &training, modem.snr_ceiling())?;
    for (s, &u) in snr.snr_linear.iter_mut().zip(&est.usable) {
        if !u {
            *s = 0.0;
        }
    }
    let mut loading_snr = snr.clone();
    smooth_snr(&mut loading_snr, options.snr_smoothing);
    let plan = bit_power_loading(&loading_snr, options.ber_target, modem)?;

    let per_frame = plan.total_bits() as usize;
    let payload_bits = generate_bits(payload_seed, per_frame * options.payload_frames);
    let (ber, sync_psr_db) = if per_frame == 0 {
        (0.0, probe.sync.psr_db)
    } else {
        let mut chips = vec![pilot_chips; PILOT_REPEATS];
        for f in payload_bits.chunks(per_frame) {
            chips.push(ofdm_modulate(&map_plan(f, &plan)?, modem)?);
        }
        let burst = build_burst(&chips, modem, options.clipping)?;
        let (y, clip) = channel.propagate(&burst.samples, &mut noise_rng);
        tx_clip = tx_clip.max(clip);
        let data = receive_burst(&y, modem, chips.len())?;
        let est = estimate_channel(&data.frames[..PILOT_REPEATS], &pilot)?;
        let mut rx_bits = Vec::with_capacity(payload_bits.len());
        for f in &data.frames[PILOT_REPEATS..] {
            rx_bits.extend(demap_plan(&equalize(f, &est), &plan)?);
        }
        (measure_ber(&payload_bits, &rx_bits)?, data.sync.psr_db)
    };

    let pmp = dc.mpp.point.power;
    Ok(LinkReport {
        label: rx.device.name.clone(),
        seed,
        load_resistance: rx.load_resistance,
        f3db: response.f3db,
        snr_bandwidth: first_drop_below_unity(&snr, modem),
        channel_gain: response.gain,
        data_rate: data_rate(&plan, modem),
        plan,
        snr,
        ber,
        payload_bits: payload_bits.len(),
        pmp,
        pce_emitted: pmp / p0,
        pce_incident: if dc.captured_power > 0.0 { pmp / dc.captured_power } else { 0.0 },
        imp_isc: dc.imp_isc(),
        harvest: dc.operating_point,
        incident_power: dc.captured_power,
        tx_clip_fraction: tx_clip,
        sync_psr_db,
    })
}

/// Runs every scenario, in parallel; results keep the input order.
pub fn sweep(scenarios: &[LinkScenario]) -> Vec<Result<LinkReport, LinkError>> {
    scenarios
        .par_iter()
        .map(|s| {
            run_link_with(&s.tx, &s.rx, &s.modem, &s.options, s.seed).map(|mut r| {
                r.label = s.label.clone();
                r
            })
        })
        .collect()
}
