//! Monte Carlo link simulation.
//!
//! Every trial draws from its own ChaCha stream keyed by
//! (seed, stream, trial), and sums are formed over fixed-size chunks that are
//! combined in index order. Results are therefore identical for any number
//! of worker threads.

use crate::backoff::{
    beta_star, beta_star_delay_poly, beta_star_interference_quadratic, LinkModel,
};
use crate::channel::{
    correlation_coefficient, effective_power, evolve_gauss_markov, inner, kmh_to_mps,
    sample_channel,
};
use crate::codebook::{generate_rvq, gersho_delta, quantize_with_gain, Codebook};
use crate::error::{domain, Result};
use crate::geometry::{estimate_rho_bar, pathloss_ratio, sample_interference};
use crate::params::SystemParams;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;

pub const THREADS_ENV: &str = "FEMTONET_THREADS";
/// Trials per aggregation chunk.
pub const CHUNK: u64 = 2048;
/// Draws used to freeze the transmitter's average SIR.
pub const RHO_BAR_TRIALS: usize = 1_000_000;

/// Independent random stream for one trial.
pub fn trial_rng(seed: u64, stream: u64, trial: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&stream.to_le_bytes());
    key[16..24].copy_from_slice(&trial.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Rayon pool honoring `FEMTONET_THREADS` unless a count is given.
pub fn worker_pool(threads: Option<usize>) -> rayon::ThreadPool {
    let n = threads
        .or_else(|| std::env::var(THREADS_ENV).ok().and_then(|v| v.parse().ok()))
        .filter(|&n| n > 0)
        .unwrap_or(0);
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .expect("thread pool")
}

/// Order-independent reduction of `f(trial)` over `0..trials`.
pub fn chunked_sum<const N: usize, F>(trials: u64, f: F) -> [f64; N]
where
    F: Fn(u64) -> [f64; N] + Sync,
{
    let chunks = trials.div_ceil(CHUNK);
    let partial: Vec<[f64; N]> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = [0.0; N];
            for t in c * CHUNK..((c + 1) * CHUNK).min(trials) {
                let v = f(t);
                for i in 0..N {
                    acc[i] += v[i];
                }
            }
            acc
        })
        .collect();
    let mut total = [0.0; N];
    for p in partial {
        for i in 0..N {
            total[i] += p[i];
        }
    }
    total
}

/// Per-trial values in trial order.
pub fn collect_trials<T: Send, F: Fn(u64) -> T + Sync + Send>(trials: u64, f: F) -> Vec<T> {
    (0..trials).into_par_iter().map(f).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub sir_tx: f64,
    pub sir_rx: f64,
    pub rate_tx: f64,
    pub rate_supported: f64,
    pub goodput: f64,
    pub outage: bool,
}

impl TrialResult {
    fn new(sir_tx: f64, sir_rx: f64) -> Self {
        let rate_tx = sir_tx.ln_1p() / LN_2;
        let rate_supported = sir_rx.ln_1p() / LN_2;
        let goodput = if rate_tx <= rate_supported {
            rate_tx
        } else {
            0.0
        };
        Self {
            sir_tx,
            sir_rx,
            rate_tx,
            rate_supported,
            goodput,
            outage: goodput == 0.0 && rate_tx > 0.0,
        }
    }
}

/// How the beamformer at n - d is chosen.
#[derive(Debug, Clone, Copy)]
pub enum Feedback<'a> {
    /// Deployed codebook shared by all trials.
    Fixed(&'a Codebook),
    /// New random codebook in every trial (ensemble behaviour).
    FreshRvq,
    /// The unquantized channel direction.
    Perfect,
}

/// Rate selection at the transmitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateControl {
    NoBackoff,
    Fixed(f64),
    BackoffExact,
    BackoffApprox,
}

/// Stream reserved for the mean-interference estimate.
pub const STREAM_MEAN_INTERFERENCE: u64 = u64::MAX;
/// Stream reserved for deployed codebooks.
pub const STREAM_CODEBOOK: u64 = u64::MAX - 1;

/// Monte Carlo E[I] over `RHO_BAR_TRIALS` fields; zero without femtocells.
/// It does not depend on the user position, so one estimate serves a sweep.
pub fn mean_interference_mc(p: &SystemParams, seed: u64) -> Result<f64> {
    if p.density == 0.0 {
        return Ok(0.0);
    }
    let mut rng = trial_rng(seed, STREAM_MEAN_INTERFERENCE, 0);
    Ok(estimate_rho_bar(p, RHO_BAR_TRIALS, &mut rng)?.mean_interference_mc)
}

/// Codebook shared by every trial of a run.
pub fn deployed_codebook(p: &SystemParams, seed: u64) -> Result<Codebook> {
    generate_rvq(p.n_b, p.bits, &mut trial_rng(seed, STREAM_CODEBOOK, 0))
}

/// Swept parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    /// User distance, m.
    Distance,
    /// Receive SNR, dB, mapped to a user distance.
    Snr,
    /// km/h
    Velocity,
    /// Quantization loss, mapped to the nearest integer bit count.
    Delta,
    /// Femtocells per m^2.
    Density,
    Bits,
}

impl Axis {
    /// Dataset column name, with unit suffix.
    pub fn column(self) -> &'static str {
        match self {
            Axis::Distance => "distance_m",
            Axis::Snr => "snr_db",
            Axis::Velocity => "velocity_kmh",
            Axis::Delta => "delta",
            Axis::Density => "density_per_m2",
            Axis::Bits => "bits",
        }
    }

    /// `p` with the axis set to `value`.
    pub fn apply(self, p: &SystemParams, value: f64) -> Result<SystemParams> {
        let mut q = *p;
        match self {
            Axis::Distance => q.user_distance = value,
            Axis::Snr => q.user_distance = p.distance_for_snr_db(value),
            Axis::Velocity => q.mobility.velocity = kmh_to_mps(value),
            Axis::Delta => {
                if !(value > 0.0 && value < 1.0) || p.n_b < 2 {
                    return domain(format!(
                        "delta must be in (0, 1) with n_b >= 2, got {value}"
                    ));
                }
                let bits = (-(p.n_b as f64 - 1.0) * value.log2()).round();
                q.bits = bits as u32;
                let got = gersho_delta(p.n_b, q.bits)?;
                if (got - value).abs() > 1e-3 * value {
                    return domain(format!(
                        "delta {value} is not reachable with integer bits (nearest {got})"
                    ));
                }
            }
            Axis::Density => q.density = value,
            Axis::Bits => {
                if value.fract() != 0.0 || value < 1.0 {
                    return domain(format!("bits must be a positive integer, got {value}"));
                }
                q.bits = value as u32;
            }
        }
        q.validate()?;
        Ok(q)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axis: Axis,
    pub values: Vec<f64>,
    pub trials_per_point: u64,
    pub seed: u64,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return domain("sweep values must be nonempty");
        }
        if self.trials_per_point < 1 {
            return domain("trials_per_point must be at least 1");
        }
        if let Some(v) = self.values.iter().find(|v| !v.is_finite()) {
            return domain(format!("sweep value {v} is not finite"));
        }
        Ok(())
    }

    /// Parameter set for every sweep point.
    pub fn points(&self, base: &SystemParams) -> Result<Vec<SystemParams>> {
        self.validate()?;
        self.values
            .iter()
            .map(|&v| self.axis.apply(base, v))
            .collect()
    }
}

/// Quantities frozen per sweep point.
#[derive(Debug, Clone, Copy)]
pub struct Setup {
    pub params: SystemParams,
    pub eta: f64,
    /// Femtocell-to-macro pathloss ratio at the user.
    pub q_d: f64,
    pub rho_bar: f64,
    pub model: LinkModel,
}

impl Setup {
    /// Freezes rho_bar from a Monte Carlo mean interference estimate.
    pub fn new(p: &SystemParams, seed: u64) -> Result<Self> {
        Self::with_mean_interference(p, mean_interference_mc(p, seed)?)
    }

    /// rho_bar = 1 / (Q_D E[I]) for a known mean interference (noise
    /// referenced when there are no femtocells).
    pub fn with_mean_interference(p: &SystemParams, mean_interference: f64) -> Result<Self> {
        p.validate()?;
        let q_d = pathloss_ratio(p.user_distance, &p.pathloss)?;
        let rho_bar = if p.density > 0.0 {
            1.0 / (q_d * mean_interference)
        } else {
            1.0 / p.noise_pathloss_ratio()
        };
        Ok(Self {
            params: *p,
            eta: correlation_coefficient(&p.mobility)?,
            q_d,
            rho_bar,
            model: LinkModel::new(p)?,
        })
    }

    fn interference_sir(&self, signal: f64, rng: &mut ChaCha8Rng) -> Result<f64> {
        let p = &self.params;
        if p.density > 0.0 {
            let i = sample_interference(
                p.density,
                p.cell_radius,
                p.pathloss.d_min,
                p.pathloss.alpha_f,
                rng,
            )?;
            Ok(signal / (self.q_d * i))
        } else {
            Ok(signal / p.noise_pathloss_ratio())
        }
    }

    fn backoff_factor(&self, control: RateControl, sir_estimate: f64) -> Result<f64> {
        Ok(match control {
            RateControl::NoBackoff => 1.0,
            RateControl::Fixed(b) => b,
            RateControl::BackoffExact => beta_star(sir_estimate, &self.model)?.beta_star,
            RateControl::BackoffApprox => {
                if self.params.density > 0.0 {
                    beta_star_interference_quadratic(sir_estimate, &self.params)?.beta_star
                } else {
                    beta_star_delay_poly(sir_estimate, &self.params)?.beta_star
                }
            }
        })
    }
}

struct Draw {
    /// |h[n-d]^H f|^2
    fed_back: f64,
    /// |h[n]^H f|^2
    received: f64,
    /// |h[n]^H f_rand|^2 for an isotropic f_rand
    random_bf: f64,
}

fn draw_channels(
    setup: &Setup,
    feedback: Feedback,
    rng: &mut ChaCha8Rng,
    want_random: bool,
) -> Result<Draw> {
    let n_b = setup.params.n_b;
    let h_old = sample_channel(n_b, rng)?;
    let fresh;
    let (f, fed_back) = match feedback {
        Feedback::Fixed(cb) => {
            let (i, g) = quantize_with_gain(&h_old, cb)?;
            (cb.get(i).clone(), g)
        }
        Feedback::FreshRvq => {
            fresh = generate_rvq(n_b, setup.params.bits, rng)?;
            let (i, g) = quantize_with_gain(&h_old, &fresh)?;
            (fresh.get(i).clone(), g)
        }
        Feedback::Perfect => {
            let f = h_old.normalized();
            let g = inner(&h_old, &f).norm_sqr();
            (f, g)
        }
    };
    let h_new = evolve_gauss_markov(&h_old, setup.eta.clamp(0.0, 1.0), rng)?;
    let received = effective_power(&h_new, &f)?;
    let random_bf = if want_random {
        let fr = sample_channel(n_b, rng)?.normalized();
        effective_power(&h_new, &fr)?
    } else {
        0.0
    };
    Ok(Draw {
        fed_back,
        received,
        random_bf,
    })
}

/// One end-to-end draw: quantize at n - d, age to n, add interference,
/// compare the transmitted rate with the supported one.
pub fn run_trial(
    setup: &Setup,
    feedback: Feedback,
    control: RateControl,
    rng: &mut ChaCha8Rng,
) -> Result<TrialResult> {
    if let RateControl::Fixed(b) = control {
        if !(0.0..=1.0).contains(&b) {
            return domain(format!("backoff factor must lie in [0, 1], got {b}"));
        }
    }
    let d = draw_channels(setup, feedback, rng, false)?;
    let sir_rx = setup.interference_sir(d.received, rng)?;
    let estimate = setup.rho_bar * d.fed_back;
    let beta = setup.backoff_factor(control, estimate)?;
    Ok(TrialResult::new(beta * estimate, sir_rx))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutageEstimate {
    pub outage: f64,
    /// 95% normal-approximation binomial half-width.
    pub half_width: f64,
    pub trials: u64,
}

/// Fraction of trials with received SIR below `upsilon`.
pub fn estimate_outage(
    setup: &Setup,
    feedback: Feedback,
    upsilon: f64,
    trials: u64,
    seed: u64,
    stream: u64,
) -> Result<OutageEstimate> {
    if trials < 1 {
        return domain("estimate_outage needs at least one trial");
    }
    let [fails, errors] = chunked_sum(trials, |t| {
        let mut rng = trial_rng(seed, stream, t);
        match draw_channels(setup, feedback, &mut rng, false)
            .and_then(|d| setup.interference_sir(d.received, &mut rng))
        {
            Ok(sir) => [(sir < upsilon) as u8 as f64, 0.0],
            Err(_) => [0.0, 1.0],
        }
    });
    if errors > 0.0 {
        return Err(crate::Error::Numeric(format!("{errors} trials failed")));
    }
    let n = trials as f64;
    let p = fails / n;
    Ok(OutageEstimate {
        outage: p,
        half_width: 1.96 * (p * (1.0 - p) / n).sqrt(),
        trials,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GoodputMode {
    NoBackoff,
    BackoffExact,
    BackoffPoly,
    RandomBeamforming,
    Throughput,
}

impl GoodputMode {
    pub const ALL: [GoodputMode; 5] = [
        GoodputMode::NoBackoff,
        GoodputMode::BackoffExact,
        GoodputMode::BackoffPoly,
        GoodputMode::RandomBeamforming,
        GoodputMode::Throughput,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_err: f64,
}

fn per_trial_rate(
    setup: &Setup,
    feedback: Feedback,
    mode: GoodputMode,
    rng: &mut ChaCha8Rng,
) -> Result<f64> {
    let d = draw_channels(setup, feedback, rng, mode == GoodputMode::RandomBeamforming)?;
    // The interference draw follows the channel draws, so every mode sees
    // the same field for a given trial.
    let sir_rx = setup.interference_sir(d.received, rng)?;
    let estimate = setup.rho_bar * d.fed_back;
    Ok(match mode {
        GoodputMode::Throughput => sir_rx.ln_1p() / LN_2,
        GoodputMode::RandomBeamforming => {
            let scale = if d.received > 0.0 {
                sir_rx / d.received
            } else {
                0.0
            };
            (d.random_bf * scale).ln_1p() / LN_2
        }
        _ => {
            let control = match mode {
                GoodputMode::NoBackoff => RateControl::NoBackoff,
                GoodputMode::BackoffExact => RateControl::BackoffExact,
                _ => RateControl::BackoffApprox,
            };
            let beta = setup.backoff_factor(control, estimate)?;
            TrialResult::new(beta * estimate, sir_rx).goodput
        }
    })
}

/// Sample mean of the per-trial rate for a goodput mode.
pub fn estimate_goodput(
    setup: &Setup,
    feedback: Feedback,
    mode: GoodputMode,
    trials: u64,
    seed: u64,
    stream: u64,
) -> Result<MeanEstimate> {
    if trials < 1 {
        return domain("estimate_goodput needs at least one trial");
    }
    let [sum, sum_sq, errors] = chunked_sum(trials, |t| {
        let mut rng = trial_rng(seed, stream, t);
        match per_trial_rate(setup, feedback, mode, &mut rng) {
            Ok(v) => [v, v * v, 0.0],
            Err(_) => [0.0, 0.0, 1.0],
        }
    });
    if errors > 0.0 {
        return Err(crate::Error::Numeric(format!("{errors} trials failed")));
    }
    let n = trials as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0) * n / (n - 1.0).max(1.0);
    Ok(MeanEstimate {
        mean,
        std_err: (var / n).sqrt(),
    })
}

/// Per-trial effective powers: (eta^2 |h[n-d]^H f|^2, |h[n]^H f|^2).
pub fn sample_effective_powers(
    setup: &Setup,
    feedback: Feedback,
    trials: u64,
    seed: u64,
    stream: u64,
) -> Result<Vec<(f64, f64)>> {
    let eta2 = setup.eta * setup.eta;
    collect_trials(trials, |t| {
        let mut rng = trial_rng(seed, stream, t);
        draw_channels(setup, feedback, &mut rng, false).map(|d| (eta2 * d.fed_back, d.received))
    })
    .into_iter()
    .collect()
}

/// Kolmogorov-Smirnov distance between a sample and a CDF.
pub fn ks_distance<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> f64 {
    let mut xs = sample.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    xs.iter().enumerate().fold(0.0, |m, (i, &x)| {
        let c = cdf(x);
        m.max((c - i as f64 / n).abs())
            .max((c - (i + 1) as f64 / n).abs())
    })
}

/// Two-sample Kolmogorov-Smirnov distance.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(|p, q| p.partial_cmp(q).unwrap());
    ys.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let (mut i, mut j, mut d) = (0, 0, 0.0_f64);
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    while i < xs.len() && j < ys.len() {
        let v = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= v {
            i += 1;
        }
        while j < ys.len() && ys[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::success_probability;
    use crate::params::{db_to_linear, default_params};

    fn small_delay() -> SystemParams {
        let mut p = default_params();
        p.n_b = 2;
        p.n_f = 2;
        p.bits = 3;
        p.density = 0.0;
        p
    }

    #[test]
    fn seeding_is_stable_and_distinct() {
        use rand::Rng;
        let a: u64 = trial_rng(1, 2, 3).random();
        let b: u64 = trial_rng(1, 2, 3).random();
        let c: u64 = trial_rng(1, 2, 4).random();
        let d: u64 = trial_rng(1, 3, 3).random();
        assert_eq!(a, b);
        assert!(a != c && a != d);
    }

    #[test]
    fn aggregation_ignores_thread_count() {
        let p = default_params().with_distance(60.0);
        let setup = Setup::with_mean_interference(&p, 1e-4).unwrap();
        let run = |threads| {
            worker_pool(Some(threads)).install(|| {
                estimate_goodput(
                    &setup,
                    Feedback::FreshRvq,
                    GoodputMode::NoBackoff,
                    10_000,
                    9,
                    0,
                )
                .unwrap()
            })
        };
        let one = run(1);
        let four = run(4);
        assert_eq!(one.mean.to_bits(), four.mean.to_bits());
        assert_eq!(one.std_err.to_bits(), four.std_err.to_bits());
    }

    #[test]
    fn perfect_csi_never_outage() {
        let mut p = small_delay();
        p.mobility.delay_frames = 0;
        let setup = Setup::new(&p, 1).unwrap();
        assert_eq!(setup.eta, 1.0);
        for t in 0..10_000 {
            let r = run_trial(
                &setup,
                Feedback::Perfect,
                RateControl::NoBackoff,
                &mut trial_rng(1, 0, t),
            )
            .unwrap();
            assert!(!r.outage);
            assert!((r.sir_tx - r.sir_rx).abs() <= 1e-9 * r.sir_rx);
        }
    }

    #[test]
    fn zero_backoff_zero_goodput_and_invariants() {
        let p = default_params().with_distance(80.0);
        let setup = Setup::with_mean_interference(&p, 1e-4).unwrap();
        for t in 0..2000 {
            let mut rng = trial_rng(2, 0, t);
            let r = run_trial(
                &setup,
                Feedback::FreshRvq,
                RateControl::Fixed(0.0),
                &mut rng,
            )
            .unwrap();
            assert_eq!(r.goodput, 0.0);
            let r = run_trial(
                &setup,
                Feedback::FreshRvq,
                RateControl::NoBackoff,
                &mut trial_rng(2, 1, t),
            )
            .unwrap();
            assert!(r.goodput <= r.rate_supported);
            assert_eq!(r.outage, r.goodput == 0.0 && r.rate_tx > 0.0);
            if r.rate_tx <= r.rate_supported {
                assert_eq!(r.goodput, r.rate_tx);
            }
        }
    }

    #[test]
    fn outage_limits() {
        let setup = Setup::new(&small_delay(), 3).unwrap();
        let none = estimate_outage(&setup, Feedback::FreshRvq, 1e-12, 2000, 3, 0).unwrap();
        assert_eq!(none.outage, 0.0);
        let all = estimate_outage(&setup, Feedback::FreshRvq, 1e12, 2000, 3, 0).unwrap();
        assert_eq!(all.outage, 1.0);
    }

    #[test]
    fn outage_matches_analysis_near_the_base_station() {
        let p = default_params().with_distance(25.0);
        let setup = Setup::with_mean_interference(&p, 1e-4).unwrap();
        let est =
            estimate_outage(&setup, Feedback::FreshRvq, p.sir_threshold, 20_000, 4, 0).unwrap();
        let analytic = 1.0 - success_probability(p.sir_threshold, &p).unwrap();
        assert!((est.outage - analytic).abs() <= (0.05f64).max(3.0 * est.half_width));
    }

    #[test]
    fn half_width_shrinks_as_root_n() {
        let p = default_params().with_distance(90.0);
        let setup = Setup::with_mean_interference(&p, 1e-4).unwrap();
        let small =
            estimate_outage(&setup, Feedback::FreshRvq, p.sir_threshold, 4_000, 5, 0).unwrap();
        let large =
            estimate_outage(&setup, Feedback::FreshRvq, p.sir_threshold, 40_000, 5, 1).unwrap();
        let ratio = small.half_width / large.half_width;
        assert!((ratio / 10f64.sqrt() - 1.0).abs() < 0.2, "ratio {ratio}");
    }

    #[test]
    fn lemma_one_regime() {
        // At the edge of the regime, eta = 0.95, the aged power should be close
        // in law to eta^2 times the fed-back power.
        use crate::mathkit::{bessel_j0, find_root_bracketed};
        let x = find_root_bracketed(|x| bessel_j0(x).unwrap() - 0.95, 0.0, 1.0).unwrap();
        let mut p = default_params();
        p.mobility.symbol_duration = x
            / (2.0
                * std::f64::consts::PI
                * p.mobility.doppler_hz()
                * p.mobility.delay_frames as f64);
        let setup = Setup::with_mean_interference(&p, 1e-4).unwrap();
        assert!((setup.eta - 0.95).abs() < 1e-9);
        let pairs = sample_effective_powers(&setup, Feedback::FreshRvq, 100_000, 6, 0).unwrap();
        let (approx, actual): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let ks = ks_two_sample(&approx, &actual);
        assert!(ks < 0.03, "ks {ks}");
    }

    #[test]
    fn perfect_feedback_without_aging_needs_no_backoff() {
        let mut p = small_delay();
        p.mobility.delay_frames = 0;
        let setup = Setup::new(&p, 7).unwrap();
        let ups = db_to_linear(5.0);
        let best = (0..=100)
            .map(|i| {
                let b = i as f64 / 100.0;
                let g = chunked_sum(5_000, |t| {
                    let mut rng = trial_rng(7, 0, t);
                    [
                        run_trial(&setup, Feedback::Perfect, RateControl::Fixed(b), &mut rng)
                            .unwrap()
                            .goodput,
                    ]
                })[0];
                (b, g)
            })
            .fold(
                (0.0, f64::NEG_INFINITY),
                |a, c| if c.1 > a.1 { c } else { a },
            );
        assert!((best.0 - 1.0).abs() <= 0.01, "{best:?} at {ups}");
    }

    #[test]
    fn goodput_ordering_on_delay_configuration() {
        let p = small_delay();
        let cb = {
            let mut rng = trial_rng(8, 99, 0);
            generate_rvq(p.n_b, p.bits, &mut rng).unwrap()
        };
        let mut prev_gap = f64::NEG_INFINITY;
        for snr in [0.0, 10.0, 20.0] {
            let q = p.with_distance(p.distance_for_snr_db(snr));
            let setup = Setup::new(&q, 8).unwrap();
            let get = |m| {
                estimate_goodput(&setup, Feedback::Fixed(&cb), m, 20_000, 8, 0)
                    .unwrap()
                    .mean
            };
            let none = get(GoodputMode::NoBackoff);
            let exact = get(GoodputMode::BackoffExact);
            let thr = get(GoodputMode::Throughput);
            assert!(exact >= none && thr >= exact, "snr {snr}");
            assert!(thr - none >= prev_gap, "gap should grow with SNR");
            prev_gap = thr - none;
        }
    }

    #[test]
    fn sweep_axes() {
        let p = default_params();
        let q = Axis::Snr.apply(&p, 10.0).unwrap();
        assert!((q.snr_db_at(q.user_distance) - 10.0).abs() < 1e-9);
        assert_eq!(Axis::Delta.apply(&p, 0.25).unwrap().bits, 6);
        assert!(Axis::Delta.apply(&p, 0.3).is_err());
        assert!(Axis::Bits.apply(&p, 2.5).is_err());
        let spec = SweepSpec {
            axis: Axis::Velocity,
            values: vec![],
            trials_per_point: 1,
            seed: 0,
        };
        assert!(spec.points(&p).is_err());
    }

    #[test]
    fn ks_helpers() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        assert!(ks_distance(&xs, |x| x.clamp(0.0, 1.0)) <= 1e-3 + 1e-12);
        assert_eq!(ks_two_sample(&xs, &xs), 0.0);
    }
}
