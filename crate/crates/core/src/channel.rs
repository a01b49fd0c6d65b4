//! Rayleigh MISO channel draws and Gauss-Markov aging.
//!
//! Entries are circularly symmetric complex Gaussian with unit total
//! variance: real and imaginary parts each carry variance 1/2.

use crate::error::{domain, Result};
use crate::mathkit::bessel_j0;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

pub const SPEED_OF_LIGHT: f64 = 2.998e8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelVector {
    pub entries: Vec<Complex64>,
}

impl ChannelVector {
    pub fn new(entries: Vec<Complex64>) -> Self {
        Self { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Unit-norm copy.
    pub fn normalized(&self) -> Self {
        let n = self.norm_sqr().sqrt();
        Self::new(self.entries.iter().map(|z| z / n).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobilityParams {
    /// m/s
    pub velocity: f64,
    /// Hz
    pub carrier_freq: f64,
    /// s
    pub symbol_duration: f64,
    pub delay_frames: u32,
}

impl MobilityParams {
    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(self.velocity) || !ok(self.carrier_freq) || !ok(self.symbol_duration) {
            return domain(format!("mobility parameters must be positive: {self:?}"));
        }
        Ok(())
    }

    pub fn doppler_hz(&self) -> f64 {
        self.velocity * self.carrier_freq / SPEED_OF_LIGHT
    }
}

pub fn kmh_to_mps(kmh: f64) -> f64 {
    kmh / 3.6
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}

pub fn sample_channel<R: Rng + ?Sized>(n_antennas: usize, rng: &mut R) -> Result<ChannelVector> {
    if n_antennas < 1 {
        return domain("a channel needs at least one antenna");
    }
    Ok(ChannelVector::new(
        (0..n_antennas).map(|_| complex_gaussian(rng)).collect(),
    ))
}

/// Clarke-model correlation J0(2 pi d f_d T_s) after `delay_frames` frames.
pub fn correlation_coefficient(m: &MobilityParams) -> Result<f64> {
    m.validate()?;
    bessel_j0(2.0 * PI * m.delay_frames as f64 * m.doppler_hz() * m.symbol_duration)
}

pub fn evolve_gauss_markov<R: Rng + ?Sized>(
    h_old: &ChannelVector,
    eta: f64,
    rng: &mut R,
) -> Result<ChannelVector> {
    if !(0.0..=1.0).contains(&eta) {
        return domain(format!("eta must lie in [0, 1], got {eta}"));
    }
    if eta == 1.0 {
        return Ok(h_old.clone());
    }
    let innovation = (1.0 - eta * eta).sqrt();
    Ok(ChannelVector::new(
        h_old
            .entries
            .iter()
            .map(|&h| eta * h + innovation * complex_gaussian(rng))
            .collect(),
    ))
}

/// |h^H f|^2
pub fn effective_power(h: &ChannelVector, f: &ChannelVector) -> Result<f64> {
    if h.len() != f.len() {
        return domain(format!("length mismatch: {} vs {}", h.len(), f.len()));
    }
    Ok(inner(h, f).norm_sqr())
}

pub(crate) fn inner(h: &ChannelVector, f: &ChannelVector) -> Complex64 {
    h.entries
        .iter()
        .zip(&f.entries)
        .map(|(a, b)| a.conj() * b)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn mobility(kmh: f64, frames: u32) -> MobilityParams {
        MobilityParams {
            velocity: kmh_to_mps(kmh),
            carrier_freq: 2e9,
            symbol_duration: 1e-3,
            delay_frames: frames,
        }
    }

    fn ks_against<F: Fn(f64) -> f64>(mut xs: Vec<f64>, cdf: F) -> f64 {
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = xs.len() as f64;
        xs.iter().enumerate().fold(0.0, |m, (i, &x)| {
            let c = cdf(x);
            m.max((c - i as f64 / n).abs())
                .max((c - (i + 1) as f64 / n).abs())
        })
    }

    fn gamma4_cdf(x: f64) -> f64 {
        1.0 - (-x).exp() * (1.0 + x + x * x / 2.0 + x * x * x / 6.0)
    }

    #[test]
    fn shape_and_moments() {
        let mut r = rng(1);
        assert_eq!(sample_channel(4, &mut r).unwrap().len(), 4);
        assert!(sample_channel(0, &mut r).is_err());
        let n = 100_000;
        let mut mean = Complex64::new(0.0, 0.0);
        let mut energy = 0.0;
        for _ in 0..n {
            let h = sample_channel(4, &mut r).unwrap();
            mean += h.entries[0];
            energy += h.norm_sqr();
        }
        mean /= n as f64;
        assert!(mean.re.abs() < 0.02 && mean.im.abs() < 0.02);
        assert!((energy / n as f64 - 4.0).abs() < 0.1);
    }

    #[test]
    fn correlation_examples() {
        assert_eq!(correlation_coefficient(&mobility(20.0, 0)).unwrap(), 1.0);
        let m = mobility(20.0, 2);
        assert!((m.doppler_hz() - 20.0 / 3.6 * 2e9 / 2.998e8).abs() < 1e-9);
        assert!((m.doppler_hz() - 37.04).abs() < 0.03);
        let eta = correlation_coefficient(&m).unwrap();
        assert!(eta > 0.0 && eta < 1.0);
        // Choose T_s so the Bessel argument is 0.31416.
        let mut m = mobility(20.0, 1);
        m.symbol_duration = 0.31416 / (2.0 * PI * m.doppler_hz());
        let x: f64 = 0.31416;
        let oracle = 1.0 - x.powi(2) / 4.0 + x.powi(4) / 64.0 - x.powi(6) / 2304.0;
        assert!((correlation_coefficient(&m).unwrap() - oracle).abs() < 1e-9);
    }

    #[test]
    fn evolve_limits() {
        let mut r = rng(2);
        let h = sample_channel(3, &mut r).unwrap();
        assert_eq!(evolve_gauss_markov(&h, 1.0, &mut r).unwrap(), h);
        assert!(evolve_gauss_markov(&h, 1.5, &mut r).is_err());
        assert!(evolve_gauss_markov(&h, -0.1, &mut r).is_err());
    }

    fn empirical_correlation(eta: f64, seed: u64) -> f64 {
        let mut r = rng(seed);
        let n = 100_000;
        let mut acc = Complex64::new(0.0, 0.0);
        for _ in 0..n {
            let h = sample_channel(1, &mut r).unwrap();
            let g = evolve_gauss_markov(&h, eta, &mut r).unwrap();
            acc += h.entries[0].conj() * g.entries[0];
        }
        (acc / n as f64).re
    }

    #[test]
    fn evolve_mixing_weight() {
        assert!(empirical_correlation(0.0, 3).abs() < 0.02);
        assert!((empirical_correlation(0.9, 4) - 0.9).abs() < 0.01);
    }

    #[test]
    fn evolution_is_stationary() {
        let mut r = rng(5);
        for eta in [0.0, 0.5, 0.95] {
            let xs: Vec<f64> = (0..100_000)
                .map(|_| {
                    let h = sample_channel(4, &mut r).unwrap();
                    evolve_gauss_markov(&h, eta, &mut r).unwrap().norm_sqr()
                })
                .collect();
            assert!(ks_against(xs, gamma4_cdf) < 0.01, "eta = {eta}");
        }
    }

    #[test]
    fn effective_power_examples() {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let f = ChannelVector::new(vec![c(0.6, 0.0), c(0.0, 0.8)]);
        assert!((effective_power(&f, &f).unwrap() - 1.0).abs() < 1e-15);
        let orth = ChannelVector::new(vec![c(0.0, 0.8), c(0.6, 0.0)]);
        assert!(effective_power(&f, &orth).unwrap().abs() < 1e-15);
        let h = ChannelVector::new(vec![c(1.0, 0.0), c(1.0, 0.0)]);
        let e1 = ChannelVector::new(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(effective_power(&h, &e1).unwrap(), 1.0);
        assert!(effective_power(&h, &ChannelVector::new(vec![c(1.0, 0.0)])).is_err());
    }

    #[test]
    fn global_phase_invariance() {
        let mut r = rng(6);
        for _ in 0..100 {
            let h = sample_channel(4, &mut r).unwrap();
            let f = sample_channel(4, &mut r).unwrap().normalized();
            let rot = Complex64::from_polar(1.0, r.random::<f64>() * 2.0 * PI);
            let hr = ChannelVector::new(h.entries.iter().map(|z| z * rot).collect());
            let a = effective_power(&h, &f).unwrap();
            assert!((a - effective_power(&hr, &f).unwrap()).abs() < 1e-12 * a.max(1.0));
            assert!(a <= h.norm_sqr() + 1e-12);
        }
    }
}
