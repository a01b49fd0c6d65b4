//! System parameter bundle and the default deployment.

use crate::channel::{kmh_to_mps, MobilityParams};
use crate::codebook::MAX_BITS;
use crate::error::{domain, Result};
use crate::geometry::PathlossParams;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Base-station antennas.
    pub n_b: usize,
    /// Femtocell antennas. Only enters through the exponential interferer
    /// marks, whose law does not depend on it.
    pub n_f: usize,
    /// Feedback bits per codeword index.
    pub bits: u32,
    pub pathloss: PathlossParams,
    pub mobility: MobilityParams,
    /// Femtocell density, per m^2.
    pub density: f64,
    /// m
    pub cell_radius: f64,
    /// Distance from the macro base station to the user, m.
    pub user_distance: f64,
    /// Linear SIR threshold.
    pub sir_threshold: f64,
    /// Receiver noise power, same units as the transmit gains. Sets the SNR
    /// axis and the interference-free pathloss ratio.
    pub noise_power: f64,
}

pub const DEFAULT_CELL_RADIUS: f64 = 1000.0;
pub const DEFAULT_FEMTOCELLS_PER_CELL: f64 = 95.0;
/// Reference distance at which the default noise floor gives 0 dB SNR.
pub const REFERENCE_DISTANCE_0DB: f64 = 100.0;

/// The reference deployment: 1 km cell, exponents 3.8, 2 GHz carrier,
/// 5 dB wall loss, 95 femtocells per cell, 20 km/h, two frames of delay.
pub fn default_params() -> SystemParams {
    let alpha = 3.8;
    SystemParams {
        n_b: 4,
        n_f: 4,
        bits: 5,
        pathloss: PathlossParams {
            alpha_m: alpha,
            alpha_f: alpha,
            rho_m: 1.0,
            rho_f: 1.0,
            wall_loss_db: 5.0,
            d_min: 1.0,
        },
        mobility: MobilityParams {
            velocity: kmh_to_mps(20.0),
            carrier_freq: 2e9,
            symbol_duration: 1e-3,
            delay_frames: 2,
        },
        density: DEFAULT_FEMTOCELLS_PER_CELL / (PI * DEFAULT_CELL_RADIUS * DEFAULT_CELL_RADIUS),
        cell_radius: DEFAULT_CELL_RADIUS,
        user_distance: REFERENCE_DISTANCE_0DB,
        sir_threshold: db_to_linear(5.0),
        noise_power: REFERENCE_DISTANCE_0DB.powf(-alpha),
    }
}

impl Default for SystemParams {
    fn default() -> Self {
        default_params()
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64| v.is_finite() && v > 0.0;
        if self.n_b < 2 {
            return domain(format!("n_b must be at least 2, got {}", self.n_b));
        }
        if self.n_f < 1 {
            return domain("n_f must be at least 1");
        }
        if !(1..=MAX_BITS).contains(&self.bits) {
            return domain(format!("bits must be in 1..={MAX_BITS}, got {}", self.bits));
        }
        self.pathloss.validate()?;
        self.mobility.validate()?;
        if !(self.density.is_finite() && self.density >= 0.0) {
            return domain(format!(
                "density must be finite and >= 0, got {}",
                self.density
            ));
        }
        if !pos(self.cell_radius) || self.cell_radius <= self.pathloss.d_min {
            return domain(format!(
                "cell_radius must exceed d_min, got {}",
                self.cell_radius
            ));
        }
        if !pos(self.user_distance) || self.user_distance > self.cell_radius {
            return domain(format!(
                "user_distance must lie in (0, cell_radius], got {}",
                self.user_distance
            ));
        }
        if !pos(self.sir_threshold) {
            return domain(format!(
                "sir_threshold must be positive, got {}",
                self.sir_threshold
            ));
        }
        if !pos(self.noise_power) {
            return domain(format!(
                "noise_power must be positive, got {}",
                self.noise_power
            ));
        }
        Ok(())
    }

    /// Received SNR in dB at distance `d`.
    pub fn snr_db_at(&self, d: f64) -> f64 {
        linear_to_db(self.pathloss.rho_m * d.powf(-self.pathloss.alpha_m) / self.noise_power)
    }

    /// Distance at which the received SNR equals `snr_db`.
    pub fn distance_for_snr_db(&self, snr_db: f64) -> f64 {
        (self.pathloss.rho_m / (self.noise_power * db_to_linear(snr_db)))
            .powf(1.0 / self.pathloss.alpha_m)
    }

    /// Noise-to-signal ratio at the user, the pathloss ratio without interference.
    pub fn noise_pathloss_ratio(&self) -> f64 {
        self.noise_power / (self.pathloss.rho_m * self.user_distance.powf(-self.pathloss.alpha_m))
    }

    pub fn femtocells_per_cell(&self) -> f64 {
        self.density * PI * self.cell_radius * self.cell_radius
    }

    pub fn with_distance(mut self, d: f64) -> Self {
        self.user_distance = d;
        self
    }
}
