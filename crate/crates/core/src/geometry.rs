//! Poisson femtocell fields, pathloss and the aggregate cross-tier
//! interference seen by a user at the origin.

use crate::error::{domain, Result};
use crate::params::SystemParams;
use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathlossParams {
    /// Outdoor exponent.
    pub alpha_m: f64,
    /// Indoor-to-outdoor exponent.
    pub alpha_f: f64,
    pub rho_m: f64,
    /// Femtocell gain before wall penetration loss.
    pub rho_f: f64,
    pub wall_loss_db: f64,
    /// Exclusion radius around the user, m.
    pub d_min: f64,
}

impl PathlossParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_m > 2.0 && self.alpha_f > 2.0) {
            return domain(format!("pathloss exponents must exceed 2: {self:?}"));
        }
        if !(self.rho_m > 0.0
            && self.rho_f > 0.0
            && self.d_min > 0.0
            && self.wall_loss_db.is_finite())
        {
            return domain(format!("gains and d_min must be positive: {self:?}"));
        }
        Ok(())
    }

    /// Femtocell gain after the wall.
    pub fn effective_rho_f(&self) -> f64 {
        self.rho_f * 10f64.powf(-self.wall_loss_db / 10.0)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct InterfererField {
    /// Positions relative to the user, m.
    pub positions: Vec<[f64; 2]>,
    /// |g_i^H w_i|^2 per interferer.
    pub fading_marks: Vec<f64>,
}

impl InterfererField {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["x_m", "y_m", "mark"])?;
        for (p, m) in self.positions.iter().zip(&self.fading_marks) {
            out.serialize((p[0], p[1], m))?;
        }
        out.flush()?;
        Ok(())
    }
}

fn check_disc(density: f64, radius: f64, d_min: f64) -> Result<()> {
    if !(density.is_finite() && density >= 0.0)
        || !(radius > d_min && d_min > 0.0)
        || !radius.is_finite()
    {
        return domain(format!(
            "need density >= 0 and radius > d_min > 0 (density {density}, radius {radius}, d_min {d_min})"
        ));
    }
    Ok(())
}

fn point_count<R: Rng + ?Sized>(density: f64, radius: f64, rng: &mut R) -> u64 {
    let mean = density * PI * radius * radius;
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean)
        .expect("positive finite mean")
        .sample(rng) as u64
}

/// Squared distance uniform over the annulus d_min <= r <= radius.
/// Drawing directly on the annulus is the same law as re-drawing points that
/// fall inside the exclusion disc.
fn annulus_r2<R: Rng + ?Sized>(radius: f64, d_min: f64, rng: &mut R) -> f64 {
    let lo = d_min * d_min;
    lo + rng.random::<f64>() * (radius * radius - lo)
}

/// Homogeneous PPP on a disc centred on the user with unit-mean exponential marks.
pub fn sample_ppp_disc<R: Rng + ?Sized>(
    density: f64,
    radius: f64,
    d_min: f64,
    rng: &mut R,
) -> Result<InterfererField> {
    check_disc(density, radius, d_min)?;
    let n = point_count(density, radius, rng) as usize;
    let mut field = InterfererField {
        positions: Vec::with_capacity(n),
        fading_marks: Vec::with_capacity(n),
    };
    for _ in 0..n {
        let r = annulus_r2(radius, d_min, rng).sqrt();
        let phi = 2.0 * PI * rng.random::<f64>();
        let mark: f64 = rng.sample(Exp1);
        field.positions.push([r * phi.cos(), r * phi.sin()]);
        field.fading_marks.push(mark);
    }
    Ok(field)
}

/// Same draws as [`sample_ppp_disc`] followed by [`interference_power`],
/// without materializing the field.
pub fn sample_interference<R: Rng + ?Sized>(
    density: f64,
    radius: f64,
    d_min: f64,
    alpha_f: f64,
    rng: &mut R,
) -> Result<f64> {
    check_disc(density, radius, d_min)?;
    let n = point_count(density, radius, rng);
    let half = -0.5 * alpha_f;
    let mut total = 0.0;
    for _ in 0..n {
        let r2 = annulus_r2(radius, d_min, rng);
        let _phi: f64 = rng.random();
        let mark: f64 = rng.sample(Exp1);
        total += r2.powf(half) * mark;
    }
    Ok(total)
}

/// rho_f D^alpha_m / rho_m, with rho_f after wall loss.
pub fn pathloss_ratio(distance: f64, p: &PathlossParams) -> Result<f64> {
    if !(distance > 0.0) {
        return domain(format!("distance must be positive, got {distance}"));
    }
    Ok(p.effective_rho_f() * distance.powf(p.alpha_m) / p.rho_m)
}

/// Sum of |x_i|^(-alpha) * mark_i.
pub fn interference_power(field: &InterfererField, alpha_f: f64) -> f64 {
    let half = -0.5 * alpha_f;
    field
        .positions
        .iter()
        .zip(&field.fading_marks)
        .map(|(p, m)| (p[0] * p[0] + p[1] * p[1]).powf(half) * m)
        .sum()
}

/// Mean shot noise over the annulus by Campbell's theorem.
pub fn campbell_mean_interference(
    density: f64,
    radius: f64,
    d_min: f64,
    alpha_f: f64,
    mark_mean: f64,
) -> f64 {
    2.0 * PI * density * mark_mean * (d_min.powf(2.0 - alpha_f) - radius.powf(2.0 - alpha_f))
        / (alpha_f - 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoBar {
    /// 1 / E[Q_D I_f], or 1 / Q_noise when there is no interference.
    pub rho_bar: f64,
    pub mean_interference_mc: f64,
    pub mean_interference_campbell: f64,
    /// Set when the density is zero and the noise-referenced value was used.
    pub no_interference: bool,
}

/// Monte Carlo estimate of the transmitter's long-term average SIR.
pub fn estimate_rho_bar<R: Rng + ?Sized>(
    params: &SystemParams,
    trials: usize,
    rng: &mut R,
) -> Result<RhoBar> {
    if trials < 1 {
        return domain("estimate_rho_bar needs at least one trial");
    }
    params.validate()?;
    let pl = &params.pathloss;
    let campbell = campbell_mean_interference(
        params.density,
        params.cell_radius,
        pl.d_min,
        pl.alpha_f,
        1.0,
    );
    if params.density == 0.0 {
        return Ok(RhoBar {
            rho_bar: 1.0 / params.noise_pathloss_ratio(),
            mean_interference_mc: 0.0,
            mean_interference_campbell: 0.0,
            no_interference: true,
        });
    }
    let mut sum = 0.0;
    for _ in 0..trials {
        sum += sample_interference(
            params.density,
            params.cell_radius,
            pl.d_min,
            pl.alpha_f,
            rng,
        )?;
    }
    let mean = sum / trials as f64;
    let q = pathloss_ratio(params.user_distance, pl)?;
    Ok(RhoBar {
        rho_bar: 1.0 / (q * mean),
        mean_interference_mc: mean,
        mean_interference_campbell: campbell,
        no_interference: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::default_params;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn cell_density() -> f64 {
        95.0 / (PI * 1e6)
    }

    #[test]
    fn empty_field() {
        let f = sample_ppp_disc(0.0, 1000.0, 1.0, &mut rng(1)).unwrap();
        assert!(f.is_empty());
        assert_eq!(interference_power(&f, 3.8), 0.0);
    }

    #[test]
    fn invalid_geometry() {
        assert!(sample_ppp_disc(1e-3, 1.0, 2.0, &mut rng(1)).is_err());
        assert!(sample_ppp_disc(-1.0, 10.0, 1.0, &mut rng(1)).is_err());
    }

    #[test]
    fn count_is_poisson_95() {
        let mut r = rng(2);
        let counts: Vec<f64> = (0..10_000)
            .map(|_| {
                sample_ppp_disc(cell_density(), 1000.0, 1.0, &mut r)
                    .unwrap()
                    .len() as f64
            })
            .collect();
        let mean = counts.iter().sum::<f64>() / counts.len() as f64;
        let var =
            counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (counts.len() - 1) as f64;
        assert!((mean - 95.0).abs() < 1.0, "mean {mean}");
        assert!((var / mean - 1.0).abs() < 0.05, "var {var}");
    }

    #[test]
    fn field_respects_exclusion_and_radius() {
        let f = sample_ppp_disc(cell_density() * 10.0, 1000.0, 5.0, &mut rng(3)).unwrap();
        for p in &f.positions {
            let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
            assert!((5.0 - 1e-9..=1000.0 + 1e-9).contains(&r));
        }
        assert!(f.fading_marks.iter().all(|&m| m >= 0.0));
    }

    #[test]
    fn void_probability() {
        // Sub-disc of radius 100 m centred at (300, 0).
        let mut r = rng(4);
        let area = PI * 100.0 * 100.0;
        let draws = 10_000;
        let empty = (0..draws)
            .filter(|_| {
                let f = sample_ppp_disc(cell_density(), 1000.0, 1.0, &mut r).unwrap();
                !f.positions
                    .iter()
                    .any(|p| (p[0] - 300.0).hypot(p[1]) < 100.0)
            })
            .count() as f64
            / draws as f64;
        let want = (-cell_density() * area).exp();
        let sigma = (want * (1.0 - want) / draws as f64).sqrt();
        assert!((empty - want).abs() < 4.0 * sigma, "{empty} vs {want}");
    }

    #[test]
    fn fast_path_matches_field() {
        for seed in 0..20 {
            let f = sample_ppp_disc(cell_density(), 1000.0, 1.0, &mut rng(seed)).unwrap();
            let fast =
                sample_interference(cell_density(), 1000.0, 1.0, 3.8, &mut rng(seed)).unwrap();
            let slow = interference_power(&f, 3.8);
            assert!((fast - slow).abs() <= 1e-12 * slow.max(1e-300));
        }
    }

    #[test]
    fn pathloss_examples() {
        let mut p = default_params().pathloss;
        p.wall_loss_db = 0.0;
        assert_eq!(pathloss_ratio(1.0, &p).unwrap(), 1.0);
        let ratio = pathloss_ratio(20.0, &p).unwrap() / pathloss_ratio(10.0, &p).unwrap();
        assert!((ratio - 2f64.powf(3.8)).abs() < 1e-9);
        let q = pathloss_ratio(100.0, &default_params().pathloss).unwrap();
        assert!((q / 10f64.powf(7.1) - 1.0).abs() < 1e-12);
        assert!((q / 1.256e7 - 1.0).abs() < 5e-3);
        assert!(pathloss_ratio(0.0, &p).is_err());
    }

    #[test]
    fn interference_examples() {
        let one = InterfererField {
            positions: vec![[1.0, 0.0]],
            fading_marks: vec![1.0],
        };
        assert_eq!(interference_power(&one, 3.8), 1.0);
        let two = InterfererField {
            positions: vec![[0.0, 2.0]],
            fading_marks: vec![1.0],
        };
        assert_eq!(interference_power(&two, 4.0), 1.0 / 16.0);
    }

    #[test]
    fn adding_an_interferer_never_lowers_power_and_scaling_is_exact() {
        let mut f = sample_ppp_disc(cell_density() * 5.0, 500.0, 1.0, &mut rng(5)).unwrap();
        let before = interference_power(&f, 3.8);
        f.positions.push([40.0, -7.0]);
        f.fading_marks.push(0.3);
        assert!(interference_power(&f, 3.8) >= before);
        let s: f64 = 2.5;
        let scaled = InterfererField {
            positions: f.positions.iter().map(|p| [p[0] * s, p[1] * s]).collect(),
            fading_marks: f.fading_marks.clone(),
        };
        let a = interference_power(&scaled, 3.8);
        let b = s.powf(-3.8) * interference_power(&f, 3.8);
        assert!((a - b).abs() <= 1e-12 * b);
    }

    #[test]
    fn rho_bar_single_interferer_and_no_interference() {
        let p = default_params();
        let q = pathloss_ratio(p.user_distance, &p.pathloss).unwrap();
        let one = InterfererField {
            positions: vec![[2.0, 0.0]],
            fading_marks: vec![1.0],
        };
        let i = interference_power(&one, 4.0);
        assert!((1.0 / (q * i) - 16.0 / q).abs() < 1e-18);

        let mut quiet = p;
        quiet.density = 0.0;
        let rb = estimate_rho_bar(&quiet, 10, &mut rng(6)).unwrap();
        assert!(rb.no_interference);
        assert!((rb.rho_bar - 1.0 / quiet.noise_pathloss_ratio()).abs() < 1e-9 * rb.rho_bar);
        assert!(estimate_rho_bar(&p, 0, &mut rng(6)).is_err());
    }

    #[test]
    fn campbell_mean() {
        // Near-field points at d_min dominate the variance, so the tolerance
        // is the larger of 3% and four standard errors.
        let p = default_params();
        let mut r = rng(7);
        let n = 1_000_000;
        let xs: Vec<f64> = (0..n)
            .map(|_| sample_interference(p.density, 1000.0, 1.0, 3.8, &mut r).unwrap())
            .collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
        let campbell = campbell_mean_interference(p.density, 1000.0, 1.0, 3.8, 1.0);
        assert!((campbell - 1.0556e-4).abs() < 1e-7);
        let tol = (0.03 * campbell).max(4.0 * sd / (n as f64).sqrt());
        assert!((mean - campbell).abs() < tol, "mc {mean} vs {campbell}");
    }

    #[test]
    fn csv_dump() {
        let f = sample_ppp_disc(cell_density(), 1000.0, 1.0, &mut rng(8)).unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("x_m,y_m,mark\n"));
        assert_eq!(text.lines().count(), f.len() + 1);
    }
}
