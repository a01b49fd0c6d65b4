//! Optimal rate backoff.
//!
//! The transmitter sends at log2(1 + beta * Y), where Y is its estimate of
//! the SIR. Reception succeeds when the true SIR clears beta * Y. The
//! backoff factor maximizes log2(1 + beta Y) * P(SIR >= beta Y) over
//! beta in [0, 1].

use crate::analytics::{
    ccdf_no_interference, derive_constants, effective_power_pdf, effective_power_quantile,
    rho_bar_analytic, success_from_constants, DerivedConstants, QUADRATURE_TAIL,
};
use crate::error::{domain, Error, Result};
use crate::mathkit::{
    find_root_bracketed, golden_section_max, integrate_with, Polynomial, QuadOptions, GOLDEN_WIDTH,
};
use crate::params::SystemParams;
use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;

/// Grid used to bracket stationary points before root refinement.
const SCAN_POINTS: usize = 64;
pub const DEFAULT_GRID_POINTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ExactRoot,
    PolynomialApprox,
    QuadraticApprox,
    GridOracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BackoffSolution {
    pub beta_star: f64,
    pub method: Method,
    pub objective_value: f64,
    /// An approximation had no admissible root and the grid oracle answered.
    pub fallback: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Outage only from delay and quantization, against the noise floor.
    DelayOnly,
    /// Outage against Poisson femtocell interference.
    Interference,
}

/// Success probability model shared by the objective and its derivative.
#[derive(Debug, Clone, Copy)]
pub struct LinkModel {
    pub regime: Regime,
    pub k: DerivedConstants,
    pub density: f64,
}

impl LinkModel {
    /// Interference regime when the density is positive, delay-only otherwise.
    pub fn new(p: &SystemParams) -> Result<Self> {
        let regime = if p.density > 0.0 {
            Regime::Interference
        } else {
            Regime::DelayOnly
        };
        Self::with_regime(p, regime)
    }

    pub fn with_regime(p: &SystemParams, regime: Regime) -> Result<Self> {
        Ok(Self {
            regime,
            k: derive_constants(p)?,
            density: p.density,
        })
    }

    /// P(SIR >= x).
    pub fn success(&self, x: f64) -> f64 {
        match self.regime {
            Regime::DelayOnly => ccdf_no_interference(x * self.k.q_noise, &self.k).unwrap_or(0.0),
            Regime::Interference => success_from_constants(x, &self.k, self.density).probability,
        }
    }

    /// d/dx P(SIR >= x), for x > 0.
    pub fn success_slope(&self, x: f64) -> f64 {
        let k = &self.k;
        match self.regime {
            Regime::DelayOnly => -k.q_noise * effective_power_pdf(x * k.q_noise, k).unwrap_or(0.0),
            Regime::Interference => {
                let s = success_from_constants(x, k, self.density);
                let (w1, w2) = (s.omega1, s.omega2);
                k.delta_f / x
                    * ((-w1).exp() * ((k.a1 - k.a2) * w1 - k.a1 * w1 * w1)
                        - k.c2 * w2 * (-w2).exp())
            }
        }
    }

    pub fn objective(&self, beta: f64, upsilon: f64) -> f64 {
        let x = beta * upsilon;
        if x == 0.0 {
            return 0.0;
        }
        x.ln_1p() / LN_2 * self.success(x)
    }

    pub fn objective_derivative(&self, beta: f64, upsilon: f64) -> f64 {
        let x = beta * upsilon;
        let rate_slope = upsilon / ((1.0 + x) * LN_2);
        if x == 0.0 {
            return rate_slope * self.success(0.0);
        }
        rate_slope * self.success(x) + x.ln_1p() / LN_2 * upsilon * self.success_slope(x)
    }
}

fn check(beta: f64, upsilon: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&beta) {
        return domain(format!("beta must lie in [0, 1], got {beta}"));
    }
    if !(upsilon > 0.0) {
        return domain(format!("upsilon must be positive, got {upsilon}"));
    }
    Ok(())
}

fn regime_of(interference: bool) -> Regime {
    if interference {
        Regime::Interference
    } else {
        Regime::DelayOnly
    }
}

/// log2(1 + beta Y) P(SIR >= beta Y).
pub fn objective(beta: f64, upsilon: f64, p: &SystemParams, interference: bool) -> Result<f64> {
    check(beta, upsilon)?;
    Ok(LinkModel::with_regime(p, regime_of(interference))?.objective(beta, upsilon))
}

pub fn objective_derivative(
    beta: f64,
    upsilon: f64,
    p: &SystemParams,
    interference: bool,
) -> Result<f64> {
    check(beta, upsilon)?;
    Ok(LinkModel::with_regime(p, regime_of(interference))?.objective_derivative(beta, upsilon))
}

/// Exact maximizer: every stationary point in (0, 1) plus the boundary
/// beta = 1, best objective wins.
pub fn beta_star(upsilon: f64, model: &LinkModel) -> Result<BackoffSolution> {
    if !(upsilon > 0.0) {
        return domain(format!("upsilon must be positive, got {upsilon}"));
    }
    let g = |b: f64| model.objective_derivative(b, upsilon);
    let mut best = (1.0, model.objective(1.0, upsilon));
    let mut prev_beta = 0.0;
    let mut prev = g(0.0);
    for i in 1..=SCAN_POINTS {
        let beta = i as f64 / SCAN_POINTS as f64;
        let cur = g(beta);
        if prev > 0.0 && cur <= 0.0 {
            let root = find_root_bracketed(g, prev_beta, beta)?;
            let value = model.objective(root, upsilon);
            if value > best.1 {
                best = (root, value);
            }
        }
        prev_beta = beta;
        prev = cur;
    }
    Ok(BackoffSolution {
        beta_star: best.0,
        method: Method::ExactRoot,
        objective_value: best.1,
        fallback: false,
    })
}

pub fn beta_star_delay(upsilon: f64, p: &SystemParams) -> Result<BackoffSolution> {
    beta_star(upsilon, &LinkModel::with_regime(p, Regime::DelayOnly)?)
}

pub fn beta_star_interference(upsilon: f64, p: &SystemParams) -> Result<BackoffSolution> {
    if !(p.density > 0.0) {
        return domain("the interference backoff needs a positive femtocell density");
    }
    beta_star(upsilon, &LinkModel::with_regime(p, Regime::Interference)?)
}

/// Exhaustive grid scan refined by golden-section search.
pub fn beta_star_grid(
    upsilon: f64,
    model: &LinkModel,
    grid_points: usize,
) -> Result<BackoffSolution> {
    if grid_points < 100 {
        return domain(format!(
            "grid oracle needs at least 100 points, got {grid_points}"
        ));
    }
    if !(upsilon > 0.0) {
        return domain(format!("upsilon must be positive, got {upsilon}"));
    }
    let step = 1.0 / (grid_points - 1) as f64;
    let (mut idx, mut val) = (0, f64::NEG_INFINITY);
    for i in 0..grid_points {
        let v = model.objective(i as f64 * step, upsilon);
        if v > val {
            idx = i;
            val = v;
        }
    }
    let lo = (idx as f64 - 1.0).max(0.0) * step;
    let hi = ((idx + 1) as f64 * step).min(1.0);
    let (beta, value) = golden_section_max(|b| model.objective(b, upsilon), lo, hi, GOLDEN_WIDTH);
    Ok(BackoffSolution {
        beta_star: beta,
        method: Method::GridOracle,
        objective_value: value,
        fallback: false,
    })
}

pub fn beta_star_grid_oracle(
    upsilon: f64,
    p: &SystemParams,
    interference: bool,
    grid_points: usize,
) -> Result<BackoffSolution> {
    beta_star_grid(
        upsilon,
        &LinkModel::with_regime(p, regime_of(interference))?,
        grid_points,
    )
}

fn flagged_oracle(upsilon: f64, model: &LinkModel) -> Result<BackoffSolution> {
    let mut s = beta_star_grid(upsilon, model, DEFAULT_GRID_POINTS)?;
    s.fallback = true;
    Ok(s)
}

/// x / ((1 + x) ln(1 + x)), the elasticity of ln(1 + x); tends to 1 at 0.
fn rate_elasticity(x: f64) -> f64 {
    if x < 1e-8 {
        return 1.0 - 0.5 * x;
    }
    x / ((1.0 + x) * x.ln_1p())
}

/// Polynomial approximation for the delay-only case.
///
/// With kappa2 replaced by kappa1 the success probability becomes
/// e^-t p(t), t = beta Y Q / kappa1, p(t) = 1 - c1 sum_{j>=1} w_j t^j / j!.
/// Stationarity then reads r p(t) + t p'(t) - t p(t) = 0, a polynomial of
/// degree n_b - 1 in t, with the rate elasticity r frozen at beta = 1.
pub fn beta_star_delay_poly(upsilon: f64, p: &SystemParams) -> Result<BackoffSolution> {
    if !(upsilon > 0.0) {
        return domain(format!("upsilon must be positive, got {upsilon}"));
    }
    let model = LinkModel::with_regime(p, Regime::DelayOnly)?;
    let k = &model.k;
    let n = k.n_b - 1;
    let r = rate_elasticity(upsilon);

    let mut pc = vec![0.0; n];
    pc[0] = 1.0;
    let mut fact = 1.0;
    for (j, c) in pc.iter_mut().enumerate().skip(1) {
        fact *= j as f64;
        let w: f64 = (j..n).map(|i| k.delta.powi(i as i32)).sum();
        *c = -k.c1 * w / fact;
    }
    let coeffs: Vec<f64> = (0..=n)
        .map(|j| {
            let pj = pc.get(j).copied().unwrap_or(0.0);
            let prev = if j == 0 { 0.0 } else { pc[j - 1] };
            r * pj + j as f64 * pj - prev
        })
        .collect();

    let to_beta = k.kappa1 / (upsilon * k.q_noise);
    let betas: Vec<f64> = Polynomial::new(coeffs)
        .real_roots()?
        .into_iter()
        .filter(|&t| t > 0.0)
        .map(|t| t * to_beta)
        .collect();

    let beta = if let Some(b) = betas.iter().copied().filter(|&b| b <= 1.0).reduce(f64::max) {
        b
    } else if !betas.is_empty() {
        1.0
    } else {
        return flagged_oracle(upsilon, &model);
    };
    Ok(BackoffSolution {
        beta_star: beta,
        method: Method::PolynomialApprox,
        objective_value: model.objective(beta, upsilon),
        fallback: false,
    })
}

/// Quadratic approximation for the interference case, solved in
/// omega1(beta Y) and mapped back to beta.
pub fn beta_star_interference_quadratic(upsilon: f64, p: &SystemParams) -> Result<BackoffSolution> {
    if !(upsilon > 0.0) || !(p.density > 0.0) {
        return domain("needs upsilon > 0 and a positive femtocell density");
    }
    let model = LinkModel::with_regime(p, Regime::Interference)?;
    let k = &model.k;
    let a = k.a1 * k.delta_f;
    let b = k.delta_f * (k.c2 - k.a1 * (1.0 + LN_2) + k.a2);
    let c = -(k.a2 + k.c2) / LN_2;
    let omegas: Vec<f64> = if a == 0.0 {
        vec![-c / b]
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            vec![]
        } else {
            let s = disc.sqrt();
            vec![(-b + s) / (2.0 * a), (-b - s) / (2.0 * a)]
        }
    };
    let scale = p.density * k.c_f;
    let best = omegas
        .into_iter()
        .filter(|&w| w > 0.0)
        .map(|w| (w / scale).powf(1.0 / k.delta_f) * k.kappa1 / (upsilon * k.q_d))
        .filter(|&beta| (0.0..=1.0).contains(&beta))
        .map(|beta| (beta, model.objective(beta, upsilon)))
        .fold(None, |acc: Option<(f64, f64)>, cand| match acc {
            Some(a) if a.1 >= cand.1 => Some(a),
            _ => Some(cand),
        });
    match best {
        Some((beta, value)) => Ok(BackoffSolution {
            beta_star: beta,
            method: Method::QuadraticApprox,
            objective_value: value,
            fallback: false,
        }),
        None => flagged_oracle(upsilon, &model),
    }
}

/// beta*(Y) averaged over the transmitter's SIR estimate Y = rho_bar * u,
/// u distributed as the effective power without delay.
pub fn average_beta_star(p: &SystemParams, regime: Regime, rel_tol: f64) -> Result<f64> {
    let model = LinkModel::with_regime(p, regime)?;
    let k1 = model.k.with_eta(1.0);
    let rho_bar = match regime {
        Regime::DelayOnly => 1.0 / model.k.q_noise,
        Regime::Interference => rho_bar_analytic(p, &model.k),
    };
    let upper = effective_power_quantile(1.0 - QUADRATURE_TAIL, &k1)?;
    let mut failure: Option<Error> = None;
    let opts = QuadOptions {
        rel_tol,
        abs_tol: 1e-14,
        max_depth: 50,
    };
    let value = integrate_with(
        |u| {
            let w = effective_power_pdf(u, &k1).unwrap_or(0.0);
            if w == 0.0 || u == 0.0 {
                return w;
            }
            match beta_star(rho_bar * u, &model) {
                Ok(s) => s.beta_star * w,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        0.0,
        upper,
        opts,
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(value / (1.0 - QUADRATURE_TAIL)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::kmh_to_mps;
    use crate::params::{db_to_linear, default_params};

    fn delay_params(snr_db: f64) -> SystemParams {
        let mut p = default_params();
        p.n_b = 2;
        p.n_f = 2;
        p.bits = 3;
        p.density = 0.0;
        p.with_distance(p.distance_for_snr_db(snr_db))
    }

    fn interference_params(snr_db: f64) -> SystemParams {
        let p = default_params();
        p.with_distance(p.distance_for_snr_db(snr_db))
    }

    const SNR_GRID: [f64; 5] = [-5.0, 0.0, 5.0, 10.0, 15.0];

    #[test]
    fn objective_basics() {
        let p = delay_params(5.0);
        assert_eq!(objective(0.0, 3.0, &p, false).unwrap(), 0.0);
        assert!(objective(1.2, 3.0, &p, false).is_err());
        assert!(objective(0.5, 0.0, &p, false).is_err());
        for i in 0..1000 {
            let b = i as f64 / 1000.0 * (1.0 - 1e-6);
            let step = (objective(b + 1e-6, 3.0, &p, false).unwrap()
                - objective(b, 3.0, &p, false).unwrap())
            .abs();
            assert!(step <= 1e-4);
        }
    }

    #[test]
    fn analytic_derivative_matches_finite_differences() {
        for (p, interference) in [(delay_params(0.0), false), (interference_params(5.0), true)] {
            let model = LinkModel::with_regime(&p, regime_of(interference)).unwrap();
            let ups = db_to_linear(5.0);
            for i in 1..50 {
                let b = i as f64 / 50.0;
                let h = 1e-6;
                let fd = (model.objective(b + h, ups) - model.objective(b - h, ups)) / (2.0 * h);
                let an = model.objective_derivative(b, ups);
                assert!(
                    (fd - an).abs() <= 1e-5 * an.abs().max(1e-3),
                    "beta {b}: {fd} vs {an}"
                );
            }
        }
    }

    #[test]
    fn exact_matches_grid_oracle_on_both_configurations() {
        let ups = db_to_linear(5.0);
        for snr in SNR_GRID {
            for (p, interference) in [(delay_params(snr), false), (interference_params(snr), true)]
            {
                let exact = if interference {
                    beta_star_interference(ups, &p).unwrap()
                } else {
                    beta_star_delay(ups, &p).unwrap()
                };
                let oracle = beta_star_grid_oracle(ups, &p, interference, 1000).unwrap();
                assert!(
                    (exact.beta_star - oracle.beta_star).abs() <= 1e-3,
                    "snr {snr}"
                );
                assert!(exact.objective_value >= oracle.objective_value - 1e-9);
                let at_one = objective(1.0, ups, &p, interference).unwrap();
                assert!(exact.objective_value >= at_one - 1e-9);
            }
        }
    }

    #[test]
    fn interior_optimum_is_stationary() {
        let p = delay_params(-5.0);
        let ups = db_to_linear(5.0);
        let s = beta_star_delay(ups, &p).unwrap();
        assert!(s.beta_star < 1.0);
        assert!(
            objective_derivative(s.beta_star, ups, &p, false)
                .unwrap()
                .abs()
                <= 1e-8
        );
    }

    #[test]
    fn optimum_beats_every_grid_point() {
        let p = interference_params(0.0);
        let ups = db_to_linear(5.0);
        let s = beta_star_interference(ups, &p).unwrap();
        for i in 0..=200 {
            assert!(
                s.objective_value >= objective(i as f64 / 200.0, ups, &p, true).unwrap() - 1e-12
            );
        }
    }

    #[test]
    fn objective_is_unimodal_on_grid() {
        for snr in SNR_GRID {
            for (p, interference) in [(delay_params(snr), false), (interference_params(snr), true)]
            {
                let vals: Vec<f64> = (0..=500)
                    .map(|i| {
                        objective(i as f64 / 500.0, db_to_linear(5.0), &p, interference).unwrap()
                    })
                    .collect();
                let signs: Vec<bool> = vals.windows(2).map(|w| w[1] >= w[0]).collect();
                let changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
                assert!(changes <= 1, "snr {snr} interference {interference}");
            }
        }
    }

    #[test]
    fn polynomial_is_a_lower_bound_for_two_antennas() {
        let ups = db_to_linear(5.0);
        for snr in SNR_GRID {
            let p = delay_params(snr);
            let poly = beta_star_delay_poly(ups, &p).unwrap();
            let exact = beta_star_delay(ups, &p).unwrap();
            assert!(poly.beta_star <= exact.beta_star + 1e-9, "snr {snr}");
            assert!(!poly.fallback);
        }
    }

    #[test]
    fn linear_case_closed_form() {
        // n_b = 2: r - t = 0, so beta = r kappa1 / (Y Q).
        let p = delay_params(-5.0);
        let ups = 2.0;
        let k = derive_constants(&p).unwrap();
        let want = rate_elasticity(ups) * k.kappa1 / (ups * k.q_noise);
        let got = beta_star_delay_poly(ups, &p).unwrap().beta_star;
        assert!((got - want.min(1.0)).abs() < 1e-12);
    }

    #[test]
    fn polynomial_gap_settles_for_two_antennas() {
        // With kappa2 set to kappa1 the dropped term scales like delta^(2 - n_b),
        // so only n_b = 2 has a gap that stays bounded as bits grow.
        let ups = db_to_linear(5.0);
        for snr in [-5.0, 0.0, 5.0, 10.0, 15.0] {
            let gaps: Vec<f64> = [3, 5, 8, 12]
                .iter()
                .map(|&bits| {
                    let mut p = delay_params(snr);
                    p.bits = bits;
                    (beta_star_delay_poly(ups, &p).unwrap().beta_star
                        - beta_star_delay(ups, &p).unwrap().beta_star)
                        .abs()
                })
                .collect();
            assert!(gaps.iter().all(|&g| g < 0.5), "snr {snr}: {gaps:?}");
            assert!((gaps[3] - gaps[2]).abs() < 1e-3, "snr {snr}: {gaps:?}");
        }
    }

    #[test]
    fn delay_backoff_decreases_with_velocity() {
        let ups = db_to_linear(5.0);
        let mut prev = f64::INFINITY;
        for kmh in [20.0, 30.0, 40.0, 50.0, 60.0] {
            let mut p = delay_params(-5.0);
            p.mobility.velocity = kmh_to_mps(kmh);
            let b = beta_star_delay(ups, &p).unwrap().beta_star;
            assert!(b <= prev + 1e-12, "{kmh} km/h");
            prev = b;
        }
    }

    #[test]
    fn interference_backoff_decreases_with_density() {
        let ups = db_to_linear(5.0);
        let mut prev = f64::INFINITY;
        for i in 1..20 {
            let mut p = interference_params(5.0);
            p.density = i as f64 * 1e-5;
            let b = beta_star_interference(ups, &p).unwrap().beta_star;
            assert!(b <= prev + 1e-12);
            prev = b;
        }
    }

    #[test]
    fn interference_free_limit() {
        // Without femtocells and without noise nothing limits the rate.
        let ups = db_to_linear(5.0);
        let mut p = interference_params(5.0);
        p.density = 1e-14;
        let thin = beta_star_interference(ups, &p).unwrap().beta_star;
        let mut quiet = delay_params(80.0);
        quiet.noise_power *= 1e-12;
        let delay = beta_star_delay(ups, &quiet).unwrap().beta_star;
        assert!((thin - 1.0).abs() < 1e-3 && (delay - 1.0).abs() < 1e-3);
        assert!((thin - delay).abs() < 1e-3);
    }

    #[test]
    fn quadratic_approximation_is_admissible() {
        let ups = db_to_linear(5.0);
        for snr in SNR_GRID {
            let s = beta_star_interference_quadratic(ups, &interference_params(snr)).unwrap();
            assert!((0.0..=1.0).contains(&s.beta_star));
            if !s.fallback {
                assert_eq!(s.method, Method::QuadraticApprox);
            }
        }
    }

    #[test]
    fn grid_oracle_rejects_coarse_grids() {
        assert!(beta_star_grid_oracle(1.0, &delay_params(0.0), false, 50).is_err());
    }
}
