//! Closed forms: effective-power CDF, success probability under Poisson
//! shot-noise interference, its Laplace transform, the maximum femtocell
//! density and the analytic average goodput.

use crate::backoff::{beta_star, LinkModel};
use crate::channel::correlation_coefficient;
use crate::codebook::gersho_delta;
use crate::error::{domain, Error, Result};
use crate::geometry::{campbell_mean_interference, pathloss_ratio};
use crate::mathkit::{
    find_root_bracketed, gamma_fn, integrate_with, lambert_w, lambert_w0_of_exp, Branch,
    QuadOptions,
};
use crate::params::SystemParams;
use serde::{Deserialize, Serialize};
use std::f64::consts::{LN_2, PI};

/// Scale convention for kappa1 and kappa2: kappa = 2 eta^2 (...) * s.
/// s = 1/2 matches unit total complex variance; fitted against Monte Carlo
/// (KS about 0.04 at s = 1/2 against about 0.5 at s = 1).
pub const CDF_SCALE: f64 = 0.5;

/// Default upper limit returned by [`max_density`] when the outage
/// constraint never binds, per m^2.
pub const DENSITY_CAP: f64 = 1.0;

/// omega1 above this is outside the first-order expansion.
pub const EXPANSION_LIMIT: f64 = 1.0;

/// Tail mass dropped by the goodput integrals.
pub const QUADRATURE_TAIL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    pub n_b: usize,
    pub eta: f64,
    pub delta: f64,
    pub delta_f: f64,
    /// Femtocell-to-macro pathloss ratio at the user.
    pub q_d: f64,
    /// Noise-to-signal ratio at the user, used without interference.
    pub q_noise: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub c1: f64,
    pub c2: f64,
    pub a1: f64,
    pub a2: f64,
    pub c_f: f64,
}

impl DerivedConstants {
    fn terms(&self) -> usize {
        self.n_b - 1
    }

    /// Same constants with a different temporal correlation.
    pub fn with_eta(&self, eta: f64) -> Self {
        let mut k = *self;
        k.eta = eta;
        k.kappa1 = 2.0 * eta * eta * (1.0 - self.delta) * CDF_SCALE;
        k.kappa2 = 2.0 * eta * eta * CDF_SCALE;
        k
    }

    /// w_j = sum_{i=j}^{n-1} delta^i for j = 0..n.
    fn tail_weights(&self) -> Vec<f64> {
        let n = self.terms();
        let mut w = vec![0.0; n + 1];
        for j in (0..n).rev() {
            w[j] = w[j + 1] + self.delta.powi(j as i32);
        }
        w
    }
}

/// Shot-noise constant (2 pi / alpha) Gamma(2/alpha) Gamma(1 - 2/alpha).
pub fn shot_noise_constant(alpha_f: f64) -> Result<f64> {
    let df = 2.0 / alpha_f;
    Ok(2.0 * PI / alpha_f * gamma_fn(df)? * gamma_fn(1.0 - df)?)
}

pub fn derive_constants(p: &SystemParams) -> Result<DerivedConstants> {
    p.validate()?;
    let eta = correlation_coefficient(&p.mobility)?;
    let delta = gersho_delta(p.n_b, p.bits)?;
    if delta >= 1.0 {
        return domain("delta = 1 leaves no quantization gain");
    }
    let n = p.n_b - 1;
    let delta_f = 2.0 / p.pathloss.alpha_f;
    let c2 = delta.powi(-(n as i32));
    let c1 = (1.0 - delta) * c2;
    let a2 = -c1 * (0..n).map(|i| delta.powi(i as i32)).sum::<f64>();

    // Inner sum over j = i - l of (-1)^j / j! * prod_{m<j} (delta_f - m).
    let mut a1 = 0.0;
    for i in 1..n {
        let mut inner = 0.0;
        let mut falling = 1.0;
        let mut fact = 1.0;
        for j in 1..=i {
            falling *= delta_f - (j - 1) as f64;
            fact *= j as f64;
            inner += if j % 2 == 0 { 1.0 } else { -1.0 } * falling / fact;
        }
        a1 += delta.powi(i as i32) * inner;
    }
    a1 *= c1;

    if (a2 + c2 - 1.0).abs() > 64.0 * f64::EPSILON * c2 {
        return Err(Error::Numeric(format!(
            "A2 + c2 = {} instead of 1",
            a2 + c2
        )));
    }

    Ok(DerivedConstants {
        n_b: p.n_b,
        eta,
        delta,
        delta_f,
        q_d: pathloss_ratio(p.user_distance, &p.pathloss)?,
        q_noise: p.noise_pathloss_ratio(),
        kappa1: 2.0 * eta * eta * (1.0 - delta) * CDF_SCALE,
        kappa2: 2.0 * eta * eta * CDF_SCALE,
        c1,
        c2,
        a1,
        a2,
        c_f: shot_noise_constant(p.pathloss.alpha_f)?,
    })
}

fn check_z(z: f64) -> Result<()> {
    if !(z >= 0.0) {
        return domain(format!("effective power argument must be >= 0, got {z}"));
    }
    Ok(())
}

/// sum_{j=1}^{n-1} w_j t^j / j!
fn weighted_poly_tail(w: &[f64], t: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for (j, wj) in w.iter().enumerate().take(w.len() - 1).skip(1) {
        term *= t / j as f64;
        sum += wj * term;
    }
    sum
}

/// CDF of the delayed, quantized effective channel power.
pub fn effective_power_cdf(z: f64, k: &DerivedConstants) -> Result<f64> {
    check_z(z)?;
    if k.kappa2 == 0.0 {
        return Ok(1.0);
    }
    let w = k.tail_weights();
    let t = z / k.kappa1;
    // 1 - c2 + c1 w0 = 0 is factored out so that F(0) is exactly 0.
    let f = -k.c2 * (-z / k.kappa2).exp_m1()
        + k.c1 * w[0] * (-t).exp_m1()
        + k.c1 * (-t).exp() * weighted_poly_tail(&w, t);
    Ok(f.clamp(0.0, 1.0))
}

/// 1 - F_Z(z), evaluated directly in the tail.
pub fn ccdf_no_interference(z: f64, k: &DerivedConstants) -> Result<f64> {
    let f = effective_power_cdf(z, k)?;
    if f < 0.5 || k.kappa2 == 0.0 {
        return Ok(1.0 - f);
    }
    let w = k.tail_weights();
    let t = z / k.kappa1;
    let s = k.c2 * (-z / k.kappa2).exp() - k.c1 * (-t).exp() * (w[0] + weighted_poly_tail(&w, t));
    Ok(s.clamp(0.0, 1.0))
}

/// Density of the effective channel power.
pub fn effective_power_pdf(z: f64, k: &DerivedConstants) -> Result<f64> {
    check_z(z)?;
    let t = z / k.kappa1;
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 1..k.terms() {
        term *= k.delta * t / j as f64;
        sum += term;
    }
    let f = k.c2 / k.kappa2 * (-z / k.kappa2).exp() - k.c1 / k.kappa1 * (-t).exp() * sum;
    Ok(f.max(0.0))
}

/// Quantile of the effective power, by bracketing on the CDF.
pub fn effective_power_quantile(prob: f64, k: &DerivedConstants) -> Result<f64> {
    if !(0.0..1.0).contains(&prob) {
        return domain(format!("quantile level must be in [0, 1), got {prob}"));
    }
    let mut hi = k.kappa2.max(1e-300);
    while effective_power_cdf(hi, k)? < prob {
        hi *= 2.0;
    }
    find_root_bracketed(|z| effective_power_cdf(z, k).unwrap() - prob, 0.0, hi)
}

/// E[exp(-theta I)] for shot noise over the whole plane.
pub fn laplace_interference(theta: f64, density: f64, alpha_f: f64) -> Result<f64> {
    if !(theta >= 0.0) {
        return domain(format!("theta must be >= 0, got {theta}"));
    }
    Ok((-density * shot_noise_constant(alpha_f)? * theta.powf(2.0 / alpha_f)).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuccessEvaluation {
    pub probability: f64,
    pub omega1: f64,
    pub omega2: f64,
    /// False when omega1 exceeds [`EXPANSION_LIMIT`] and the dropped
    /// second-order terms may matter.
    pub within_expansion: bool,
}

/// omega_k = lambda C_f (theta / kappa_k)^delta_f for theta = upsilon * Q_D.
pub fn omegas(upsilon: f64, k: &DerivedConstants, density: f64) -> (f64, f64) {
    let theta = upsilon * k.q_d;
    let scale = density * k.c_f;
    (
        scale * (theta / k.kappa1).powf(k.delta_f),
        scale * (theta / k.kappa2).powf(k.delta_f),
    )
}

pub fn success_from_constants(
    upsilon: f64,
    k: &DerivedConstants,
    density: f64,
) -> SuccessEvaluation {
    let (w1, w2) = omegas(upsilon, k, density);
    let p = if w1 < 1.0 {
        // Uses A2 + c2 = 1, exact at omega = 0 and free of cancellation nearby.
        1.0 + k.a2 * (-w1).exp_m1() + k.c2 * (-w2).exp_m1() + k.a1 * w1 * (-w1).exp()
    } else {
        (k.a1 * w1 + k.a2) * (-w1).exp() + k.c2 * (-w2).exp()
    };
    SuccessEvaluation {
        probability: p.clamp(0.0, 1.0),
        omega1: w1,
        omega2: w2,
        within_expansion: w1 <= EXPANSION_LIMIT,
    }
}

pub fn success_probability_detailed(upsilon: f64, p: &SystemParams) -> Result<SuccessEvaluation> {
    if !(upsilon > 0.0) {
        return domain(format!("upsilon must be positive, got {upsilon}"));
    }
    let k = derive_constants(p)?;
    Ok(success_from_constants(upsilon, &k, p.density))
}

/// P[SIR >= upsilon] under delay, quantization and Poisson interference.
pub fn success_probability(upsilon: f64, p: &SystemParams) -> Result<f64> {
    success_probability_detailed(upsilon, p).map(|s| s.probability)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaxDensity {
    /// Largest density meeting the outage constraint, by root solving.
    pub exact: f64,
    /// Lambert-W form under kappa2 = kappa1, when it has a valid branch.
    pub closed_form: Option<f64>,
    /// The constraint still held at the cap.
    pub capped: bool,
}

impl MaxDensity {
    pub fn femtocells(&self, cell_radius: f64) -> f64 {
        self.exact * PI * cell_radius * cell_radius
    }
}

pub fn max_density(epsilon: f64, upsilon: f64, p: &SystemParams) -> Result<MaxDensity> {
    max_density_with_cap(epsilon, upsilon, p, DENSITY_CAP)
}

pub fn max_density_with_cap(
    epsilon: f64,
    upsilon: f64,
    p: &SystemParams,
    cap: f64,
) -> Result<MaxDensity> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return domain(format!("epsilon must be in (0, 1), got {epsilon}"));
    }
    if !(upsilon > 0.0) || !(cap > 0.0) {
        return domain("upsilon and the density cap must be positive");
    }
    let k = derive_constants(p)?;
    let target = 1.0 - epsilon;
    let slack = |density: f64| success_from_constants(upsilon, &k, density).probability - target;
    if slack(0.0) < 0.0 {
        return Err(Error::Infeasible(format!(
            "outage target {epsilon} unreachable even without femtocells"
        )));
    }

    // Density at which omega1 = 1 sets the scan scale; the first crossing
    // is bracketed by a geometric scan.
    let unit = 1.0 / (k.c_f * (upsilon * k.q_d / k.kappa1).powf(k.delta_f));
    let mut lo = 0.0;
    let mut hi = (unit * 1e-9).min(cap);
    loop {
        if slack(hi) < 0.0 {
            break;
        }
        if hi >= cap {
            return Ok(MaxDensity {
                exact: cap,
                closed_form: closed_form(epsilon, upsilon, &k, unit),
                capped: true,
            });
        }
        lo = hi;
        hi = (hi * 1.25).min(cap);
    }
    // Bisection keeps the feasible end, so the returned density always
    // satisfies the constraint.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if slack(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(MaxDensity {
        exact: lo,
        closed_form: closed_form(epsilon, upsilon, &k, unit),
        capped: false,
    })
}

/// Lambert-W inversion of the kappa2 = kappa1 approximation
/// (A1 w + A2 + c2) e^-w = 1 - eps.
fn closed_form(epsilon: f64, upsilon: f64, k: &DerivedConstants, unit: f64) -> Option<f64> {
    let target = 1.0 - epsilon;
    let lead = k.a2 + k.c2;
    let omega = if k.a1 == 0.0 {
        (lead / target).ln()
    } else if k.a1 < 0.0 {
        // The argument -(1-eps) / (A1 e^{lead/A1}) is positive here, so only
        // the principal branch exists; work with its logarithm.
        let log_x = target.ln() - (-k.a1).ln() - lead / k.a1;
        let w = lambert_w0_of_exp(log_x).ok()?;
        -w - lead / k.a1
    } else {
        let x = -target / (k.a1 * (lead / k.a1).exp());
        [Branch::Principal, Branch::Lower]
            .iter()
            .filter_map(|&b| lambert_w(x, b).ok())
            .map(|w| -w - lead / k.a1)
            .filter(|&o| o >= 0.0)
            .fold(None, |best: Option<f64>, o| {
                Some(best.map_or(o, |b| b.max(o)))
            })?
    };
    let density = omega * unit;
    if !(density >= 0.0) || !density.is_finite() {
        return None;
    }
    // Discard a root that violates the constraint under the full expression.
    if success_from_constants(upsilon, k, density).probability < target - 1e-9 {
        return None;
    }
    Some(density)
}

/// How the transmitter scales its rate in the analytic goodput.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Backoff {
    None,
    Fixed(f64),
    /// Per-state optimum beta*(upsilon).
    Optimal,
}

/// Long-term average SIR known at the transmitter: 1 / (Q_D E[I]) with the
/// Campbell mean, or the noise-referenced SNR without femtocells.
pub fn rho_bar_analytic(p: &SystemParams, k: &DerivedConstants) -> f64 {
    if p.density == 0.0 {
        return 1.0 / k.q_noise;
    }
    let pl = &p.pathloss;
    1.0 / (k.q_d * campbell_mean_interference(p.density, p.cell_radius, pl.d_min, pl.alpha_f, 1.0))
}

fn goodput_integral<F: Fn(f64) -> Result<f64>>(p: &SystemParams, integrand: F) -> Result<f64> {
    let k = derive_constants(p)?;
    let k1 = k.with_eta(1.0);
    let rho_bar = rho_bar_analytic(p, &k);
    let upper = effective_power_quantile(1.0 - QUADRATURE_TAIL, &k1)?;
    let mut failure = None;
    let opts = QuadOptions {
        rel_tol: 1e-6,
        abs_tol: 1e-12,
        max_depth: 40,
    };
    let value = integrate_with(
        |u| {
            let weight = effective_power_pdf(u, &k1).unwrap_or(0.0);
            if weight == 0.0 {
                return 0.0;
            }
            match integrand(rho_bar * u) {
                Ok(v) => v * weight,
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
        None => Ok(value),
    }
}

/// Average goodput E[log2(1 + beta Y) P(SIR >= beta Y)] over the
/// transmitter's SIR estimate Y. Without femtocells the success probability
/// is the effective-power CCDF against the noise floor.
pub fn avg_goodput_analytic(p: &SystemParams, backoff: Backoff) -> Result<f64> {
    let model = LinkModel::new(p)?;
    if let Backoff::Fixed(b) = backoff {
        if !(0.0..=1.0).contains(&b) {
            return domain(format!("backoff factor must lie in [0, 1], got {b}"));
        }
    }
    goodput_integral(p, |y| {
        let beta = match backoff {
            Backoff::None => 1.0,
            Backoff::Fixed(b) => b,
            Backoff::Optimal => beta_star(y, &model)?.beta_star,
        };
        Ok(model.objective(beta, y))
    })
}

/// Average transmitted rate E[log2(1 + Y)], the goodput with the success
/// indicator forced to one.
pub fn avg_rate_analytic(p: &SystemParams) -> Result<f64> {
    goodput_integral(p, |y| Ok((1.0 + y).ln() / LN_2))
}
