//! Acceptance checks shared by `validate_all` and the acceptance test.
//!
//! Each check returns its raw per-point metrics in a [`Table`] together with
//! the verdict, so callers can re-judge the numbers independently.

use crate::analytics::{
    derive_constants, effective_power_cdf, laplace_interference, max_density, success_probability,
};
use crate::backoff::{
    average_beta_star, beta_star_delay, beta_star_delay_poly, beta_star_grid_oracle,
    beta_star_interference, beta_star_interference_quadratic, Regime, DEFAULT_GRID_POINTS,
};
use crate::channel::kmh_to_mps;
use crate::error::Result;
use crate::experiment::Table;
use crate::geometry::sample_interference;
use crate::params::{db_to_linear, default_params, SystemParams};
use crate::simulator::{
    chunked_sum, deployed_codebook, estimate_goodput, estimate_outage, ks_distance,
    mean_interference_mc, sample_effective_powers, trial_rng, worker_pool, Feedback, GoodputMode,
    Setup,
};
use rand::Rng;
use serde::{Deserialize, Serialize};

pub const KS_LIMIT: f64 = 0.03;
pub const OUTAGE_LIMIT: f64 = 0.05;
pub const LAPLACE_REL_LIMIT: f64 = 0.05;
pub const DENSITY_SLACK_LIMIT: f64 = 1e-6;
pub const CLOSED_FORM_REL_LIMIT: f64 = 0.10;
pub const ORACLE_LIMIT: f64 = 1e-3;
pub const GAP_TARGET_DB: f64 = 5.0;
pub const GAP_TOL_DB: f64 = 1.5;
pub const MONOTONE_TOL: f64 = 1e-6;

/// Velocities of the CDF check, km/h.
pub const CDF_VELOCITIES: [f64; 5] = [10.0, 20.0, 30.0, 40.0, 50.0];
/// SNR grid of the backoff comparison, dB.
pub const BACKOFF_SNR_DB: [f64; 5] = [-5.0, 0.0, 5.0, 10.0, 15.0];
/// SNR grid of the goodput figures, dB.
pub const GOODPUT_SNR_DB: [f64; 8] = [-5.0, 0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0];
pub const SURFACE_VELOCITIES: [f64; 5] = [20.0, 30.0, 40.0, 50.0, 60.0];
/// Bit counts giving delta from about 0.25 to 0.79 with four antennas.
pub const SURFACE_BITS: [u32; 5] = [6, 4, 3, 2, 1];
pub const SURFACE_SNR_DB: f64 = 10.0;
pub const LAPLACE_DENSITY: f64 = 0.01;
pub const LAPLACE_THETAS: [f64; 3] = [0.1, 1.0, 10.0];
pub const LAPLACE_ALPHAS: [f64; 3] = [3.0, 3.8, 4.0];
pub const DENSITY_EPSILONS: [f64; 3] = [0.05, 0.1, 0.2];
pub const DENSITY_BITS: [u32; 4] = [5, 8, 10, 12];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationOptions {
    pub seed: u64,
    /// Monte Carlo trials per sweep point.
    pub trials: u64,
    /// Field draws per exponent in the Laplace check.
    pub laplace_draws: u64,
    /// Random parameter sets in the interference-free identity.
    pub parameter_sets: usize,
}

impl ValidationOptions {
    pub fn full(seed: u64) -> Self {
        Self {
            seed,
            trials: 100_000,
            laplace_draws: 20_000,
            parameter_sets: 100,
        }
    }

    pub fn with_trials(seed: u64, trials: u64) -> Self {
        Self {
            trials,
            laplace_draws: (trials / 5).clamp(100, 20_000),
            ..Self::full(seed)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    /// Worst-case value of the checked quantity.
    pub metric: f64,
    pub threshold: f64,
    pub detail: String,
    #[serde(skip)]
    pub table: Table,
}

fn report(
    id: u8,
    name: &str,
    passed: bool,
    metric: f64,
    threshold: f64,
    detail: String,
    table: Table,
) -> CriterionReport {
    CriterionReport {
        id,
        name: name.into(),
        passed,
        metric,
        threshold,
        detail,
        table,
    }
}

/// Four antennas, five bits, 95 femtocells per cell.
pub fn interference_config() -> SystemParams {
    default_params()
}

/// Two antennas, three bits, no femtocells.
pub fn delay_config() -> SystemParams {
    let mut p = default_params();
    p.n_b = 2;
    p.n_f = 2;
    p.bits = 3;
    p.density = 0.0;
    p
}

/// Success probability is exactly one without femtocells.
pub fn no_interference_identity(opts: &ValidationOptions) -> Result<CriterionReport> {
    let mut rng = trial_rng(opts.seed, 1, 0);
    let mut table = Table::new(
        "c1_no_interference",
        &[
            "set",
            "n_b",
            "bits",
            "velocity_kmh",
            "distance_m",
            "upsilon_db",
            "success_probability",
        ],
    );
    let mut misses = 0;
    for set in 0..opts.parameter_sets {
        let mut p = default_params();
        p.n_b = rng.random_range(2..=8);
        p.n_f = p.n_b;
        p.bits = rng.random_range(1..=12);
        let v = rng.random_range(0.0..150.0);
        p.mobility.velocity = kmh_to_mps(v);
        p.mobility.delay_frames = rng.random_range(0..=5);
        p.pathloss.alpha_f = rng.random_range(2.2..5.0);
        p.user_distance = rng.random_range(1.0..1000.0);
        p.density = 0.0;
        let ups_db = rng.random_range(-20.0..20.0);
        let prob = success_probability(db_to_linear(ups_db), &p)?;
        if prob != 1.0 {
            misses += 1;
        }
        table.push(vec![
            set as f64,
            p.n_b as f64,
            p.bits as f64,
            v,
            p.user_distance,
            ups_db,
            prob,
        ]);
    }
    Ok(report(
        1,
        "no-interference identity",
        misses == 0,
        misses as f64,
        0.0,
        format!("{misses} of {} sets differ from 1.0", opts.parameter_sets),
        table,
    ))
}

/// Effective-power CDF against eta^2 |h[n-d]^H f|^2 with fresh random codebooks.
pub fn effective_power_cdf_check(opts: &ValidationOptions) -> Result<CriterionReport> {
    let mut table = Table::new(
        "c2_cdf_ks",
        &["velocity_kmh", "eta", "ks_distance", "aged_ks_distance"],
    );
    let mut worst = 0.0_f64;
    for (i, &v) in CDF_VELOCITIES.iter().enumerate() {
        let mut p = default_params();
        p.bits = 6;
        p.density = 0.0;
        p.mobility.velocity = kmh_to_mps(v);
        let setup = Setup::with_mean_interference(&p, 0.0)?;
        let k = derive_constants(&p)?;
        let pairs = sample_effective_powers(
            &setup,
            Feedback::FreshRvq,
            opts.trials,
            opts.seed,
            200 + i as u64,
        )?;
        let (approx, aged): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let cdf = |z: f64| effective_power_cdf(z, &k).unwrap_or(f64::NAN);
        let ks = ks_distance(&approx, cdf);
        let ks_aged = ks_distance(&aged, cdf);
        worst = worst.max(ks);
        table.push(vec![v, setup.eta, ks, ks_aged]);
    }
    Ok(report(
        2,
        "effective-power CDF",
        worst <= KS_LIMIT,
        worst,
        KS_LIMIT,
        format!("max KS {worst:.4}"),
        table,
    ))
}

/// User distances of the outage sweep: ten log-spaced points over 5..200 m.
pub fn outage_distances() -> Vec<f64> {
    (0..10).map(|i| 5.0 * 40f64.powf(i as f64 / 9.0)).collect()
}

/// Monte Carlo outage against the analytic success probability.
pub fn outage_check(opts: &ValidationOptions) -> Result<CriterionReport> {
    let base = interference_config();
    let ups = base.sir_threshold;
    let mut table = Table::new(
        "c3_outage",
        &[
            "distance_m",
            "snr_db",
            "outage_empirical",
            "outage_half_width",
            "outage_analytic",
            "abs_error",
            "omega1",
        ],
    );
    let mut worst = 0.0_f64;
    for (i, d) in outage_distances().into_iter().enumerate() {
        let p = base.with_distance(d);
        // Outage only involves the received SIR, so rho_bar is irrelevant here.
        let setup = Setup::with_mean_interference(&p, 1.0)?;
        let est = estimate_outage(
            &setup,
            Feedback::FreshRvq,
            ups,
            opts.trials,
            opts.seed,
            300 + i as u64,
        )?;
        let s = crate::analytics::success_probability_detailed(ups, &p)?;
        let err = (1.0 - s.probability - est.outage).abs();
        worst = worst.max(err);
        table.push(vec![
            d,
            p.snr_db_at(d),
            est.outage,
            est.half_width,
            1.0 - s.probability,
            err,
            s.omega1,
        ]);
    }
    Ok(report(
        3,
        "outage vs Monte Carlo",
        worst <= OUTAGE_LIMIT,
        worst,
        OUTAGE_LIMIT,
        format!("max |error| {worst:.4}"),
        table,
    ))
}

/// Proxy radius keeping the truncated tail below 2e-3 in the exponent at the
/// largest theta, and at least ten mean spacings.
pub fn laplace_proxy_radius(density: f64, alpha_f: f64, theta_max: f64) -> f64 {
    let tail = 2.0 * std::f64::consts::PI * density * theta_max / ((alpha_f - 2.0) * 2e-3);
    tail.powf(1.0 / (alpha_f - 2.0)).max(10.0 / density.sqrt())
}

/// Empirical Laplace transform of the shot noise against its closed form.
pub fn laplace_check(opts: &ValidationOptions) -> Result<CriterionReport> {
    let d_min = 1e-3;
    let theta_max = LAPLACE_THETAS.iter().copied().fold(0.0, f64::max);
    let mut table = Table::new(
        "c4_laplace",
        &[
            "alpha_f",
            "theta",
            "empirical",
            "analytic",
            "rel_error",
            "proxy_radius_m",
        ],
    );
    let mut worst = 0.0_f64;
    for (ai, &alpha) in LAPLACE_ALPHAS.iter().enumerate() {
        let radius = laplace_proxy_radius(LAPLACE_DENSITY, alpha, theta_max);
        let sums = chunked_sum::<3, _>(opts.laplace_draws, |t| {
            let mut rng = trial_rng(opts.seed, 400 + ai as u64, t);
            let i = sample_interference(LAPLACE_DENSITY, radius, d_min, alpha, &mut rng)
                .unwrap_or(f64::INFINITY);
            LAPLACE_THETAS.map(|th| (-th * i).exp())
        });
        for (j, &theta) in LAPLACE_THETAS.iter().enumerate() {
            let emp = sums[j] / opts.laplace_draws as f64;
            let ana = laplace_interference(theta, LAPLACE_DENSITY, alpha)?;
            let rel = (emp - ana).abs() / ana;
            worst = worst.max(rel);
            table.push(vec![alpha, theta, emp, ana, rel, radius]);
        }
    }
    Ok(report(
        4,
        "Laplace transform",
        worst <= LAPLACE_REL_LIMIT,
        worst,
        LAPLACE_REL_LIMIT,
        format!("max relative error {worst:.4}"),
        table,
    ))
}

/// Density limit plugged back into the success probability, and the
/// closed form against the root.
pub fn density_check(_opts: &ValidationOptions) -> Result<CriterionReport> {
    let base = interference_config();
    let ups = base.sir_threshold;
    let mut table = Table::new(
        "c5_density",
        &[
            "epsilon",
            "bits",
            "density_exact_per_m2",
            "success_at_exact",
            "slack",
            "closed_form_per_m2",
            "closed_form_valid",
            "closed_form_rel_error",
        ],
    );
    let mut worst_slack = 0.0_f64;
    let mut slack_ok = true;
    let mut worst_closed = 0.0_f64;
    for &eps in &DENSITY_EPSILONS {
        for &bits in &DENSITY_BITS {
            let mut p = base;
            p.bits = bits;
            let m = max_density(eps, ups, &p)?;
            p.density = m.exact;
            let prob = success_probability(ups, &p)?;
            let slack = prob - (1.0 - eps);
            slack_ok &= (0.0..=DENSITY_SLACK_LIMIT).contains(&slack);
            worst_slack = worst_slack.max(slack.abs());
            let (cf, valid, rel) = match m.closed_form {
                Some(c) => (c, 1.0, (c - m.exact).abs() / m.exact),
                None => (0.0, 0.0, f64::INFINITY),
            };
            if bits >= 8 {
                worst_closed = worst_closed.max(rel);
            }
            table.push(vec![
                eps,
                bits as f64,
                m.exact,
                prob,
                slack,
                cf,
                valid,
                if rel.is_finite() { rel } else { -1.0 },
            ]);
        }
    }
    let passed = slack_ok && worst_closed <= CLOSED_FORM_REL_LIMIT;
    Ok(report(
        5,
        "density limit",
        passed,
        worst_closed,
        CLOSED_FORM_REL_LIMIT,
        format!("max slack {worst_slack:.2e} (limit {DENSITY_SLACK_LIMIT:.0e}); closed-form max relative error {worst_closed:.3} for bits >= 8"),
        table,
    ))
}

/// Root-solved backoff against the grid oracle, and the polynomial bound.
pub fn backoff_check(_opts: &ValidationOptions) -> Result<CriterionReport> {
    let ups = db_to_linear(5.0);
    let mut table = Table::new(
        "c6_backoff",
        &[
            "interference",
            "snr_db",
            "beta_exact",
            "beta_oracle",
            "abs_diff",
            "beta_approx",
        ],
    );
    let mut worst = 0.0_f64;
    let mut bound_ok = true;
    for (interference, base) in [(false, delay_config()), (true, interference_config())] {
        for &snr in &BACKOFF_SNR_DB {
            let p = base.with_distance(base.distance_for_snr_db(snr));
            let (exact, approx) = if interference {
                (
                    beta_star_interference(ups, &p)?,
                    beta_star_interference_quadratic(ups, &p)?,
                )
            } else {
                (beta_star_delay(ups, &p)?, beta_star_delay_poly(ups, &p)?)
            };
            let oracle = beta_star_grid_oracle(ups, &p, interference, DEFAULT_GRID_POINTS)?;
            let diff = (exact.beta_star - oracle.beta_star).abs();
            worst = worst.max(diff);
            if !interference {
                bound_ok &= approx.beta_star <= exact.beta_star + 1e-9;
            }
            table.push(vec![
                interference as u8 as f64,
                snr,
                exact.beta_star,
                oracle.beta_star,
                diff,
                approx.beta_star,
            ]);
        }
    }
    Ok(report(
        6,
        "backoff vs grid oracle",
        worst <= ORACLE_LIMIT && bound_ok,
        worst,
        ORACLE_LIMIT,
        format!(
            "max |exact - oracle| {worst:.2e}; polynomial lower bound {}",
            if bound_ok { "holds" } else { "violated" }
        ),
        table,
    ))
}

/// Empirical goodput with and without backoff, and the throughput.
pub fn dominance_check(opts: &ValidationOptions) -> Result<CriterionReport> {
    let mut table = Table::new(
        "c7_goodput",
        &[
            "interference",
            "snr_db",
            "goodput_no_backoff_bps_hz",
            "goodput_backoff_bps_hz",
            "throughput_bps_hz",
            "no_backoff_std_err",
            "backoff_std_err",
        ],
    );
    let mut ok = true;
    let mut worst = f64::INFINITY;
    for (ci, base) in [delay_config(), interference_config()]
        .into_iter()
        .enumerate()
    {
        let cb = deployed_codebook(&base, opts.seed)?;
        let mean_i = mean_interference_mc(&base, opts.seed)?;
        for (i, &snr) in GOODPUT_SNR_DB.iter().enumerate() {
            let p = base.with_distance(base.distance_for_snr_db(snr));
            let setup = Setup::with_mean_interference(&p, mean_i)?;
            let stream = 700 + (ci * 100 + i) as u64;
            let run = |m| {
                estimate_goodput(
                    &setup,
                    Feedback::Fixed(&cb),
                    m,
                    opts.trials,
                    opts.seed,
                    stream,
                )
            };
            let none = run(GoodputMode::NoBackoff)?;
            let backoff = run(GoodputMode::BackoffExact)?;
            let thr = run(GoodputMode::Throughput)?;
            ok &= backoff.mean >= none.mean && backoff.mean <= thr.mean && none.mean <= thr.mean;
            worst = worst.min(backoff.mean - none.mean);
            table.push(vec![
                ci as f64,
                snr,
                none.mean,
                backoff.mean,
                thr.mean,
                none.std_err,
                backoff.std_err,
            ]);
        }
    }
    Ok(report(
        7,
        "backoff dominance",
        ok,
        worst,
        0.0,
        format!("min (backoff - no backoff) {worst:.4} bps/Hz"),
        table,
    ))
}

/// SNR grid of the rate-gap check, dB.
pub fn rate_gap_snr_db() -> Vec<f64> {
    (0..=20).map(|i| -10.0 + 2.5 * i as f64).collect()
}

/// SNR at which an increasing piecewise-linear curve reaches `level`.
fn crossing(xs: &[f64], ys: &[f64], level: f64) -> Option<f64> {
    xs.windows(2).zip(ys.windows(2)).find_map(|(x, y)| {
        if (y[0] - level) * (y[1] - level) <= 0.0 && y[0] != y[1] {
            Some(x[0] + (level - y[0]) * (x[1] - x[0]) / (y[1] - y[0]))
        } else {
            None
        }
    })
}

/// Horizontal gap between the mean rate of limited-feedback and random
/// beamforming, averaged over the middle half of the common rate range.
pub fn horizontal_gap_db(
    snr_db: &[f64],
    feedback_rate: &[f64],
    random_rate: &[f64],
) -> Option<f64> {
    let lo = feedback_rate[0].max(random_rate[0]);
    let hi = feedback_rate.last()?.min(*random_rate.last()?);
    if !(hi > lo) {
        return None;
    }
    let levels: Vec<f64> = (0..=10)
        .map(|i| lo + (hi - lo) * (0.25 + 0.05 * i as f64))
        .collect();
    let gaps: Option<Vec<f64>> = levels
        .iter()
        .map(|&r| Some(crossing(snr_db, random_rate, r)? - crossing(snr_db, feedback_rate, r)?))
        .collect();
    let gaps = gaps?;
    Some(gaps.iter().sum::<f64>() / gaps.len() as f64)
}

/// Limited-feedback versus random-beamforming mean rate.
pub fn rate_gap_check(opts: &ValidationOptions) -> Result<CriterionReport> {
    let base = interference_config();
    let cb = deployed_codebook(&base, opts.seed)?;
    let mean_i = mean_interference_mc(&base, opts.seed)?;
    let snrs = rate_gap_snr_db();
    let mut table = Table::new(
        "c8_rate_gap",
        &[
            "snr_db",
            "rate_limited_feedback_bps_hz",
            "rate_random_bf_bps_hz",
        ],
    );
    let (mut lf, mut rb) = (Vec::new(), Vec::new());
    for (i, &snr) in snrs.iter().enumerate() {
        let p = base.with_distance(base.distance_for_snr_db(snr));
        let setup = Setup::with_mean_interference(&p, mean_i)?;
        let stream = 800 + i as u64;
        let a = estimate_goodput(
            &setup,
            Feedback::Fixed(&cb),
            GoodputMode::Throughput,
            opts.trials,
            opts.seed,
            stream,
        )?
        .mean;
        let b = estimate_goodput(
            &setup,
            Feedback::Fixed(&cb),
            GoodputMode::RandomBeamforming,
            opts.trials,
            opts.seed,
            stream,
        )?
        .mean;
        lf.push(a);
        rb.push(b);
        table.push(vec![snr, a, b]);
    }
    let gap = horizontal_gap_db(&snrs, &lf, &rb).unwrap_or(f64::NAN);
    let passed = (gap - GAP_TARGET_DB).abs() <= GAP_TOL_DB;
    Ok(report(
        8,
        "random-beamforming gap",
        passed,
        gap,
        GAP_TARGET_DB,
        format!("mean horizontal gap {gap:.2} dB (target {GAP_TARGET_DB} +/- {GAP_TOL_DB})"),
        table,
    ))
}

/// Largest violation of nonincreasing-in-velocity and nondecreasing-in-delta
/// on a surface indexed [velocity][delta ascending].
pub fn monotonicity_violation(surface: &[Vec<f64>]) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..surface.len() {
        for j in 0..surface[i].len() {
            if i + 1 < surface.len() {
                worst = worst.max(surface[i + 1][j] - surface[i][j]);
            }
            if j + 1 < surface[i].len() {
                worst = worst.max(surface[i][j] - surface[i][j + 1]);
            }
        }
    }
    worst
}

/// Rows indexed by velocity, columns by bits.
pub type Surface = Vec<Vec<f64>>;

/// Average backoff factor over velocity and quantization loss, for both
/// regimes, at a fixed SNR.
pub fn beta_surfaces(
    base: &SystemParams,
    velocities: &[f64],
    bits_list: &[u32],
    snr_db: f64,
    name: &str,
) -> Result<(Table, Surface, Surface)> {
    let mut table = Table::new(
        name,
        &[
            "velocity_kmh",
            "delta",
            "bits",
            "beta_star_delay",
            "beta_star_interference",
        ],
    );
    let (mut delay, mut interf) = (Vec::new(), Vec::new());
    for &v in velocities {
        let (mut row_d, mut row_i) = (Vec::new(), Vec::new());
        for &bits in bits_list {
            let mut p = *base;
            p.bits = bits;
            p.mobility.velocity = kmh_to_mps(v);
            p = p.with_distance(p.distance_for_snr_db(snr_db));
            let mut q = p;
            q.density = 0.0;
            let bd = average_beta_star(&q, Regime::DelayOnly, 1e-8)?;
            let bi = average_beta_star(&p, Regime::Interference, 1e-8)?;
            let delta = crate::codebook::gersho_delta(p.n_b, bits)?;
            row_d.push(bd);
            row_i.push(bi);
            table.push(vec![v, delta, bits as f64, bd, bi]);
        }
        delay.push(row_d);
        interf.push(row_i);
    }
    Ok((table, delay, interf))
}

pub fn surface_check(_opts: &ValidationOptions) -> Result<CriterionReport> {
    let (table, delay, interf) = beta_surfaces(
        &interference_config(),
        &SURFACE_VELOCITIES,
        &SURFACE_BITS,
        SURFACE_SNR_DB,
        "c9_beta_surface",
    )?;
    let vd = monotonicity_violation(&delay);
    let vi = monotonicity_violation(&interf);
    let worst = vd.max(vi);
    Ok(report(
        9,
        "backoff surface trends",
        worst <= MONOTONE_TOL,
        worst,
        MONOTONE_TOL,
        format!("largest violation: delay-only {vd:.3e}, interference {vi:.3e}"),
        table,
    ))
}

/// Checks 1 to 9, in order.
pub fn run_checks(opts: &ValidationOptions) -> Result<Vec<CriterionReport>> {
    type Check = fn(&ValidationOptions) -> Result<CriterionReport>;
    let checks: [Check; 9] = [
        no_interference_identity,
        effective_power_cdf_check,
        outage_check,
        laplace_check,
        density_check,
        backoff_check,
        dominance_check,
        rate_gap_check,
        surface_check,
    ];
    checks.iter().map(|c| c(opts)).collect()
}

/// Runs the checks under one and four workers, twice each, and compares
/// the serialized tables byte for byte.
pub fn determinism_check(opts: &ValidationOptions) -> Result<CriterionReport> {
    let render = |threads: usize| -> Result<Vec<Vec<u8>>> {
        worker_pool(Some(threads)).install(|| {
            run_checks(opts)?
                .into_iter()
                .map(|r| r.table.to_csv_bytes())
                .collect()
        })
    };
    let runs = [render(1)?, render(1)?, render(4)?];
    let differing = runs[0]
        .iter()
        .enumerate()
        .filter(|(i, bytes)| runs[1..].iter().any(|r| r[*i] != **bytes))
        .count();
    let mut table = Table::new("c10_determinism", &["dataset", "bytes", "identical"]);
    for (i, bytes) in runs[0].iter().enumerate() {
        let same = runs[1..].iter().all(|r| r[i] == *bytes);
        table.push(vec![(i + 1) as f64, bytes.len() as f64, same as u8 as f64]);
    }
    Ok(report(
        10,
        "determinism",
        differing == 0,
        differing as f64,
        0.0,
        format!("{differing} datasets differ across runs or worker counts"),
        table,
    ))
}
