use crate::error::{domain, Error, Result};
use std::f64::consts::E;

pub const LAMBERT_RESIDUAL_TOL: f64 = 1e-12;

const BRANCH_POINT: f64 = -1.0 / E;

/// Real branch of the Lambert W function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// W0, defined on [-1/e, inf), values >= -1.
    Principal,
    /// W-1, defined on [-1/e, 0), values <= -1.
    Lower,
}

/// Solves `w * exp(w) = x` on the requested real branch.
pub fn lambert_w(x: f64, branch: Branch) -> Result<f64> {
    if !x.is_finite() {
        return domain(format!("lambert_w needs a finite argument, got {x}"));
    }
    // Admit arguments a rounding step below -1/e.
    if x < BRANCH_POINT - 4.0 * f64::EPSILON {
        return domain(format!("lambert_w undefined below -1/e, got {x}"));
    }
    if branch == Branch::Lower && x >= 0.0 {
        return domain(format!("lower branch needs -1/e <= x < 0, got {x}"));
    }
    if x <= BRANCH_POINT {
        return Ok(-1.0);
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let w0 = initial_guess(x, branch);
    halley(x, w0)
}

fn initial_guess(x: f64, branch: Branch) -> f64 {
    let p = (2.0 * (E * x + 1.0)).max(0.0).sqrt();
    match branch {
        Branch::Principal => {
            if x < -0.25 {
                -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
            } else if x < 3.0 {
                x.ln_1p()
            } else {
                let l1 = x.ln();
                let l2 = l1.ln();
                l1 - l2 + l2 / l1
            }
        }
        Branch::Lower => {
            if x < -0.25 {
                -1.0 - p - p * p / 3.0 - 11.0 / 72.0 * p * p * p
            } else {
                let l1 = (-x).ln();
                let l2 = (-l1).ln();
                l1 - l2 + l2 / l1
            }
        }
    }
}

fn halley(x: f64, mut w: f64) -> Result<f64> {
    for _ in 0..100 {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        if wp1 == 0.0 {
            break;
        }
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        w -= step;
        if step.abs() <= 1e-15 * (1.0 + w.abs()) {
            break;
        }
    }
    let residual = (w * w.exp() - x).abs();
    if residual > LAMBERT_RESIDUAL_TOL * x.abs().max(1.0) {
        return Err(Error::Numeric(format!(
            "lambert_w({x}) residual {residual:e} above tolerance"
        )));
    }
    Ok(w)
}

/// Principal-branch W(exp(log_x)) for arguments too large to form directly.
pub fn lambert_w0_of_exp(log_x: f64) -> Result<f64> {
    if !log_x.is_finite() {
        return domain(format!("lambert_w0_of_exp needs a finite log, got {log_x}"));
    }
    if log_x < 700.0 {
        return lambert_w(log_x.exp(), Branch::Principal);
    }
    // Solve w + ln w = log_x by Newton.
    let mut w = log_x - log_x.ln();
    for _ in 0..100 {
        let step = (w + w.ln() - log_x) / (1.0 + 1.0 / w);
        w -= step;
        if step.abs() <= 1e-15 * w {
            return Ok(w);
        }
    }
    Err(Error::Numeric(format!(
        "lambert_w0_of_exp({log_x}) did not converge"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn trivial_points() {
        assert_eq!(lambert_w(0.0, Branch::Principal).unwrap(), 0.0);
        assert!((lambert_w(E, Branch::Principal).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(lambert_w(BRANCH_POINT, Branch::Lower).unwrap(), -1.0);
    }

    #[test]
    fn lower_branch_at_minus_point_two() {
        // Independent Newton iteration on w e^w + 0.2 = 0 started at -3.
        let mut w: f64 = -3.0;
        for _ in 0..60 {
            w -= (w * w.exp() + 0.2) / ((w + 1.0) * w.exp());
        }
        let got = lambert_w(-0.2, Branch::Lower).unwrap();
        assert!((got - w).abs() < 1e-12);
        assert!((got + 2.5426).abs() < 1e-4);
    }

    #[test]
    #[allow(clippy::excessive_precision)]
    fn reference_values() {
        let cases = [
            (-0.2, Branch::Principal, -0.259171101819073764476637135967),
            (10.0, Branch::Principal, 1.74552800274069938307430126488),
            (-0.01, Branch::Lower, -6.47277512439400467012069683395),
        ];
        for (x, b, want) in cases {
            assert!((lambert_w(x, b).unwrap() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn domain_errors() {
        assert!(lambert_w(-0.5, Branch::Principal).is_err());
        assert!(lambert_w(0.1, Branch::Lower).is_err());
        assert!(lambert_w(0.0, Branch::Lower).is_err());
    }

    #[test]
    fn huge_arguments_through_log() {
        let w = lambert_w0_of_exp(2000.0).unwrap();
        assert!((w + w.ln() - 2000.0).abs() < 1e-10);
        let small = lambert_w0_of_exp(1.0).unwrap();
        assert!((small - lambert_w(E, Branch::Principal).unwrap()).abs() < 1e-14);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn principal_residual(x in BRANCH_POINT..10.0f64) {
            let w = lambert_w(x, Branch::Principal).unwrap();
            prop_assert!(w >= -1.0);
            prop_assert!((w * w.exp() - x).abs() <= 1e-12);
        }

        #[test]
        fn lower_residual(x in BRANCH_POINT..-1e-12f64) {
            let w = lambert_w(x, Branch::Lower).unwrap();
            prop_assert!(w <= -1.0);
            prop_assert!((w * w.exp() - x).abs() <= 1e-12);
        }
    }
}
