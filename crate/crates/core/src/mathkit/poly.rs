use crate::error::{domain, Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Imaginary-part threshold below which a converged root counts as real.
pub const IMAG_TOL: f64 = 1e-8;
/// Residual bound for returned roots, relative to the coefficient scale.
pub const ROOT_RESIDUAL_TOL: f64 = 1e-9;

const RANGE: f64 = 10.0;
const MAX_SWEEPS: usize = 2000;

/// Real polynomial with coefficients in ascending degree order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    coefficients: Vec<f64>,
}

impl Polynomial {
    /// Builds a polynomial, trimming zero leading coefficients.
    pub fn new(mut coefficients: Vec<f64>) -> Self {
        while coefficients.len() > 1 && *coefficients.last().unwrap() == 0.0 {
            coefficients.pop();
        }
        if coefficients.is_empty() {
            coefficients.push(0.0);
        }
        Self { coefficients }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c)
    }

    fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coefficients
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Polynomial {
        if self.degree() == 0 {
            return Polynomial::new(vec![0.0]);
        }
        Polynomial::new(
            self.coefficients
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| k as f64 * c)
                .collect(),
        )
    }

    /// Scale for residual checks: sum of |c_k| |x|^k.
    fn magnitude_at(&self, x: f64) -> f64 {
        let ax = x.abs();
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * ax + c.abs())
    }

    /// All real roots (any magnitude), ascending, duplicates merged.
    pub fn real_roots(&self) -> Result<Vec<f64>> {
        let n = self.degree();
        if n == 0 {
            return domain("polynomial of degree 0 has no roots to find");
        }
        let lead = self.coefficients[n];
        let monic: Vec<f64> = self.coefficients.iter().map(|c| c / lead).collect();

        let radius = 1.0 + monic[..n].iter().fold(0.0_f64, |m, c| m.max(c.abs()));
        let seed = Complex64::new(0.4, 0.9);
        let mut z: Vec<Complex64> = (0..n)
            .map(|k| seed.powu(k as u32) * radius.min(1e6))
            .collect();
        let monic_poly = Polynomial {
            coefficients: monic,
        };

        for _ in 0..MAX_SWEEPS {
            let mut shift = 0.0_f64;
            for i in 0..n {
                let mut denom = Complex64::new(1.0, 0.0);
                for j in 0..n {
                    if i != j {
                        denom *= z[i] - z[j];
                    }
                }
                if denom.norm() == 0.0 {
                    denom = Complex64::new(1e-300, 0.0);
                }
                let step = monic_poly.eval_complex(z[i]) / denom;
                z[i] -= step;
                shift = shift.max(step.norm() / (1.0 + z[i].norm()));
            }
            if shift < 1e-15 {
                break;
            }
        }

        let deriv = self.derivative();
        let mut roots = Vec::new();
        for zi in z {
            let loose = zi.im.abs() <= IMAG_TOL * (1.0 + zi.re.abs());
            // Clustered (multiple) roots converge slowly in the imaginary part;
            // admit them when the real projection is itself a root.
            if !loose && zi.im.abs() > 1e-4 * (1.0 + zi.re.abs()) {
                continue;
            }
            let x = self.polish(&deriv, zi.re);
            if self.eval(x).abs() <= ROOT_RESIDUAL_TOL * self.magnitude_at(x).max(1.0) {
                roots.push(x);
            } else if loose {
                return Err(Error::Numeric(format!(
                    "real root {x} failed the residual check ({:e})",
                    self.eval(x)
                )));
            }
        }
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-7 * (1.0 + b.abs()));
        Ok(roots)
    }

    fn polish(&self, deriv: &Polynomial, mut x: f64) -> f64 {
        for _ in 0..8 {
            let fx = self.eval(x);
            let dx = deriv.eval(x);
            if dx == 0.0 || fx == 0.0 {
                break;
            }
            let next = x - fx / dx;
            if !next.is_finite() || self.eval(next).abs() >= fx.abs() {
                break;
            }
            x = next;
        }
        x
    }
}

/// Real roots inside [-10, 10], ascending.
pub fn poly_real_roots(p: &Polynomial) -> Result<Vec<f64>> {
    Ok(p.real_roots()?
        .into_iter()
        .filter(|r| r.abs() <= RANGE)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn roots(c: &[f64]) -> Vec<f64> {
        poly_real_roots(&Polynomial::new(c.to_vec())).unwrap()
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-9)
    }

    #[test]
    fn examples() {
        assert!(close(&roots(&[-1.0, 0.0, 1.0]), &[-1.0, 1.0]));
        assert!(close(&roots(&[0.0, 1.0]), &[0.0]));
        assert!(close(&roots(&[6.0, -11.0, 6.0, -1.0]), &[1.0, 2.0, 3.0]));
    }

    #[test]
    fn complex_pair_is_dropped() {
        assert!(roots(&[1.0, 0.0, 1.0]).is_empty());
        assert!(close(&roots(&[-1.0, 1.0, -1.0, 1.0]), &[1.0]));
    }

    #[test]
    fn double_root_found_once() {
        assert!(close(&roots(&[1.0, -2.0, 1.0]), &[1.0]));
    }

    #[test]
    fn range_filter() {
        let p = Polynomial::new(vec![-20.0, 1.0]);
        assert!(poly_real_roots(&p).unwrap().is_empty());
        assert_eq!(p.real_roots().unwrap().len(), 1);
    }

    #[test]
    fn degree_zero_rejected() {
        assert!(poly_real_roots(&Polynomial::new(vec![3.0])).is_err());
        assert!(poly_real_roots(&Polynomial::new(vec![3.0, 0.0])).is_err());
    }

    proptest! {
        #[test]
        fn residual_of_returned_roots(c in prop::collection::vec(-5.0f64..5.0, 2..9)) {
            let p = Polynomial::new(c);
            prop_assume!(p.degree() >= 1 && p.coefficients()[p.degree()].abs() > 1e-3);
            for r in poly_real_roots(&p).unwrap() {
                prop_assert!(p.eval(r).abs() <= 1e-9 * p.magnitude_at(r).max(1.0));
            }
        }

        #[test]
        fn recovers_planted_real_roots(rs in prop::collection::vec(-9.0f64..9.0, 1..7)) {
            let mut sorted = rs.clone();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            prop_assume!(sorted.windows(2).all(|w| w[1] - w[0] > 0.05));
            let mut c = vec![1.0];
            for r in &rs {
                let mut next = vec![0.0; c.len() + 1];
                for (k, ck) in c.iter().enumerate() {
                    next[k] -= r * ck;
                    next[k + 1] += ck;
                }
                c = next;
            }
            let got = poly_real_roots(&Polynomial::new(c)).unwrap();
            prop_assert_eq!(got.len(), sorted.len());
            for (g, w) in got.iter().zip(&sorted) {
                prop_assert!((g - w).abs() < 1e-6);
            }
        }
    }
}
