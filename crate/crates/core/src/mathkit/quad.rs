use crate::error::{Error, Result};

/// Tolerances for adaptive Gauss-Kronrod integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: u32,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-6,
            abs_tol: 1e-13,
            max_depth: 40,
        }
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive G7/K15 quadrature on a finite interval.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64) -> Result<f64> {
    integrate_with(f, a, b, QuadOptions::default())
}

pub fn integrate_with<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    opts: QuadOptions,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (whole, err) = kronrod(&mut f, a, b);
    // Global error budget split over bisected panels, worst first.
    let mut panels = vec![(a, b, whole, err, 0u32)];
    let mut total = whole;
    let mut total_err = err;
    for _ in 0..100_000 {
        if !total.is_finite() {
            return Err(Error::Numeric(format!(
                "integrand not finite on [{a}, {b}]"
            )));
        }
        if total_err <= opts.abs_tol.max(opts.rel_tol * total.abs()) {
            return Ok(total);
        }
        let (idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap())
            .unwrap();
        let (lo, hi, val, e, depth) = panels.swap_remove(idx);
        if depth >= opts.max_depth {
            return Err(Error::Numeric(format!(
                "quadrature did not reach tolerance near [{lo}, {hi}] (error {total_err:e})"
            )));
        }
        let mid = 0.5 * (lo + hi);
        let (l, le) = kronrod(&mut f, lo, mid);
        let (r, re) = kronrod(&mut f, mid, hi);
        total += l + r - val;
        total_err += le + re - e;
        panels.push((lo, mid, l, le, depth + 1));
        panels.push((mid, hi, r, re, depth + 1));
    }
    Err(Error::Numeric("quadrature panel budget exhausted".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let v = integrate(|x| 3.0 * x * x, 0.0, 2.0).unwrap();
        assert!((v - 8.0).abs() < 1e-12);
    }

    #[test]
    fn exponential_tail() {
        let v = integrate(|x: f64| (-x).exp(), 0.0, 40.0).unwrap();
        assert!((v - (1.0 - (-40f64).exp())).abs() < 1e-9);
    }

    #[test]
    fn kink() {
        let v = integrate(|x: f64| (x - 0.3).abs(), 0.0, 1.0).unwrap();
        assert!((v - (0.045 + 0.245)).abs() < 1e-7);
    }

    #[test]
    fn reversed_interval_is_negated() {
        let v = integrate(f64::sin, std::f64::consts::PI, 0.0).unwrap();
        assert!((v + 2.0).abs() < 1e-10);
    }
}
