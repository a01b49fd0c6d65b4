use crate::error::{Error, Result};

/// Stopping rules for bracketed root finding.
#[derive(Debug, Clone, Copy)]
pub struct RootOptions {
    pub f_tol: f64,
    pub x_tol: f64,
    pub max_iter: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            f_tol: 1e-10,
            x_tol: 1e-12,
            max_iter: 300,
        }
    }
}

/// Brent's method on a sign-changing bracket.
pub fn find_root_bracketed<F: FnMut(f64) -> f64>(f: F, lo: f64, hi: f64) -> Result<f64> {
    find_root_bracketed_with(f, lo, hi, RootOptions::default())
}

pub fn find_root_bracketed_with<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    opts: RootOptions,
) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa * fb < 0.0) {
        return Err(Error::Bracket {
            lo,
            hi,
            f_lo: fa,
            f_hi: fb,
        });
    }
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut bisected = true;

    for _ in 0..opts.max_iter {
        if fb.abs() <= opts.f_tol || (b - a).abs() <= opts.x_tol {
            return Ok(b);
        }
        let mut s = if fa != fc && fb != fc {
            a * fb * fc / ((fa - fb) * (fa - fc))
                + b * fa * fc / ((fb - fa) * (fb - fc))
                + c * fa * fb / ((fc - fa) * (fc - fb))
        } else {
            b - fb * (b - a) / (fb - fa)
        };
        let lo_q = (3.0 * a + b) / 4.0;
        let outside = !((s > lo_q.min(b)) && (s < lo_q.max(b)));
        let slow = if bisected {
            (s - b).abs() >= (b - c).abs() / 2.0 || (b - c).abs() < opts.x_tol
        } else {
            (s - b).abs() >= (c - d).abs() / 2.0 || (c - d).abs() < opts.x_tol
        };
        if outside || slow {
            s = 0.5 * (a + b);
            bisected = true;
        } else {
            bisected = false;
        }
        let fs = f(s);
        d = c;
        c = b;
        fc = fb;
        if fa * fs < 0.0 {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if fa.abs() < fb.abs() {
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut fa, &mut fb);
        }
    }
    if fb.abs() <= opts.f_tol || (b - a).abs() <= opts.x_tol {
        return Ok(b);
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iter,
        lo: a.min(b),
        hi: a.max(b),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(lo) * f(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn linear() {
        assert!((find_root_bracketed(|x| x - 0.5, 0.0, 1.0).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn sqrt_two() {
        let r = find_root_bracketed(|x| x * x - 2.0, 1.0, 2.0).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn cosine_against_bisection() {
        let r = find_root_bracketed(f64::cos, 1.0, 2.0).unwrap();
        assert!((r - bisect(f64::cos, 1.0, 2.0)).abs() < 1e-10);
        assert!((r - std::f64::consts::FRAC_PI_2).abs() < 1e-10);
    }

    #[test]
    fn missing_sign_change() {
        match find_root_bracketed(|x| x * x + 1.0, -1.0, 1.0) {
            Err(Error::Bracket { .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn flat_tail_stops_on_bracket_width() {
        let r = find_root_bracketed(|x: f64| (x - 0.3).powi(9), 0.0, 1.0).unwrap();
        assert!((r - 0.3).abs() < 0.1);
    }
}
