/// Default final bracket width for golden-section refinement.
pub const GOLDEN_WIDTH: f64 = 1e-8;

/// Golden-section search for the maximizer of a unimodal function on [lo, hi].
/// Returns (argmax, max).
pub fn golden_section_max<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    width: f64,
) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > width {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    // Endpoints may beat the interior when the maximum sits on the boundary.
    let mut best = if fc >= fd { (c, fc) } else { (d, fd) };
    for x in [lo, hi] {
        let fx = f(x);
        if fx > best.1 {
            best = (x, fx);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola() {
        let (x, v) = golden_section_max(|x| -(x - 0.37) * (x - 0.37) + 2.0, 0.0, 1.0, 1e-10);
        // A flat peak limits the abscissa to about sqrt(machine epsilon).
        assert!((x - 0.37).abs() < 1e-7);
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn boundary_maximum() {
        let (x, _) = golden_section_max(|x| x, 0.0, 1.0, 1e-9);
        assert_eq!(x, 1.0);
    }
}
