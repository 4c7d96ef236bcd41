//! Coarse-grid plus golden-section maximisation on bounded intervals.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Location and value of a maximum found by a 1-D search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub x: f64,
    pub value: f64,
    pub evals: usize,
    /// The maximiser sits on an endpoint of the search interval.
    pub at_boundary: bool,
}

/// Golden-section search for a maximum of a unimodal `f` on `[a, b]`,
/// stopping when the bracket is narrower than `tol * (1 + |x|)`.
pub fn golden_max<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> Maximum {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut evals = 2;
    while (b - a).abs() > tol * (1.0 + c.abs().max(d.abs())) && evals < 400 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        evals += 1;
    }
    let (x, value) = if fc >= fd { (c, fc) } else { (d, fd) };
    Maximum { x, value, evals, at_boundary: false }
}

/// Maximise `f` over `[lo, hi]` with `points` grid samples followed by a
/// golden-section refinement around the best sample.  With `log_scale` the
/// grid and refinement are geometric (requires `lo > 0`).
pub fn maximize_grid<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    points: usize,
    log_scale: bool,
) -> Maximum {
    assert!(points >= 3 && hi > lo);
    let (tlo, thi) = if log_scale { (lo.ln(), hi.ln()) } else { (lo, hi) };
    let map = |t: f64| if log_scale { t.exp() } else { t };
    let step = (thi - tlo) / (points - 1) as f64;
    let mut best_i = 0;
    let mut best_v = f64::NEG_INFINITY;
    let mut vals = Vec::with_capacity(points);
    for i in 0..points {
        let v = f(map(tlo + step * i as f64));
        let v = if v.is_nan() { f64::NEG_INFINITY } else { v };
        vals.push(v);
        if v > best_v {
            best_v = v;
            best_i = i;
        }
    }
    let a = tlo + step * best_i.saturating_sub(1) as f64;
    let b = tlo + step * (best_i + 1).min(points - 1) as f64;
    let mut refined = golden_max(|t| {
        let v = f(map(t));
        if v.is_nan() { f64::NEG_INFINITY } else { v }
    }, a, b, 1e-10);
    refined.evals += points;
    if refined.value < best_v {
        refined.value = best_v;
        refined.x = tlo + step * best_i as f64;
    }
    let edge = step * 1e-6;
    refined.at_boundary = (refined.x - tlo).abs() <= edge || (refined.x - thi).abs() <= edge;
    refined.x = map(refined.x);
    refined
}

/// Shorthand for [`maximize_grid`] on a 64-point logarithmic grid.
pub fn maximize_log_grid<F: FnMut(f64) -> f64>(f: F, lo: f64, hi: f64) -> Maximum {
    maximize_grid(f, lo, hi, 64, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_peak() {
        let m = golden_max(|x| -(x - 0.3) * (x - 0.3), 0.0, 1.0, 1e-10);
        assert!((m.x - 0.3).abs() < 1e-8);
    }

    #[test]
    fn log_grid_peak_and_boundary() {
        let m = maximize_log_grid(|g: f64| -(g.ln() - 2.0f64.ln()).powi(2), 1e-6, 1e6);
        assert!((m.x - 2.0).abs() < 1e-6);
        assert!(!m.at_boundary);
        let m = maximize_log_grid(|g: f64| g, 1e-6, 1e6);
        assert!(m.at_boundary);
    }
}
