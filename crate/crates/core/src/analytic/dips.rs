/// Interior local minima of a sampled curve. A run of equal samples counts
/// once (its middle index) when both neighbours are strictly higher.
/// Non-finite samples break runs and are never minima.
pub fn grid_local_minima(values: &[f64]) -> Vec<usize> {
    let mut out = Vec::new();
    let n = values.len();
    let mut i = 1;
    while i + 1 < n {
        let v = values[i];
        if !v.is_finite() {
            i += 1;
            continue;
        }
        let mut j = i;
        while j + 1 < n && values[j + 1] == v {
            j += 1;
        }
        if j + 1 < n && values[i - 1] > v && values[j + 1] > v {
            out.push((i + j) / 2);
        }
        i = j + 1;
    }
    out
}

/// Refines a bracketed minimum of a smooth function by bisection on the
/// sign of a central-difference derivative. Requires `f'(lo) < 0 < f'(hi)`
/// in the sense of the difference quotient; returns the midpoint after the
/// bracket shrinks below `tol`.
pub fn refine_minimum(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let h = (hi - lo).abs() * 1e-6;
    let slope = |x: f64, h: f64| f(x + h) - f(x - h);
    let mut h = h.max(f64::EPSILON);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        h = h.min(0.25 * (hi - lo)).max(f64::EPSILON * mid.abs().max(1.0));
        if slope(mid, h) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}
