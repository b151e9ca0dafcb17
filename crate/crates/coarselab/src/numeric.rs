//! Small numeric helpers shared across modules.

/// Golden-section minimization of a unimodal function on [lo, hi].
/// Returns (argmin, min). Tolerance is on the argument.
pub(crate) fn golden_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc <= fd {
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
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Least-squares slope of y against x. Returns 0 for fewer than two points
/// or a degenerate abscissa.
pub(crate) fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return 0.0;
    }
    let mx = xs[..n].iter().sum::<f64>() / n as f64;
    let my = ys[..n].iter().sum::<f64>() / n as f64;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for k in 0..n {
        let dx = xs[k] - mx;
        sxx += dx * dx;
        sxy += dx * (ys[k] - my);
    }
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Index where the last 30% of a profile begins (at least one point, never
/// past the penultimate index).
pub(crate) fn tail_start(len: usize) -> usize {
    if len <= 1 {
        return 0;
    }
    (((len as f64) * 0.7).floor() as usize).min(len - 1)
}

/// Slope per unit x of ln(max(y, floor)) over the tail of a profile.
pub(crate) fn log_tail_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let start = tail_start(xs.len().min(ys.len()));
    let tail_x: Vec<f64> = xs[start..].to_vec();
    let tail_y: Vec<f64> = ys[start..].iter().map(|v| v.max(1e-300).ln()).collect();
    least_squares_slope(&tail_x, &tail_y)
}

/// Plain slope per unit x over the tail of a profile.
pub(crate) fn tail_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let start = tail_start(xs.len().min(ys.len()));
    least_squares_slope(&xs[start..], &ys[start..])
}
