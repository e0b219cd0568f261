//! Small numeric helpers shared across modules and tests.

/// Least-squares slope of log(y) against log(x). Used for convergence orders
/// and amplitude-scaling laws.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    linear_slope(&lx, &ly)
}

/// Least-squares slope of y against x.
pub fn linear_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Intercept and slope of the least-squares line y = a + b x.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let b = linear_slope(xs, ys);
    let n = xs.len() as f64;
    let a = (ys.iter().sum::<f64>() - b * xs.iter().sum::<f64>()) / n;
    (a, b)
}

/// Root-mean-square of a series after removing its least-squares line.
/// Quantifies the oscillatory content on top of secular drift.
pub fn detrended_rms(ts: &[f64], ys: &[f64]) -> f64 {
    let (a, b) = linear_fit(ts, ys);
    let ss: f64 = ts
        .iter()
        .zip(ys)
        .map(|(t, y)| {
            let r = y - a - b * t;
            r * r
        })
        .sum();
    (ss / ys.len() as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x * x).collect();
        assert!((loglog_slope(&xs, &ys) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn detrend_removes_line() {
        let ts: Vec<f64> = (0..100).map(|i| i as f64 * 0.1).collect();
        let ys: Vec<f64> = ts.iter().map(|t| 5.0 - 2.0 * t).collect();
        assert!(detrended_rms(&ts, &ys) < 1e-12);
        let osc: Vec<f64> = ts.iter().map(|t| 5.0 - 2.0 * t + (3.0 * t).sin()).collect();
        let rms = detrended_rms(&ts, &osc);
        assert!((rms - (0.5f64).sqrt()).abs() < 0.05);
    }
}
