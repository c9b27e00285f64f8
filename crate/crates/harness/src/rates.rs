//! Convergence-rate estimators on (h, error) data.

use serde::Serialize;

#[derive(Clone, Debug, Default, Serialize)]
pub struct Rate {
    /// Slopes between consecutive levels.
    pub pairwise: Vec<f64>,
    pub median: f64,
    /// Least-squares slope of log(error) against log(h).
    pub fitted: f64,
}

pub fn pairwise_slopes(h: &[f64], e: &[f64]) -> Vec<f64> {
    h.windows(2).zip(e.windows(2)).map(|(h, e)| (e[1] / e[0]).ln() / (h[1] / h[0]).ln()).collect()
}

pub fn median(v: &[f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() / 2;
    if s.len() % 2 == 1 { s[m] } else { 0.5 * (s[m - 1] + s[m]) }
}

pub fn lsq_slope(h: &[f64], e: &[f64]) -> f64 {
    let x: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = e.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

pub fn rate(h: &[f64], e: &[f64]) -> Rate {
    let pairwise = pairwise_slopes(h, e);
    Rate { median: median(&pairwise), fitted: lsq_slope(h, e), pairwise }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let h = [0.1, 0.05, 0.025, 0.0125];
        let e: Vec<f64> = h.iter().map(|h: &f64| 3.0 * h.powi(3)).collect();
        let r = rate(&h, &e);
        assert!((r.fitted - 3.0).abs() < 1e-12);
        assert!((r.median - 3.0).abs() < 1e-12);
        assert_eq!(r.pairwise.len(), 3);
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
