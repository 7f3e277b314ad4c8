//! Least-squares sinusoid fit for drifting rate series.

use nalgebra::{Matrix3, Vector3};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinusoidFit {
    pub period: f64,
    pub offset: f64,
    pub amplitude: f64,
    /// Phase `ϕ` in `offset + amplitude · sin(2πt/period + ϕ)`.
    pub phase: f64,
    /// Residual sum of squares.
    pub rss: f64,
}

/// Linear fit of `c + a sin(ωt) + b cos(ωt)` at fixed period.
fn fit_at(t: &[f64], y: &[f64], period: f64) -> Option<(Vector3<f64>, f64)> {
    let w = 2.0 * std::f64::consts::PI / period;
    let mut ata = Matrix3::zeros();
    let mut aty = Vector3::zeros();
    for (&ti, &yi) in t.iter().zip(y) {
        let row = Vector3::new(1.0, (w * ti).sin(), (w * ti).cos());
        ata += row * row.transpose();
        aty += row * yi;
    }
    let coef = ata.try_inverse()? * aty;
    let rss = t
        .iter()
        .zip(y)
        .map(|(&ti, &yi)| {
            let r = yi - coef[0] - coef[1] * (w * ti).sin() - coef[2] * (w * ti).cos();
            r * r
        })
        .sum();
    Some((coef, rss))
}

/// Best-fitting period in `[min_period, max_period]`: a dense scan of the
/// residual followed by golden-section refinement around the best node.
pub fn fit_sinusoid(t: &[f64], y: &[f64], min_period: f64, max_period: f64) -> Option<SinusoidFit> {
    if t.len() != y.len() || t.len() < 4 || !(min_period > 0.0 && max_period > min_period) {
        return None;
    }
    let rss = |p: f64| fit_at(t, y, p).map_or(f64::INFINITY, |(_, r)| r);
    let nodes = 2000;
    let step = (max_period - min_period) / nodes as f64;
    let best = (0..=nodes)
        .map(|i| min_period + step * i as f64)
        .min_by(|a, b| rss(*a).total_cmp(&rss(*b)))?;

    let (mut lo, mut hi) = ((best - step).max(min_period), (best + step).min(max_period));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..60 {
        let m1 = hi - g * (hi - lo);
        let m2 = lo + g * (hi - lo);
        if rss(m1) < rss(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let period = 0.5 * (lo + hi);
    let (coef, rss) = fit_at(t, y, period)?;
    Some(SinusoidFit {
        period,
        offset: coef[0],
        amplitude: coef[1].hypot(coef[2]),
        phase: coef[2].atan2(coef[1]),
        rss,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_clean_signal() {
        let t: Vec<f64> = (0..100).map(f64::from).collect();
        let y: Vec<f64> = t
            .iter()
            .map(|&x| 0.05 + 0.01 * (2.0 * std::f64::consts::PI * x / 18.0 + 0.3).sin())
            .collect();
        let f = fit_sinusoid(&t, &y, 4.0, 60.0).unwrap();
        assert!((f.period - 18.0).abs() < 1e-6, "{f:?}");
        assert!((f.amplitude - 0.01).abs() < 1e-9);
        assert!((f.offset - 0.05).abs() < 1e-9);
        assert!((f.phase - 0.3).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(fit_sinusoid(&[0.0, 1.0], &[0.0, 1.0], 1.0, 2.0).is_none());
        assert!(fit_sinusoid(&[0.0; 5], &[0.0; 4], 1.0, 2.0).is_none());
    }
}
