use serde::Serialize;

use super::dataset::ChoiceProblemRecord;
use crate::error::{Error, Result};

/// Half-width multiplier of the plotted band: one standard error.
pub const BAND_SIGMA: f64 = 1.0;

/// Unweighted least-squares line `y = intercept + slope·x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OlsFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// `sqrt(SSE / (n − 2))`.
    pub residual_std: f64,
    pub n: usize,
    pub x_mean: f64,
    /// `Σ (x − x̄)²`.
    pub s_xx: f64,
}

impl OlsFit {
    pub fn predict(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }

    /// Standard error of the fitted mean at `x`.
    pub fn mean_std_error(&self, x: f64) -> f64 {
        let dx = x - self.x_mean;
        self.residual_std * (1.0 / self.n as f64 + dx * dx / self.s_xx).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandPoint {
    pub x: f64,
    pub y_hat: f64,
    pub half_width: f64,
}

pub fn fit_points(xs: &[f64], ys: &[f64]) -> Result<OlsFit> {
    if xs.len() != ys.len() {
        return Err(Error::invalid("x and y lengths differ"));
    }
    let n = xs.len();
    if n < 3 {
        return Err(Error::invalid(format!("regression needs n >= 3, got {n}")));
    }
    let nf = n as f64;
    let x_mean = xs.iter().sum::<f64>() / nf;
    let y_mean = ys.iter().sum::<f64>() / nf;
    let s_xx: f64 = xs.iter().map(|x| (x - x_mean).powi(2)).sum();
    if s_xx <= 0.0 {
        return Err(Error::DegenerateRegression("x has zero variance".into()));
    }
    let s_xy: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (x - x_mean) * (y - y_mean))
        .sum();
    let s_yy: f64 = ys.iter().map(|y| (y - y_mean).powi(2)).sum();
    let slope = s_xy / s_xx;
    let intercept = y_mean - slope * x_mean;
    let sse: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let r_squared = if s_yy > 0.0 {
        (1.0 - sse / s_yy).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(OlsFit {
        slope,
        intercept,
        r_squared,
        residual_std: (sse / (nf - 2.0)).sqrt(),
        n,
        x_mean,
        s_xx,
    })
}

/// RATL percentage regressed on the Jensen gap.
pub fn ols_fit(records: &[ChoiceProblemRecord]) -> Result<OlsFit> {
    let xs: Vec<f64> = records.iter().map(|r| r.gap).collect();
    let ys: Vec<f64> = records.iter().map(|r| r.ratl_fraction).collect();
    fit_points(&xs, &ys)
}

/// Pointwise band for the fitted mean,
/// `BAND_SIGMA · s · sqrt(1/n + (x − x̄)²/S_xx)`.
pub fn confidence_band(fit: &OlsFit, xs: &[f64]) -> Vec<BandPoint> {
    xs.iter()
        .map(|&x| BandPoint {
            x,
            y_hat: fit.predict(x),
            half_width: BAND_SIGMA * fit.mean_std_error(x),
        })
        .collect()
}

/// `steps` evenly spaced points spanning the records' gap range.
pub fn band_grid(records: &[ChoiceProblemRecord], steps: usize) -> Vec<f64> {
    let (lo, hi) = records
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
            (lo.min(r.gap), hi.max(r.gap))
        });
    if records.is_empty() || steps < 2 {
        return Vec::new();
    }
    (0..steps)
        .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collinear_points_fit_exactly() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0, 3.0, 5.0, 7.0];
        let fit = fit_points(&xs, &ys).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!((fit.intercept - 1.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!(fit.residual_std.abs() < 1e-12);
    }

    #[test]
    fn rejects_small_or_flat_inputs() {
        assert!(fit_points(&[1.0, 2.0], &[1.0, 2.0]).is_err());
        assert!(matches!(
            fit_points(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(Error::DegenerateRegression(_))
        ));
    }

    #[test]
    fn band_is_narrowest_at_the_mean() {
        let fit = fit_points(&[0.0, 1.0, 2.0, 3.0, 4.0], &[1.0, 2.5, 2.9, 4.2, 5.1]).unwrap();
        let band = confidence_band(
            &fit,
            &[
                fit.x_mean,
                fit.x_mean + 0.5,
                fit.x_mean + 1.0,
                fit.x_mean - 1.5,
            ],
        );
        let floor = fit.residual_std / (fit.n as f64).sqrt();
        assert!((band[0].half_width - floor).abs() < 1e-12);
        assert!(band[1].half_width > band[0].half_width);
        assert!(band[2].half_width > band[1].half_width);
        assert!(band[3].half_width > band[2].half_width);
    }
}
