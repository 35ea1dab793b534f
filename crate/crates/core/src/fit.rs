//! Least-squares fits of averaged infidelity curves.

use crate::math::{log10, pow10, sqrt};
use crate::{Error, Result};

/// `1 - F ≈ c·N^α`, fitted on `log₁₀`–`log₁₀` data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub alpha: f64,
    pub c: f64,
    /// Ordinary-least-squares standard error of the slope.
    pub alpha_stderr: f64,
    pub r_squared: f64,
}

/// OLS of `log₁₀ y` on `log₁₀ N` over `(N, y)` points.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: points.len(),
        });
    }
    for &(n, y) in points {
        if n.is_nan() || n <= 0.0 {
            return Err(Error::NonPositive(n));
        }
        if y.is_nan() || y <= 0.0 {
            return Err(Error::NonPositive(y));
        }
    }
    let k = points.len() as f64;
    let xs = points.iter().map(|&(n, _)| log10(n));
    let ys = points.iter().map(|&(_, y)| log10(y));
    let mean_x = xs.clone().sum::<f64>() / k;
    let mean_y = ys.clone().sum::<f64>() / k;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.zip(ys) {
        let dx = x - mean_x;
        let dy = y - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::TooFewPoints { needed: 2, got: 1 });
    }
    let alpha = sxy / sxx;
    let intercept = mean_y - alpha * mean_x;
    let residual = (syy - alpha * sxy).max(0.0);
    let alpha_stderr = sqrt(residual / (k - 2.0) / sxx);
    let r_squared = if syy > 0.0 { 1.0 - residual / syy } else { 1.0 };
    Ok(PowerLawFit {
        alpha,
        c: pow10(intercept),
        alpha_stderr,
        r_squared,
    })
}

/// Coefficient `k` in `y - offset ≈ k/N`, with its standard error.
///
/// Each point gives the estimate `(y - offset)·N`; they are averaged with
/// equal weight, which is least squares on relative residuals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseFit {
    pub coefficient: f64,
    pub stderr: f64,
}

pub fn fit_inverse_n(points: &[(f64, f64)], offset: f64) -> Result<InverseFit> {
    if points.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: points.len(),
        });
    }
    let k = points.len() as f64;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for &(n, y) in points {
        let v = (y - offset) * n;
        sum += v;
        sum_sq += v * v;
    }
    let mean = sum / k;
    let var = ((sum_sq - k * mean * mean) / (k - 1.0)).max(0.0);
    Ok(InverseFit {
        coefficient: mean,
        stderr: sqrt(var / k),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;
    use approx::assert_abs_diff_eq;

    fn grid() -> Vec<f64> {
        (0..12).map(|i| libm::pow(10.0, 2.0 + 0.25 * i as f64)).collect()
    }

    #[test]
    fn exact_inverse_law() {
        let pts: Vec<_> = grid().into_iter().map(|n| (n, 2.0 / n)).collect();
        let fit = fit_power_law(&pts).unwrap();
        assert_abs_diff_eq!(fit.alpha, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.c, 2.0, epsilon = 1e-11);
        assert!(fit.alpha_stderr < 1e-12);
        assert_abs_diff_eq!(fit.r_squared, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn exact_square_root_law() {
        let pts: Vec<_> = grid().into_iter().map(|n| (n, 0.5 / libm::sqrt(n))).collect();
        let fit = fit_power_law(&pts).unwrap();
        assert_abs_diff_eq!(fit.alpha, -0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.c, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn bad_inputs() {
        assert!(matches!(
            fit_power_law(&[(1.0, 1.0), (2.0, 0.5)]),
            Err(Error::TooFewPoints { .. })
        ));
        assert!(matches!(
            fit_power_law(&[(1.0, 1.0), (2.0, 0.0), (3.0, 0.1)]),
            Err(Error::NonPositive(_))
        ));
    }

    #[test]
    fn noisy_slope_error_is_reported() {
        let pts: Vec<_> = grid()
            .into_iter()
            .enumerate()
            .map(|(i, n)| (n, (1.0 + if i % 2 == 0 { 0.05 } else { -0.05 }) / n))
            .collect();
        let fit = fit_power_law(&pts).unwrap();
        assert!(fit.alpha_stderr > 0.0);
        assert!((fit.alpha + 1.0).abs() < 0.02);
    }

    #[test]
    fn inverse_coefficient() {
        let pts: Vec<_> = grid().into_iter().map(|n| (n, 0.002 + 2.3 / n)).collect();
        let fit = fit_inverse_n(&pts, 0.002).unwrap();
        assert_abs_diff_eq!(fit.coefficient, 2.3, epsilon = 1e-9);
    }
}
