//! Ordinary least-squares slope fits in log-log coordinates.
//!
//! Used everywhere an asymptotic exponent is extracted from an
//! epsilon-ladder: sup-norm growth of regularized nets, moderateness of
//! solution nets, decay orders of mollification errors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Values below this are treated as identically zero in log-log fits.
pub const ZERO_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit in log space.
    pub residual: f64,
    /// All ordinate values were (numerically) zero; slope is reported as 0.
    pub identically_zero: bool,
    pub points: usize,
}

/// Least-squares line through `(ln x_i, ln y_i)`.
///
/// Requires at least 4 points with distinct abscissae. Zero ordinates are
/// allowed only if all of them are zero, in which case the fit reports the
/// `identically_zero` flag instead of failing on `ln 0`.
pub fn log_log_fit(xs: &[f64], ys: &[f64]) -> Result<SlopeFit> {
    if xs.len() != ys.len() {
        return Err(Error::Fit(format!(
            "mismatched lengths {} vs {}",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 4 {
        return Err(Error::Fit(format!(
            "need >= 4 ladder points, got {}",
            xs.len()
        )));
    }
    if xs.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::Fit("non-positive abscissa in log-log fit".into()));
    }
    if ys.iter().any(|y| !y.is_finite()) {
        return Err(Error::Fit("non-finite ordinate in log-log fit".into()));
    }
    if ys.iter().all(|&y| y.abs() <= ZERO_FLOOR) {
        return Ok(SlopeFit {
            slope: 0.0,
            intercept: f64::NEG_INFINITY,
            residual: 0.0,
            identically_zero: true,
            points: xs.len(),
        });
    }
    if ys.iter().any(|&y| y.abs() <= ZERO_FLOOR) {
        return Err(Error::Fit(
            "mixed zero and nonzero ordinates; restrict the ladder first".into(),
        ));
    }

    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.abs().ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx < 1e-14 {
        return Err(Error::Fit("degenerate ladder: identical abscissae".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| {
            let p = slope * x + intercept;
            (y - p) * (y - p)
        })
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(SlopeFit {
        slope,
        intercept,
        residual,
        identically_zero: false,
        points: xs.len(),
    })
}

/// Fit of `ln y` against `ln(1/eps)`: positive slope means growth like
/// `eps^{-slope}`, negative slope means decay like `eps^{|slope|}`.
pub fn fit_vs_inverse_eps(ladder: &[f64], ys: &[f64]) -> Result<SlopeFit> {
    let inv: Vec<f64> = ladder.iter().map(|e| 1.0 / e).collect();
    log_log_fit(&inv, ys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn exact_power_law() {
        let ladder: Vec<f64> = (2..10).map(|j| 2f64.powi(-j)).collect();
        let ys: Vec<f64> = ladder.iter().map(|e| e.powi(-2)).collect();
        let fit = fit_vs_inverse_eps(&ladder, &ys).unwrap();
        assert_abs_diff_eq!(fit.slope, 2.0, epsilon = 1e-12);
        assert!(fit.residual < 1e-12);
    }

    #[test]
    fn decay_law() {
        let ladder: Vec<f64> = (2..10).map(|j| 2f64.powi(-j)).collect();
        let ys: Vec<f64> = ladder.iter().map(|e| 7.0 * e.powi(3)).collect();
        let fit = fit_vs_inverse_eps(&ladder, &ys).unwrap();
        assert_abs_diff_eq!(fit.slope, -3.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_ordinates_flagged() {
        let ladder: Vec<f64> = (2..8).map(|j| 2f64.powi(-j)).collect();
        let ys = vec![0.0; 6];
        let fit = fit_vs_inverse_eps(&ladder, &ys).unwrap();
        assert!(fit.identically_zero);
        assert_eq!(fit.slope, 0.0);
    }

    #[test]
    fn too_few_points() {
        assert!(log_log_fit(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn degenerate_ladder() {
        let xs = vec![2.0; 5];
        let ys = vec![1.0, 2.0, 3.0, 4.0, 5.0];
        assert!(log_log_fit(&xs, &ys).is_err());
    }
}
