//! Least-squares power-law fits, `y ≈ C x^p`, on log-log data.

use crate::error::{FracError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerFit {
    pub exponent: f64,
    pub coefficient: f64,
    pub r_squared: f64,
}

/// Fit `|y| ≈ C x^p` by least squares on `(ln x, ln |y|)`.
pub fn fit_power_law(x: &[f64], y: &[f64]) -> Result<PowerFit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(FracError::Argument(format!(
            "power-law fit needs at least two paired points, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    let mut lx = Vec::with_capacity(x.len());
    let mut ly = Vec::with_capacity(y.len());
    for (&xi, &yi) in x.iter().zip(y) {
        if !xi.is_finite() || !yi.is_finite() || xi <= 0.0 || yi == 0.0 {
            return Err(FracError::Domain(format!(
                "power-law fit needs positive finite data, got ({xi}, {yi})"
            )));
        }
        lx.push(xi.ln());
        ly.push(yi.abs().ln());
    }
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = ly.iter().map(|v| (v - my) * (v - my)).sum();
    if sxx == 0.0 {
        return Err(FracError::Domain(
            "power-law fit needs distinct abscissae".into(),
        ));
    }
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy) / (sxx * syy)
    };
    Ok(PowerFit {
        exponent,
        coefficient: intercept.exp(),
        r_squared,
    })
}

/// [`fit_power_law`] over the last `count` points.
pub fn fit_tail(x: &[f64], y: &[f64], count: usize) -> Result<PowerFit> {
    if x.len() != y.len() {
        return Err(FracError::Argument("mismatched fit data".into()));
    }
    let start = x.len().saturating_sub(count);
    fit_power_law(&x[start..], &y[start..])
}

/// Observed convergence order from errors at step sizes `h`.
pub fn observed_order(h: &[f64], errors: &[f64]) -> Result<f64> {
    fit_power_law(h, errors).map(|f| f.exponent)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_power() {
        let x = [1.0, 0.5, 0.25, 0.125];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(1.5)).collect();
        let f = fit_power_law(&x, &y).unwrap();
        assert!((f.exponent - 1.5).abs() < 1e-12);
        assert!((f.coefficient - 3.0).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tail_uses_last_points() {
        let x = [1.0, 0.5, 0.25, 0.125, 0.0625];
        let y = [9.0, 9.0, 0.25, 0.125, 0.0625];
        assert!((fit_tail(&x, &y, 3).unwrap().exponent - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_data() {
        assert!(fit_power_law(&[1.0], &[1.0]).is_err());
        assert!(fit_power_law(&[1.0, 0.5], &[0.0, 1.0]).is_err());
        assert!(fit_power_law(&[1.0, 1.0], &[2.0, 1.0]).is_err());
    }
}
