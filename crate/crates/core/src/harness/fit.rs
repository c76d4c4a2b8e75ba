//! Log-log regression for power-law exponents.

use serde::Serialize;

use crate::error::{Error, Result};

/// Fewest `(separation, residual)` pairs accepted by [`fit_exponent`].
pub const MIN_PAIRS: usize = 20;
/// Smallest accepted spread of separations, in decades.
pub const MIN_DECADES: f64 = 1.0;

/// Least-squares fit of `log residual = exponent · log separation + intercept`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentFit {
    pub exponent: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub pairs: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// Slope of `log(residual)` against `log(separation)`.
///
/// Pairs with a non-positive residual carry no information on a log scale and
/// are dropped before the size and spread checks.
pub fn fit_exponent(pairs: &[(f64, f64)]) -> Result<ExponentFit> {
    let logs: Vec<(f64, f64)> = pairs
        .iter()
        .filter(|(s, r)| *s > 0.0 && *r > 0.0 && s.is_finite() && r.is_finite())
        .map(|(s, r)| (s.ln(), r.ln()))
        .collect();
    if logs.len() < MIN_PAIRS {
        return Err(Error::InsufficientData(format!(
            "{} usable pairs, at least {MIN_PAIRS} required",
            logs.len()
        )));
    }
    let (lo, hi) = logs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (x, _)| {
            (lo.min(*x), hi.max(*x))
        });
    let decades = (hi - lo) / std::f64::consts::LN_10;
    if decades < MIN_DECADES {
        return Err(Error::InsufficientData(format!(
            "separations span {decades:.2} decades, at least {MIN_DECADES} required"
        )));
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = logs.iter().map(|(_, y)| (y - my).powi(2)).sum();
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let ss_res: f64 = logs
        .iter()
        .map(|(x, y)| (y - intercept - exponent * x).powi(2))
        .sum();
    let flat = syy <= 1e-24 * n;
    let r_squared = if flat { 0.0 } else { 1.0 - ss_res / syy };
    let warning =
        flat.then(|| "residuals are constant; the exponent carries no information".to_string());
    Ok(ExponentFit {
        exponent,
        intercept,
        r_squared,
        pairs: logs.len(),
        warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn separations(n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| 10f64.powf(-2.0 + 2.0 * i as f64 / (n - 1) as f64))
            .collect()
    }

    #[test]
    fn exact_power_law() {
        let pairs: Vec<_> = separations(30)
            .into_iter()
            .map(|s| (s, 3.0 * s * s))
            .collect();
        let fit = fit_exponent(&pairs).unwrap();
        assert!((fit.exponent - 2.0).abs() < 0.01);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!(fit.warning.is_none());
    }

    #[test]
    fn noisy_power_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let pairs: Vec<_> = separations(60)
            .into_iter()
            .map(|s| (s, s.powf(1.5) * (1.0 + 0.1 * rng.random_range(-1.0..1.0))))
            .collect();
        let fit = fit_exponent(&pairs).unwrap();
        assert!((fit.exponent - 1.5).abs() < 0.1);
    }

    #[test]
    fn constant_residuals_warn() {
        let pairs: Vec<_> = separations(25).into_iter().map(|s| (s, 0.3)).collect();
        let fit = fit_exponent(&pairs).unwrap();
        assert!(fit.exponent.abs() < 1e-12);
        assert!(fit.warning.is_some());
    }

    #[test]
    fn too_few_or_too_narrow() {
        let few: Vec<_> = separations(10).into_iter().map(|s| (s, s)).collect();
        assert!(matches!(
            fit_exponent(&few),
            Err(Error::InsufficientData(_))
        ));
        let narrow: Vec<_> = (0..30)
            .map(|i| (1.0 + 0.1 * i as f64, 1.0 + i as f64))
            .collect();
        assert!(matches!(
            fit_exponent(&narrow),
            Err(Error::InsufficientData(_))
        ));
    }
}
