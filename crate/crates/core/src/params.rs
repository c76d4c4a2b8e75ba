use num_rational::BigRational;
use num_traits::FromPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Elastic constants `(μ, λ)` and the coefficients derived from them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct LameParams {
    mu: f64,
    lambda: f64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    mu: f64,
    lambda: f64,
}

impl TryFrom<RawParams> for LameParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        LameParams::new(raw.mu, raw.lambda)
    }
}

impl From<LameParams> for RawParams {
    fn from(p: LameParams) -> Self {
        RawParams {
            mu: p.mu,
            lambda: p.lambda,
        }
    }
}

impl Default for LameParams {
    fn default() -> Self {
        LameParams {
            mu: 1.0,
            lambda: 1.0,
        }
    }
}

impl LameParams {
    /// Accepts `μ > 0` and `λ > -2μ/3`.
    pub fn new(mu: f64, lambda: f64) -> Result<Self> {
        if !(mu.is_finite() && lambda.is_finite()) {
            return Err(Error::Config(format!(
                "non-finite Lamé parameters μ = {mu}, λ = {lambda}"
            )));
        }
        if mu <= 0.0 {
            return Err(Error::Config(format!("μ must be positive, got {mu}")));
        }
        if lambda <= -2.0 * mu / 3.0 {
            return Err(Error::Config(format!(
                "λ must exceed -2μ/3 = {}, got {lambda}",
                -2.0 * mu / 3.0
            )));
        }
        debug_assert!(2.0 * mu + lambda > 0.0);
        Ok(LameParams { mu, lambda })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `a = (μ+λ)/2`, the weight of `D f D`.
    pub fn a(&self) -> f64 {
        (self.mu + self.lambda) / 2.0
    }

    /// `b = (3μ+λ)/2`, the weight of `D D f`.
    pub fn b(&self) -> f64 {
        (3.0 * self.mu + self.lambda) / 2.0
    }

    /// `c_I = (μ+λ) / (2μ(2μ+λ))`.
    pub fn c_i(&self) -> f64 {
        (self.mu + self.lambda) / (2.0 * self.mu * (2.0 * self.mu + self.lambda))
    }

    /// `c_H = (3μ+λ) / (2μ(2μ+λ))`.
    pub fn c_h(&self) -> f64 {
        (3.0 * self.mu + self.lambda) / (2.0 * self.mu * (2.0 * self.mu + self.lambda))
    }

    /// Exact rational images of `μ` and `λ` (every finite double is a dyadic rational).
    pub(crate) fn exact(&self) -> (BigRational, BigRational) {
        let mu = BigRational::from_f64(self.mu).expect("finite μ");
        let lambda = BigRational::from_f64(self.lambda).expect("finite λ");
        (mu, lambda)
    }

    /// Exact `(a, b)`.
    pub(crate) fn exact_ab(&self) -> (BigRational, BigRational) {
        let (mu, lambda) = self.exact();
        let two = BigRational::from_integer(2.into());
        let three = BigRational::from_integer(3.into());
        let a = (&mu + &lambda) / &two;
        let b = (three * &mu + &lambda) / two;
        (a, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_coefficients() {
        let p = LameParams::new(1.0, 1.0).unwrap();
        assert_eq!(p.a(), 1.0);
        assert_eq!(p.b(), 2.0);
        assert!((p.c_i() - 1.0 / 3.0).abs() < 1e-15);
        assert!((p.c_h() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn nondegeneracy_holds_on_admissible_range() {
        for &(mu, lambda) in &[(1.0, 1.0), (0.5, -0.3), (2.0, 10.0), (1.0, -0.66)] {
            let p = LameParams::new(mu, lambda).unwrap();
            assert!(p.b() - p.a() > 0.0);
            assert!(p.a() + p.b() > 0.0);
        }
    }

    #[test]
    fn inadmissible_parameters_are_config_errors() {
        assert!(matches!(LameParams::new(0.0, 1.0), Err(Error::Config(_))));
        assert!(matches!(LameParams::new(1.0, -0.7), Err(Error::Config(_))));
        assert!(matches!(
            LameParams::new(f64::NAN, 1.0),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn json_rejects_inadmissible_values() {
        assert!(serde_json::from_str::<LameParams>(r#"{"mu":1.0,"lambda":1.0}"#).is_ok());
        assert!(serde_json::from_str::<LameParams>(r#"{"mu":-1.0,"lambda":1.0}"#).is_err());
    }
}
