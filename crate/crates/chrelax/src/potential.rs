//! Double-well potential splitting.
//!
//! The potential is handled through the splitting
//!
//! ```text
//!   f(s) = beta(s) - lambda * s,          F(s) = beta_hat(s) - lambda * s^2 / 2,
//! ```
//!
//! where beta is an odd polynomial with nonnegative coefficients and degrees
//! >= 3 (so beta(0) = beta''(0) = 0 and beta''' >= 0 hold by construction),
//! lambda > 0 is the concave shift, and beta_hat is the primitive of beta with
//! the constant pinned so the classical case beta(s) = s^3, lambda = 1 gives
//! F(s) = (s^2 - 1)^2 / 4. sigma > 0 damps the order parameter itself and nu
//! weights the gradient part of the energy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Convex-part polynomial plus the quadratic splitting parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    /// `(degree, coefficient)` pairs of beta; degrees odd and >= 3.
    pub beta_coeffs: Vec<(u32, f64)>,
    /// Concave shift; strictly positive.
    pub lambda: f64,
    /// Weight of the gradient / well part of the energy.
    pub nu: f64,
    /// Zeroth-order damping; strictly positive outside diagnostic mode.
    pub sigma: f64,
    /// Relaxes sigma > 0 and beta != 0 for oracle runs. Reported by
    /// [`PotentialSpec::validate_assumptions`], never silent.
    #[serde(default)]
    pub diagnostic: bool,
}

/// Numeric summary of the structural assumptions over a symmetric sample range.
#[derive(Debug, Clone, Serialize)]
pub struct AssumptionReport {
    /// beta(0) = 0 and beta''(0) = 0.
    pub odd_at_origin: bool,
    /// min of beta''' over the sampled range.
    pub beta_third_min: f64,
    /// beta'(s)/|s| at the range edge divided by its value at half range;
    /// > 1 means superlinear growth is visible in the sample.
    pub superlinearity_ratio: f64,
    /// Smallest C with |beta''| <= C * (|beta'| + 1) over the sample.
    pub c_beta: f64,
    /// Whether the spec was built in diagnostic mode.
    pub diagnostic: bool,
    /// All structural checks passed (always false for beta = 0 outside the
    /// trivial origin conditions; diagnostic specs report their failures).
    pub pass: bool,
}

impl PotentialSpec {
    /// Validating constructor. Errors on even or sub-cubic degrees, duplicate
    /// degrees, negative leading coefficients, lambda <= 0, or sigma <= 0.
    pub fn new(beta_coeffs: Vec<(u32, f64)>, lambda: f64, nu: f64, sigma: f64) -> Result<Self> {
        let spec = PotentialSpec {
            beta_coeffs,
            lambda,
            nu,
            sigma,
            diagnostic: false,
        };
        spec.validate_structure()?;
        Ok(spec)
    }

    /// Permissive constructor for oracle runs: allows sigma = 0 and beta = 0.
    /// Everything else is still validated.
    pub fn diagnostic(beta_coeffs: Vec<(u32, f64)>, lambda: f64, nu: f64, sigma: f64) -> Result<Self> {
        let spec = PotentialSpec {
            beta_coeffs,
            lambda,
            nu,
            sigma,
            diagnostic: true,
        };
        spec.validate_structure()?;
        Ok(spec)
    }

    /// The classical quartic well: beta(s) = s^3, lambda = 1.
    pub fn classical(nu: f64, sigma: f64) -> Result<Self> {
        PotentialSpec::new(vec![(3, 1.0)], 1.0, nu, sigma)
    }

    /// Structure checks shared by both constructors (run again after
    /// deserialization via [`PotentialSpec::validate_structure`]).
    pub fn validate_structure(&self) -> Result<()> {
        if !self.lambda.is_finite() || self.lambda <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "lambda must be finite and > 0, got {}",
                self.lambda
            )));
        }
        if !self.nu.is_finite() {
            return Err(Error::InvalidParameter("nu must be finite".into()));
        }
        if !self.sigma.is_finite() || self.sigma < 0.0 || (self.sigma == 0.0 && !self.diagnostic) {
            return Err(Error::InvalidParameter(format!(
                "sigma must be > 0 (>= 0 in diagnostic mode), got {}",
                self.sigma
            )));
        }
        if self.beta_coeffs.is_empty() && !self.diagnostic {
            return Err(Error::InvalidParameter(
                "beta must have at least one term outside diagnostic mode".into(),
            ));
        }
        let mut seen = Vec::new();
        for &(degree, coeff) in &self.beta_coeffs {
            if degree < 3 || degree % 2 == 0 {
                return Err(Error::InvalidParameter(format!(
                    "beta degrees must be odd and >= 3, got {degree}"
                )));
            }
            if !coeff.is_finite() || coeff < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "beta coefficient for degree {degree} must be finite and >= 0, got {coeff}"
                )));
            }
            if seen.contains(&degree) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate beta degree {degree}"
                )));
            }
            seen.push(degree);
        }
        let leading = self
            .beta_coeffs
            .iter()
            .max_by_key(|(d, _)| *d)
            .map(|&(_, c)| c);
        if let Some(c) = leading {
            if c == 0.0 && !self.diagnostic {
                return Err(Error::InvalidParameter(
                    "leading beta coefficient must be > 0".into(),
                ));
            }
        }
        Ok(())
    }

    /// beta and its first three derivatives. `order` > 3 is an argument error.
    pub fn beta_eval(&self, s: f64, order: u32) -> Result<f64> {
        if order > 3 {
            return Err(Error::InvalidParameter(format!(
                "beta_eval supports orders 0..=3, got {order}"
            )));
        }
        let mut acc = 0.0;
        for &(degree, coeff) in &self.beta_coeffs {
            let mut factor = coeff;
            for r in 0..order {
                factor *= (degree - r) as f64;
            }
            acc += factor * s.powi((degree - order) as i32);
        }
        Ok(acc)
    }

    /// beta(s); hot-path form of `beta_eval(s, 0)`.
    #[inline]
    pub fn beta(&self, s: f64) -> f64 {
        let mut acc = 0.0;
        for &(degree, coeff) in &self.beta_coeffs {
            acc += coeff * s.powi(degree as i32);
        }
        acc
    }

    /// beta'(s); hot-path form of `beta_eval(s, 1)`.
    #[inline]
    pub fn beta_prime(&self, s: f64) -> f64 {
        let mut acc = 0.0;
        for &(degree, coeff) in &self.beta_coeffs {
            acc += coeff * degree as f64 * s.powi(degree as i32 - 1);
        }
        acc
    }

    /// Primitive of beta with the classical constant: for a single cubic term
    /// a*s^3 the constant is lambda^2/(4a) so that F >= 0 with wells at the
    /// minima; otherwise the constant is 0.
    pub fn beta_hat(&self, s: f64) -> f64 {
        let mut acc = self.well_offset();
        for &(degree, coeff) in &self.beta_coeffs {
            acc += coeff * s.powi(degree as i32 + 1) / (degree as f64 + 1.0);
        }
        acc
    }

    fn well_offset(&self) -> f64 {
        match self.beta_coeffs.as_slice() {
            [(3, a)] if *a > 0.0 => self.lambda * self.lambda / (4.0 * a),
            _ => 0.0,
        }
    }

    /// f(s) = beta(s) - lambda * s.
    #[inline]
    pub fn f_eval(&self, s: f64) -> f64 {
        self.beta(s) - self.lambda * s
    }

    /// F(s) = beta_hat(s) - lambda * s^2 / 2.
    #[inline]
    pub fn big_f_eval(&self, s: f64) -> f64 {
        self.beta_hat(s) - 0.5 * self.lambda * s * s
    }

    /// Sample the structural assumptions on `[-s_max, s_max]` with `samples`
    /// points per side and report the margins instead of panicking.
    pub fn validate_assumptions(&self, s_max: f64, samples: usize) -> AssumptionReport {
        let n = samples.max(8);
        let beta0 = self.beta(0.0);
        let beta2_at0 = self.beta_eval(0.0, 2).unwrap();
        let odd_at_origin = beta0 == 0.0 && beta2_at0 == 0.0;

        let mut beta_third_min = f64::INFINITY;
        let mut c_beta = 0.0f64;
        for i in 0..=n {
            let s = -s_max + 2.0 * s_max * i as f64 / n as f64;
            let b1 = self.beta_prime(s);
            let b2 = self.beta_eval(s, 2).unwrap();
            let b3 = self.beta_eval(s, 3).unwrap();
            beta_third_min = beta_third_min.min(b3);
            c_beta = c_beta.max(b2.abs() / (b1.abs() + 1.0));
        }

        let edge = self.beta_prime(s_max) / s_max.max(f64::MIN_POSITIVE);
        let half = self.beta_prime(0.5 * s_max) / (0.5 * s_max).max(f64::MIN_POSITIVE);
        let superlinearity_ratio = if half > 0.0 { edge / half } else { 0.0 };

        let pass = odd_at_origin
            && beta_third_min >= -1e-12
            && superlinearity_ratio > 1.2
            && self.sigma > 0.0
            && !self.beta_coeffs.is_empty();
        AssumptionReport {
            odd_at_origin,
            beta_third_min,
            superlinearity_ratio,
            c_beta,
            diagnostic: self.diagnostic,
            pass,
        }
    }
}
