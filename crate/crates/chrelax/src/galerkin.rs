//! The projected system: auxiliary variable w, chemical potential mu, the
//! right-hand side of the first equation, and its linear/nonlinear splitting.
//!
//! For phi in the span of the first n modes,
//!
//! ```text
//!   w  = -Delta phi + beta(phi) - lambda * phi,
//!   mu = -Delta w + beta'(phi) * w + (nu - lambda) * w,
//! ```
//!
//! and the first equation reads tau*phi_tt + phi_t + sigma*phi + Lambda*mu = g
//! coefficient-wise, with Lambda = diag(lambda_k). The implicit/explicit
//! splitting linearizes about phi = 0 (where beta'(0) = 0), giving the
//! diagonal stiffness
//!
//! ```text
//!   A_k = sigma + lambda_k (lambda_k - lambda)(lambda_k + nu - lambda)
//! ```
//!
//! and the remainder N(phi) = Lambda*mu + sigma*phi - A*phi with N(0) = 0.
//! The mode-0 rows of Lambda*mu and N are exactly zero in floating point, so
//! the mean channel evolves by the pure damped scalar equation.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::lab::MmsSolution;
use crate::potential::PotentialSpec;
use crate::spectral::{DomainSpec, SpectralField, Transform};

/// One cosine mode of a forcing series with exponential time dependence.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ForcingTerm {
    pub mode: Vec<usize>,
    pub amp: f64,
    /// g_k(t) = amp * exp(-decay * t); 0 for time-independent forcing.
    pub decay: f64,
}

/// Right-hand-side descriptor.
#[derive(Debug, Clone)]
pub enum ForcingSpec {
    Zero,
    /// Spatially constant forcing with the given pointwise value.
    Constant(f64),
    /// Sum of decaying cosine modes.
    SpectralSeries(Vec<ForcingTerm>),
    /// Forcing that makes `solution` solve the space-discrete system exactly;
    /// built by `lab::mms_forcing`, which owns the construction rules.
    Manufactured { solution: MmsSolution, tau: f64 },
}

/// Immutable assembled system: domain, splitting parameters, forcing, and the
/// cached transform and stiffness data.
#[derive(Debug, Clone)]
pub struct GalerkinSystem {
    domain: DomainSpec,
    potential: PotentialSpec,
    forcing: ForcingSpec,
    n: usize,
    dealias: bool,
    transform: Transform,
    stiffness: Array2<f64>,
    eigenvalues: Array2<f64>,
}

impl GalerkinSystem {
    pub fn new(
        domain: DomainSpec,
        potential: PotentialSpec,
        forcing: ForcingSpec,
        n: usize,
        dealias: bool,
    ) -> Result<Self> {
        domain.validate()?;
        potential.validate_structure()?;
        if n == 0 {
            return Err(Error::InvalidParameter(
                "the projection must retain at least one mode".into(),
            ));
        }
        if let Some(&m) = domain.modes.iter().find(|&&m| n > m) {
            return Err(Error::InvalidParameter(format!(
                "projection size {n} exceeds the domain's {m} retained modes"
            )));
        }
        let transform = if dealias {
            Transform::dealiased(&domain)
        } else {
            Transform::plain(&domain)
        };
        let eigenvalues = domain.eigenvalue_grid();
        let stiffness = eigenvalues.mapv(|lam| {
            stiffness_from_eigenvalue(lam, &potential)
        });
        let system = GalerkinSystem {
            domain,
            potential,
            forcing,
            n,
            dealias,
            transform,
            stiffness,
            eigenvalues,
        };
        system.validate_forcing()?;
        Ok(system)
    }

    fn validate_forcing(&self) -> Result<()> {
        let check_mode = |mode: &[usize]| -> Result<()> {
            if mode.len() != self.domain.dim {
                return Err(Error::InvalidConfig(format!(
                    "forcing mode {mode:?} has wrong dimension for a {}D domain",
                    self.domain.dim
                )));
            }
            for (axis, (&k, &m)) in mode.iter().zip(&self.domain.modes).enumerate() {
                if k >= m.min(self.n) {
                    return Err(Error::InvalidConfig(format!(
                        "forcing mode {mode:?} exceeds the retained band on axis {axis}"
                    )));
                }
            }
            Ok(())
        };
        match &self.forcing {
            ForcingSpec::Zero | ForcingSpec::Constant(_) => Ok(()),
            ForcingSpec::SpectralSeries(terms) => {
                for term in terms {
                    check_mode(&term.mode)?;
                    if !term.amp.is_finite() || !term.decay.is_finite() {
                        return Err(Error::InvalidConfig(
                            "forcing amplitudes and decays must be finite".into(),
                        ));
                    }
                }
                Ok(())
            }
            ForcingSpec::Manufactured { solution, tau } => {
                if !tau.is_finite() || *tau < 0.0 {
                    return Err(Error::InvalidConfig(format!(
                        "manufactured forcing needs tau >= 0, got {tau}"
                    )));
                }
                for term in solution.terms() {
                    check_mode(&term.mode)?;
                }
                Ok(())
            }
        }
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn potential(&self) -> &PotentialSpec {
        &self.potential
    }

    pub fn forcing(&self) -> &ForcingSpec {
        &self.forcing
    }

    pub fn mode_count(&self) -> usize {
        self.n
    }

    pub fn dealias(&self) -> bool {
        self.dealias
    }

    /// The same system driven by a different forcing.
    pub fn with_forcing(&self, forcing: ForcingSpec) -> Result<GalerkinSystem> {
        GalerkinSystem::new(
            self.domain.clone(),
            self.potential.clone(),
            forcing,
            self.n,
            self.dealias,
        )
    }

    /// The cached work-grid transform (dealiased when the flag is set).
    pub(crate) fn transform(&self) -> &Transform {
        &self.transform
    }

    pub(crate) fn stiffness_grid(&self) -> &Array2<f64> {
        &self.stiffness
    }

    /// A_k for one multi-index.
    pub fn linear_stiffness(&self, index: &[usize]) -> f64 {
        stiffness_from_eigenvalue(self.domain.eigenvalue(index), &self.potential)
    }

    /// Project onto the retained band (no-op when n equals the domain modes).
    fn band_limit(&self, field: &mut SpectralField) {
        field.project_in_place(self.n);
    }

    /// w and mu in one pass (two syntheses, two analyses when beta != 0).
    pub fn assemble(&self, phi: &SpectralField) -> Result<(SpectralField, SpectralField)> {
        let lambda = self.potential.lambda;
        let nu = self.potential.nu;
        if self.potential.beta_coeffs.is_empty() {
            let w = phi.map_eig(|lam, c| (lam - lambda) * c);
            let mu = w.map_eig(|lam, c| (lam + nu - lambda) * c);
            return Ok((w, mu));
        }

        let phi_grid = self.transform.inverse(phi);
        let beta_grid = phi_grid.map(|s| self.potential.beta(s));
        if !beta_grid.values().iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite {
                context: "beta(phi)",
                max_abs: phi_grid.max_abs(),
            });
        }
        let mut beta_hat = self.transform.forward(&beta_grid)?;
        self.band_limit(&mut beta_hat);
        let w = phi
            .map_eig(|lam, c| (lam - lambda) * c)
            .add(&beta_hat)?;

        let w_grid = self.transform.inverse(&w);
        let mut prod_values = phi_grid.values().clone();
        prod_values.zip_mut_with(w_grid.values(), |p, &wv| {
            *p = self.potential.beta_prime(*p) * wv;
        });
        if !prod_values.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite {
                context: "beta'(phi) * w",
                max_abs: phi_grid.max_abs().max(w_grid.max_abs()),
            });
        }
        let prod_grid = crate::spectral::GridField::from_values(&self.domain, prod_values);
        let mut prod_hat = self.transform.forward(&prod_grid)?;
        self.band_limit(&mut prod_hat);
        let mu = w
            .map_eig(|lam, c| (lam + nu - lambda) * c)
            .add(&prod_hat)?;
        Ok((w, mu))
    }

    /// w = -Delta phi + beta(phi) - lambda*phi, band-limited.
    pub fn compute_w(&self, phi: &SpectralField) -> Result<SpectralField> {
        let lambda = self.potential.lambda;
        if self.potential.beta_coeffs.is_empty() {
            return Ok(phi.map_eig(|lam, c| (lam - lambda) * c));
        }
        let mut beta_hat = crate::spectral::nonlinear_apply(
            phi,
            |s| self.potential.beta(s),
            self.dealias,
            "beta(phi)",
        )?;
        self.band_limit(&mut beta_hat);
        phi.map_eig(|lam, c| (lam - lambda) * c).add(&beta_hat)
    }

    /// mu = -Delta w + beta'(phi) w + (nu - lambda) w, band-limited.
    pub fn compute_mu(&self, phi: &SpectralField) -> Result<SpectralField> {
        Ok(self.assemble(phi)?.1)
    }

    /// Forcing coefficients at time t, band-limited by construction.
    pub fn forcing_at(&self, t: f64) -> Result<SpectralField> {
        match &self.forcing {
            ForcingSpec::Zero => Ok(SpectralField::zeros(&self.domain)),
            ForcingSpec::Constant(value) => Ok(SpectralField::constant(&self.domain, *value)),
            ForcingSpec::SpectralSeries(terms) => {
                let mut g = SpectralField::zeros(&self.domain);
                for term in terms {
                    let prev = g.coeff(&term.mode)?;
                    g.set_coeff(&term.mode, prev + term.amp * (-term.decay * t).exp())?;
                }
                Ok(g)
            }
            ForcingSpec::Manufactured { solution, tau } => {
                let phi_star = solution.phi_at(&self.domain, t)?;
                let mu_star = self.compute_mu(&phi_star)?;
                // g = tau*phi_tt + phi_t + sigma*phi + Lambda*mu, all on the
                // manufactured trajectory.
                let mut g = solution.phi_dtt_at(&self.domain, t)?.scale(*tau);
                g = g.add(&solution.phi_dt_at(&self.domain, t)?)?;
                g = g.add(&phi_star.scale(self.potential.sigma))?;
                g = g.add(&mu_star.map_eig(|lam, c| lam * c))?;
                Ok(g)
            }
        }
    }

    /// N(phi) = Lambda*mu + sigma*phi - A*phi; the mode-0 entry is exactly
    /// zero because A_0 stores exactly sigma.
    pub fn nonlinear_remainder(&self, phi: &SpectralField) -> Result<SpectralField> {
        let mu = self.compute_mu(phi)?;
        let sigma = self.potential.sigma;
        let mut out = SpectralField::zeros(&self.domain);
        let coeffs = out.coeffs_mut();
        for (((n_val, &mu_k), &phi_k), (&lam, &a)) in coeffs
            .iter_mut()
            .zip(mu.coeffs().iter())
            .zip(phi.coeffs().iter())
            .zip(self.eigenvalues.iter().zip(self.stiffness.iter()))
        {
            *n_val = lam * mu_k + sigma * phi_k - a * phi_k;
        }
        Ok(out)
    }

    /// g(t) - A*phi - N(phi), the explicit right-hand side of the first
    /// equation. Computed through the same splitting arithmetic the steppers
    /// use, so rhs + A*phi + N recovers g coefficient-exactly.
    pub fn rhs_first_equation(&self, phi: &SpectralField, t: f64) -> Result<SpectralField> {
        let g = self.forcing_at(t)?;
        let n = self.nonlinear_remainder(phi)?;
        let mut out = SpectralField::zeros(&self.domain);
        let coeffs = out.coeffs_mut();
        for ((((r, &g_k), &phi_k), &n_k), &a) in coeffs
            .iter_mut()
            .zip(g.coeffs().iter())
            .zip(phi.coeffs().iter())
            .zip(n.coeffs().iter())
            .zip(self.stiffness.iter())
        {
            *r = g_k - a * phi_k - n_k;
        }
        Ok(out)
    }
}

/// A_k = sigma + lambda_k (lambda_k - lambda)(lambda_k + nu - lambda).
///
/// For lambda_k = 0 every product term is a signed zero, so the result is
/// bitwise equal to sigma; the mean channel sees exactly the scalar damping.
pub fn stiffness_from_eigenvalue(lambda_k: f64, potential: &PotentialSpec) -> f64 {
    potential.sigma
        + lambda_k * (lambda_k - potential.lambda) * (lambda_k + potential.nu - potential.lambda)
}
