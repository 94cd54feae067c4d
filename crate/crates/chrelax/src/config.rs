//! Experiment configuration: TOML schema, validation, and assembly of the
//! runtime objects (domain, system, initial state, step and sweep plans).

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::galerkin::{ForcingSpec, ForcingTerm, GalerkinSystem};
use crate::integrate::{init_state, Scheme, SolverState, StepConfig};
use crate::lab::{mms_forcing, MmsSolution, MmsTerm, SweepPlan};
use crate::potential::PotentialSpec;
use crate::spectral::{DomainSpec, SpectralField, DEALIAS_MIN_RATIO};

fn default_true() -> bool {
    true
}

/// `[domain]`: box geometry plus the dealiasing policy for nonlinear terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub dim: usize,
    pub lengths: Vec<f64>,
    pub modes: Vec<usize>,
    /// Collocation points per axis; defaults to ceil(1.5 * modes) with
    /// dealiasing and to `modes` without.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<usize>>,
    #[serde(default = "default_true")]
    pub dealias: bool,
}

impl DomainConfig {
    pub fn build(&self) -> Result<DomainSpec> {
        if self.dim == 0 || self.dim > 2 {
            return Err(Error::InvalidConfig(format!(
                "domain.dim must be 1 or 2, got {}",
                self.dim
            )));
        }
        let grid = match &self.grid {
            Some(grid) => grid.clone(),
            None => self
                .modes
                .iter()
                .map(|&m| {
                    if self.dealias {
                        (DEALIAS_MIN_RATIO * m as f64).ceil() as usize
                    } else {
                        m
                    }
                })
                .collect(),
        };
        let spec = DomainSpec {
            dim: self.dim,
            lengths: self.lengths.clone(),
            modes: self.modes.clone(),
            grid,
        };
        spec.validate()?;
        if self.dealias {
            for (axis, (&g, &m)) in spec.grid.iter().zip(&spec.modes).enumerate() {
                let needed = (DEALIAS_MIN_RATIO * m as f64).ceil() as usize;
                if g < needed {
                    return Err(Error::InvalidConfig(format!(
                        "domain.grid[{axis}] = {g} is too coarse for dealiased \
                         products with {m} modes; need at least {needed}"
                    )));
                }
            }
        }
        Ok(spec)
    }
}

/// `[run]`: relaxation parameter(s), scheme, and time stepping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// One relaxation parameter for a single run; exclusive with `tau_list`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    /// Strictly decreasing ladder for a sweep; exclusive with `tau`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_list: Option<Vec<f64>>,
    pub scheme: Scheme,
    pub dt: f64,
    pub t_final: f64,
    pub save_every: f64,
    #[serde(default = "default_true")]
    pub guard: bool,
    /// Step size of the parabolic reference in a sweep; defaults to `dt`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_dt: Option<f64>,
    /// Scheme of the parabolic reference in a sweep; defaults to the
    /// second-order one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_scheme: Option<Scheme>,
}

/// One cosine product: amp * prod_i cos(k_i pi x_i / L_i).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeAmp {
    pub mode: Vec<usize>,
    pub amp: f64,
}

/// Initial field recipes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldInit {
    Zero,
    /// Flat row-major coefficient vector over the full mode grid.
    Coeffs { values: Vec<f64> },
    /// Sum of plain cosine products (amplitudes in physical units, converted
    /// to orthonormal coefficients internally).
    Cosines { terms: Vec<ModeAmp> },
    /// Independent uniform coefficients in [-amplitude, amplitude], drawn
    /// from the seeded generator.
    Random { amplitude: f64 },
}

/// `[initial]`: initial order parameter and, for tau > 0, initial velocity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    /// Seed for `random` recipes; defaults to 0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub phi: FieldInit,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<FieldInit>,
}

/// `[forcing]`: right-hand-side recipes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ForcingConfig {
    Zero,
    Constant { value: f64 },
    Spectral { terms: Vec<ForcingTerm> },
    /// Forcing manufactured so the given modal trajectory solves the system
    /// exactly at the configured tau.
    Manufactured { terms: Vec<MmsTerm> },
}

impl Default for ForcingConfig {
    fn default() -> Self {
        ForcingConfig::Zero
    }
}

/// `[output]`: artifact placement defaults (the command line can override).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    /// Label used in artifact file names; defaults to the scheme name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag: Option<String>,
}

/// A full experiment: everything needed to reproduce a run or sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub domain: DomainConfig,
    pub potential: PotentialSpec,
    pub run: RunConfig,
    pub initial: InitialConfig,
    #[serde(default)]
    pub forcing: ForcingConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

/// Assembled single run: hand the pieces straight to [`crate::integrate::run`].
#[derive(Debug)]
pub struct SingleRun {
    pub system: GalerkinSystem,
    pub state: SolverState,
    pub cfg: StepConfig,
    pub t_final: f64,
    pub save_every: f64,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::ConfigParse(e.to_string()))
    }

    /// SHA-256 of the canonical JSON form, hex-encoded; stable across
    /// reruns and whitespace-only edits of the TOML source.
    pub fn canonical_hash(&self) -> Result<String> {
        let json = serde_json::to_string(self)?;
        let digest = Sha256::digest(json.as_bytes());
        Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
    }

    pub fn is_sweep(&self) -> bool {
        self.run.tau_list.is_some()
    }

    pub fn validate(&self) -> Result<()> {
        let domain = self.domain.build()?;
        self.potential.validate_structure()?;

        match (self.run.tau, &self.run.tau_list) {
            (Some(_), Some(_)) => {
                return Err(Error::InvalidConfig(
                    "run.tau and run.tau_list are mutually exclusive".into(),
                ))
            }
            (None, None) => {
                return Err(Error::InvalidConfig(
                    "one of run.tau or run.tau_list is required".into(),
                ))
            }
            (Some(tau), None) => {
                if !tau.is_finite() || !(0.0..1.0).contains(&tau) {
                    return Err(Error::InvalidConfig(format!(
                        "run.tau must lie in [0, 1), got {tau}"
                    )));
                }
                if tau > 0.0 && !self.run.scheme.is_hyperbolic() {
                    return Err(Error::InvalidConfig(
                        "tau > 0 needs the hyperbolic scheme".into(),
                    ));
                }
                if tau == 0.0 && self.run.scheme.is_hyperbolic() {
                    return Err(Error::InvalidConfig(
                        "tau = 0 needs a parabolic scheme".into(),
                    ));
                }
            }
            (None, Some(list)) => {
                if list.len() < 3 {
                    return Err(Error::InvalidConfig(format!(
                        "run.tau_list needs at least 3 values, got {}",
                        list.len()
                    )));
                }
                for pair in list.windows(2) {
                    if pair[1] >= pair[0] {
                        return Err(Error::InvalidConfig(
                            "run.tau_list must be strictly decreasing".into(),
                        ));
                    }
                }
                for &tau in list {
                    if !tau.is_finite() || tau <= 0.0 || tau >= 1.0 {
                        return Err(Error::InvalidConfig(format!(
                            "run.tau_list values must lie in (0, 1), got {tau}"
                        )));
                    }
                }
                if !self.run.scheme.is_hyperbolic() {
                    return Err(Error::InvalidConfig(
                        "sweeps need the hyperbolic scheme".into(),
                    ));
                }
                if let Some(reference) = self.run.reference_scheme {
                    if reference.is_hyperbolic() {
                        return Err(Error::InvalidConfig(
                            "run.reference_scheme must be parabolic".into(),
                        ));
                    }
                }
                if matches!(self.forcing, ForcingConfig::Manufactured { .. }) {
                    return Err(Error::InvalidConfig(
                        "manufactured forcing is tied to one tau and cannot drive a sweep".into(),
                    ));
                }
            }
        }

        for (name, value) in [
            ("run.dt", self.run.dt),
            ("run.save_every", self.run.save_every),
        ] {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be finite and > 0, got {value}"
                )));
            }
        }
        if let Some(dt) = self.run.reference_dt {
            if !dt.is_finite() || dt <= 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "run.reference_dt must be finite and > 0, got {dt}"
                )));
            }
        }
        if !self.run.t_final.is_finite() || self.run.t_final < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "run.t_final must be finite and >= 0, got {}",
                self.run.t_final
            )));
        }

        if self.run.tau == Some(0.0) && self.initial.rho.is_some() {
            return Err(Error::InvalidConfig(
                "initial.rho is meaningless at tau = 0".into(),
            ));
        }
        self.check_field_init(&self.initial.phi, &domain, "initial.phi")?;
        if let Some(rho) = &self.initial.rho {
            self.check_field_init(rho, &domain, "initial.rho")?;
        }

        match &self.forcing {
            ForcingConfig::Zero => {}
            ForcingConfig::Constant { value } => {
                if !value.is_finite() {
                    return Err(Error::InvalidConfig(
                        "forcing.value must be finite".into(),
                    ));
                }
            }
            ForcingConfig::Spectral { terms } => {
                if terms.is_empty() {
                    return Err(Error::InvalidConfig(
                        "spectral forcing needs at least one term".into(),
                    ));
                }
            }
            ForcingConfig::Manufactured { terms } => {
                if terms.is_empty() {
                    return Err(Error::InvalidConfig(
                        "manufactured forcing needs at least one term".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    fn check_field_init(&self, init: &FieldInit, domain: &DomainSpec, name: &str) -> Result<()> {
        match init {
            FieldInit::Zero => Ok(()),
            FieldInit::Coeffs { values } => {
                let (m1, m2) = domain.mode_shape();
                if values.len() != m1 * m2 {
                    return Err(Error::InvalidConfig(format!(
                        "{name}.values has {} entries; the mode grid holds {}",
                        values.len(),
                        m1 * m2
                    )));
                }
                if !values.iter().all(|v| v.is_finite()) {
                    return Err(Error::InvalidConfig(format!(
                        "{name}.values must be finite"
                    )));
                }
                Ok(())
            }
            FieldInit::Cosines { terms } => {
                if terms.is_empty() {
                    return Err(Error::InvalidConfig(format!(
                        "{name} needs at least one cosine term"
                    )));
                }
                for term in terms {
                    if term.mode.len() != domain.dim {
                        return Err(Error::InvalidConfig(format!(
                            "{name} mode {:?} has wrong dimension",
                            term.mode
                        )));
                    }
                    for (axis, (&k, &m)) in term.mode.iter().zip(&domain.modes).enumerate() {
                        if k >= m {
                            return Err(Error::InvalidConfig(format!(
                                "{name} mode {:?} exceeds modes[{axis}] = {m}",
                                term.mode
                            )));
                        }
                    }
                    if !term.amp.is_finite() {
                        return Err(Error::InvalidConfig(format!(
                            "{name} amplitudes must be finite"
                        )));
                    }
                }
                Ok(())
            }
            FieldInit::Random { amplitude } => {
                if !amplitude.is_finite() || *amplitude < 0.0 {
                    return Err(Error::InvalidConfig(format!(
                        "{name}.amplitude must be finite and >= 0, got {amplitude}"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Build the system with the configured forcing. Manufactured forcing is
    /// constructed against the band of this very system.
    pub fn build_system(&self) -> Result<GalerkinSystem> {
        self.validate()?;
        let domain = self.domain.build()?;
        let n = *domain.modes.iter().min().expect("validated dim >= 1");
        let base = GalerkinSystem::new(
            domain,
            self.potential.clone(),
            ForcingSpec::Zero,
            n,
            self.domain.dealias,
        )?;
        let forcing = match &self.forcing {
            ForcingConfig::Zero => ForcingSpec::Zero,
            ForcingConfig::Constant { value } => ForcingSpec::Constant(*value),
            ForcingConfig::Spectral { terms } => ForcingSpec::SpectralSeries(terms.clone()),
            ForcingConfig::Manufactured { terms } => {
                let solution = MmsSolution::new(terms.clone())?;
                let tau = self.run.tau.expect("validation rejects sweeps here");
                mms_forcing(solution, &base, tau)?
            }
        };
        base.with_forcing(forcing)
    }

    fn build_field(&self, init: &FieldInit, domain: &DomainSpec, salt: u64) -> Result<SpectralField> {
        match init {
            FieldInit::Zero => Ok(SpectralField::zeros(domain)),
            FieldInit::Coeffs { values } => SpectralField::from_flat(domain, values),
            FieldInit::Cosines { terms } => {
                let mut field = SpectralField::zeros(domain);
                for term in terms {
                    let mut coeff = term.amp;
                    for (&k, &length) in term.mode.iter().zip(&domain.lengths) {
                        coeff *= if k == 0 {
                            length.sqrt()
                        } else {
                            (0.5 * length).sqrt()
                        };
                    }
                    let prev = field.coeff(&term.mode)?;
                    field.set_coeff(&term.mode, prev + coeff)?;
                }
                Ok(field)
            }
            FieldInit::Random { amplitude } => {
                let seed = self.initial.seed.unwrap_or(0).wrapping_add(salt);
                let mut rng = ChaCha12Rng::seed_from_u64(seed);
                let (m1, m2) = domain.mode_shape();
                let values: Vec<f64> = (0..m1 * m2)
                    .map(|_| amplitude * rng.random_range(-1.0..=1.0))
                    .collect();
                SpectralField::from_flat(domain, &values)
            }
        }
    }

    pub fn initial_phi(&self, domain: &DomainSpec) -> Result<SpectralField> {
        self.build_field(&self.initial.phi, domain, 0)
    }

    /// The initial velocity; zero when the section is absent.
    pub fn initial_rho(&self, domain: &DomainSpec) -> Result<SpectralField> {
        match &self.initial.rho {
            Some(init) => self.build_field(init, domain, 1),
            None => Ok(SpectralField::zeros(domain)),
        }
    }

    /// Assemble a single (non-sweep) run.
    pub fn build_single(&self) -> Result<SingleRun> {
        let system = self.build_system()?;
        let tau = self.run.tau.ok_or_else(|| {
            Error::InvalidConfig("this configuration is a sweep; run it as one".into())
        })?;
        let phi0 = self.initial_phi(system.domain())?;
        let state = if tau > 0.0 {
            let rho0 = self.initial_rho(system.domain())?;
            init_state(&phi0, Some(&rho0), tau, system.mode_count())?
        } else {
            init_state(&phi0, None, tau, system.mode_count())?
        };
        let cfg = StepConfig {
            dt: self.run.dt,
            scheme: self.run.scheme,
            guard: self.run.guard,
        };
        Ok(SingleRun {
            system,
            state,
            cfg,
            t_final: self.run.t_final,
            save_every: self.run.save_every,
        })
    }

    /// Assemble a sweep plan.
    pub fn build_sweep(&self) -> Result<SweepPlan> {
        let system = self.build_system()?;
        let tau_list = self.run.tau_list.clone().ok_or_else(|| {
            Error::InvalidConfig("this configuration is a single run, not a sweep".into())
        })?;
        let phi0 = self.initial_phi(system.domain())?;
        let rho0 = self.initial_rho(system.domain())?;
        let plan = SweepPlan {
            system,
            phi0,
            rho0,
            tau_list,
            scheme: self.run.scheme,
            dt: self.run.dt,
            reference_scheme: self.run.reference_scheme.unwrap_or(Scheme::Imex2Parabolic),
            reference_dt: self.run.reference_dt.unwrap_or(self.run.dt),
            t_final: self.run.t_final,
            save_every: self.run.save_every,
            guard: self.run.guard,
        };
        plan.validate()?;
        Ok(plan)
    }

    /// Artifact label: the configured tag or the scheme name.
    pub fn tag(&self) -> &str {
        self.output.tag.as_deref().unwrap_or(self.run.scheme.name())
    }
}
