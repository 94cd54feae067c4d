//! Semi-implicit time steppers and trajectory recording.
//!
//! All schemes treat the diagonal stiffness A implicitly and the remainder
//! N(phi) explicitly:
//!
//! ```text
//!   imex1_parabolic   (phi' - phi)/dt + A phi'            + N(phi)  = g(t)
//!   imex2_parabolic   (phi' - phi)/dt + A (phi' + phi)/2  + Nbar    = g(t + dt/2)
//!   imex1_hyperbolic  tau (rho' - rho)/dt + rho' + A phi' + N(phi)  = g(t),
//!                     phi' = phi + dt rho'
//! ```
//!
//! where Nbar is the two-step extrapolation 3/2 N(phi^n) - 1/2 N(phi^{n-1})
//! (first step: N(phi^0) alone). The damping rho' is implicit so the
//! hyperbolic scheme stays stable uniformly down to small tau. Every update is
//! a scalar solve per mode; the mean channel therefore reproduces the damped
//! scalar equation exactly, which [`scalar_recursion`] mirrors bit for bit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::galerkin::GalerkinSystem;
use crate::sobolev::{energy_with, norm, norm_squared, EnergyBreakdown, NormKind};
use crate::spectral::SpectralField;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Imex1Parabolic,
    Imex2Parabolic,
    Imex1Hyperbolic,
}

impl Scheme {
    pub fn is_hyperbolic(self) -> bool {
        matches!(self, Scheme::Imex1Hyperbolic)
    }

    /// Formal convergence order in dt.
    pub fn order(self) -> f64 {
        match self {
            Scheme::Imex2Parabolic => 2.0,
            _ => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Imex1Parabolic => "imex1_parabolic",
            Scheme::Imex2Parabolic => "imex2_parabolic",
            Scheme::Imex1Hyperbolic => "imex1_hyperbolic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepConfig {
    pub dt: f64,
    pub scheme: Scheme,
    /// Check the per-mode implicit denominators up front and refuse step
    /// sizes that flip their sign.
    pub guard: bool,
}

impl StepConfig {
    pub fn new(dt: f64, scheme: Scheme) -> Result<Self> {
        let cfg = StepConfig {
            dt,
            scheme,
            guard: true,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.dt.is_finite() || self.dt <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "dt must be finite and > 0, got {}",
                self.dt
            )));
        }
        Ok(())
    }

    fn check_tau(&self, tau: f64) -> Result<()> {
        match (self.scheme.is_hyperbolic(), tau > 0.0) {
            (true, false) => Err(Error::InvalidParameter(
                "hyperbolic scheme requires tau > 0".into(),
            )),
            (false, true) => Err(Error::InvalidParameter(
                "parabolic schemes require tau = 0".into(),
            )),
            _ => Ok(()),
        }
    }
}

/// Instantaneous solver state: time, relaxation parameter, order parameter,
/// and (for tau > 0) its time derivative.
#[derive(Debug, Clone)]
pub struct SolverState {
    t: f64,
    tau: f64,
    phi: SpectralField,
    rho: Option<SpectralField>,
}

impl SolverState {
    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn phi(&self) -> &SpectralField {
        &self.phi
    }

    pub fn rho(&self) -> Option<&SpectralField> {
        self.rho.as_ref()
    }
}

/// Project the initial data onto the first n modes and wrap it as a state at
/// t = 0. For tau = 0 a velocity must not be supplied; for tau > 0 a missing
/// velocity defaults to zero.
pub fn init_state(
    phi0: &SpectralField,
    rho0: Option<&SpectralField>,
    tau: f64,
    n: usize,
) -> Result<SolverState> {
    if !tau.is_finite() || !(0.0..1.0).contains(&tau) {
        return Err(Error::InvalidParameter(format!(
            "tau must lie in [0, 1), got {tau}"
        )));
    }
    if tau == 0.0 && rho0.is_some() {
        return Err(Error::InvalidParameter(
            "tau = 0 runs have no velocity; do not supply rho0".into(),
        ));
    }
    if let Some(rho0) = rho0 {
        phi0.check_same_domain(rho0)?;
    }
    let phi = phi0.project(n);
    let rho = if tau > 0.0 {
        Some(match rho0 {
            Some(r) => r.project(n),
            None => SpectralField::zeros(phi0.domain()),
        })
    } else {
        None
    };
    for (name, field) in [("phi0", Some(&phi)), ("rho0", rho.as_ref())]
        .into_iter()
        .filter_map(|(n, f)| f.map(|f| (n, f)))
    {
        if !field.to_flat().iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "{name} has non-finite coefficients"
            )));
        }
    }
    Ok(SolverState {
        t: 0.0,
        tau,
        phi,
        rho,
    })
}

#[inline]
fn imex1_parabolic_update(phi: f64, a: f64, g_minus_n: f64, dt: f64) -> f64 {
    (phi + dt * g_minus_n) / (1.0 + dt * a)
}

#[inline]
fn imex2_parabolic_update(phi: f64, a: f64, g_minus_n: f64, dt: f64) -> f64 {
    ((1.0 - 0.5 * dt * a) * phi + dt * g_minus_n) / (1.0 + 0.5 * dt * a)
}

#[inline]
fn imex1_hyperbolic_update(
    phi: f64,
    rho: f64,
    tau: f64,
    a: f64,
    g_minus_n: f64,
    dt: f64,
) -> (f64, f64) {
    let rho_new = (tau * rho + dt * (g_minus_n - a * phi)) / (tau + dt + dt * dt * a);
    let phi_new = phi + dt * rho_new;
    (phi_new, rho_new)
}

/// Implicit denominator whose positivity the guard enforces.
fn guard_quantity(scheme: Scheme, tau: f64, a: f64, dt: f64) -> (&'static str, f64) {
    match scheme {
        Scheme::Imex1Parabolic => ("1 + dt*A", 1.0 + dt * a),
        Scheme::Imex2Parabolic => ("1 + dt*A/2", 1.0 + 0.5 * dt * a),
        Scheme::Imex1Hyperbolic => ("tau + dt + dt^2*A", tau + dt + dt * dt * a),
    }
}

/// Marches one system with one scheme, carrying the remainder history the
/// two-step scheme needs.
#[derive(Debug)]
pub struct Integrator<'a> {
    system: &'a GalerkinSystem,
    cfg: StepConfig,
    state: SolverState,
    prev_remainder: Option<SpectralField>,
    step_index: u64,
}

impl<'a> Integrator<'a> {
    pub fn new(system: &'a GalerkinSystem, state: SolverState, cfg: StepConfig) -> Result<Self> {
        cfg.validate()?;
        cfg.check_tau(state.tau)?;
        if state.phi.domain() != system.domain() {
            return Err(Error::DomainMismatch(
                "state and system domains differ".into(),
            ));
        }
        if cfg.guard {
            for ((k1, k2), &a) in system.stiffness_grid().indexed_iter() {
                let (quantity, value) = guard_quantity(cfg.scheme, state.tau, a, cfg.dt);
                if value <= 0.0 {
                    let mode = if system.domain().dim == 1 {
                        vec![k1]
                    } else {
                        vec![k1, k2]
                    };
                    return Err(Error::GuardViolation {
                        t: state.t,
                        mode,
                        quantity,
                        value,
                    });
                }
            }
        }
        Ok(Integrator {
            system,
            cfg,
            state,
            prev_remainder: None,
            step_index: 0,
        })
    }

    pub fn state(&self) -> &SolverState {
        &self.state
    }

    pub fn step(&mut self) -> Result<()> {
        let t = self.state.t;
        let dt = self.cfg.dt;
        let remainder = self
            .system
            .nonlinear_remainder(&self.state.phi)
            .map_err(|e| e.at_time(t))?;

        match self.cfg.scheme {
            Scheme::Imex1Parabolic => {
                let g = self.system.forcing_at(t).map_err(|e| e.at_time(t))?;
                let phi = self.state.phi.coeffs_mut();
                for ((p, (&g_k, &n_k)), &a) in phi
                    .iter_mut()
                    .zip(g.coeffs().iter().zip(remainder.coeffs().iter()))
                    .zip(self.system.stiffness_grid().iter())
                {
                    let g_minus_n = g_k - n_k;
                    *p = imex1_parabolic_update(*p, a, g_minus_n, dt);
                }
            }
            Scheme::Imex2Parabolic => {
                let g = self
                    .system
                    .forcing_at(t + 0.5 * dt)
                    .map_err(|e| e.at_time(t))?;
                let n_bar: Vec<f64> = match &self.prev_remainder {
                    Some(prev) => remainder
                        .coeffs()
                        .iter()
                        .zip(prev.coeffs().iter())
                        .map(|(&n_k, &prev_k)| 1.5 * n_k - 0.5 * prev_k)
                        .collect(),
                    None => remainder.coeffs().iter().copied().collect(),
                };
                let phi = self.state.phi.coeffs_mut();
                for ((p, (&g_k, &n_k)), &a) in phi
                    .iter_mut()
                    .zip(g.coeffs().iter().zip(n_bar.iter()))
                    .zip(self.system.stiffness_grid().iter())
                {
                    let g_minus_n = g_k - n_k;
                    *p = imex2_parabolic_update(*p, a, g_minus_n, dt);
                }
                self.prev_remainder = Some(remainder);
            }
            Scheme::Imex1Hyperbolic => {
                let g = self.system.forcing_at(t).map_err(|e| e.at_time(t))?;
                let tau = self.state.tau;
                let rho = self
                    .state
                    .rho
                    .as_mut()
                    .expect("hyperbolic state carries rho");
                let phi = self.state.phi.coeffs_mut();
                for (((p, r), (&g_k, &n_k)), &a) in phi
                    .iter_mut()
                    .zip(rho.coeffs_mut().iter_mut())
                    .zip(g.coeffs().iter().zip(remainder.coeffs().iter()))
                    .zip(self.system.stiffness_grid().iter())
                {
                    let g_minus_n = g_k - n_k;
                    let (p_new, r_new) = imex1_hyperbolic_update(*p, *r, tau, a, g_minus_n, dt);
                    *p = p_new;
                    *r = r_new;
                }
            }
        }

        self.step_index += 1;
        self.state.t = self.step_index as f64 * dt;

        let max_abs = self.state.phi.max_abs_coeff();
        if !max_abs.is_finite() {
            return Err(Error::StepOverflow {
                t: self.state.t,
                context: "state update",
                max_abs,
            });
        }
        Ok(())
    }
}

/// One step of a parabolic scheme from cold history (for the two-step scheme
/// this is its documented first-step form).
pub fn step_parabolic(
    state: &SolverState,
    cfg: &StepConfig,
    system: &GalerkinSystem,
) -> Result<SolverState> {
    if cfg.scheme.is_hyperbolic() {
        return Err(Error::InvalidParameter(
            "step_parabolic requires a parabolic scheme".into(),
        ));
    }
    let mut integrator = Integrator::new(system, state.clone(), *cfg)?;
    integrator.step()?;
    Ok(integrator.state)
}

/// One step of the hyperbolic scheme.
pub fn step_hyperbolic(
    state: &SolverState,
    cfg: &StepConfig,
    system: &GalerkinSystem,
) -> Result<SolverState> {
    if !cfg.scheme.is_hyperbolic() {
        return Err(Error::InvalidParameter(
            "step_hyperbolic requires the hyperbolic scheme".into(),
        ));
    }
    let mut integrator = Integrator::new(system, state.clone(), *cfg)?;
    integrator.step()?;
    Ok(integrator.state)
}

/// Per-sample diagnostics recorded along a run.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MonitorRow {
    pub t: f64,
    pub energy_total: f64,
    pub energy_willmore: f64,
    pub energy_gl: f64,
    /// (tau/2) * dual-norm(rho)^2 + energy; equals the energy when tau = 0.
    pub lyapunov: f64,
    pub norm_h: f64,
    pub norm_vstar: f64,
    pub norm_w: f64,
    pub mean: f64,
}

/// Saved samples of one run: times, coefficient states, and monitors.
#[derive(Debug, Clone)]
pub struct Trajectory {
    tau: f64,
    scheme: Scheme,
    times: Vec<f64>,
    phis: Vec<SpectralField>,
    rhos: Option<Vec<SpectralField>>,
    monitors: Vec<MonitorRow>,
}

impl Trajectory {
    /// Assemble a trajectory from raw samples; tests use this to build
    /// synthetic histories without running a solver.
    #[cfg(test)]
    pub(crate) fn from_parts(
        tau: f64,
        scheme: Scheme,
        times: Vec<f64>,
        phis: Vec<SpectralField>,
        rhos: Option<Vec<SpectralField>>,
        monitors: Vec<MonitorRow>,
    ) -> Self {
        Trajectory {
            tau,
            scheme,
            times,
            phis,
            rhos,
            monitors,
        }
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn phi(&self, i: usize) -> &SpectralField {
        &self.phis[i]
    }

    pub fn rho(&self, i: usize) -> Option<&SpectralField> {
        self.rhos.as_ref().map(|r| &r[i])
    }

    pub fn monitors(&self) -> &[MonitorRow] {
        &self.monitors
    }

    pub fn final_phi(&self) -> &SpectralField {
        self.phis.last().expect("trajectory is never empty")
    }

    /// w and mu recomputed at sample i.
    pub fn assemble_at(
        &self,
        i: usize,
        system: &GalerkinSystem,
    ) -> Result<(SpectralField, SpectralField)> {
        system.assemble(&self.phis[i])
    }
}

fn monitor_row(
    t: f64,
    state: &SolverState,
    system: &GalerkinSystem,
) -> Result<MonitorRow> {
    let EnergyBreakdown {
        total,
        willmore_part,
        gl_part,
        ..
    } = energy_with(system.transform(), &state.phi, system.potential())?;
    let lyapunov = match &state.rho {
        Some(rho) => 0.5 * state.tau * norm_squared(rho, NormKind::Vstar) + total,
        None => total,
    };
    Ok(MonitorRow {
        t,
        energy_total: total,
        energy_willmore: willmore_part,
        energy_gl: gl_part,
        lyapunov,
        norm_h: norm(&state.phi, NormKind::H),
        norm_vstar: norm(&state.phi, NormKind::Vstar),
        norm_w: norm(&state.phi, NormKind::W),
        mean: state.phi.mean(),
    })
}

/// Number of steps a span covers, requiring it to be an integral multiple of
/// dt (relative slack 1e-9).
fn integral_steps(span: f64, dt: f64, what: &str) -> Result<u64> {
    let ratio = span / dt;
    let steps = ratio.round();
    if steps < 0.0 || (ratio - steps).abs() > 1e-9 * ratio.abs().max(1.0) {
        return Err(Error::InvalidConfig(format!(
            "{what} = {span} is not an integral multiple of dt = {dt}"
        )));
    }
    Ok(steps as u64)
}

/// Fixed-step march to t_final, sampling every save_every plus the endpoints.
pub fn run(
    system: &GalerkinSystem,
    state: SolverState,
    cfg: &StepConfig,
    t_final: f64,
    save_every: f64,
) -> Result<Trajectory> {
    if !(t_final >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "t_final must be >= 0, got {t_final}"
        )));
    }
    if !(save_every > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "save_every must be > 0, got {save_every}"
        )));
    }
    let n_steps = integral_steps(t_final, cfg.dt, "t_final")?;
    let stride = integral_steps(save_every, cfg.dt, "save_every")?.max(1);

    let tau = state.tau;
    let scheme = cfg.scheme;
    let has_rho = state.rho.is_some();
    let mut integrator = Integrator::new(system, state, *cfg)?;

    let mut times = Vec::new();
    let mut phis = Vec::new();
    let mut rhos: Option<Vec<SpectralField>> = has_rho.then(Vec::new);
    let mut monitors = Vec::new();

    let save = |integrator: &Integrator,
                times: &mut Vec<f64>,
                phis: &mut Vec<SpectralField>,
                rhos: &mut Option<Vec<SpectralField>>,
                monitors: &mut Vec<MonitorRow>|
     -> Result<()> {
        let s = integrator.state();
        times.push(s.t);
        phis.push(s.phi.clone());
        if let Some(rhos) = rhos {
            rhos.push(s.rho.clone().expect("rho present throughout"));
        }
        monitors.push(monitor_row(s.t, s, system).map_err(|e| e.at_time(s.t))?);
        Ok(())
    };

    save(&integrator, &mut times, &mut phis, &mut rhos, &mut monitors)?;
    for i in 1..=n_steps {
        integrator.step()?;
        if i % stride == 0 || i == n_steps {
            save(&integrator, &mut times, &mut phis, &mut rhos, &mut monitors)?;
        }
    }

    Ok(Trajectory {
        tau,
        scheme,
        times,
        phis,
        rhos,
        monitors,
    })
}

/// Mirror of the per-mode update arithmetic on a single scalar channel
/// c'' tau + c' + a c = g(t) with zero nonlinear remainder (as on the mean
/// channel of every run). The returned values reproduce the corresponding
/// mode coefficient of [`run`] bit for bit.
#[derive(Debug, Clone)]
pub struct ScalarTrace {
    /// c at steps 0..=n.
    pub values: Vec<f64>,
    /// c' at steps 0..=n; empty for parabolic schemes.
    pub velocities: Vec<f64>,
}

pub fn scalar_recursion(
    scheme: Scheme,
    tau: f64,
    a: f64,
    dt: f64,
    n_steps: usize,
    c0: f64,
    r0: f64,
    g_at: impl Fn(f64) -> f64,
) -> Result<ScalarTrace> {
    let cfg = StepConfig {
        dt,
        scheme,
        guard: true,
    };
    cfg.validate()?;
    cfg.check_tau(tau)?;
    let (quantity, value) = guard_quantity(scheme, tau, a, dt);
    if value <= 0.0 {
        return Err(Error::GuardViolation {
            t: 0.0,
            mode: vec![0],
            quantity,
            value,
        });
    }

    let mut values = Vec::with_capacity(n_steps + 1);
    let mut velocities = Vec::new();
    let mut c = c0;
    let mut r = r0;
    let mut prev_n: Option<f64> = None;
    values.push(c);
    if scheme.is_hyperbolic() {
        velocities.push(r);
    }
    for i in 0..n_steps {
        let t = i as f64 * dt;
        // The remainder on this channel is exactly zero; keep the subtraction
        // so the arithmetic matches the vector loop operation for operation.
        let n_k = 0.0;
        match scheme {
            Scheme::Imex1Parabolic => {
                let g_minus_n = g_at(t) - n_k;
                c = imex1_parabolic_update(c, a, g_minus_n, dt);
            }
            Scheme::Imex2Parabolic => {
                let n_bar = match prev_n {
                    Some(prev) => 1.5 * n_k - 0.5 * prev,
                    None => n_k,
                };
                let g_minus_n = g_at(t + 0.5 * dt) - n_bar;
                c = imex2_parabolic_update(c, a, g_minus_n, dt);
                prev_n = Some(n_k);
            }
            Scheme::Imex1Hyperbolic => {
                let g_minus_n = g_at(t) - n_k;
                let (c_new, r_new) = imex1_hyperbolic_update(c, r, tau, a, g_minus_n, dt);
                c = c_new;
                r = r_new;
            }
        }
        values.push(c);
        if scheme.is_hyperbolic() {
            velocities.push(r);
        }
    }
    Ok(ScalarTrace { values, velocities })
}
