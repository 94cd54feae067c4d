//! Verification laboratory: closed-form oracles, manufactured solutions,
//! stability and error reports, rate fitting, and the tau sweep.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::galerkin::{stiffness_from_eigenvalue, ForcingSpec, GalerkinSystem};
use crate::integrate::{init_state, run, Scheme, StepConfig, Trajectory};
use crate::potential::PotentialSpec;
use crate::sobolev::{norm, norm_squared, NormKind};
use crate::spectral::{DomainSpec, SpectralField};

/// Closed-form solution of tau c'' + c' + a c = g with c(0) = c0, c'(0) = c1.
///
/// For tau > 0 and a != 0 the deviation from equilibrium g/a is
/// e^{-t/(2 tau)} (c0' C(t) + b S(t)) with discriminant
/// h = (1 - 4 tau a) / (4 tau^2); C and S are cosh/cos and their sinc-scaled
/// partners depending on the sign of h. The overdamped branch is evaluated
/// through the characteristic roots themselves so no intermediate cosh can
/// overflow, and near h = 0 a series keeps the branch switch continuous.
#[derive(Debug, Clone, Copy)]
pub struct SecondOrderOracle {
    tau: f64,
    a: f64,
    g: f64,
    c0: f64,
    c1: f64,
}

impl SecondOrderOracle {
    pub fn new(tau: f64, a: f64, g: f64, c0: f64, c1: f64) -> Result<Self> {
        for (name, v) in [("tau", tau), ("a", a), ("g", g), ("c0", c0), ("c1", c1)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "oracle parameter {name} must be finite, got {v}"
                )));
            }
        }
        if tau < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "oracle needs tau >= 0, got {tau}"
            )));
        }
        Ok(SecondOrderOracle { tau, a, g, c0, c1 })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let (c, _) = self.eval_both(t);
        c
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let (_, d) = self.eval_both(t);
        d
    }

    /// (c(t), c'(t)).
    pub fn eval_both(&self, t: f64) -> (f64, f64) {
        let SecondOrderOracle { tau, a, g, c0, c1 } = *self;
        if tau == 0.0 {
            if a == 0.0 {
                return (c0 + g * t, g);
            }
            let dev = (c0 - g / a) * (-a * t).exp();
            return (g / a + dev, -a * dev);
        }
        if a == 0.0 {
            // c' solves tau v' + v = g.
            let v = g + (c1 - g) * (-t / tau).exp();
            let c = c0 + g * t + tau * (c1 - g) * (1.0 - (-t / tau).exp());
            return (c, v);
        }

        let equilibrium = g / a;
        let a0 = c0 - equilibrium;
        let half = 0.5 / tau;
        let b = c1 + a0 * half;
        let h = (1.0 - 4.0 * tau * a) / (4.0 * tau * tau);
        let ht2 = h * t * t;

        if ht2.abs() <= 1e-8 {
            // Series around the critically damped point; relative error
            // O(ht2^3) <= 1e-24 inside this window.
            let c_fn = 1.0 + 0.5 * ht2 + ht2 * ht2 / 24.0;
            let s_fn = t * (1.0 + ht2 / 6.0 + ht2 * ht2 / 120.0);
            let damp = (-half * t).exp();
            let c = equilibrium + damp * (a0 * c_fn + b * s_fn);
            let d = damp * ((b - a0 * half) * c_fn + (a0 * h - b * half) * s_fn);
            (c, d)
        } else if h > 0.0 {
            // Overdamped: both characteristic roots are real and <= 0 here
            // only when a > 0, but the root form is stable either way.
            let s = h.sqrt();
            let e_plus = ((s - half) * t).exp();
            let e_minus = ((-s - half) * t).exp();
            let p = 0.5 * (a0 + b / s);
            let q = 0.5 * (a0 - b / s);
            let c = equilibrium + p * e_plus + q * e_minus;
            let d = p * (s - half) * e_plus + q * (-s - half) * e_minus;
            (c, d)
        } else {
            // Underdamped: damped oscillation.
            let w = (-h).sqrt();
            let (sin, cos) = (w * t).sin_cos();
            let s_fn = sin / w;
            let damp = (-half * t).exp();
            let c = equilibrium + damp * (a0 * cos + b * s_fn);
            let d = damp * ((b - a0 * half) * cos + (a0 * h - b * half) * s_fn);
            (c, d)
        }
    }
}

/// Oracle for the mean channel tau m'' + m' + sigma m = g_mean.
pub fn mean_ode_oracle(
    tau: f64,
    sigma: f64,
    g_mean: f64,
    m0: f64,
    m1: f64,
) -> Result<SecondOrderOracle> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "mean oracle needs sigma > 0, got {sigma}"
        )));
    }
    SecondOrderOracle::new(tau, sigma, g_mean, m0, m1)
}

/// Oracle for one decoupled mode tau c'' + c' + A_k c = g_k in the beta = 0
/// diagnostic regime.
pub fn linear_mode_oracle(
    lambda_k: f64,
    potential: &PotentialSpec,
    tau: f64,
    phi0_k: f64,
    rho0_k: f64,
    g_k: f64,
) -> Result<SecondOrderOracle> {
    if !potential.beta_coeffs.is_empty() {
        return Err(Error::InvalidParameter(
            "linear mode oracle requires the beta = 0 diagnostic potential".into(),
        ));
    }
    let a = stiffness_from_eigenvalue(lambda_k, potential);
    SecondOrderOracle::new(tau, a, g_k, phi0_k, rho0_k)
}

/// One mode of a manufactured trajectory: amp * exp(-decay * t) on `mode`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MmsTerm {
    pub mode: Vec<usize>,
    pub amp: f64,
    pub decay: f64,
}

/// Band-limited separable trajectory phi*(x, t) = sum_j amp_j e^{-decay_j t}
/// e_{k_j}(x), smooth in time with explicit derivatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MmsSolution {
    terms: Vec<MmsTerm>,
}

impl MmsSolution {
    pub fn new(terms: Vec<MmsTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidParameter(
                "manufactured solution needs at least one term".into(),
            ));
        }
        for term in &terms {
            if !term.amp.is_finite() || !term.decay.is_finite() {
                return Err(Error::InvalidParameter(
                    "manufactured amplitudes and decays must be finite".into(),
                ));
            }
        }
        Ok(MmsSolution { terms })
    }

    pub fn terms(&self) -> &[MmsTerm] {
        &self.terms
    }

    fn weighted(&self, domain: &DomainSpec, t: f64, weight: impl Fn(f64) -> f64) -> Result<SpectralField> {
        let mut field = SpectralField::zeros(domain);
        for term in &self.terms {
            let prev = field.coeff(&term.mode)?;
            let value = term.amp * (-term.decay * t).exp() * weight(term.decay);
            field.set_coeff(&term.mode, prev + value)?;
        }
        Ok(field)
    }

    pub fn phi_at(&self, domain: &DomainSpec, t: f64) -> Result<SpectralField> {
        self.weighted(domain, t, |_| 1.0)
    }

    pub fn phi_dt_at(&self, domain: &DomainSpec, t: f64) -> Result<SpectralField> {
        self.weighted(domain, t, |decay| -decay)
    }

    pub fn phi_dtt_at(&self, domain: &DomainSpec, t: f64) -> Result<SpectralField> {
        self.weighted(domain, t, |decay| decay * decay)
    }
}

/// Forcing that makes `solution` an exact solution of the space-discrete
/// system with the given tau: g = tau phi*_tt + phi*_t + sigma phi* +
/// Lambda mu(phi*), evaluated spectrally at each requested time.
pub fn mms_forcing(
    solution: MmsSolution,
    system: &GalerkinSystem,
    tau: f64,
) -> Result<ForcingSpec> {
    let n = system.mode_count();
    for term in solution.terms() {
        if term.mode.len() != system.domain().dim {
            return Err(Error::InvalidParameter(format!(
                "manufactured mode {:?} has wrong dimension",
                term.mode
            )));
        }
        if term.mode.iter().any(|&k| k >= n) {
            return Err(Error::InvalidParameter(format!(
                "manufactured mode {:?} exceeds the retained band (n = {n})",
                term.mode
            )));
        }
    }
    Ok(ForcingSpec::Manufactured { solution, tau })
}

/// Time norms bounded uniformly in tau by the stability estimates.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StabilityReport {
    /// phi in H^1(0,T; V*): trapezoid of the norm plus difference-quotient
    /// quadrature of the derivative.
    pub phi_h1_vstar: f64,
    /// sup_t of the W norm of phi.
    pub phi_linf_w: f64,
    /// sup_t of the W* norm of mu.
    pub mu_linf_wstar: f64,
    /// sup_t of the H norm of w.
    pub w_linf_h: f64,
    /// tau * L^2(0,T; Z*) norm of the second time difference of phi.
    pub tau_dtt_l2_zstar: f64,
    /// sqrt(tau) * sup_t of the V* norm of the first time difference.
    pub sqrt_tau_dt_linf_vstar: f64,
}

impl StabilityReport {
    pub fn fields(&self) -> [(&'static str, f64); 6] {
        [
            ("phi_h1_vstar", self.phi_h1_vstar),
            ("phi_linf_w", self.phi_linf_w),
            ("mu_linf_wstar", self.mu_linf_wstar),
            ("w_linf_h", self.w_linf_h),
            ("tau_dtt_l2_zstar", self.tau_dtt_l2_zstar),
            ("sqrt_tau_dt_linf_vstar", self.sqrt_tau_dt_linf_vstar),
        ]
    }
}

/// Evaluate the stability norms of one trajectory by sample quadrature.
pub fn stability_report(
    traj: &Trajectory,
    tau: f64,
    system: &GalerkinSystem,
) -> Result<StabilityReport> {
    let len = traj.len();
    if len < 2 {
        return Err(Error::InvalidParameter(
            "stability report needs at least 2 samples".into(),
        ));
    }

    let mut vstar_sq_trapz = 0.0;
    let mut dt_quadrature = 0.0;
    let mut phi_linf_w = 0.0f64;
    let mut mu_linf_wstar = 0.0f64;
    let mut w_linf_h = 0.0f64;
    let mut dt_linf_vstar = 0.0f64;
    let mut dtt_l2_sq = 0.0;

    for i in 0..len {
        let phi = traj.phi(i);
        let (w, mu) = system.assemble(phi)?;
        phi_linf_w = phi_linf_w.max(norm(phi, NormKind::W));
        mu_linf_wstar = mu_linf_wstar.max(norm(&mu, NormKind::Wstar));
        w_linf_h = w_linf_h.max(norm(&w, NormKind::H));

        let v_sq = norm_squared(phi, NormKind::Vstar);
        if i > 0 {
            let dt = traj.times()[i] - traj.times()[i - 1];
            let prev_sq = norm_squared(traj.phi(i - 1), NormKind::Vstar);
            vstar_sq_trapz += 0.5 * dt * (prev_sq + v_sq);

            let diff = phi.sub(traj.phi(i - 1))?;
            let diff_sq = norm_squared(&diff, NormKind::Vstar);
            dt_quadrature += diff_sq / dt;
            dt_linf_vstar = dt_linf_vstar.max(diff_sq.sqrt() / dt);
        }
        if i > 0 && i + 1 < len {
            let dt_minus = traj.times()[i] - traj.times()[i - 1];
            let dt_plus = traj.times()[i + 1] - traj.times()[i];
            let span = dt_minus + dt_plus;
            // Three-point second difference valid on nonuniform spacing.
            let second = traj
                .phi(i + 1)
                .scale(2.0 * dt_minus)
                .axpy(-2.0 * span, traj.phi(i))?
                .axpy(2.0 * dt_plus, traj.phi(i - 1))?
                .scale(1.0 / (dt_minus * dt_plus * span));
            dtt_l2_sq += norm_squared(&second, NormKind::Zstar) * 0.5 * span;
        }
    }

    Ok(StabilityReport {
        phi_h1_vstar: (vstar_sq_trapz + dt_quadrature).sqrt(),
        phi_linf_w,
        mu_linf_wstar,
        w_linf_h,
        tau_dtt_l2_zstar: tau * dtt_l2_sq.sqrt(),
        sqrt_tau_dt_linf_vstar: tau.sqrt() * dt_linf_vstar,
    })
}

/// Distances between a relaxed trajectory and the parabolic reference in the
/// norms of the convergence estimate.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ErrorReport {
    pub tau: f64,
    /// sup_t of the V* norm of phi_tau - phi.
    pub c0_vstar: f64,
    /// L^2(0,T; W) norm of phi_tau - phi.
    pub l2_w: f64,
    /// L^2(0,T; W*) norm of mu_tau - mu.
    pub l2_wstar_mu: f64,
    /// L^2(0,T; H) norm of w_tau - w.
    pub l2_h_w: f64,
}

impl ErrorReport {
    pub fn norm_fields(&self) -> [(&'static str, f64); 4] {
        [
            ("c0_vstar", self.c0_vstar),
            ("l2_w", self.l2_w),
            ("l2_wstar_mu", self.l2_wstar_mu),
            ("l2_h_w", self.l2_h_w),
        ]
    }
}

/// Compare two trajectories sampled on the same time grid; w and mu are
/// recomputed from the states on both sides.
pub fn error_report(
    traj_tau: &Trajectory,
    traj_ref: &Trajectory,
    system: &GalerkinSystem,
) -> Result<ErrorReport> {
    if traj_tau.len() != traj_ref.len() {
        return Err(Error::DomainMismatch(format!(
            "trajectories have {} vs {} samples",
            traj_tau.len(),
            traj_ref.len()
        )));
    }
    let len = traj_tau.len();
    for i in 0..len {
        let (a, b) = (traj_tau.times()[i], traj_ref.times()[i]);
        if (a - b).abs() > 1e-12 * a.abs().max(1.0) {
            return Err(Error::DomainMismatch(format!(
                "sample {i} times differ: {a} vs {b}"
            )));
        }
    }

    let mut c0_vstar = 0.0f64;
    let mut l2_w_sq = 0.0;
    let mut l2_mu_sq = 0.0;
    let mut l2_wv_sq = 0.0;
    let mut prev: Option<(f64, f64, f64)> = None;
    for i in 0..len {
        let diff_phi = traj_tau.phi(i).sub(traj_ref.phi(i))?;
        let (w_tau, mu_tau) = system.assemble(traj_tau.phi(i))?;
        let (w_ref, mu_ref) = system.assemble(traj_ref.phi(i))?;
        let diff_w = w_tau.sub(&w_ref)?;
        let diff_mu = mu_tau.sub(&mu_ref)?;

        c0_vstar = c0_vstar.max(norm(&diff_phi, NormKind::Vstar));
        let w_sq = norm_squared(&diff_phi, NormKind::W);
        let mu_sq = norm_squared(&diff_mu, NormKind::Wstar);
        let wv_sq = norm_squared(&diff_w, NormKind::H);
        if let Some((pw, pm, pv)) = prev {
            let dt = traj_tau.times()[i] - traj_tau.times()[i - 1];
            l2_w_sq += 0.5 * dt * (pw + w_sq);
            l2_mu_sq += 0.5 * dt * (pm + mu_sq);
            l2_wv_sq += 0.5 * dt * (pv + wv_sq);
        }
        prev = Some((w_sq, mu_sq, wv_sq));
    }

    Ok(ErrorReport {
        tau: traj_tau.tau(),
        c0_vstar,
        l2_w: l2_w_sq.sqrt(),
        l2_wstar_mu: l2_mu_sq.sqrt(),
        l2_h_w: l2_wv_sq.sqrt(),
    })
}

/// Least-squares power-law fit error ~ C * tau^slope on log-log axes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    /// Intercept on the log axes, i.e. log C.
    pub intercept: f64,
    pub r_squared: f64,
    pub points: Vec<(f64, f64)>,
}

pub fn rate_fit(points: &[(f64, f64)]) -> Result<RateFit> {
    if points.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "rate fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    for pair in points.windows(2) {
        if pair[1].0 >= pair[0].0 {
            return Err(Error::InvalidParameter(
                "rate fit needs strictly decreasing tau values".into(),
            ));
        }
    }
    for &(tau, err) in points {
        if !(tau > 0.0) || !(err > 0.0) || !err.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "rate fit needs positive finite points, got ({tau}, {err})"
            )));
        }
    }

    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|&(t, _)| t.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, e)| e.ln()).collect();
    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - x_mean) * (x - x_mean)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - x_mean) * (y - y_mean)).sum();
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;

    let ss_tot: f64 = ys.iter().map(|y| (y - y_mean) * (y - y_mean)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let fit = intercept + slope * x;
            (y - fit) * (y - fit)
        })
        .sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };

    Ok(RateFit {
        slope,
        intercept,
        r_squared,
        points: points.to_vec(),
    })
}

/// sup_t of the V norm of the running time integral of mu (cumulative
/// trapezoid); a boundedness diagnostic.
pub fn mu_time_integral_monitor(traj: &Trajectory, system: &GalerkinSystem) -> Result<f64> {
    if traj.len() < 2 {
        return Err(Error::InvalidParameter(
            "monitor needs at least 2 samples".into(),
        ));
    }
    let mut acc = SpectralField::zeros(system.domain());
    let mut sup = 0.0f64;
    let mut prev_mu: Option<SpectralField> = None;
    for i in 0..traj.len() {
        let (_, mu) = system.assemble(traj.phi(i))?;
        if let Some(prev) = prev_mu.replace(mu.clone()) {
            let dt = traj.times()[i] - traj.times()[i - 1];
            acc = acc.add(&prev.add(&mu)?.scale(0.5 * dt))?;
        }
        sup = sup.max(norm(&acc, NormKind::V));
    }
    Ok(sup)
}

/// Inputs of one relaxation-limit sweep: a shared system and initial data,
/// the tau ladder, and the step configurations for the reference and the
/// relaxed runs.
#[derive(Debug, Clone)]
pub struct SweepPlan {
    pub system: GalerkinSystem,
    pub phi0: SpectralField,
    /// Initial velocity for the relaxed runs (the reference has none).
    pub rho0: SpectralField,
    /// Strictly decreasing, each in (0, 1).
    pub tau_list: Vec<f64>,
    pub scheme: Scheme,
    pub dt: f64,
    pub reference_scheme: Scheme,
    pub reference_dt: f64,
    pub t_final: f64,
    pub save_every: f64,
    pub guard: bool,
}

/// Everything the sweep measures: per-tau error and stability reports plus
/// one power-law fit per error norm.
#[derive(Debug, Clone, Serialize)]
pub struct SweepOutcome {
    pub reports: Vec<ErrorReport>,
    pub stability: Vec<(f64, StabilityReport)>,
    pub reference_stability: StabilityReport,
    pub fits: BTreeMap<String, RateFit>,
}

impl SweepPlan {
    pub fn validate(&self) -> Result<()> {
        if self.tau_list.len() < 3 {
            return Err(Error::InvalidConfig(format!(
                "sweep needs at least 3 tau values, got {}",
                self.tau_list.len()
            )));
        }
        for pair in self.tau_list.windows(2) {
            if pair[1] >= pair[0] {
                return Err(Error::InvalidConfig(
                    "tau_list must be strictly decreasing".into(),
                ));
            }
        }
        for &tau in &self.tau_list {
            if !(0.0..1.0).contains(&tau) || tau == 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "sweep tau values must lie in (0, 1), got {tau}"
                )));
            }
        }
        if !self.scheme.is_hyperbolic() {
            return Err(Error::InvalidConfig(
                "sweep runs need a hyperbolic scheme".into(),
            ));
        }
        if self.reference_scheme.is_hyperbolic() {
            return Err(Error::InvalidConfig(
                "the sweep reference needs a parabolic scheme".into(),
            ));
        }
        if matches!(self.system.forcing(), ForcingSpec::Manufactured { .. }) {
            return Err(Error::InvalidConfig(
                "manufactured forcing is tied to one tau; sweeps need a shared forcing".into(),
            ));
        }
        Ok(())
    }

    fn run_reference(&self) -> Result<Trajectory> {
        let state = init_state(&self.phi0, None, 0.0, self.system.mode_count())?;
        let cfg = StepConfig {
            dt: self.reference_dt,
            scheme: self.reference_scheme,
            guard: self.guard,
        };
        run(&self.system, state, &cfg, self.t_final, self.save_every)
    }

    fn run_relaxed(&self, tau: f64) -> Result<Trajectory> {
        let state = init_state(&self.phi0, Some(&self.rho0), tau, self.system.mode_count())?;
        let cfg = StepConfig {
            dt: self.dt,
            scheme: self.scheme,
            guard: self.guard,
        };
        run(&self.system, state, &cfg, self.t_final, self.save_every)
    }
}

/// Run the reference and every relaxed trajectory (tau runs in parallel when
/// jobs > 1), then reduce reports in tau order.
pub fn sweep_tau(plan: &SweepPlan, jobs: usize) -> Result<SweepOutcome> {
    plan.validate()?;
    let reference = plan.run_reference()?;
    let reference_stability = stability_report(&reference, 0.0, &plan.system)?;

    let jobs = jobs.max(1).min(plan.tau_list.len());
    let mut per_tau: Vec<Option<Result<(ErrorReport, StabilityReport)>>> =
        (0..plan.tau_list.len()).map(|_| None).collect();

    if jobs == 1 {
        for (i, &tau) in plan.tau_list.iter().enumerate() {
            per_tau[i] = Some(measure_one_tau(plan, tau, &reference));
        }
    } else {
        let next = std::sync::atomic::AtomicUsize::new(0);
        let results: Vec<std::sync::Mutex<Option<Result<(ErrorReport, StabilityReport)>>>> =
            (0..plan.tau_list.len()).map(|_| std::sync::Mutex::new(None)).collect();
        std::thread::scope(|scope| {
            for _ in 0..jobs {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                    if i >= plan.tau_list.len() {
                        break;
                    }
                    let outcome = measure_one_tau(plan, plan.tau_list[i], &reference);
                    *results[i].lock().unwrap() = Some(outcome);
                });
            }
        });
        for (slot, cell) in per_tau.iter_mut().zip(results) {
            *slot = cell.into_inner().unwrap();
        }
    }

    let mut reports = Vec::with_capacity(plan.tau_list.len());
    let mut stability = Vec::with_capacity(plan.tau_list.len());
    for (slot, &tau) in per_tau.into_iter().zip(&plan.tau_list) {
        let (err, stab) = slot.expect("every tau index was dispatched")?;
        reports.push(err);
        stability.push((tau, stab));
    }

    let mut fits = BTreeMap::new();
    for key_index in 0..4 {
        let mut points = Vec::with_capacity(reports.len());
        let mut name = "";
        for report in &reports {
            let (field_name, value) = report.norm_fields()[key_index];
            name = field_name;
            points.push((report.tau, value));
        }
        fits.insert(name.to_string(), rate_fit(&points)?);
    }

    Ok(SweepOutcome {
        reports,
        stability,
        reference_stability,
        fits,
    })
}

fn measure_one_tau(
    plan: &SweepPlan,
    tau: f64,
    reference: &Trajectory,
) -> Result<(ErrorReport, StabilityReport)> {
    let traj = plan.run_relaxed(tau)?;
    let err = error_report(&traj, reference, &plan.system)?;
    let stab = stability_report(&traj, tau, &plan.system)?;
    Ok((err, stab))
}
