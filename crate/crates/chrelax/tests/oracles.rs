//! Cross-checks of the solver against independent references: the scalar
//! closed forms, a Runge-Kutta integrator, brute-force quadrature of the
//! chemical potential, Richardson self-convergence, and manufactured
//! solutions.

use chrelax::galerkin::{ForcingSpec, GalerkinSystem};
use chrelax::integrate::{init_state, run, scalar_recursion, Scheme, StepConfig, Trajectory};
use chrelax::lab::{linear_mode_oracle, mean_ode_oracle, mms_forcing, MmsSolution, MmsTerm};
use chrelax::potential::PotentialSpec;
use chrelax::sobolev::{energy, inv_neumann, pairing, NormKind};
use chrelax::spectral::{DomainSpec, GridField, SpectralField, Transform};

const TWO_PI: f64 = std::f64::consts::TAU;

fn domain_1d(modes: usize) -> DomainSpec {
    DomainSpec::new_1d(TWO_PI, modes, modes + modes / 2).unwrap()
}

fn diagnostic_potential() -> PotentialSpec {
    PotentialSpec::diagnostic(vec![], 1.0, 1.0, 0.1).unwrap()
}

fn field_from(domain: &DomainSpec, entries: &[(usize, f64)]) -> SpectralField {
    let entries: Vec<(Vec<usize>, f64)> =
        entries.iter().map(|&(k, c)| (vec![k], c)).collect();
    SpectralField::from_modes(domain, &entries).unwrap()
}

/// Classical RK4 on the first-order system (c, v) with v' = (g - v - a c) / tau.
fn rk4_second_order(tau: f64, a: f64, g: f64, c0: f64, c1: f64, t: f64, dt: f64) -> (f64, f64) {
    let f = |c: f64, v: f64| (v, (g - v - a * c) / tau);
    let steps = (t / dt).round() as usize;
    let h = t / steps as f64;
    let (mut c, mut v) = (c0, c1);
    for _ in 0..steps {
        let (k1c, k1v) = f(c, v);
        let (k2c, k2v) = f(c + 0.5 * h * k1c, v + 0.5 * h * k1v);
        let (k3c, k3v) = f(c + 0.5 * h * k2c, v + 0.5 * h * k2v);
        let (k4c, k4v) = f(c + h * k3c, v + h * k3v);
        c += h / 6.0 * (k1c + 2.0 * k2c + 2.0 * k3c + k4c);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    }
    (c, v)
}

#[test]
fn oracle_matches_rk4_across_damping_regimes() {
    // Underdamped, overdamped, both sides of the 4 tau a = 1 threshold, and
    // the unit-coefficient case; all compared against a fine RK4 march.
    let cases = [
        (0.25, 2.3, 0.4, 0.7, -0.2),
        (0.25, 0.3, 0.0, 1.0, 0.5),
        (0.25, 1.0 - 1e-7, 0.0, 0.7, -0.3),
        (0.25, 1.0 + 1e-7, 0.0, 0.7, -0.3),
        (0.02, 5.0, -0.1, 0.3, 1.0),
        (0.1, 1.0, 1.0, 0.0, 0.0),
    ];
    for (tau, a, g, c0, c1) in cases {
        let oracle = chrelax::lab::SecondOrderOracle::new(tau, a, g, c0, c1).unwrap();
        for t in [0.7, 1.0, 2.0] {
            let (c_ref, v_ref) = rk4_second_order(tau, a, g, c0, c1, t, 2e-5);
            let (c, v) = oracle.eval_both(t);
            assert!(
                (c - c_ref).abs() < 1e-10,
                "value off by {:.2e} at t = {t} for tau = {tau}, a = {a}",
                (c - c_ref).abs()
            );
            assert!(
                (v - v_ref).abs() < 1e-9,
                "derivative off by {:.2e} at t = {t} for tau = {tau}, a = {a}",
                (v - v_ref).abs()
            );
        }
    }
}

#[test]
fn mean_oracle_matches_rk4_reference() {
    let oracle = mean_ode_oracle(0.1, 1.0, 1.0, 0.0, 0.0).unwrap();
    let (c_ref, _) = rk4_second_order(0.1, 1.0, 1.0, 0.0, 0.0, 1.0, 2e-5);
    assert!((oracle.eval(1.0) - c_ref).abs() < 1e-10);
}

fn max_mode_error(
    traj: &Trajectory,
    potential: &PotentialSpec,
    domain: &DomainSpec,
    tau: f64,
    phi0: &SpectralField,
    rho0: Option<&SpectralField>,
) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, &t) in traj.times().iter().enumerate() {
        for (idx, c) in traj.phi(i).iter_modes() {
            let c0 = phi0.coeff(&idx).unwrap();
            let r0 = rho0.map_or(0.0, |r| r.coeff(&idx).unwrap());
            let oracle =
                linear_mode_oracle(domain.eigenvalue(&idx), potential, tau, c0, r0, 0.0)
                    .unwrap();
            worst = worst.max((c - oracle.eval(t)).abs());
        }
    }
    worst
}

#[test]
fn solver_modes_match_linear_oracle_without_inertia() {
    let domain = domain_1d(16);
    let potential = diagnostic_potential();
    let system =
        GalerkinSystem::new(domain.clone(), potential.clone(), ForcingSpec::Zero, 16, true)
            .unwrap();
    let phi0 = field_from(&domain, &[(0, 0.3), (1, 0.2), (2, -0.15)]);

    let mut errors = Vec::new();
    for dt in [1e-4, 5e-5] {
        let state = init_state(&phi0, None, 0.0, 16).unwrap();
        let cfg = StepConfig {
            dt,
            scheme: Scheme::Imex1Parabolic,
            guard: true,
        };
        let traj = run(&system, state, &cfg, 0.5, 0.1).unwrap();
        errors.push(max_mode_error(&traj, &potential, &domain, 0.0, &phi0, None));
    }
    assert!(errors[0] < 1e-6, "coarse error {:.2e}", errors[0]);
    let ratio = errors[0] / errors[1];
    assert!(
        (1.7..2.3).contains(&ratio),
        "halving the step gave error ratio {ratio:.3}, expected ~2"
    );
}

#[test]
fn solver_modes_match_linear_oracle_with_inertia() {
    let domain = domain_1d(16);
    let potential = diagnostic_potential();
    let system =
        GalerkinSystem::new(domain.clone(), potential.clone(), ForcingSpec::Zero, 16, true)
            .unwrap();
    let tau = 0.5;
    let phi0 = field_from(&domain, &[(0, 0.3), (1, 0.2), (2, -0.15), (3, 5e-4)]);
    let rho0 = SpectralField::zeros(&domain);

    let mut errors = Vec::new();
    for dt in [1e-4, 5e-5] {
        let state = init_state(&phi0, Some(&rho0), tau, 16).unwrap();
        let cfg = StepConfig {
            dt,
            scheme: Scheme::Imex1Hyperbolic,
            guard: true,
        };
        let traj = run(&system, state, &cfg, 0.5, 0.1).unwrap();
        errors.push(max_mode_error(
            &traj,
            &potential,
            &domain,
            tau,
            &phi0,
            Some(&rho0),
        ));
    }
    assert!(errors[0] < 1e-5, "coarse error {:.2e}", errors[0]);
    let ratio = errors[0] / errors[1];
    assert!(
        (1.6..2.4).contains(&ratio),
        "halving the step gave error ratio {ratio:.3}, expected ~2"
    );
}

#[test]
fn scalar_recursion_converges_to_oracle_at_scheme_order() {
    let (sigma, g, c0, r0) = (0.4, 0.25, 1.2, -0.3);
    let cases = [
        (Scheme::Imex1Parabolic, 0.0),
        (Scheme::Imex2Parabolic, 0.0),
        (Scheme::Imex1Hyperbolic, 0.3),
    ];
    for (scheme, tau) in cases {
        let oracle = mean_ode_oracle(tau, sigma, g, c0, r0).unwrap();
        let target = oracle.eval(1.0);
        let mut errors = Vec::new();
        for j in 0..5 {
            let n_steps = 50 << j;
            let dt = 1.0 / n_steps as f64;
            let r_init = if scheme.is_hyperbolic() { r0 } else { 0.0 };
            let trace =
                scalar_recursion(scheme, tau, sigma, dt, n_steps, c0, r_init, |_| g).unwrap();
            errors.push((trace.values[n_steps] - target).abs());
        }
        for pair in errors.windows(2) {
            let observed = (pair[0] / pair[1]).log2();
            assert!(
                (observed - scheme.order()).abs() < 0.3,
                "{}: observed order {observed:.3}",
                scheme.name()
            );
        }
    }
}

#[test]
fn solver_mean_channel_reproduces_scalar_recursion_bitwise() {
    let domain = domain_1d(8);
    let potential = PotentialSpec::classical(1.0, 0.4).unwrap();
    let system = GalerkinSystem::new(
        domain.clone(),
        potential,
        ForcingSpec::Constant(0.3),
        8,
        true,
    )
    .unwrap();
    let tau = 0.3;
    let volume_sqrt = domain.volume().sqrt();
    let mut phi0 = field_from(&domain, &[(2, 0.2), (3, -0.1)]);
    phi0.set_coeff(&[0], 0.4 * volume_sqrt).unwrap();
    let state = init_state(&phi0, None, tau, 8).unwrap();
    let cfg = StepConfig {
        dt: 0.01,
        scheme: Scheme::Imex1Hyperbolic,
        guard: true,
    };
    let traj = run(&system, state, &cfg, 0.2, 0.01).unwrap();

    let trace = scalar_recursion(
        Scheme::Imex1Hyperbolic,
        tau,
        0.4,
        0.01,
        20,
        0.4 * volume_sqrt,
        0.0,
        |_| 0.3 * volume_sqrt,
    )
    .unwrap();
    for i in 0..traj.len() {
        let solver = traj.phi(i).coeff(&[0]).unwrap();
        assert_eq!(
            solver.to_bits(),
            trace.values[i].to_bits(),
            "mean channel diverged from the scalar recursion at sample {i}"
        );
    }
}

fn final_state(
    system: &GalerkinSystem,
    phi0: &SpectralField,
    rho0: Option<&SpectralField>,
    tau: f64,
    scheme: Scheme,
    dt: f64,
    t_final: f64,
) -> SpectralField {
    let state = init_state(phi0, rho0, tau, system.mode_count()).unwrap();
    let cfg = StepConfig {
        dt,
        scheme,
        guard: true,
    };
    run(system, state, &cfg, t_final, t_final)
        .unwrap()
        .final_phi()
        .clone()
}

#[test]
fn richardson_self_convergence_matches_scheme_orders() {
    let domain = domain_1d(16);
    let potential = PotentialSpec::classical(1.0, 0.1).unwrap();
    let system =
        GalerkinSystem::new(domain.clone(), potential, ForcingSpec::Zero, 16, true).unwrap();
    let amp = (TWO_PI / 2.0).sqrt();
    let phi0 = field_from(&domain, &[(2, 0.2 * amp), (4, 0.05 * amp)]);

    let cases = [
        (Scheme::Imex1Parabolic, 0.0, 1.0, 0.15),
        (Scheme::Imex2Parabolic, 0.0, 2.0, 0.2),
        (Scheme::Imex1Hyperbolic, 0.2, 1.0, 0.15),
    ];
    for (scheme, tau, order, slack) in cases {
        // By longer horizons the bootstrap transient of the two-step scheme
        // has decayed below the asymptotic error and the ratios go noisy;
        // a short horizon keeps all three schemes in their clean regime.
        let rho0 = (tau > 0.0).then(|| SpectralField::zeros(&domain));
        let finals: Vec<SpectralField> = [2e-3, 1e-3, 5e-4]
            .iter()
            .map(|&dt| final_state(&system, &phi0, rho0.as_ref(), tau, scheme, dt, 0.05))
            .collect();
        let d1 = chrelax::sobolev::norm(&finals[0].sub(&finals[1]).unwrap(), NormKind::H);
        let d2 = chrelax::sobolev::norm(&finals[1].sub(&finals[2]).unwrap(), NormKind::H);
        let observed = (d1 / d2).log2();
        assert!(
            (observed - order).abs() < slack,
            "{}: observed order {observed:.3}, expected {order}",
            scheme.name()
        );
    }
}

#[test]
fn energy_decrease_rate_matches_chemical_potential_pairing() {
    // For the flow phi_t = Delta mu (sigma = 0, g = 0), the chain rule gives
    // dE/dt = (mu, phi_t) in the plain coefficient inner product. Check it
    // with a midpoint evaluation along a finely stepped trajectory.
    let domain = domain_1d(16);
    let potential = PotentialSpec::diagnostic(vec![(3, 1.0)], 1.0, 1.0, 0.0).unwrap();
    let system =
        GalerkinSystem::new(domain.clone(), potential.clone(), ForcingSpec::Zero, 16, true)
            .unwrap();
    let amp = (TWO_PI / 2.0).sqrt();
    let phi0 = field_from(&domain, &[(2, 0.2 * amp), (4, 0.05 * amp)]);
    let dt = 1e-5;
    let state = init_state(&phi0, None, 0.0, 16).unwrap();
    let cfg = StepConfig {
        dt,
        scheme: Scheme::Imex1Parabolic,
        guard: true,
    };
    let traj = run(&system, state, &cfg, 5e-4, dt).unwrap();

    for i in 10..40 {
        let a = traj.phi(i);
        let b = traj.phi(i + 1);
        let de = (energy(b, &potential).unwrap().total - energy(a, &potential).unwrap().total) / dt;
        let mid = a.add(b).unwrap().scale(0.5);
        let mu = system.compute_mu(&mid).unwrap();
        let phi_dot = b.sub(a).unwrap().scale(1.0 / dt);
        let chain = pairing(&mu, &phi_dot).unwrap();
        let denom = de.abs().max(1.0);
        assert!(
            ((de - chain) / denom).abs() < 1e-4,
            "step {i}: dE/dt = {de:.6e} vs pairing {chain:.6e}"
        );
    }
}

/// Assemble mu = -Delta w + beta'(phi) w + (nu - lambda) w term by term on a
/// quadrature grid fine enough to make every product exact.
fn brute_force_mu(
    system: &GalerkinSystem,
    domain: &DomainSpec,
    potential: &PotentialSpec,
    phi: &SpectralField,
) -> SpectralField {
    let n = system.mode_count();
    let fine = Transform::for_grid(domain, (64, 1));
    let nonlinear = |field: &SpectralField, f: &dyn Fn(f64) -> f64| -> SpectralField {
        fine.forward(&fine.inverse(field).map(f)).unwrap().project(n)
    };
    let w = phi
        .laplacian()
        .scale(-1.0)
        .add(&nonlinear(phi, &|s| potential.beta(s)))
        .unwrap()
        .sub(&phi.scale(potential.lambda))
        .unwrap()
        .project(n);
    let beta_prime_grid = fine.inverse(phi).map(|s| potential.beta_prime(s));
    let product = GridField::from_values(
        domain,
        beta_prime_grid.values() * fine.inverse(&w).values(),
    );
    w.laplacian()
        .scale(-1.0)
        .add(&fine.forward(&product).unwrap().project(n))
        .unwrap()
        .add(&w.scale(potential.nu - potential.lambda))
        .unwrap()
}

#[test]
fn chemical_potential_matches_brute_force_quadrature() {
    let domain = DomainSpec::new_1d(TWO_PI, 8, 12).unwrap();
    let potential = PotentialSpec::classical(1.3, 0.2).unwrap();
    let system =
        GalerkinSystem::new(domain.clone(), potential.clone(), ForcingSpec::Zero, 8, true)
            .unwrap();
    let phi = field_from(
        &domain,
        &[(0, 0.4), (1, -0.3), (2, 0.25), (3, 0.1), (5, -0.05)],
    );
    let fast = system.compute_mu(&phi).unwrap();
    let brute = brute_force_mu(&system, &domain, &potential, &phi);
    let diff = fast.sub(&brute).unwrap().max_abs_coeff();
    assert!(diff < 1e-10, "mu assemblies disagree by {diff:.2e}");
}

#[test]
fn manufactured_solution_error_decreases_at_first_order() {
    let domain = domain_1d(16);
    let potential = PotentialSpec::classical(1.0, 0.1).unwrap();
    let tau = 0.1;
    let amp = 0.1 * (TWO_PI / 2.0).sqrt();
    let solution = MmsSolution::new(vec![MmsTerm {
        mode: vec![2],
        amp,
        decay: 1.0,
    }])
    .unwrap();
    let base =
        GalerkinSystem::new(domain.clone(), potential, ForcingSpec::Zero, 16, true).unwrap();
    let forcing = mms_forcing(solution.clone(), &base, tau).unwrap();
    let system = base.with_forcing(forcing).unwrap();

    let phi0 = solution.phi_at(&domain, 0.0).unwrap();
    let rho0 = solution.phi_dt_at(&domain, 0.0).unwrap();
    let target = solution.phi_at(&domain, 1.0).unwrap();

    let mut errors = Vec::new();
    for dt in [4e-3, 2e-3, 1e-3] {
        let state = init_state(&phi0, Some(&rho0), tau, 16).unwrap();
        let cfg = StepConfig {
            dt,
            scheme: Scheme::Imex1Hyperbolic,
            guard: true,
        };
        let traj = run(&system, state, &cfg, 1.0, 1.0).unwrap();
        errors.push(traj.final_phi().sub(&target).unwrap().max_abs_coeff());
    }
    for pair in errors.windows(2) {
        let observed = (pair[0] / pair[1]).log2();
        assert!(
            (observed - 1.0).abs() < 0.2,
            "observed order {observed:.3} from errors {errors:?}"
        );
    }
}

#[test]
fn dual_norm_time_derivative_satisfies_discrete_chain_rule() {
    // For zero-mean zeta(t), the coefficient pairing of zeta_t with the
    // zero-mean Neumann inverse of zeta equals half the time derivative of
    // the squared dual norm; one-sided differences converge at first order.
    let domain = domain_1d(8);
    let v1 = field_from(&domain, &[(1, 0.8), (3, -0.4)]);
    let v2 = field_from(&domain, &[(2, 0.5), (4, 0.3)]);
    let zeta = |t: f64| v1.scale((-t).exp()).add(&v2.scale((2.0 * t).sin())).unwrap();
    let zeta_dot = |t: f64| {
        v1.scale(-(-t).exp())
            .add(&v2.scale(2.0 * (2.0 * t).cos()))
            .unwrap()
    };
    let vstar_sq = |t: f64| {
        let n = chrelax::sobolev::norm(&zeta(t), NormKind::Vstar);
        n * n
    };

    let mut worst = Vec::new();
    for dt in [1e-3, 5e-4] {
        let mut max_gap: f64 = 0.0;
        for i in 0..20 {
            let t = 0.05 * i as f64;
            let fd = (vstar_sq(t + dt) - vstar_sq(t)) / (2.0 * dt);
            let exact = pairing(&zeta_dot(t), &inv_neumann(&zeta(t))).unwrap();
            max_gap = max_gap.max((fd - exact).abs());
        }
        worst.push(max_gap);
    }
    assert!(worst[0] < 1e-2, "gap {:.2e}", worst[0]);
    let ratio = worst[0] / worst[1];
    assert!(
        (1.5..2.6).contains(&ratio),
        "gap ratio {ratio:.3} under step halving, expected ~2"
    );
}
