//! Diagonal norms, the inverse Neumann operator, duality pairings, and the
//! free energy.
//!
//! Every norm here is diagonal on the cosine eigenbasis, so evaluating it is a
//! weighted sum of squared coefficients. `Vstar` is the two-term dual norm
//! (gradient-of-inverse-Laplacian part plus mean part); `W`/`Z` are the graph
//! norms of the Laplacian and its square, and `Wstar`/`Zstar` their diagonal
//! duals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::PotentialSpec;
use crate::spectral::{SpectralField, Transform};

/// Which member of the norm scale to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    H,
    V,
    Vstar,
    W,
    Wstar,
    Z,
    Zstar,
}

/// Squared-norm weight for one eigenvalue channel.
fn channel_weight(kind: NormKind, lambda: f64, volume: f64) -> f64 {
    match kind {
        NormKind::H => 1.0,
        NormKind::V => 1.0 + lambda,
        NormKind::Vstar => {
            if lambda == 0.0 {
                1.0 / volume
            } else {
                1.0 / lambda
            }
        }
        NormKind::W => 1.0 + lambda * lambda,
        NormKind::Wstar => 1.0 / (1.0 + lambda * lambda),
        NormKind::Z => {
            let w = 1.0 + lambda * lambda;
            w * w
        }
        NormKind::Zstar => {
            let w = 1.0 + lambda * lambda;
            1.0 / (w * w)
        }
    }
}

/// Norm of `v` in the requested space.
pub fn norm(v: &SpectralField, kind: NormKind) -> f64 {
    norm_squared(v, kind).sqrt()
}

pub fn norm_squared(v: &SpectralField, kind: NormKind) -> f64 {
    let volume = v.domain().volume();
    let eig = v.domain().eigenvalue_grid();
    let mut sum = 0.0;
    for (c, &lam) in v.coeffs().iter().zip(eig.iter()) {
        sum += channel_weight(kind, lam, volume) * c * c;
    }
    sum
}

/// Solve the Neumann problem -Delta z = zeta - mean(zeta), mean(z) = 0.
pub fn inv_neumann(zeta: &SpectralField) -> SpectralField {
    zeta.map_eig(|lam, c| if lam == 0.0 { 0.0 } else { c / lam })
}

/// H inner product of the coefficient sequences.
pub fn pairing(zeta: &SpectralField, v: &SpectralField) -> Result<f64> {
    zeta.check_same_domain(v)?;
    Ok(zeta
        .coeffs()
        .iter()
        .zip(v.coeffs().iter())
        .map(|(a, b)| a * b)
        .sum())
}

/// The free energy split into its squared-residual and well parts.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub total: f64,
    /// (1/2) integral of (-Delta v + f(v))^2.
    pub willmore_part: f64,
    /// Integral of |grad v|^2 / 2 + F(v).
    pub gl_part: f64,
    pub nu: f64,
}

/// Free energy of `phi`; quadrature runs on the dealiased work grid.
pub fn energy(phi: &SpectralField, potential: &PotentialSpec) -> Result<EnergyBreakdown> {
    energy_with(&Transform::dealiased(phi.domain()), phi, potential)
}

/// Free energy using a caller-cached transform for the grid work.
pub fn energy_with(
    transform: &Transform,
    phi: &SpectralField,
    potential: &PotentialSpec,
) -> Result<EnergyBreakdown> {
    let values = transform.inverse(phi);
    let lap_values = transform.inverse(&phi.laplacian());

    let willmore_integrand = zip_grids(&values, &lap_values, |v, lap| {
        let r = -lap + potential.f_eval(v);
        0.5 * r * r
    });
    let well_integrand = values.map(|v| potential.big_f_eval(v));

    let willmore_part = willmore_integrand.integrate();
    let well_part = well_integrand.integrate();
    // |grad v|^2 / 2 integrates to sum(lambda_k c_k^2) / 2 exactly.
    let eig = phi.domain().eigenvalue_grid();
    let gradient_part: f64 = phi
        .coeffs()
        .iter()
        .zip(eig.iter())
        .map(|(c, &lam)| 0.5 * lam * c * c)
        .sum();

    let gl_part = gradient_part + well_part;
    let total = willmore_part + potential.nu * gl_part;
    if !total.is_finite() {
        return Err(Error::NonFinite {
            context: "energy quadrature",
            max_abs: values.max_abs(),
        });
    }
    Ok(EnergyBreakdown {
        total,
        willmore_part,
        gl_part,
        nu: potential.nu,
    })
}

/// Combine two grids realized on the same transform pointwise.
fn zip_grids(
    a: &crate::spectral::GridField,
    b: &crate::spectral::GridField,
    f: impl Fn(f64, f64) -> f64,
) -> crate::spectral::GridField {
    let mut values = a.values().clone();
    values.zip_mut_with(b.values(), |x, &y| *x = f(*x, y));
    crate::spectral::GridField::from_values(a.domain(), values)
}

/// Smallest constant making `norm(v, V) <= delta * norm(lap v, H) + C * norm(v, Vstar)`
/// hold for every field band-limited to the domain's retained modes.
///
/// Per nonzero channel the requirement is C^2 >= lambda (1 + lambda) -
/// delta^2 lambda^3, clipped at zero; the mean channel requires C^2 >= |Omega|.
pub fn compactness_constant(domain: &crate::spectral::DomainSpec, delta: f64) -> f64 {
    let mut c_sq = domain.volume();
    for &lam in domain.eigenvalue_grid().iter() {
        if lam > 0.0 {
            let need = (lam * (1.0 + lam) - delta * delta * lam.powi(3)).max(0.0);
            c_sq = c_sq.max(need);
        }
    }
    c_sq.sqrt()
}

/// Both sides of the interpolation inequality, for diagnostics: returns
/// (norm(v, V), delta * norm(lap v, H) + C * norm(v, Vstar)).
pub fn compactness_check(v: &SpectralField, delta: f64) -> Result<(f64, f64)> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "compactness check needs delta > 0, got {delta}"
        )));
    }
    let lhs = norm(v, NormKind::V);
    let c = compactness_constant(v.domain(), delta);
    let rhs = delta * norm(&v.laplacian(), NormKind::H) + c * norm(v, NormKind::Vstar);
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::DomainSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn domain() -> DomainSpec {
        DomainSpec::new_1d(2.0, 8, 16).unwrap()
    }

    fn mode(domain: &DomainSpec, k: usize, amp: f64) -> SpectralField {
        SpectralField::from_modes(domain, &[(vec![k], amp)]).unwrap()
    }

    #[test]
    fn inv_neumann_diagonal_action() {
        let d = domain();
        let e3 = mode(&d, 3, 1.0);
        let z = inv_neumann(&e3);
        let lam = d.eigenvalue(&[3]);
        assert!((z.coeff(&[3]).unwrap() - 1.0 / lam).abs() < 1e-15);
        assert_eq!(z.mean(), 0.0);

        let constant = SpectralField::constant(&d, 4.2);
        assert_eq!(inv_neumann(&constant).max_abs_coeff(), 0.0);
    }

    #[test]
    fn inv_neumann_inverts_laplacian_up_to_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let d = domain();
        let flat: Vec<f64> = (0..d.mode_count()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let zeta = SpectralField::from_flat(&d, &flat).unwrap();
        let back = inv_neumann(&zeta).laplacian().scale(-1.0);
        let mean_removed = zeta.axpy(-zeta.mean(), &SpectralField::constant(&d, 1.0)).unwrap();
        let err = back.sub(&mean_removed).unwrap().max_abs_coeff();
        assert!(err < 1e-15, "residual {err}");
    }

    #[test]
    fn norm_frozen_values_on_eigenmodes() {
        let d = domain();
        let k = 5;
        let lam = d.eigenvalue(&[k]);
        let ek = mode(&d, k, 1.0);
        assert!((norm(&ek, NormKind::H) - 1.0).abs() < 1e-15);
        assert!((norm(&ek, NormKind::V) - (1.0 + lam).sqrt()).abs() < 1e-13);
        assert!((norm(&ek, NormKind::Vstar) - lam.powf(-0.5)).abs() < 1e-15);
        assert!((norm_squared(&ek, NormKind::W) - (1.0 + lam * lam)).abs() < 1e-10);
        assert!((norm(&ek, NormKind::Wstar) - (1.0 + lam * lam).powf(-0.5)).abs() < 1e-15);
        assert!((norm_squared(&ek, NormKind::Z) - (1.0 + lam * lam).powi(2)).abs() < 1e-7);
        assert!((norm(&ek, NormKind::Zstar) - 1.0 / (1.0 + lam * lam)).abs() < 1e-15);
    }

    #[test]
    fn vstar_of_constant_is_the_mean() {
        let d = domain();
        let one = SpectralField::constant(&d, 1.0);
        assert!((norm(&one, NormKind::Vstar) - 1.0).abs() < 1e-15);
        let c = SpectralField::constant(&d, -2.5);
        assert!((norm(&c, NormKind::Vstar) - 2.5).abs() < 1e-14);
    }

    #[test]
    fn vstar_matches_gradient_quadrature() {
        // For zero-mean zeta the squared dual norm equals the integral of
        // |grad inv_neumann(zeta)|^2, computable here as pairing with the
        // operator output.
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let d = domain();
        let mut flat: Vec<f64> = (0..d.mode_count()).map(|_| rng.random_range(-1.0..1.0)).collect();
        flat[0] = 0.0;
        let zeta = SpectralField::from_flat(&d, &flat).unwrap();
        let lhs = pairing(&zeta, &inv_neumann(&zeta)).unwrap();
        let rhs = norm_squared(&zeta, NormKind::Vstar);
        assert!((lhs - rhs).abs() < 1e-13 * rhs.max(1.0));
        assert!(lhs >= 0.0);
    }

    #[test]
    fn pairing_orthonormality_and_mean() {
        let d = domain();
        assert!((pairing(&mode(&d, 2, 1.0), &mode(&d, 2, 1.0)).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(pairing(&mode(&d, 2, 1.0), &mode(&d, 3, 1.0)).unwrap(), 0.0);

        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let flat: Vec<f64> = (0..d.mode_count()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let v = SpectralField::from_flat(&d, &flat).unwrap();
        let one = SpectralField::constant(&d, 1.0);
        let lhs = pairing(&one, &v).unwrap() / d.volume();
        assert!((lhs - v.mean()).abs() < 1e-15);
    }

    #[test]
    fn pairing_rejects_mismatched_domains() {
        let a = SpectralField::zeros(&domain());
        let b = SpectralField::zeros(&DomainSpec::new_1d(2.0, 9, 16).unwrap());
        assert!(pairing(&a, &b).is_err());
    }

    #[test]
    fn energy_of_pure_phases() {
        let d = domain();
        let potential = PotentialSpec::classical(1.0, 0.1).unwrap();
        let at_one = energy(&SpectralField::constant(&d, 1.0), &potential).unwrap();
        assert!(at_one.total.abs() < 1e-13, "total {}", at_one.total);

        let nu = 2.5;
        let potential = PotentialSpec::classical(nu, 0.1).unwrap();
        let at_zero = energy(&SpectralField::constant(&d, 0.0), &potential).unwrap();
        let expect = nu * d.volume() / 4.0;
        assert!((at_zero.total - expect).abs() < 1e-13);
        assert!((at_zero.total - (at_zero.willmore_part + nu * at_zero.gl_part)).abs() < 1e-12);
    }

    #[test]
    fn energy_matches_refined_quadrature() {
        // One low mode: evaluate the same integrals on a much finer grid and
        // require agreement, confirming the dealiased grid is already exact
        // enough for smooth band-limited states.
        let d = DomainSpec::new_1d(2.0, 8, 16).unwrap();
        let fine = DomainSpec::new_1d(2.0, 8, 512).unwrap();
        let potential = PotentialSpec::classical(1.3, 0.1).unwrap();
        let phi = mode(&d, 1, 0.1);
        let phi_fine = mode(&fine, 1, 0.1);
        let coarse = energy(&phi, &potential).unwrap();
        let refined = energy(&phi_fine, &potential).unwrap();
        assert!(
            (coarse.total - refined.total).abs() < 1e-9,
            "coarse {} vs refined {}",
            coarse.total,
            refined.total
        );
    }

    #[test]
    fn norm_chain_for_stiff_domains() {
        // With every nonzero eigenvalue at least one, the whole scale is
        // monotone with constant one on zero-mean fields.
        let d = DomainSpec::new_1d(2.0, 8, 16).unwrap();
        assert!(d.eigenvalue(&[1]) >= 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let mut flat: Vec<f64> = (0..d.mode_count()).map(|_| rng.random_range(-1.0..1.0)).collect();
        flat[0] = 0.0;
        let v = SpectralField::from_flat(&d, &flat).unwrap();
        let chain = [
            NormKind::Zstar,
            NormKind::Wstar,
            NormKind::Vstar,
            NormKind::H,
            NormKind::V,
            NormKind::W,
            NormKind::Z,
        ];
        let values: Vec<f64> = chain.iter().map(|&k| norm(&v, k)).collect();
        for pair in values.windows(2) {
            assert!(pair[0] <= pair[1] * (1.0 + 1e-14), "chain broke: {values:?}");
        }
    }

    #[test]
    fn compactness_inequality_holds_on_band_limited_fields() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let d = DomainSpec::new_2d([1.0, 2.0], [6, 6], [8, 8]).unwrap();
        for delta in [0.01, 0.1, 1.0] {
            for _ in 0..25 {
                let flat: Vec<f64> =
                    (0..d.mode_count()).map(|_| rng.random_range(-1.0..1.0)).collect();
                let v = SpectralField::from_flat(&d, &flat).unwrap();
                let (lhs, rhs) = compactness_check(&v, delta).unwrap();
                assert!(lhs <= rhs * (1.0 + 1e-12), "delta {delta}: {lhs} > {rhs}");
            }
        }
    }

    #[test]
    fn compactness_large_mode_dominated_by_delta_term() {
        let d = DomainSpec::new_1d(1.0, 32, 48).unwrap();
        let v = mode(&d, 31, 1.0);
        let lam = d.eigenvalue(&[31]);
        let delta = 1.0;
        let (lhs, _) = compactness_check(&v, delta).unwrap();
        assert!((lhs - (1.0 + lam).sqrt()).abs() < 1e-9);
        let delta_term = delta * norm(&v.laplacian(), NormKind::H);
        assert!(delta_term > lhs, "delta term must dominate for large modes");
    }

    #[test]
    fn compactness_rejects_bad_delta() {
        let v = SpectralField::zeros(&domain());
        assert!(compactness_check(&v, 0.0).is_err());
        assert!(compactness_check(&v, -1.0).is_err());
    }
}
