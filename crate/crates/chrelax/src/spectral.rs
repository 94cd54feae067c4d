//! Neumann boxes, cosine-eigenbasis coefficient fields, and collocation
//! transforms.
//!
//! On a box with edge lengths L_a the Neumann Laplacian has the orthonormal
//! eigenbasis (per axis)
//!
//! ```text
//!   e_0(x) = sqrt(1/L),   e_k(x) = sqrt(2/L) cos(k pi x / L),   k >= 1,
//! ```
//!
//! with eigenvalues lambda_k = (k pi / L)^2; multi-indices add eigenvalues.
//! A [`SpectralField`] stores coefficients against this basis, so Laplacian,
//! projections and the whole scale of norms are diagonal. Grid work happens on
//! midpoint collocation grids x_j = (j + 1/2) L / g, whose quadrature is exact
//! for cosines of frequency below 2g; the dealiased grid is therefore sized so
//! cubics of retained modes transform without aliasing back into the band.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Grid factor under which cubic products of retained modes stay alias-free.
const DEALIAS_FACTOR: usize = 2;

/// Minimum grid-to-mode ratio required of configured grids when dealiasing is
/// enabled.
pub const DEALIAS_MIN_RATIO: f64 = 1.5;

/// A 1D or 2D box with per-axis truncation and collocation sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    /// 1 or 2.
    pub dim: usize,
    /// Edge lengths, one per axis.
    pub lengths: Vec<f64>,
    /// Retained modes per axis (indices 0..modes).
    pub modes: Vec<usize>,
    /// Collocation points per axis; at least `modes`.
    pub grid: Vec<usize>,
}

impl DomainSpec {
    pub fn new_1d(length: f64, modes: usize, grid: usize) -> Result<Self> {
        let spec = DomainSpec {
            dim: 1,
            lengths: vec![length],
            modes: vec![modes],
            grid: vec![grid],
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn new_2d(lengths: [f64; 2], modes: [usize; 2], grid: [usize; 2]) -> Result<Self> {
        let spec = DomainSpec {
            dim: 2,
            lengths: lengths.to_vec(),
            modes: modes.to_vec(),
            grid: grid.to_vec(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim != 1 && self.dim != 2 {
            return Err(Error::InvalidParameter(format!(
                "domain dim must be 1 or 2, got {}",
                self.dim
            )));
        }
        if self.lengths.len() != self.dim || self.modes.len() != self.dim || self.grid.len() != self.dim {
            return Err(Error::InvalidParameter(format!(
                "lengths/modes/grid must each have {} entries",
                self.dim
            )));
        }
        for &len in &self.lengths {
            if !len.is_finite() || len <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "edge lengths must be finite and > 0, got {len}"
                )));
            }
        }
        for (axis, (&m, &g)) in self.modes.iter().zip(&self.grid).enumerate() {
            if m == 0 {
                return Err(Error::InvalidParameter(format!(
                    "axis {axis} must retain at least one mode"
                )));
            }
            if g < m {
                return Err(Error::InvalidParameter(format!(
                    "axis {axis}: grid ({g}) must be at least the mode count ({m})"
                )));
            }
        }
        Ok(())
    }

    /// Per-axis (length, modes, grid), padded with a trivial axis in 1D so all
    /// internal code is uniformly two-dimensional; the trivial axis has L = 1,
    /// a single constant mode e_0 = 1, and contributes nothing to eigenvalues,
    /// volumes or means.
    pub(crate) fn axes(&self) -> [(f64, usize, usize); 2] {
        match self.dim {
            1 => [(self.lengths[0], self.modes[0], self.grid[0]), (1.0, 1, 1)],
            _ => [
                (self.lengths[0], self.modes[0], self.grid[0]),
                (self.lengths[1], self.modes[1], self.grid[1]),
            ],
        }
    }

    pub fn volume(&self) -> f64 {
        self.lengths.iter().product()
    }

    /// Coefficient array shape (second component 1 in 1D).
    pub fn mode_shape(&self) -> (usize, usize) {
        let [(_, m1, _), (_, m2, _)] = self.axes();
        (m1, m2)
    }

    /// Total number of retained coefficients.
    pub fn mode_count(&self) -> usize {
        let (m1, m2) = self.mode_shape();
        m1 * m2
    }

    /// Eigenvalue of the single-axis mode k.
    pub fn axis_eigenvalue(&self, axis: usize, k: usize) -> f64 {
        let (len, _, _) = self.axes()[axis];
        let w = k as f64 * std::f64::consts::PI / len;
        w * w
    }

    /// Eigenvalue of the multi-index (sums over axes).
    pub fn eigenvalue(&self, index: &[usize]) -> f64 {
        index
            .iter()
            .enumerate()
            .map(|(a, &k)| self.axis_eigenvalue(a, k))
            .sum()
    }

    /// Eigenvalues laid out like a coefficient array.
    pub(crate) fn eigenvalue_grid(&self) -> Array2<f64> {
        let [(l1, m1, _), (l2, m2, _)] = self.axes();
        let mut out = Array2::zeros((m1, m2));
        for k1 in 0..m1 {
            let w1 = k1 as f64 * std::f64::consts::PI / l1;
            for k2 in 0..m2 {
                let w2 = k2 as f64 * std::f64::consts::PI / l2;
                out[[k1, k2]] = w1 * w1 + w2 * w2;
            }
        }
        out
    }

    /// Eigenvalue and a pointwise evaluator for the normalized eigenfunction.
    pub fn eigenpair(&self, index: &[usize]) -> Result<(f64, EigenFn)> {
        if index.len() != self.dim {
            return Err(Error::InvalidParameter(format!(
                "eigenpair index must have {} entries, got {}",
                self.dim,
                index.len()
            )));
        }
        for (axis, (&k, &m)) in index.iter().zip(&self.modes).enumerate() {
            if k >= m {
                return Err(Error::InvalidParameter(format!(
                    "axis {axis}: mode {k} out of range (< {m})"
                )));
            }
        }
        let axes = index
            .iter()
            .zip(&self.lengths)
            .map(|(&k, &len)| (len, k))
            .collect();
        Ok((self.eigenvalue(index), EigenFn { axes }))
    }
}

/// Evaluator for a product of normalized axis eigenfunctions.
#[derive(Debug, Clone)]
pub struct EigenFn {
    axes: Vec<(f64, usize)>,
}

impl EigenFn {
    /// Value at a point (one coordinate per axis).
    pub fn eval(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.axes.len(), "point dimension mismatch");
        self.axes
            .iter()
            .zip(x)
            .map(|(&(len, k), &xi)| axis_basis_value(len, k, xi))
            .product()
    }
}

/// e_k(x) on an interval of length `len`.
fn axis_basis_value(len: f64, k: usize, x: f64) -> f64 {
    if k == 0 {
        (1.0 / len).sqrt()
    } else {
        (2.0 / len).sqrt() * (k as f64 * std::f64::consts::PI * x / len).cos()
    }
}

/// Coefficients against the cosine eigenbasis.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    domain: DomainSpec,
    coeffs: Array2<f64>,
}

impl SpectralField {
    pub fn zeros(domain: &DomainSpec) -> Self {
        let shape = domain.mode_shape();
        SpectralField {
            domain: domain.clone(),
            coeffs: Array2::zeros(shape),
        }
    }

    /// The constant field with pointwise value `value`.
    pub fn constant(domain: &DomainSpec, value: f64) -> Self {
        let mut field = SpectralField::zeros(domain);
        field.coeffs[[0, 0]] = value * domain.volume().sqrt();
        field
    }

    /// Build from a flat row-major coefficient vector.
    pub fn from_flat(domain: &DomainSpec, flat: &[f64]) -> Result<Self> {
        let (m1, m2) = domain.mode_shape();
        if flat.len() != m1 * m2 {
            return Err(Error::InvalidParameter(format!(
                "expected {} coefficients, got {}",
                m1 * m2,
                flat.len()
            )));
        }
        let coeffs = Array2::from_shape_vec((m1, m2), flat.to_vec())
            .expect("shape checked above");
        Ok(SpectralField {
            domain: domain.clone(),
            coeffs,
        })
    }

    /// Build from sparse (multi-index, coefficient) entries.
    pub fn from_modes(domain: &DomainSpec, entries: &[(Vec<usize>, f64)]) -> Result<Self> {
        let mut field = SpectralField::zeros(domain);
        for (index, value) in entries {
            field.set_coeff(index, *value)?;
        }
        Ok(field)
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub(crate) fn coeffs(&self) -> &Array2<f64> {
        &self.coeffs
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut Array2<f64> {
        &mut self.coeffs
    }

    fn index2(&self, index: &[usize]) -> Result<[usize; 2]> {
        if index.len() != self.domain.dim {
            return Err(Error::InvalidParameter(format!(
                "index must have {} entries, got {}",
                self.domain.dim,
                index.len()
            )));
        }
        let ix = match self.domain.dim {
            1 => [index[0], 0],
            _ => [index[0], index[1]],
        };
        let (m1, m2) = self.domain.mode_shape();
        if ix[0] >= m1 || ix[1] >= m2 {
            return Err(Error::InvalidParameter(format!(
                "mode {index:?} out of range for shape ({m1}, {m2})"
            )));
        }
        Ok(ix)
    }

    pub fn coeff(&self, index: &[usize]) -> Result<f64> {
        let ix = self.index2(index)?;
        Ok(self.coeffs[ix])
    }

    pub fn set_coeff(&mut self, index: &[usize], value: f64) -> Result<()> {
        let ix = self.index2(index)?;
        self.coeffs[ix] = value;
        Ok(())
    }

    /// Row-major flat copy of the coefficients.
    pub fn to_flat(&self) -> Vec<f64> {
        self.coeffs.iter().copied().collect()
    }

    /// Multi-indices with coefficients, row-major.
    pub fn iter_modes(&self) -> impl Iterator<Item = (Vec<usize>, f64)> + '_ {
        let dim = self.domain.dim;
        self.coeffs.indexed_iter().map(move |((k1, k2), &c)| {
            let index = if dim == 1 { vec![k1] } else { vec![k1, k2] };
            (index, c)
        })
    }

    /// New field with coefficients c_k -> op(lambda_k, c_k).
    pub(crate) fn map_eig(&self, op: impl Fn(f64, f64) -> f64) -> Self {
        let eig = self.domain.eigenvalue_grid();
        let mut coeffs = self.coeffs.clone();
        coeffs.zip_mut_with(&eig, |c, &lam| *c = op(lam, *c));
        SpectralField {
            domain: self.domain.clone(),
            coeffs,
        }
    }

    /// Spectral Laplacian: c_k -> -lambda_k c_k.
    pub fn laplacian(&self) -> Self {
        self.map_eig(|lam, c| -lam * c)
    }

    /// Galerkin projection: zero every coefficient with an axis index >= n.
    pub fn project(&self, n: usize) -> Self {
        let mut out = self.clone();
        out.project_in_place(n);
        out
    }

    pub(crate) fn project_in_place(&mut self, n: usize) {
        let (m1, m2) = self.domain.mode_shape();
        for k1 in 0..m1 {
            for k2 in 0..m2 {
                // The trivial axis in 1D only ever has index 0.
                let beyond = k1 >= n || (self.domain.dim == 2 && k2 >= n);
                if beyond {
                    self.coeffs[[k1, k2]] = 0.0;
                }
            }
        }
    }

    /// Spatial mean: c_0 / sqrt(|Omega|).
    pub fn mean(&self) -> f64 {
        self.coeffs[[0, 0]] / self.domain.volume().sqrt()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }

    pub fn scale(&self, factor: f64) -> Self {
        SpectralField {
            domain: self.domain.clone(),
            coeffs: &self.coeffs * factor,
        }
    }

    /// self + factor * other.
    pub fn axpy(&self, factor: f64, other: &SpectralField) -> Result<Self> {
        self.check_same_domain(other)?;
        Ok(SpectralField {
            domain: self.domain.clone(),
            coeffs: &self.coeffs + &(factor * &other.coeffs),
        })
    }

    pub fn add(&self, other: &SpectralField) -> Result<Self> {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &SpectralField) -> Result<Self> {
        self.axpy(-1.0, other)
    }

    pub(crate) fn check_same_domain(&self, other: &SpectralField) -> Result<()> {
        if self.domain != other.domain {
            return Err(Error::DomainMismatch(
                "fields live on different domains".into(),
            ));
        }
        Ok(())
    }

    /// Synthesize on the domain's own collocation grid.
    pub fn inverse(&self) -> GridField {
        Transform::plain(&self.domain).inverse(self)
    }
}

/// Pointwise values on a midpoint collocation grid.
#[derive(Debug, Clone)]
pub struct GridField {
    domain: DomainSpec,
    values: Array2<f64>,
}

impl GridField {
    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    /// Grid sizes this field was realized on (may exceed `domain.grid` for
    /// dealiased work grids).
    pub fn grid_shape(&self) -> (usize, usize) {
        self.values.dim()
    }

    pub fn from_values(domain: &DomainSpec, values: Array2<f64>) -> Self {
        GridField {
            domain: domain.clone(),
            values,
        }
    }

    /// Evaluate a function on this field's grid points.
    pub fn from_fn(domain: &DomainSpec, f: impl Fn(&[f64]) -> f64) -> Self {
        let [(l1, _, g1), (l2, _, g2)] = domain.axes();
        let mut values = Array2::zeros((g1, g2));
        for j1 in 0..g1 {
            let x1 = (j1 as f64 + 0.5) * l1 / g1 as f64;
            for j2 in 0..g2 {
                let x2 = (j2 as f64 + 0.5) * l2 / g2 as f64;
                values[[j1, j2]] = if domain.dim == 1 {
                    f(&[x1])
                } else {
                    f(&[x1, x2])
                };
            }
        }
        GridField {
            domain: domain.clone(),
            values,
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        GridField {
            domain: self.domain.clone(),
            values: self.values.mapv(f),
        }
    }

    /// Midpoint-rule integral over the box.
    pub fn integrate(&self) -> f64 {
        let (g1, g2) = self.values.dim();
        let weight = self.domain.volume() / (g1 * g2) as f64;
        weight * self.values.sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Analyze against the basis (grid must match the transform used).
    pub fn forward(&self) -> Result<SpectralField> {
        Transform::for_grid(&self.domain, self.grid_shape()).forward(self)
    }
}

/// Cached synthesis matrices for one (domain, grid) pairing.
///
/// Synthesis per axis is the (grid x modes) matrix S[j, k] = e_k(x_j); with
/// midpoint weights L/g the analysis matrix is its scaled transpose, which is
/// exact for any band-limited field because the quadrature integrates cosine
/// products of frequency < 2g exactly.
#[derive(Debug, Clone)]
pub struct Transform {
    domain: DomainSpec,
    grid: [usize; 2],
    synth: [Array2<f64>; 2],
}

impl Transform {
    /// Transform on the domain's configured grid.
    pub fn plain(domain: &DomainSpec) -> Self {
        let [(_, _, g1), (_, _, g2)] = domain.axes();
        Transform::for_grid(domain, (g1, g2))
    }

    /// Transform on the cubic-safe work grid: per axis
    /// max(grid, DEALIAS_FACTOR * modes).
    pub fn dealiased(domain: &DomainSpec) -> Self {
        let [(_, m1, g1), (_, m2, g2)] = domain.axes();
        let p1 = g1.max(DEALIAS_FACTOR * m1);
        let p2 = if domain.dim == 1 {
            1
        } else {
            g2.max(DEALIAS_FACTOR * m2)
        };
        Transform::for_grid(domain, (p1, p2))
    }

    /// Transform on an explicit grid (used to re-analyze snapshots).
    pub fn for_grid(domain: &DomainSpec, grid: (usize, usize)) -> Self {
        let [(l1, m1, _), (l2, m2, _)] = domain.axes();
        let synth1 = axis_synthesis(l1, m1, grid.0);
        let synth2 = axis_synthesis(l2, m2, grid.1);
        Transform {
            domain: domain.clone(),
            grid: [grid.0, grid.1],
            synth: [synth1, synth2],
        }
    }

    pub fn grid_shape(&self) -> (usize, usize) {
        (self.grid[0], self.grid[1])
    }

    /// Coefficients -> grid values.
    pub fn inverse(&self, field: &SpectralField) -> GridField {
        debug_assert_eq!(field.domain, self.domain, "transform/domain mismatch");
        // V = S1 C S2^T
        let values = self.synth[0].dot(field.coeffs()).dot(&self.synth[1].t());
        GridField {
            domain: self.domain.clone(),
            values,
        }
    }

    /// Grid values -> coefficients (errors if the grid shapes disagree).
    pub fn forward(&self, grid: &GridField) -> Result<SpectralField> {
        if grid.values.dim() != self.grid_shape() {
            return Err(Error::DomainMismatch(format!(
                "grid shape {:?} does not match transform grid {:?}",
                grid.values.dim(),
                self.grid_shape()
            )));
        }
        let [(l1, _, _), (l2, _, _)] = self.domain.axes();
        let weight = (l1 / self.grid[0] as f64) * (l2 / self.grid[1] as f64);
        // C = w S1^T V S2
        let coeffs = self.synth[0].t().dot(&grid.values).dot(&self.synth[1]) * weight;
        Ok(SpectralField {
            domain: self.domain.clone(),
            coeffs,
        })
    }

    /// Inverse, pointwise map, forward. Errors with `context` if the mapped
    /// values are non-finite.
    pub fn apply_pointwise(
        &self,
        field: &SpectralField,
        f: impl Fn(f64) -> f64,
        context: &'static str,
    ) -> Result<SpectralField> {
        let grid = self.inverse(field);
        let mapped = grid.map(&f);
        if !mapped.values.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite {
                context,
                max_abs: grid.max_abs(),
            });
        }
        self.forward(&mapped)
    }
}

fn axis_synthesis(len: f64, modes: usize, grid: usize) -> Array2<f64> {
    let mut synth = Array2::zeros((grid, modes));
    for j in 0..grid {
        let x = (j as f64 + 0.5) * len / grid as f64;
        for k in 0..modes {
            synth[[j, k]] = axis_basis_value(len, k, x);
        }
    }
    synth
}

/// Pointwise nonlinearity on coefficients: synthesize (on the dealiased work
/// grid when `dealias` is set), apply `f`, analyze back, truncating at the
/// domain's retained modes.
pub fn nonlinear_apply(
    field: &SpectralField,
    f: impl Fn(f64) -> f64,
    dealias: bool,
    context: &'static str,
) -> Result<SpectralField> {
    let transform = if dealias {
        Transform::dealiased(field.domain())
    } else {
        Transform::plain(field.domain())
    };
    transform.apply_pointwise(field, f, context)
}
