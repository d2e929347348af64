//! Multimode Gaussian states in shot-noise units.
//!
//! A state on `N` bosonic modes is stored as its first-moment vector and its
//! `2N x 2N` covariance matrix, with quadratures ordered
//! `(x1, p1, x2, p2, ...)`. The vacuum has covariance equal to the identity.

mod entropy;
mod symplectic;

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, Matrix2};
// Unused whenever std is linked into the build, e.g. by test harnesses.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Error, Result};

pub use entropy::{entropy_g, symplectic_eigenvalues};
pub use symplectic::SymplecticTransform;

/// Relative tolerance for the symmetry check on covariance matrices.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Symplectic eigenvalues may undershoot 1 by this much and still count as
/// physical.
pub const PHYSICALITY_TOLERANCE: f64 = 1e-9;

/// Pauli Z on a single mode.
pub(crate) fn pauli_z() -> Matrix2<f64> {
    Matrix2::new(1.0, 0.0, 0.0, -1.0)
}

/// The symplectic form `⊕ [[0, 1], [-1, 0]]` on `num_modes` modes.
pub fn symplectic_form(num_modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * num_modes, 2 * num_modes);
    for k in 0..num_modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

/// Writes the 2x2 block `block` at mode position `(i, j)` of `target`.
pub(crate) fn set_block(target: &mut DMatrix<f64>, i: usize, j: usize, block: &Matrix2<f64>) {
    target.fixed_view_mut::<2, 2>(2 * i, 2 * j).copy_from(block);
}

pub(crate) fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).abs()))
}

pub(crate) fn check_symmetric(cov: &DMatrix<f64>) -> Result<()> {
    if !cov.is_square() {
        return Err(invalid!(
            "covariance must be square, got {}x{}",
            cov.nrows(),
            cov.ncols()
        ));
    }
    if !cov.nrows().is_multiple_of(2) || cov.nrows() == 0 {
        return Err(invalid!(
            "covariance dimension must be positive and even, got {}",
            cov.nrows()
        ));
    }
    if cov.iter().any(|v| !v.is_finite()) {
        return Err(invalid!("covariance has non-finite entries"));
    }
    let scale = cov.amax().max(1.0);
    let defect = max_abs_diff(cov, &cov.transpose());
    if defect > SYMMETRY_TOLERANCE * scale {
        return Err(invalid!("covariance is not symmetric (defect {defect:e})"));
    }
    Ok(())
}

/// First and second moments of an `N`-mode Gaussian state.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

impl GaussianState {
    /// Validated constructor: dimensions must agree, `cov` must be symmetric
    /// and every symplectic eigenvalue must be at least `1 - 1e-9`.
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        check_symmetric(&cov)?;
        if mean.len() != cov.nrows() {
            return Err(invalid!(
                "mean has length {} but covariance is {}x{}",
                mean.len(),
                cov.nrows(),
                cov.ncols()
            ));
        }
        if mean.iter().any(|v| !v.is_finite()) {
            return Err(invalid!("mean has non-finite entries"));
        }
        let state = Self { mean, cov };
        let smallest = state.min_symplectic_eigenvalue()?;
        if smallest < 1.0 - PHYSICALITY_TOLERANCE {
            return Err(invalid!(
                "covariance violates the uncertainty principle (symplectic eigenvalue {smallest})"
            ));
        }
        Ok(state)
    }

    /// Builds a state from parts already known to be valid.
    pub(crate) fn from_parts(mean: DVector<f64>, cov: DMatrix<f64>) -> Self {
        debug_assert_eq!(mean.len(), cov.nrows());
        Self { mean, cov }
    }

    pub fn vacuum(num_modes: usize) -> Result<Self> {
        if num_modes == 0 {
            return Err(invalid!("vacuum needs at least one mode"));
        }
        Ok(Self::from_parts(
            DVector::zeros(2 * num_modes),
            DMatrix::identity(2 * num_modes, 2 * num_modes),
        ))
    }

    /// Single-mode thermal state with quadrature variance `variance`
    /// (`2 nbar + 1`).
    pub fn thermal(variance: f64) -> Result<Self> {
        if !(variance >= 1.0) || !variance.is_finite() {
            return Err(invalid!(
                "thermal variance must be at least 1, got {variance}"
            ));
        }
        Ok(Self::from_parts(
            DVector::zeros(2),
            DMatrix::identity(2, 2) * variance,
        ))
    }

    /// Coherent state: a vacuum displaced by `alpha = (x, p)`.
    pub fn coherent(alpha: [f64; 2]) -> Self {
        Self::from_parts(DVector::from_column_slice(&alpha), DMatrix::identity(2, 2))
    }

    /// Two-mode squeezed vacuum with squeezing `r`; each arm has mean photon
    /// number `sinh^2 r`.
    pub fn tmsv(r: f64) -> Result<Self> {
        if !r.is_finite() {
            return Err(invalid!("squeezing must be finite, got {r}"));
        }
        let c = (2.0 * r).cosh();
        let s = (2.0 * r).sinh();
        let mut cov = DMatrix::zeros(4, 4);
        set_block(&mut cov, 0, 0, &(Matrix2::identity() * c));
        set_block(&mut cov, 1, 1, &(Matrix2::identity() * c));
        set_block(&mut cov, 0, 1, &(pauli_z() * s));
        set_block(&mut cov, 1, 0, &(pauli_z() * s));
        Ok(Self::from_parts(DVector::zeros(4), cov))
    }

    pub fn num_modes(&self) -> usize {
        self.mean.len() / 2
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    /// Shifts the first moments of `mode` by `alpha`.
    pub fn displace(&self, mode: usize, alpha: [f64; 2]) -> Result<Self> {
        self.check_mode(mode)?;
        let mut out = self.clone();
        out.mean[2 * mode] += alpha[0];
        out.mean[2 * mode + 1] += alpha[1];
        Ok(out)
    }

    /// Tensor product `self ⊗ other`: block-direct-sum of covariances.
    pub fn tensor(&self, other: &Self) -> Self {
        let (n, m) = (self.mean.len(), other.mean.len());
        let mut mean = DVector::zeros(n + m);
        mean.rows_mut(0, n).copy_from(&self.mean);
        mean.rows_mut(n, m).copy_from(&other.mean);
        let mut cov = DMatrix::zeros(n + m, n + m);
        cov.view_mut((0, 0), (n, n)).copy_from(&self.cov);
        cov.view_mut((n, n), (m, m)).copy_from(&other.cov);
        Self::from_parts(mean, cov)
    }

    /// Applies a Gaussian unitary: `V -> S V S^T`, `X -> S X`.
    pub fn transform(&self, t: &SymplecticTransform) -> Result<Self> {
        t.apply(self)
    }

    /// Reduced state on `keep`, in the order given.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(invalid!("partial trace must keep at least one mode"));
        }
        for (idx, &mode) in keep.iter().enumerate() {
            self.check_mode(mode)?;
            if keep[..idx].contains(&mode) {
                return Err(invalid!("mode {mode} listed twice in partial trace"));
            }
        }
        let rows: Vec<usize> = keep.iter().flat_map(|&k| [2 * k, 2 * k + 1]).collect();
        let mean = DVector::from_iterator(rows.len(), rows.iter().map(|&r| self.mean[r]));
        let cov = DMatrix::from_fn(rows.len(), rows.len(), |i, j| self.cov[(rows[i], rows[j])]);
        Ok(Self::from_parts(mean, cov))
    }

    /// Covariance of the remaining modes after heterodyning `measured_mode`:
    /// `A - C (B + 1)^{-1} C^T`.
    ///
    /// Only the covariance is outcome independent; the returned mean is the
    /// unconditioned mean of the kept modes.
    pub fn heterodyne_condition(&self, measured_mode: usize) -> Result<Self> {
        if self.num_modes() < 2 {
            return Err(invalid!("heterodyne conditioning needs at least two modes"));
        }
        self.check_mode(measured_mode)?;
        let keep: Vec<usize> = (0..self.num_modes())
            .filter(|&k| k != measured_mode)
            .collect();
        let rows: Vec<usize> = keep.iter().flat_map(|&k| [2 * k, 2 * k + 1]).collect();
        let b0 = 2 * measured_mode;

        let a = DMatrix::from_fn(rows.len(), rows.len(), |i, j| self.cov[(rows[i], rows[j])]);
        let c = DMatrix::from_fn(rows.len(), 2, |i, j| self.cov[(rows[i], b0 + j)]);
        let b = self.cov.fixed_view::<2, 2>(b0, b0).into_owned() + Matrix2::identity();
        let b_inv = b
            .try_inverse()
            .ok_or_else(|| Error::Internal("heterodyne conditioning matrix is singular".into()))?;
        let b_inv = DMatrix::from_column_slice(2, 2, b_inv.as_slice());

        let mut cov = &a - &c * b_inv * c.transpose();
        // Restore exact symmetry lost to rounding.
        cov = (&cov + cov.transpose()) * 0.5;
        let mean = DVector::from_iterator(rows.len(), rows.iter().map(|&r| self.mean[r]));
        Ok(Self::from_parts(mean, cov))
    }

    /// Symplectic eigenvalues in descending order.
    pub fn symplectic_eigenvalues(&self) -> Result<Vec<f64>> {
        symplectic_eigenvalues(&self.cov)
    }

    /// Von Neumann entropy in bits, `sum_k g(nu_k)`.
    pub fn entropy(&self) -> Result<f64> {
        self.symplectic_eigenvalues()?
            .into_iter()
            .try_fold(0.0, |acc, nu| Ok(acc + entropy_g(nu)?))
    }

    /// True when every symplectic eigenvalue is at least `1 - 1e-9`.
    pub fn is_physical(&self) -> bool {
        self.min_symplectic_eigenvalue()
            .map(|v| v >= 1.0 - PHYSICALITY_TOLERANCE)
            .unwrap_or(false)
    }

    fn min_symplectic_eigenvalue(&self) -> Result<f64> {
        Ok(symplectic_eigenvalues(&self.cov)?
            .last()
            .copied()
            .unwrap_or(f64::NAN))
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.num_modes() {
            return Err(invalid!(
                "mode {mode} out of range for a {}-mode state",
                self.num_modes()
            ));
        }
        Ok(())
    }
}
