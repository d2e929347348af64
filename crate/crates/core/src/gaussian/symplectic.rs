use core::ops::Mul;

use nalgebra::{DMatrix, Matrix2};
// Unused whenever std is linked into the build, e.g. by test harnesses.
#[allow(unused_imports)]
use num_traits::Float;

use super::{max_abs_diff, pauli_z, set_block, symplectic_form, GaussianState};
use crate::error::{invalid, Result};

/// Tolerance on `max |M Ω M^T - Ω|`, scaled by `max(1, max|M|^2)`.
pub const SYMPLECTIC_TOLERANCE: f64 = 1e-10;

/// A real `2N x 2N` matrix preserving the symplectic form.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticTransform {
    matrix: DMatrix<f64>,
}

impl SymplecticTransform {
    /// Wraps `matrix` after checking `M Ω M^T = Ω`.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() || !matrix.nrows().is_multiple_of(2) || matrix.nrows() == 0 {
            return Err(invalid!(
                "symplectic matrix must be square with positive even dimension, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            ));
        }
        let t = Self { matrix };
        let defect = t.symplectic_defect();
        let scale = t.matrix.amax().powi(2).max(1.0);
        if !(defect <= SYMPLECTIC_TOLERANCE * scale) {
            return Err(invalid!("matrix is not symplectic (defect {defect:e})"));
        }
        Ok(t)
    }

    pub fn identity(num_modes: usize) -> Self {
        Self {
            matrix: DMatrix::identity(2 * num_modes, 2 * num_modes),
        }
    }

    /// Beamsplitter with angle `theta` on `modes = (i, j)`:
    /// `[[cos θ 1, sin θ 1], [-sin θ 1, cos θ 1]]`, identity elsewhere.
    /// `theta = π/4` is the balanced splitter.
    pub fn beamsplitter(theta: f64, modes: (usize, usize), total_modes: usize) -> Result<Self> {
        check_pair(modes, total_modes)?;
        let (c, s) = (theta.cos(), theta.sin());
        let one = Matrix2::identity();
        Ok(Self::two_mode_block(
            modes,
            total_modes,
            [one * c, one * s, one * -s, one * c],
        ))
    }

    /// Two-mode squeezer with parameter `r` on `modes = (i, j)`: diagonal
    /// blocks `cosh r 1`, off-diagonal blocks `sinh r Z`. Applied to two
    /// vacua it produces [`GaussianState::tmsv`]`(r)`.
    pub fn two_mode_squeezer(r: f64, modes: (usize, usize), total_modes: usize) -> Result<Self> {
        check_pair(modes, total_modes)?;
        let (c, s) = (r.cosh(), r.sinh());
        let one = Matrix2::identity();
        let z = pauli_z();
        Ok(Self::two_mode_block(
            modes,
            total_modes,
            [one * c, z * s, z * s, one * c],
        ))
    }

    fn two_mode_block(
        (i, j): (usize, usize),
        total_modes: usize,
        [ii, ij, ji, jj]: [Matrix2<f64>; 4],
    ) -> Self {
        let mut matrix = DMatrix::identity(2 * total_modes, 2 * total_modes);
        set_block(&mut matrix, i, i, &ii);
        set_block(&mut matrix, i, j, &ij);
        set_block(&mut matrix, j, i, &ji);
        set_block(&mut matrix, j, j, &jj);
        Self { matrix }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn num_modes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    /// `max |M Ω M^T - Ω|`.
    pub fn symplectic_defect(&self) -> f64 {
        let omega = symplectic_form(self.num_modes());
        max_abs_diff(&(&self.matrix * &omega * self.matrix.transpose()), &omega)
    }

    /// `self` followed by `next`, i.e. the matrix `next · self`.
    pub fn then(&self, next: &Self) -> Result<Self> {
        if next.num_modes() != self.num_modes() {
            return Err(invalid!(
                "cannot compose {}-mode and {}-mode transforms",
                self.num_modes(),
                next.num_modes()
            ));
        }
        Ok(Self {
            matrix: &next.matrix * &self.matrix,
        })
    }

    /// Inverse via `M^{-1} = -Ω M^T Ω`.
    pub fn inverse(&self) -> Self {
        let omega = symplectic_form(self.num_modes());
        Self {
            matrix: -(&omega * self.matrix.transpose() * &omega),
        }
    }

    pub fn apply(&self, state: &GaussianState) -> Result<GaussianState> {
        if state.num_modes() != self.num_modes() {
            return Err(invalid!(
                "{}-mode transform applied to a {}-mode state",
                self.num_modes(),
                state.num_modes()
            ));
        }
        let mean = &self.matrix * state.mean();
        let mut cov = &self.matrix * state.cov() * self.matrix.transpose();
        cov = (&cov + cov.transpose()) * 0.5;
        Ok(GaussianState::from_parts(mean, cov))
    }
}

impl Mul for &SymplecticTransform {
    type Output = SymplecticTransform;

    /// Matrix product; panics on dimension mismatch like the underlying
    /// matrices do. Use [`SymplecticTransform::then`] for a checked version.
    fn mul(self, rhs: Self) -> SymplecticTransform {
        SymplecticTransform {
            matrix: &self.matrix * &rhs.matrix,
        }
    }
}

fn check_pair((i, j): (usize, usize), total_modes: usize) -> Result<()> {
    if i == j {
        return Err(invalid!(
            "two-mode operation needs distinct modes, got ({i}, {j})"
        ));
    }
    if i >= total_modes || j >= total_modes {
        return Err(invalid!(
            "modes ({i}, {j}) out of range for {total_modes} modes"
        ));
    }
    Ok(())
}
