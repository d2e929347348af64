use alloc::vec::Vec;

use nalgebra::DMatrix;
// Unused whenever std is linked into the build, e.g. by test harnesses.
#[allow(unused_imports)]
use num_traits::Float;

use super::{check_symmetric, symplectic_form, PHYSICALITY_TOLERANCE};
use crate::error::{invalid, Result};

/// Below this the `g` function returns exactly 0.
const G_PURE_CUTOFF: f64 = 1e-12;

/// Symplectic eigenvalues of a covariance matrix, descending.
///
/// The spectrum of `Ω V` is `{±i ν_k}`; the moduli of the imaginary parts
/// come in equal pairs and one of each pair is kept.
pub fn symplectic_eigenvalues(cov: &DMatrix<f64>) -> Result<Vec<f64>> {
    check_symmetric(cov)?;
    let n = cov.nrows() / 2;
    let omega_v = symplectic_form(n) * cov;
    let eig = omega_v.complex_eigenvalues();
    let mut moduli: Vec<f64> = eig.iter().map(|z| z.im.abs()).collect();
    moduli.sort_by(|a, b| b.total_cmp(a));
    Ok(moduli.into_iter().step_by(2).collect())
}

/// Entropy in bits of a single-mode thermal state with symplectic
/// eigenvalue `x`:
///
/// ```text
/// g(x) = (x+1)/2 log2((x+1)/2) - (x-1)/2 log2((x-1)/2)
/// ```
///
/// Values in `[1 - 1e-9, 1 + 1e-12]` are treated as a pure mode.
pub fn entropy_g(x: f64) -> Result<f64> {
    if !(x >= 1.0 - PHYSICALITY_TOLERANCE) {
        return Err(invalid!("g(x) needs x >= 1, got {x}"));
    }
    if x <= 1.0 + G_PURE_CUTOFF {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let plus = 0.5 * (x + 1.0);
    let minus = 0.5 * (x - 1.0);
    Ok(plus * plus.log2() - minus * minus.log2())
}
