//! Security analysis of the coherent-state CV-QKD protocol with heterodyne
//! detection when an eavesdropper injects a modulated Trojan-horse mode into
//! the sender's device.
//!
//! The attack with mean injected photon number `nbar` and side-channel
//! modulation gain `m` is equivalent to a side-channel-free attack with
//! rescaled parameters
//!
//! ```text
//! k  = sqrt(m^2 (2 nbar + 1) + 1)
//! mu' = k^2 mu,   eta' = eta / k^2,   eps' = k^2 eps
//! ```
//!
//! [`reduction`] builds and checks the symplectic circuit behind that
//! equivalence, [`keyrate`] turns effective parameters into reverse
//! reconciliation key rates, [`threshold`] finds the tolerable excess noise
//! and [`sim`] provides a seeded prepare-and-measure simulator used as a
//! statistical oracle.
//!
//! All quantities are in shot-noise units (vacuum variance 1) with quadrature
//! ordering `(x1, p1, x2, p2, ...)`; entropies and rates are in bits.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
// `!(x > 0.0)` style checks are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;
pub mod gaussian;
pub mod keyrate;
pub mod reduction;
pub mod sim;
pub mod threshold;

pub use error::{Error, Result};
pub use gaussian::{entropy_g, symplectic_eigenvalues, GaussianState, SymplecticTransform};
pub use keyrate::{
    key_rate_asymptotic, key_rate_finite, key_rate_longdistance, key_rate_lossy, plob_bound,
    ChannelParams, KeyRateBreakdown, Regime,
};
pub use reduction::{effective_params, k_factor, EffectiveParams, SideChannelParams};
pub use threshold::{epsilon_max, threshold_curve, ThresholdPoint, DEFAULT_TOLERANCE};
