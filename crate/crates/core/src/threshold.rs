//! Maximal tolerable excess noise: the root in `eps` of the asymptotic key
//! rate at fixed transmittance and side channel.

use alloc::vec::Vec;

// Unused whenever std is linked into the build, e.g. by test harnesses.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::keyrate::asymptotic_rate;
use crate::reduction::{effective_params, SideChannelParams};

/// Default bisection tolerance in excess noise.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

const MAX_DOUBLINGS: u32 = 60;
const MAX_BISECTIONS: u32 = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdPoint {
    pub eta: f64,
    /// Channel loss in dB, `-10 log10(eta)`.
    pub eta_db: f64,
    /// Zero when the point is flagged.
    pub eps_max: f64,
    pub side_channel: SideChannelParams,
    /// Why no threshold could be computed at this point, if any.
    pub flag: Option<Error>,
}

/// Transmittance to loss in dB.
pub fn eta_to_db(eta: f64) -> f64 {
    -10.0 * eta.log10()
}

/// Loss in dB to transmittance.
pub fn db_to_eta(db: f64) -> f64 {
    10f64.powf(-db / 10.0)
}

fn rate(eta: f64, eps: f64, sc: &SideChannelParams) -> Result<f64> {
    asymptotic_rate(&effective_params(1.0, eta, eps, sc)?)
}

/// Largest excess noise with a non-negative asymptotic key rate.
///
/// Brackets the root by doubling from `eps = 1`, then bisects until the
/// bracket is narrower than `tol`. Returns 0 when the rate is already
/// non-positive at `eps = 0`.
pub fn epsilon_max(eta: f64, sc: &SideChannelParams, tol: f64) -> Result<f64> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(invalid!("transmittance must lie in (0, 1), got {eta}"));
    }
    if !(tol > 0.0) {
        return Err(invalid!("tolerance must be positive, got {tol}"));
    }
    if rate(eta, 0.0, sc)? <= 0.0 {
        return Ok(0.0);
    }

    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut doublings = 0;
    while rate(eta, hi, sc)? > 0.0 {
        if doublings == MAX_DOUBLINGS {
            return Err(Error::NoThreshold { eta });
        }
        lo = hi;
        hi *= 2.0;
        doublings += 1;
    }

    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if rate(eta, mid, sc)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// [`epsilon_max`] over a grid of transmittances, in grid order. Points that
/// fail are returned with `eps_max = 0` and the error in `flag`.
pub fn threshold_curve(eta_grid: &[f64], sc: &SideChannelParams, tol: f64) -> Vec<ThresholdPoint> {
    eta_grid
        .iter()
        .map(|&eta| {
            let (eps_max, flag) = match epsilon_max(eta, sc, tol) {
                Ok(e) => (e, None),
                Err(err) => (0.0, Some(err)),
            };
            ThresholdPoint {
                eta,
                eta_db: eta_to_db(eta),
                eps_max,
                side_channel: *sc,
                flag,
            }
        })
        .collect()
}
