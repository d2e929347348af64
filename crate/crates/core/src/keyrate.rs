//! Reverse-reconciliation key rate of the heterodyne coherent-state protocol
//! over a thermal-loss channel, evaluated on effective parameters.
//!
//! The asymptotic (`mu -> ∞`) rate has the closed form
//!
//! ```text
//! K = log2(2 eta' / (e (1 - eta') (eta' eps' + 2))) - g(v1) + g(v3)
//! v1 = 1 + eps' eta' / (1 - eta'),   v3 = 2 / eta' + eps' - 1
//! ```
//!
//! The finite-`mu` path builds the covariance of Alice's and Bob's modes and
//! takes entropies numerically; it serves as an oracle for the closed form.

use core::f64::consts::{E, LN_2, LOG2_E};

use nalgebra::{DMatrix, DVector, Matrix2};
// Unused whenever std is linked into the build, e.g. by test harnesses.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::gaussian::{entropy_g, pauli_z, set_block, GaussianState};
use crate::reduction::{effective_params, EffectiveParams, SideChannelParams};

/// Transmittance and excess noise (shot-noise units, referred to the
/// channel input) of the measured thermal-loss channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    eta: f64,
    eps: f64,
}

impl ChannelParams {
    pub fn new(eta: f64, eps: f64) -> Result<Self> {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(invalid!("transmittance must lie in (0, 1], got {eta}"));
        }
        if !(eps >= 0.0) || !eps.is_finite() {
            return Err(invalid!("excess noise must be finite and >= 0, got {eps}"));
        }
        Ok(Self { eta, eps })
    }

    /// Pure-loss channel.
    pub fn lossy(eta: f64) -> Result<Self> {
        Self::new(eta, 0.0)
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }
}

/// Which limit of the modulation variance to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Leading behaviour as `mu -> ∞`.
    Asymptotic,
    /// Exact expressions at the given `mu`.
    Finite,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyRateBreakdown {
    /// Alice–Bob mutual information, bits.
    pub i_ab: f64,
    /// Holevo bound on Eve's information about Bob's outcome, bits.
    pub holevo_eb: f64,
    /// Secret key rate, bits per channel use. Not clamped at zero.
    pub rate: f64,
    pub effective: EffectiveParams,
}

/// Symplectic eigenvalues in the `mu -> ∞` limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticEigenvalues {
    /// `1 + eps' eta' / (1 - eta')`, bounded as `mu` grows.
    pub ab_bounded: f64,
    /// `mu' (1 - eta')`, grows with `mu`.
    pub ab_growing: f64,
    /// `2 / eta' + eps' - 1`, Alice's mode conditioned on Bob's outcome.
    pub a_given_b: f64,
}

fn check_effective(eff: &EffectiveParams) -> Result<()> {
    if !(eff.mu_eff > 0.0) || !eff.mu_eff.is_finite() {
        return Err(invalid!(
            "effective modulation must be finite and > 0, got {}",
            eff.mu_eff
        ));
    }
    if !(eff.eta_eff > 0.0 && eff.eta_eff <= 1.0) {
        return Err(invalid!(
            "effective transmittance must lie in (0, 1], got {}",
            eff.eta_eff
        ));
    }
    if !(eff.eps_eff >= 0.0) || !eff.eps_eff.is_finite() {
        return Err(invalid!(
            "effective excess noise must be finite and >= 0, got {}",
            eff.eps_eff
        ));
    }
    Ok(())
}

fn check_lossy(eff: &EffectiveParams) -> Result<()> {
    if !(eff.eta_eff > 0.0) {
        return Err(invalid!(
            "effective transmittance must be positive, got {}",
            eff.eta_eff
        ));
    }
    if eff.eta_eff >= 1.0 {
        return Err(Error::SingularChannel {
            eta_eff: eff.eta_eff,
        });
    }
    if !(eff.eps_eff >= 0.0) || !eff.eps_eff.is_finite() {
        return Err(invalid!(
            "effective excess noise must be finite and >= 0, got {}",
            eff.eps_eff
        ));
    }
    Ok(())
}

/// Covariance of Alice's TMSV arm and Bob's received mode:
///
/// ```text
/// [[(mu'+1) 1,                  sqrt(eta' mu' (mu'+2)) Z],
///  [sqrt(eta' mu' (mu'+2)) Z,   (eta' (mu'+eps') + 1) 1 ]]
/// ```
pub fn vab_covariance(eff: &EffectiveParams) -> Result<GaussianState> {
    check_effective(eff)?;
    let &EffectiveParams {
        mu_eff: mu,
        eta_eff: eta,
        eps_eff: eps,
        ..
    } = eff;
    let one = Matrix2::identity();
    let c = (eta * mu * (mu + 2.0)).sqrt();
    let mut cov = DMatrix::zeros(4, 4);
    set_block(&mut cov, 0, 0, &(one * (mu + 1.0)));
    set_block(&mut cov, 1, 1, &(one * (eta * (mu + eps) + 1.0)));
    set_block(&mut cov, 0, 1, &(pauli_z() * c));
    set_block(&mut cov, 1, 0, &(pauli_z() * c));
    Ok(GaussianState::from_parts(DVector::zeros(4), cov))
}

pub fn asymptotic_eigenvalues(eff: &EffectiveParams) -> Result<AsymptoticEigenvalues> {
    check_lossy(eff)?;
    let &EffectiveParams {
        mu_eff: mu,
        eta_eff: eta,
        eps_eff: eps,
        ..
    } = eff;
    Ok(AsymptoticEigenvalues {
        ab_bounded: 1.0 + eps * eta / (1.0 - eta),
        ab_growing: mu * (1.0 - eta),
        a_given_b: 2.0 / eta + eps - 1.0,
    })
}

/// Mutual information between Alice's modulation and Bob's heterodyne
/// outcome, both quadratures together.
///
/// Finite: `log2((eta' mu' + eta' eps' + 2) / (eta' eps' + 2))`.
/// Asymptotic: `log2(eta' mu' / (eta' eps' + 2))`.
pub fn mutual_info_ab(eff: &EffectiveParams, regime: Regime) -> Result<f64> {
    check_effective(eff)?;
    let noise = eff.eta_eff * eff.eps_eff + 2.0;
    let snr = eff.eta_eff * eff.mu_eff / noise;
    Ok(match regime {
        Regime::Finite => snr.ln_1p() * LOG2_E,
        Regime::Asymptotic => snr.log2(),
    })
}

/// Holevo bound between Eve and Bob's outcome.
///
/// Eve purifies Alice and Bob, so her entropy equals `S(ρ_AB)` and, after
/// Bob's measurement, `S(ρ_A|β)`. The finite path evaluates those two
/// entropies numerically; the asymptotic one is
/// `log2(e v_growing / 2) + g(v_bounded) - g(v_a|b)`.
pub fn holevo_eb(eff: &EffectiveParams, regime: Regime) -> Result<f64> {
    match regime {
        Regime::Finite => {
            let vab = vab_covariance(eff)?;
            let conditioned = vab.heterodyne_condition(1)?;
            Ok(vab.entropy()? - conditioned.entropy()?)
        }
        Regime::Asymptotic => {
            check_effective(eff)?;
            let v = asymptotic_eigenvalues(eff)?;
            Ok((E * v.ab_growing / 2.0).log2() + constant_entropy(&v)?)
        }
    }
}

/// `g(v_bounded) - g(v_a|b)`: the part of Eve's information that does not
/// scale with `mu`.
fn constant_entropy(v: &AsymptoticEigenvalues) -> Result<f64> {
    Ok(entropy_g(v.ab_bounded)? - entropy_g(v.a_given_b)?)
}

/// Asymptotic rate straight from effective parameters; `mu_eff` is ignored.
pub fn asymptotic_rate(eff: &EffectiveParams) -> Result<f64> {
    check_lossy(eff)?;
    let v = asymptotic_eigenvalues(eff)?;
    let (eta, eps) = (eff.eta_eff, eff.eps_eff);
    let leading = (2.0 * eta / (E * (1.0 - eta) * (eta * eps + 2.0))).log2();
    Ok(leading - constant_entropy(&v)?)
}

/// Asymptotic key rate with the side channel folded into effective
/// parameters. The rate itself does not depend on `mu` (which must still be
/// positive); `i_ab` and `holevo_eb` are the leading terms at that `mu`.
pub fn key_rate_asymptotic(
    ch: &ChannelParams,
    mu: f64,
    sc: &SideChannelParams,
) -> Result<KeyRateBreakdown> {
    if !(mu > 0.0) {
        return Err(invalid!("modulation variance must be > 0, got {mu}"));
    }
    let eff = effective_params(mu, ch.eta, ch.eps, sc)?;
    let rate = asymptotic_rate(&eff)?;
    Ok(KeyRateBreakdown {
        i_ab: mutual_info_ab(&eff, Regime::Asymptotic)?,
        holevo_eb: holevo_eb(&eff, Regime::Asymptotic)?,
        rate,
        effective: eff,
    })
}

/// Key rate at finite modulation, from the numerically evaluated entropies.
pub fn key_rate_finite(
    ch: &ChannelParams,
    mu: f64,
    sc: &SideChannelParams,
) -> Result<KeyRateBreakdown> {
    if !(mu > 0.0) {
        return Err(invalid!("modulation variance must be > 0, got {mu}"));
    }
    let eff = effective_params(mu, ch.eta, ch.eps, sc)?;
    let i_ab = mutual_info_ab(&eff, Regime::Finite)?;
    let holevo = holevo_eb(&eff, Regime::Finite)?;
    Ok(KeyRateBreakdown {
        i_ab,
        holevo_eb: holevo,
        rate: i_ab - holevo,
        effective: eff,
    })
}

/// Asymptotic rate over a pure-loss channel,
/// `-log2(1 - eta') / eta' - log2 e`.
pub fn key_rate_lossy(eta: f64, sc: &SideChannelParams) -> Result<f64> {
    let eff = effective_params(1.0, eta, 0.0, sc)?;
    check_lossy(&eff)?;
    let eta = eff.eta_eff;
    Ok(-(-eta).ln_1p() / (eta * LN_2) - LOG2_E)
}

/// Small-`eta` slope of [`key_rate_lossy`] for `m = 1`:
/// `eta / (4 (nbar + 1) ln 2)`.
pub fn key_rate_longdistance(eta: f64, sc: &SideChannelParams) -> Result<f64> {
    if sc.m() != 1.0 {
        return Err(invalid!(
            "long-distance form is only defined for m = 1, got m = {}",
            sc.m()
        ));
    }
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(invalid!("transmittance must lie in (0, 1], got {eta}"));
    }
    Ok(eta / (4.0 * (sc.nbar() + 1.0) * LN_2))
}

/// Repeaterless secret-key capacity of the pure-loss channel, `-log2(1 - eta)`.
pub fn plob_bound(eta: f64) -> Result<f64> {
    if eta >= 1.0 {
        return Err(Error::InfiniteCapacity { eta });
    }
    if !(eta > 0.0) {
        return Err(invalid!("transmittance must lie in (0, 1), got {eta}"));
    }
    Ok(-(-eta).ln_1p() * LOG2_E)
}
