//! Reduction of the Trojan-horse attack to a side-channel-free attack.
//!
//! Eve injects one arm of a TMSV state (mean photon number `nbar`) into the
//! sender's modulator, which displaces it by `m·α` while the signal is
//! displaced by `α`. A beamsplitter followed by two two-mode squeezers maps
//! this three-mode state onto a signal displaced by `k1·α`, a pure Trojan mode
//! displaced by `k2·Zα` and a vacuum. Only `k^2 = k1^2 + k2^2` reaches the key
//! rate, and the attack becomes an ordinary thermal-loss attack on
//! [`EffectiveParams`].

pub mod closed_form;

use nalgebra::{DMatrix, DVector, Matrix2};
// Unused whenever std is linked into the build, e.g. by test harnesses.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Result};
use crate::gaussian::{max_abs_diff, pauli_z, set_block, GaussianState, SymplecticTransform};

pub use closed_form::StageMoments;

/// Tolerance for [`verify_reduction`]. The closed forms are exact, so only
/// rounding separates them from the propagated moments.
pub const REDUCTION_TOLERANCE: f64 = 1e-10;

/// Mean injected photon number and modulation gain of the Trojan mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SideChannelParams {
    nbar: f64,
    m: f64,
}

impl SideChannelParams {
    /// No side channel at all (`m = 0`).
    pub const NONE: Self = Self { nbar: 0.0, m: 0.0 };

    pub fn new(nbar: f64, m: f64) -> Result<Self> {
        if !(nbar >= 0.0) || !nbar.is_finite() {
            return Err(invalid!("nbar must be finite and >= 0, got {nbar}"));
        }
        if !(m >= 0.0) || !m.is_finite() {
            return Err(invalid!("m must be finite and >= 0, got {m}"));
        }
        Ok(Self { nbar, m })
    }

    /// Side channel modulated exactly like the signal (`m = 1`).
    pub fn unit_gain(nbar: f64) -> Result<Self> {
        Self::new(nbar, 1.0)
    }

    pub fn nbar(&self) -> f64 {
        self.nbar
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    /// TMSV squeezing `r` with `nbar = sinh^2 r`.
    pub fn squeezing(&self) -> f64 {
        self.nbar.sqrt().asinh()
    }
}

/// `k(nbar, m) = sqrt(m^2 (2 nbar + 1) + 1)`.
pub fn k_factor(sc: &SideChannelParams) -> f64 {
    // Grouped so that m = 1 rounds exactly like 2 (nbar + 1).
    let m2 = sc.m * sc.m;
    (2.0 * m2 * sc.nbar + (m2 + 1.0)).sqrt()
}

/// Gains `(k1, k2)` of the signal and the reduced Trojan mode after the
/// circuit: `k1 = sqrt((m^2 cosh 2r + m^2 + 2) / 2)`, `k2 = -m sinh r`.
pub fn k_components(sc: &SideChannelParams) -> (f64, f64) {
    let r = sc.squeezing();
    let m2 = sc.m * sc.m;
    let k1 = (0.5 * (m2 * (2.0 * r).cosh() + m2 + 2.0)).sqrt();
    (k1, -sc.m * r.sinh())
}

/// Parameters of the equivalent attack without a side channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveParams {
    pub k: f64,
    pub mu_eff: f64,
    pub eta_eff: f64,
    pub eps_eff: f64,
}

impl EffectiveParams {
    /// Rescales measured `(mu, eta, eps)` by `k^2`.
    pub fn from_k(k: f64, mu: f64, eta: f64, eps: f64) -> Self {
        let k2 = k * k;
        Self {
            k,
            mu_eff: k2 * mu,
            eta_eff: eta / k2,
            eps_eff: k2 * eps,
        }
    }

    /// Same as [`from_k`](Self::from_k) with `k = sqrt(k1^2 + k2^2)`.
    pub fn from_components(k1: f64, k2: f64, mu: f64, eta: f64, eps: f64) -> Self {
        Self::from_k((k1 * k1 + k2 * k2).sqrt(), mu, eta, eps)
    }

    /// Parameters with no side channel (`k = 1`).
    pub fn direct(mu: f64, eta: f64, eps: f64) -> Self {
        Self::from_k(1.0, mu, eta, eps)
    }
}

/// `mu' = k^2 mu`, `eta' = eta / k^2`, `eps' = k^2 eps`.
pub fn effective_params(
    mu: f64,
    eta: f64,
    eps: f64,
    sc: &SideChannelParams,
) -> Result<EffectiveParams> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(invalid!("transmittance must lie in (0, 1], got {eta}"));
    }
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(invalid!("excess noise must be finite and >= 0, got {eps}"));
    }
    if !(mu >= 0.0) || !mu.is_finite() {
        return Err(invalid!(
            "modulation variance must be finite and >= 0, got {mu}"
        ));
    }
    Ok(EffectiveParams::from_k(k_factor(sc), mu, eta, eps))
}

fn check_mu(mu: f64) -> Result<()> {
    if !(mu >= 0.0) || !mu.is_finite() {
        return Err(invalid!(
            "modulation variance must be finite and >= 0, got {mu}"
        ));
    }
    Ok(())
}

fn tmsv_blocks(cov: &mut DMatrix<f64>, r: f64) {
    let (c, s) = ((2.0 * r).cosh(), (2.0 * r).sinh());
    set_block(cov, 1, 1, &(Matrix2::identity() * c));
    set_block(cov, 2, 2, &(Matrix2::identity() * c));
    set_block(cov, 1, 2, &(pauli_z() * s));
    set_block(cov, 2, 1, &(pauli_z() * s));
}

/// Modulation-averaged state of signal, Trojan mode and idler:
///
/// ```text
/// X0 = 0,  V0 = [[(mu+1) 1,   m mu 1,            0        ],
///                [m mu 1,     (m^2 mu + cosh 2r) 1, sinh 2r Z],
///                [0,          sinh 2r Z,          cosh 2r 1]]
/// ```
pub fn build_initial_state(mu: f64, sc: &SideChannelParams) -> Result<GaussianState> {
    check_mu(mu)?;
    let mut cov = DMatrix::identity(6, 6);
    tmsv_blocks(&mut cov, sc.squeezing());
    let one = Matrix2::identity();
    let m = sc.m;
    set_block(&mut cov, 0, 0, &(one * (mu + 1.0)));
    set_block(&mut cov, 0, 1, &(one * (m * mu)));
    set_block(&mut cov, 1, 0, &(one * (m * mu)));
    let centre = cov.fixed_view::<2, 2>(2, 2).into_owned() + one * (m * m * mu);
    set_block(&mut cov, 1, 1, &centre);
    Ok(GaussianState::from_parts(DVector::zeros(6), cov))
}

/// State for a fixed modulation `alpha`: `|alpha> ⊗ TMSV(r)` with the
/// Trojan arm displaced by `m·alpha`.
pub fn build_conditional_state(alpha: [f64; 2], sc: &SideChannelParams) -> GaussianState {
    let mut cov = DMatrix::identity(6, 6);
    tmsv_blocks(&mut cov, sc.squeezing());
    let mean = DVector::from_column_slice(&[
        alpha[0],
        alpha[1],
        sc.m * alpha[0],
        sc.m * alpha[1],
        0.0,
        0.0,
    ]);
    GaussianState::from_parts(mean, cov)
}

/// The three optical components, with their parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionCircuit {
    /// Beamsplitter angle on modes (0, 1): `arccos(1 / sqrt(m^2 + 1))`.
    pub theta1: f64,
    /// Squeezing on modes (1, 2) that purifies the Trojan mode.
    pub r2: f64,
    /// Squeezing on modes (0, 2) that leaves two displaced vacua.
    pub r3: f64,
    stages: [SymplecticTransform; 3],
}

impl ReductionCircuit {
    pub fn stages(&self) -> &[SymplecticTransform; 3] {
        &self.stages
    }

    /// The whole circuit as one transform, `S3 S2 S1`.
    pub fn composed(&self) -> SymplecticTransform {
        &(&self.stages[2] * &self.stages[1]) * &self.stages[0]
    }
}

pub fn reduction_circuit(sc: &SideChannelParams) -> ReductionCircuit {
    let r = sc.squeezing();
    let m = sc.m;
    let m2 = m * m;
    let theta1 = (1.0 / (m2 + 1.0).sqrt()).acos();
    let r2 =
        -(core::f64::consts::SQRT_2 * r.sinh() / (m2 * (2.0 * r).cosh() + m2 + 2.0).sqrt()).asinh();
    let r3 = -(m * r.sinh() / (m2 + 1.0).sqrt()).asinh();
    // Mode pairs are fixed and distinct, so construction cannot fail.
    let stages = [
        SymplecticTransform::beamsplitter(theta1, (0, 1), 3).expect("valid mode pair"),
        SymplecticTransform::two_mode_squeezer(r2, (1, 2), 3).expect("valid mode pair"),
        SymplecticTransform::two_mode_squeezer(r3, (0, 2), 3).expect("valid mode pair"),
    ];
    ReductionCircuit {
        theta1,
        r2,
        r3,
        stages,
    }
}

/// Largest absolute deviation of propagated moments at one stage.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StageDeviation {
    pub mean_conditional: f64,
    pub cov_conditional: f64,
    pub cov_averaged: f64,
}

impl StageDeviation {
    pub fn max(&self) -> f64 {
        self.mean_conditional
            .max(self.cov_conditional)
            .max(self.cov_averaged)
    }

    fn merge(self, other: Self) -> Self {
        Self {
            mean_conditional: self.mean_conditional.max(other.mean_conditional),
            cov_conditional: self.cov_conditional.max(other.cov_conditional),
            cov_averaged: self.cov_averaged.max(other.cov_averaged),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionReport {
    pub mu: f64,
    pub side_channel: SideChannelParams,
    pub alpha: [f64; 2],
    pub theta1: f64,
    pub r2: f64,
    pub r3: f64,
    pub stages: [StageDeviation; 3],
    /// At `m = 1` only: deviation of each stage matrix from its `m = 1`
    /// closed form.
    pub transform_deviation: Option<[f64; 3]>,
    pub tolerance: f64,
    pub passed: bool,
}

impl ReductionReport {
    pub fn max_deviation(&self) -> f64 {
        let stage_max = self
            .stages
            .iter()
            .map(StageDeviation::max)
            .fold(0.0, f64::max);
        self.transform_deviation
            .map(|t| t.iter().copied().fold(stage_max, f64::max))
            .unwrap_or(stage_max)
    }

    pub fn passes(&self, tolerance: f64) -> bool {
        self.max_deviation() < tolerance
    }
}

fn deviation(numeric: (&GaussianState, &GaussianState), expected: &StageMoments) -> StageDeviation {
    let (cond, avg) = numeric;
    let mean_dev = cond
        .mean()
        .iter()
        .zip(expected.mean_conditional.iter())
        .fold(0.0, |acc: f64, (a, b)| acc.max((a - b).abs()));
    StageDeviation {
        mean_conditional: mean_dev,
        cov_conditional: max_abs_diff(cond.cov(), &expected.cov_conditional),
        cov_averaged: max_abs_diff(avg.cov(), &expected.cov_averaged),
    }
}

/// Pushes the conditional and averaged states through the circuit and
/// compares every stage against the closed forms (both the general-`m` ones
/// and, at `m = 1`, the `m = 1` ones together with the stage matrices).
pub fn verify_reduction(
    mu: f64,
    sc: &SideChannelParams,
    alpha: [f64; 2],
) -> Result<ReductionReport> {
    check_mu(mu)?;
    if alpha.iter().any(|a| !a.is_finite()) {
        return Err(invalid!("alpha must be finite"));
    }
    let circuit = reduction_circuit(sc);
    let general = closed_form::general_stages(mu, sc, alpha);
    let unit_gain = (sc.m == 1.0).then(|| closed_form::unit_gain_stages(mu, sc.nbar, alpha));

    let mut cond = build_conditional_state(alpha, sc);
    let mut avg = build_initial_state(mu, sc)?;
    let mut stages = [StageDeviation::default(); 3];
    for (idx, t) in circuit.stages.iter().enumerate() {
        cond = t.apply(&cond)?;
        avg = t.apply(&avg)?;
        let mut dev = deviation((&cond, &avg), &general[idx]);
        if let Some(unit) = &unit_gain {
            dev = dev.merge(deviation((&cond, &avg), &unit[idx]));
        }
        stages[idx] = dev;
    }

    let transform_deviation = unit_gain.as_ref().map(|_| {
        let displayed = closed_form::unit_gain_transforms(sc.nbar);
        [0, 1, 2].map(|i| max_abs_diff(circuit.stages[i].matrix(), &displayed[i]))
    });

    let mut report = ReductionReport {
        mu,
        side_channel: *sc,
        alpha,
        theta1: circuit.theta1,
        r2: circuit.r2,
        r3: circuit.r3,
        stages,
        transform_deviation,
        tolerance: REDUCTION_TOLERANCE,
        passed: false,
    };
    report.passed = report.passes(REDUCTION_TOLERANCE);
    Ok(report)
}

/// Symplectic eigenvalues of the `m = 1` initial state:
/// `(1, mu + q, -mu + q)` with `q = sqrt(1 + mu + mu^2 + mu cosh 2r)`.
pub fn closed_form_psi0_eigenvalues(mu: f64, nbar: f64) -> Result<[f64; 3]> {
    check_mu(mu)?;
    if !(nbar >= 0.0) || !nbar.is_finite() {
        return Err(invalid!("nbar must be finite and >= 0, got {nbar}"));
    }
    let ch2 = 2.0 * nbar + 1.0;
    let q = (1.0 + mu + mu * mu + mu * ch2).sqrt();
    Ok([1.0, mu + q, q - mu])
}
