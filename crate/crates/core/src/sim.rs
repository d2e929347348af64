//! Seeded Monte Carlo prepare-and-measure sessions and the parameter
//! estimates Alice and Bob would draw from them.
//!
//! Outcomes follow the heterodyne convention in which a mode with quadrature
//! variance `V` yields per-quadrature outcome variance `(V + 1) / 2`:
//!
//! ```text
//! alpha_q ~ N(0, mu / 2)
//! beta_q  = sqrt(eta) alpha_q + z_q,   z_q ~ N(0, (eta eps + 2) / 2)
//! ```
//!
//! # Random stream
//!
//! The generator is xoshiro256++ seeded through SplitMix64
//! (`Xoshiro256PlusPlus::seed_from_u64`). Normals come from the Box–Muller
//! transform, two per pair of 64-bit words `(a, b)`:
//!
//! ```text
//! u1 = ((a >> 11) + 1) * 2^-53        in (0, 1]
//! u2 = (b >> 11) * 2^-53              in [0, 1)
//! z0 = sqrt(-2 ln u1) cos(2 pi u2),   z1 = sqrt(-2 ln u1) sin(2 pi u2)
//! ```
//!
//! `z0` is used before `z1`. Each sample consumes four normals in the order
//! `alpha_x, alpha_p, z_x, z_p`. Transcendentals go through `libm` so the
//! stream is bit-identical across platforms. Independent parallel streams use
//! seeds `base_seed + i`.

use alloc::vec::Vec;

use core::f64::consts::{LOG2_E, PI};

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::{invalid, Error, Result};
use crate::keyrate::ChannelParams;

/// Smallest session [`estimate_channel`] accepts.
pub const MIN_ESTIMATION_SAMPLES: usize = 100;

const TWO_POW_MINUS_53: f64 = 1.0 / (1u64 << 53) as f64;

/// Standard normal variates from the documented xoshiro256++/Box–Muller
/// stream.
#[derive(Debug, Clone)]
pub struct NormalStream {
    rng: Xoshiro256PlusPlus,
    spare: Option<f64>,
}

impl NormalStream {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: Xoshiro256PlusPlus::seed_from_u64(seed),
            spare: None,
        }
    }

    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = ((self.rng.next_u64() >> 11) + 1) as f64 * TWO_POW_MINUS_53;
        let u2 = (self.rng.next_u64() >> 11) as f64 * TWO_POW_MINUS_53;
        let radius = libm::sqrt(-2.0 * libm::log(u1));
        let angle = 2.0 * PI * u2;
        self.spare = Some(radius * libm::sin(angle));
        radius * libm::cos(angle)
    }
}

/// One channel use: Alice's modulation and Bob's heterodyne outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SessionSample {
    pub alpha: [f64; 2],
    pub beta: [f64; 2],
}

/// Generates `n` channel uses with modulation variance `mu`.
pub fn sample_session(
    mu: f64,
    ch: &ChannelParams,
    n: usize,
    seed: u64,
) -> Result<Vec<SessionSample>> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(invalid!(
            "modulation variance must be finite and > 0, got {mu}"
        ));
    }
    if n == 0 {
        return Err(invalid!("sample count must be at least 1"));
    }
    let alpha_sd = libm::sqrt(0.5 * mu);
    let gain = libm::sqrt(ch.eta());
    let noise_sd = libm::sqrt(0.5 * (ch.eta() * ch.eps() + 2.0));
    let mut stream = NormalStream::new(seed);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let ax = alpha_sd * stream.next_normal();
        let ap = alpha_sd * stream.next_normal();
        let zx = noise_sd * stream.next_normal();
        let zp = noise_sd * stream.next_normal();
        out.push(SessionSample {
            alpha: [ax, ap],
            beta: [gain * ax + zx, gain * ap + zp],
        });
    }
    Ok(out)
}

/// Channel parameters estimated from a session, each with its standard
/// error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelEstimate {
    pub eta_hat: f64,
    pub eta_se: f64,
    pub eps_hat: f64,
    pub eps_se: f64,
    /// Mutual information estimate, bits (both quadratures).
    pub i_ab_hat: f64,
    pub i_ab_se: f64,
    /// Modulation variance, `2 Var(alpha_q)`.
    pub mu_hat: f64,
    pub mu_se: f64,
    pub sample_count: usize,
}

/// Regresses `beta_q` on `alpha_q`, pooling both quadratures (each centred
/// on its own mean).
///
/// * `eta_hat` is the squared slope.
/// * `eps_hat` solves `Var(beta_q | alpha) = (eta eps + 2) / 2` for the
///   residual variance.
/// * `i_ab_hat = log2(Var(beta_q) / Var(residual))`, i.e. half that per
///   quadrature, summed.
///
/// Standard errors use the usual Gaussian regression and delta-method
/// expressions.
pub fn estimate_channel(samples: &[SessionSample]) -> Result<ChannelEstimate> {
    let n = samples.len();
    if n < MIN_ESTIMATION_SAMPLES {
        return Err(invalid!(
            "need at least {MIN_ESTIMATION_SAMPLES} samples, got {n}"
        ));
    }
    if samples
        .iter()
        .any(|s| !(s.alpha.iter().chain(s.beta.iter()).all(|v| v.is_finite())))
    {
        return Err(invalid!("samples contain non-finite values"));
    }

    let nf = n as f64;
    let mut mean_a = [0.0; 2];
    let mut mean_b = [0.0; 2];
    for s in samples {
        for q in 0..2 {
            mean_a[q] += s.alpha[q];
            mean_b[q] += s.beta[q];
        }
    }
    for q in 0..2 {
        mean_a[q] /= nf;
        mean_b[q] /= nf;
    }

    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for s in samples {
        for q in 0..2 {
            let da = s.alpha[q] - mean_a[q];
            let db = s.beta[q] - mean_b[q];
            sxx += da * da;
            sxy += da * db;
            syy += db * db;
        }
    }
    if !(sxx > 0.0) || !(syy > 0.0) {
        return Err(Error::Estimation("degenerate sample variance".into()));
    }

    // Pooled observations, two intercepts and one slope.
    let obs = 2.0 * nf;
    let slope = sxy / sxx;
    let rss = syy - slope * sxy;
    if !(rss > 0.0) {
        return Err(Error::Estimation(
            "residual variance is not positive".into(),
        ));
    }
    let resid_var = rss / (obs - 3.0);
    let slope_se = libm::sqrt(resid_var / sxx);

    let eta_hat = slope * slope;
    let eta_se = 2.0 * slope.abs() * slope_se;
    if !(eta_hat > 0.0) {
        return Err(Error::Estimation("estimated transmittance is zero".into()));
    }

    let resid_var_se = resid_var * libm::sqrt(2.0 / (obs - 3.0));
    let eps_hat = 2.0 * (resid_var - 1.0) / eta_hat;
    let from_resid = 2.0 / eta_hat * resid_var_se;
    let from_eta = eps_hat / eta_hat * eta_se;
    let eps_se = libm::sqrt(from_resid * from_resid + from_eta * from_eta);

    let snr = slope * slope * sxx / rss;
    let i_ab_hat = libm::log2(syy / rss);
    let rel_slope = slope_se / slope;
    let log_snr_var = 4.0 * rel_slope * rel_slope + 4.0 / obs;
    let i_ab_se = snr / (1.0 + snr) * libm::sqrt(log_snr_var) * LOG2_E;

    let alpha_var = sxx / (obs - 2.0);
    let mu_hat = 2.0 * alpha_var;
    let mu_se = mu_hat * libm::sqrt(2.0 / (obs - 2.0));

    Ok(ChannelEstimate {
        eta_hat,
        eta_se,
        eps_hat,
        eps_se,
        i_ab_hat,
        i_ab_se,
        mu_hat,
        mu_se,
        sample_count: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stream_is_reproducible() {
        let mut a = NormalStream::new(42);
        let mut b = NormalStream::new(42);
        for _ in 0..1000 {
            assert_eq!(a.next_normal().to_bits(), b.next_normal().to_bits());
        }
        let mut c = NormalStream::new(43);
        assert_ne!(NormalStream::new(42).next_normal(), c.next_normal());
    }

    #[test]
    fn stream_moments() {
        let mut s = NormalStream::new(7);
        let n = 200_000;
        let (mut m1, mut m2) = (0.0, 0.0);
        for _ in 0..n {
            let z = s.next_normal();
            m1 += z;
            m2 += z * z;
        }
        let mean = m1 / n as f64;
        let var = m2 / n as f64 - mean * mean;
        assert!(mean.abs() < 4.0 / (n as f64).sqrt());
        assert!((var - 1.0).abs() < 4.0 * (2.0 / n as f64).sqrt());
    }

    #[test]
    fn sample_session_validation() {
        let ch = ChannelParams::new(0.5, 0.0).unwrap();
        assert!(sample_session(1.0, &ch, 0, 1).is_err());
        assert!(sample_session(0.0, &ch, 10, 1).is_err());
        assert_eq!(sample_session(1.0, &ch, 10, 1).unwrap().len(), 10);
    }

    #[test]
    fn same_seed_same_samples() {
        let ch = ChannelParams::new(0.3, 0.1).unwrap();
        let a = sample_session(5.0, &ch, 500, 99).unwrap();
        let b = sample_session(5.0, &ch, 500, 99).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn lossless_slope_is_one() {
        let ch = ChannelParams::new(1.0, 0.0).unwrap();
        let s = sample_session(10.0, &ch, 100_000, 5).unwrap();
        let est = estimate_channel(&s).unwrap();
        assert!((est.eta_hat - 1.0).abs() < 4.0 * est.eta_se);
        assert!(est.eps_hat.abs() < 4.0 * est.eps_se);
    }

    #[test]
    fn estimation_needs_enough_samples() {
        let ch = ChannelParams::new(0.5, 0.0).unwrap();
        let s = sample_session(1.0, &ch, 99, 1).unwrap();
        assert!(matches!(
            estimate_channel(&s),
            Err(Error::InvalidArgument(_))
        ));
        let flat = alloc::vec![
            SessionSample {
                alpha: [1.0, 1.0],
                beta: [0.5, 0.5]
            };
            200
        ];
        assert!(matches!(estimate_channel(&flat), Err(Error::Estimation(_))));
    }
}
