//! Closed-form moments of the hacked-source state after each stage of the
//! reduction circuit, transcribed from their analytic derivation.
//!
//! Modes are kept in physical order throughout: 0 is the signal, 1 the
//! Trojan mode that entered the device, 2 Eve's idler. After the second stage
//! mode 1 is vacuum, so the final Trojan displacement sits on mode 2.

use nalgebra::{DMatrix, DVector, Matrix2};
// Unused whenever std is linked into the build, e.g. by test harnesses.
#[allow(unused_imports)]
use num_traits::Float;

use super::SideChannelParams;
use crate::gaussian::pauli_z;

/// Conditional and averaged moments at one point of the circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct StageMoments {
    pub mean_conditional: DVector<f64>,
    pub cov_conditional: DMatrix<f64>,
    pub cov_averaged: DMatrix<f64>,
}

/// Entry of a 3x3 block matrix: `Id(a)` is `a·1`, `Zd(a)` is `a·Z`.
#[derive(Clone, Copy)]
enum Blk {
    Id(f64),
    Zd(f64),
}

use Blk::{Id, Zd};

const O: Blk = Id(0.0);

fn blocks<const N: usize>(entries: [[Blk; N]; N]) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(2 * N, 2 * N);
    for (i, row) in entries.iter().enumerate() {
        for (j, b) in row.iter().enumerate() {
            let block = match *b {
                Id(a) => Matrix2::identity() * a,
                Zd(a) => pauli_z() * a,
            };
            out.fixed_view_mut::<2, 2>(2 * i, 2 * j).copy_from(&block);
        }
    }
    out
}

fn mean(parts: [[f64; 2]; 3]) -> DVector<f64> {
    DVector::from_iterator(6, parts.into_iter().flatten())
}

fn add_signal_variance(mut cov: DMatrix<f64>, extra: f64) -> DMatrix<f64> {
    cov[(0, 0)] += extra;
    cov[(1, 1)] += extra;
    cov
}

/// Stage moments for arbitrary modulation gain `m`.
///
/// The averaged signal variance after the last stage is `1 + k1^2 mu`.
pub fn general_stages(mu: f64, sc: &SideChannelParams, alpha: [f64; 2]) -> [StageMoments; 3] {
    let m = sc.m();
    let r = sc.squeezing();
    let m2 = m * m;
    let (ch2, sh2) = ((2.0 * r).cosh(), (2.0 * r).sinh());
    let shr = r.sinh();
    let [ax, ap] = alpha;

    let g = (m2 + 1.0).sqrt();
    let d1 = (m2 * ch2 + 1.0) / (m2 + 1.0);
    let y1 = sh2 / g;
    let w = (m2 * ch2 + m2 + 2.0).sqrt();
    let y2 = core::f64::consts::SQRT_2 * m * shr * w / (m2 + 1.0);
    let k1 = w / core::f64::consts::SQRT_2;
    let k2 = -m * shr;

    let x0 = [g * ax, g * ap];
    let stage1_cond = blocks([
        [Id(d1), Id(2.0 * m * shr * shr / (m2 + 1.0)), Zd(m * y1)],
        [
            Id(2.0 * m * shr * shr / (m2 + 1.0)),
            Id((m2 + ch2) / (m2 + 1.0)),
            Zd(y1),
        ],
        [Zd(m * y1), Zd(y1), Id(ch2)],
    ]);
    let stage2_cond = blocks([[Id(d1), O, Zd(y2)], [O, Id(1.0), O], [Zd(y2), O, Id(d1)]]);

    let x_plus = 0.5 * (m2 * mu * ch2 + m2 * mu + 2.0 * mu + 2.0);
    let x_minus = 0.5 * (m2 * mu * ch2 - m2 * mu + 2.0);
    let y3 = -m * mu * shr * w / core::f64::consts::SQRT_2;

    [
        StageMoments {
            mean_conditional: mean([x0, [0.0; 2], [0.0; 2]]),
            cov_averaged: add_signal_variance(stage1_cond.clone(), (m2 + 1.0) * mu),
            cov_conditional: stage1_cond,
        },
        StageMoments {
            mean_conditional: mean([x0, [0.0; 2], [0.0; 2]]),
            cov_averaged: add_signal_variance(stage2_cond.clone(), (m2 + 1.0) * mu),
            cov_conditional: stage2_cond,
        },
        StageMoments {
            mean_conditional: mean([[k1 * ax, k1 * ap], [0.0; 2], [k2 * ax, -k2 * ap]]),
            cov_conditional: DMatrix::identity(6, 6),
            cov_averaged: blocks([
                [Id(x_plus), O, Zd(y3)],
                [O, Id(1.0), O],
                [Zd(y3), O, Id(x_minus)],
            ]),
        },
    ]
}

/// Stage moments for `m = 1`, written in the `cosh^2 r` form.
pub fn unit_gain_stages(mu: f64, nbar: f64, alpha: [f64; 2]) -> [StageMoments; 3] {
    let r = nbar.sqrt().asinh();
    let (c, s) = (r.cosh(), r.sinh());
    let (c2, s2) = (c * c, s * s);
    let sh2 = (2.0 * r).sinh();
    let rt2 = core::f64::consts::SQRT_2;
    let cross = (c2 * c2 - 1.0).sqrt();
    let [ax, ap] = alpha;
    let k1 = (c2 + 1.0).sqrt();
    let k2 = -s;

    let stage1_cond = blocks([
        [Id(c2), Id(s2), Zd(sh2 / rt2)],
        [Id(s2), Id(c2), Zd(sh2 / rt2)],
        [Zd(sh2 / rt2), Zd(sh2 / rt2), Id((2.0 * r).cosh())],
    ]);
    let stage2_cond = blocks([
        [Id(c2), O, Zd(cross)],
        [O, Id(1.0), O],
        [Zd(cross), O, Id(c2)],
    ]);
    let x0 = [rt2 * ax, rt2 * ap];

    [
        StageMoments {
            mean_conditional: mean([x0, [0.0; 2], [0.0; 2]]),
            cov_averaged: add_signal_variance(stage1_cond.clone(), 2.0 * mu),
            cov_conditional: stage1_cond,
        },
        StageMoments {
            mean_conditional: mean([x0, [0.0; 2], [0.0; 2]]),
            cov_averaged: add_signal_variance(stage2_cond.clone(), 2.0 * mu),
            cov_conditional: stage2_cond,
        },
        StageMoments {
            mean_conditional: mean([[k1 * ax, k1 * ap], [0.0; 2], [k2 * ax, -k2 * ap]]),
            cov_conditional: DMatrix::identity(6, 6),
            cov_averaged: blocks([
                [Id(1.0 + mu * (c2 + 1.0)), O, Zd(-mu * cross)],
                [O, Id(1.0), O],
                [Zd(-mu * cross), O, Id(1.0 + mu * s2)],
            ]),
        },
    ]
}

/// The three `m = 1` stage matrices as 6x6 matrices. The last stage acts on
/// modes 0 and 2 and leaves the vacuum mode 1 alone.
pub fn unit_gain_transforms(nbar: f64) -> [DMatrix<f64>; 3] {
    let r = nbar.sqrt().asinh();
    let (c, s) = (r.cosh(), r.sinh());
    let h = core::f64::consts::FRAC_1_SQRT_2;
    let n = (c * c + 1.0).sqrt();
    [
        blocks([[Id(h), Id(h), O], [Id(-h), Id(h), O], [O, O, Id(1.0)]]),
        blocks([
            [Id(1.0), O, O],
            [O, Id(core::f64::consts::SQRT_2 * c / n), Zd(-s / n)],
            [O, Zd(-s / n), Id(core::f64::consts::SQRT_2 * c / n)],
        ]),
        blocks([
            [Id(n * h), O, Zd(-s * h)],
            [O, Id(1.0), O],
            [Zd(-s * h), O, Id(n * h)],
        ]),
    ]
}
