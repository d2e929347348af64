//! Acceptance checks. Runs without the libtest harness and prints one
//! PASS/FAIL line per criterion, exiting non-zero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use cvqkd_core::keyrate::mutual_info_ab;
use cvqkd_core::reduction::{
    build_initial_state, closed_form_psi0_eigenvalues, reduction_circuit, verify_reduction,
};
use cvqkd_core::sim::{estimate_channel, sample_session, NormalStream};
use cvqkd_core::threshold::db_to_eta;
use cvqkd_core::*;
use std::f64::consts::LN_2;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

type Outcome = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn sc(nbar: f64, m: f64) -> SideChannelParams {
    SideChannelParams::new(nbar, m).unwrap()
}

fn threshold_anchors() -> Outcome {
    let eta = 0.01;
    let none =
        epsilon_max(eta, &SideChannelParams::NONE, DEFAULT_TOLERANCE).map_err(|e| e.to_string())?;
    let leak = epsilon_max(eta, &sc(0.0, 1.0), DEFAULT_TOLERANCE).map_err(|e| e.to_string())?;
    let one = epsilon_max(eta, &sc(1.0, 1.0), DEFAULT_TOLERANCE).map_err(|e| e.to_string())?;
    let drop = 1.0 - one / none;
    let detail = format!(
        "eps_max = {none:.4}, {leak:.4}, {one:.4}; reduction {:.1}%",
        100.0 * drop
    );
    ensure((none - 0.12).abs() <= 0.01, || {
        format!("no side channel: {detail}")
    })?;
    ensure((leak - 0.06).abs() <= 0.01, || format!("nbar=0: {detail}"))?;
    ensure((one - 0.03).abs() <= 0.01, || format!("nbar=1: {detail}"))?;
    ensure((drop - 0.75).abs() <= 0.10, || {
        format!("reduction: {detail}")
    })?;
    Ok(detail)
}

fn long_distance_slope() -> Outcome {
    let target = 1.0 / (4.0 * LN_2);
    let mut worst: f64 = 0.0;
    let mut worst_half: f64 = 0.0;
    for eta in [1e-3, 1e-2] {
        for nbar in [0.0, 1.0, 3.0, 7.0] {
            let r = key_rate_lossy(eta, &sc(nbar, 1.0)).map_err(|e| e.to_string())?;
            let rel = (r * (nbar + 1.0) / eta) / target - 1.0;
            worst = worst.max(rel.abs());
            ensure(rel.abs() <= 0.02, || {
                format!("eta {eta}, nbar {nbar}: off by {rel:.4}")
            })?;
        }
        let with = key_rate_lossy(eta, &sc(0.0, 1.0)).map_err(|e| e.to_string())?;
        let without = key_rate_lossy(eta, &SideChannelParams::NONE).map_err(|e| e.to_string())?;
        let rel = with / without / 0.5 - 1.0;
        worst_half = worst_half.max(rel.abs());
        ensure(rel.abs() <= 0.02, || {
            format!("eta {eta}: leak ratio off by {rel:.4}")
        })?;
    }
    Ok(format!(
        "max slope deviation {:.3}%, max halving deviation {:.3}%",
        100.0 * worst,
        100.0 * worst_half
    ))
}

fn three_db_law() -> Outcome {
    let ch = ChannelParams::lossy(1e-3).map_err(|e| e.to_string())?;
    let rate = |n: f64| key_rate_asymptotic(&ch, 1.0, &sc(n, 1.0)).map(|b| b.rate);
    let mut ratios = Vec::new();
    for nbar in [0.0, 1.0, 3.0] {
        let ratio = rate(nbar).map_err(|e| e.to_string())?
            / rate(2.0 * nbar + 1.0).map_err(|e| e.to_string())?;
        ensure((ratio / 2.0 - 1.0).abs() <= 0.01, || {
            format!("nbar {nbar}: ratio {ratio}")
        })?;
        ratios.push(format!("{ratio:.5}"));
    }
    Ok(format!("ratios {}", ratios.join(", ")))
}

fn reduction_correctness() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut worst_matrix: f64 = 0.0;
    let mut cases = 0;
    for mu in [0.0, 1.0, 10.0] {
        for nbar in [0.0, 0.5, 2.0] {
            for m in [0.5, 1.0, 2.0] {
                let rep =
                    verify_reduction(mu, &sc(nbar, m), [0.7, -1.3]).map_err(|e| e.to_string())?;
                worst = worst.max(rep.max_deviation());
                ensure(rep.passed, || {
                    format!("mu {mu}, nbar {nbar}, m {m}: {:e}", rep.max_deviation())
                })?;
                if m == 1.0 {
                    let dev = rep
                        .transform_deviation
                        .ok_or_else(|| "missing stage-matrix comparison at m = 1".to_string())?;
                    let d = dev.iter().cloned().fold(0.0, f64::max);
                    worst_matrix = worst_matrix.max(d);
                    ensure(d < 1e-10, || {
                        format!("stage matrices at nbar {nbar}: {d:e}")
                    })?;
                }
                cases += 1;
            }
        }
    }
    Ok(format!(
        "{cases} cases, max moment deviation {worst:.2e}, max stage-matrix deviation {worst_matrix:.2e}"
    ))
}

fn eigenvalue_closed_forms() -> Outcome {
    let mut worst: f64 = 0.0;
    for mu in [0.1, 1.0, 10.0, 100.0] {
        for nbar in [0.0, 0.25, 1.0, 4.0] {
            let state = build_initial_state(mu, &sc(nbar, 1.0)).map_err(|e| e.to_string())?;
            let mut numeric = state.symplectic_eigenvalues().map_err(|e| e.to_string())?;
            let mut closed = closed_form_psi0_eigenvalues(mu, nbar)
                .map_err(|e| e.to_string())?
                .to_vec();
            numeric.sort_by(f64::total_cmp);
            closed.sort_by(f64::total_cmp);
            for (a, b) in numeric.iter().zip(&closed) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    ensure(worst < 1e-9, || format!("max deviation {worst:e}"))?;
    Ok(format!("max deviation {worst:.2e}"))
}

fn finite_mu_convergence() -> Outcome {
    let mut worst: f64 = 0.0;
    for eta in [0.01, 0.1, 0.5] {
        for eps in [0.0, 0.02, 0.05] {
            let ch = ChannelParams::new(eta, eps).map_err(|e| e.to_string())?;
            for nbar in [0.0, 1.0, 3.0] {
                for m in [1.0, 2.0] {
                    let p = sc(nbar, m);
                    let fin = key_rate_finite(&ch, 1e6, &p)
                        .map_err(|e| e.to_string())?
                        .rate;
                    let asy = key_rate_asymptotic(&ch, 1e6, &p)
                        .map_err(|e| e.to_string())?
                        .rate;
                    worst = worst.max((fin - asy).abs());
                }
            }
        }
    }
    ensure(worst < 1e-3, || format!("max gap {worst:e} bits"))?;
    Ok(format!("max gap {worst:.2e} bits"))
}

fn k_identities() -> Outcome {
    let mut stream = NormalStream::new(7);
    let mut nbars: Vec<f64> = vec![0.0, 0.25, 0.5, 1.0, 3.0, 7.0, 100.0];
    nbars.extend((0..10_000).map(|_| stream.next_normal().abs() * 10.0));
    for &nbar in &nbars {
        let k = k_factor(&sc(nbar, 1.0));
        let want = (2.0 * (nbar + 1.0)).sqrt();
        ensure(k.to_bits() == want.to_bits(), || {
            format!("nbar {nbar}: {k} vs {want}")
        })?;
    }
    // Pairs with exactly representable equal k^2.
    let pairs = [
        ((1.5, 1.0), (0.0, 2.0)),
        ((4.0, 1.0), (0.0, 3.0)),
        ((0.0, 1.0), (1.5, 0.5)),
    ];
    let ch = ChannelParams::new(0.1, 0.02).map_err(|e| e.to_string())?;
    for ((n1, m1), (n2, m2)) in pairs {
        let (a, b) = (sc(n1, m1), sc(n2, m2));
        ensure(k_factor(&a).to_bits() == k_factor(&b).to_bits(), || {
            format!("k differs for ({n1}, {m1}) and ({n2}, {m2})")
        })?;
        let same = key_rate_asymptotic(&ch, 2.0, &a).ok() == key_rate_asymptotic(&ch, 2.0, &b).ok()
            && key_rate_finite(&ch, 2.0, &a).ok() == key_rate_finite(&ch, 2.0, &b).ok()
            && key_rate_lossy(0.1, &a).map(f64::to_bits).ok()
                == key_rate_lossy(0.1, &b).map(f64::to_bits).ok()
            && epsilon_max(0.1, &a, DEFAULT_TOLERANCE)
                .map(f64::to_bits)
                .ok()
                == epsilon_max(0.1, &b, DEFAULT_TOLERANCE)
                    .map(f64::to_bits)
                    .ok();
        ensure(same, || {
            format!("rates differ for ({n1}, {m1}) and ({n2}, {m2})")
        })?;
    }
    Ok(format!(
        "{} exact k checks, {} equal-k pairs bit-identical",
        nbars.len(),
        pairs.len()
    ))
}

fn monte_carlo_oracle() -> Outcome {
    let (mu, eta, eps, n, seed) = (10.0, 0.5, 0.05, 1_000_000, 20_240_601);
    let ch = ChannelParams::new(eta, eps).map_err(|e| e.to_string())?;
    let samples = sample_session(mu, &ch, n, seed).map_err(|e| e.to_string())?;
    let est = estimate_channel(&samples).map_err(|e| e.to_string())?;
    let again = estimate_channel(&sample_session(mu, &ch, n, seed).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    ensure(est == again, || {
        "estimates differ under a fixed seed".into()
    })?;
    let i_ab = mutual_info_ab(&EffectiveParams::direct(mu, eta, eps), Regime::Finite)
        .map_err(|e| e.to_string())?;
    let z = [
        (est.eta_hat - eta) / est.eta_se,
        (est.eps_hat - eps) / est.eps_se,
        (est.i_ab_hat - i_ab) / est.i_ab_se,
    ];
    ensure(z.iter().all(|v| v.abs() <= 3.0), || {
        format!("z-scores {z:.2?}")
    })?;
    Ok(format!(
        "z-scores eta {:.2}, eps {:.2}, i_ab {:.2}",
        z[0], z[1], z[2]
    ))
}

fn plob_dominance() -> Outcome {
    let (lo, hi) = (1e-3f64.ln(), 0.99f64.ln());
    let mut min_gap = f64::INFINITY;
    for i in 0..50 {
        let eta = (lo + (hi - lo) * i as f64 / 49.0).exp();
        let plob = plob_bound(eta).map_err(|e| e.to_string())?;
        for nbar in [0.0, 1.0, 3.0, 7.0] {
            let r = key_rate_lossy(eta, &sc(nbar, 1.0)).map_err(|e| e.to_string())?;
            ensure(plob > r, || {
                format!("eta {eta}, nbar {nbar}: {r} >= {plob}")
            })?;
            min_gap = min_gap.min(plob / r);
        }
    }
    Ok(format!("200 points, smallest plob/rate ratio {min_gap:.3}"))
}

fn property_suites() -> Outcome {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(99);
    let mut uniform = move |lo: f64, hi: f64| {
        let u = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        lo + (hi - lo) * u
    };

    // Symplectic preservation, eigenvalue invariance and entropy sign on
    // random circuits acting on random thermal products.
    let mut worst_defect: f64 = 0.0;
    let mut worst_eig: f64 = 0.0;
    for trial in 0..200 {
        let n = 2 + trial % 3;
        let mut t = SymplecticTransform::identity(n);
        for _ in 0..6 {
            let i = (uniform(0.0, n as f64) as usize).min(n - 1);
            let j = (i + 1 + (uniform(0.0, (n - 1) as f64) as usize).min(n - 2)) % n;
            let g = if uniform(0.0, 1.0) < 0.5 {
                SymplecticTransform::beamsplitter(uniform(-3.2, 3.2), (i, j), n)
            } else {
                SymplecticTransform::two_mode_squeezer(uniform(-0.8, 0.8), (i, j), n)
            }
            .map_err(|e| e.to_string())?;
            t = t.then(&g).map_err(|e| e.to_string())?;
        }
        let scale = t.matrix().amax().powi(2).max(1.0);
        worst_defect = worst_defect.max(t.symplectic_defect() / scale);

        let state = (0..n)
            .map(|_| GaussianState::thermal(uniform(1.0, 5.0)).unwrap())
            .reduce(|a, b| a.tensor(&b))
            .unwrap();
        let before = state.symplectic_eigenvalues().map_err(|e| e.to_string())?;
        let moved = t.apply(&state).map_err(|e| e.to_string())?;
        let after = moved.symplectic_eigenvalues().map_err(|e| e.to_string())?;
        for (a, b) in before.iter().zip(&after) {
            worst_eig = worst_eig.max((a - b).abs());
        }
        ensure(moved.entropy().map_err(|e| e.to_string())? > 0.0, || {
            "mixed state with zero entropy".into()
        })?;
        let pure = t
            .apply(&GaussianState::vacuum(n).unwrap())
            .map_err(|e| e.to_string())?;
        let s = pure.entropy().map_err(|e| e.to_string())?;
        ensure((0.0..1e-9).contains(&s), || format!("pure state entropy {s:e}"))?;
    }
    ensure(worst_defect < 1e-10, || {
        format!("symplectic defect {worst_defect:e}")
    })?;
    ensure(worst_eig < 1e-9, || {
        format!("eigenvalue drift {worst_eig:e}")
    })?;

    let circuit_defect = [(0.0, 1.0), (2.0, 0.5), (7.0, 2.0)]
        .iter()
        .map(|&(n, m)| {
            let u = reduction_circuit(&sc(n, m)).composed();
            u.symplectic_defect() / u.matrix().amax().powi(2).max(1.0)
        })
        .fold(0.0, f64::max);
    ensure(circuit_defect < 1e-10, || {
        format!("reduction circuit defect {circuit_defect:e}")
    })?;

    // Threshold root residual.
    let mut worst_residual: f64 = 0.0;
    for db in [1.0, 5.0, 10.0, 20.0, 30.0] {
        let eta = db_to_eta(db);
        for p in [
            SideChannelParams::NONE,
            sc(0.0, 1.0),
            sc(1.0, 1.0),
            sc(3.0, 1.0),
        ] {
            let e = epsilon_max(eta, &p, DEFAULT_TOLERANCE).map_err(|e| e.to_string())?;
            let ch = ChannelParams::new(eta, e).map_err(|e| e.to_string())?;
            let r = key_rate_asymptotic(&ch, 1.0, &p)
                .map_err(|e| e.to_string())?
                .rate;
            worst_residual = worst_residual.max(r.abs());
        }
    }
    ensure(worst_residual < 1e-8, || {
        format!("root residual {worst_residual:e}")
    })?;

    // Rate monotonicity in nbar, m and eps.
    let rate = |eta: f64, eps: f64, nbar: f64, m: f64| {
        key_rate_asymptotic(&ChannelParams::new(eta, eps).unwrap(), 1.0, &sc(nbar, m))
            .unwrap()
            .rate
    };
    let (nbars, ms, epss) = ([0.0, 1.0, 3.0, 7.0], [0.5, 1.0, 2.0], [0.0, 0.01, 0.05]);
    for eta in [0.01, 0.1, 0.5] {
        for &eps in &epss {
            for &m in &ms {
                for w in nbars.windows(2) {
                    ensure(rate(eta, eps, w[1], m) < rate(eta, eps, w[0], m), || {
                        "not decreasing in nbar".into()
                    })?;
                }
            }
            for &nbar in &nbars {
                for w in ms.windows(2) {
                    ensure(
                        rate(eta, eps, nbar, w[1]) < rate(eta, eps, nbar, w[0]),
                        || "not decreasing in m".into(),
                    )?;
                }
            }
        }
        for &nbar in &nbars {
            for &m in &ms {
                for w in epss.windows(2) {
                    ensure(rate(eta, w[1], nbar, m) < rate(eta, w[0], nbar, m), || {
                        "not decreasing in eps".into()
                    })?;
                }
            }
        }
    }

    Ok(format!(
        "defect {worst_defect:.1e}, eigenvalue drift {worst_eig:.1e}, root residual {worst_residual:.1e}, monotone on 108 points"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("threshold anchors at 20 dB", threshold_anchors),
        ("long-distance slope", long_distance_slope),
        ("3 dB halving law", three_db_law),
        ("reduction correctness", reduction_correctness),
        ("closed-form eigenvalues", eigenvalue_closed_forms),
        ("finite-mu convergence", finite_mu_convergence),
        ("k-factor identities", k_identities),
        ("Monte Carlo oracle", monte_carlo_oracle),
        ("PLOB dominance", plob_dominance),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (idx, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!(
                "criterion {:>2} PASS  {name}: {detail} ({secs:.2}s)",
                idx + 1
            ),
            Err(detail) => {
                failed += 1;
                println!(
                    "criterion {:>2} FAIL  {name}: {detail} ({secs:.2}s)",
                    idx + 1
                );
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
