use std::io::Write;

use cvqkd_core::reduction::{verify_reduction, ReductionReport, REDUCTION_TOLERANCE};
use cvqkd_core::SideChannelParams;

use crate::args::VerifyArgs;
use crate::error::{usage, CliError, CliResult};

pub const DEFAULT_MU: [f64; 3] = [0.0, 1.0, 10.0];
pub const DEFAULT_NBAR: [f64; 3] = [0.0, 0.5, 2.0];
pub const DEFAULT_M: [f64; 3] = [0.5, 1.0, 2.0];
pub const DEFAULT_ALPHA: [f64; 2] = [0.7, -1.3];

// Prints -0 as 0.
fn num(v: f64) -> f64 {
    v + 0.0
}

fn write_report(out: &mut dyn Write, rep: &ReductionReport, tol: f64) -> CliResult<()> {
    let sc = rep.side_channel;
    writeln!(
        out,
        "mu={} nbar={} m={} alpha=({}, {})",
        rep.mu,
        sc.nbar(),
        sc.m(),
        rep.alpha[0],
        rep.alpha[1]
    )?;
    writeln!(
        out,
        "  theta1={} r2={} r3={}",
        num(rep.theta1),
        num(rep.r2),
        num(rep.r3)
    )?;
    for (i, st) in rep.stages.iter().enumerate() {
        writeln!(
            out,
            "  stage {}: mean {:.3e}  cov {:.3e}  averaged cov {:.3e}",
            i + 1,
            st.mean_conditional,
            st.cov_conditional,
            st.cov_averaged
        )?;
    }
    if let Some(t) = rep.transform_deviation {
        writeln!(
            out,
            "  stage matrices: {:.3e} {:.3e} {:.3e}",
            t[0], t[1], t[2]
        )?;
    }
    let verdict = if rep.passes(tol) { "ok" } else { "FAIL" };
    writeln!(out, "  max {:.3e} {verdict}", rep.max_deviation())?;
    Ok(())
}

pub fn run(args: &VerifyArgs, out: &mut dyn Write) -> CliResult<()> {
    let tol = args.tol.unwrap_or(REDUCTION_TOLERANCE);
    if !(tol > 0.0) {
        return Err(usage(format!("--tol must be positive, got {tol}")));
    }
    let mus = args
        .mu
        .map(|v| vec![v])
        .unwrap_or_else(|| DEFAULT_MU.to_vec());
    let nbars = args
        .nbar
        .map(|v| vec![v])
        .unwrap_or_else(|| DEFAULT_NBAR.to_vec());
    let ms = args
        .m
        .map(|v| vec![v])
        .unwrap_or_else(|| DEFAULT_M.to_vec());
    let alpha = args.alpha.map(|p| p.0).unwrap_or(DEFAULT_ALPHA);

    let (mut cases, mut failures, mut worst) = (0usize, 0usize, 0.0f64);
    for &mu in &mus {
        for &nbar in &nbars {
            for &m in &ms {
                let rep = verify_reduction(mu, &SideChannelParams::new(nbar, m)?, alpha)?;
                write_report(out, &rep, tol)?;
                cases += 1;
                worst = worst.max(rep.max_deviation());
                if !rep.passes(tol) {
                    failures += 1;
                }
            }
        }
    }
    writeln!(
        out,
        "{cases} cases, {failures} failed, max deviation {worst:.3e}, tolerance {tol:e}"
    )?;
    if failures > 0 {
        return Err(CliError::VerificationFailed);
    }
    Ok(())
}
