use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use cvqkd_core::keyrate::mutual_info_ab;
use cvqkd_core::sim::{estimate_channel, sample_session, SessionSample};
use cvqkd_core::{ChannelParams, EffectiveParams, Regime};

use super::{csv_writer, fmt_num};
use crate::args::SimulateArgs;
use crate::error::{usage, CliResult};
use crate::record::{
    ClosedForm, Estimate, SimulationEstimates, SimulationInputs, SimulationRecord, TOOL, VERSION,
};

pub const SAMPLE_HEADER: [&str; 4] = ["alpha_x", "alpha_p", "beta_x", "beta_p"];

fn dump(path: &Path, samples: &[SessionSample]) -> CliResult<()> {
    let mut w = csv_writer(BufWriter::new(File::create(path)?));
    w.write_record(SAMPLE_HEADER)?;
    for s in samples {
        w.write_record([
            fmt_num(s.alpha[0]),
            fmt_num(s.alpha[1]),
            fmt_num(s.beta[0]),
            fmt_num(s.beta[1]),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn record(args: &SimulateArgs) -> CliResult<(SimulationRecord, Vec<SessionSample>)> {
    let mu = args.mu.ok_or_else(|| usage("--mu is required"))?;
    let eta = args.transmittance.resolve()?;
    let eps = args.eps.unwrap_or(0.0);
    let n = args.samples.ok_or_else(|| usage("--samples is required"))?;
    let seed = args.seed.unwrap_or(1);

    let ch = ChannelParams::new(eta, eps)?;
    let samples = sample_session(mu, &ch, n, seed)?;
    let est = estimate_channel(&samples)?;
    let i_ab = mutual_info_ab(&EffectiveParams::direct(mu, eta, eps), Regime::Finite)?;
    let est_of = |value, se| Estimate { value, se };
    let rec = SimulationRecord {
        tool: TOOL.into(),
        version: VERSION.into(),
        inputs: SimulationInputs {
            mu,
            eta,
            eps,
            samples: n,
            seed,
        },
        estimate: SimulationEstimates {
            eta: est_of(est.eta_hat, est.eta_se),
            eps: est_of(est.eps_hat, est.eps_se),
            i_ab: est_of(est.i_ab_hat, est.i_ab_se),
            mu: est_of(est.mu_hat, est.mu_se),
            sample_count: est.sample_count,
        },
        closed_form: ClosedForm { i_ab },
    };
    Ok((rec, samples))
}

pub fn run(args: &SimulateArgs, out: &mut dyn Write) -> CliResult<()> {
    let (rec, samples) = record(args)?;
    if let Some(path) = &args.dump_samples {
        dump(path, &samples)?;
    }
    serde_json::to_writer_pretty(&mut *out, &rec)?;
    writeln!(out)?;
    Ok(())
}
