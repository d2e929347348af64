use std::io::Write;

use chrono::Utc;
use cvqkd_core::threshold::eta_to_db;

use super::evaluate;
use crate::args::RateArgs;
use crate::error::CliResult;
use crate::record::{Effective, Mode, RateInputs, RateOutputs, RunRecord, TOOL, VERSION};

pub fn record(args: &RateArgs) -> CliResult<RunRecord> {
    let eta = args.transmittance.resolve()?;
    let eps = args.eps.unwrap_or(0.0);
    let nbar = args.nbar.unwrap_or(0.0);
    let m = args.m.unwrap_or(1.0);
    let ev = evaluate(eta, eps, nbar, m, args.mu)?;
    let eff = ev.breakdown.effective;
    Ok(RunRecord {
        tool: TOOL.into(),
        version: VERSION.into(),
        timestamp: Utc::now(),
        mode: if ev.finite {
            Mode::Finite
        } else {
            Mode::Asymptotic
        },
        inputs: RateInputs {
            eta,
            eta_db: eta_to_db(eta),
            eps,
            nbar,
            m,
            mu: args.mu,
        },
        outputs: RateOutputs {
            rate: ev.breakdown.rate,
            i_ab: ev.i_ab(),
            holevo: ev.holevo(),
            k: eff.k,
            effective: Effective {
                mu: ev.finite.then_some(eff.mu_eff),
                eta: eff.eta_eff,
                eps: eff.eps_eff,
            },
            plob: ev.plob,
        },
    })
}

pub fn run(args: &RateArgs, out: &mut dyn Write) -> CliResult<()> {
    let rec = record(args)?;
    serde_json::to_writer_pretty(&mut *out, &rec)?;
    writeln!(out)?;
    Ok(())
}
