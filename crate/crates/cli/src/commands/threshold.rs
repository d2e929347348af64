use std::io::Write;

use cvqkd_core::threshold::db_to_eta;
use cvqkd_core::{threshold_curve, Error as CoreError, SideChannelParams, DEFAULT_TOLERANCE};

use super::{csv_writer, fmt_num, grid};
use crate::args::ThresholdArgs;
use crate::error::{usage, CliResult};

pub const HEADER: [&str; 6] = ["eta_db", "eta", "nbar", "m", "eps_max", "flag"];

/// Short machine-readable reason for a flagged point.
fn flag_name(err: &CoreError) -> &'static str {
    match err {
        CoreError::NoThreshold { .. } => "no-threshold",
        CoreError::SingularChannel { .. } => "singular-channel",
        CoreError::InfiniteCapacity { .. } => "infinite-capacity",
        CoreError::InvalidArgument(_) => "invalid-argument",
        CoreError::Estimation(_) | CoreError::Internal(_) => "error",
    }
}

pub fn run(args: &ThresholdArgs, out: &mut dyn Write) -> CliResult<()> {
    let dbs = grid(
        args.db_start.unwrap_or(1.0),
        args.db_stop.unwrap_or(30.0),
        args.steps.unwrap_or(30),
        false,
    )?;
    let tol = args.tol.unwrap_or(DEFAULT_TOLERANCE);
    if !(tol > 0.0) {
        return Err(usage(format!("--tol must be positive, got {tol}")));
    }
    let etas: Vec<f64> = dbs.iter().map(|&db| db_to_eta(db)).collect();
    let nbars = args.nbar.clone().map(|l| l.0).unwrap_or_else(|| vec![0.0]);
    let ms = args.m.clone().map(|l| l.0).unwrap_or_else(|| vec![1.0]);

    let mut w = csv_writer(out);
    w.write_record(HEADER)?;
    for &nbar in &nbars {
        for &m in &ms {
            let sc = SideChannelParams::new(nbar, m)?;
            for (db, p) in dbs.iter().zip(threshold_curve(&etas, &sc, tol)) {
                w.write_record([
                    fmt_num(*db),
                    fmt_num(p.eta),
                    fmt_num(nbar),
                    fmt_num(m),
                    fmt_num(p.eps_max),
                    p.flag.as_ref().map(flag_name).unwrap_or("").to_string(),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}
