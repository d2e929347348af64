use std::io::Write;

use cvqkd_core::threshold::{db_to_eta, eta_to_db};

use super::{csv_writer, evaluate, fmt_num, fmt_opt, grid};
use crate::args::{Scale, SweepArgs, SweepVar};
use crate::error::{usage, CliResult};

pub const HEADER: [&str; 10] = [
    "eta", "eta_db", "nbar", "m", "eps", "rate", "plob", "k", "i_ab", "holevo",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub var: SweepVar,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    pub scale: Scale,
}

impl SweepSpec {
    pub fn points(&self) -> CliResult<Vec<f64>> {
        grid(self.start, self.stop, self.steps, self.scale == Scale::Log)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Point {
    eta: f64,
    eps: f64,
    nbar: f64,
    m: f64,
    mu: Option<f64>,
}

fn spec(args: &SweepArgs) -> CliResult<SweepSpec> {
    let need = |v: Option<f64>, name: &str| v.ok_or_else(|| usage(format!("--{name} is required")));
    Ok(SweepSpec {
        var: args.var.ok_or_else(|| usage("--var is required"))?,
        start: need(args.start, "start")?,
        stop: need(args.stop, "stop")?,
        steps: args.steps.ok_or_else(|| usage("--steps is required"))?,
        scale: args.scale.unwrap_or_default(),
    })
}

fn points(args: &SweepArgs) -> CliResult<Vec<Point>> {
    let spec = spec(args)?;
    let xs = spec.points()?;
    let swept = |flag: &str| usage(format!("--{flag} cannot be given while sweeping it"));
    match spec.var {
        SweepVar::Eta | SweepVar::EtaDb if args.transmittance.is_set() => return Err(swept("eta")),
        SweepVar::Eps if args.eps.is_some() => return Err(swept("eps")),
        SweepVar::Nbar if args.nbar.is_some() => return Err(swept("nbar")),
        SweepVar::M if args.m.is_some() => return Err(swept("m")),
        SweepVar::Mu if args.mu.is_some() => return Err(swept("mu")),
        _ => {}
    }
    let eta = match spec.var {
        SweepVar::Eta | SweepVar::EtaDb => f64::NAN,
        _ => args.transmittance.resolve()?,
    };
    let nbars = match spec.var {
        SweepVar::Nbar => vec![f64::NAN],
        _ => args.nbar.clone().map(|l| l.0).unwrap_or_else(|| vec![0.0]),
    };
    let ms = match spec.var {
        SweepVar::M => vec![f64::NAN],
        _ => args.m.clone().map(|l| l.0).unwrap_or_else(|| vec![1.0]),
    };
    let base = Point {
        eta,
        eps: args.eps.unwrap_or(0.0),
        nbar: f64::NAN,
        m: f64::NAN,
        mu: args.mu,
    };

    let mut out = Vec::with_capacity(nbars.len() * ms.len() * xs.len());
    for &nbar in &nbars {
        for &m in &ms {
            for &x in &xs {
                let mut p = Point { nbar, m, ..base };
                match spec.var {
                    SweepVar::Eta => p.eta = x,
                    SweepVar::EtaDb => p.eta = db_to_eta(x),
                    SweepVar::Eps => p.eps = x,
                    SweepVar::Nbar => p.nbar = x,
                    SweepVar::M => p.m = x,
                    SweepVar::Mu => p.mu = Some(x),
                }
                out.push(p);
            }
        }
    }
    Ok(out)
}

pub fn run(args: &SweepArgs, out: &mut dyn Write) -> CliResult<()> {
    // Evaluate everything first so a domain error leaves no partial table.
    let rows = points(args)?
        .into_iter()
        .map(|p| {
            let ev = evaluate(p.eta, p.eps, p.nbar, p.m, p.mu)?;
            Ok([
                fmt_num(p.eta),
                fmt_num(eta_to_db(p.eta)),
                fmt_num(p.nbar),
                fmt_num(p.m),
                fmt_num(p.eps),
                fmt_num(ev.breakdown.rate),
                fmt_opt(ev.plob),
                fmt_num(ev.breakdown.effective.k),
                fmt_opt(ev.i_ab()),
                fmt_opt(ev.holevo()),
            ])
        })
        .collect::<CliResult<Vec<_>>>()?;

    let mut w = csv_writer(out);
    w.write_record(HEADER)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
