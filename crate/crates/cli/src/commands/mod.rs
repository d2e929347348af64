pub mod rate;
pub mod simulate;
pub mod sweep;
pub mod threshold;
pub mod verify;

use cvqkd_core::{
    key_rate_asymptotic, key_rate_finite, plob_bound, ChannelParams, Error as CoreError,
    KeyRateBreakdown, SideChannelParams,
};

use crate::error::{usage, CliResult};

/// One key-rate evaluation, asymptotic unless `mu` is given.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub breakdown: KeyRateBreakdown,
    pub finite: bool,
    pub plob: Option<f64>,
}

impl Evaluation {
    pub fn i_ab(&self) -> Option<f64> {
        self.finite.then_some(self.breakdown.i_ab)
    }

    pub fn holevo(&self) -> Option<f64> {
        self.finite.then_some(self.breakdown.holevo_eb)
    }
}

pub fn evaluate(eta: f64, eps: f64, nbar: f64, m: f64, mu: Option<f64>) -> CliResult<Evaluation> {
    let ch = ChannelParams::new(eta, eps)?;
    let sc = SideChannelParams::new(nbar, m)?;
    let breakdown = match mu {
        Some(mu) => key_rate_finite(&ch, mu, &sc)?,
        // The asymptotic rate does not depend on mu.
        None => key_rate_asymptotic(&ch, 1.0, &sc)?,
    };
    let plob = match plob_bound(eta) {
        Ok(p) => Some(p),
        Err(CoreError::InfiniteCapacity { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    Ok(Evaluation {
        breakdown,
        finite: mu.is_some(),
        plob,
    })
}

/// CSV number format: 17 significant digits, always round-trips.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_num).unwrap_or_default()
}

pub fn csv_writer<W: std::io::Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

/// `steps` points from `start` to `stop` inclusive.
pub fn grid(start: f64, stop: f64, steps: usize, log: bool) -> CliResult<Vec<f64>> {
    if !start.is_finite() || !stop.is_finite() {
        return Err(usage("grid endpoints must be finite"));
    }
    if !(start < stop) {
        return Err(usage(format!(
            "grid needs start < stop, got {start} and {stop}"
        )));
    }
    if steps < 2 {
        return Err(usage(format!("grid needs at least 2 steps, got {steps}")));
    }
    if log && !(start > 0.0) {
        return Err(usage("log grid needs positive endpoints"));
    }
    let last = (steps - 1) as f64;
    let (a, b) = if log {
        (start.ln(), stop.ln())
    } else {
        (start, stop)
    };
    Ok((0..steps)
        .map(|i| {
            if i == 0 {
                start
            } else if i == steps - 1 {
                stop
            } else {
                let x = a + (b - a) * i as f64 / last;
                if log {
                    x.exp()
                } else {
                    x
                }
            }
        })
        .collect())
}
