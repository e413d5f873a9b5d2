use std::path::Path;

use serde::{Deserialize, Serialize};
use speclab_core::walk::evolve_with;
use speclab_core::{birth_report, position_distribution, Sign, State, Verdict};

use crate::config::{ExperimentConfig, Initial};
use crate::error::{CliError, CliResult};
use crate::output::{fmt_f64, write_json, CsvOut};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateSummary {
    pub time: usize,
    pub start: i64,
    /// `‖Ψ₀‖²`.
    pub initial_norm: f64,
    /// `max_t |‖Ψ_t‖² − ‖Ψ₀‖²|`.
    pub max_norm_drift: f64,
    /// `max_{t,x} |P(X_t = x) − P(X_0 = x)|`; zero for a stationary state.
    pub max_distribution_drift: f64,
    /// `P(X_t = start)` for t = 0..=time.
    pub return_probability: Vec<f64>,
    /// `|⟨Ψ₀, Ψ_t⟩|² / ‖Ψ₀‖⁴` for t = 0..=time.
    pub overlap_probability: Vec<f64>,
}

pub(crate) fn initial_state(cfg: &ExperimentConfig, init: Initial) -> CliResult<State> {
    match init {
        Initial::Delta { .. } => Ok(init.delta_state().expect("delta")),
        Initial::Birth(sign) => birth_state(cfg, sign),
    }
}

fn birth_state(cfg: &ExperimentConfig, sign: Sign) -> CliResult<State> {
    let (shift, coins) = cfg.build()?;
    let opts = super::birth::options(cfg);
    let report = birth_report(&shift, &coins, sign, &opts)?;
    if report.verdict != Verdict::NontrivialDim1 {
        return Err(CliError::TrivialBirth(format!(
            "initial state birth:{} requested but the birth space is {:?} (B = {}, b = {})",
            sign.symbol(),
            report.verdict,
            report.upper,
            report.lower
        )));
    }
    Ok(report.eigenvector.expect("nontrivial reports carry a vector"))
}

pub fn run(cfg: &ExperimentConfig, out: &Path) -> CliResult<SimulateSummary> {
    let (shift, coins) = cfg.build()?;
    let init = cfg.initial()?;
    let psi0 = initial_state(cfg, init)?;
    let start = init.start_site();
    let p0 = position_distribution(&psi0);
    let n0 = psi0.norm_sqr();

    let mut csv = CsvOut::create(&out.join("distribution.csv"), &["t", "x", "probability"])?;
    let mut summary = SimulateSummary {
        time: cfg.time,
        start,
        initial_norm: n0,
        max_norm_drift: 0.0,
        max_distribution_drift: 0.0,
        return_probability: Vec::with_capacity(cfg.time + 1),
        overlap_probability: Vec::with_capacity(cfg.time + 1),
    };
    let mut failure = None;
    evolve_with(&shift, &coins, &psi0, cfg.time, |t, psi| {
        if failure.is_some() {
            return;
        }
        let dist = position_distribution(psi);
        for (x, p) in &dist {
            if let Err(e) = csv.row([t.to_string(), x.to_string(), fmt_f64(*p)]) {
                failure = Some(e);
                return;
            }
        }
        let drift = dist
            .iter()
            .map(|(x, p)| (p - p0.get(x).copied().unwrap_or(0.0)).abs())
            .chain(p0.iter().filter(|(x, _)| !dist.contains_key(x)).map(|(_, p)| *p))
            .fold(0.0, f64::max);
        summary.max_distribution_drift = summary.max_distribution_drift.max(drift);
        summary.max_norm_drift = summary.max_norm_drift.max((psi.norm_sqr() - n0).abs());
        summary
            .return_probability
            .push(dist.get(&start).copied().unwrap_or(0.0));
        summary.overlap_probability.push(psi0.inner(psi).norm_sqr() / (n0 * n0));
    });
    if let Some(e) = failure {
        return Err(e);
    }
    csv.finish()?;
    write_json(&out.join("summary.json"), &summary)?;
    Ok(summary)
}
