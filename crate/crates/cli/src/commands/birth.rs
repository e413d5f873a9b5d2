use std::path::Path;

use serde::{Deserialize, Serialize};
use speclab_core::{birth_report, BirthOptions, BirthReport, DecayFit, SideRatios, Sign, Verdict};

use crate::config::ExperimentConfig;
use crate::error::CliResult;
use crate::output::{fmt_f64, write_json, CsvOut};

/// The JSON form of a birth report; the eigenvector itself goes to CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BirthSummary {
    pub sign: Sign,
    pub window: [i64; 2],
    pub ratios: SideRatios,
    /// Max of the per-side limsups.
    pub upper: f64,
    /// Min of the per-side liminfs.
    pub lower: f64,
    pub verdict: Verdict,
    pub residual: Option<f64>,
    /// `residual ≤ tolerances.residual`.
    pub verified: Option<bool>,
    pub decay: Option<DecayFit>,
    /// `(log β(+∞), −log β(−∞))` when both limits are declared.
    pub predicted_slopes: Option<[f64; 2]>,
    /// Fitted over predicted slope, per tail.
    pub slope_ratio: Option<[f64; 2]>,
}

pub(crate) fn options(cfg: &ExperimentConfig) -> BirthOptions {
    let o = cfg.command_options.birth;
    BirthOptions {
        window: cfg.lattice_window(),
        tail_start: o.tail_start,
        ratio_tail: o.ratio_tail,
        classify_margin: cfg.tolerances.classify_margin,
        max_tail_mass: cfg.tolerances.max_tail_mass,
    }
}

fn summarize(report: &BirthReport, cfg: &ExperimentConfig) -> BirthSummary {
    let w = cfg.lattice_window();
    let residual = report.residual.map(|r| r.value);
    let predicted = report.predicted_slopes().map(|(p, m)| [p, m]);
    let slope_ratio = match (report.decay, predicted) {
        (Some(d), Some([p, m])) => Some([d.slope_plus / p, d.slope_minus / m]),
        _ => None,
    };
    BirthSummary {
        sign: report.sign,
        window: [w.lo(), w.hi()],
        ratios: report.ratios,
        upper: report.upper,
        lower: report.lower,
        verdict: report.verdict,
        residual,
        verified: residual.map(|r| r <= cfg.tolerances.residual),
        decay: report.decay,
        predicted_slopes: predicted,
        slope_ratio,
    }
}

fn stem(sign: Sign) -> &'static str {
    match sign {
        Sign::Plus => "birth_plus",
        Sign::Minus => "birth_minus",
    }
}

/// Writes one JSON report per sign and a profile CSV for each nontrivial
/// sign. Returns the (plus, minus) summaries.
pub fn run(cfg: &ExperimentConfig, out: &Path) -> CliResult<[BirthSummary; 2]> {
    let (shift, coins) = cfg.build()?;
    let opts = options(cfg);
    let mut summaries = Vec::with_capacity(2);
    for sign in Sign::both() {
        let report = birth_report(&shift, &coins, sign, &opts)?;
        let summary = summarize(&report, cfg);
        write_json(&out.join(format!("{}.json", stem(sign))), &summary)?;
        if let Some(psi) = &report.eigenvector {
            let mut csv = CsvOut::create(
                &out.join(format!("{}.csv", stem(sign))),
                &["x", "norm_sqr", "log_norm_sqr"],
            )?;
            for (x, v) in psi.iter() {
                let n = v[0].norm_sqr() + v[1].norm_sqr();
                csv.row([x.to_string(), fmt_f64(n), fmt_f64(n.ln())])?;
            }
            csv.finish()?;
        }
        summaries.push(summary);
    }
    let minus = summaries.pop().expect("two signs");
    let plus = summaries.pop().expect("two signs");
    Ok([plus, minus])
}
