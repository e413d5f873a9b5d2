use std::path::Path;

use num_complex::Complex64;
use speclab_core::birth::{classify_with_margin, default_tail};
use speclab_core::{predict_anisotropic, predict_kitagawa, side_ratios, Error, Sign, Verdict};

use crate::config::{ExperimentConfig, GridAxis, ModelConfig, ShiftConfig, Theta1Config};
use crate::error::{CliError, CliResult};
use crate::output::{fmt_f64, CsvOut};

/// Grid values are rounded to this many decimals so that `start + i·step`
/// prints as the intended decimal.
const GRID_DECIMALS: i32 = 12;

/// Upper limit on the number of grid points.
const MAX_POINTS: usize = 1_000_000;

const NON_NUMERIC: &[&str] = &[
    "model",
    "kind",
    "profile",
    "theta1",
    "coins",
    "shift",
    "initial",
    "command-options",
    "tolerances",
    "q",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepSummary {
    pub points: usize,
    pub disagreements: usize,
    /// Points on a case boundary, where no prediction is made.
    pub excluded: usize,
}

fn round_grid(x: f64) -> f64 {
    let s = 10f64.powi(GRID_DECIMALS);
    (x * s).round() / s
}

pub fn axis_values(axis: &GridAxis) -> CliResult<Vec<f64>> {
    let err = |m: &str| CliError::Config(format!("sweep axis `{}`: {m}", axis.name));
    let values = match (&axis.values, axis.start, axis.stop, axis.step) {
        (Some(v), None, None, None) => v.clone(),
        (None, Some(start), Some(stop), Some(step)) => {
            if !(step > 0.0 && step.is_finite() && start.is_finite() && stop.is_finite()) {
                return Err(err("step must be positive and bounds finite"));
            }
            if stop < start {
                return Err(err("stop lies below start"));
            }
            let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
            if n > MAX_POINTS {
                return Err(err("too many points"));
            }
            (0..n).map(|i| round_grid(start + i as f64 * step)).collect()
        }
        _ => return Err(err("give either `values` or all of `start`, `stop`, `step`")),
    };
    if values.is_empty() {
        return Err(err("empty grid"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(err("non-finite value"));
    }
    Ok(values)
}

/// `cfg` with the numeric field `name` set to `value`.
pub fn with_parameter(cfg: &ExperimentConfig, name: &str, value: f64) -> CliResult<ExperimentConfig> {
    let mut out = cfg.clone();
    let set_p = |out: &mut ExperimentConfig| {
        let phase = cfg.shift.and_then(|s| s.q).map(|q| q.arg()).unwrap_or(0.0);
        let q = Complex64::from_polar((1.0 - value * value).max(0.0).sqrt(), phase);
        out.shift = Some(ShiftConfig { p: value, q: Some(q) });
    };
    let unknown = || {
        if NON_NUMERIC.contains(&name) {
            CliError::Config(format!("cannot sweep over `{name}`: not a numeric field"))
        } else {
            CliError::Config(format!("cannot sweep over `{name}`: no such parameter for this model"))
        }
    };
    match (&mut out.model, name) {
        (ModelConfig::Anisotropic { epsilon, .. }, "epsilon") => *epsilon = value,
        (ModelConfig::Anisotropic { .. } | ModelConfig::CustomTable { .. }, "p") => set_p(&mut out),
        (ModelConfig::Kitagawa { theta2, .. }, "theta2") => *theta2 = value,
        (
            ModelConfig::Kitagawa {
                theta1: Theta1Config::Constant { theta },
                ..
            },
            "theta1",
        ) => *theta = value,
        (
            ModelConfig::Kitagawa {
                theta1: Theta1Config::Step { minus, .. } | Theta1Config::Table { minus, .. },
                ..
            },
            "theta_minus",
        ) => *minus = value,
        (
            ModelConfig::Kitagawa {
                theta1: Theta1Config::Step { plus, .. } | Theta1Config::Table { plus, .. },
                ..
            },
            "theta_plus",
        ) => *plus = value,
        _ => return Err(unknown()),
    }
    Ok(out)
}

/// Cartesian product of the axes, first axis slowest.
fn grid(axes: &[Vec<f64>]) -> CliResult<Vec<Vec<f64>>> {
    let total = axes
        .iter()
        .try_fold(1usize, |acc, a| acc.checked_mul(a.len()).filter(|&n| n <= MAX_POINTS));
    let Some(total) = total else {
        return Err(CliError::Config("sweep grid has too many points".into()));
    };
    let mut points = Vec::with_capacity(total);
    for mut k in 0..total {
        let mut point = vec![0.0; axes.len()];
        for (i, axis) in axes.iter().enumerate().rev() {
            point[i] = axis[k % axis.len()];
            k /= axis.len();
        }
        points.push(point);
    }
    Ok(points)
}

/// Closed-form (plus, minus) prediction, `Ok(None)` when the model has no
/// predictor and `Err` text on a case boundary.
fn predict(cfg: &ExperimentConfig) -> CliResult<Option<Result<(Verdict, Verdict), String>>> {
    let result = match &cfg.model {
        ModelConfig::Anisotropic { epsilon, .. } => predict_anisotropic(*epsilon, cfg.shift_params()?.p()),
        ModelConfig::Kitagawa { theta2, theta1 } => {
            let (m, p) = match theta1 {
                Theta1Config::Constant { theta } => (*theta, *theta),
                Theta1Config::Step { minus, plus } | Theta1Config::Table { minus, plus, .. } => (*minus, *plus),
            };
            predict_kitagawa(m, p, *theta2)
        }
        ModelConfig::CustomTable { .. } => return Ok(None),
    };
    match result {
        Ok(v) => Ok(Some(Ok(v))),
        Err(e @ (Error::BoundaryCase(_) | Error::Degenerate(_))) => Ok(Some(Err(e.to_string()))),
        Err(e) => Err(e.into()),
    }
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::NontrivialDim1 => "NontrivialDim1",
        Verdict::Trivial => "Trivial",
        Verdict::Inconclusive => "Inconclusive",
    }
}

/// Writes `sweep.csv`. Fails with [`CliError::Disagreement`] after writing
/// if any point off a case boundary disagrees with its prediction.
pub fn run(cfg: &ExperimentConfig, out: &Path) -> CliResult<SweepSummary> {
    let Some(opts) = &cfg.command_options.sweep else {
        return Err(CliError::Config(
            "sweep needs `command-options.sweep.parameters`".into(),
        ));
    };
    if opts.parameters.is_empty() {
        return Err(CliError::Config("sweep grid is empty".into()));
    }
    let names: Vec<&str> = opts.parameters.iter().map(|a| a.name.as_str()).collect();
    for (i, n) in names.iter().enumerate() {
        if names[..i].contains(n) {
            return Err(CliError::Config(format!("sweep axis `{n}` given twice")));
        }
        with_parameter(cfg, n, 0.0)?;
    }
    let axes = opts.parameters.iter().map(axis_values).collect::<CliResult<Vec<_>>>()?;
    let points = grid(&axes)?;

    let mut header = vec!["index"];
    header.extend(&names);
    header.extend([
        "verdict_plus",
        "verdict_minus",
        "upper_plus",
        "lower_plus",
        "upper_minus",
        "lower_minus",
        "predicted_plus",
        "predicted_minus",
        "agree",
    ]);
    let mut csv = CsvOut::create(&out.join("sweep.csv"), &header)?;
    let mut summary = SweepSummary {
        points: points.len(),
        disagreements: 0,
        excluded: 0,
    };

    for (index, point) in points.iter().enumerate() {
        let mut here = cfg.clone();
        for (name, &v) in names.iter().zip(point) {
            here = with_parameter(&here, name, v)?;
        }
        let (shift, coins) = here.build()?;
        let tail = here
            .command_options
            .birth
            .ratio_tail
            .unwrap_or_else(|| default_tail(&coins));
        let mut found = Vec::with_capacity(2);
        for sign in Sign::both() {
            let r = side_ratios(&shift, &coins, sign, tail)?;
            found.push((
                classify_with_margin(&r, here.tolerances.classify_margin),
                r.upper(),
                r.lower(),
            ));
        }
        let (predicted, agree) = match predict(&here)? {
            None => (["none".to_string(), "none".to_string()], "n/a"),
            Some(Err(_)) => {
                summary.excluded += 1;
                (["boundary".to_string(), "boundary".to_string()], "excluded")
            }
            Some(Ok((pp, pm))) => {
                let ok = pp == found[0].0 && pm == found[1].0;
                if !ok {
                    summary.disagreements += 1;
                }
                (
                    [verdict_name(pp).to_string(), verdict_name(pm).to_string()],
                    if ok { "true" } else { "false" },
                )
            }
        };
        let mut row = vec![index.to_string()];
        row.extend(point.iter().map(|v| fmt_f64(*v)));
        row.extend([
            verdict_name(found[0].0).to_string(),
            verdict_name(found[1].0).to_string(),
            fmt_f64(found[0].1),
            fmt_f64(found[0].2),
            fmt_f64(found[1].1),
            fmt_f64(found[1].2),
        ]);
        row.extend(predicted);
        row.push(agree.to_string());
        csv.row(&row)?;
    }
    csv.finish()?;
    if summary.disagreements > 0 {
        return Err(CliError::Disagreement(summary.disagreements));
    }
    Ok(summary)
}
