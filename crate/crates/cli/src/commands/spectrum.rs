use std::path::Path;

use serde::{Deserialize, Serialize};
use speclab_core::spectral_mapping_check;

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::output::{fmt_f64, write_json, CsvOut};

/// Smallest ring the spectrum command accepts.
pub const MIN_SITES: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MappingSummary {
    pub sites: usize,
    pub lo: i64,
    /// Worst `dist(Re λ_U, σ(T))` over all of σ(U).
    pub max_defect: f64,
    /// The same over eigenvalues of U away from ±1, where every eigenvalue
    /// must be inherited from T.
    pub max_interior_defect: f64,
    /// Worst distance from a preimage `e^{±i arccos λ_T}` to σ(U).
    pub max_inverse_defect: f64,
    pub max_unit_deviation: f64,
    pub max_residual_t: f64,
    pub max_residual_u: f64,
    pub tolerance: f64,
    pub within_tolerance: bool,
}

pub fn run(cfg: &ExperimentConfig, out: &Path) -> CliResult<MappingSummary> {
    let sites = cfg.command_options.spectrum.sites.unwrap_or(cfg.window as usize);
    if sites < MIN_SITES {
        return Err(CliError::Config(format!(
            "spectrum needs a ring of at least {MIN_SITES} sites, got {sites}"
        )));
    }
    let (shift, coins) = cfg.build()?;
    let report = spectral_mapping_check(&shift, &coins, sites)?;

    let mut t_csv = CsvOut::create(&out.join("spectrum_T.csv"), &["eigenvalue", "edge_localized"])?;
    for (v, edge) in report.t.values.iter().zip(&report.t.edge_localized) {
        t_csv.row([fmt_f64(*v), edge.to_string()])?;
    }
    t_csv.finish()?;

    let mut u_csv = CsvOut::create(&out.join("spectrum_U.csv"), &["re", "im", "defect"])?;
    for (z, d) in report.u.values.iter().zip(&report.defects) {
        u_csv.row([fmt_f64(z.re), fmt_f64(z.im), fmt_f64(*d)])?;
    }
    u_csv.finish()?;

    let tol = cfg.tolerances.mapping_defect;
    let interior = report.max_inherited_defect();
    let summary = MappingSummary {
        sites,
        lo: report.window.lo(),
        max_defect: report.max_defect(),
        max_interior_defect: interior,
        max_inverse_defect: report.max_inverse_defect(),
        max_unit_deviation: report.u.max_unit_deviation(),
        max_residual_t: report.t.max_residual(),
        max_residual_u: report.u.max_residual(),
        tolerance: tol,
        within_tolerance: interior <= tol,
    };
    write_json(&out.join("mapping.json"), &summary)?;
    Ok(summary)
}
