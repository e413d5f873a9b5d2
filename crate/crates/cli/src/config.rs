//! The experiment configuration file.
//!
//! ```json
//! {
//!   "model": { "kind": "anisotropic", "epsilon": 0.3, "profile": { "kind": "step" } },
//!   "shift": { "p": 0.0, "q": [1.0, 0.0] },
//!   "window": 200,
//!   "time": 100,
//!   "initial": "birth:+",
//!   "command-options": { "birth": { "tail_start": 30 } },
//!   "tolerances": { "residual": 1e-8 }
//! }
//! ```
//!
//! Unknown keys are rejected everywhere. Numeric constraints are checked
//! again when the model is built, so a config that parses can still fail
//! with a config error.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use speclab_core::models::AnisotropicProfile;
use speclab_core::{
    anisotropic_coin, kitagawa_coin, AnisotropicSpec, CoinField, CoinSite, KitagawaSpec, ShiftParams, Sign, Spinor,
    State, Theta1Profile, Window,
};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    /// Required to be absent for `kitagawa`, where θ₂ fixes the shift.
    /// Defaults to p = 0, q = 1 otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<ShiftConfig>,
    /// Half-width N: simulations and birth vectors live on [−N, N], the
    /// spectrum ring has N sites.
    pub window: u32,
    #[serde(default)]
    pub time: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialConfig>,
    #[serde(rename = "command-options", default)]
    pub command_options: CommandOptions,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelConfig {
    Anisotropic {
        epsilon: f64,
        #[serde(default)]
        profile: ProfileConfig,
    },
    Kitagawa {
        theta2: f64,
        theta1: Theta1Config,
    },
    CustomTable {
        lo: i64,
        coins: Vec<CoinConfig>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        limit_minus: Option<CoinConfig>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        limit_plus: Option<CoinConfig>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ProfileConfig {
    #[default]
    Step,
    Linear {
        #[serde(default = "default_half_width")]
        half_width: i64,
    },
}

fn default_half_width() -> i64 {
    20
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Theta1Config {
    Constant {
        theta: f64,
    },
    Step {
        minus: f64,
        plus: f64,
    },
    Table {
        lo: i64,
        values: Vec<f64>,
        minus: f64,
        plus: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoinConfig {
    pub a: f64,
    /// `[re, im]`.
    pub b: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShiftConfig {
    pub p: f64,
    /// `[re, im]`; defaults to the real `√(1 − p²)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Complex64>,
}

/// Either `"birth:+"` / `"birth:-"` or a spinor at one site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialConfig {
    Named(String),
    Delta(DeltaInitial),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeltaInitial {
    pub site: i64,
    pub spinor: [Complex64; 2],
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommandOptions {
    #[serde(default)]
    pub spectrum: SpectrumOptions,
    #[serde(default)]
    pub birth: BirthCommandOptions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepOptions>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumOptions {
    /// Ring size; defaults to `window`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sites: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BirthCommandOptions {
    #[serde(default = "default_tail_start")]
    pub tail_start: i64,
    /// Where to start scanning sides without declared limits.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio_tail: Option<i64>,
}

fn default_tail_start() -> i64 {
    30
}

impl Default for BirthCommandOptions {
    fn default() -> Self {
        BirthCommandOptions {
            tail_start: default_tail_start(),
            ratio_tail: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepOptions {
    pub parameters: Vec<GridAxis>,
}

/// One sweep axis: explicit `values`, or `start`/`stop`/`step`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridAxis {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "defaults::classify_margin")]
    pub classify_margin: f64,
    #[serde(default = "defaults::max_tail_mass")]
    pub max_tail_mass: f64,
    /// Birth residual below which a vector counts as verified.
    #[serde(default = "defaults::residual")]
    pub residual: f64,
    /// Interior mapping defect below which the spectra count as matching.
    #[serde(default = "defaults::mapping_defect")]
    pub mapping_defect: f64,
}

mod defaults {
    pub fn classify_margin() -> f64 {
        1e-9
    }
    pub fn max_tail_mass() -> f64 {
        1e-10
    }
    pub fn residual() -> f64 {
        1e-8
    }
    pub fn mapping_defect() -> f64 {
        1e-9
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            classify_margin: defaults::classify_margin(),
            max_tail_mass: defaults::max_tail_mass(),
            residual: defaults::residual(),
            mapping_defect: defaults::mapping_defect(),
        }
    }
}

/// The resolved initial state of a simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Initial {
    Delta { site: i64, spinor: Spinor },
    Birth(Sign),
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Checks everything that does not need the model built.
    pub fn validate(&self) -> CliResult<()> {
        if self.window == 0 {
            return Err(CliError::Config("window must be positive".into()));
        }
        if matches!(self.model, ModelConfig::Kitagawa { .. }) && self.shift.is_some() {
            return Err(CliError::Config(
                "kitagawa fixes the shift through theta2; remove `shift`".into(),
            ));
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("classify_margin", t.classify_margin),
            ("max_tail_mass", t.max_tail_mass),
            ("residual", t.residual),
            ("mapping_defect", t.mapping_defect),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(CliError::Config(format!(
                    "tolerance {name} = {v} must be finite and nonnegative"
                )));
            }
        }
        if let Some(init) = &self.initial {
            self.resolve_initial(init)?;
        }
        self.shift_params()?;
        Ok(())
    }

    pub fn shift_params(&self) -> CliResult<ShiftParams> {
        match (&self.model, &self.shift) {
            (ModelConfig::Kitagawa { theta2, .. }, _) => Ok(speclab_core::models::kitagawa_shift(*theta2)?),
            (_, None) => Ok(ShiftParams::standard()),
            (_, Some(s)) => {
                let q =
                    s.q.unwrap_or_else(|| Complex64::new((1.0 - s.p * s.p).max(0.0).sqrt(), 0.0));
                Ok(ShiftParams::new(s.p, q)?)
            }
        }
    }

    /// Shift and coin field described by the config.
    pub fn build(&self) -> CliResult<(ShiftParams, CoinField)> {
        let shift = self.shift_params()?;
        let coins = match &self.model {
            ModelConfig::Anisotropic { epsilon, profile } => {
                let profile = match *profile {
                    ProfileConfig::Step => AnisotropicProfile::Step,
                    ProfileConfig::Linear { half_width } => AnisotropicProfile::Linear { half_width },
                };
                anisotropic_coin(&AnisotropicSpec {
                    epsilon: *epsilon,
                    profile,
                })?
            }
            ModelConfig::Kitagawa { theta2, theta1 } => {
                let theta1 = match theta1.clone() {
                    Theta1Config::Constant { theta } => Theta1Profile::Constant { theta },
                    Theta1Config::Step { minus, plus } => Theta1Profile::Step { minus, plus },
                    Theta1Config::Table {
                        lo,
                        values,
                        minus,
                        plus,
                    } => Theta1Profile::Table {
                        lo,
                        values,
                        minus,
                        plus,
                    },
                };
                kitagawa_coin(&KitagawaSpec {
                    theta2: *theta2,
                    theta1,
                })?
                .1
            }
            ModelConfig::CustomTable {
                lo,
                coins,
                limit_minus,
                limit_plus,
            } => {
                let site = |c: &CoinConfig| CoinSite::new(c.a, c.b);
                let table = coins.iter().map(site).collect::<Result<Vec<_>, _>>()?;
                let m = limit_minus.as_ref().map(site).transpose()?;
                let p = limit_plus.as_ref().map(site).transpose()?;
                CoinField::from_table(*lo, table)?.with_limits(m, p)
            }
        };
        Ok((shift, coins))
    }

    /// The window [−N, N].
    pub fn lattice_window(&self) -> Window {
        Window::centered(self.window)
    }

    pub fn initial(&self) -> CliResult<Initial> {
        match &self.initial {
            None => Err(CliError::Config("`initial` is required for simulate".into())),
            Some(init) => self.resolve_initial(init),
        }
    }

    fn resolve_initial(&self, init: &InitialConfig) -> CliResult<Initial> {
        match init {
            InitialConfig::Named(name) => match name.as_str() {
                "birth:+" => Ok(Initial::Birth(Sign::Plus)),
                "birth:-" | "birth:\u{2212}" => Ok(Initial::Birth(Sign::Minus)),
                other => Err(CliError::Config(format!(
                    "unknown initial state `{other}`; use \"birth:+\" or \"birth:-\""
                ))),
            },
            InitialConfig::Delta(d) => {
                let n = (d.spinor[0].norm_sqr() + d.spinor[1].norm_sqr()).sqrt();
                if !(n.is_finite() && n > 0.0) {
                    return Err(CliError::Config("initial spinor must be finite and nonzero".into()));
                }
                let s = Complex64::new(1.0 / n, 0.0);
                Ok(Initial::Delta {
                    site: d.site,
                    spinor: [d.spinor[0] * s, d.spinor[1] * s],
                })
            }
        }
    }
}

impl Initial {
    pub fn start_site(&self) -> i64 {
        match self {
            Initial::Delta { site, .. } => *site,
            Initial::Birth(_) => 0,
        }
    }

    pub fn delta_state(&self) -> Option<State> {
        match self {
            Initial::Delta { site, spinor } => Some(State::delta(*site, *spinor)),
            Initial::Birth(_) => None,
        }
    }
}
