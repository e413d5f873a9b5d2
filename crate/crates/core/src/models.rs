//! Ready-made coin families: the anisotropic (two-phase) walk and
//! Kitagawa's split-step walk, with closed-form predictions of their birth
//! verdicts.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::birth::{Sign, Verdict};
use crate::error::{Error, Result};
use crate::lattice::{c, CoinField, CoinSite, ShiftParams, Spinor};

/// How the anisotropic coin moves between its two limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum AnisotropicProfile {
    /// C(x) = C₋∞ for x ≤ 0 and C₊∞ for x > 0.
    Step,
    /// The angle of χ(x) interpolated linearly over |x| ≤ half_width.
    Linear { half_width: i64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnisotropicSpec {
    pub epsilon: f64,
    pub profile: AnisotropicProfile,
}

impl AnisotropicSpec {
    pub fn step(epsilon: f64) -> Self {
        AnisotropicSpec {
            epsilon,
            profile: AnisotropicProfile::Step,
        }
    }

    pub fn linear(epsilon: f64) -> Self {
        AnisotropicSpec {
            epsilon,
            profile: AnisotropicProfile::Linear { half_width: 20 },
        }
    }
}

/// `g(ε) = ε² / (1 − ε²)`.
pub fn g(epsilon: f64) -> f64 {
    epsilon * epsilon / (1.0 - epsilon * epsilon)
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon = {epsilon} must lie in (0, 1)"
        )));
    }
    Ok(())
}

/// χ₊∞ = (√(1−ε²), ε) as an angle from the first axis.
fn angle_plus(epsilon: f64) -> f64 {
    epsilon.asin()
}

/// χ₋∞ = (ε, √(1−ε²)).
fn angle_minus(epsilon: f64) -> f64 {
    epsilon.acos()
}

fn real_chi(angle: f64) -> Spinor {
    [c(angle.cos(), 0.0), c(angle.sin(), 0.0)]
}

/// The limit eigenvectors (χ₋∞, χ₊∞).
pub fn anisotropic_limit_chis(epsilon: f64) -> Result<(Spinor, Spinor)> {
    check_epsilon(epsilon)?;
    let s = (1.0 - epsilon * epsilon).sqrt();
    Ok(([c(epsilon, 0.0), c(s, 0.0)], [c(s, 0.0), c(epsilon, 0.0)]))
}

pub fn anisotropic_coin(spec: &AnisotropicSpec) -> Result<CoinField> {
    let eps = spec.epsilon;
    let (chi_minus, chi_plus) = anisotropic_limit_chis(eps)?;
    let field = match spec.profile {
        AnisotropicProfile::Step => CoinField::from_chis(0, &[chi_minus, chi_plus])?,
        AnisotropicProfile::Linear { half_width } => {
            if half_width < 1 {
                return Err(Error::InvalidParameter("half_width must be positive".into()));
            }
            let (am, ap) = (angle_minus(eps), angle_plus(eps));
            let chis: Vec<Spinor> = (-half_width..=half_width)
                .map(|x| {
                    let t = (x + half_width) as f64 / (2 * half_width) as f64;
                    real_chi(am + (ap - am) * t)
                })
                .collect();
            CoinField::from_chis(-half_width, &chis)?
        }
    };
    field.with_limit_chis(Some(chi_minus), Some(chi_plus))
}

/// Rotates χ(x) by the real angle `delta(x)` on the sites of `window`,
/// keeping the declared limits. With `delta → 0` at ±∞ this is a vanishing
/// perturbation of the coin.
pub fn rotate_chi(coins: &CoinField, window: crate::lattice::Window, delta: impl Fn(i64) -> f64) -> Result<CoinField> {
    let w = coins.table_window().union(&window);
    let chis: Vec<Spinor> = w
        .sites()
        .map(|x| {
            let v = coins.chi(x);
            let a = if window.contains(x) { delta(x) } else { 0.0 };
            let (s, co) = a.sin_cos();
            [v[0] * co - v[1] * s, v[0] * s + v[1] * co]
        })
        .collect();
    CoinField::from_chis(w.lo(), &chis)?.with_limit_chis(coins.limit_chi_minus(), coins.limit_chi_plus())
}

/// The ε below which both birth spaces of the anisotropic walk are
/// nontrivial: g(ε₀) = min{(1−p)/(1+p), (1+p)/(1−p)}.
pub fn epsilon0(p: f64) -> Result<f64> {
    if !(p.abs() < 1.0) {
        return Err(Error::InvalidParameter(format!("|p| = {} must be below 1", p.abs())));
    }
    let m = ((1.0 - p) / (1.0 + p)).min((1.0 + p) / (1.0 - p));
    Ok((m / (1.0 + m)).sqrt())
}

/// Predicted (B₊, B₋) verdicts for the anisotropic walk.
pub fn predict_anisotropic(epsilon: f64, p: f64) -> Result<(Verdict, Verdict)> {
    check_epsilon(epsilon)?;
    let e0 = epsilon0(p)?;
    if (epsilon - e0).abs() <= 1e-12 {
        return Err(Error::BoundaryCase(format!("epsilon = epsilon0(p) = {e0}")));
    }
    let v = if epsilon < e0 {
        Verdict::NontrivialDim1
    } else {
        Verdict::Trivial
    };
    Ok((v, v))
}

/// θ₁ over ℤ for Kitagawa's walk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Theta1Profile {
    Constant {
        theta: f64,
    },
    /// θ₁(x) = minus for x ≤ 0 and plus for x > 0.
    Step {
        minus: f64,
        plus: f64,
    },
    /// Tabulated from `lo`, with declared limits θ±∞.
    Table {
        lo: i64,
        values: Vec<f64>,
        minus: f64,
        plus: f64,
    },
}

impl Theta1Profile {
    fn limits(&self) -> (f64, f64) {
        match self {
            Theta1Profile::Constant { theta } => (*theta, *theta),
            Theta1Profile::Step { minus, plus } | Theta1Profile::Table { minus, plus, .. } => (*minus, *plus),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KitagawaSpec {
    pub theta2: f64,
    pub theta1: Theta1Profile,
}

const ANGLE_EPS: f64 = 1e-12;

fn kitagawa_site(theta: f64) -> Result<CoinSite> {
    if !(0.0..2.0 * PI).contains(&theta) {
        return Err(Error::InvalidParameter(format!(
            "theta1 = {theta} must lie in [0, 2pi)"
        )));
    }
    if (theta - PI).abs() <= ANGLE_EPS {
        return Err(Error::InvalidParameter("theta1 = pi makes b vanish".into()));
    }
    let h = theta / 2.0;
    CoinSite::new(-h.sin(), c(h.cos(), 0.0))
}

/// Shift parameters p = sin(θ₂/2), q = cos(θ₂/2).
pub fn kitagawa_shift(theta2: f64) -> Result<ShiftParams> {
    if !(-2.0 * PI..=2.0 * PI).contains(&theta2) {
        return Err(Error::InvalidParameter(format!(
            "theta2 = {theta2} must lie in [-2pi, 2pi]"
        )));
    }
    if (theta2.abs() - PI).abs() <= ANGLE_EPS {
        return Err(Error::InvalidParameter("theta2 = ±pi gives |p| = 1".into()));
    }
    let h = theta2 / 2.0;
    ShiftParams::new(h.sin(), c(h.cos(), 0.0))
}

pub fn kitagawa_coin(spec: &KitagawaSpec) -> Result<(ShiftParams, CoinField)> {
    let shift = kitagawa_shift(spec.theta2)?;
    let (minus, plus) = spec.theta1.limits();
    let (c_minus, c_plus) = (kitagawa_site(minus)?, kitagawa_site(plus)?);
    let field = match &spec.theta1 {
        Theta1Profile::Constant { .. } => CoinField::constant(c_minus),
        Theta1Profile::Step { .. } => {
            CoinField::from_table(0, vec![c_minus, c_plus])?.with_limits(Some(c_minus), Some(c_plus))
        }
        Theta1Profile::Table { lo, values, .. } => {
            let sites = values.iter().map(|&t| kitagawa_site(t)).collect::<Result<Vec<_>>>()?;
            CoinField::from_table(*lo, sites)?.with_limits(Some(c_minus), Some(c_plus))
        }
    };
    Ok((shift, field))
}

/// Case boundaries closer than this are refused by
/// [`predict_kitagawa`].
pub const KITAGAWA_BOUNDARY: f64 = 1e-6;

/// Predicted (B₊, B₋) verdicts for Kitagawa's walk with limits θ±∞.
///
/// With s± = sin(θ±∞/2): if s₋ < s₊ both spaces are trivial; if s₋ > s₊,
/// B± is one-dimensional exactly when ∓sin(θ₂/2) lies in (s₊, s₋).
pub fn predict_kitagawa(theta_minus: f64, theta_plus: f64, theta2: f64) -> Result<(Verdict, Verdict)> {
    let (s_minus, s_plus) = ((theta_minus / 2.0).sin(), (theta_plus / 2.0).sin());
    let s2 = (theta2 / 2.0).sin();
    if (s_minus - s_plus).abs() <= KITAGAWA_BOUNDARY {
        return Err(Error::Degenerate("sin(theta_-inf/2) = sin(theta_+inf/2)".into()));
    }
    if s_minus < s_plus {
        return Ok((Verdict::Trivial, Verdict::Trivial));
    }
    let verdict = |sign: Sign| -> Result<Verdict> {
        let w = -sign.value() * s2;
        if (w - s_plus).abs() <= KITAGAWA_BOUNDARY || (w - s_minus).abs() <= KITAGAWA_BOUNDARY {
            return Err(Error::BoundaryCase(format!(
                "∓sin(theta2/2) = {w} sits on an interval endpoint"
            )));
        }
        Ok(if s_plus < w && w < s_minus {
            Verdict::NontrivialDim1
        } else {
            Verdict::Trivial
        })
    };
    Ok((verdict(Sign::Plus)?, verdict(Sign::Minus)?))
}
