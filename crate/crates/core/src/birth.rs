//! Birth eigenspaces `B± = ker d ∩ ker(S ± 1)`.
//!
//! A vector of `ker(S ± 1)` has the form `Ψ = (−q/(p±1)·Lψ, ψ)` with
//! `(Lψ)(x) = ψ(x+1)`, and `dΨ = 0` turns into the first-order recursion
//!
//! ```text
//! ψ(x+1) = r(x) ψ(x),    r(x) = (p±1) χ̄₂(x) / (q χ̄₁(x)).
//! ```
//!
//! So B± is at most one-dimensional and is nontrivial exactly when the
//! solution seeded at ψ(0) = 1 is square summable. The ratio test on the two
//! tails gives the classification: `|r(x)|²` toward +∞ and `1/|r(x−1)|²`
//! toward −∞. Every nonzero Ψ ∈ B± satisfies CΨ = −Ψ and SΨ = ∓Ψ, hence
//! UΨ = ±Ψ.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{
    apply_c, apply_s, c, chi_of, d_apply, spinor_norm_sqr, CoinField, CoinSite, ShiftParams, Spinor, State, Window,
    CHI_EPS,
};
use crate::walk::step;

/// Which birth space: `+` is ker(S + 1) (eigenvalue +1 of U), `−` is
/// ker(S − 1) (eigenvalue −1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn both() -> [Sign; 2] {
        [Sign::Plus, Sign::Minus]
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    NontrivialDim1,
    Trivial,
    Inconclusive,
}

/// limsup / liminf of the squared recursion ratio on one side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SideBounds {
    pub limsup: f64,
    pub liminf: f64,
    /// True when taken from a declared limit coin (exact), false when
    /// estimated from a finite stretch of sites.
    pub exact: bool,
}

impl SideBounds {
    fn exact(value: f64) -> Self {
        SideBounds {
            limsup: value,
            liminf: value,
            exact: true,
        }
    }
}

/// Per-side classification constants: `minus` is `|qχ₁/((p±1)χ₂)|²` toward
/// −∞ and `plus` is `|(p±1)χ₂/(qχ₁)|²` toward +∞.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SideRatios {
    pub sign: Sign,
    pub minus: SideBounds,
    pub plus: SideBounds,
}

impl SideRatios {
    /// `max` of the per-side limsups.
    pub fn upper(&self) -> f64 {
        self.minus.limsup.max(self.plus.limsup)
    }

    /// `min` of the per-side liminfs.
    pub fn lower(&self) -> f64 {
        self.minus.liminf.min(self.plus.liminf)
    }
}

/// Sites scanned per side when a coin field has no declared limit.
pub const TAIL_SCAN: i64 = 64;

/// Margin used by [`classify`].
pub const CLASSIFY_MARGIN: f64 = 1e-9;

fn check_chi(chi: &Spinor, site: crate::error::SiteRef) -> Result<()> {
    if chi[0].norm() <= CHI_EPS || chi[1].norm() <= CHI_EPS {
        return Err(Error::ChiComponentVanishes(site));
    }
    Ok(())
}

fn plus_side(shift: &ShiftParams, sign: Sign, chi: &Spinor) -> f64 {
    let num = (shift.p() + sign.value()).powi(2) * chi[1].norm_sqr();
    num / (shift.q().norm_sqr() * chi[0].norm_sqr())
}

fn minus_side(shift: &ShiftParams, sign: Sign, chi: &Spinor) -> f64 {
    1.0 / plus_side(shift, sign, chi)
}

/// Classification constants of a coin field.
///
/// A side with a declared limit coin is evaluated exactly from that coin.
/// Otherwise limsup and liminf are approximated by max and min over the
/// sites with `|x| ∈ [tail, tail + 64]` on that side.
pub fn side_ratios(shift: &ShiftParams, coins: &CoinField, sign: Sign, tail: i64) -> Result<SideRatios> {
    coins.check_chi_nonvanishing()?;
    let scan = |sites: &mut dyn Iterator<Item = i64>, f: &dyn Fn(&Spinor) -> f64| -> Result<SideBounds> {
        let mut hi = f64::NEG_INFINITY;
        let mut lo = f64::INFINITY;
        for x in sites {
            let chi = coins.chi(x);
            check_chi(&chi, crate::error::SiteRef::Site(x))?;
            let v = f(&chi);
            hi = hi.max(v);
            lo = lo.min(v);
        }
        Ok(SideBounds {
            limsup: hi,
            liminf: lo,
            exact: false,
        })
    };
    let tail = tail.max(0);
    let minus = match coins.limit_chi_minus() {
        Some(chi) => SideBounds::exact(minus_side(shift, sign, &chi)),
        None => scan(&mut (-(tail + TAIL_SCAN)..=-tail), &|chi| minus_side(shift, sign, chi))?,
    };
    let plus = match coins.limit_chi_plus() {
        Some(chi) => SideBounds::exact(plus_side(shift, sign, &chi)),
        None => scan(&mut (tail..=tail + TAIL_SCAN), &|chi| plus_side(shift, sign, chi))?,
    };
    Ok(SideRatios { sign, minus, plus })
}

/// Exact side values from the two limit coins.
pub fn beta_constants(shift: &ShiftParams, c_minus: &CoinSite, c_plus: &CoinSite, sign: Sign) -> Result<SideRatios> {
    let (chi_m, chi_p) = (chi_of(c_minus), chi_of(c_plus));
    check_chi(&chi_m, crate::error::SiteRef::MinusInfinity)?;
    check_chi(&chi_p, crate::error::SiteRef::PlusInfinity)?;
    Ok(SideRatios {
        sign,
        minus: SideBounds::exact(minus_side(shift, sign, &chi_m)),
        plus: SideBounds::exact(plus_side(shift, sign, &chi_p)),
    })
}

pub fn classify(ratios: &SideRatios) -> Verdict {
    classify_with_margin(ratios, CLASSIFY_MARGIN)
}

/// Nontrivial when both limsups are below 1; trivial as soon as either
/// side's liminf exceeds 1, because then ψ grows without bound on that tail.
pub fn classify_with_margin(ratios: &SideRatios, margin: f64) -> Verdict {
    if ratios.upper() < 1.0 - margin {
        Verdict::NontrivialDim1
    } else if ratios.minus.liminf.max(ratios.plus.liminf) > 1.0 + margin {
        Verdict::Trivial
    } else {
        Verdict::Inconclusive
    }
}

/// Default scan start for fields without declared limits: just past the
/// table, where the fill rule takes over.
pub fn default_tail(coins: &CoinField) -> i64 {
    let w = coins.table_window();
    w.lo().abs().max(w.hi().abs()) + 1
}

/// Maximum estimated mass outside the window for a constructed eigenvector.
pub const MAX_TAIL_MASS: f64 = 1e-10;

/// `r(x) = (p±1) χ̄₂(x) / (q χ̄₁(x))`.
fn ratio(shift: &ShiftParams, sign: Sign, chi: &Spinor) -> Complex64 {
    c(shift.p() + sign.value(), 0.0) * chi[1].conj() / (shift.q() * chi[0].conj())
}

/// Builds the birth eigenvector on `window` by running the recursion from
/// ψ(0) = 1 in both directions. Returned with unit norm.
pub fn construct_eigenvector(shift: &ShiftParams, coins: &CoinField, sign: Sign, window: Window) -> Result<State> {
    construct_eigenvector_with(shift, coins, sign, window, 1.0, MAX_TAIL_MASS)
}

/// As [`construct_eigenvector`] with an explicit seed ψ(0) and tail-mass
/// tolerance.
pub fn construct_eigenvector_with(
    shift: &ShiftParams,
    coins: &CoinField,
    sign: Sign,
    window: Window,
    seed: f64,
    max_tail_mass: f64,
) -> Result<State> {
    let ratios = side_ratios(shift, coins, sign, default_tail(coins))?;
    let verdict = classify(&ratios);
    if verdict != Verdict::NontrivialDim1 {
        return Err(Error::BirthNotNontrivial(verdict));
    }
    if !window.contains(0) {
        return Err(Error::InvalidParameter(
            "the window must contain the seed site 0".into(),
        ));
    }
    for x in window.grow(1).sites() {
        check_chi(&coins.chi(x), crate::error::SiteRef::Site(x))?;
    }

    // ψ on [lo, hi + 1]; Ψ₁(x) needs ψ(x + 1).
    let lo = window.lo();
    let hi = window.hi() + 1;
    let mut psi = vec![c(0.0, 0.0); (hi - lo + 1) as usize];
    let at = |x: i64| (x - lo) as usize;
    psi[at(0)] = c(seed, 0.0);
    for x in 0..hi {
        psi[at(x + 1)] = ratio(shift, sign, &coins.chi(x)) * psi[at(x)];
    }
    for x in (lo + 1..=0).rev() {
        psi[at(x - 1)] = psi[at(x)] / ratio(shift, sign, &coins.chi(x - 1));
    }

    let lift = -shift.q() / (shift.p() + sign.value());
    let state = State::from_fn(window, |x| [lift * psi[at(x + 1)], psi[at(x)]]);
    let total = state.norm_sqr();
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::WindowTooSmall(f64::INFINITY));
    }

    // Mass beyond the window, extrapolating each edge geometrically.
    let geometric = |edge: f64, q: f64| if q < 1.0 { edge * q / (1.0 - q) } else { f64::INFINITY };
    let missing = geometric(spinor_norm_sqr(&state.get(window.lo())), ratios.minus.limsup)
        + geometric(spinor_norm_sqr(&state.get(window.hi())), ratios.plus.limsup);
    let tail_mass = missing / total;
    if tail_mass > max_tail_mass {
        return Err(Error::WindowTooSmall(tail_mass));
    }
    Ok(state.normalized())
}

/// Membership residual of a candidate birth vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    /// `max(‖dΨ‖, ‖(S ± 1)Ψ‖, ‖UΨ ∓ Ψ‖) / ‖Ψ‖` on the window interior.
    pub value: f64,
    /// Set for the zero state, whose residual is reported as +∞.
    pub zero_state: bool,
}

/// Sites dropped at each window edge by [`verify_eigenvector`].
pub const VERIFY_EDGE: i64 = 2;

pub fn verify_eigenvector(shift: &ShiftParams, coins: &CoinField, psi: &State, sign: Sign) -> Residual {
    let norm = psi.norm();
    if norm == 0.0 {
        return Residual {
            value: f64::INFINITY,
            zero_state: true,
        };
    }
    let Some(interior) = psi.window().shrink(VERIFY_EDGE) else {
        return Residual {
            value: f64::INFINITY,
            zero_state: false,
        };
    };
    let s = c(sign.value(), 0.0);
    let d_res = d_apply(coins, psi).norm_sqr_on(interior).sqrt();
    let s_res = apply_s(shift, psi).add_scaled(s, psi).norm_sqr_on(interior).sqrt();
    let u_res = step(shift, coins, psi).add_scaled(-s, psi).norm_sqr_on(interior).sqrt();
    Residual {
        value: d_res.max(s_res).max(u_res) / norm,
        zero_state: false,
    }
}

/// `‖UΨ − λΨ‖ / ‖Ψ‖` on the interior, for checking the eigenvalue alone.
pub fn eigen_residual(shift: &ShiftParams, coins: &CoinField, psi: &State, eigenvalue: Complex64) -> f64 {
    let interior = psi.window().shrink(VERIFY_EDGE).unwrap_or(psi.window());
    let u = apply_s(shift, &apply_c(coins, psi));
    u.add_scaled(-eigenvalue, psi).norm_sqr_on(interior).sqrt() / psi.norm()
}

/// Least-squares fits of `log ‖Ψ(x)‖²` against x on both tails.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub slope_plus: f64,
    pub slope_minus: f64,
    pub r2_plus: f64,
    pub r2_minus: f64,
    pub tail_start: i64,
}

/// Sites skipped at each window edge by [`decay_fit`].
pub const FIT_EDGE: i64 = 5;
const MIN_FIT_POINTS: usize = 8;

fn least_squares(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let ss_res: f64 = points.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum();
    let r2 = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    (slope, r2)
}

/// Fits the + tail on `[tail_start, x_max − 5]` and the − tail on
/// `[x_min + 5, −tail_start]`.
pub fn decay_fit(psi: &State, tail_start: i64) -> Result<DecayFit> {
    let w = psi.window();
    let collect = |from: i64, to: i64| -> Result<Vec<(f64, f64)>> {
        let n = (to - from + 1).max(0) as usize;
        if n < MIN_FIT_POINTS {
            return Err(Error::TooFewPoints(n));
        }
        (from..=to)
            .map(|x| {
                let m = spinor_norm_sqr(&psi.get(x));
                if m > 0.0 {
                    Ok((x as f64, m.ln()))
                } else {
                    Err(Error::ZeroAmplitude(x))
                }
            })
            .collect()
    };
    let plus = collect(tail_start, w.hi() - FIT_EDGE)?;
    let minus = collect(w.lo() + FIT_EDGE, -tail_start)?;
    let (slope_plus, r2_plus) = least_squares(&plus);
    let (slope_minus, r2_minus) = least_squares(&minus);
    Ok(DecayFit {
        slope_plus,
        slope_minus,
        r2_plus,
        r2_minus,
        tail_start,
    })
}

/// Knobs for [`birth_report`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BirthOptions {
    pub window: Window,
    /// First |x| used by the decay fit.
    pub tail_start: i64,
    /// Start of the scan for sides without declared limits; `None` uses
    /// [`default_tail`].
    pub ratio_tail: Option<i64>,
    pub classify_margin: f64,
    pub max_tail_mass: f64,
}

impl BirthOptions {
    pub fn new(window: Window) -> Self {
        BirthOptions {
            window,
            tail_start: 30,
            ratio_tail: None,
            classify_margin: CLASSIFY_MARGIN,
            max_tail_mass: MAX_TAIL_MASS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BirthReport {
    pub sign: Sign,
    pub ratios: SideRatios,
    /// Max of the per-side limsups.
    pub upper: f64,
    /// Min of the per-side liminfs (the two-sided triviality constant).
    pub lower: f64,
    pub verdict: Verdict,
    pub eigenvector: Option<State>,
    pub residual: Option<Residual>,
    pub decay: Option<DecayFit>,
}

impl BirthReport {
    /// Slopes of log‖Ψ(x)‖² implied by exact side constants:
    /// `(log β(+∞), −log β(−∞))`.
    pub fn predicted_slopes(&self) -> Option<(f64, f64)> {
        let r = &self.ratios;
        (r.plus.exact && r.minus.exact).then(|| (r.plus.limsup.ln(), -r.minus.limsup.ln()))
    }
}

/// Classification, and for a nontrivial birth space also the eigenvector,
/// its residual and its decay fit.
pub fn birth_report(shift: &ShiftParams, coins: &CoinField, sign: Sign, opts: &BirthOptions) -> Result<BirthReport> {
    let tail = opts.ratio_tail.unwrap_or_else(|| default_tail(coins));
    let ratios = side_ratios(shift, coins, sign, tail)?;
    let verdict = classify_with_margin(&ratios, opts.classify_margin);
    let mut report = BirthReport {
        sign,
        ratios,
        upper: ratios.upper(),
        lower: ratios.lower(),
        verdict,
        eigenvector: None,
        residual: None,
        decay: None,
    };
    if verdict == Verdict::NontrivialDim1 {
        let psi = construct_eigenvector_with(shift, coins, sign, opts.window, 1.0, opts.max_tail_mass)?;
        report.residual = Some(verify_eigenvector(shift, coins, &psi, sign));
        report.decay = decay_fit(&psi, opts.tail_start).ok();
        report.eigenvector = Some(psi);
    }
    Ok(report)
}

/// Reports for a coin field and a perturbation of it with the same limits.
#[derive(Debug, Clone, PartialEq)]
pub struct RobustnessComparison {
    pub unperturbed: BirthReport,
    pub perturbed: BirthReport,
}

/// Relative tolerance on decay slopes in [`RobustnessComparison::consistent`].
pub const SLOPE_AGREEMENT: f64 = 0.05;

impl RobustnessComparison {
    pub fn verdicts_agree(&self) -> bool {
        self.unperturbed.verdict == self.perturbed.verdict
    }

    /// Relative differences of the (plus, minus) decay slopes, when both
    /// reports carry a fit.
    pub fn slope_differences(&self) -> Option<(f64, f64)> {
        let (a, b) = (self.unperturbed.decay?, self.perturbed.decay?);
        let rel = |x: f64, y: f64| (x - y).abs() / x.abs().max(y.abs());
        Some((rel(a.slope_plus, b.slope_plus), rel(a.slope_minus, b.slope_minus)))
    }

    /// Same verdict, and decay slopes within 5% when nontrivial.
    pub fn consistent(&self) -> bool {
        if !self.verdicts_agree() {
            return false;
        }
        if self.unperturbed.verdict != Verdict::NontrivialDim1 {
            return true;
        }
        matches!(self.slope_differences(), Some((a, b)) if a <= SLOPE_AGREEMENT && b <= SLOPE_AGREEMENT)
    }
}

fn same_coin(a: Option<CoinSite>, b: Option<CoinSite>) -> bool {
    match (a, b) {
        (Some(a), Some(b)) => (a.a() - b.a()).abs() <= 1e-12 && (a.b() - b.b()).norm() <= 1e-12,
        _ => false,
    }
}

/// Runs [`birth_report`] on both fields. Both must declare the same limit
/// coins.
pub fn robustness_compare(
    shift: &ShiftParams,
    coins: &CoinField,
    coins_perturbed: &CoinField,
    sign: Sign,
    opts: &BirthOptions,
) -> Result<RobustnessComparison> {
    if !same_coin(coins.limit_minus(), coins_perturbed.limit_minus())
        || !same_coin(coins.limit_plus(), coins_perturbed.limit_plus())
    {
        return Err(Error::NotVanishingPerturbation);
    }
    Ok(RobustnessComparison {
        unperturbed: birth_report(shift, coins, sign, opts)?,
        perturbed: birth_report(shift, coins_perturbed, sign, opts)?,
    })
}
