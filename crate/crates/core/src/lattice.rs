//! States on ℤ, the shift and coin parameters, and the elementary operators
//! S, C, d and d* of a split-step walk.
//!
//! The Hilbert space is ℓ²(ℤ; ℂ²). Every vector used here is finitely
//! supported and stored densely on an integer [`Window`]; sites outside the
//! window are zero. The shift
//!
//! ```text
//! (SΨ)(x) = ( p Ψ₁(x) + q Ψ₂(x+1) ,  q̄ Ψ₁(x−1) − p Ψ₂(x) )
//! ```
//!
//! and the coin `(CΨ)(x) = C(x)Ψ(x)` are both unitary involutions. The
//! boundary operator `(dΨ)(x) = ⟨χ(x), Ψ(x)⟩` is built from the normalized
//! +1-eigenvector χ(x) of each coin matrix and satisfies `d d* = 1` and
//! `C = 2 d* d − 1`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, SiteRef};

/// A vector in ℂ².
pub type Spinor = [Complex64; 2];

/// A 2×2 complex matrix, row major.
pub type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Below this magnitude a chi component counts as zero.
pub const CHI_EPS: f64 = 1e-12;

/// Sites at the edge of a state with norm below this are dropped by
/// [`State::compact`].
pub const COMPACTION_THRESHOLD: f64 = 1e-300;

pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn spinor_norm_sqr(v: &Spinor) -> f64 {
    v[0].norm_sqr() + v[1].norm_sqr()
}

/// ⟨u, v⟩, conjugate-linear in the first slot.
pub fn spinor_inner(u: &Spinor, v: &Spinor) -> Complex64 {
    u[0].conj() * v[0] + u[1].conj() * v[1]
}

pub fn mat2_apply(m: &Mat2, v: &Spinor) -> Spinor {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

/// A nonempty inclusive integer interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    lo: i64,
    hi: i64,
}

impl Window {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidWindow { lo, hi });
        }
        Ok(Window { lo, hi })
    }

    /// `[-half, half]`.
    pub fn centered(half: u32) -> Self {
        let h = i64::from(half);
        Window { lo: -h, hi: h }
    }

    /// `n` consecutive sites starting at `lo`.
    pub fn with_len(lo: i64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidWindow { lo, hi: lo - 1 });
        }
        Ok(Window {
            lo,
            hi: lo + n as i64 - 1,
        })
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, x: i64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Position of `x` inside the window.
    pub fn index(&self, x: i64) -> Option<usize> {
        self.contains(x).then(|| (x - self.lo) as usize)
    }

    pub fn sites(&self) -> std::ops::RangeInclusive<i64> {
        self.lo..=self.hi
    }

    pub fn grow(&self, by: i64) -> Self {
        Window {
            lo: self.lo - by,
            hi: self.hi + by,
        }
    }

    /// Shrinks by `by` on each side, `None` if nothing is left.
    pub fn shrink(&self, by: i64) -> Option<Self> {
        Window::new(self.lo + by, self.hi - by).ok()
    }

    pub fn union(&self, other: &Window) -> Window {
        Window {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }
}

/// The pair (p, q) defining the shift, with p² + |q|² = 1 and |p| < 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ShiftParamsRepr", into = "ShiftParamsRepr")]
pub struct ShiftParams {
    p: f64,
    q: Complex64,
}

#[derive(Serialize, Deserialize)]
struct ShiftParamsRepr {
    p: f64,
    q: Complex64,
}

impl TryFrom<ShiftParamsRepr> for ShiftParams {
    type Error = Error;

    fn try_from(r: ShiftParamsRepr) -> Result<Self> {
        ShiftParams::new(r.p, r.q)
    }
}

impl From<ShiftParams> for ShiftParamsRepr {
    fn from(s: ShiftParams) -> Self {
        ShiftParamsRepr { p: s.p, q: s.q }
    }
}

impl ShiftParams {
    /// Normalizes (p, q) onto the unit sphere. Inputs must already be close
    /// to normalized; |p| = 1 makes the walk static and is rejected.
    pub fn new(p: f64, q: Complex64) -> Result<Self> {
        if !p.is_finite() || !q.re.is_finite() || !q.im.is_finite() {
            return Err(Error::InvalidShift("non-finite entries".into()));
        }
        let n2 = p * p + q.norm_sqr();
        if (n2 - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidShift(format!("p^2 + |q|^2 = {n2}, expected 1")));
        }
        let n = n2.sqrt();
        let (p, q) = (p / n, q / n);
        if p.abs() >= 1.0 - 1e-12 {
            return Err(Error::InvalidShift(format!("|p| = {} must be below 1", p.abs())));
        }
        Ok(ShiftParams { p, q })
    }

    /// Real q = sqrt(1 - p²).
    pub fn from_p(p: f64) -> Result<Self> {
        if !(p.abs() < 1.0) {
            return Err(Error::InvalidShift(format!("|p| = {} must be below 1", p.abs())));
        }
        ShiftParams::new(p, c((1.0 - p * p).sqrt(), 0.0))
    }

    /// p = 0, q = 1: the standard (Ambainis-type) walk.
    pub fn standard() -> Self {
        ShiftParams { p: 0.0, q: ONE }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> Complex64 {
        self.q
    }
}

/// A single coin matrix `[[a, b], [b̄, −a]]` with a real and a² + |b|² = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CoinSiteRepr", into = "CoinSiteRepr")]
pub struct CoinSite {
    a: f64,
    b: Complex64,
}

#[derive(Serialize, Deserialize)]
struct CoinSiteRepr {
    a: f64,
    b: Complex64,
}

impl TryFrom<CoinSiteRepr> for CoinSite {
    type Error = Error;

    fn try_from(r: CoinSiteRepr) -> Result<Self> {
        CoinSite::new(r.a, r.b)
    }
}

impl From<CoinSite> for CoinSiteRepr {
    fn from(s: CoinSite) -> Self {
        CoinSiteRepr { a: s.a, b: s.b }
    }
}

impl CoinSite {
    pub fn new(a: f64, b: Complex64) -> Result<Self> {
        if !a.is_finite() || !b.re.is_finite() || !b.im.is_finite() {
            return Err(Error::InvalidCoin("non-finite entries".into()));
        }
        let n2 = a * a + b.norm_sqr();
        if (n2 - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidCoin(format!("a^2 + |b|^2 = {n2}, expected 1")));
        }
        let n = n2.sqrt();
        Ok(CoinSite { a: a / n, b: b / n })
    }

    /// σ₁, the coin with a = 0, b = 1.
    pub fn sigma1() -> Self {
        CoinSite { a: 0.0, b: ONE }
    }

    /// The coin `2|χ⟩⟨χ| − 1` for a (not necessarily normalized) nonzero χ.
    pub fn from_chi(chi: &Spinor) -> Result<Self> {
        let n2 = spinor_norm_sqr(chi);
        if !(n2 > 0.0) || !n2.is_finite() {
            return Err(Error::InvalidCoin("chi must be a nonzero finite vector".into()));
        }
        let a = (chi[0].norm_sqr() - chi[1].norm_sqr()) / n2;
        let b = 2.0 * chi[0] * chi[1].conj() / n2;
        CoinSite::new(a, b)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    pub fn matrix(&self) -> Mat2 {
        [[c(self.a, 0.0), self.b], [self.b.conj(), c(-self.a, 0.0)]]
    }

    pub fn apply(&self, v: &Spinor) -> Spinor {
        [self.a * v[0] + self.b * v[1], self.b.conj() * v[0] - self.a * v[1]]
    }
}

/// The normalized +1-eigenvector of a coin.
///
/// Phase convention: χ ∝ (b, 1 − a) when a ≠ 1, and χ = (1, 0) when a = 1.
/// For a > 0 the equivalent form (1 + a, b̄)·b/|b| is used to avoid the
/// cancellation in 1 − a.
pub fn chi_of(coin: &CoinSite) -> Spinor {
    let (a, b) = (coin.a, coin.b);
    if a <= 0.0 {
        let v = [b, c(1.0 - a, 0.0)];
        let n = spinor_norm_sqr(&v).sqrt();
        [v[0] / n, v[1] / n]
    } else if b.norm() == 0.0 {
        [ONE, ZERO]
    } else {
        let phase = b / b.norm();
        let v = [c(1.0 + a, 0.0), b.conj()];
        let n = spinor_norm_sqr(&v).sqrt();
        [v[0] * phase / n, v[1] * phase / n]
    }
}

/// A coin for every site of ℤ.
///
/// Stored as a table over a window plus fill rules: left of the table the
/// coin is the declared `limit_minus` (or the first tabulated coin if none is
/// declared), right of it `limit_plus` (or the last tabulated coin).
///
/// The +1-eigenvector χ is stored alongside each coin. Fields built with
/// [`CoinField::from_chis`] keep the caller's χ including its phase; all
/// other constructors use [`chi_of`].
#[derive(Debug, Clone, PartialEq)]
pub struct CoinField {
    window: Window,
    coins: Vec<CoinSite>,
    chis: Vec<Spinor>,
    limit_minus: Option<(CoinSite, Spinor)>,
    limit_plus: Option<(CoinSite, Spinor)>,
}

fn normalized(chi: &Spinor) -> Result<Spinor> {
    let n = spinor_norm_sqr(chi).sqrt();
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::InvalidCoin("chi must be a nonzero finite vector".into()));
    }
    Ok([chi[0] / n, chi[1] / n])
}

impl CoinField {
    /// The same coin everywhere, declared as both limits.
    pub fn constant(coin: CoinSite) -> Self {
        let chi = chi_of(&coin);
        CoinField {
            window: Window { lo: 0, hi: 0 },
            coins: vec![coin],
            chis: vec![chi],
            limit_minus: Some((coin, chi)),
            limit_plus: Some((coin, chi)),
        }
    }

    /// Coins tabulated from `lo` onwards, no declared limits.
    pub fn from_table(lo: i64, coins: Vec<CoinSite>) -> Result<Self> {
        let window = Window::with_len(lo, coins.len())?;
        let chis = coins.iter().map(chi_of).collect();
        Ok(CoinField {
            window,
            coins,
            chis,
            limit_minus: None,
            limit_plus: None,
        })
    }

    /// Coins `2|χ(x)⟩⟨χ(x)| − 1` from eigenvectors tabulated from `lo`.
    /// The vectors are normalized but their phases are kept.
    pub fn from_chis(lo: i64, chis: &[Spinor]) -> Result<Self> {
        let window = Window::with_len(lo, chis.len())?;
        let chis = chis.iter().map(normalized).collect::<Result<Vec<_>>>()?;
        let coins = chis.iter().map(CoinSite::from_chi).collect::<Result<Vec<_>>>()?;
        Ok(CoinField {
            window,
            coins,
            chis,
            limit_minus: None,
            limit_plus: None,
        })
    }

    pub fn with_limits(mut self, minus: Option<CoinSite>, plus: Option<CoinSite>) -> Self {
        self.limit_minus = minus.map(|c| (c, chi_of(&c)));
        self.limit_plus = plus.map(|c| (c, chi_of(&c)));
        self
    }

    /// Declares limits through their eigenvectors, keeping the given phases.
    pub fn with_limit_chis(mut self, minus: Option<Spinor>, plus: Option<Spinor>) -> Result<Self> {
        let lift = |chi: Option<Spinor>| -> Result<Option<(CoinSite, Spinor)>> {
            chi.map(|v| {
                let v = normalized(&v)?;
                Ok((CoinSite::from_chi(&v)?, v))
            })
            .transpose()
        };
        self.limit_minus = lift(minus)?;
        self.limit_plus = lift(plus)?;
        Ok(self)
    }

    /// Window of explicitly tabulated sites.
    pub fn table_window(&self) -> Window {
        self.window
    }

    pub fn tabulated(&self) -> impl Iterator<Item = (i64, &CoinSite, &Spinor)> {
        self.window
            .sites()
            .zip(self.coins.iter().zip(self.chis.iter()))
            .map(|(x, (c, v))| (x, c, v))
    }

    pub fn limit_minus(&self) -> Option<CoinSite> {
        self.limit_minus.map(|(c, _)| c)
    }

    pub fn limit_plus(&self) -> Option<CoinSite> {
        self.limit_plus.map(|(c, _)| c)
    }

    pub fn limit_chi_minus(&self) -> Option<Spinor> {
        self.limit_minus.map(|(_, v)| v)
    }

    pub fn limit_chi_plus(&self) -> Option<Spinor> {
        self.limit_plus.map(|(_, v)| v)
    }

    fn lookup(&self, x: i64) -> (&CoinSite, &Spinor) {
        if x < self.window.lo {
            if let Some((c, v)) = &self.limit_minus {
                return (c, v);
            }
            return (&self.coins[0], &self.chis[0]);
        }
        if x > self.window.hi {
            if let Some((c, v)) = &self.limit_plus {
                return (c, v);
            }
            let last = self.coins.len() - 1;
            return (&self.coins[last], &self.chis[last]);
        }
        let i = (x - self.window.lo) as usize;
        (&self.coins[i], &self.chis[i])
    }

    pub fn coin(&self, x: i64) -> CoinSite {
        *self.lookup(x).0
    }

    pub fn chi(&self, x: i64) -> Spinor {
        *self.lookup(x).1
    }

    /// Every coin the field can take: tabulated sites and declared limits.
    pub fn all_distinct_chis(&self) -> impl Iterator<Item = Spinor> + '_ {
        self.chis
            .iter()
            .copied()
            .chain(self.limit_minus.map(|(_, v)| v))
            .chain(self.limit_plus.map(|(_, v)| v))
    }

    /// Checks χ₁(x)χ₂(x) ≠ 0 on every tabulated site and declared limit.
    pub fn check_chi_nonvanishing(&self) -> Result<()> {
        let bad = |v: &Spinor| v[0].norm() <= CHI_EPS || v[1].norm() <= CHI_EPS;
        for (x, _, v) in self.tabulated() {
            if bad(v) {
                return Err(Error::ChiComponentVanishes(SiteRef::Site(x)));
            }
        }
        if let Some((_, v)) = &self.limit_minus {
            if bad(v) {
                return Err(Error::ChiComponentVanishes(SiteRef::MinusInfinity));
            }
        }
        if let Some((_, v)) = &self.limit_plus {
            if bad(v) {
                return Err(Error::ChiComponentVanishes(SiteRef::PlusInfinity));
            }
        }
        Ok(())
    }
}

/// A finitely supported element of ℓ²(ℤ; ℂ²).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct State {
    window: Window,
    values: Vec<Spinor>,
}

impl State {
    pub fn zeros(window: Window) -> Self {
        State {
            window,
            values: vec![[ZERO; 2]; window.len()],
        }
    }

    pub fn from_values(window: Window, values: Vec<Spinor>) -> Result<Self> {
        if values.len() != window.len() {
            return Err(Error::InvalidParameter(format!(
                "{} values for a window of {} sites",
                values.len(),
                window.len()
            )));
        }
        Ok(State { window, values })
    }

    pub fn from_fn(window: Window, mut f: impl FnMut(i64) -> Spinor) -> Self {
        State {
            window,
            values: window.sites().map(&mut f).collect(),
        }
    }

    /// `δ_x ⊗ v`.
    pub fn delta(x: i64, v: Spinor) -> Self {
        State {
            window: Window { lo: x, hi: x },
            values: vec![v],
        }
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn values(&self) -> &[Spinor] {
        &self.values
    }

    /// Ψ(x), zero outside the window.
    pub fn get(&self, x: i64) -> Spinor {
        match self.window.index(x) {
            Some(i) => self.values[i],
            None => [ZERO; 2],
        }
    }

    pub fn set(&mut self, x: i64, v: Spinor) {
        let i = self.window.index(x).expect("site outside the state window");
        self.values[i] = v;
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &Spinor)> {
        self.window.sites().zip(self.values.iter())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(spinor_norm_sqr).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scaled(&self, s: Complex64) -> State {
        State {
            window: self.window,
            values: self.values.iter().map(|v| [v[0] * s, v[1] * s]).collect(),
        }
    }

    /// Unit-norm copy; the zero state is returned unchanged.
    pub fn normalized(&self) -> State {
        let n = self.norm();
        if n == 0.0 {
            return self.clone();
        }
        self.scaled(c(1.0 / n, 0.0))
    }

    /// ⟨self, other⟩ over the union of both windows.
    pub fn inner(&self, other: &State) -> Complex64 {
        self.iter().map(|(x, v)| spinor_inner(v, &other.get(x))).sum()
    }

    /// Same values on a different window (zero-padded or truncated).
    pub fn restricted(&self, window: Window) -> State {
        State::from_fn(window, |x| self.get(x))
    }

    /// `self + s·other` on the union of both windows.
    pub fn add_scaled(&self, s: Complex64, other: &State) -> State {
        let w = self.window.union(&other.window);
        State::from_fn(w, |x| {
            let (u, v) = (self.get(x), other.get(x));
            [u[0] + s * v[0], u[1] + s * v[1]]
        })
    }

    /// Largest pointwise component difference over the union of windows.
    pub fn max_abs_diff(&self, other: &State) -> f64 {
        let w = self.window.union(&other.window);
        w.sites()
            .map(|x| {
                let (u, v) = (self.get(x), other.get(x));
                (u[0] - v[0]).norm().max((u[1] - v[1]).norm())
            })
            .fold(0.0, f64::max)
    }

    /// ‖Ψ‖² restricted to the sites of `window`.
    pub fn norm_sqr_on(&self, window: Window) -> f64 {
        window.sites().map(|x| spinor_norm_sqr(&self.get(x))).sum()
    }

    /// Drops edge sites whose norm is below [`COMPACTION_THRESHOLD`],
    /// always keeping at least one site.
    pub fn compact(mut self) -> State {
        let small = |v: &Spinor| spinor_norm_sqr(v).sqrt() < COMPACTION_THRESHOLD;
        let lead = self.values.iter().take_while(|v| small(v)).count();
        if lead == self.values.len() {
            let x = self.window.lo;
            return State {
                window: Window { lo: x, hi: x },
                values: vec![[ZERO; 2]],
            };
        }
        let trail = self.values.iter().rev().take_while(|v| small(v)).count();
        self.values.truncate(self.values.len() - trail);
        self.values.drain(..lead);
        self.window = Window {
            lo: self.window.lo + lead as i64,
            hi: self.window.hi - trail as i64,
        };
        self
    }
}

/// A finitely supported element of ℓ²(ℤ).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarField {
    window: Window,
    values: Vec<Complex64>,
}

impl ScalarField {
    pub fn zeros(window: Window) -> Self {
        ScalarField {
            window,
            values: vec![ZERO; window.len()],
        }
    }

    pub fn from_fn(window: Window, f: impl FnMut(i64) -> Complex64) -> Self {
        ScalarField {
            window,
            values: window.sites().map(f).collect(),
        }
    }

    pub fn delta(x: i64) -> Self {
        ScalarField {
            window: Window { lo: x, hi: x },
            values: vec![ONE],
        }
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, x: i64) -> Complex64 {
        self.window.index(x).map_or(ZERO, |i| self.values[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &Complex64)> {
        self.window.sites().zip(self.values.iter())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn inner(&self, other: &ScalarField) -> Complex64 {
        self.iter().map(|(x, z)| z.conj() * other.get(x)).sum()
    }

    pub fn norm_sqr_on(&self, window: Window) -> f64 {
        window.sites().map(|x| self.get(x).norm_sqr()).sum()
    }
}

/// Applies the shift. The result lives on the input window grown by one
/// site on each side.
pub fn apply_s(shift: &ShiftParams, psi: &State) -> State {
    let (p, q) = (shift.p, shift.q);
    State::from_fn(psi.window.grow(1), |x| {
        let here = psi.get(x);
        [
            p * here[0] + q * psi.get(x + 1)[1],
            q.conj() * psi.get(x - 1)[0] - p * here[1],
        ]
    })
}

/// Applies the coin pointwise; the window is unchanged.
pub fn apply_c(coins: &CoinField, psi: &State) -> State {
    State {
        window: psi.window,
        values: psi.iter().map(|(x, v)| coins.coin(x).apply(v)).collect(),
    }
}

/// `(dΨ)(x) = ⟨χ(x), Ψ(x)⟩` on the window of Ψ.
pub fn d_apply(coins: &CoinField, psi: &State) -> ScalarField {
    ScalarField {
        window: psi.window,
        values: psi.iter().map(|(x, v)| spinor_inner(&coins.chi(x), v)).collect(),
    }
}

/// `(d*f)(x) = f(x) χ(x)`.
pub fn d_star_apply(coins: &CoinField, f: &ScalarField) -> State {
    State {
        window: f.window,
        values: f
            .iter()
            .map(|(x, z)| {
                let chi = coins.chi(x);
                [*z * chi[0], *z * chi[1]]
            })
            .collect(),
    }
}
