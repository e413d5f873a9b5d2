//! The discriminant `T = dSd* = D + D* + V` and finite truncations of `T`
//! and `U`.
//!
//! On ℓ²(ℤ) the discriminant is the Jacobi operator
//!
//! ```text
//! (Tψ)(x) = q χ̄₁(x) χ₂(x+1) ψ(x+1) + q̄ χ̄₂(x) χ₁(x−1) ψ(x−1) + V(x) ψ(x),
//! V(x)    = p (|χ₁(x)|² − |χ₂(x)|²).
//! ```
//!
//! Its spectrum generates the non-birth part of σ(U) through the Joukowsky
//! map φ(z) = (z + 1/z)/2, which sends e^{iθ} to cos θ. Truncations to a
//! window use either a hard cut (Dirichlet, tridiagonal) or a ring
//! (periodic). Only the ring keeps `U` unitary, so evolution spectra are
//! periodic-only.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::birth::Sign;
use crate::error::{Error, Result};
use crate::lattice::{c, chi_of, CoinField, CoinSite, ShiftParams, Spinor, Window};
use crate::linalg::{self, CMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Dirichlet,
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorKind {
    /// A Hermitian operator on ℓ²(window): T or a rescaling of it.
    Discriminant,
    /// U = SC on ℓ²(window; ℂ²), two rows per site.
    Evolution,
}

/// Sites within this distance of a truncation edge count as "near the cut".
pub const EDGE_SITES: i64 = 5;

#[derive(Debug, Clone)]
pub struct TruncatedOperator {
    pub window: Window,
    pub matrix: CMatrix,
    pub boundary: Boundary,
    pub kind: OperatorKind,
}

impl TruncatedOperator {
    pub fn new(window: Window, matrix: CMatrix, boundary: Boundary, kind: OperatorKind) -> Result<Self> {
        let per_site = match kind {
            OperatorKind::Discriminant => 1,
            OperatorKind::Evolution => 2,
        };
        let n = window.len() * per_site;
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::InvalidParameter(format!(
                "{}x{} matrix for a {}-site window",
                matrix.nrows(),
                matrix.ncols(),
                window.len()
            )));
        }
        Ok(TruncatedOperator {
            window,
            matrix,
            boundary,
            kind,
        })
    }

    fn rows_per_site(&self) -> usize {
        match self.kind {
            OperatorKind::Discriminant => 1,
            OperatorKind::Evolution => 2,
        }
    }

    /// Max absolute row sum, an upper bound on the operator norm.
    pub fn norm_bound(&self) -> f64 {
        self.matrix
            .row_iter()
            .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Whether more than half of an eigenvector's mass sits within
    /// [`EDGE_SITES`] of either end of the window.
    fn edge_localized(&self, vectors: &CMatrix, k: usize) -> bool {
        let rps = self.rows_per_site();
        let n_sites = self.window.len();
        let col = vectors.column(k);
        let total: f64 = col.iter().map(|z| z.norm_sqr()).sum();
        let edge: f64 = (0..n_sites)
            .filter(|&i| (i as i64) < EDGE_SITES || ((n_sites - 1 - i) as i64) < EDGE_SITES)
            .map(|i| (0..rps).map(|j| col[i * rps + j].norm_sqr()).sum::<f64>())
            .sum();
        total > 0.0 && edge / total > 0.5
    }
}

#[derive(Debug, Clone)]
pub struct HermitianSpectrum {
    /// Ascending.
    pub values: Vec<f64>,
    pub vectors: CMatrix,
    /// `‖Mv − λv‖` per pair.
    pub residuals: Vec<f64>,
    /// Eigenvectors concentrated near a truncation edge.
    pub edge_localized: Vec<bool>,
}

impl HermitianSpectrum {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    /// Largest |λ|.
    pub fn spectral_radius(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// Distance from `x` to the nearest eigenvalue.
    pub fn distance_to(&self, x: f64) -> f64 {
        let i = self.values.partition_point(|&v| v < x);
        let mut best = f64::INFINITY;
        if i < self.values.len() {
            best = best.min((self.values[i] - x).abs());
        }
        if i > 0 {
            best = best.min((self.values[i - 1] - x).abs());
        }
        best
    }
}

#[derive(Debug, Clone)]
pub struct UnitarySpectrum {
    /// Sorted by argument in (−π, π].
    pub values: Vec<Complex64>,
    pub vectors: CMatrix,
    pub residuals: Vec<f64>,
    pub edge_localized: Vec<bool>,
}

impl UnitarySpectrum {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    /// max |1 − |λ||.
    pub fn max_unit_deviation(&self) -> f64 {
        self.values.iter().map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max)
    }

    pub fn distance_to(&self, z: Complex64) -> f64 {
        self.values.iter().map(|v| (v - z).norm()).fold(f64::INFINITY, f64::min)
    }
}

/// `V = p (|χ₁|² − |χ₂|²)` for one coin.
pub fn v_of(shift: &ShiftParams, coin: &CoinSite) -> f64 {
    potential(shift, &chi_of(coin))
}

pub(crate) fn potential(shift: &ShiftParams, chi: &Spinor) -> f64 {
    shift.p() * (chi[0].norm_sqr() - chi[1].norm_sqr())
}

/// The hopping `⟨δ_x, T δ_y⟩ = q χ̄₁(x) χ₂(y)` for y = x + 1.
fn hopping(shift: &ShiftParams, chi_x: &Spinor, chi_next: &Spinor) -> Complex64 {
    shift.q() * chi_x[0].conj() * chi_next[1]
}

/// sup |V(x)| over the tabulated sites and declared limits.
pub fn sup_potential(shift: &ShiftParams, coins: &CoinField) -> f64 {
    coins
        .all_distinct_chis()
        .map(|chi| potential(shift, &chi).abs())
        .fold(0.0, f64::max)
}

/// Sites of `window` paired with their right neighbour, wrapping under a
/// periodic boundary.
fn bonds(window: Window, boundary: Boundary) -> Vec<(usize, usize)> {
    let n = window.len();
    let mut out: Vec<(usize, usize)> = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
    if boundary == Boundary::Periodic {
        out.push((n - 1, 0));
    }
    out
}

/// The discriminant restricted to `window`.
pub fn build_t(shift: &ShiftParams, coins: &CoinField, window: Window, boundary: Boundary) -> TruncatedOperator {
    let n = window.len();
    let chis: Vec<Spinor> = window.sites().map(|x| coins.chi(x)).collect();
    let mut m = CMatrix::zeros(n, n);
    for (i, chi) in chis.iter().enumerate() {
        m[(i, i)] = c(potential(shift, chi), 0.0);
    }
    for (i, j) in bonds(window, boundary) {
        let h = hopping(shift, &chis[i], &chis[j]);
        m[(i, j)] += h;
        m[(j, i)] += h.conj();
    }
    TruncatedOperator {
        window,
        matrix: m,
        boundary,
        kind: OperatorKind::Discriminant,
    }
}

/// `U = SC` on a ring over `window`. Row `2i + k` is component k of site
/// `window.lo() + i`.
pub fn build_u(
    shift: &ShiftParams,
    coins: &CoinField,
    window: Window,
    boundary: Boundary,
) -> Result<TruncatedOperator> {
    if boundary != Boundary::Periodic {
        return Err(Error::NonUnitaryTruncation);
    }
    let n = window.len();
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "evolution truncation needs at least 3 sites, got {n}"
        )));
    }
    let (p, q) = (shift.p(), shift.q());
    let mut s = CMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        let next = (i + 1) % n;
        let prev = (i + n - 1) % n;
        s[(2 * i, 2 * i)] += c(p, 0.0);
        s[(2 * i, 2 * next + 1)] += q;
        s[(2 * i + 1, 2 * prev)] += q.conj();
        s[(2 * i + 1, 2 * i + 1)] += c(-p, 0.0);
    }
    let mut coin = CMatrix::zeros(2 * n, 2 * n);
    for (i, x) in window.sites().enumerate() {
        let m = coins.coin(x).matrix();
        for r in 0..2 {
            for k in 0..2 {
                coin[(2 * i + r, 2 * i + k)] = m[r][k];
            }
        }
    }
    Ok(TruncatedOperator {
        window,
        matrix: s * coin,
        boundary,
        kind: OperatorKind::Evolution,
    })
}

pub fn eig_hermitian(op: &TruncatedOperator) -> Result<HermitianSpectrum> {
    if op.kind != OperatorKind::Discriminant {
        return Err(Error::WrongKind {
            expected: "discriminant",
        });
    }
    let defect = linalg::hermiticity_defect(&op.matrix);
    if defect > 1e-12 * op.norm_bound().max(1.0) {
        return Err(Error::NotHermitian(defect));
    }
    let eig = linalg::hermitian_eigen(&op.matrix);
    let as_complex: Vec<Complex64> = eig.values.iter().map(|&v| c(v, 0.0)).collect();
    let residuals = linalg::residuals(&op.matrix, &as_complex, &eig.vectors);
    let edge_localized = (0..eig.values.len())
        .map(|k| op.edge_localized(&eig.vectors, k))
        .collect();
    Ok(HermitianSpectrum {
        values: eig.values,
        vectors: eig.vectors,
        residuals,
        edge_localized,
    })
}

pub fn eig_unitary(op: &TruncatedOperator) -> Result<UnitarySpectrum> {
    if op.kind != OperatorKind::Evolution {
        return Err(Error::WrongKind { expected: "evolution" });
    }
    if op.boundary != Boundary::Periodic {
        return Err(Error::NonUnitaryTruncation);
    }
    let defect = linalg::unitarity_defect(&op.matrix);
    if defect > 1e-10 {
        return Err(Error::NotUnitary(defect));
    }
    let eig = linalg::normal_eigen(&op.matrix);
    let mut order: Vec<usize> = (0..eig.values.len()).collect();
    order.sort_by(|&i, &j| eig.values[i].arg().total_cmp(&eig.values[j].arg()));
    let values: Vec<Complex64> = order.iter().map(|&i| eig.values[i]).collect();
    let n = values.len();
    let vectors = CMatrix::from_fn(n, n, |r, k| eig.vectors[(r, order[k])]);
    let residuals = linalg::residuals(&op.matrix, &values, &vectors);
    let edge_localized = (0..n).map(|k| op.edge_localized(&vectors, k)).collect();
    Ok(UnitarySpectrum {
        values,
        vectors,
        residuals,
        edge_localized,
    })
}

/// Joukowsky map restricted to the unit circle: φ(e^{iθ}) = cos θ.
pub fn joukowsky(z: Complex64) -> Complex64 {
    (z + z.inv()) * 0.5
}

/// Values this close to ±1 are treated as exactly ±1 before taking arccos,
/// whose derivative blows up there.
const ARCCOS_SNAP: f64 = 1e-12;

/// The two points of φ⁻¹(λ) on the unit circle for λ ∈ [−1, 1].
pub fn joukowsky_preimages(lambda: f64) -> [Complex64; 2] {
    let l = if 1.0 - lambda.abs() < ARCCOS_SNAP {
        lambda.signum()
    } else {
        lambda.clamp(-1.0, 1.0)
    };
    let theta = l.acos();
    [Complex64::from_polar(1.0, theta), Complex64::from_polar(1.0, -theta)]
}

/// Periodic spectra of T and U on one ring and how well they match.
#[derive(Debug, Clone)]
pub struct MappingReport {
    pub window: Window,
    pub t: HermitianSpectrum,
    pub u: UnitarySpectrum,
    /// Per eigenvalue of U: distance from Re λ_U = φ(λ_U) to σ(T).
    pub defects: Vec<f64>,
    /// Per eigenvalue of T: the worse of the two distances from
    /// e^{±i arccos λ_T} to σ(U).
    pub inverse_defects: Vec<f64>,
}

impl MappingReport {
    pub fn max_defect(&self) -> f64 {
        self.defects.iter().copied().fold(0.0, f64::max)
    }

    /// Max defect over eigenvalues of U away from ±1 (those can be birth
    /// eigenvalues with no counterpart in σ(T)).
    pub fn max_inherited_defect(&self) -> f64 {
        self.u
            .values
            .iter()
            .zip(&self.defects)
            .filter(|(z, _)| (*z - c(1.0, 0.0)).norm() > 1e-8 && (*z + c(1.0, 0.0)).norm() > 1e-8)
            .map(|(_, d)| *d)
            .fold(0.0, f64::max)
    }

    pub fn max_inverse_defect(&self) -> f64 {
        self.inverse_defects.iter().copied().fold(0.0, f64::max)
    }
}

/// Builds T and U on a ring of `n_sites` sites starting at `-(n_sites / 2)`
/// and compares σ(U) with φ⁻¹(σ(T)) in both directions.
pub fn spectral_mapping_check(shift: &ShiftParams, coins: &CoinField, n_sites: usize) -> Result<MappingReport> {
    let window = Window::with_len(-((n_sites / 2) as i64), n_sites)?;
    let t = eig_hermitian(&build_t(shift, coins, window, Boundary::Periodic))?;
    let u = eig_unitary(&build_u(shift, coins, window, Boundary::Periodic)?)?;
    let defects = u.values.iter().map(|z| t.distance_to(joukowsky(*z).re)).collect();
    let inverse_defects = t
        .values
        .iter()
        .map(|&l| {
            let [a, b] = joukowsky_preimages(l);
            u.distance_to(a).max(u.distance_to(b))
        })
        .collect();
    Ok(MappingReport {
        window,
        t,
        u,
        defects,
        inverse_defects,
    })
}

/// `|q| + sup|V|`: no eigenvalue of T exceeds this in modulus.
pub fn exclusion_bound(shift: &ShiftParams, coins: &CoinField) -> f64 {
    shift.q().norm() + sup_potential(shift, coins)
}

/// `K_E^± = (E ∓ V)^{-1/2} (D + D*) (E ∓ V)^{-1/2}` on `window` (hard cut).
/// Then ±E is an eigenvalue of T exactly when ±1 is one of K_E^±.
pub fn build_k_e(
    shift: &ShiftParams,
    coins: &CoinField,
    energy: f64,
    sign: Sign,
    window: Window,
) -> Result<TruncatedOperator> {
    let sup_v = sup_potential(shift, coins);
    if !(energy - sup_v > 1e-9) {
        return Err(Error::NonPositiveWeight { energy, sup_v });
    }
    let s = sign.value();
    let mut op = build_t(shift, coins, window, Boundary::Dirichlet);
    let inv_sqrt: Vec<f64> = window
        .sites()
        .map(|x| 1.0 / (energy - s * potential(shift, &coins.chi(x))).sqrt())
        .collect();
    let n = window.len();
    for i in 0..n {
        op.matrix[(i, i)] = c(0.0, 0.0);
        for j in 0..n {
            op.matrix[(i, j)] *= inv_sqrt[i] * inv_sqrt[j];
        }
    }
    Ok(op)
}

/// The proof bound `|q| / (E − sup|V|)` on ‖K_E‖.
pub fn k_e_norm_bound(shift: &ShiftParams, coins: &CoinField, energy: f64) -> f64 {
    shift.q().norm() / (energy - sup_potential(shift, coins))
}
