//! Time evolution `U = SC` through the three-term recurrence
//!
//! ```text
//! Ψ_{t+1}(x) = P(x+1)Ψ_t(x+1) + Q(x−1)Ψ_t(x−1) + R(x)Ψ_t(x)
//! ```

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::lattice::{c, mat2_apply, spinor_norm_sqr, CoinField, CoinSite, Mat2, ShiftParams, State};

/// The hopping matrices attached to one site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalMatrices {
    /// Moves amplitude from x to x − 1.
    pub p: Mat2,
    /// Moves amplitude from x to x + 1.
    pub q: Mat2,
    /// Keeps amplitude at x.
    pub r: Mat2,
}

pub fn local_matrices(shift: &ShiftParams, coin: &CoinSite) -> LocalMatrices {
    let (p, q) = (shift.p(), shift.q());
    let (a, b) = (coin.a(), coin.b());
    let zero = c(0.0, 0.0);
    let ac = c(a, 0.0);
    LocalMatrices {
        p: [[q * b.conj(), -q * ac], [zero, zero]],
        q: [[zero, zero], [q.conj() * ac, q.conj() * b]],
        r: [[p * ac, p * b], [-p * b.conj(), p * ac]],
    }
}

fn add(u: [Complex64; 2], v: [Complex64; 2]) -> [Complex64; 2] {
    [u[0] + v[0], u[1] + v[1]]
}

/// One application of `U = SC`. The window grows by one site per side and
/// negligible edge sites are then compacted away.
pub fn step(shift: &ShiftParams, coins: &CoinField, psi: &State) -> State {
    let w = psi.window();
    let locals: Vec<LocalMatrices> = w.sites().map(|x| local_matrices(shift, &coins.coin(x))).collect();
    let local = |x: i64| w.index(x).map(|i| &locals[i]);
    State::from_fn(w.grow(1), |x| {
        let mut out = [c(0.0, 0.0); 2];
        if let Some(m) = local(x + 1) {
            out = add(out, mat2_apply(&m.p, &psi.get(x + 1)));
        }
        if let Some(m) = local(x - 1) {
            out = add(out, mat2_apply(&m.q, &psi.get(x - 1)));
        }
        if let Some(m) = local(x) {
            out = add(out, mat2_apply(&m.r, &psi.get(x)));
        }
        out
    })
    .compact()
}

/// `U^t Ψ₀`.
pub fn evolve(shift: &ShiftParams, coins: &CoinField, psi0: &State, t: usize) -> State {
    let mut psi = psi0.clone();
    for _ in 0..t {
        psi = step(shift, coins, &psi);
    }
    psi
}

/// Calls `f(t, Ψ_t)` for t = 0..=t_max.
pub fn evolve_with(
    shift: &ShiftParams,
    coins: &CoinField,
    psi0: &State,
    t_max: usize,
    mut f: impl FnMut(usize, &State),
) -> State {
    let mut psi = psi0.clone();
    f(0, &psi);
    for t in 1..=t_max {
        psi = step(shift, coins, &psi);
        f(t, &psi);
    }
    psi
}

/// `x ↦ ‖Ψ(x)‖²` over the window of Ψ.
pub fn position_distribution(psi: &State) -> BTreeMap<i64, f64> {
    psi.iter().map(|(x, v)| (x, spinor_norm_sqr(v))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{apply_c, apply_s, Window};

    const ONE: Complex64 = Complex64::new(1.0, 0.0);
    const ZERO: Complex64 = Complex64::new(0.0, 0.0);

    #[test]
    fn standard_sigma1_locals() {
        let m = local_matrices(&ShiftParams::standard(), &CoinSite::sigma1());
        assert_eq!(m.p, [[ONE, ZERO], [ZERO, ZERO]]);
        assert_eq!(m.q, [[ZERO, ZERO], [ZERO, ONE]]);
        assert_eq!(m.r, [[ZERO, ZERO], [ZERO, ZERO]]);
    }

    #[test]
    fn step_matches_s_after_c_on_inhomogeneous_field() {
        let shift = ShiftParams::new(0.3, Complex64::from_polar((1.0f64 - 0.09).sqrt(), 0.4)).unwrap();
        let coins = CoinField::from_table(
            -3,
            (0..7)
                .map(|k| {
                    let t = 0.3 + 0.4 * k as f64;
                    CoinSite::new(t.cos(), Complex64::from_polar(t.sin(), -0.2 * k as f64)).unwrap()
                })
                .collect(),
        )
        .unwrap();
        let psi = State::from_fn(Window::new(-5, 4).unwrap(), |x| {
            [c(x as f64 * 0.1, 0.3), c(0.2, -0.05 * x as f64)]
        });
        let a = step(&shift, &coins, &psi);
        let b = apply_s(&shift, &apply_c(&coins, &psi));
        assert!(a.max_abs_diff(&b) < 1e-14);
    }

    #[test]
    fn delta_walks_ballistically() {
        let coins = CoinField::constant(CoinSite::sigma1());
        let shift = ShiftParams::standard();
        let up = evolve(&shift, &coins, &State::delta(0, [ONE, ZERO]), 1);
        assert!(up.max_abs_diff(&State::delta(-1, [ONE, ZERO])) < 1e-15);
        let down = evolve(&shift, &coins, &State::delta(0, [ZERO, ONE]), 1);
        assert!(down.max_abs_diff(&State::delta(1, [ZERO, ONE])) < 1e-15);
    }

    #[test]
    fn zero_steps_is_identity() {
        let psi = State::delta(3, [c(0.6, 0.0), c(0.0, 0.8)]);
        let coins = CoinField::constant(CoinSite::sigma1());
        assert_eq!(evolve(&ShiftParams::standard(), &coins, &psi, 0), psi);
    }

    #[test]
    fn distribution_of_superposition() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = State::from_values(Window::new(0, 1).unwrap(), vec![[c(h, 0.0), ZERO], [ZERO, c(h, 0.0)]]).unwrap();
        let d = position_distribution(&psi);
        assert!((d[&0] - 0.5).abs() < 1e-15 && (d[&1] - 0.5).abs() < 1e-15);
        assert_eq!(
            position_distribution(&State::delta(0, [ONE, ZERO])),
            BTreeMap::from([(0, 1.0)])
        );
    }
}
