#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use speclab_core::{CoinField, CoinSite, Complex64, ShiftParams, State, Window};

pub type CMatrix = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn random_coin(rng: &mut impl Rng) -> CoinSite {
    let t: f64 = rng.gen_range(0.05..std::f64::consts::PI - 0.05);
    let phi: f64 = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
    CoinSite::new(t.cos(), Complex64::from_polar(t.sin(), phi)).unwrap()
}

pub fn random_shift(rng: &mut impl Rng) -> ShiftParams {
    let p: f64 = rng.gen_range(-0.95..0.95);
    let phi: f64 = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
    ShiftParams::new(p, Complex64::from_polar((1.0 - p * p).sqrt(), phi)).unwrap()
}

/// Random coins tabulated on `[lo, hi]` with random declared limits.
pub fn random_field(rng: &mut impl Rng, lo: i64, hi: i64) -> CoinField {
    let coins = (lo..=hi).map(|_| random_coin(rng)).collect();
    let (m, p) = (random_coin(rng), random_coin(rng));
    CoinField::from_table(lo, coins).unwrap().with_limits(Some(m), Some(p))
}

pub fn random_state(rng: &mut impl Rng, window: Window) -> State {
    State::from_fn(window, |_| {
        [
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        ]
    })
}

/// Row/column index of (site, component) inside `window`.
pub fn idx(window: Window, x: i64, k: usize) -> usize {
    2 * (x - window.lo()) as usize + k
}

/// Dense S on `window` from the defining formula, couplings leaving the
/// window dropped.
pub fn dense_shift(shift: &ShiftParams, window: Window) -> CMatrix {
    let n = 2 * window.len();
    let (p, q) = (shift.p(), shift.q());
    let mut m = CMatrix::zeros(n, n);
    for x in window.sites() {
        m[(idx(window, x, 0), idx(window, x, 0))] = c(p, 0.0);
        m[(idx(window, x, 1), idx(window, x, 1))] = c(-p, 0.0);
        if window.contains(x + 1) {
            m[(idx(window, x, 0), idx(window, x + 1, 1))] = q;
        }
        if window.contains(x - 1) {
            m[(idx(window, x, 1), idx(window, x - 1, 0))] = q.conj();
        }
    }
    m
}

pub fn dense_coin(coins: &CoinField, window: Window) -> CMatrix {
    let n = 2 * window.len();
    let mut m = CMatrix::zeros(n, n);
    for x in window.sites() {
        let cm = coins.coin(x).matrix();
        for r in 0..2 {
            for k in 0..2 {
                m[(idx(window, x, r), idx(window, x, k))] = cm[r][k];
            }
        }
    }
    m
}

pub fn to_vector(psi: &State, window: Window) -> DVector<Complex64> {
    let mut v = DVector::zeros(2 * window.len());
    for x in window.sites() {
        let s = psi.get(x);
        v[idx(window, x, 0)] = s[0];
        v[idx(window, x, 1)] = s[1];
    }
    v
}

pub fn from_vector(v: &DVector<Complex64>, window: Window) -> State {
    State::from_fn(window, |x| [v[idx(window, x, 0)], v[idx(window, x, 1)]])
}

/// Max-norm distance between two states.
pub fn dist(a: &State, b: &State) -> f64 {
    a.max_abs_diff(b)
}
