mod common;

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use speclab_core::birth::{construct_eigenvector_with, eigen_residual};
use speclab_core::models::{g, rotate_chi};
use speclab_core::{
    anisotropic_coin, birth_report, build_u, construct_eigenvector, decay_fit, eig_unitary, evolve, kitagawa_coin,
    position_distribution, robustness_compare, side_ratios, verify_eigenvector, AnisotropicSpec, BirthOptions,
    Boundary, CoinField, CoinSite, Complex64, Error, KitagawaSpec, ShiftParams, Sign, Spinor, State, Theta1Profile,
    Verdict, Window,
};

fn aniso(eps: f64) -> (ShiftParams, CoinField) {
    (
        ShiftParams::standard(),
        anisotropic_coin(&AnisotropicSpec::step(eps)).unwrap(),
    )
}

fn window200() -> Window {
    Window::new(-200, 200).unwrap()
}

#[test]
fn anisotropic_birth_vectors_are_eigenvectors() {
    let (shift, coins) = aniso(0.3);
    for sign in Sign::both() {
        let report = birth_report(&shift, &coins, sign, &BirthOptions::new(window200())).unwrap();
        assert_eq!(report.verdict, Verdict::NontrivialDim1);
        assert!(report.upper < 1.0);
        let psi = report.eigenvector.as_ref().unwrap();
        assert!(report.residual.unwrap().value <= 1e-8);
        assert!((psi.norm() - 1.0).abs() <= 1e-12);
        // Independent check: U applied as S∘C directly.
        let lambda = c(sign.value(), 0.0);
        assert!(eigen_residual(&shift, &coins, psi, lambda) <= 1e-8);
        assert!(eigen_residual(&shift, &coins, psi, -lambda) > 1.0);
    }
}

#[test]
fn anisotropic_trivial_regime() {
    let (shift, coins) = aniso(0.9);
    for sign in Sign::both() {
        let report = birth_report(&shift, &coins, sign, &BirthOptions::new(window200())).unwrap();
        assert_eq!(report.verdict, Verdict::Trivial);
        assert!(report.eigenvector.is_none());
        assert!(matches!(
            construct_eigenvector(&shift, &coins, sign, window200()),
            Err(Error::BirthNotNontrivial(Verdict::Trivial))
        ));
    }
}

#[test]
fn decay_slopes_follow_the_limit_ratios() {
    let (shift, coins) = aniso(0.3);
    let want = g(0.3).ln();
    assert!((want + 2.3136).abs() < 1e-4);
    for sign in Sign::both() {
        let report = birth_report(&shift, &coins, sign, &BirthOptions::new(window200())).unwrap();
        let fit = report.decay.unwrap();
        assert!(((fit.slope_plus - want) / want).abs() <= 0.02, "{}", fit.slope_plus);
        assert!(((fit.slope_minus + want) / want).abs() <= 0.02, "{}", fit.slope_minus);
        assert!(fit.r2_plus >= 0.999 && fit.r2_minus >= 0.999);
        let (pp, pm) = report.predicted_slopes().unwrap();
        assert!((pp - want).abs() <= 1e-12 && (pm + want).abs() <= 1e-12);
    }
}

#[test]
fn decay_fit_is_exact_on_geometric_profiles() {
    let beta: f64 = 0.4;
    let w = Window::new(-60, 60).unwrap();
    let psi = State::from_fn(w, |x| [c(beta.powf(x.abs() as f64 / 2.0), 0.0), c(0.0, 0.0)]);
    let fit = decay_fit(&psi, 10).unwrap();
    assert!((fit.slope_plus - beta.ln()).abs() <= 1e-10);
    assert!((fit.slope_minus + beta.ln()).abs() <= 1e-10);
    assert!(fit.r2_plus > 1.0 - 1e-12 && fit.r2_minus > 1.0 - 1e-12);
    assert!(decay_fit(&psi.restricted(Window::new(-15, 15).unwrap()), 10).is_err());
}

#[test]
fn reseeding_gives_the_same_state() {
    let (shift, coins) = aniso(0.3);
    for sign in Sign::both() {
        let a = construct_eigenvector(&shift, &coins, sign, window200()).unwrap();
        let b = construct_eigenvector_with(&shift, &coins, sign, window200(), 2.0, 1e-10).unwrap();
        let phase = a.inner(&b);
        assert!((phase.norm() - 1.0).abs() <= 1e-12);
        assert!(dist(&a.scaled(phase), &b) <= 1e-12);
    }
}

fn with_random_phases(coins: &CoinField, rng: &mut ChaCha8Rng) -> CoinField {
    let mut phased = |v: Spinor| {
        let z = Complex64::from_polar(1.0, rng.gen_range(-3.0..3.0));
        [v[0] * z, v[1] * z]
    };
    let w = coins.table_window();
    let chis: Vec<Spinor> = w.sites().map(|x| phased(coins.chi(x))).collect();
    let (m, p) = (
        coins.limit_chi_minus().map(&mut phased),
        coins.limit_chi_plus().map(&mut phased),
    );
    CoinField::from_chis(w.lo(), &chis)
        .unwrap()
        .with_limit_chis(m, p)
        .unwrap()
}

#[test]
fn reports_do_not_depend_on_eigenvector_phases() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let (shift, coins) = (
        ShiftParams::standard(),
        anisotropic_coin(&AnisotropicSpec::linear(0.3)).unwrap(),
    );
    let phased = with_random_phases(&coins, &mut rng);
    let opts = BirthOptions::new(Window::new(-120, 120).unwrap());
    for sign in Sign::both() {
        let a = birth_report(&shift, &coins, sign, &opts).unwrap();
        let b = birth_report(&shift, &phased, sign, &opts).unwrap();
        assert_eq!(a.verdict, b.verdict);
        for (x, y) in [
            (a.ratios.minus.limsup, b.ratios.minus.limsup),
            (a.ratios.plus.limsup, b.ratios.plus.limsup),
            (a.ratios.minus.liminf, b.ratios.minus.liminf),
            (a.ratios.plus.liminf, b.ratios.plus.liminf),
            (a.upper, b.upper),
            (a.lower, b.lower),
        ] {
            assert!((x - y).abs() <= 1e-12);
        }
        let (da, db) = (a.decay.unwrap(), b.decay.unwrap());
        assert!((da.slope_plus - db.slope_plus).abs() <= 1e-12);
        assert!((da.slope_minus - db.slope_minus).abs() <= 1e-12);
        assert!(b.residual.unwrap().value <= 1e-8);
        // Profiles agree site by site.
        let (pa, pb) = (
            position_distribution(a.eigenvector.as_ref().unwrap()),
            position_distribution(b.eigenvector.as_ref().unwrap()),
        );
        for (x, v) in &pa {
            assert!((v - pb[x]).abs() <= 1e-12);
        }
    }
}

#[test]
fn vanishing_perturbations_keep_the_verdict() {
    let (shift, coins) = aniso(0.3);
    let perturbed = rotate_chi(&coins, Window::new(-20, 20).unwrap(), |x| {
        0.3 * 2f64.powi(-(x.abs() as i32))
    })
    .unwrap();
    for sign in Sign::both() {
        let cmp = robustness_compare(&shift, &coins, &perturbed, sign, &BirthOptions::new(window200())).unwrap();
        assert!(cmp.verdicts_agree());
        assert!(cmp.consistent());
        let (a, b) = cmp.slope_differences().unwrap();
        assert!(a <= 0.05 && b <= 0.05);
        assert!(cmp.perturbed.residual.unwrap().value <= 1e-8);
    }
    let (shift, coins) = aniso(0.9);
    let perturbed = rotate_chi(&coins, Window::new(-20, 20).unwrap(), |x| {
        0.3 * 2f64.powi(-(x.abs() as i32))
    })
    .unwrap();
    let cmp = robustness_compare(&shift, &coins, &perturbed, Sign::Plus, &BirthOptions::new(window200())).unwrap();
    assert_eq!(
        (cmp.unperturbed.verdict, cmp.perturbed.verdict),
        (Verdict::Trivial, Verdict::Trivial)
    );
}

#[test]
fn mismatched_limits_are_not_a_perturbation() {
    let (shift, a) = aniso(0.3);
    let (_, b) = aniso(0.31);
    assert!(matches!(
        robustness_compare(&shift, &a, &b, Sign::Plus, &BirthOptions::new(window200())),
        Err(Error::NotVanishingPerturbation)
    ));
}

#[test]
fn identical_inputs_give_identical_reports() {
    let (shift, coins) = aniso(0.3);
    let cmp = robustness_compare(&shift, &coins, &coins, Sign::Minus, &BirthOptions::new(window200())).unwrap();
    assert_eq!(cmp.unperturbed, cmp.perturbed);
}

#[test]
fn birth_states_are_stationary() {
    let (shift, coins) = aniso(0.3);
    for sign in Sign::both() {
        let psi = construct_eigenvector(&shift, &coins, sign, window200()).unwrap();
        let start = position_distribution(&psi);
        let later = position_distribution(&evolve(&shift, &coins, &psi, 100));
        let drift = later
            .iter()
            .map(|(x, p)| (p - start.get(x).copied().unwrap_or(0.0)).abs())
            .fold(0.0, f64::max);
        assert!(drift <= 1e-10, "{drift}");
    }
}

#[test]
fn free_walk_escapes_the_origin() {
    let (shift, coins) = (ShiftParams::standard(), CoinField::constant(CoinSite::sigma1()));
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let psi = State::delta(0, [c(s, 0.0), c(0.0, s)]);
    let p = position_distribution(&evolve(&shift, &coins, &psi, 20));
    assert!(p.get(&0).copied().unwrap_or(0.0) < 0.5);
}

#[test]
fn kitagawa_worked_point_has_a_plus_birth_vector() {
    let spec = KitagawaSpec {
        theta2: -std::f64::consts::FRAC_PI_3,
        theta1: Theta1Profile::Step {
            minus: 1.5 * std::f64::consts::PI,
            plus: 0.0,
        },
    };
    let (shift, coins) = kitagawa_coin(&spec).unwrap();
    let plus = birth_report(&shift, &coins, Sign::Plus, &BirthOptions::new(window200())).unwrap();
    assert_eq!(plus.verdict, Verdict::NontrivialDim1);
    assert!((plus.ratios.minus.limsup - 0.5147).abs() < 1e-4);
    assert!((plus.ratios.plus.limsup - 1.0 / 3.0).abs() < 1e-12);
    assert!(plus.residual.unwrap().value <= 1e-8);
    let psi = plus.eigenvector.unwrap();
    assert!(eigen_residual(&shift, &coins, &psi, c(1.0, 0.0)) <= 1e-8);
    let minus = birth_report(&shift, &coins, Sign::Minus, &BirthOptions::new(window200())).unwrap();
    assert_eq!(minus.verdict, Verdict::Trivial);
}

#[test]
fn balanced_constant_coin_has_no_birth_vector() {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let coins = CoinField::constant(CoinSite::from_chi(&[c(s, 0.0), c(s, 0.0)]).unwrap());
    let shift = ShiftParams::standard();
    let r = side_ratios(&shift, &coins, Sign::Plus, 1).unwrap();
    assert!((r.minus.limsup - 1.0).abs() <= 1e-12 && (r.plus.limsup - 1.0).abs() <= 1e-12);
    assert!(matches!(
        construct_eigenvector(&shift, &coins, Sign::Plus, window200()),
        Err(Error::BirthNotNontrivial(Verdict::Inconclusive))
    ));
}

#[test]
fn random_and_zero_states_fail_verification() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let (shift, coins) = aniso(0.3);
    let psi = random_state(&mut rng, Window::new(-20, 20).unwrap());
    assert!(verify_eigenvector(&shift, &coins, &psi, Sign::Plus).value > 0.1);
    let zero = verify_eigenvector(&shift, &coins, &State::zeros(Window::new(-5, 5).unwrap()), Sign::Plus);
    assert!(zero.zero_state && zero.value.is_infinite());
}

#[test]
fn too_small_windows_are_refused() {
    let (shift, coins) = aniso(0.6);
    assert!(matches!(
        construct_eigenvector(&shift, &coins, Sign::Plus, Window::new(-3, 3).unwrap()),
        Err(Error::WindowTooSmall(_))
    ));
}

#[test]
fn scanned_ratios_match_declared_limits() {
    // Same coins tabulated far out but without declared limits.
    let (shift, coins) = aniso(0.4);
    let w = Window::new(-150, 150).unwrap();
    let chis: Vec<Spinor> = w.sites().map(|x| coins.chi(x)).collect();
    let bare = CoinField::from_chis(w.lo(), &chis).unwrap();
    for sign in Sign::both() {
        let exact = side_ratios(&shift, &coins, sign, 10).unwrap();
        let scanned = side_ratios(&shift, &bare, sign, 10).unwrap();
        assert!(exact.minus.exact && !scanned.minus.exact);
        assert!((exact.minus.limsup - scanned.minus.limsup).abs() <= 1e-12);
        assert!((exact.plus.liminf - scanned.plus.liminf).abs() <= 1e-12);
    }
}

#[test]
fn birth_vectors_appear_in_the_periodic_spectrum() {
    let (shift, coins) = aniso(0.3);
    let ring = Window::with_len(-40, 80).unwrap();
    let spec = eig_unitary(&build_u(&shift, &coins, ring, Boundary::Periodic).unwrap()).unwrap();
    for sign in Sign::both() {
        let target = c(sign.value(), 0.0);
        let psi = construct_eigenvector(&shift, &coins, sign, ring).unwrap();
        let v = to_vector(&psi, ring);
        let near: Vec<usize> = (0..spec.values.len())
            .filter(|&k| (spec.values[k] - target).norm() <= 1e-6)
            .collect();
        assert!(!near.is_empty());
        let captured: f64 = near
            .iter()
            .map(|&k| (spec.vectors.column(k).adjoint() * &v)[(0, 0)].norm_sqr())
            .sum();
        assert!((captured - 1.0).abs() <= 1e-6, "{captured}");
    }
}
