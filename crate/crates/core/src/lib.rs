//! Spectral analysis of one-dimensional split-step quantum walks.
//!
//! The evolution `U = SC` is the product of a self-adjoint shift `S`
//! (parameters `p`, `q`) and a site-dependent self-adjoint coin `C`. This
//! crate builds those operators on finite windows, runs the walk, and
//! studies the spectrum of `U` through two pieces:
//!
//! * the discriminant `T = dSd*`, a Jacobi operator whose spectrum maps onto
//!   σ(U) through `φ(z) = (z + 1/z)/2` ([`discriminant`]);
//! * the birth eigenspaces `ker d ∩ ker(S ± 1)`, which contribute the
//!   eigenvalues ±1 of `U` that do not come from `T` ([`birth`]).
//!
//! [`models`] provides the anisotropic and Kitagawa coin families together
//! with closed-form predictions of their birth verdicts.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod birth;
pub mod discriminant;
pub mod error;
pub mod lattice;
pub mod linalg;
pub mod models;
pub mod walk;

pub use birth::{
    beta_constants, birth_report, classify, construct_eigenvector, decay_fit, robustness_compare, side_ratios,
    verify_eigenvector, BirthOptions, BirthReport, DecayFit, Residual, SideBounds, SideRatios, Sign, Verdict,
};
pub use discriminant::{
    build_k_e, build_t, build_u, eig_hermitian, eig_unitary, exclusion_bound, spectral_mapping_check, v_of, Boundary,
    HermitianSpectrum, MappingReport, OperatorKind, TruncatedOperator, UnitarySpectrum,
};
pub use error::{Error, Result, SiteRef};
pub use lattice::{
    apply_c, apply_s, chi_of, d_apply, d_star_apply, CoinField, CoinSite, ScalarField, ShiftParams, Spinor, State,
    Window,
};
pub use models::{
    anisotropic_coin, epsilon0, kitagawa_coin, predict_anisotropic, predict_kitagawa, AnisotropicProfile,
    AnisotropicSpec, KitagawaSpec, Theta1Profile,
};
pub use num_complex::Complex64;
pub use walk::{evolve, local_matrices, position_distribution, step, LocalMatrices};
