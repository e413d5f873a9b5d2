//! Dense eigensolvers for the truncated operators.
//!
//! Hermitian matrices go through nalgebra's Householder tridiagonalization
//! and implicit QR. Normal matrices (the unitary truncations of `U`) are
//! diagonalized jointly through Hermitian combinations
//! `H_c = (M + M*)/2 + c·(M − M*)/(2i)`: every `H_c` commutes with `M`, so
//! each eigenspace of `H_c` is `M`-invariant and is refined recursively with
//! a different `c` until `M` acts on it as a scalar.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: CMatrix,
}

#[derive(Debug, Clone)]
pub struct NormalEigen {
    pub values: Vec<Complex64>,
    pub vectors: CMatrix,
}

/// Largest entry of `|M − M*|`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Largest entry of `|M*M − I|`.
pub fn unitarity_defect(m: &CMatrix) -> f64 {
    let g = m.adjoint() * m;
    let n = g.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let id = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - Complex64::new(id, 0.0)).norm());
        }
    }
    worst
}

/// Full eigendecomposition of a Hermitian matrix (only the lower triangle
/// is read).
pub fn hermitian_eigen(m: &CMatrix) -> HermitianEigen {
    let n = m.nrows();
    if n == 0 {
        return HermitianEigen {
            values: Vec::new(),
            vectors: CMatrix::zeros(0, 0),
        };
    }
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, k| eig.eigenvectors[(r, order[k])]);
    HermitianEigen { values, vectors }
}

// Mixing weights for the successive Hermitian combinations. Any values work
// as long as they differ; these are far from small rationals.
const MIX: [f64; 4] = [
    0.618_033_988_749_894_8,
    -std::f64::consts::SQRT_2,
    0.381_966_011_250_105_1,
    std::f64::consts::E,
];

/// Eigenvalue gap below which two eigenvalues of `H_c` are treated as one
/// cluster and refined together.
const CLUSTER_TOL: f64 = 1e-7;

fn rayleigh(m: &CMatrix, v: &CMatrix, k: usize) -> Complex64 {
    let col = v.column(k);
    (col.adjoint() * m * col)[(0, 0)]
}

fn refine(m: &CMatrix, depth: usize) -> (Vec<Complex64>, CMatrix) {
    let n = m.nrows();
    if n == 1 {
        return (vec![m[(0, 0)]], CMatrix::identity(1, 1));
    }
    if depth >= MIX.len() {
        // M is a scalar on this block up to the cluster tolerance.
        let id = CMatrix::identity(n, n);
        let values = (0..n).map(|k| rayleigh(m, &id, k)).collect();
        return (values, id);
    }
    let mix = MIX[depth];
    let adj = m.adjoint();
    let half = Complex64::new(0.5, 0.0);
    let neg_half_i_mix = Complex64::new(0.0, -0.5 * mix);
    let mut h = (m + &adj) * half + (m - &adj) * neg_half_i_mix;
    // Exact Hermitian symmetry before the solve.
    for i in 0..n {
        h[(i, i)].im = 0.0;
        for j in 0..i {
            h[(j, i)] = h[(i, j)].conj();
        }
    }
    let eig = hermitian_eigen(&h);
    let scale = 1.0 + mix.abs();

    let mut values = Vec::with_capacity(n);
    let mut vectors = CMatrix::zeros(n, n);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && eig.values[end] - eig.values[end - 1] <= CLUSTER_TOL * scale {
            end += 1;
        }
        let block = eig.vectors.columns(start, end - start).into_owned();
        if end - start == 1 {
            values.push(rayleigh(m, &block, 0));
            vectors.set_column(start, &block.column(0));
        } else {
            let sub = block.adjoint() * m * &block;
            let (sub_values, sub_vectors) = refine(&sub, depth + 1);
            let lifted = &block * sub_vectors;
            for (k, value) in sub_values.into_iter().enumerate() {
                values.push(value);
                vectors.set_column(start + k, &lifted.column(k));
            }
        }
        start = end;
    }
    (values, vectors)
}

/// Eigendecomposition of a normal matrix (`M M* = M* M`).
pub fn normal_eigen(m: &CMatrix) -> NormalEigen {
    if m.nrows() == 0 {
        return NormalEigen {
            values: Vec::new(),
            vectors: CMatrix::zeros(0, 0),
        };
    }
    let (values, vectors) = refine(m, 0);
    NormalEigen { values, vectors }
}

/// `‖M v_k − λ_k v_k‖` for every column.
pub fn residuals(m: &CMatrix, values: &[Complex64], vectors: &CMatrix) -> Vec<f64> {
    let mv = m * vectors;
    values
        .iter()
        .enumerate()
        .map(|(k, &l)| (mv.column(k) - vectors.column(k) * l).norm())
        .collect()
}
