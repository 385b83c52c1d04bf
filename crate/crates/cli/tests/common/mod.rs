#![allow(dead_code)]

use lebesgue_core::psd::hermitian_part;
use lebesgue_core::{CMatrix, PsdMatrix, Tolerances};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex_gaussian(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    DMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-ish unitary from the QR factor of a complex Gaussian matrix.
pub fn random_unitary(rng: &mut impl Rng, dim: usize) -> CMatrix {
    complex_gaussian(rng, dim, dim).qr().q()
}

/// `U diag(λ) U*` restricted to the first `eigenvalues.len()` columns of `u`.
pub fn from_spectrum(u: &CMatrix, eigenvalues: &[f64]) -> PsdMatrix {
    let cols = u.columns(0, eigenvalues.len());
    let scaled = CMatrix::from_fn(u.nrows(), eigenvalues.len(), |i, j| cols[(i, j)] * eigenvalues[j]);
    let m = hermitian_part(&(scaled * cols.adjoint()));
    PsdMatrix::new(m, &Tolerances::default()).expect("constructed PSD")
}

/// Eigenvalues log-uniform in `[1, 1e3]`.
pub fn log_uniform_spectrum(rng: &mut impl Rng, rank: usize) -> Vec<f64> {
    (0..rank).map(|_| 10f64.powf(rng.random_range(0.0..3.0))).collect()
}

/// Random complex PSD matrix of the given rank with eigenvalues in `[1, 1e3]`.
pub fn random_psd(rng: &mut impl Rng, dim: usize, rank: usize) -> PsdMatrix {
    let u = random_unitary(rng, dim);
    let spectrum = log_uniform_spectrum(rng, rank);
    from_spectrum(&u, &spectrum)
}

/// Dimension uniform in `1..=12`, each rank uniform in `0..=dim`.
pub fn random_pair(rng: &mut impl Rng) -> (PsdMatrix, PsdMatrix) {
    let dim = rng.random_range(1..=12);
    let ra = rng.random_range(0..=dim);
    let rb = rng.random_range(0..=dim);
    (random_psd(rng, dim, ra), random_psd(rng, dim, rb))
}

pub fn pair_suite(seed: u64, count: usize) -> Vec<(PsdMatrix, PsdMatrix)> {
    let mut r = rng(seed);
    (0..count).map(|_| random_pair(&mut r)).collect()
}

/// Positive contraction `U diag(t) U*`; each `t` is 0, 1 or uniform in
/// `(0, 1)`. With `force_one`, the first eigenvalue is exactly 1.
pub fn random_contraction(rng: &mut impl Rng, dim: usize, force_one: bool) -> PsdMatrix {
    let u = random_unitary(rng, dim);
    let spectrum: Vec<f64> = (0..dim)
        .map(|i| {
            if force_one && i == 0 {
                return 1.0;
            }
            match rng.random_range(0..4) {
                0 => 0.0,
                1 => 1.0,
                _ => rng.random_range(0.0..1.0),
            }
        })
        .collect();
    from_spectrum(&u, &spectrum)
}

pub fn dist(a: &PsdMatrix, b: &PsdMatrix) -> f64 {
    (a.matrix() - b.matrix()).norm()
}
