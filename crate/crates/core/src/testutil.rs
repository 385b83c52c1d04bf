//! Random PSD generators for unit tests.

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use crate::psd::{CMatrix, PsdMatrix};
use crate::tolerances::Tolerances;

pub fn real_psd(dim: usize, row_major: &[f64]) -> PsdMatrix {
    PsdMatrix::from_real(dim, row_major, &Tolerances::default()).unwrap()
}

fn complex_entry() -> impl Strategy<Value = Complex64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex64::new(re, im))
}

/// `Z Z*` for a random `dim × rank` complex `Z`, rank drawn in `0..=dim`.
pub fn psd_of_dim(dim: usize) -> impl Strategy<Value = PsdMatrix> {
    (0..=dim).prop_flat_map(move |rank| {
        proptest::collection::vec(complex_entry(), dim * rank).prop_map(move |entries| {
            let z = DMatrix::from_vec(dim, rank, entries);
            let m: CMatrix = &z * z.adjoint();
            PsdMatrix::from_hermitian(m)
        })
    })
}

pub fn psd_strategy(dims: std::ops::Range<usize>) -> impl Strategy<Value = PsdMatrix> {
    dims.prop_flat_map(psd_of_dim)
}

pub fn psd_pair(dims: std::ops::Range<usize>) -> impl Strategy<Value = (PsdMatrix, PsdMatrix)> {
    dims.prop_flat_map(|d| (psd_of_dim(d), psd_of_dim(d)))
}

/// Strictly positive definite: `Z Z* + c I` with `c` in `[0.1, 1)`.
pub fn pd_of_dim(dim: usize) -> impl Strategy<Value = PsdMatrix> {
    (
        proptest::collection::vec(complex_entry(), dim * dim),
        0.1f64..1.0,
    )
        .prop_map(move |(entries, c)| {
            let z = DMatrix::from_vec(dim, dim, entries);
            let m: CMatrix = &z * z.adjoint() + CMatrix::identity(dim, dim) * Complex64::new(c, 0.0);
            PsdMatrix::from_hermitian(m)
        })
}

/// Positive contraction with eigenvalues in `[0, 1]`, some pinned to exactly
/// 0 or 1.
pub fn contraction_of_dim(dim: usize) -> impl Strategy<Value = PsdMatrix> {
    (
        proptest::collection::vec(complex_entry(), dim * dim),
        proptest::collection::vec(prop_oneof![Just(0.0), Just(1.0), 0.0f64..1.0], dim),
    )
        .prop_map(move |(entries, eigs)| {
            let z = DMatrix::from_vec(dim, dim, entries);
            let q = z.qr().q();
            let d = DMatrix::from_fn(dim, dim, |i, j| {
                if i == j {
                    Complex64::new(eigs[i], 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            PsdMatrix::from_hermitian(&q * d * q.adjoint())
        })
}
