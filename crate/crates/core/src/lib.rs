//! Lebesgue decompositions `B = B_a + B_s` of positive semidefinite matrices
//! with respect to a reference matrix `A`, computed by the fixed-point
//! iteration `B_{n+1} = B_n − B_n:A`, by a direct construction on the
//! auxiliary space of `A + B`, and by the increasing limit of `(nA):B`.
//!
//! The same machinery decomposes nonnegative sesquilinear forms on a
//! finite-dimensional space ([`forms`]) and positive functionals on finite
//! direct sums of matrix algebras ([`functionals`]).

pub mod error;
pub mod forms;
pub mod functionals;
pub mod lebesgue;
pub mod minimize;
pub mod parallel_sum;
pub mod psd;
pub mod tolerances;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
pub use forms::{
    form_decompose, form_parallel_sum, induced_operator, FormDecomposition, SesquilinearForm,
};
pub use functionals::{
    eval, functional_decompose, functional_parallel_sum, gns, induced_form, AlgebraElement,
    Functional, FunctionalDecomposition, GnsTriplet, StarAlgebra,
};
pub use lebesgue::{
    arlinskii_iterate, auxiliary_space, decompose, direct_decompose, is_absolutely_continuous,
    is_singular, mu_a, AuxiliarySpace, LebesgueDecomposition, Method,
};
pub use parallel_sum::{
    ando_ac_part, parallel_sum, spectral_ac_of_contraction, variational_value, AndoLimitResult,
};
pub use psd::{
    eig_hermitian, kernel_projection, loewner_leq, pinv, range_projection, CMatrix, CVector,
    EigenDecomposition, PsdMatrix,
};
pub use tolerances::Tolerances;
