//! Nonnegative sesquilinear forms on a finite-dimensional space with a
//! declared basis.
//!
//! A form is stored as its Gram matrix `G` with `t(x, y) = y* G x`, so the
//! induced operator `⟨T x, y⟩ = t(x, y)` is `G` itself and every form
//! operation reduces to the matrix operation on Gram matrices.

use std::collections::HashSet;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lebesgue::{decompose, Method};
use crate::parallel_sum::parallel_sum;
use crate::psd::{CVector, PsdMatrix};
use crate::tolerances::Tolerances;

#[derive(Debug, Clone)]
pub struct SesquilinearForm {
    basis_labels: Vec<String>,
    gram: PsdMatrix,
}

impl SesquilinearForm {
    pub fn new(basis_labels: Vec<String>, gram: PsdMatrix) -> Result<Self> {
        if basis_labels.len() != gram.dim() {
            return Err(Error::DimensionMismatch {
                left: basis_labels.len(),
                right: gram.dim(),
            });
        }
        let mut seen = HashSet::new();
        for label in &basis_labels {
            if !seen.insert(label.as_str()) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        Ok(SesquilinearForm { basis_labels, gram })
    }

    /// Labels `e0, e1, …`.
    pub fn with_default_basis(gram: PsdMatrix) -> Self {
        let labels = (0..gram.dim()).map(|i| format!("e{i}")).collect();
        SesquilinearForm {
            basis_labels: labels,
            gram,
        }
    }

    pub fn zero(basis_labels: Vec<String>) -> Result<Self> {
        let d = basis_labels.len();
        if d == 0 {
            return Err(Error::Empty);
        }
        Self::new(basis_labels, PsdMatrix::zeros(d))
    }

    pub fn basis_labels(&self) -> &[String] {
        &self.basis_labels
    }

    pub fn gram(&self) -> &PsdMatrix {
        &self.gram
    }

    pub fn dim(&self) -> usize {
        self.gram.dim()
    }

    /// `t(x, y) = y* G x`.
    pub fn eval(&self, x: &CVector, y: &CVector) -> Complex64 {
        (y.adjoint() * self.gram.matrix() * x)[(0, 0)]
    }

    /// `t[x] = t(x, x)`.
    pub fn quadratic(&self, x: &CVector) -> f64 {
        self.gram.quadratic(x)
    }

    fn with_gram(&self, gram: PsdMatrix) -> Self {
        SesquilinearForm {
            basis_labels: self.basis_labels.clone(),
            gram,
        }
    }

    fn check_same_basis(&self, other: &SesquilinearForm) -> Result<()> {
        if self.basis_labels != other.basis_labels {
            return Err(Error::BasisMismatch);
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct FormDecomposition {
    pub ac: SesquilinearForm,
    pub sing: SesquilinearForm,
    pub method: Method,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

/// The operator `T` with `⟨T x, y⟩ = t(x, y)`.
pub fn induced_operator(t: &SesquilinearForm) -> PsdMatrix {
    t.gram.clone()
}

/// `(t:w)[x] = inf_y { w[x − y] + t[y] }`.
pub fn form_parallel_sum(
    t: &SesquilinearForm,
    w: &SesquilinearForm,
    tol: &Tolerances,
) -> Result<SesquilinearForm> {
    t.check_same_basis(w)?;
    let g = parallel_sum(&induced_operator(t), &induced_operator(w), tol)?;
    Ok(t.with_gram(g))
}

/// Splits `t` into its `w`-absolutely continuous part and a `w`-singular
/// remainder.
pub fn form_decompose(
    t: &SesquilinearForm,
    w: &SesquilinearForm,
    method: Method,
    tol: &Tolerances,
) -> Result<FormDecomposition> {
    t.check_same_basis(w)?;
    let d = decompose(&induced_operator(w), &induced_operator(t), method, tol)?;
    Ok(FormDecomposition {
        ac: t.with_gram(d.ac),
        sing: t.with_gram(d.sing),
        method,
        iterations: d.iterations,
        residual: d.residual,
        converged: d.converged,
    })
}
