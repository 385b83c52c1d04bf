//! Positive functionals on `M_{n_1} ⊕ … ⊕ M_{n_k}`.
//!
//! A functional is `w(a) = Σ_i tr(ρ_i a_i)` with PSD block densities `ρ_i`.
//! Elements are coordinatized in the matrix-unit basis: block by block, and
//! within block `i` the unit `E_kl` sits at `k·n_i + l`. The induced form
//! `t_w(a, b) = w(b* a)` then has Gram matrix `I ⊗ conj(ρ_i)` per block.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::forms::{form_decompose, form_parallel_sum, SesquilinearForm};
use crate::lebesgue::Method;
use crate::psd::{eig_hermitian, hermitian_eigen, hermitian_part, CMatrix, CVector, PsdMatrix};
use crate::tolerances::Tolerances;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarAlgebra {
    block_dims: Vec<usize>,
}

impl StarAlgebra {
    pub fn new(block_dims: Vec<usize>) -> Result<Self> {
        if block_dims.is_empty() {
            return Err(Error::InvalidAlgebra("no blocks".into()));
        }
        if block_dims.contains(&0) {
            return Err(Error::InvalidAlgebra("zero-sized block".into()));
        }
        Ok(StarAlgebra { block_dims })
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    /// Vector-space dimension `Σ n_i²`.
    pub fn total_dim(&self) -> usize {
        self.block_dims.iter().map(|n| n * n).sum()
    }

    fn offsets(&self) -> Vec<usize> {
        self.block_dims
            .iter()
            .scan(0, |acc, n| {
                let start = *acc;
                *acc += n * n;
                Some(start)
            })
            .collect()
    }

    pub fn unit(&self) -> AlgebraElement {
        AlgebraElement {
            blocks: self.block_dims.iter().map(|&n| CMatrix::identity(n, n)).collect(),
        }
    }

    pub fn zero(&self) -> AlgebraElement {
        AlgebraElement {
            blocks: self.block_dims.iter().map(|&n| CMatrix::zeros(n, n)).collect(),
        }
    }

    /// `E_kl` in block `block`.
    pub fn matrix_unit(&self, block: usize, k: usize, l: usize) -> AlgebraElement {
        let mut e = self.zero();
        e.blocks[block][(k, l)] = ONE;
        e
    }

    /// `(block, k, l)` of every matrix unit, in coordinate order.
    pub fn matrix_unit_indices(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::with_capacity(self.total_dim());
        for (b, &n) in self.block_dims.iter().enumerate() {
            for k in 0..n {
                for l in 0..n {
                    out.push((b, k, l));
                }
            }
        }
        out
    }

    pub fn basis_labels(&self) -> Vec<String> {
        self.matrix_unit_indices()
            .into_iter()
            .map(|(b, k, l)| format!("b{b}:E{k},{l}"))
            .collect()
    }

    pub fn coords(&self, a: &AlgebraElement) -> Result<CVector> {
        self.check_element(a)?;
        Ok(CVector::from_iterator(
            self.total_dim(),
            self.matrix_unit_indices().into_iter().map(|(b, k, l)| a.blocks[b][(k, l)]),
        ))
    }

    pub fn from_coords(&self, x: &CVector) -> Result<AlgebraElement> {
        if x.len() != self.total_dim() {
            return Err(Error::DimensionMismatch {
                left: x.len(),
                right: self.total_dim(),
            });
        }
        let mut e = self.zero();
        for (i, (b, k, l)) in self.matrix_unit_indices().into_iter().enumerate() {
            e.blocks[b][(k, l)] = x[i];
        }
        Ok(e)
    }

    pub fn check_element(&self, a: &AlgebraElement) -> Result<()> {
        let ok = a.blocks.len() == self.block_dims.len()
            && a.blocks
                .iter()
                .zip(&self.block_dims)
                .all(|(m, &n)| m.nrows() == n && m.ncols() == n);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidAlgebra("element shape does not match the algebra".into()))
        }
    }

    /// Matrix of `x ↦ coords(a · from_coords(x))`.
    pub fn left_multiplication(&self, a: &AlgebraElement) -> Result<CMatrix> {
        self.check_element(a)?;
        let d = self.total_dim();
        let mut out = CMatrix::zeros(d, d);
        let offsets = self.offsets();
        for (b, &n) in self.block_dims.iter().enumerate() {
            let o = offsets[b];
            // (a E_kl)_{pl} = a_{pk}
            for k in 0..n {
                for l in 0..n {
                    for p in 0..n {
                        out[(o + p * n + l, o + k * n + l)] = a.blocks[b][(p, k)];
                    }
                }
            }
        }
        Ok(out)
    }

    fn check_same(&self, other: &StarAlgebra) -> Result<()> {
        if self != other {
            return Err(Error::AlgebraMismatch {
                left: self.block_dims.clone(),
                right: other.block_dims.clone(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    pub blocks: Vec<CMatrix>,
}

impl AlgebraElement {
    pub fn adjoint(&self) -> AlgebraElement {
        AlgebraElement {
            blocks: self.blocks.iter().map(|m| m.adjoint()).collect(),
        }
    }

    pub fn mul(&self, other: &AlgebraElement) -> AlgebraElement {
        AlgebraElement {
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a * b).collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Functional {
    algebra: StarAlgebra,
    densities: Vec<PsdMatrix>,
}

impl Functional {
    pub fn new(algebra: StarAlgebra, densities: Vec<PsdMatrix>) -> Result<Self> {
        if densities.len() != algebra.block_dims.len() {
            return Err(Error::InvalidAlgebra(format!(
                "{} densities for {} blocks",
                densities.len(),
                algebra.block_dims.len()
            )));
        }
        for (rho, &n) in densities.iter().zip(&algebra.block_dims) {
            if rho.dim() != n {
                return Err(Error::DimensionMismatch {
                    left: rho.dim(),
                    right: n,
                });
            }
        }
        Ok(Functional { algebra, densities })
    }

    pub fn zero(algebra: StarAlgebra) -> Self {
        let densities = algebra.block_dims.iter().map(|&n| PsdMatrix::zeros(n)).collect();
        Functional { algebra, densities }
    }

    pub fn algebra(&self) -> &StarAlgebra {
        &self.algebra
    }

    pub fn densities(&self) -> &[PsdMatrix] {
        &self.densities
    }
}

/// `Σ_i tr(ρ_i a_i)`.
pub fn eval(w: &Functional, a: &AlgebraElement) -> Result<Complex64> {
    w.algebra.check_element(a)?;
    Ok(w
        .densities
        .iter()
        .zip(&a.blocks)
        .map(|(rho, ai)| (rho.matrix() * ai).trace())
        .sum())
}

/// `t_w(a, b) = w(b* a)` over the matrix-unit basis.
pub fn induced_form(w: &Functional) -> SesquilinearForm {
    let alg = &w.algebra;
    let d = alg.total_dim();
    let mut g = CMatrix::zeros(d, d);
    for ((&n, &o), rho) in alg.block_dims.iter().zip(&alg.offsets()).zip(&w.densities) {
        for k in 0..n {
            for l in 0..n {
                for lp in 0..n {
                    g[(o + k * n + lp, o + k * n + l)] = rho.matrix()[(l, lp)];
                }
            }
        }
    }
    SesquilinearForm::new(alg.basis_labels(), PsdMatrix::from_hermitian(g))
        .expect("matrix-unit labels are unique")
}

/// Rebuilds a functional from a form on the algebra via `w(a) = t(a, 1)`,
/// read off on matrix units: `ρ[l][k] = t(E_kl, 1)`. The result is
/// symmetrized and its eigenvalues clipped at zero.
pub fn functional_from_form(
    algebra: &StarAlgebra,
    t: &SesquilinearForm,
    tol: &Tolerances,
) -> Result<Functional> {
    if t.dim() != algebra.total_dim() {
        return Err(Error::DimensionMismatch {
            left: t.dim(),
            right: algebra.total_dim(),
        });
    }
    let one = algebra.coords(&algebra.unit())?;
    // t(e_j, 1) for every basis vector e_j at once.
    let values = t.gram().matrix().adjoint() * &one;
    let offsets = algebra.offsets();
    let mut densities = Vec::with_capacity(algebra.block_dims.len());
    for (&n, &o) in algebra.block_dims.iter().zip(&offsets) {
        let raw = CMatrix::from_fn(n, n, |l, k| values[o + k * n + l].conj());
        densities.push(clip_psd(&hermitian_part(&raw), tol)?);
    }
    Functional::new(algebra.clone(), densities)
}

fn clip_psd(m: &CMatrix, tol: &Tolerances) -> Result<PsdMatrix> {
    let eig = hermitian_eigen(m, tol)?;
    let scale = 1.0 + eig.eigenvalues.iter().fold(0.0f64, |acc, l| acc.max(l.abs()));
    let min = eig.min_eigenvalue();
    if min < -tol.psd_slack * scale {
        return Err(Error::NotPsd { min_eigenvalue: min });
    }
    if min >= 0.0 {
        return Ok(PsdMatrix::from_hermitian(m.clone()));
    }
    Ok(PsdMatrix::from_hermitian(eig.apply(|_, l| l.max(0.0))))
}

/// `(w:v)` determined by `t_{w:v} = t_w : t_v`.
pub fn functional_parallel_sum(w: &Functional, v: &Functional, tol: &Tolerances) -> Result<Functional> {
    w.algebra.check_same(&v.algebra)?;
    let t = form_parallel_sum(&induced_form(w), &induced_form(v), tol)?;
    functional_from_form(&w.algebra, &t, tol)
}

#[derive(Debug, Clone)]
pub struct FunctionalDecomposition {
    pub ac: Functional,
    pub sing: Functional,
    pub method: Method,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

/// Splits `w` into its `v`-absolutely continuous part and a `v`-singular
/// remainder.
pub fn functional_decompose(
    w: &Functional,
    v: &Functional,
    method: Method,
    tol: &Tolerances,
) -> Result<FunctionalDecomposition> {
    w.algebra.check_same(&v.algebra)?;
    let d = form_decompose(&induced_form(w), &induced_form(v), method, tol)?;
    Ok(FunctionalDecomposition {
        ac: functional_from_form(&w.algebra, &d.ac, tol)?,
        sing: functional_from_form(&w.algebra, &d.sing, tol)?,
        method,
        iterations: d.iterations,
        residual: d.residual,
        converged: d.converged,
    })
}

/// Concrete GNS data: `H_w` is `C^r` with `r` the numerical rank of the
/// induced Gram matrix `G = U Λ U*`, the class of `a` is `S · coords(a)` with
/// `S = Λ_r^{1/2} U_r*`, and `π_w(a) = S L_a S⁺`.
#[derive(Debug, Clone)]
pub struct GnsTriplet {
    algebra: StarAlgebra,
    /// `r × total_dim`.
    quotient: CMatrix,
    /// `total_dim × r`, right inverse of `quotient`.
    section: CMatrix,
    cyclic_vector: CVector,
}

impl GnsTriplet {
    pub fn space_dim(&self) -> usize {
        self.quotient.nrows()
    }

    pub fn cyclic_vector(&self) -> &CVector {
        &self.cyclic_vector
    }

    /// Class of `a` in `H_w`.
    pub fn class_of(&self, a: &AlgebraElement) -> Result<CVector> {
        Ok(&self.quotient * self.algebra.coords(a)?)
    }

    pub fn rep(&self, a: &AlgebraElement) -> Result<CMatrix> {
        let l = self.algebra.left_multiplication(a)?;
        Ok(&self.quotient * l * &self.section)
    }

    /// `⟨π(a) ζ, ζ⟩`.
    pub fn vector_state(&self, a: &AlgebraElement) -> Result<Complex64> {
        let z = &self.cyclic_vector;
        Ok((z.adjoint() * self.rep(a)? * z)[(0, 0)])
    }
}

pub fn gns(w: &Functional, tol: &Tolerances) -> Result<GnsTriplet> {
    let alg = &w.algebra;
    let t = induced_form(w);
    let eig = eig_hermitian(t.gram(), tol)?;
    let keep: Vec<usize> = (0..eig.dim()).filter(|&i| eig.is_nonzero(i, tol)).collect();
    let d = alg.total_dim();
    let r = keep.len();
    let quotient = CMatrix::from_fn(r, d, |i, j| {
        eig.vectors[(j, keep[i])].conj() * eig.eigenvalues[keep[i]].sqrt()
    });
    let section = CMatrix::from_fn(d, r, |j, i| {
        eig.vectors[(j, keep[i])] / eig.eigenvalues[keep[i]].sqrt()
    });
    let cyclic_vector = if r == 0 {
        CVector::from_element(0, ZERO)
    } else {
        &quotient * alg.coords(&alg.unit())?
    };
    Ok(GnsTriplet {
        algebra: alg.clone(),
        quotient,
        section,
        cyclic_vector,
    })
}
