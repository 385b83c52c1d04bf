//! Lebesgue decomposition `B = B_a + B_s` of a PSD matrix `B` with respect to
//! a PSD matrix `A`: `B_a` has range inside `ran A` and is the largest such
//! minorant of `B`, and `B_s` is singular to `A` (`A:B_s = 0`).
//!
//! Three routes are provided:
//!
//! * [`Method::Iterate`]: the fixed-point iteration `B_{n+1} = B_n − B_n:A`,
//!   whose limit is `B_s`.
//! * [`Method::Direct`]: on the auxiliary space of `C = A + B`, with
//!   `C = J J*`, `A = J Ã J*`, `B = J B̃ J*` and `Ã + B̃ = I`, the singular part
//!   is `J P J*` where `P` projects onto `ker Ã`.
//! * [`Method::Ando`]: `B_a = lim (2^k A):B`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::parallel_sum::{ando_ac_part, parallel_complement_of_factors, parallel_sum};
use crate::psd::{
    check_same_dim, eig_hermitian, factor, frobenius, hermitian_part, range_projection, CMatrix,
    PsdMatrix,
};
use crate::tolerances::Tolerances;

/// Relative threshold on `‖A:B‖_F` below which `A` and `B` count as singular.
pub const SINGULARITY_RTOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Iterate,
    Direct,
    Ando,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Iterate, Method::Direct, Method::Ando];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Iterate => "iterate",
            Method::Direct => "direct",
            Method::Ando => "ando",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "iterate" => Ok(Method::Iterate),
            "direct" => Ok(Method::Direct),
            "ando" => Ok(Method::Ando),
            other => Err(format!("unknown method {other:?} (expected iterate, direct or ando)")),
        }
    }
}

/// Concrete model of the auxiliary Hilbert space of `C = A + B`.
///
/// With `C = U Λ U*` restricted to its numerical range of rank `r`,
/// `embed = U_r Λ_r^{1/2}` plays the role of the embedding `J` (so
/// `embed · embed* = C`), and `Ã = Λ_r^{-1/2} U_r* A U_r Λ_r^{-1/2}`,
/// `B̃ = I_r − Ã`.
#[derive(Debug, Clone)]
pub struct AuxiliarySpace {
    pub rank: usize,
    /// `dim × rank`.
    pub embed: CMatrix,
    pub a_tilde: PsdMatrix,
    pub b_tilde: PsdMatrix,
}

impl AuxiliarySpace {
    /// `J X J*` for an `r × r` matrix `X`.
    pub fn lift(&self, x: &CMatrix) -> CMatrix {
        hermitian_part(&(&self.embed * x * self.embed.adjoint()))
    }

    pub fn dim(&self) -> usize {
        self.embed.nrows()
    }
}

pub fn auxiliary_space(a: &PsdMatrix, b: &PsdMatrix, tol: &Tolerances) -> Result<AuxiliarySpace> {
    let c = a.sum(b)?;
    let eig = eig_hermitian(&c, tol)?;
    let keep: Vec<usize> = (0..eig.dim()).filter(|&i| eig.is_nonzero(i, tol)).collect();
    let r = keep.len();
    let d = a.dim();
    let u_r = CMatrix::from_fn(d, r, |i, j| eig.vectors[(i, keep[j])]);
    let sqrt_l: Vec<f64> = keep.iter().map(|&i| eig.eigenvalues[i].sqrt()).collect();

    let embed = CMatrix::from_fn(d, r, |i, j| u_r[(i, j)] * sqrt_l[j]);
    let compressed = u_r.adjoint() * a.matrix() * &u_r;
    let a_tilde = CMatrix::from_fn(r, r, |i, j| compressed[(i, j)] / (sqrt_l[i] * sqrt_l[j]));
    let a_tilde = PsdMatrix::from_hermitian(a_tilde);
    let b_tilde = PsdMatrix::from_hermitian(CMatrix::identity(r, r) - a_tilde.matrix());
    Ok(AuxiliarySpace {
        rank: r,
        embed,
        a_tilde,
        b_tilde,
    })
}

#[derive(Debug, Clone)]
pub struct LebesgueDecomposition {
    /// Absolutely continuous part `B_a`.
    pub ac: PsdMatrix,
    /// Singular part `B_s`.
    pub sing: PsdMatrix,
    pub method: Method,
    /// Fixed-point steps (iterate), schedule terms (ando), or 0 (direct).
    pub iterations: usize,
    /// Last trace increment (iterate, ando) or `‖Ã P‖_F` (direct).
    pub residual: f64,
    pub converged: bool,
}

impl LebesgueDecomposition {
    fn trivial(ac: PsdMatrix, sing: PsdMatrix, method: Method) -> Self {
        LebesgueDecomposition {
            ac,
            sing,
            method,
            iterations: 0,
            residual: 0.0,
            converged: true,
        }
    }
}

/// `μ_A(X) = X − X:A`.
pub fn mu_a(x: &PsdMatrix, a: &PsdMatrix, tol: &Tolerances) -> Result<PsdMatrix> {
    check_same_dim(x, a)?;
    let f = factor(x, tol)?;
    let g = factor(a, tol)?;
    Ok(PsdMatrix::from_hermitian(parallel_complement_of_factors(&f, &g, tol)?))
}

/// Iterates `B_{n+1} = μ_A(B_n)` from `B_0 = B` until
/// `trace(B_n − B_{n+1}) <= iter_tol · (1 + trace B)` or `max_iter` steps.
pub fn arlinskii_iterate(a: &PsdMatrix, b: &PsdMatrix, tol: &Tolerances) -> Result<LebesgueDecomposition> {
    check_same_dim(a, b)?;
    let d = a.dim();
    let g = factor(a, tol)?;
    if factor(b, tol)?.ncols() == 0 {
        return Ok(LebesgueDecomposition::trivial(
            PsdMatrix::zeros(d),
            PsdMatrix::zeros(d),
            Method::Iterate,
        ));
    }
    if g.ncols() == 0 {
        // μ_0 is the identity map: fixed after one step.
        return Ok(LebesgueDecomposition {
            iterations: 1,
            ..LebesgueDecomposition::trivial(PsdMatrix::zeros(d), b.clone(), Method::Iterate)
        });
    }

    let threshold = tol.iter_tol * (1.0 + b.trace());
    let mut current = b.clone();
    let mut current_trace = current.trace();
    let mut increment = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < tol.max_iter {
        let f = factor(&current, tol)?;
        let next = PsdMatrix::from_hermitian(parallel_complement_of_factors(&f, &g, tol)?);
        let next_trace = next.trace();
        increment = current_trace - next_trace;
        current = next;
        current_trace = next_trace;
        iterations += 1;
        if increment <= threshold {
            converged = true;
            break;
        }
    }
    let ac = PsdMatrix::from_hermitian(b.matrix() - current.matrix());
    Ok(LebesgueDecomposition {
        ac,
        sing: current,
        method: Method::Iterate,
        iterations,
        residual: increment.max(0.0),
        converged,
    })
}

/// Singular part `J P J*` with `P` the projection onto the numerical kernel
/// of `Ã`; absolutely continuous part `J (B̃ − P) J*`.
pub fn direct_decompose(a: &PsdMatrix, b: &PsdMatrix, tol: &Tolerances) -> Result<LebesgueDecomposition> {
    check_same_dim(a, b)?;
    let d = a.dim();
    let aux = auxiliary_space(a, b, tol)?;
    if aux.rank == 0 {
        return Ok(LebesgueDecomposition::trivial(
            PsdMatrix::zeros(d),
            PsdMatrix::zeros(d),
            Method::Direct,
        ));
    }
    let p = kernel_projection_of_a_tilde(&aux, tol)?;
    let sing = aux.lift(&p);
    let ac = aux.lift(&(aux.b_tilde.matrix() - &p));
    let residual = frobenius(&(aux.a_tilde.matrix() * &p));
    Ok(LebesgueDecomposition {
        residual,
        ..LebesgueDecomposition::trivial(
            PsdMatrix::from_hermitian(ac),
            PsdMatrix::from_hermitian(sing),
            Method::Direct,
        )
    })
}

/// Projection onto `ker Ã` on the auxiliary space; eigenvalues of `Ã` at or
/// below `rank_rtol · λ_max(Ã)` count as kernel, and `Ã = 0` gives `I`.
pub fn kernel_projection_of_a_tilde(aux: &AuxiliarySpace, tol: &Tolerances) -> Result<CMatrix> {
    let eig = eig_hermitian(&aux.a_tilde, tol)?;
    Ok(eig.apply(|i, _| if eig.is_nonzero(i, tol) { 0.0 } else { 1.0 }))
}

/// `‖P_A B P_A − B‖_F` where `P_A` projects onto the range of `A`.
pub fn absolute_continuity_residual(b: &PsdMatrix, a: &PsdMatrix, tol: &Tolerances) -> Result<f64> {
    check_same_dim(a, b)?;
    let p = range_projection(a, tol)?;
    let pbp = p.matrix() * b.matrix() * p.matrix();
    Ok(frobenius(&(pbp - b.matrix())))
}

/// `B ≪ A`, decided as `ran B ⊆ ran A`.
pub fn is_absolutely_continuous(b: &PsdMatrix, a: &PsdMatrix, tol: &Tolerances) -> Result<bool> {
    let r = absolute_continuity_residual(b, a, tol)?;
    Ok(r <= tol.recon_tol * (1.0 + b.frobenius()))
}

/// `‖A:B‖_F`.
pub fn singularity_residual(a: &PsdMatrix, b: &PsdMatrix, tol: &Tolerances) -> Result<f64> {
    Ok(parallel_sum(a, b, tol)?.frobenius())
}

/// `A ⊥ B`, decided as `‖A:B‖_F <= 1e-8 · (1 + ‖A‖_F + ‖B‖_F)`.
pub fn is_singular(a: &PsdMatrix, b: &PsdMatrix, tol: &Tolerances) -> Result<bool> {
    let r = singularity_residual(a, b, tol)?;
    Ok(r <= SINGULARITY_RTOL * (1.0 + a.frobenius() + b.frobenius()))
}

pub fn decompose(
    a: &PsdMatrix,
    b: &PsdMatrix,
    method: Method,
    tol: &Tolerances,
) -> Result<LebesgueDecomposition> {
    match method {
        Method::Iterate => arlinskii_iterate(a, b, tol),
        Method::Direct => direct_decompose(a, b, tol),
        Method::Ando => {
            let limit = ando_ac_part(a, b, tol)?;
            let sing = PsdMatrix::from_hermitian(b.matrix() - limit.ac_part.matrix());
            Ok(LebesgueDecomposition {
                ac: limit.ac_part,
                sing,
                method: Method::Ando,
                iterations: limit.terms_used,
                residual: limit.final_increment,
                converged: limit.converged,
            })
        }
    }
}

/// `‖J (Ã:B̃) J* − A:B‖_F`.
pub fn auxiliary_parallel_sum_residual(
    a: &PsdMatrix,
    b: &PsdMatrix,
    tol: &Tolerances,
) -> Result<f64> {
    let aux = auxiliary_space(a, b, tol)?;
    let direct = parallel_sum(a, b, tol)?;
    if aux.rank == 0 {
        return Ok(direct.frobenius());
    }
    let small = parallel_sum(&aux.a_tilde, &aux.b_tilde, tol)?;
    Ok(frobenius(&(aux.lift(small.matrix()) - direct.matrix())))
}

/// For a positive contraction `B̃` with `Ã = I − B̃`, runs
/// `B̃_{n+1} = B̃_n − Ã:B̃_n` for `steps` steps and returns, per step,
/// `‖B̃_{n+1} − (I − B̃ + B̃_n)⁻¹ B̃_n²‖_F`.
pub fn contraction_recursion_residuals(
    bt: &PsdMatrix,
    steps: usize,
    tol: &Tolerances,
) -> Result<Vec<f64>> {
    let r = bt.dim();
    let at = PsdMatrix::from_hermitian(CMatrix::identity(r, r) - bt.matrix());
    let mut current = bt.clone();
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        let next = mu_a(&current, &at, tol)?;
        let shifted = CMatrix::identity(r, r) - bt.matrix() + current.matrix();
        let inv = shifted.try_inverse().ok_or(Error::NonFinite {
            context: "recursion inverse",
        })?;
        let predicted = inv * current.matrix() * current.matrix();
        out.push(frobenius(&(next.matrix() - predicted)));
        current = next;
    }
    Ok(out)
}

/// `‖μ_A(X) − X‖_F`; zero exactly when `X` is singular to `A`.
pub fn fixed_point_residual(x: &PsdMatrix, a: &PsdMatrix, tol: &Tolerances) -> Result<f64> {
    let m = mu_a(x, a, tol)?;
    Ok(frobenius(&(m.matrix() - x.matrix())))
}
