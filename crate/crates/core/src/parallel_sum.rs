//! Parallel sum `A:B` of PSD matrices, its variational characterization, the
//! increasing limit `lim (nA):B`, and the spectral shortcut for the maximal
//! absolutely continuous part of a positive contraction.
//!
//! `A:B` is evaluated through square-root factors. With `A = F F*`,
//! `B = G G*` and `M = [F G]`,
//!
//! ```text
//! A:B = B − B (A+B)⁺ B = G (I − P₂₂) G*
//! ```
//!
//! where `P` is the orthogonal projection onto `ran M*` and `P₂₂` its lower
//! right block. `P` comes from a thin SVD of `M`, whose condition number is
//! the square root of that of `A + B`. This keeps `(nA):B` accurate for `n`
//! up to `2⁴⁰`, where forming `(nA + B)⁺` directly loses every digit of the
//! `B`-only directions.

use nalgebra::SVD;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::minimize::{bfgs, MinimizeOptions};
use crate::psd::{
    check_same_dim, eig_hermitian, ensure_finite, factor, hermitian_part, CMatrix, CVector,
    PsdMatrix,
};
use crate::tolerances::Tolerances;

/// Largest doubling exponent in the `(2^k A):B` schedule.
pub const ANDO_MAX_DOUBLINGS: u32 = 40;

/// Blocks `(V₁, V₂)` of an orthonormal basis `V` of `ran M*` for
/// `M = [F G]`, split after the first `p = F.ncols()` rows.
fn range_blocks(f: &CMatrix, g: &CMatrix, tol: &Tolerances) -> Result<(CMatrix, CMatrix)> {
    let d = f.nrows();
    let (p, q) = (f.ncols(), g.ncols());
    let mut m = CMatrix::zeros(d, p + q);
    m.columns_mut(0, p).copy_from(f);
    m.columns_mut(p, q).copy_from(g);
    ensure_finite(&m, "parallel sum factors")?;

    let svd = SVD::try_new(m, false, true, f64::EPSILON, 1000 * (p + q).max(10)).ok_or(Error::SvdFailed)?;
    let v_t = svd.v_t.ok_or(Error::SvdFailed)?;
    let sigma_max = svd.singular_values.iter().fold(0.0_f64, |a, &s| a.max(s));
    let cutoff = tol.rank_rtol * sigma_max;
    let kept: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > cutoff && svd.singular_values[i] > 0.0)
        .collect();
    let v1 = CMatrix::from_fn(p, kept.len(), |r, c| v_t[(kept[c], r)].conj());
    let v2 = CMatrix::from_fn(q, kept.len(), |r, c| v_t[(kept[c], p + r)].conj());
    Ok((v1, v2))
}

/// Parallel sum from factors `F` (`d × p`) and `G` (`d × q`) of `A` and `B`.
pub(crate) fn parallel_sum_of_factors(f: &CMatrix, g: &CMatrix, tol: &Tolerances) -> Result<CMatrix> {
    let d = f.nrows();
    let q = g.ncols();
    if f.ncols() == 0 || q == 0 {
        return Ok(CMatrix::zeros(d, d));
    }
    let (_, v2) = range_blocks(f, g, tol)?;
    let q22 = CMatrix::identity(q, q) - &v2 * v2.adjoint();
    let result = hermitian_part(&(g * q22 * g.adjoint()));
    ensure_finite(&result, "parallel sum")?;
    Ok(result)
}

/// `A − A:B = A (A+B)⁺ A = F P₁₁ F*`, PSD by construction.
pub(crate) fn parallel_complement_of_factors(f: &CMatrix, g: &CMatrix, tol: &Tolerances) -> Result<CMatrix> {
    let d = f.nrows();
    if f.ncols() == 0 {
        return Ok(CMatrix::zeros(d, d));
    }
    if g.ncols() == 0 {
        return Ok(hermitian_part(&(f * f.adjoint())));
    }
    let (v1, _) = range_blocks(f, g, tol)?;
    let w = f * v1;
    let result = hermitian_part(&(&w * w.adjoint()));
    ensure_finite(&result, "parallel complement")?;
    Ok(result)
}

/// `A:B`, the unique PSD matrix with quadratic form
/// `x ↦ inf_y ⟨A(x−y),x−y⟩ + ⟨By,y⟩`; equal to `A(A+B)⁺B`.
pub fn parallel_sum(a: &PsdMatrix, b: &PsdMatrix, tol: &Tolerances) -> Result<PsdMatrix> {
    check_same_dim(a, b)?;
    let f = factor(a, tol)?;
    let g = factor(b, tol)?;
    Ok(PsdMatrix::from_hermitian(parallel_sum_of_factors(&f, &g, tol)?))
}

/// `inf_y ⟨A(x−y),x−y⟩ + ⟨By,y⟩`, found by a generic quasi-Newton minimizer
/// over the real and imaginary parts of `y`.
pub fn variational_value(a: &PsdMatrix, b: &PsdMatrix, x: &CVector, tol: &Tolerances) -> Result<f64> {
    check_same_dim(a, b)?;
    let n = a.dim();
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            left: n,
            right: x.len(),
        });
    }
    if x.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NonFinite { context: "variational vector" });
    }
    let am = a.matrix();
    let bm = b.matrix();

    let objective = |v: &[f64], grad: &mut [f64]| -> f64 {
        let y = CVector::from_fn(n, |i, _| Complex64::new(v[i], v[n + i]));
        let r = x - &y;
        let ar = am * &r;
        let by = bm * &y;
        // d/dRe(y_j) = 2 Re((By − A(x−y))_j), d/dIm(y_j) = 2 Im(..)
        let g = (&by - &ar) * Complex64::new(2.0, 0.0);
        for i in 0..n {
            grad[i] = g[i].re;
            grad[n + i] = g[i].im;
        }
        r.dotc(&ar).re + y.dotc(&by).re
    };

    let scale = (1.0 + a.frobenius() + b.frobenius()) * (1.0 + x.norm());
    let opts = MinimizeOptions {
        grad_tol: 1e-2 * tol.recon_tol * scale,
        max_iter: 20_000,
    };
    let found = bfgs(objective, vec![0.0; 2 * n], opts);
    // A stall at a gradient within a few orders of the target is rounding
    // noise on a flat quadratic, not a failure.
    if found.converged || found.gradient_norm <= 10.0 * tol.recon_tol * scale {
        Ok(found.value)
    } else {
        Err(Error::MinimizerFailed {
            iterations: found.iterations,
            best: found.value,
            gradient_norm: found.gradient_norm,
        })
    }
}

/// The increasing limit of `(nA):B` along `n = 2^k`.
#[derive(Debug, Clone)]
pub struct AndoLimitResult {
    pub ac_part: PsdMatrix,
    /// Number of schedule terms evaluated.
    pub terms_used: usize,
    /// Trace increment between the last two terms.
    pub final_increment: f64,
    /// False when the schedule hit `2^40` without meeting the stopping rule.
    pub converged: bool,
}

/// Maximal `A`-absolutely continuous part of `B` as `lim (2^k A):B`.
///
/// Stops once `trace((2^{k} A):B − (2^{k−1} A):B) <= iter_tol · (1 + trace)`
/// where `trace` is that of the current term (never above `trace(B)`).
pub fn ando_ac_part(a: &PsdMatrix, b: &PsdMatrix, tol: &Tolerances) -> Result<AndoLimitResult> {
    check_same_dim(a, b)?;
    let f = factor(a, tol)?;
    let g = factor(b, tol)?;
    let d = a.dim();
    if f.ncols() == 0 || g.ncols() == 0 {
        return Ok(AndoLimitResult {
            ac_part: PsdMatrix::zeros(d),
            terms_used: 1,
            final_increment: 0.0,
            converged: true,
        });
    }

    let mut prev = parallel_sum_of_factors(&f, &g, tol)?;
    let mut prev_trace = trace_re(&prev);
    let mut terms = 1;
    let mut increment = f64::INFINITY;
    let mut converged = false;
    for k in 1..=ANDO_MAX_DOUBLINGS {
        let scaled = &f * Complex64::new(2f64.powf(k as f64 / 2.0), 0.0);
        let cur = parallel_sum_of_factors(&scaled, &g, tol)?;
        let cur_trace = trace_re(&cur);
        terms += 1;
        increment = cur_trace - prev_trace;
        prev = cur;
        prev_trace = cur_trace;
        if increment <= tol.iter_tol * (1.0 + cur_trace) {
            converged = true;
            break;
        }
    }
    Ok(AndoLimitResult {
        ac_part: PsdMatrix::from_hermitian(prev),
        terms_used: terms,
        final_increment: increment.max(0.0),
        converged,
    })
}

/// For a positive contraction `B̃`, returns `∫ f dE` with `f(t) = t` on
/// `[0, 1)` and `f(1) = 0`, i.e. `B̃ − P_{ker(I−B̃)}`. Eigenvalues at or
/// above `1 − rank_rtol` count as 1.
pub fn spectral_ac_of_contraction(bt: &PsdMatrix, tol: &Tolerances) -> Result<PsdMatrix> {
    let eig = eig_hermitian(bt, tol)?;
    if let Some(&bad) = eig
        .eigenvalues
        .iter()
        .find(|&&t| t < -tol.psd_slack || t > 1.0 + tol.psd_slack)
    {
        return Err(Error::NotContraction { eigenvalue: bad });
    }
    let one = 1.0 - tol.rank_rtol;
    Ok(PsdMatrix::from_hermitian(
        eig.apply(|_, t| if t >= one { 0.0 } else { t }),
    ))
}

fn trace_re(m: &CMatrix) -> f64 {
    m.diagonal().iter().map(|z| z.re).sum()
}
