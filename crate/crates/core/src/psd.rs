//! Dense complex Hermitian linear algebra: eigendecomposition, pseudoinverse,
//! range and kernel projections, and the Loewner order.
//!
//! Every matrix here is stored densely as `nalgebra::DMatrix<Complex64>`.
//! Rank decisions are relative: an eigenvalue `λ` of `M` is treated as zero
//! when `λ <= rank_rtol * λ_max(M)`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerances::Tolerances;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Hermitian part `(M + M*) / 2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.norm()
}

pub(crate) fn all_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub(crate) fn ensure_finite(m: &CMatrix, context: &'static str) -> Result<()> {
    if all_finite(m) {
        Ok(())
    } else {
        Err(Error::NonFinite { context })
    }
}

/// A complex Hermitian positive-semidefinite matrix.
///
/// Hermitian symmetry holds exactly as stored: construction replaces the
/// input by its Hermitian part after checking that the asymmetry is within
/// `recon_tol`.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdMatrix {
    m: CMatrix,
}

impl PsdMatrix {
    /// Validates and wraps a matrix: square, non-empty, finite, Hermitian
    /// within `recon_tol`, and PSD within `psd_slack`.
    pub fn new(m: CMatrix, tol: &Tolerances) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::Empty);
        }
        ensure_finite(&m, "matrix input")?;
        let asymmetry = frobenius(&(&m - m.adjoint())) / (1.0 + frobenius(&m));
        if asymmetry > tol.recon_tol {
            return Err(Error::NotHermitian { asymmetry });
        }
        let h = Self::from_hermitian(m);
        let eig = hermitian_eigen(&h.m, tol)?;
        let max_abs = eig.eigenvalues.iter().fold(0.0_f64, |a, &l| a.max(l.abs()));
        let min = eig.eigenvalues.last().copied().unwrap_or(0.0);
        if min < -tol.psd_slack * (1.0 + max_abs) {
            return Err(Error::NotPsd { min_eigenvalue: min });
        }
        Ok(h)
    }

    /// Embeds a real symmetric matrix given in row-major order.
    pub fn from_real(dim: usize, row_major: &[f64], tol: &Tolerances) -> Result<Self> {
        if row_major.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                left: dim * dim,
                right: row_major.len(),
            });
        }
        let m = CMatrix::from_fn(dim, dim, |i, j| Complex64::new(row_major[i * dim + j], 0.0));
        Self::new(m, tol)
    }

    pub fn from_diagonal(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { context: "diagonal input" });
        }
        if let Some(&neg) = values.iter().find(|&&v| v < 0.0) {
            return Err(Error::NotPsd { min_eigenvalue: neg });
        }
        let d = DVector::from_iterator(values.len(), values.iter().map(|&v| Complex64::new(v, 0.0)));
        Ok(PsdMatrix {
            m: CMatrix::from_diagonal(&d),
        })
    }

    pub fn identity(dim: usize) -> Self {
        PsdMatrix {
            m: CMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        PsdMatrix {
            m: CMatrix::zeros(dim, dim),
        }
    }

    /// Wraps the Hermitian part of a computed matrix without a PSD check.
    pub(crate) fn from_hermitian(m: CMatrix) -> Self {
        PsdMatrix {
            m: hermitian_part(&m),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn trace(&self) -> f64 {
        self.m.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn frobenius(&self) -> f64 {
        frobenius(&self.m)
    }

    /// `c · M` for `c >= 0`.
    pub fn scaled(&self, c: f64) -> Self {
        debug_assert!(c >= 0.0);
        PsdMatrix {
            m: &self.m * Complex64::new(c, 0.0),
        }
    }

    pub fn sum(&self, other: &PsdMatrix) -> Result<Self> {
        check_same_dim(self, other)?;
        Ok(PsdMatrix::from_hermitian(&self.m + &other.m))
    }

    /// `self - other` as a plain Hermitian matrix (not PSD in general).
    pub fn difference(&self, other: &PsdMatrix) -> Result<CMatrix> {
        check_same_dim(self, other)?;
        Ok(hermitian_part(&(&self.m - &other.m)))
    }

    /// Quadratic form `⟨Mx, x⟩`.
    pub fn quadratic(&self, x: &CVector) -> f64 {
        x.dotc(&(&self.m * x)).re
    }
}

pub(crate) fn check_same_dim(a: &PsdMatrix, b: &PsdMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(())
}

/// Eigenvalues sorted in descending order with the matching unitary matrix
/// of eigenvectors (as columns).
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub vectors: CMatrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// Zero threshold `rank_rtol * λ_max`; only eigenvalues strictly above it
    /// (and strictly positive) count as nonzero.
    pub fn cutoff(&self, tol: &Tolerances) -> f64 {
        tol.rank_rtol * self.max_eigenvalue().max(0.0)
    }

    pub fn is_nonzero(&self, i: usize, tol: &Tolerances) -> bool {
        let l = self.eigenvalues[i];
        l > 0.0 && l > self.cutoff(tol)
    }

    pub fn rank(&self, tol: &Tolerances) -> usize {
        (0..self.dim()).filter(|&i| self.is_nonzero(i, tol)).count()
    }

    /// `V · diag(g(λ)) · V*`.
    pub fn apply(&self, mut g: impl FnMut(usize, f64) -> f64) -> CMatrix {
        let n = self.dim();
        let mut scaled = self.vectors.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= Complex64::new(g(j, self.eigenvalues[j]), 0.0);
        }
        if n == 0 {
            return CMatrix::zeros(0, 0);
        }
        hermitian_part(&(scaled * self.vectors.adjoint()))
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.apply(|_, l| l)
    }

    /// Columns of `V` whose eigenvalue passes `keep`, in order.
    pub fn select_columns(&self, keep: impl Fn(usize) -> bool) -> CMatrix {
        let idx: Vec<usize> = (0..self.dim()).filter(|&i| keep(i)).collect();
        CMatrix::from_fn(self.dim(), idx.len(), |r, c| self.vectors[(r, idx[c])])
    }
}

/// Eigendecomposition of a Hermitian matrix (not necessarily PSD).
pub fn hermitian_eigen(m: &CMatrix, tol: &Tolerances) -> Result<EigenDecomposition> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::NotSquare {
            rows: n,
            cols: m.ncols(),
        });
    }
    if n == 0 {
        return Ok(EigenDecomposition {
            eigenvalues: Vec::new(),
            vectors: CMatrix::zeros(0, 0),
        });
    }
    ensure_finite(m, "eigensolver input")?;
    let h = hermitian_part(m);
    let eig = SymmetricEigen::try_new(h.clone(), f64::EPSILON, 1000 * n.max(10))
        .ok_or(Error::EigenFailed {
            residual: f64::INFINITY,
        })?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);

    // Phase convention: the largest-magnitude entry of each eigenvector is
    // real and positive.
    for mut col in vectors.column_iter_mut() {
        let mut best = 0;
        let mut best_abs = -1.0;
        for (i, z) in col.iter().enumerate() {
            let a = z.norm();
            if a > best_abs + 1e-12 {
                best = i;
                best_abs = a;
            }
        }
        if best_abs > 0.0 {
            let phase = col[best] / best_abs;
            col *= phase.conj();
        }
    }

    let decomposition = EigenDecomposition {
        eigenvalues,
        vectors,
    };
    let residual = frobenius(&(&h - decomposition.reconstruct()));
    if !residual.is_finite() || residual > tol.recon_tol * (1.0 + frobenius(&h)) {
        return Err(Error::EigenFailed { residual });
    }
    Ok(decomposition)
}

pub fn eig_hermitian(m: &PsdMatrix, tol: &Tolerances) -> Result<EigenDecomposition> {
    hermitian_eigen(m.matrix(), tol)
}

pub fn min_eigenvalue(m: &CMatrix, tol: &Tolerances) -> Result<f64> {
    Ok(hermitian_eigen(m, tol)?.min_eigenvalue())
}

/// Moore–Penrose pseudoinverse with the relative rank cutoff.
pub fn pinv(m: &PsdMatrix, tol: &Tolerances) -> Result<PsdMatrix> {
    let eig = eig_hermitian(m, tol)?;
    let cutoff = eig.cutoff(tol);
    Ok(PsdMatrix::from_hermitian(eig.apply(|_, l| {
        if l > 0.0 && l > cutoff {
            1.0 / l
        } else {
            0.0
        }
    })))
}

/// Orthogonal projection onto the numerical range of `m`.
pub fn range_projection(m: &PsdMatrix, tol: &Tolerances) -> Result<PsdMatrix> {
    let eig = eig_hermitian(m, tol)?;
    Ok(PsdMatrix::from_hermitian(eig.apply(|i, _| {
        if eig.is_nonzero(i, tol) {
            1.0
        } else {
            0.0
        }
    })))
}

/// Orthogonal projection onto the numerical kernel of `m`; the complement of
/// [`range_projection`] built from the same eigenvectors.
pub fn kernel_projection(m: &PsdMatrix, tol: &Tolerances) -> Result<PsdMatrix> {
    let eig = eig_hermitian(m, tol)?;
    Ok(PsdMatrix::from_hermitian(eig.apply(|i, _| {
        if eig.is_nonzero(i, tol) {
            0.0
        } else {
            1.0
        }
    })))
}

/// A square-root factor `F = U_r Λ_r^{1/2}` with `F F* = M` on the
/// numerical range; `dim × rank`.
pub fn factor(m: &PsdMatrix, tol: &Tolerances) -> Result<CMatrix> {
    let eig = eig_hermitian(m, tol)?;
    let keep: Vec<usize> = (0..eig.dim()).filter(|&i| eig.is_nonzero(i, tol)).collect();
    Ok(CMatrix::from_fn(m.dim(), keep.len(), |r, c| {
        eig.vectors[(r, keep[c])] * eig.eigenvalues[keep[c]].sqrt()
    }))
}

pub fn rank(m: &PsdMatrix, tol: &Tolerances) -> Result<usize> {
    Ok(eig_hermitian(m, tol)?.rank(tol))
}

/// `A ⪯ B`: the smallest eigenvalue of `B − A` is at least
/// `−psd_slack · (1 + ‖B‖_F)`.
pub fn loewner_leq(a: &PsdMatrix, b: &PsdMatrix, tol: &Tolerances) -> Result<bool> {
    let diff = b.difference(a)?;
    let min = min_eigenvalue(&diff, tol)?;
    Ok(min >= -tol.psd_slack * (1.0 + b.frobenius()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{psd_strategy, real_psd};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn assert_close(a: &CMatrix, b: &CMatrix, eps: f64) {
        let d = frobenius(&(a - b));
        assert!(d <= eps, "matrices differ by {d:.3e}\n{a}\n{b}");
    }

    #[test]
    fn eig_of_identity() {
        let e = eig_hermitian(&PsdMatrix::identity(2), &tol()).unwrap();
        assert_eq!(e.eigenvalues.len(), 2);
        for l in &e.eigenvalues {
            assert_abs_diff_eq!(*l, 1.0, epsilon = 1e-14);
        }
        let vv = e.vectors.adjoint() * &e.vectors;
        assert_close(&vv, &CMatrix::identity(2, 2), 1e-14);
    }

    #[test]
    fn eig_of_diagonal_is_sorted_permutation() {
        let e = eig_hermitian(&PsdMatrix::from_diagonal(&[1.0, 3.0]).unwrap(), &tol()).unwrap();
        assert_abs_diff_eq!(e.eigenvalues[0], 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.eigenvalues[1], 1.0, epsilon = 1e-14);
        // First eigenvector is e_2, second e_1.
        assert_abs_diff_eq!(e.vectors[(1, 0)].re, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.vectors[(0, 1)].re, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn eig_of_two_by_two() {
        let m = real_psd(2, &[2.0, 1.0, 1.0, 2.0]);
        let e = eig_hermitian(&m, &tol()).unwrap();
        assert_abs_diff_eq!(e.eigenvalues[0], 3.0, epsilon = 1e-13);
        assert_abs_diff_eq!(e.eigenvalues[1], 1.0, epsilon = 1e-13);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // Phase convention makes the leading entry real positive.
        assert_abs_diff_eq!(e.vectors[(0, 0)].re, s, epsilon = 1e-13);
        assert_abs_diff_eq!(e.vectors[(1, 0)].re, s, epsilon = 1e-13);
        assert_abs_diff_eq!(e.vectors[(0, 1)].re.abs(), s, epsilon = 1e-13);
        assert_abs_diff_eq!(
            e.vectors[(0, 1)].re + e.vectors[(1, 1)].re,
            0.0,
            epsilon = 1e-13
        );
    }

    #[test]
    fn pinv_examples() {
        let p = pinv(&PsdMatrix::from_diagonal(&[2.0, 0.0]).unwrap(), &tol()).unwrap();
        assert_close(p.matrix(), PsdMatrix::from_diagonal(&[0.5, 0.0]).unwrap().matrix(), 1e-14);

        let p = pinv(&PsdMatrix::identity(3), &tol()).unwrap();
        assert_close(p.matrix(), &CMatrix::identity(3, 3), 1e-14);

        let p = pinv(&real_psd(2, &[1.0, 1.0, 1.0, 1.0]), &tol()).unwrap();
        assert_close(p.matrix(), real_psd(2, &[0.25; 4]).matrix(), 1e-14);
    }

    #[test]
    fn range_projection_examples() {
        let p = range_projection(&PsdMatrix::from_diagonal(&[2.0, 0.0]).unwrap(), &tol()).unwrap();
        assert_close(p.matrix(), PsdMatrix::from_diagonal(&[1.0, 0.0]).unwrap().matrix(), 1e-14);

        let p = range_projection(&PsdMatrix::zeros(3), &tol()).unwrap();
        assert_close(p.matrix(), &CMatrix::zeros(3, 3), 0.0);

        let p = range_projection(&real_psd(2, &[1.0; 4]), &tol()).unwrap();
        assert_close(p.matrix(), real_psd(2, &[0.5; 4]).matrix(), 1e-14);
    }

    #[test]
    fn loewner_examples() {
        let t = tol();
        let b = real_psd(2, &[2.0, 1.0, 1.0, 2.0]);
        assert!(loewner_leq(&PsdMatrix::zeros(2), &b, &t).unwrap());

        let a = PsdMatrix::from_diagonal(&[1.0, 2.0]).unwrap();
        let b = PsdMatrix::from_diagonal(&[2.0, 2.0]).unwrap();
        assert!(loewner_leq(&a, &b, &t).unwrap());

        // ones(2) - diag(2,0) = [[-1,1],[1,1]] has eigenvalues ±√2.
        let a = PsdMatrix::from_diagonal(&[2.0, 0.0]).unwrap();
        let b = real_psd(2, &[1.0; 4]);
        assert!(!loewner_leq(&a, &b, &t).unwrap());

        let err = loewner_leq(&PsdMatrix::identity(2), &PsdMatrix::identity(3), &t);
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn construction_rejects_bad_inputs() {
        let t = tol();
        let rect = CMatrix::zeros(2, 3);
        assert!(matches!(PsdMatrix::new(rect, &t), Err(Error::NotSquare { .. })));
        assert!(matches!(
            PsdMatrix::new(CMatrix::zeros(0, 0), &t),
            Err(Error::Empty)
        ));
        let asym = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
            ],
        );
        assert!(matches!(PsdMatrix::new(asym, &t), Err(Error::NotHermitian { .. })));
        let indefinite = CMatrix::from_diagonal(&DVector::from_vec(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(-1.0, 0.0),
        ]));
        assert!(matches!(PsdMatrix::new(indefinite, &t), Err(Error::NotPsd { .. })));
        let mut nan = CMatrix::identity(2, 2);
        nan[(0, 0)] = Complex64::new(f64::NAN, 0.0);
        assert!(matches!(PsdMatrix::new(nan, &t), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn construction_symmetrizes_small_asymmetry() {
        let t = tol();
        let mut m = CMatrix::identity(2, 2);
        m[(0, 1)] = Complex64::new(1e-12, 0.0);
        let p = PsdMatrix::new(m, &t).unwrap();
        assert_eq!(p.matrix()[(0, 1)], p.matrix()[(1, 0)].conj());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn eig_reconstructs_and_is_unitary(m in psd_strategy(1..9)) {
            let t = tol();
            let e = eig_hermitian(&m, &t).unwrap();
            let n = m.dim();
            let r = frobenius(&(m.matrix() - e.reconstruct()));
            prop_assert!(r <= t.recon_tol * (1.0 + m.frobenius()));
            let vv = e.vectors.adjoint() * &e.vectors;
            prop_assert!(frobenius(&(vv - CMatrix::identity(n, n))) <= t.recon_tol);
            for w in e.eigenvalues.windows(2) {
                prop_assert!(w[0] >= w[1]);
            }
        }

        #[test]
        fn pinv_satisfies_moore_penrose(m in psd_strategy(1..9)) {
            let t = tol();
            let p = pinv(&m, &t).unwrap();
            let a = m.matrix();
            let x = p.matrix();
            let scale = 1.0 + frobenius(a) * frobenius(x);
            let eps = t.recon_tol * scale * (1.0 + frobenius(a)).max(1.0 + frobenius(x));
            prop_assert!(frobenius(&(a * x * a - a)) <= eps);
            prop_assert!(frobenius(&(x * a * x - x)) <= eps);
            let ax = a * x;
            let xa = x * a;
            prop_assert!(frobenius(&(&ax - ax.adjoint())) <= eps);
            prop_assert!(frobenius(&(&xa - xa.adjoint())) <= eps);
        }

        #[test]
        fn range_projection_is_idempotent(m in psd_strategy(1..9)) {
            let t = tol();
            let p = range_projection(&m, &t).unwrap();
            let pm = p.matrix();
            prop_assert!(frobenius(&(pm * pm - pm)) <= t.recon_tol);
            prop_assert!(frobenius(&(pm - pm.adjoint())) <= t.recon_tol);
            prop_assert!(frobenius(&(pm * m.matrix() - m.matrix())) <= t.recon_tol * (1.0 + m.frobenius()));
            let k = kernel_projection(&m, &t).unwrap();
            prop_assert!(frobenius(&(pm + k.matrix() - CMatrix::identity(m.dim(), m.dim()))) <= t.recon_tol);
        }

        #[test]
        fn factor_reconstructs(m in psd_strategy(1..9)) {
            let t = tol();
            let f = factor(&m, &t).unwrap();
            prop_assert!(frobenius(&(&f * f.adjoint() - m.matrix())) <= t.recon_tol * (1.0 + m.frobenius()));
        }

        #[test]
        fn loewner_chain(
            (a, p, q) in (1usize..7).prop_flat_map(|d| (psd_strategy(d..d + 1), psd_strategy(d..d + 1), psd_strategy(d..d + 1)))
        ) {
            let t = tol();
            let ap = a.sum(&p).unwrap();
            let apq = ap.sum(&q).unwrap();
            prop_assert!(loewner_leq(&a, &a, &t).unwrap());
            prop_assert!(loewner_leq(&a, &ap, &t).unwrap());
            prop_assert!(loewner_leq(&ap, &apq, &t).unwrap());
            prop_assert!(loewner_leq(&a, &apq, &t).unwrap());
        }
    }
}
