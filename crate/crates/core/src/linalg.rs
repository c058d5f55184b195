//! Hermitian matrix helpers shared by every information-theoretic routine.
//!
//! All matrices are dense `DMatrix<Complex64>`. Real-valued problems are the
//! special case of zero imaginary parts.

use alloc::vec::Vec;
use core::f64::consts::LN_2;

use nalgebra::{Cholesky, DMatrix, SymmetricEigen};
use num_complex::Complex64;

/// Dense complex matrix.
pub type CMat = DMatrix<Complex64>;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn zeros(rows: usize, cols: usize) -> CMat {
    CMat::from_element(rows, cols, ZERO)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Real scalar times identity.
pub fn scaled_identity(n: usize, s: f64) -> CMat {
    CMat::from_diagonal_element(n, n, Complex64::new(s, 0.0))
}

pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> CMat {
    CMat::from_fn(rows, cols, |i, j| Complex64::new(data[i * cols + j], 0.0))
}

/// Row-major `[re, im]` entries.
pub fn from_pairs(rows: usize, cols: usize, data: &[[f64; 2]]) -> CMat {
    CMat::from_fn(rows, cols, |i, j| {
        let [re, im] = data[i * cols + j];
        Complex64::new(re, im)
    })
}

/// `(A + A†) / 2`.
pub fn hermitize(a: &CMat) -> CMat {
    (a + a.adjoint()).scale(0.5)
}

/// Largest entrywise modulus of `A - A†`.
pub fn asymmetry(a: &CMat) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn max_abs(a: &CMat) -> f64 {
    a.iter().fold(0.0f64, |m, z| m.max(z.norm()))
}

pub fn is_finite(a: &CMat) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn trace_re(a: &CMat) -> f64 {
    (0..a.nrows().min(a.ncols())).map(|i| a[(i, i)].re).sum()
}

/// Eigen-decomposition of the Hermitian part of `a`, eigenvalues ascending.
pub fn herm_eig(a: &CMat) -> (Vec<f64>, CMat) {
    let n = a.nrows();
    if n == 0 {
        return (Vec::new(), zeros(0, 0));
    }
    let eig = SymmetricEigen::new(hermitize(a));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMat::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub fn eigenvalues(a: &CMat) -> Vec<f64> {
    herm_eig(a).0
}

pub fn min_eig(a: &CMat) -> f64 {
    eigenvalues(a).first().copied().unwrap_or(f64::INFINITY)
}

pub fn max_eig(a: &CMat) -> f64 {
    eigenvalues(a).last().copied().unwrap_or(f64::NEG_INFINITY)
}

/// `V f(Λ) V†` for a Hermitian matrix.
pub fn herm_map(a: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (values, vectors) = herm_eig(a);
    let n = values.len();
    let mut scaled = vectors.clone();
    for (c, &lambda) in values.iter().enumerate() {
        let s = f(lambda);
        for r in 0..n {
            scaled[(r, c)] *= s;
        }
    }
    hermitize(&(scaled * vectors.adjoint()))
}

/// Principal square root of a PSD matrix; negative round-off eigenvalues are clipped.
pub fn psd_sqrt(a: &CMat) -> CMat {
    herm_map(a, |x| libm::sqrt(x.max(0.0)))
}

/// Inverse square root of a PD matrix.
pub fn pd_inv_sqrt(a: &CMat) -> CMat {
    herm_map(a, |x| 1.0 / libm::sqrt(x))
}

/// Inverse of a Hermitian positive-definite matrix, `None` when Cholesky fails.
pub fn pd_inverse(a: &CMat) -> Option<CMat> {
    let chol = Cholesky::new(hermitize(a))?;
    Some(hermitize(&chol.inverse()))
}

/// Moore-Penrose pseudo-inverse of a Hermitian PSD matrix. Eigenvalues below
/// `rel_tol * λ_max` are treated as zero.
pub fn psd_pinv(a: &CMat, rel_tol: f64) -> CMat {
    let (values, vectors) = herm_eig(a);
    let n = values.len();
    let top = values.last().copied().unwrap_or(0.0).max(0.0);
    let cut = rel_tol * top;
    let mut out = zeros(n, n);
    for (c, &lambda) in values.iter().enumerate() {
        if lambda > cut && lambda > 0.0 {
            let v = vectors.column(c);
            out += (&v * v.adjoint()).scale(1.0 / lambda);
        }
    }
    hermitize(&out)
}

/// Orthonormal basis (as columns) of the row space of `a`, dropping singular
/// values below `rel_tol * σ_max`.
pub fn row_space(a: &CMat, rel_tol: f64) -> CMat {
    let svd = a.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let top = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] > rel_tol * top && top > 0.0).collect();
    let mut out = zeros(a.ncols(), keep.len());
    for (j, &i) in keep.iter().enumerate() {
        out.set_column(j, &v_t.row(i).adjoint());
    }
    out
}

/// `log2 det A` for Hermitian positive-definite `A`.
///
/// Uses Cholesky first and falls back to eigenvalues; returns `None` when the
/// matrix is not numerically positive definite.
pub fn logdet2(a: &CMat) -> Option<f64> {
    let n = a.nrows();
    if n == 0 {
        return Some(0.0);
    }
    if let Some(chol) = Cholesky::new(hermitize(a)) {
        let l = chol.l_dirty();
        let mut acc = 0.0;
        for i in 0..n {
            acc += libm::log(l[(i, i)].re);
        }
        return Some(2.0 * acc / LN_2);
    }
    let values = eigenvalues(a);
    if values.iter().any(|&v| v <= 0.0) {
        return None;
    }
    Some(values.iter().map(|&v| libm::log(v)).sum::<f64>() / LN_2)
}

/// `log2 det(I + A)` for Hermitian PSD `A`. Always finite.
pub fn logdet2_i_plus(a: &CMat) -> f64 {
    let n = a.nrows();
    let m = identity(n) + hermitize(a);
    logdet2(&m).unwrap_or_else(|| {
        eigenvalues(&m)
            .iter()
            .map(|&v| libm::log(v.max(f64::MIN_POSITIVE)))
            .sum::<f64>()
            / LN_2
    })
}

/// Extract a sub-matrix from row and column index lists.
pub fn select(a: &CMat, rows: &[usize], cols: &[usize]) -> CMat {
    CMat::from_fn(rows.len(), cols.len(), |i, j| a[(rows[i], cols[j])])
}

/// Write `block` into `a` at `(r0, c0)`.
pub fn put_block(a: &mut CMat, r0: usize, c0: usize, block: &CMat) {
    a.view_mut((r0, c0), (block.nrows(), block.ncols())).copy_from(block);
}

/// Frobenius inner product `Re tr(A† B)`.
pub fn inner(a: &CMat, b: &CMat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

/// Orthonormal (Frobenius) real basis of the n×n Hermitian matrices: `n²` elements.
pub fn hermitian_basis(n: usize) -> Vec<CMat> {
    let mut basis = Vec::with_capacity(n * n);
    let r = core::f64::consts::FRAC_1_SQRT_2;
    for i in 0..n {
        let mut e = zeros(n, n);
        e[(i, i)] = ONE;
        basis.push(e);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let mut e = zeros(n, n);
            e[(i, j)] = Complex64::new(r, 0.0);
            e[(j, i)] = Complex64::new(r, 0.0);
            basis.push(e);
            let mut e = zeros(n, n);
            e[(i, j)] = Complex64::new(0.0, r);
            e[(j, i)] = Complex64::new(0.0, -r);
            basis.push(e);
        }
    }
    basis
}

/// Coordinates of a Hermitian matrix in [`hermitian_basis`].
pub fn hermitian_coords(a: &CMat) -> Vec<f64> {
    hermitian_basis(a.nrows()).iter().map(|e| inner(e, a)).collect()
}

/// Inverse of [`hermitian_coords`].
pub fn from_hermitian_coords(n: usize, coords: &[f64]) -> CMat {
    let mut out = zeros(n, n);
    for (e, &c) in hermitian_basis(n).iter().zip(coords) {
        out += e.scale(c);
    }
    out
}
