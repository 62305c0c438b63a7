//! Dense complex linear algebra used throughout the crate.
//!
//! Every operator, state, projection and isometry is a [`ComplexMatrix`]
//! (an `nalgebra` dynamic matrix of `Complex64`). The routines here are
//! deterministic: identical input produces bit-identical output.
//!
//! Vectorisation of operators is always row-major: entry `(i, j)` of an
//! `n x n` matrix lands at index `i * n + j`. Under that convention
//! `vec(A X B) = (A ⊗ Bᵀ) vec(X)`.

pub mod random;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

/// Dense complex matrix, the carrier for every operator in the crate.
pub type ComplexMatrix = DMatrix<Complex64>;
/// Dense complex column vector.
pub type ComplexVector = DVector<Complex64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("tolerances must be strictly positive and finite (abs_eps={abs_eps}, rank_rel_eps={rank_rel_eps})")]
    InvalidTolerance { abs_eps: f64, rank_rel_eps: f64 },
}

/// Numerical thresholds shared by every check in the crate.
///
/// `abs_eps` bounds absolute residuals (Hermiticity, trace preservation,
/// Knill-Laflamme residuals). `rank_rel_eps` decides numerical rank: a
/// singular value or eigenvalue below `rank_rel_eps * max` counts as zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs_eps: f64,
    pub rank_rel_eps: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs_eps: 1e-10,
            rank_rel_eps: 1e-10,
        }
    }
}

impl Tolerance {
    pub fn new(abs_eps: f64, rank_rel_eps: f64) -> Result<Self, NumericsError> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if ok(abs_eps) && ok(rank_rel_eps) {
            Ok(Self {
                abs_eps,
                rank_rel_eps,
            })
        } else {
            Err(NumericsError::InvalidTolerance {
                abs_eps,
                rank_rel_eps,
            })
        }
    }

    /// Threshold for certificates on derived objects (closure of computed
    /// algebras, homomorphism and recovery residuals). Derived objects carry
    /// accumulated rounding, so this is looser than `abs_eps` but never
    /// looser than `1e-8` at the default setting.
    pub fn certify_eps(&self) -> f64 {
        (100.0 * self.abs_eps).max(1e-8)
    }
}

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn real(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(rows, cols)
}

/// The matrix unit `|i><j|` in `M_n`.
pub fn matrix_unit(n: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut m = zeros(n, n);
    m[(i, j)] = real(1.0);
    m
}

/// All `n^2` matrix units in row-major order of `(i, j)`.
pub fn matrix_units(n: usize) -> Vec<ComplexMatrix> {
    (0..n * n).map(|k| matrix_unit(n, k / n, k % n)).collect()
}

/// Build a matrix from real row-major rows.
pub fn from_real_rows(rows: &[&[f64]]) -> ComplexMatrix {
    let r = rows.len();
    let c = rows.first().map_or(0, |row| row.len());
    ComplexMatrix::from_fn(r, c, |i, j| real(rows[i][j]))
}

pub fn diag_real(values: &[f64]) -> ComplexMatrix {
    let n = values.len();
    ComplexMatrix::from_fn(n, n, |i, j| if i == j { real(values[i]) } else { real(0.0) })
}

/// Largest entry modulus, `‖m‖_max`.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Hilbert-Schmidt inner product `Tr(a† b)`.
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Hilbert-Schmidt (Frobenius) norm.
pub fn hs_norm(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn trace(m: &ComplexMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

pub fn hermitian_deviation(m: &ComplexMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

fn ensure_square(m: &ComplexMatrix) -> Result<usize, NumericsError> {
    if m.nrows() == m.ncols() {
        Ok(m.nrows())
    } else {
        Err(NumericsError::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        })
    }
}

/// Row-major vectorisation.
pub fn vectorize(m: &ComplexMatrix) -> ComplexVector {
    let (r, c) = m.shape();
    ComplexVector::from_fn(r * c, |k, _| m[(k / c, k % c)])
}

/// Inverse of [`vectorize`].
pub fn unvectorize(v: &ComplexVector, rows: usize, cols: usize) -> ComplexMatrix {
    assert_eq!(v.len(), rows * cols, "vector length does not match shape");
    ComplexMatrix::from_fn(rows, cols, |i, j| v[i * cols + j])
}

/// Kronecker product. Entry `(i*rows_b + k, j*cols_b + l)` is `a[i,j]·b[k,l]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Partial trace over the second factor of `A ⊗ B`.
pub fn partial_trace_b(m: &ComplexMatrix, dim_a: usize, dim_b: usize) -> ComplexMatrix {
    debug_assert_eq!(m.shape(), (dim_a * dim_b, dim_a * dim_b));
    ComplexMatrix::from_fn(dim_a, dim_a, |i, j| {
        (0..dim_b).map(|k| m[(i * dim_b + k, j * dim_b + k)]).sum()
    })
}

/// Partial trace over the first factor of `A ⊗ B`.
pub fn partial_trace_a(m: &ComplexMatrix, dim_a: usize, dim_b: usize) -> ComplexMatrix {
    debug_assert_eq!(m.shape(), (dim_a * dim_b, dim_a * dim_b));
    ComplexMatrix::from_fn(dim_b, dim_b, |k, l| {
        (0..dim_a).map(|i| m[(i * dim_b + k, i * dim_b + l)]).sum()
    })
}

/// Multiply a vector by a phase so that its first non-negligible component
/// is real and positive.
pub fn fix_phase(v: &mut ComplexVector) {
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return;
    }
    if let Some(z) = v.iter().find(|z| z.norm() > 1e-12 * scale).copied() {
        let phase = z.conj() / z.norm();
        v.iter_mut().for_each(|x| *x *= phase);
    }
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianEigen {
    /// Eigenvalues in descending order.
    pub eigenvalues: Vec<f64>,
    /// Unitary whose columns are the matching eigenvectors.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn eigenvector(&self, k: usize) -> ComplexVector {
        self.eigenvectors.column(k).into_owned()
    }

    /// Columns `range` of the eigenvector matrix.
    pub fn columns(&self, range: std::ops::Range<usize>) -> ComplexMatrix {
        self.eigenvectors
            .columns(range.start, range.end - range.start)
            .into_owned()
    }
}

/// Hermitian eigendecomposition with eigenvalues sorted descending and each
/// eigenvector phase-fixed (first non-negligible component real positive).
pub fn hermitian_eig(m: &ComplexMatrix, tol: &Tolerance) -> Result<HermitianEigen, NumericsError> {
    ensure_square(m)?;
    let deviation = hermitian_deviation(m);
    if deviation > tol.abs_eps {
        return Err(NumericsError::NotHermitian { deviation });
    }
    Ok(eigh(m))
}

/// [`hermitian_eig`] without the Hermiticity check; the Hermitian part of
/// `m` is decomposed. For internal use on matrices Hermitian by construction.
pub fn eigh(m: &ComplexMatrix) -> HermitianEigen {
    let n = m.nrows();
    if n == 0 {
        return HermitianEigen {
            eigenvalues: Vec::new(),
            eigenvectors: zeros(0, 0),
        };
    }
    let eig = hermitian_part(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut eigenvectors = zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(src).into_owned();
        fix_phase(&mut v);
        eigenvectors.set_column(dst, &v);
    }
    HermitianEigen {
        eigenvalues,
        eigenvectors,
    }
}

/// Thin singular value decomposition `m = Σ_k σ_k u_k v_k†`.
///
/// Computed from the Hermitian eigenproblem of `[[0, m], [m†, 0]]`, whose
/// eigenpairs are `±σ_k` with eigenvectors `(u_k; ±v_k)/√2`; the `min(r, c)`
/// largest eigenvalues are the singular values. Each half of an eigenvector
/// is normalised separately, which keeps `u_k`, `v_k` accurate even when
/// `σ_k` is small enough for `±σ_k` to mix. Vectors belonging to singular
/// values at rounding level carry no information and should be discarded.
struct Singular {
    /// Descending.
    values: Vec<f64>,
    /// Left singular vectors as columns (`r × min(r, c)`).
    left: ComplexMatrix,
    /// Right singular vectors as columns (`c × min(r, c)`).
    right: ComplexMatrix,
}

fn singular(m: &ComplexMatrix) -> Singular {
    let (r, c) = m.shape();
    let k = r.min(c);
    let mut jw = zeros(r + c, r + c);
    jw.view_mut((0, r), (r, c)).copy_from(m);
    jw.view_mut((r, 0), (c, r)).copy_from(&m.adjoint());
    let eig = eigh(&jw);
    let mut left = zeros(r, k);
    let mut right = zeros(c, k);
    for j in 0..k {
        let x = eig.eigenvectors.column(j);
        let (u, v) = (x.rows(0, r), x.rows(r, c));
        let (nu, nv) = (u.norm(), v.norm());
        if nu > 0.0 {
            left.set_column(j, &u.unscale(nu));
        }
        if nv > 0.0 {
            right.set_column(j, &v.unscale(nv));
        }
    }
    Singular {
        values: eig.eigenvalues[..k].iter().map(|&s| s.max(0.0)).collect(),
        left,
        right,
    }
}

/// Re-orthonormalise the leading `count` columns (modified Gram-Schmidt, twice).
fn orthonormal_columns(m: &ComplexMatrix, count: usize) -> ComplexMatrix {
    let mut cols: Vec<ComplexVector> = Vec::with_capacity(count);
    for j in 0..count {
        let mut v = m.column(j).into_owned();
        for _ in 0..2 {
            for u in &cols {
                let overlap = u.dotc(&v);
                v.axpy(-overlap, u, real(1.0));
            }
        }
        let norm = v.norm();
        cols.push(v.unscale(norm));
    }
    ComplexMatrix::from_fn(m.nrows(), count, |i, j| cols[j][i])
}

/// Orthonormal basis (as columns) of the complement of the span of the
/// orthonormal columns of `basis`, built by Gram-Schmidt on standard basis
/// vectors in index order.
pub fn orthonormal_complement(basis: &ComplexMatrix) -> ComplexMatrix {
    let n = basis.nrows();
    let mut cols: Vec<ComplexVector> = basis.column_iter().map(|c| c.into_owned()).collect();
    let start = cols.len();
    for i in 0..n {
        if cols.len() == n {
            break;
        }
        let mut v = ComplexVector::zeros(n);
        v[i] = real(1.0);
        for _ in 0..2 {
            for u in &cols {
                let overlap = u.dotc(&v);
                v.axpy(-overlap, u, real(1.0));
            }
        }
        let norm = v.norm();
        if norm > 1e-8 {
            cols.push(v.unscale(norm));
        }
    }
    let extra = &cols[start..];
    ComplexMatrix::from_fn(n, extra.len(), |i, j| extra[j][i])
}

/// Polar decomposition `m = u·p` with `p = √(m†m)` and `u` unitary.
///
/// On the numerical kernel of `p` the unitary is completed by mapping the
/// Gram-Schmidt completion of `ker(p)` onto that of `ran(m)`, both seeded
/// with standard basis vectors in index order. The zero matrix therefore
/// yields `u = I`.
pub fn polar_partial_isometry(
    m: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<(ComplexMatrix, ComplexMatrix), NumericsError> {
    let n = ensure_square(m)?;
    if n == 0 {
        return Ok((zeros(0, 0), zeros(0, 0)));
    }
    let svd = singular(m);
    let sigma_max = svd.values.first().copied().unwrap_or(0.0);
    let threshold = tol.rank_rel_eps * sigma_max;
    let kept = svd.values.iter().take_while(|&&s| s > threshold && s > 0.0).count();
    let left = orthonormal_columns(&svd.left, kept);
    let right = orthonormal_columns(&svd.right, kept);

    let weights = ComplexMatrix::from_diagonal(&ComplexVector::from_fn(kept, |k, _| real(svd.values[k])));
    let p = hermitian_part(&(&right * weights * right.adjoint()));

    let mut u = &left * right.adjoint();
    let range_completion = orthonormal_complement(&left);
    let kernel_completion = orthonormal_complement(&right);
    u += &range_completion * kernel_completion.adjoint();
    Ok((u, p))
}

/// Orthonormal basis of the numerical null space of `m`.
///
/// Singular values at or below `rank_rel_eps · max(1, σ_max)` count as zero,
/// so a matrix that is zero up to rounding has a full null space.
pub fn null_space(m: &ComplexMatrix, tol: &Tolerance) -> Vec<ComplexVector> {
    let cols = m.ncols();
    if cols == 0 {
        return Vec::new();
    }
    let svd = singular(m);
    let sigma_max = svd.values.first().copied().unwrap_or(0.0);
    let threshold = tol.rank_rel_eps * sigma_max.max(1.0);
    let rank = svd.values.iter().take_while(|&&s| s > threshold).count();
    let range = orthonormal_columns(&svd.right, rank);
    orthonormal_complement(&range)
        .column_iter()
        .map(|c| {
            let mut x = c.into_owned();
            fix_phase(&mut x);
            x
        })
        .collect()
}

/// Numerical rank: count of singular values above `rank_rel_eps · σ_max`.
pub fn numerical_rank(m: &ComplexMatrix, tol: &Tolerance) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sigma = singular(m).values;
    let sigma_max = sigma.first().copied().unwrap_or(0.0);
    sigma
        .iter()
        .filter(|&&s| s > tol.rank_rel_eps * sigma_max && s > 0.0)
        .count()
}

/// Accumulates the rows of a tall linear system block by block and keeps
/// only a square triangular factor with the same singular values, so the
/// null space of a very tall stack can be found without storing it.
#[derive(Debug, Clone)]
pub struct StackedSystem {
    cols: usize,
    reduced: ComplexMatrix,
}

impl StackedSystem {
    pub fn new(cols: usize) -> Self {
        Self {
            cols,
            reduced: zeros(0, cols),
        }
    }

    pub fn push(&mut self, block: &ComplexMatrix) {
        assert_eq!(block.ncols(), self.cols, "block width mismatch");
        if block.nrows() == 0 {
            return;
        }
        let top = self.reduced.nrows();
        let mut stacked = zeros(top + block.nrows(), self.cols);
        stacked.rows_mut(0, top).copy_from(&self.reduced);
        stacked.rows_mut(top, block.nrows()).copy_from(block);
        self.reduced = if stacked.nrows() > self.cols {
            stacked.qr().r()
        } else {
            stacked
        };
    }

    pub fn null_space(&self, tol: &Tolerance) -> Vec<ComplexVector> {
        null_space(&self.reduced, tol)
    }
}

/// Gram-Schmidt under the Hilbert-Schmidt inner product.
///
/// Each candidate is orthogonalised twice against the accepted set; it is
/// dropped when its remaining norm is at or below `rank_rel_eps` times the
/// largest input norm.
pub fn hs_orthonormalize(ops: &[ComplexMatrix], tol: &Tolerance) -> Vec<ComplexMatrix> {
    let scale = ops.iter().map(hs_norm).fold(0.0, f64::max);
    let mut basis: Vec<ComplexMatrix> = Vec::new();
    if scale == 0.0 {
        return basis;
    }
    for op in ops {
        if let Some(q) = orthogonalize_against(&basis, op, tol.rank_rel_eps * scale) {
            basis.push(q);
        }
    }
    basis
}

/// Orthogonalise `op` against an orthonormal `basis`; returns the normalised
/// remainder when its norm exceeds `drop_below`.
pub(crate) fn orthogonalize_against(
    basis: &[ComplexMatrix],
    op: &ComplexMatrix,
    drop_below: f64,
) -> Option<ComplexMatrix> {
    let mut r = op.clone();
    for _ in 0..2 {
        for b in basis {
            let overlap = hs_inner(b, &r);
            r -= b * overlap;
        }
    }
    let norm = hs_norm(&r);
    (norm > drop_below).then(|| r.unscale(norm))
}

/// Orthogonal projection of `x` onto the span of an HS-orthonormal basis.
pub fn hs_project(basis: &[ComplexMatrix], x: &ComplexMatrix) -> ComplexMatrix {
    let mut p = zeros(x.nrows(), x.ncols());
    for b in basis {
        p += b * hs_inner(b, x);
    }
    p
}

/// HS norm of the component of `x` orthogonal to the span of `basis`.
pub fn hs_projection_residual(basis: &[ComplexMatrix], x: &ComplexMatrix) -> f64 {
    hs_norm(&(x - hs_project(basis, x)))
}

/// Distance between two operator subspaces given by HS-orthonormal bases:
/// the sine of the largest principal angle, taken in both directions. It is
/// 0 for equal subspaces and 1 whenever the dimensions differ.
pub fn subspace_distance(a: &[ComplexMatrix], b: &[ComplexMatrix]) -> f64 {
    one_sided_distance(a, b).max(one_sided_distance(b, a))
}

fn one_sided_distance(a: &[ComplexMatrix], b: &[ComplexMatrix]) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    let residuals: Vec<ComplexVector> = a.iter().map(|x| vectorize(&(x - hs_project(b, x)))).collect();
    let len = residuals[0].len();
    let stacked = ComplexMatrix::from_fn(len, residuals.len(), |i, j| residuals[j][i]);
    singular(&stacked).values.first().copied().unwrap_or(0.0)
}

/// Orthogonal projector onto the numerical range of a Hermitian PSD matrix,
/// returned as an isometry whose columns span that range.
pub fn range_isometry(psd: &ComplexMatrix, tol: &Tolerance) -> ComplexMatrix {
    let eig = eigh(psd);
    let top = eig.eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
    let rank = eig
        .eigenvalues
        .iter()
        .take_while(|&&l| l > tol.rank_rel_eps * top && l > 0.0)
        .count();
    eig.columns(0..rank)
}

/// Principal square root of a Hermitian PSD matrix (negative rounding noise
/// in the spectrum is clamped to zero).
pub fn psd_sqrt(m: &ComplexMatrix) -> ComplexMatrix {
    let eig = eigh(m);
    let n = m.nrows();
    let mut out = zeros(n, n);
    for (k, &l) in eig.eigenvalues.iter().enumerate() {
        let v = eig.eigenvector(k);
        out += (&v * v.adjoint()).scale(l.max(0.0).sqrt());
    }
    out
}

/// Smallest eigenvalue of the Hermitian part of `m`.
pub fn min_eigenvalue(m: &ComplexMatrix) -> f64 {
    eigh(m).eigenvalues.last().copied().unwrap_or(0.0)
}

/// Block-diagonal direct sum.
pub fn direct_sum(blocks: &[ComplexMatrix]) -> ComplexMatrix {
    let rows = blocks.iter().map(|b| b.nrows()).sum();
    let cols = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = zeros(rows, cols);
    let (mut r, mut c) = (0, 0);
    for b in blocks {
        out.view_mut((r, c), b.shape()).copy_from(b);
        r += b.nrows();
        c += b.ncols();
    }
    out
}

/// Assemble a square block matrix from a row-major grid of equal blocks.
pub fn block_matrix(grid: &[Vec<ComplexMatrix>]) -> ComplexMatrix {
    let br = grid[0][0].nrows();
    let bc = grid[0][0].ncols();
    let mut out = zeros(br * grid.len(), bc * grid[0].len());
    for (i, row) in grid.iter().enumerate() {
        for (j, b) in row.iter().enumerate() {
            out.view_mut((i * br, j * bc), (br, bc)).copy_from(b);
        }
    }
    out
}
