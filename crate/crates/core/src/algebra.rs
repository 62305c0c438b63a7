//! Finite-dimensional †-closed operator algebras.
//!
//! An algebra is stored as an HS-orthonormal basis of its span. Every such
//! algebra is unitarily equivalent to a block form `⊕_k (I_{A_k} ⊗ M_{B_k}) ⊕ 0_K`;
//! [`decompose_structure`] computes that unitary and the block shapes, which
//! is how algebras are turned into subspace and subsystem codes.

use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::exec::par_map;
use crate::numerics::{
    c64, hermitian_part, hs_inner, hs_norm, hs_orthonormalize, hs_project, hs_projection_residual,
    identity, kron, matrix_units, max_abs, numerical_rank, orthogonalize_against, polar_partial_isometry,
    random, range_isometry, subspace_distance, unvectorize, vectorize, zeros, ComplexMatrix, StackedSystem,
    Tolerance,
};

/// Maximum number of random draws before a decomposition gives up.
pub const MAX_DRAWS: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("span is not an algebra (closure residual {residual:e})")]
    NotAnAlgebra { residual: f64 },
    #[error("random element stayed degenerate after {attempts} draws")]
    DegenerateRandomElement { attempts: usize },
    #[error("not a *-homomorphism on basis pair ({i}, {j}), residual {residual:e}")]
    NotHomomorphism { i: usize, j: usize, residual: f64 },
    #[error("algebra of dimension {dim} is not a full matrix algebra")]
    NotSimple { dim: usize },
    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: usize, found: usize },
}

/// A †-closed subspace of `M_n` given by an HS-orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraBasis {
    pub dim: usize,
    pub basis: Vec<ComplexMatrix>,
}

impl AlgebraBasis {
    /// Orthonormalised span of `ops` (no closure is imposed).
    pub fn from_span(dim: usize, ops: &[ComplexMatrix], tol: &Tolerance) -> Self {
        Self {
            dim,
            basis: hs_orthonormalize(ops, tol),
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self { dim, basis: Vec::new() }
    }

    pub fn scalars(dim: usize) -> Self {
        Self {
            dim,
            basis: vec![identity(dim).unscale((dim as f64).sqrt())],
        }
    }

    pub fn full(dim: usize) -> Self {
        Self {
            dim,
            basis: matrix_units(dim),
        }
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// HS-orthogonal projection of `x` onto the span.
    pub fn project(&self, x: &ComplexMatrix) -> ComplexMatrix {
        hs_project(&self.basis, x)
    }

    /// HS norm of the part of `x` outside the span.
    pub fn projection_residual(&self, x: &ComplexMatrix) -> f64 {
        hs_projection_residual(&self.basis, x)
    }

    /// Largest residual of adjoint and product closure over basis pairs.
    pub fn closure_residual(&self) -> f64 {
        let d = self.len();
        let adj = self
            .basis
            .iter()
            .map(|b| self.projection_residual(&b.adjoint()))
            .fold(0.0, f64::max);
        let prod = par_map(d, |i| {
            (0..d)
                .map(|j| self.projection_residual(&(&self.basis[i] * &self.basis[j])))
                .fold(0.0, f64::max)
        })
        .into_iter()
        .fold(0.0, f64::max);
        adj.max(prod)
    }

    /// Check closure under adjoints and products within `certify_eps`.
    pub fn verify_closure(&self, tol: &Tolerance) -> Result<(), AlgebraError> {
        let residual = self.closure_residual();
        if residual <= tol.certify_eps() {
            Ok(())
        } else {
            Err(AlgebraError::NotAnAlgebra { residual })
        }
    }

    /// Subspace distance to another algebra (0 when the spans agree).
    pub fn distance(&self, other: &AlgebraBasis) -> f64 {
        subspace_distance(&self.basis, &other.basis)
    }

    /// Projector onto the support `Σ_b ran(b) + ran(b†)`.
    pub fn support_isometry(&self, tol: &Tolerance) -> ComplexMatrix {
        let mut s = zeros(self.dim, self.dim);
        for b in &self.basis {
            s += b * b.adjoint() + b.adjoint() * b;
        }
        range_isometry(&hermitian_part(&s), tol)
    }

    /// Random element with standard complex Gaussian coefficients.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> ComplexMatrix {
        let mut x = zeros(self.dim, self.dim);
        for b in &self.basis {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            x += b * c64(re, im);
        }
        x
    }
}

/// Smallest †-closed, product-closed subspace containing `gens`.
pub fn generate_algebra(dim: usize, gens: &[ComplexMatrix], tol: &Tolerance) -> AlgebraBasis {
    let mut basis = hs_orthonormalize(gens, tol);
    let mut next = 0;
    while next < basis.len() {
        let b = basis[next].clone();
        let mut candidates = vec![b.adjoint()];
        for other in basis.iter().take(next + 1) {
            candidates.push(&b * other);
            candidates.push(other * &b);
        }
        for c in candidates {
            let drop_below = tol.rank_rel_eps * hs_norm(&c).max(1.0);
            if let Some(q) = orthogonalize_against(&basis, &c, drop_below) {
                basis.push(q);
            }
        }
        next += 1;
    }
    AlgebraBasis { dim, basis }
}

/// `{x : x s = s x for every s in ops and every s†}`.
pub fn commutant_of(dim: usize, ops: &[ComplexMatrix], tol: &Tolerance) -> AlgebraBasis {
    let mut sys = StackedSystem::new(dim * dim);
    let blocks = par_map(ops.len(), |k| {
        let s = &ops[k];
        [commutator_block(dim, s), commutator_block(dim, &s.adjoint())]
    });
    for pair in &blocks {
        for block in pair {
            sys.push(block);
        }
    }
    null_space_algebra(dim, &sys, tol)
}

/// Commutant of an algebra (its basis is already †-closed).
pub fn commutant(alg: &AlgebraBasis, tol: &Tolerance) -> AlgebraBasis {
    let mut sys = StackedSystem::new(alg.dim * alg.dim);
    let blocks = par_map(alg.len(), |k| commutator_block(alg.dim, &alg.basis[k]));
    for block in &blocks {
        sys.push(block);
    }
    null_space_algebra(alg.dim, &sys, tol)
}

/// Matrix of `vec(x) ↦ vec(x s − s x)` in row-major vectorisation.
fn commutator_block(dim: usize, s: &ComplexMatrix) -> ComplexMatrix {
    kron(&identity(dim), &s.transpose()) - kron(s, &identity(dim))
}

fn null_space_algebra(dim: usize, sys: &StackedSystem, tol: &Tolerance) -> AlgebraBasis {
    if dim == 0 {
        return AlgebraBasis::zero(0);
    }
    let basis = sys
        .null_space(tol)
        .iter()
        .map(|v| unvectorize(v, dim, dim))
        .collect();
    AlgebraBasis { dim, basis }
}

/// Center `alg ∩ alg'`, found as coefficient vectors `c` with
/// `Σ_j c_j [b_j, b_i] = 0` for every basis element `b_i`.
pub fn center(alg: &AlgebraBasis, tol: &Tolerance) -> AlgebraBasis {
    let d = alg.len();
    if d == 0 {
        return AlgebraBasis::zero(alg.dim);
    }
    let n2 = alg.dim * alg.dim;
    let mut sys = StackedSystem::new(d);
    let blocks = par_map(d, |i| {
        let bi = &alg.basis[i];
        let cols: Vec<_> = alg.basis.iter().map(|bj| vectorize(&(bj * bi - bi * bj))).collect();
        ComplexMatrix::from_fn(n2, d, |r, j| cols[j][r])
    });
    for block in &blocks {
        sys.push(block);
    }
    let elements: Vec<ComplexMatrix> = sys
        .null_space(tol)
        .iter()
        .map(|c| {
            let mut x = zeros(alg.dim, alg.dim);
            for (j, b) in alg.basis.iter().enumerate() {
                x += b * c[j];
            }
            x
        })
        .collect();
    AlgebraBasis::from_span(alg.dim, &elements, tol)
}

/// Shape of one block `I_A ⊗ M_B` of an algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Summand {
    /// Multiplicity factor (the factor the algebra acts trivially on).
    pub dim_a: usize,
    /// Full matrix factor.
    pub dim_b: usize,
}

impl Summand {
    pub fn size(&self) -> usize {
        self.dim_a * self.dim_b
    }
}

/// Unitary `W` and block shapes with `W† alg W = ⊕_k (I_{A_k} ⊗ M_{B_k}) ⊕ 0_K`.
///
/// The columns of `W` list the summands in order, each in `A ⊗ B` order
/// (column `a·dim_b + j` within a summand), followed by the null corner `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraStructure {
    pub transform: ComplexMatrix,
    pub summands: Vec<Summand>,
    pub null_dim: usize,
}

impl AlgebraStructure {
    pub fn dim(&self) -> usize {
        self.transform.nrows()
    }

    fn offset(&self, k: usize) -> usize {
        self.summands[..k].iter().map(Summand::size).sum()
    }

    /// `n × (dim_a·dim_b)` isometry onto the `k`-th summand.
    pub fn summand_isometry(&self, k: usize) -> ComplexMatrix {
        self.transform
            .columns(self.offset(k), self.summands[k].size())
            .into_owned()
    }

    /// Isometry onto the null corner `K`.
    pub fn null_isometry(&self) -> ComplexMatrix {
        let n = self.dim();
        self.transform.columns(n - self.null_dim, self.null_dim).into_owned()
    }

    /// Total dimension `Σ_k dim_b²` of the algebra described.
    pub fn algebra_dim(&self) -> usize {
        self.summands.iter().map(|s| s.dim_b * s.dim_b).sum()
    }

    /// Largest deviation of `W† b W` from the block form over `alg`'s basis.
    pub fn block_residual(&self, alg: &AlgebraBasis) -> f64 {
        alg.basis
            .iter()
            .map(|b| {
                let c = self.transform.adjoint() * b * &self.transform;
                let mut ideal = zeros(c.nrows(), c.ncols());
                for (k, s) in self.summands.iter().enumerate() {
                    let off = self.offset(k);
                    let block = c.view((off, off), (s.size(), s.size())).into_owned();
                    let m_b = crate::numerics::partial_trace_a(&block, s.dim_a, s.dim_b).unscale(s.dim_a as f64);
                    ideal
                        .view_mut((off, off), (s.size(), s.size()))
                        .copy_from(&kron(&identity(s.dim_a), &m_b));
                }
                max_abs(&(c - ideal))
            })
            .fold(0.0, f64::max)
    }

    /// The algebra `W (⊕_k I_{A_k} ⊗ M_{B_k} ⊕ 0) W†` described by this structure.
    pub fn rebuild(&self, tol: &Tolerance) -> AlgebraBasis {
        let n = self.dim();
        let mut ops = Vec::with_capacity(self.algebra_dim());
        for k in 0..self.summands.len() {
            let s = self.summands[k];
            let iso = self.summand_isometry(k);
            for unit in matrix_units(s.dim_b) {
                ops.push(&iso * kron(&identity(s.dim_a), &unit) * iso.adjoint());
            }
        }
        AlgebraBasis::from_span(n, &ops, tol)
    }
}

/// Split descending eigenvalues into runs whose consecutive gaps are at most `split`.
fn clusters(eigenvalues: &[f64], split: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=eigenvalues.len() {
        if i == eigenvalues.len() || eigenvalues[i - 1] - eigenvalues[i] > split {
            out.push(start..i);
            start = i;
        }
    }
    out
}

/// Smallest gap between neighbouring clusters, relative to the spectral scale.
fn separation(eigenvalues: &[f64], groups: &[std::ops::Range<usize>]) -> f64 {
    let scale = eigenvalues.iter().map(|l| l.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    groups
        .windows(2)
        .map(|w| (eigenvalues[w[0].end - 1] - eigenvalues[w[1].start]) / scale)
        .fold(f64::INFINITY, f64::min)
}

/// Eigenvalues closer than this (relative) are merged into one cluster.
const CLUSTER_SPLIT: f64 = 1e-7;
/// A draw is accepted only if distinct clusters are at least this far apart.
const MIN_SEPARATION: f64 = 1e-4;

/// Compute the block structure of an algebra.
///
/// The support of the algebra splits off the null corner. A seeded random
/// Hermitian central element has one eigenvalue per minimal central
/// projection; each eigenspace carries one summand. Inside a summand, a
/// random Hermitian element has `dim_b` eigenvalues of multiplicity `dim_a`,
/// and a second random element links those eigenspaces into matrix units,
/// from which the columns of `W` are assembled.
pub fn decompose_structure(
    alg: &AlgebraBasis,
    tol: &Tolerance,
    seed: u64,
) -> Result<AlgebraStructure, AlgebraError> {
    let n = alg.dim;
    if alg.is_empty() {
        return Ok(AlgebraStructure {
            transform: identity(n),
            summands: Vec::new(),
            null_dim: n,
        });
    }
    alg.verify_closure(tol)?;
    let mut rng = random::seeded(seed);

    let support = alg.support_isometry(tol);
    let null_part = crate::numerics::orthonormal_complement(&support);
    let z = center(alg, tol);
    let compressed_center = compress(&z, &support, tol);

    let mut blocks = None;
    for _ in 0..MAX_DRAWS {
        let h = hermitian_part(&compressed_center.random_element(&mut rng));
        let eig = crate::numerics::eigh(&h);
        let groups = clusters(&eig.eigenvalues, CLUSTER_SPLIT * spectral_scale(&eig.eigenvalues));
        if groups.len() == z.len() && (groups.len() == 1 || separation(&eig.eigenvalues, &groups) > MIN_SEPARATION) {
            blocks = Some(groups.into_iter().map(|g| &support * eig.columns(g)).collect::<Vec<_>>());
            break;
        }
    }
    let blocks = blocks.ok_or(AlgebraError::DegenerateRandomElement { attempts: MAX_DRAWS })?;

    let mut parts: Vec<(Summand, f64, ComplexMatrix)> = Vec::with_capacity(blocks.len());
    for q in blocks {
        let (summand, local) = decompose_factor(alg, &q, tol, &mut rng)?;
        let projector = &q * q.adjoint();
        let centroid: f64 = (0..n).map(|i| i as f64 * projector[(i, i)].re).sum();
        parts.push((summand, centroid, &q * local));
    }
    parts.sort_by(|a, b| {
        (b.0.dim_b, b.0.dim_a)
            .cmp(&(a.0.dim_b, a.0.dim_a))
            .then(a.1.total_cmp(&b.1))
    });

    let mut transform = zeros(n, n);
    let mut col = 0;
    for (_, _, w) in &parts {
        transform.columns_mut(col, w.ncols()).copy_from(w);
        col += w.ncols();
    }
    transform.columns_mut(col, null_part.ncols()).copy_from(&null_part);
    let (polished, _) = polar_partial_isometry(&transform, tol).expect("square transform");

    Ok(AlgebraStructure {
        transform: polished,
        summands: parts.iter().map(|p| p.0).collect(),
        null_dim: null_part.ncols(),
    })
}

fn spectral_scale(eigenvalues: &[f64]) -> f64 {
    eigenvalues.iter().map(|l| l.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE)
}

/// The algebra `{q† b q}` on the range of the isometry `q`.
fn compress(alg: &AlgebraBasis, q: &ComplexMatrix, tol: &Tolerance) -> AlgebraBasis {
    let ops: Vec<ComplexMatrix> = alg.basis.iter().map(|b| q.adjoint() * b * q).collect();
    AlgebraBasis::from_span(q.ncols(), &ops, tol)
}

/// Structure of a factor `I_A ⊗ M_B` living on the range of `q`. Returns the
/// shape and a unitary on that range whose columns are in `A ⊗ B` order.
fn decompose_factor<R: Rng + ?Sized>(
    alg: &AlgebraBasis,
    q: &ComplexMatrix,
    tol: &Tolerance,
    rng: &mut R,
) -> Result<(Summand, ComplexMatrix), AlgebraError> {
    let size = q.ncols();
    let restricted = compress(alg, q, tol);
    let d = restricted.len();
    let dim_b = (d as f64).sqrt().round() as usize;
    if dim_b == 0 || dim_b * dim_b != d || !size.is_multiple_of(dim_b) {
        return Err(AlgebraError::NotAnAlgebra {
            residual: f64::NAN,
        });
    }
    let dim_a = size / dim_b;
    let summand = Summand { dim_a, dim_b };
    if dim_b == 1 {
        return Ok((summand, identity(size)));
    }

    for _ in 0..MAX_DRAWS {
        let h = hermitian_part(&restricted.random_element(rng));
        let eig = crate::numerics::eigh(&h);
        let groups = clusters(&eig.eigenvalues, CLUSTER_SPLIT * spectral_scale(&eig.eigenvalues));
        if groups.len() != dim_b
            || groups.iter().any(|g| g.len() != dim_a)
            || separation(&eig.eigenvalues, &groups) <= MIN_SEPARATION
        {
            continue;
        }
        let spaces: Vec<ComplexMatrix> = groups.into_iter().map(|g| eig.columns(g)).collect();
        let link = restricted.random_element(rng);
        let links: Vec<ComplexMatrix> = spaces.iter().map(|e| e.adjoint() * &link * &spaces[0]).collect();
        let norms: Vec<f64> = links.iter().map(hs_norm).collect();
        let max_norm = norms.iter().copied().fold(0.0, f64::max);
        if norms.iter().any(|&x| x <= MIN_SEPARATION * max_norm) {
            continue;
        }
        let scale = (dim_a as f64).sqrt();
        let mut local = zeros(size, size);
        for (j, (e, t)) in spaces.iter().zip(&links).enumerate() {
            let mapped = e * t.scale(scale / norms[j]);
            for a in 0..dim_a {
                local.set_column(a * dim_b + j, &mapped.column(a));
            }
        }
        return Ok((summand, local));
    }
    Err(AlgebraError::DegenerateRandomElement { attempts: MAX_DRAWS })
}

/// Multiplicity `m` of a representation of a full matrix algebra.
///
/// `alg_in` must be (unitarily) a single `M_d` block; `images[i]` is the
/// image of `alg_in.basis[i]`. The map is first checked to be a
/// *-homomorphism on basis pairs; then `m = rank(π(unit)) / d`.
pub fn representation_multiplicity(
    alg_in: &AlgebraBasis,
    images: &[ComplexMatrix],
    tol: &Tolerance,
) -> Result<usize, AlgebraError> {
    let d2 = alg_in.len();
    if images.len() != d2 {
        return Err(AlgebraError::ShapeMismatch {
            expected: d2,
            found: images.len(),
        });
    }
    let d = (d2 as f64).sqrt().round() as usize;
    if d == 0 || d * d != d2 {
        return Err(AlgebraError::NotSimple { dim: d2 });
    }
    let out_dim = images[0].nrows();
    let pi = |x: &ComplexMatrix| {
        let mut y = zeros(out_dim, out_dim);
        for (b, img) in alg_in.basis.iter().zip(images) {
            y += img * hs_inner(b, x);
        }
        y
    };
    let eps = tol.certify_eps();
    for i in 0..d2 {
        let bi = &alg_in.basis[i];
        let adj = max_abs(&(pi(&bi.adjoint()) - images[i].adjoint()));
        if adj > eps {
            return Err(AlgebraError::NotHomomorphism { i, j: i, residual: adj });
        }
        for j in 0..d2 {
            let r = max_abs(&(pi(&(bi * &alg_in.basis[j])) - &images[i] * &images[j]));
            if r > eps {
                return Err(AlgebraError::NotHomomorphism { i, j, residual: r });
            }
        }
    }
    let support = alg_in.support_isometry(tol);
    let unit = &support * support.adjoint();
    let rank = numerical_rank(&pi(&unit), tol);
    if !rank.is_multiple_of(d) {
        return Err(AlgebraError::NotSimple { dim: d2 });
    }
    Ok(rank / d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{block_matrix, direct_sum, from_real_rows, real};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn flip() -> ComplexMatrix {
        from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
    }

    #[test]
    fn generate_scalars_and_flip() {
        assert_eq!(generate_algebra(3, &[identity(3)], &tol()).len(), 1);
        let alg = generate_algebra(2, &[flip()], &tol());
        assert_eq!(alg.len(), 2);
        // X² = I, so the span is {I, X}
        let by_hand = AlgebraBasis::from_span(2, &[identity(2), flip()], &tol());
        assert!(alg.distance(&by_hand) < 1e-12);
    }

    #[test]
    fn commutant_of_scalars_and_full() {
        assert_eq!(commutant(&AlgebraBasis::scalars(3), &tol()).len(), 9);
        assert_eq!(commutant(&AlgebraBasis::full(3), &tol()).len(), 1);
    }

    #[test]
    fn commutant_of_flip_on_first_factor() {
        // Brute-force membership: [[A,B],[B,A]] commutes with X ⊗ I by direct multiplication.
        let x_i = kron(&flip(), &identity(2));
        let alg = generate_algebra(4, &[identity(4), x_i.clone()], &tol());
        let comm = commutant(&alg, &tol());
        assert_eq!(comm.len(), 8);
        let mut rng = random::seeded(1);
        let a = random::ginibre(2, 2, &mut rng);
        let b = random::ginibre(2, 2, &mut rng);
        let m = block_matrix(&[vec![a.clone(), b.clone()], vec![b, a]]);
        assert!(max_abs(&(&m * &x_i - &x_i * &m)) < 1e-13);
        assert!(comm.projection_residual(&m) < 1e-12);
    }

    #[test]
    fn bicommutant_recovers_unital_algebra() {
        let mut rng = random::seeded(3);
        let w = random::unitary(5, &mut rng);
        let gens = vec![
            &w * direct_sum(&[kron(&identity(2), &random::ginibre(2, 2, &mut rng)), random::ginibre(1, 1, &mut rng)]) * w.adjoint(),
            identity(5),
        ];
        let alg = generate_algebra(5, &gens, &tol());
        let bi = commutant(&commutant(&alg, &tol()), &tol());
        assert!(alg.distance(&bi) < 1e-8);
    }

    #[test]
    fn center_of_block_algebra() {
        let a = direct_sum(&[random::ginibre(2, 2, &mut random::seeded(2)), random::ginibre(1, 1, &mut random::seeded(9))]);
        let alg = generate_algebra(3, &[a], &tol());
        let z = center(&alg, &tol());
        assert_eq!(alg.len(), 5);
        assert_eq!(z.len(), 2);
    }

    #[test]
    fn structure_of_full_algebra() {
        let s = decompose_structure(&AlgebraBasis::full(3), &tol(), 0).unwrap();
        assert_eq!(s.summands, vec![Summand { dim_a: 1, dim_b: 3 }]);
        assert_eq!(s.null_dim, 0);
    }

    #[test]
    fn structure_of_two_qubit_blocks() {
        let x_i = kron(&flip(), &identity(2));
        let comm = commutant(&generate_algebra(4, &[identity(4), x_i], &tol()), &tol());
        let s = decompose_structure(&comm, &tol(), 7).unwrap();
        assert_eq!(s.summands, vec![Summand { dim_a: 1, dim_b: 2 }; 2]);
        assert_eq!(s.null_dim, 0);
        assert!(s.block_residual(&comm) < 1e-10);
        assert!(s.rebuild(&tol()).distance(&comm) < 1e-10);
    }

    #[test]
    fn structure_with_multiplicity_and_null_corner() {
        let mut rng = random::seeded(11);
        let w = random::unitary(7, &mut rng);
        let ops: Vec<ComplexMatrix> = matrix_units(2)
            .into_iter()
            .map(|u| &w * direct_sum(&[kron(&identity(3), &u), zeros(1, 1)]) * w.adjoint())
            .collect();
        let alg = AlgebraBasis::from_span(7, &ops, &tol());
        let s = decompose_structure(&alg, &tol(), 0).unwrap();
        assert_eq!(s.summands, vec![Summand { dim_a: 3, dim_b: 2 }]);
        assert_eq!(s.null_dim, 1);
        assert!(s.block_residual(&alg) < 1e-10);
        let again = decompose_structure(&alg, &tol(), 0).unwrap();
        assert_eq!(s, again);
    }

    #[test]
    fn structure_rejects_non_algebra() {
        let alg = AlgebraBasis::from_span(2, &[from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]])], &tol());
        assert!(matches!(
            decompose_structure(&alg, &tol(), 0),
            Err(AlgebraError::NotAnAlgebra { .. })
        ));
    }

    #[test]
    fn multiplicity_examples() {
        let full = AlgebraBasis::full(2);
        assert_eq!(representation_multiplicity(&full, &full.basis, &tol()).unwrap(), 1);
        let doubled: Vec<_> = full.basis.iter().map(|b| direct_sum(&[b.clone(), b.clone()])).collect();
        assert_eq!(representation_multiplicity(&full, &doubled, &tol()).unwrap(), 2);
        let transposed: Vec<_> = full.basis.iter().map(|b| b.transpose()).collect();
        assert!(matches!(
            representation_multiplicity(&full, &transposed, &tol()),
            Err(AlgebraError::NotHomomorphism { .. })
        ));
        assert_eq!(real(1.0), hs_inner(&full.basis[0], &full.basis[0]));
    }
}
