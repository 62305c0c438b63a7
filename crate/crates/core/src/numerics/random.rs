//! Seeded random matrices for fixtures, property tests and randomized
//! routines. All generators draw from a caller-supplied RNG so results are
//! reproducible from a seed.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::StandardNormal;

use super::{c64, fix_phase, hermitian_part, ComplexMatrix};

/// Deterministic RNG used everywhere a seed is accepted.
pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c64(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// Haar-distributed `n x n` unitary.
pub fn unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    isometry(n, n, rng)
}

/// Haar-distributed isometry with `cols` orthonormal columns in `C^rows`.
pub fn isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    assert!(cols <= rows, "isometry needs cols <= rows");
    let g = ginibre(rows, cols, rng);
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    // Rescale each column by the phase of R's diagonal so the law is Haar.
    let mut out = q.columns(0, cols).into_owned();
    for j in 0..cols {
        let d = r[(j, j)];
        let norm = d.norm();
        if norm > 0.0 {
            let phase = d / norm;
            for i in 0..rows {
                out[(i, j)] *= phase;
            }
        }
    }
    out
}

/// Random Hermitian matrix (GUE-like).
pub fn hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    hermitian_part(&ginibre(n, n, rng))
}

/// Random full-rank density matrix.
pub fn density<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(n, n, rng);
    let p = &g * g.adjoint();
    let tr: f64 = p.diagonal().iter().map(|z| z.re).sum();
    hermitian_part(&p.unscale(tr))
}

/// Random unit vector.
pub fn unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> super::ComplexVector {
    let g = ginibre(n, 1, rng);
    let mut v = g.column(0).into_owned();
    let norm = v.norm();
    v.unscale_mut(norm);
    fix_phase(&mut v);
    v
}

/// Probability vector of length `n` with strictly positive entries.
pub fn weights<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}
