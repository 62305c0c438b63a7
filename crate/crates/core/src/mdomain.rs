//! Multiplicative domains and unitarily correctable codes.
//!
//! The multiplicative domain of a completely positive map `φ` is the largest
//! algebra on which `φ` is multiplicative in both slots:
//! `φ(ab) = φ(a)φ(b)` and `φ(ba) = φ(b)φ(a)` for every `b`. By bilinearity
//! it suffices to test `b` on matrix units, which makes it the null space
//! of a linear system on `vec(a)`. Every code encoded in the multiplicative
//! domain of a channel is unitarily correctable for that channel.

use thiserror::Error;

use crate::algebra::{commutant_of, decompose_structure, AlgebraBasis, AlgebraError, AlgebraStructure};
use crate::channel::{Channel, KrausMap};
use crate::codes::{subsystem_correction_form, CodeError, CodeSubspace};
use crate::exec::par_map;
use crate::numerics::{
    hs_orthonormalize, identity, kron, matrix_unit, max_abs, subspace_distance, unvectorize, zeros, ComplexMatrix,
    StackedSystem, Tolerance,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MdError {
    #[error("map is not a unital channel (residual {residual:e})")]
    NotUnital { residual: f64 },
    #[error("basis element {index} fails the quadratic multiplicativity test (residual {residual:e})")]
    QuadraticMismatch { index: usize, residual: f64 },
    #[error("basis element {index} is not a fixed point of the dual-channel composition (residual {residual:e})")]
    FixedPointViolation { index: usize, residual: f64 },
    #[error("summand {summand} of the multiplicative domain has correction rank {rank}")]
    RankNotOne { summand: usize, rank: usize },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Code(#[from] CodeError),
}

pub type Result<T> = std::result::Result<T, MdError>;

/// Multiplicative domain of a map together with its block structure.
#[derive(Debug, Clone, PartialEq)]
pub struct MdResult {
    pub md: AlgebraBasis,
    pub structure: AlgebraStructure,
    /// Whether the map sends `I` to `I` within `abs_eps`.
    pub is_unital: bool,
}

/// Linear constraints on `vec(σ)` for one matrix unit `E_lm`:
/// `φ(E_lm σ) − φ(E_lm)φ(σ)` and `φ(σ E_lm) − φ(σ)φ(E_lm)`.
fn md_blocks(s: &ComplexMatrix, image: &ComplexMatrix, unit: &ComplexMatrix, n: usize) -> [ComplexMatrix; 2] {
    let id = identity(n);
    let left = s * kron(unit, &id) - kron(image, &id) * s;
    let right = s * kron(&id, &unit.transpose()) - kron(&id, &image.transpose()) * s;
    [left, right]
}

/// Multiplicative domain by a null-space solve over all matrix units.
///
/// The map need not be trace preserving. Closure of the result is verified,
/// and the block structure is computed with the given seed.
pub fn compute_md(map: &KrausMap, tol: &Tolerance, seed: u64) -> Result<MdResult> {
    let n = map.dim();
    let s = map.superoperator();
    let blocks = par_map(n * n, |k| {
        let unit = matrix_unit(n, k / n, k % n);
        let image = map.apply_unchecked(&unit);
        md_blocks(&s, &image, &unit, n)
    });
    let mut sys = StackedSystem::new(n * n);
    for pair in &blocks {
        for b in pair {
            sys.push(b);
        }
    }
    let md = AlgebraBasis {
        dim: n,
        basis: sys.null_space(tol).iter().map(|v| unvectorize(v, n, n)).collect(),
    };
    let structure = decompose_structure(&md, tol, seed)?;
    Ok(MdResult {
        md,
        structure,
        is_unital: map.unital_residual() <= tol.abs_eps,
    })
}

/// `max(‖φ(ab) − φ(a)φ(b)‖_max, ‖φ(ba) − φ(b)φ(a)‖_max)`.
pub fn multiplicativity_residual(map: &KrausMap, a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let fa = map.apply_unchecked(a);
    let fb = map.apply_unchecked(b);
    let left = max_abs(&(map.apply_unchecked(&(a * b)) - &fa * &fb));
    let right = max_abs(&(map.apply_unchecked(&(b * a)) - &fb * &fa));
    left.max(right)
}

fn require_unital_channel(map: &KrausMap, tol: &Tolerance) -> Result<()> {
    let residual = map.unital_residual().max(map.tp_residual());
    if residual <= tol.abs_eps {
        Ok(())
    } else {
        Err(MdError::NotUnital { residual })
    }
}

/// Multiplicative domain of a unital channel, cross-checked against the
/// quadratic characterisation `φ(a)†φ(a) = φ(a†a)`, `φ(a)φ(a)† = φ(aa†)`.
pub fn md_unital_check(map: &KrausMap, tol: &Tolerance, seed: u64) -> Result<AlgebraBasis> {
    require_unital_channel(map, tol)?;
    let result = compute_md(map, tol, seed)?;
    for (index, a) in result.md.basis.iter().enumerate() {
        let fa = map.apply_unchecked(a);
        let r1 = max_abs(&(fa.adjoint() * &fa - map.apply_unchecked(&(a.adjoint() * a))));
        let r2 = max_abs(&(&fa * fa.adjoint() - map.apply_unchecked(&(a * a.adjoint()))));
        let residual = r1.max(r2);
        if residual > tol.certify_eps() {
            return Err(MdError::QuadraticMismatch { index, residual });
        }
    }
    Ok(result.md)
}

/// The algebra of unitarily correctable codes of a unital channel: the
/// commutant of `{E_i† E_j}`, checked to be fixed by `ℰ†∘ℰ`.
pub fn ucc_algebra_unital(map: &KrausMap, tol: &Tolerance) -> Result<AlgebraBasis> {
    require_unital_channel(map, tol)?;
    let kraus = map.kraus();
    let gens: Vec<ComplexMatrix> = kraus
        .iter()
        .flat_map(|ei| kraus.iter().map(move |ej| ei.adjoint() * ej))
        .collect();
    let alg = commutant_of(map.dim(), &gens, tol);
    let dual = map.dual();
    for (index, a) in alg.basis.iter().enumerate() {
        let residual = max_abs(&(dual.apply_unchecked(&map.apply_unchecked(a)) - a));
        if residual > tol.certify_eps() {
            return Err(MdError::FixedPointViolation { index, residual });
        }
    }
    Ok(alg)
}

/// The four algebras that coincide for a unital channel, with their
/// pairwise subspace distances.
#[derive(Debug, Clone)]
pub struct FourAlgebraReport {
    /// `MD(ℰ)`, `UCC(ℰ)`, `ℰ†(MD(ℰ†))`, `ℰ†(UCC(ℰ†))`.
    pub algebras: [AlgebraBasis; 4],
    /// `(i, j, distance)` for `i < j`.
    pub distances: Vec<(usize, usize, f64)>,
}

impl FourAlgebraReport {
    pub fn max_distance(&self) -> f64 {
        self.distances.iter().map(|d| d.2).fold(0.0, f64::max)
    }
}

pub const FOUR_ALGEBRA_NAMES: [&str; 4] = ["MD(E)", "UCC(E)", "E*(MD(E*))", "E*(UCC(E*))"];

pub fn four_algebra_check(map: &KrausMap, tol: &Tolerance, seed: u64) -> Result<FourAlgebraReport> {
    require_unital_channel(map, tol)?;
    let dual = map.dual();
    let image = |alg: &AlgebraBasis| {
        let ops: Vec<ComplexMatrix> = alg.basis.iter().map(|a| dual.apply_unchecked(a)).collect();
        AlgebraBasis {
            dim: alg.dim,
            basis: hs_orthonormalize(&ops, tol),
        }
    };
    let md = compute_md(map, tol, seed)?.md;
    let ucc = ucc_algebra_unital(map, tol)?;
    let md_dual = image(&compute_md(&dual, tol, seed)?.md);
    let ucc_dual = image(&ucc_algebra_unital(&dual, tol)?);
    let algebras = [md, ucc, md_dual, ucc_dual];
    let mut distances = Vec::with_capacity(6);
    for i in 0..4 {
        for j in i + 1..4 {
            distances.push((i, j, subspace_distance(&algebras[i].basis, &algebras[j].basis)));
        }
    }
    Ok(FourAlgebraReport { algebras, distances })
}

/// A unitarily correctable code: `ℰ(σ) = U (F_A ⊗ id_B)(σ) U†` for every
/// operator `σ` supported on the code.
#[derive(Debug, Clone, PartialEq)]
pub struct UccCode {
    pub code: CodeSubspace,
    /// `U†`, the single unitary that undoes the channel on `B`.
    pub recovery_unitary: ComplexMatrix,
    /// Kraus operators of the gauge channel `F_A` on `A`.
    pub fa_kraus: Vec<ComplexMatrix>,
    /// `max ‖ℰ(σ) − U (F_A ⊗ id_B)(σ) U†‖_max` over matrix units of `L(C)`.
    pub residual: f64,
}

impl UccCode {
    /// `‖Σ K†K − I_A‖_max` for the gauge channel.
    pub fn fa_tp_residual(&self) -> f64 {
        let da = self.code.dim_a;
        let mut s = zeros(da, da);
        for k in &self.fa_kraus {
            s += k.adjoint() * k;
        }
        max_abs(&(s - identity(da)))
    }

    /// Whether the gauge channel is the identity, i.e. the code is noiseless
    /// up to the recovery unitary.
    pub fn gauge_is_trivial(&self, eps: f64) -> bool {
        let da = self.code.dim_a;
        (0..da * da).all(|k| {
            let unit = matrix_unit(da, k / da, k % da);
            let mut out = zeros(da, da);
            for f in &self.fa_kraus {
                out += f * &unit * f.adjoint();
            }
            max_abs(&(out - unit)) <= eps
        })
    }
}

/// Decide whether a code is unitarily correctable (correction rank 1).
///
/// On success, `ℰ` restricted to the code is `U (F_A ⊗ id_B) U†` with
/// `U = V_1` from the correction normal form and `F_A` with Kraus operators
/// `D_1 U_1j`; the certificate compares both sides on matrix units.
pub fn verify_ucc(ch: &Channel, code: &CodeSubspace, tol: &Tolerance) -> std::result::Result<UccCode, CodeError> {
    let form = subsystem_correction_form(ch, code, tol)?;
    if form.terms.len() != 1 {
        return Err(CodeError::NotUcc { rank: form.terms.len() });
    }
    let (da, db) = (code.dim_a, code.dim_b);
    let term = &form.terms[0];
    let i = form.retained[0];
    let fa_kraus: Vec<ComplexMatrix> = (0..ch.len())
        .map(|j| &term.d * form.block_unitary.view((i * da, j * da), (da, da)))
        .collect();
    let u = &term.unitary;
    let mut residual: f64 = 0.0;
    for ka in 0..da * da {
        let unit_a = matrix_unit(da, ka / da, ka % da);
        let mut fa = zeros(da, da);
        for f in &fa_kraus {
            fa += f * &unit_a * f.adjoint();
        }
        for kb in 0..db * db {
            let unit_b = matrix_unit(db, kb / db, kb % db);
            let actual = ch.apply_unchecked(&code.lift(&kron(&unit_a, &unit_b)));
            let expected = u * code.lift(&kron(&fa, &unit_b)) * u.adjoint();
            residual = residual.max(max_abs(&(actual - expected)));
        }
    }
    Ok(UccCode {
        code: code.clone(),
        recovery_unitary: u.adjoint(),
        fa_kraus,
        residual,
    })
}

/// Codes encoded in the multiplicative domain of a channel, each verified
/// to be unitarily correctable. Summands with `dim_b = 1` carry no quantum
/// information and are skipped.
pub fn extract_ucc_from_md(ch: &Channel, tol: &Tolerance, seed: u64) -> Result<Vec<UccCode>> {
    let result = compute_md(ch, tol, seed)?;
    let mut codes = Vec::new();
    for (k, s) in result.structure.summands.iter().enumerate() {
        if s.dim_b < 2 {
            continue;
        }
        let code = CodeSubspace::from_isometry(result.structure.summand_isometry(k), s.dim_a, s.dim_b, tol)?;
        match verify_ucc(ch, &code, tol) {
            Ok(ucc) => codes.push(ucc),
            Err(CodeError::NotUcc { rank }) => return Err(MdError::RankNotOne { summand: k, rank }),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(codes)
}
