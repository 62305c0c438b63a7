//! Subsystem codes: Knill-Laflamme blocks, the correction normal form with
//! positive weights `D_i`, recovery construction and the noiseless test.

use crate::channel::{Channel, KrausMap};
use crate::numerics::{
    block_matrix, eigh, hermitian_part, identity, kron, matrix_unit, max_abs, min_eigenvalue, partial_trace_b,
    polar_partial_isometry, zeros, ComplexMatrix, Tolerance,
};

use super::{CodeError, CodeSubspace, Result};

/// Compressions `embed† E_i† E_j embed` for every Kraus pair.
fn compressed_products(ch: &Channel, code: &CodeSubspace) -> Vec<Vec<ComplexMatrix>> {
    let images: Vec<ComplexMatrix> = ch.kraus().iter().map(|e| e * &code.embed).collect();
    images
        .iter()
        .map(|ei| images.iter().map(|ej| ei.adjoint() * ej).collect())
        .collect()
}

/// Knill-Laflamme blocks `F_ij` with `P_C E_i† E_j P_C = (F_ij ⊗ I_B) P_C`.
///
/// Each block is read off by a normalised partial trace over `B`; the pair
/// passes when the remainder is at most `abs_eps · ‖E_i‖_F ‖E_j‖_F`. The
/// block operator `(F_ij)` must also be positive semidefinite. On failure
/// the pair with the largest relative violation is reported.
pub fn subsystem_kl(ch: &Channel, code: &CodeSubspace, tol: &Tolerance) -> Result<Vec<Vec<ComplexMatrix>>> {
    code.check_channel(ch)?;
    let (da, db) = (code.dim_a, code.dim_b);
    let norms: Vec<f64> = ch.kraus().iter().map(crate::numerics::hs_norm).collect();
    let products = compressed_products(ch, code);
    let mut worst: Option<(usize, usize, f64, f64)> = None;
    let mut blocks = Vec::with_capacity(products.len());
    for (i, row) in products.iter().enumerate() {
        let mut out = Vec::with_capacity(row.len());
        for (j, m) in row.iter().enumerate() {
            let f = partial_trace_b(m, da, db).unscale(db as f64);
            let residual = max_abs(&(m - kron(&f, &identity(db))));
            let threshold = tol.abs_eps * (norms[i] * norms[j]).max(f64::MIN_POSITIVE);
            let ratio = residual / threshold;
            if ratio > 1.0 && worst.is_none_or(|w| ratio > w.3) {
                worst = Some((i, j, residual, ratio));
            }
            out.push(f);
        }
        blocks.push(out);
    }
    if let Some((i, j, residual, _)) = worst {
        return Err(CodeError::NotCorrectable { i, j, residual });
    }
    let f = block_matrix(&blocks);
    let low = min_eigenvalue(&f);
    if low < -tol.certify_eps() {
        return Err(CodeError::NotCorrectable {
            i: 0,
            j: 0,
            residual: -low,
        });
    }
    Ok(blocks)
}

/// One retained term `V_i (D_i ⊗ I_B)` of the correction normal form.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectionTerm {
    /// Unitary `V_i` on the ambient space.
    pub unitary: ComplexMatrix,
    /// Diagonal positive weight `D_i` on `A`.
    pub d: ComplexMatrix,
    /// Projector onto `Ran(D_i)` in `A`.
    pub support: ComplexMatrix,
}

/// The channel restricted to `I_A ⊗ L(B)` written as `{V_i (D_i ⊗ I_B)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectionForm {
    pub terms: Vec<CorrectionTerm>,
    /// Eigenvalues of the block operator `(F_ij)`, descending.
    pub spectrum: Vec<f64>,
    /// Unitary `U` with `U F U†` diagonal; block `(i, j)` is `U_ij`.
    pub block_unitary: ComplexMatrix,
    /// Indices `i` of the retained terms.
    pub retained: Vec<usize>,
}

impl CorrectionForm {
    /// `‖Σ_i D_i² − I_A‖_max`.
    pub fn weight_sum_residual(&self, dim_a: usize) -> f64 {
        let mut s = zeros(dim_a, dim_a);
        for t in &self.terms {
            s += &t.d * &t.d;
        }
        max_abs(&(s - identity(dim_a)))
    }

    /// The map `σ ↦ Σ_i V_i (D_i ⊗ I_B) σ (D_i ⊗ I_B) V_i†` on operators of `A ⊗ B`.
    pub fn apply(&self, code: &CodeSubspace, sigma: &ComplexMatrix) -> ComplexMatrix {
        let mut out = zeros(code.ambient_dim(), code.ambient_dim());
        for t in &self.terms {
            let k = &t.unitary * code.lift(&kron(&t.d, &identity(code.dim_b)));
            out += &k * code.lift(sigma) * k.adjoint();
        }
        out
    }
}

/// Correction normal form of a correctable subsystem code.
///
/// The block operator `F = (F_ij)` is diagonalised as `F = V Λ V†` with
/// eigenvalues descending; with `U = V†` cut into `dim_a × dim_a` blocks,
/// `G_i = Σ_j E_j (U_ij† ⊗ I_B) P_C` satisfies
/// `P_C G_i† G_j P_C = δ_ij Λ_i ⊗ I_B`, where `Λ_i` holds the `i`-th run of
/// `dim_a` eigenvalues. The polar decomposition `G_i P_C = V_i (D_i ⊗ I_B)`
/// then has diagonal, hence commuting, `D_i = √Λ_i`. Terms whose `D_i`
/// vanishes numerically are dropped.
pub fn subsystem_correction_form(ch: &Channel, code: &CodeSubspace, tol: &Tolerance) -> Result<CorrectionForm> {
    let blocks = subsystem_kl(ch, code, tol)?;
    let (da, db) = (code.dim_a, code.dim_b);
    let r = blocks.len();
    let f = hermitian_part(&block_matrix(&blocks));
    let eig = eigh(&f);
    let u = eig.eigenvectors.adjoint();
    let top = eig.eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
    let threshold = tol.rank_rel_eps * top;

    let mut terms = Vec::new();
    let mut retained = Vec::new();
    for i in 0..r {
        let values: Vec<f64> = eig.eigenvalues[i * da..(i + 1) * da]
            .iter()
            .map(|&l| if l > threshold { l } else { 0.0 })
            .collect();
        if values.iter().all(|&l| l == 0.0) {
            continue;
        }
        let mut g = zeros(code.ambient_dim(), code.ambient_dim());
        for (j, e) in ch.kraus().iter().enumerate() {
            let u_ij = u.view((i * da, j * da), (da, da)).adjoint();
            g += e * code.lift(&kron(&u_ij, &identity(db)));
        }
        let (unitary, _) = polar_partial_isometry(&g, tol).expect("square operator");
        let d = crate::numerics::diag_real(&values.iter().map(|l| l.sqrt()).collect::<Vec<_>>());
        let support = crate::numerics::diag_real(&values.iter().map(|&l| if l > 0.0 { 1.0 } else { 0.0 }).collect::<Vec<_>>());
        terms.push(CorrectionTerm { unitary, d, support });
        retained.push(i);
    }
    Ok(CorrectionForm {
        terms,
        spectrum: eig.eigenvalues,
        block_unitary: u,
        retained,
    })
}

/// Number of retained terms in the correction normal form.
pub fn correction_rank(ch: &Channel, code: &CodeSubspace, tol: &Tolerance) -> Result<usize> {
    Ok(subsystem_correction_form(ch, code, tol)?.terms.len())
}

/// What a recovery certificate compares against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetKind {
    /// `R∘ℰ` acts as the identity on `L(C)`.
    IdentityOnC,
    /// `R∘ℰ` acts as `F_A ⊗ id_B` on `L(C)` for a recovered channel `F_A`.
    FaTensorIdB,
}

/// Numerical evidence that a recovery channel corrects a code.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryCertificate {
    /// Largest of the component residuals below.
    pub residual: f64,
    pub target_kind: TargetKind,
    /// `max ‖(R∘ℰ)(I_A ⊗ ρ_B) − I_A ⊗ ρ_B‖_max` over matrix units `ρ_B`.
    pub identity_residual: f64,
    /// `max ‖P_C (R∘ℰ)(σ_A ⊗ ρ_B) P_C − F_A(σ_A) ⊗ ρ_B‖_max` over matrix units.
    pub fa_residual: f64,
    /// Images `F_A(|a⟩⟨b|)` in row-major order of `(a, b)`.
    pub fa_images: Vec<ComplexMatrix>,
}

impl RecoveryCertificate {
    pub fn passes(&self, eps: f64) -> bool {
        self.residual <= eps
    }
}

/// Recovery channel for a correctable subsystem code, with certificate.
///
/// The Kraus operators are `P_{C_i} V_i†` for the retained terms, where
/// `C_i = Ran(D_i) ⊗ B`, plus the projector onto the complement of the
/// ranges `V_i C_i`. When `Σ D_i² ≠ I_A` the result is followed by
/// complete depolarisation of `A`, which fixes `I_A ⊗ ρ_B`.
pub fn build_subsystem_recovery(
    ch: &Channel,
    code: &CodeSubspace,
    tol: &Tolerance,
) -> Result<(Channel, RecoveryCertificate)> {
    let form = subsystem_correction_form(ch, code, tol)?;
    let n = code.ambient_dim();
    let (da, db) = (code.dim_a, code.dim_b);

    let mut kraus = Vec::with_capacity(form.terms.len() + 1);
    let mut covered = zeros(n, n);
    for t in &form.terms {
        let p_i = code.lift(&kron(&t.support, &identity(db)));
        covered += &t.unitary * &p_i * t.unitary.adjoint();
        kraus.push(p_i * t.unitary.adjoint());
    }
    let rest = hermitian_part(&(identity(n) - covered));
    if max_abs(&rest) > tol.certify_eps() {
        kraus.push(rest);
    }
    let mut map = KrausMap::new(kraus)?;
    if form.weight_sum_residual(da) > tol.certify_eps() {
        map = gauge_depolarizer(code).compose(&map)?;
    }
    let recovery = map.into_channel(tol)?;
    let certificate = certify_recovery(ch, &recovery, code);
    Ok((recovery, certificate))
}

/// Complete depolarisation of `A` on the code, identity projection elsewhere.
fn gauge_depolarizer(code: &CodeSubspace) -> KrausMap {
    let (da, db) = (code.dim_a, code.dim_b);
    let scale = 1.0 / (da as f64).sqrt();
    let mut kraus = Vec::with_capacity(da * da + 1);
    for a in 0..da {
        for b in 0..da {
            kraus.push(code.lift(&kron(&matrix_unit(da, a, b), &identity(db))).scale(scale));
        }
    }
    if code.dim() < code.ambient_dim() {
        kraus.push(code.complement_projector());
    }
    KrausMap::new(kraus).expect("well-formed Kraus family")
}

/// Residuals of `R∘ℰ` against `I_A ⊗ ρ_B` and against `F_A ⊗ id_B`, with
/// `F_A` recovered by a normalised partial trace over `B`.
pub fn certify_recovery(ch: &Channel, recovery: &Channel, code: &CodeSubspace) -> RecoveryCertificate {
    let (da, db) = (code.dim_a, code.dim_b);
    let corrected = |sigma: &ComplexMatrix| recovery.apply_unchecked(&ch.apply_unchecked(&code.lift(sigma)));

    let mut identity_residual: f64 = 0.0;
    for k in 0..db {
        for l in 0..db {
            let sigma = kron(&identity(da), &matrix_unit(db, k, l));
            identity_residual = identity_residual.max(max_abs(&(corrected(&sigma) - code.lift(&sigma))));
        }
    }

    let maximally_mixed = identity(db).unscale(db as f64);
    let fa_images: Vec<ComplexMatrix> = (0..da * da)
        .map(|k| {
            let sigma = kron(&matrix_unit(da, k / da, k % da), &maximally_mixed);
            partial_trace_b(&code.compress(&corrected(&sigma)), da, db)
        })
        .collect();
    let mut fa_residual: f64 = 0.0;
    for (k, image) in fa_images.iter().enumerate() {
        for kb in 0..db {
            for lb in 0..db {
                let unit_b = matrix_unit(db, kb, lb);
                let sigma = kron(&matrix_unit(da, k / da, k % da), &unit_b);
                let expected = kron(image, &unit_b);
                fa_residual = fa_residual.max(max_abs(&(code.compress(&corrected(&sigma)) - expected)));
            }
        }
    }
    RecoveryCertificate {
        residual: identity_residual.max(fa_residual),
        target_kind: if da == 1 { TargetKind::IdentityOnC } else { TargetKind::FaTensorIdB },
        identity_residual,
        fa_residual,
        fa_images,
    }
}

/// `max ‖(ℰ†∘ℰ)(I_A ⊗ ρ_B) − I_A ⊗ ρ_B‖_max` over matrix units `ρ_B`.
pub fn noiseless_residual(ch: &Channel, code: &CodeSubspace) -> f64 {
    let dual = ch.dual();
    let mut worst: f64 = 0.0;
    for k in 0..code.dim_b {
        for l in 0..code.dim_b {
            let sigma = code.lift(&kron(&identity(code.dim_a), &matrix_unit(code.dim_b, k, l)));
            let image = dual.apply_unchecked(&ch.apply_unchecked(&sigma));
            worst = worst.max(max_abs(&(image - sigma)));
        }
    }
    worst
}

/// Whether `B` is a noiseless subsystem of `ℰ†∘ℰ`.
pub fn noiseless_check(ch: &Channel, code: &CodeSubspace, tol: &Tolerance) -> Result<bool> {
    code.check_channel(ch)?;
    Ok(noiseless_residual(ch, code) <= tol.certify_eps())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{diag_real, random};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn identity_channel_on_subsystem() {
        let ch = Channel::identity(4);
        let code = CodeSubspace::from_basis_indices(4, &[0, 1, 2, 3], 2, 2).unwrap();
        let form = subsystem_correction_form(&ch, &code, &tol()).unwrap();
        assert_eq!(form.terms.len(), 1);
        assert!(form.weight_sum_residual(2) < 1e-14);
        let (rec, cert) = build_subsystem_recovery(&ch, &code, &tol()).unwrap();
        assert!(cert.residual < 1e-14);
        assert_eq!(cert.target_kind, TargetKind::FaTensorIdB);
        assert!(rec.tp_residual() < 1e-14);
        assert!(noiseless_check(&ch, &code, &tol()).unwrap());
    }

    #[test]
    fn corner_leak_code_is_fixed_by_the_channel_but_not_its_round_trip() {
        // ℰ fixes span{|1⟩, |2⟩}, but the dual sends |1⟩⟨1| to
        // |1⟩⟨1| + q|3⟩⟨3| through the two leak operators of weight q/2 each.
        let code = crate::fixtures::corner_leak_code();
        for q in [0.0, 0.25, 0.5] {
            let ch = crate::fixtures::corner_leak_channel(q).unwrap();
            for k in 0..2 {
                for l in 0..2 {
                    let sigma = code.lift(&crate::numerics::matrix_unit(2, k, l));
                    assert!(max_abs(&(ch.apply(&sigma).unwrap() - &sigma)) < 1e-15);
                }
            }
            assert!((noiseless_residual(&ch, &code) - q).abs() < 1e-15);
            assert_eq!(noiseless_check(&ch, &code, &tol()).unwrap(), q == 0.0);
        }
    }

    #[test]
    fn dephasing_on_gauge_is_unitarily_correctable() {
        // Dephasing of A in A ⊗ B leaves B untouched.
        let z = kron(&diag_real(&[1.0, -1.0]), &identity(2));
        let p: f64 = 0.3;
        let ch = Channel::validate(vec![identity(4).scale((1.0 - p).sqrt()), z.scale(p.sqrt())], &tol()).unwrap();
        let code = CodeSubspace::from_basis_indices(4, &[0, 1, 2, 3], 2, 2).unwrap();
        let blocks = subsystem_kl(&ch, &code, &tol()).unwrap();
        assert_eq!(blocks.len(), 2);
        assert_eq!(correction_rank(&ch, &code, &tol()).unwrap(), 1);
        let (_, cert) = build_subsystem_recovery(&ch, &code, &tol()).unwrap();
        assert!(cert.residual < 1e-12);
    }

    #[test]
    fn flip_of_protected_factor_is_not_correctable() {
        let x = kron(&identity(2), &crate::numerics::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]));
        let ch = Channel::validate(vec![identity(4).scale(0.5f64.sqrt()), x.scale(0.5f64.sqrt())], &tol()).unwrap();
        let code = CodeSubspace::from_basis_indices(4, &[0, 1, 2, 3], 2, 2).unwrap();
        assert!(matches!(
            subsystem_kl(&ch, &code, &tol()),
            Err(CodeError::NotCorrectable { i: 0, j: 1, .. })
        ));
    }

    #[test]
    fn rotation_invariance_of_block_spectrum() {
        let ch = Channel::identity(4);
        let code = CodeSubspace::from_basis_indices(4, &[0, 1], 1, 2).unwrap();
        let w = random::unitary(4, &mut random::seeded(3));
        let a = subsystem_correction_form(&ch, &code, &tol()).unwrap();
        let b = subsystem_correction_form(&ch.conjugated(&w), &code.conjugated(&w), &tol()).unwrap();
        for (x, y) in a.spectrum.iter().zip(&b.spectrum) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
