//! Subspace codes: the code matrix `Λ`, the mixed-unitary form of a channel
//! on a correctable subspace, and the representation `π` with its recovery.

use crate::channel::{Channel, KrausMap};
use crate::numerics::{eigh, hermitian_part, identity, max_abs, polar_partial_isometry, zeros, ComplexMatrix, Tolerance};

use super::subsystem::subsystem_kl;
use super::{CodeError, CodeSubspace, Result};

fn require_subspace(code: &CodeSubspace) -> Result<()> {
    if code.is_subspace_code() {
        Ok(())
    } else {
        Err(CodeError::InvalidCode(format!(
            "expected a subspace code, found dims {}x{}",
            code.dim_a, code.dim_b
        )))
    }
}

/// Code matrix `Λ` with `P_C E_i† E_j P_C = λ_ij P_C`.
pub fn kl_matrix(ch: &Channel, code: &CodeSubspace, tol: &Tolerance) -> Result<ComplexMatrix> {
    require_subspace(code)?;
    let blocks = subsystem_kl(ch, code, tol)?;
    let r = blocks.len();
    let lambda = ComplexMatrix::from_fn(r, r, |i, j| blocks[i][j][(0, 0)]);
    Ok(hermitian_part(&lambda))
}

/// The channel on a correctable subspace as `Σ_i p_i U_i ρ U_i†`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedUnitaryForm {
    pub unitaries: Vec<ComplexMatrix>,
    /// Probabilities `p_i`, descending.
    pub weights: Vec<f64>,
}

impl MixedUnitaryForm {
    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = zeros(rho.nrows(), rho.ncols());
        for (u, &p) in self.unitaries.iter().zip(&self.weights) {
            out += (u * rho * u.adjoint()).scale(p);
        }
        out
    }
}

/// Mixed-unitary form on a correctable subspace.
///
/// With `Λ = V diag(d) V†`, the operators `F_i = Σ_j V_ji E_j` satisfy
/// `P_C F_i† F_k P_C = d_i δ_ik P_C`, so the polar decomposition gives
/// `F_i P_C = √d_i U_i P_C`. Only terms with `d_i` above the rank
/// threshold are kept.
pub fn mixed_unitary_form(ch: &Channel, code: &CodeSubspace, tol: &Tolerance) -> Result<MixedUnitaryForm> {
    let lambda = kl_matrix(ch, code, tol)?;
    let eig = eigh(&lambda);
    let top = eig.eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
    let n = code.ambient_dim();
    let mut unitaries = Vec::new();
    let mut weights = Vec::new();
    for (i, &d) in eig.eigenvalues.iter().enumerate() {
        if d <= tol.rank_rel_eps * top || d <= 0.0 {
            continue;
        }
        let mut f = zeros(n, n);
        for (j, e) in ch.kraus().iter().enumerate() {
            f += e * eig.eigenvectors[(j, i)];
        }
        let (u, _) = polar_partial_isometry(&(f * &code.projector), tol).expect("square operator");
        unitaries.push(u);
        weights.push(d);
    }
    Ok(MixedUnitaryForm { unitaries, weights })
}

/// Representation `π(ρ) = Σ_i V_i ρ V_i†` with `V_i = U_i P_C`, and the
/// recovery channel `{V_i†}` completed by the projector onto the complement
/// of `⊕_i Ran(V_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceRepresentation {
    pub isometries: Vec<ComplexMatrix>,
    pub form: MixedUnitaryForm,
    pub recovery: Channel,
}

impl SubspaceRepresentation {
    /// `π(ρ)`.
    pub fn pi(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = zeros(rho.nrows(), rho.ncols());
        for v in &self.isometries {
            out += v * rho * v.adjoint();
        }
        out
    }

    /// Multiplicity of `π`, the number of isometries.
    pub fn multiplicity(&self) -> usize {
        self.isometries.len()
    }
}

pub fn build_subspace_representation(
    ch: &Channel,
    code: &CodeSubspace,
    tol: &Tolerance,
) -> Result<SubspaceRepresentation> {
    let form = mixed_unitary_form(ch, code, tol)?;
    let n = code.ambient_dim();
    let isometries: Vec<ComplexMatrix> = form.unitaries.iter().map(|u| u * &code.projector).collect();
    let mut kraus: Vec<ComplexMatrix> = isometries.iter().map(|v| v.adjoint()).collect();
    let mut covered = zeros(n, n);
    for v in &isometries {
        covered += v * v.adjoint();
    }
    let rest = hermitian_part(&(identity(n) - covered));
    if max_abs(&rest) > tol.certify_eps() {
        kraus.push(rest);
    }
    let recovery = KrausMap::new(kraus)?.into_channel(tol)?;
    Ok(SubspaceRepresentation {
        isometries,
        form,
        recovery,
    })
}
