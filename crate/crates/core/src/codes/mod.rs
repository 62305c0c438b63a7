//! Correctable subspace and subsystem codes.
//!
//! A code is a subspace `C ≅ A ⊗ B` of the system space, where `B` carries
//! the protected information and `A` is a gauge factor. Subspace codes are
//! the case `dim A = 1`. This module tests the Knill-Laflamme conditions,
//! builds mixed-unitary normal forms of a channel restricted to a code, and
//! constructs explicit recovery channels with numerical certificates.

mod subspace;
mod subsystem;

pub use subspace::{build_subspace_representation, kl_matrix, mixed_unitary_form, MixedUnitaryForm, SubspaceRepresentation};
pub use subsystem::{
    build_subsystem_recovery, correction_rank, noiseless_check, noiseless_residual, subsystem_correction_form,
    subsystem_kl, CorrectionForm, CorrectionTerm, RecoveryCertificate, TargetKind,
};

use thiserror::Error;

use crate::algebra::AlgebraError;
use crate::channel::{Channel, ChannelError};
use crate::numerics::{identity, max_abs, range_isometry, zeros, ComplexMatrix, Tolerance};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CodeError {
    #[error("invalid code: {0}")]
    InvalidCode(String),
    #[error("code dimension {code} does not match channel dimension {channel}")]
    DimensionMismatch { code: usize, channel: usize },
    #[error("not correctable: worst violation at Kraus pair ({i}, {j}), residual {residual:e}")]
    NotCorrectable { i: usize, j: usize, residual: f64 },
    #[error("not unitarily correctable: correction rank {rank}")]
    NotUcc { rank: usize },
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

impl CodeError {
    /// True for answers that are structured negative results rather than failures.
    pub fn is_negative(&self) -> bool {
        matches!(self, CodeError::NotCorrectable { .. } | CodeError::NotUcc { .. })
    }
}

pub type Result<T> = std::result::Result<T, CodeError>;

/// A subspace `C ⊆ H` with a factorisation `C ≅ A ⊗ B`.
///
/// `embed` is an `n × (dim_a·dim_b)` isometry whose column `a·dim_b + b`
/// is the image of `|a⟩ ⊗ |b⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeSubspace {
    pub projector: ComplexMatrix,
    pub dim_a: usize,
    pub dim_b: usize,
    pub embed: ComplexMatrix,
}

impl CodeSubspace {
    pub fn from_isometry(embed: ComplexMatrix, dim_a: usize, dim_b: usize, tol: &Tolerance) -> Result<Self> {
        let k = dim_a * dim_b;
        if k == 0 {
            return Err(CodeError::InvalidCode("code dimension must be positive".into()));
        }
        if embed.ncols() != k || embed.nrows() < k {
            return Err(CodeError::InvalidCode(format!(
                "isometry is {}x{}, expected n x {k} with n >= {k}",
                embed.nrows(),
                embed.ncols()
            )));
        }
        let residual = max_abs(&(embed.adjoint() * &embed - identity(k)));
        if residual > tol.certify_eps() {
            return Err(CodeError::InvalidCode(format!(
                "columns are not orthonormal (residual {residual:e})"
            )));
        }
        let projector = &embed * embed.adjoint();
        Ok(Self {
            projector,
            dim_a,
            dim_b,
            embed,
        })
    }

    /// Code spanned by standard basis vectors, listed in `A ⊗ B` order.
    pub fn from_basis_indices(n: usize, indices: &[usize], dim_a: usize, dim_b: usize) -> Result<Self> {
        let mut seen = vec![false; n];
        for &i in indices {
            if i >= n || seen[i] {
                return Err(CodeError::InvalidCode(format!(
                    "basis index {i} is out of range or repeated"
                )));
            }
            seen[i] = true;
        }
        if indices.len() != dim_a * dim_b {
            return Err(CodeError::InvalidCode(format!(
                "{} indices given for dims {dim_a}x{dim_b}",
                indices.len()
            )));
        }
        let mut embed = zeros(n, indices.len());
        for (col, &i) in indices.iter().enumerate() {
            embed[(i, col)] = crate::numerics::real(1.0);
        }
        Self::from_isometry(embed, dim_a, dim_b, &Tolerance::default())
    }

    /// Code given by an orthogonal projector; the factorisation uses the
    /// projector's eigenvectors in order.
    pub fn from_projector(projector: &ComplexMatrix, dim_a: usize, dim_b: usize, tol: &Tolerance) -> Result<Self> {
        if projector.nrows() != projector.ncols() {
            return Err(CodeError::InvalidCode("projector is not square".into()));
        }
        let herm = max_abs(&(projector - projector.adjoint()));
        let idem = max_abs(&(projector * projector - projector));
        if herm > tol.abs_eps || idem > tol.certify_eps() {
            return Err(CodeError::InvalidCode(format!(
                "not an orthogonal projector (hermiticity {herm:e}, idempotence {idem:e})"
            )));
        }
        let embed = range_isometry(projector, tol);
        if embed.ncols() != dim_a * dim_b {
            return Err(CodeError::InvalidCode(format!(
                "projector has rank {}, expected {}",
                embed.ncols(),
                dim_a * dim_b
            )));
        }
        Self::from_isometry(embed, dim_a, dim_b, tol)
    }

    /// Ambient dimension `n`.
    pub fn ambient_dim(&self) -> usize {
        self.embed.nrows()
    }

    /// `dim C = dim_a · dim_b`.
    pub fn dim(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn is_subspace_code(&self) -> bool {
        self.dim_a == 1
    }

    /// Place an operator on `A ⊗ B` into the ambient space.
    pub fn lift(&self, x: &ComplexMatrix) -> ComplexMatrix {
        &self.embed * x * self.embed.adjoint()
    }

    /// Compress an ambient operator to `A ⊗ B` coordinates.
    pub fn compress(&self, x: &ComplexMatrix) -> ComplexMatrix {
        self.embed.adjoint() * x * &self.embed
    }

    /// Projector onto the orthogonal complement of `C`.
    pub fn complement_projector(&self) -> ComplexMatrix {
        identity(self.ambient_dim()) - &self.projector
    }

    /// The same code after the unitary change of basis `w`.
    pub fn conjugated(&self, w: &ComplexMatrix) -> Self {
        let embed = w * &self.embed;
        Self {
            projector: &embed * embed.adjoint(),
            dim_a: self.dim_a,
            dim_b: self.dim_b,
            embed,
        }
    }

    pub(crate) fn check_channel(&self, ch: &Channel) -> Result<()> {
        if ch.dim() == self.ambient_dim() {
            Ok(())
        } else {
            Err(CodeError::DimensionMismatch {
                code: self.ambient_dim(),
                channel: ch.dim(),
            })
        }
    }
}

/// Weights of a correction normal form.
#[derive(Debug, Clone, PartialEq)]
pub enum Weights {
    /// Probabilities `p_i` of a mixed-unitary form on a subspace code.
    Probabilities(Vec<f64>),
    /// Positive operators `D_i` on the gauge factor of a subsystem code.
    Operators(Vec<ComplexMatrix>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodeKind {
    Subspace,
    Subsystem,
}

/// Result of a complete correctability analysis of one code.
#[derive(Debug, Clone)]
pub struct CodeReport {
    pub kind: CodeKind,
    /// Knill-Laflamme blocks `F_ij` (`1 × 1` for subspace codes, forming `Λ`).
    pub blocks: Vec<Vec<ComplexMatrix>>,
    pub correction_rank: usize,
    pub unitaries: Vec<ComplexMatrix>,
    pub weights: Weights,
    pub recovery: Channel,
    pub certificate: RecoveryCertificate,
}

impl CodeReport {
    /// For subspace codes, the code matrix `Λ = (λ_ij)`.
    pub fn lambda(&self) -> Option<ComplexMatrix> {
        if self.kind != CodeKind::Subspace {
            return None;
        }
        let r = self.blocks.len();
        Some(ComplexMatrix::from_fn(r, r, |i, j| self.blocks[i][j][(0, 0)]))
    }
}

/// Run the Knill-Laflamme test, the correction normal form and the recovery
/// construction for one code.
pub fn analyze_code(ch: &Channel, code: &CodeSubspace, tol: &Tolerance) -> Result<CodeReport> {
    let blocks = subsystem_kl(ch, code, tol)?;
    let form = subsystem_correction_form(ch, code, tol)?;
    let (recovery, certificate) = build_subsystem_recovery(ch, code, tol)?;
    let kind = if code.is_subspace_code() {
        CodeKind::Subspace
    } else {
        CodeKind::Subsystem
    };
    let weights = match kind {
        CodeKind::Subspace => Weights::Probabilities(form.terms.iter().map(|t| t.d[(0, 0)].re.powi(2)).collect()),
        CodeKind::Subsystem => Weights::Operators(form.terms.iter().map(|t| t.d.clone()).collect()),
    };
    Ok(CodeReport {
        kind,
        blocks,
        correction_rank: form.terms.len(),
        unitaries: form.terms.into_iter().map(|t| t.unitary).collect(),
        weights,
        recovery,
        certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{diag_real, random};

    #[test]
    fn basis_index_codes() {
        let code = CodeSubspace::from_basis_indices(4, &[0, 1], 1, 2).unwrap();
        assert_eq!(code.projector, diag_real(&[1.0, 1.0, 0.0, 0.0]));
        assert!(CodeSubspace::from_basis_indices(4, &[0, 0], 1, 2).is_err());
        assert!(CodeSubspace::from_basis_indices(4, &[0, 7], 1, 2).is_err());
        assert!(CodeSubspace::from_basis_indices(4, &[], 0, 1).is_err());
    }

    #[test]
    fn projector_codes() {
        let tol = Tolerance::default();
        let v = random::isometry(5, 2, &mut random::seeded(2));
        let p = &v * v.adjoint();
        let code = CodeSubspace::from_projector(&p, 1, 2, &tol).unwrap();
        assert!(max_abs(&(code.projector - &p)) < 1e-12);
        assert!(CodeSubspace::from_projector(&p, 1, 3, &tol).is_err());
        assert!(CodeSubspace::from_projector(&diag_real(&[1.0, 0.5]), 1, 1, &tol).is_err());
    }

    #[test]
    fn negative_results_are_flagged() {
        assert!(CodeError::NotUcc { rank: 2 }.is_negative());
        assert!(CodeError::NotCorrectable { i: 0, j: 1, residual: 0.5 }.is_negative());
        assert!(!CodeError::InvalidCode("x".into()).is_negative());
    }
}
