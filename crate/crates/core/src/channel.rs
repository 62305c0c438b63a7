//! Quantum operations given as Kraus families.
//!
//! A [`KrausMap`] is any completely positive map `ρ ↦ Σ_i E_i ρ E_i†` on
//! `M_n`; it need not preserve trace, which is what duals of non-unital
//! channels look like. A [`Channel`] is a `KrausMap` that has been checked
//! to be trace preserving and carries its unitality flag.

use std::ops::Deref;

use thiserror::Error;

use crate::numerics::{identity, max_abs, zeros, ComplexMatrix, Tolerance};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("Kraus family is empty")]
    Empty,
    #[error("Kraus operator {index} is not square: {rows}x{cols}")]
    NotSquare { index: usize, rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("Kraus operator {index} has a non-finite entry")]
    NonFinite { index: usize },
    #[error("not trace preserving: ‖Σ E_i†E_i − I‖_max = {residual:e}")]
    NotTracePreserving { residual: f64 },
}

/// Completely positive map in Kraus form.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausMap {
    dim: usize,
    kraus: Vec<ComplexMatrix>,
}

impl KrausMap {
    /// Check shapes and finiteness; no trace condition is imposed.
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self, ChannelError> {
        let first = kraus.first().ok_or(ChannelError::Empty)?;
        let dim = first.nrows();
        for (index, k) in kraus.iter().enumerate() {
            if k.nrows() != k.ncols() {
                return Err(ChannelError::NotSquare {
                    index,
                    rows: k.nrows(),
                    cols: k.ncols(),
                });
            }
            if k.nrows() != dim {
                return Err(ChannelError::ShapeMismatch {
                    expected: dim,
                    found: k.nrows(),
                });
            }
            if k.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(ChannelError::NonFinite { index });
            }
        }
        Ok(Self { dim, kraus })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn len(&self) -> usize {
        self.kraus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kraus.is_empty()
    }

    fn check_dim(&self, m: &ComplexMatrix) -> Result<(), ChannelError> {
        if m.nrows() == self.dim && m.ncols() == self.dim {
            Ok(())
        } else {
            Err(ChannelError::ShapeMismatch {
                expected: self.dim,
                found: if m.nrows() != self.dim { m.nrows() } else { m.ncols() },
            })
        }
    }

    /// `Σ_i E_i ρ E_i†`. Any square matrix of the right size is accepted.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix, ChannelError> {
        self.check_dim(rho)?;
        Ok(self.apply_unchecked(rho))
    }

    pub(crate) fn apply_unchecked(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = zeros(self.dim, self.dim);
        for e in &self.kraus {
            out += e * rho * e.adjoint();
        }
        out
    }

    /// Heisenberg-picture dual with Kraus family `{E_i†}`.
    pub fn dual(&self) -> KrausMap {
        KrausMap {
            dim: self.dim,
            kraus: self.kraus.iter().map(|e| e.adjoint()).collect(),
        }
    }

    /// `self ∘ inner`, with Kraus family `{A_i B_j}` (index `i` outer).
    pub fn compose(&self, inner: &KrausMap) -> Result<KrausMap, ChannelError> {
        if self.dim != inner.dim {
            return Err(ChannelError::ShapeMismatch {
                expected: self.dim,
                found: inner.dim,
            });
        }
        let kraus = self
            .kraus
            .iter()
            .flat_map(|a| inner.kraus.iter().map(move |b| a * b))
            .collect();
        Ok(KrausMap {
            dim: self.dim,
            kraus,
        })
    }

    /// `‖Σ E_i†E_i − I‖_max`.
    pub fn tp_residual(&self) -> f64 {
        let mut s = zeros(self.dim, self.dim);
        for e in &self.kraus {
            s += e.adjoint() * e;
        }
        max_abs(&(s - identity(self.dim)))
    }

    /// `‖Σ E_i E_i† − I‖_max`.
    pub fn unital_residual(&self) -> f64 {
        let mut s = zeros(self.dim, self.dim);
        for e in &self.kraus {
            s += e * e.adjoint();
        }
        max_abs(&(s - identity(self.dim)))
    }

    /// Matrix of the map acting on row-major `vec(ρ)`: `Σ_i E_i ⊗ conj(E_i)`.
    pub fn superoperator(&self) -> ComplexMatrix {
        let n2 = self.dim * self.dim;
        let mut s = zeros(n2, n2);
        for e in &self.kraus {
            s += e.kronecker(&e.map(|z| z.conj()));
        }
        s
    }

    /// Validate as a trace-preserving channel.
    pub fn into_channel(self, tol: &Tolerance) -> Result<Channel, ChannelError> {
        let residual = self.tp_residual();
        if residual > tol.abs_eps {
            return Err(ChannelError::NotTracePreserving { residual });
        }
        let is_unital = self.unital_residual() <= tol.abs_eps;
        Ok(Channel {
            map: self,
            is_unital,
        })
    }
}

/// Trace-preserving completely positive map.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    map: KrausMap,
    is_unital: bool,
}

impl Deref for Channel {
    type Target = KrausMap;
    fn deref(&self) -> &KrausMap {
        &self.map
    }
}

impl Channel {
    /// Validate a Kraus family: shapes, finiteness, `Σ E_i†E_i = I`.
    pub fn validate(kraus: Vec<ComplexMatrix>, tol: &Tolerance) -> Result<Self, ChannelError> {
        KrausMap::new(kraus)?.into_channel(tol)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            map: KrausMap {
                dim,
                kraus: vec![identity(dim)],
            },
            is_unital: true,
        }
    }

    /// `Σ E_i E_i† = I` within the tolerance used at validation.
    pub fn is_unital(&self) -> bool {
        self.is_unital
    }

    pub fn as_map(&self) -> &KrausMap {
        &self.map
    }

    pub fn into_map(self) -> KrausMap {
        self.map
    }

    /// Composition of two channels is again a channel.
    pub fn compose_channel(&self, inner: &Channel) -> Result<Channel, ChannelError> {
        let map = self.map.compose(&inner.map)?;
        Ok(Channel {
            map,
            is_unital: self.is_unital && inner.is_unital,
        })
    }

    /// Conjugate every Kraus operator by a unitary: `E_i ↦ W E_i W†`.
    pub fn conjugated(&self, w: &ComplexMatrix) -> Channel {
        let kraus = self.kraus().iter().map(|e| w * e * w.adjoint()).collect();
        Channel {
            map: KrausMap {
                dim: self.dim(),
                kraus,
            },
            is_unital: self.is_unital,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{diag_real, from_real_rows, random, trace};

    #[test]
    fn identity_channel_is_valid_and_unital() {
        let ch = Channel::validate(vec![identity(3)], &Tolerance::default()).unwrap();
        assert!(ch.is_unital());
        let rho = random::density(3, &mut random::seeded(0));
        assert!(max_abs(&(ch.apply(&rho).unwrap() - &rho)) < 1e-15);
        assert_eq!(ch.dual(), *ch.as_map());
    }

    #[test]
    fn rejects_bad_families() {
        let tol = Tolerance::default();
        assert_eq!(Channel::validate(vec![], &tol), Err(ChannelError::Empty));
        assert!(matches!(
            Channel::validate(vec![identity(2), identity(3)], &tol),
            Err(ChannelError::ShapeMismatch { .. })
        ));
        assert!(matches!(
            Channel::validate(vec![zeros(2, 3)], &tol),
            Err(ChannelError::NotSquare { .. })
        ));
        match Channel::validate(vec![diag_real(&[1.0, 0.5])], &tol) {
            Err(ChannelError::NotTracePreserving { residual }) => {
                assert!((residual - 0.75).abs() < 1e-15)
            }
            other => panic!("unexpected {other:?}"),
        }
        let mut bad = identity(2);
        bad[(0, 0)].re = f64::NAN;
        assert!(matches!(
            Channel::validate(vec![bad], &tol),
            Err(ChannelError::NonFinite { index: 0 })
        ));
    }

    #[test]
    fn amplitude_damping_is_tp_not_unital() {
        let g: f64 = 0.3;
        let k0 = diag_real(&[1.0, (1.0 - g).sqrt()]);
        let k1 = from_real_rows(&[&[0.0, g.sqrt()], &[0.0, 0.0]]);
        let ch = Channel::validate(vec![k0, k1], &Tolerance::default()).unwrap();
        assert!(!ch.is_unital());
        assert!(ch.dual().tp_residual() > 1e-3);
    }

    #[test]
    fn superoperator_matches_apply() {
        let mut rng = random::seeded(4);
        let map = KrausMap::new(vec![random::ginibre(3, 3, &mut rng), random::ginibre(3, 3, &mut rng)]).unwrap();
        let x = random::ginibre(3, 3, &mut rng);
        let lhs = crate::numerics::vectorize(&map.apply(&x).unwrap());
        let rhs = map.superoperator() * crate::numerics::vectorize(&x);
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn compose_orders_factors() {
        let mut rng = random::seeded(5);
        let a = KrausMap::new(vec![random::ginibre(2, 2, &mut rng)]).unwrap();
        let b = KrausMap::new(vec![random::ginibre(2, 2, &mut rng), random::ginibre(2, 2, &mut rng)]).unwrap();
        let x = random::ginibre(2, 2, &mut rng);
        let lhs = a.compose(&b).unwrap().apply(&x).unwrap();
        let rhs = a.apply(&b.apply(&x).unwrap()).unwrap();
        assert!(max_abs(&(lhs - rhs)) < 1e-12);
        assert!((trace(&identity(2)).re - 2.0).abs() < 1e-15);
    }
}
