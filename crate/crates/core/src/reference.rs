//! Regression harness over the reference channels in [`crate::fixtures`].
//!
//! Each check computes one number, compares it with a pinned threshold and
//! records the outcome. The harness is deterministic for a given seed (the
//! seed draws the arbitrary unitaries some channels are parameterised by).

use crate::algebra::{AlgebraBasis, Summand};
use crate::channel::Channel;
use crate::codes::{build_subspace_representation, correction_rank, mixed_unitary_form, CodeSubspace};
use crate::fixtures::{
    block_shift_channel, block_shift_code, block_unitary_channel, corner_leak_channel, corner_leak_code,
    hadamard_pair_code, symmetric_two_block_channel, two_block_channel,
};
use crate::mdomain::{
    compute_md, extract_ucc_from_md, md_unital_check, multiplicativity_residual, ucc_algebra_unital, verify_ucc,
};
use crate::numerics::{
    block_matrix, diag_real, hs_inner, identity, kron, matrix_unit, matrix_units, max_abs, random, zeros,
    ComplexMatrix, Tolerance,
};

/// How a check's metric is compared with its threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    /// Pass when `metric <= threshold`.
    AtMost,
    /// Pass when `metric > threshold`.
    Above,
    /// Pass when `metric == threshold` (counts and dimensions).
    Equals,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub metric: f64,
    pub threshold: f64,
    pub comparison: Comparison,
    pub passed: bool,
}

impl CheckOutcome {
    fn new(name: impl Into<String>, metric: f64, comparison: Comparison, threshold: f64) -> Self {
        let passed = match comparison {
            Comparison::AtMost => metric <= threshold,
            Comparison::Above => metric > threshold,
            Comparison::Equals => metric == threshold,
        };
        Self {
            name: name.into(),
            metric,
            threshold,
            comparison,
            passed,
        }
    }

    fn failed(name: impl Into<String>, threshold: f64, comparison: Comparison) -> Self {
        Self {
            name: name.into(),
            metric: f64::NAN,
            threshold,
            comparison,
            passed: false,
        }
    }
}

fn count(name: impl Into<String>, found: usize, expected: usize) -> CheckOutcome {
    CheckOutcome::new(name, found as f64, Comparison::Equals, expected as f64)
}

/// Run every reference check.
pub fn run_all(seed: u64) -> Vec<CheckOutcome> {
    let tol = Tolerance::default();
    let mut rng = random::seeded(seed);
    let u = random::unitary(2, &mut rng);
    let v = random::unitary(2, &mut rng);
    let w = random::unitary(2, &mut rng);
    let mut out = Vec::new();
    two_block_checks(&tol, &u, &v, &mut out);
    block_unitary_checks(&tol, &u, &v, &w, &mut out);
    corner_leak_checks(&mut out);
    block_shift_checks(&tol, seed, &mut out);
    symmetric_two_block_checks(&tol, seed, &mut out);
    out
}

fn top_code() -> CodeSubspace {
    CodeSubspace::from_basis_indices(4, &[0, 1], 1, 2).expect("valid indices")
}

fn two_block_checks(tol: &Tolerance, u: &ComplexMatrix, v: &ComplexMatrix, out: &mut Vec<CheckOutcome>) {
    let ket0 = matrix_unit(2, 0, 0);
    let z = diag_real(&[1.0, -1.0]);
    for q in [0.0, 0.5, 1.0] {
        let ch = match two_block_channel(q, u, v) {
            Ok(ch) => ch,
            Err(_) => {
                out.push(CheckOutcome::failed(format!("two-block q={q}: channel"), 0.0, Comparison::AtMost));
                continue;
            }
        };
        let smeared = identity(2).scale(0.5) + z.scale(q / 2.0);
        let residual = matrix_units(2)
            .iter()
            .map(|rho| max_abs(&(ch.apply_unchecked(&kron(&ket0, rho)) - kron(&smeared, rho))))
            .fold(0.0, f64::max);
        out.push(CheckOutcome::new(
            format!("two-block q={q}: output on |0><0| (x) rho"),
            residual,
            Comparison::AtMost,
            1e-9,
        ));
        let expected = [(1.0 + q) / 2.0, (1.0 - q) / 2.0];
        let metric = match mixed_unitary_form(&ch, &top_code(), tol) {
            Ok(form) => (0..2)
                .map(|i| (form.weights.get(i).copied().unwrap_or(0.0) - expected[i]).abs())
                .fold(0.0, f64::max),
            Err(_) => f64::NAN,
        };
        out.push(CheckOutcome::new(
            format!("two-block q={q}: mixed-unitary weights"),
            metric,
            Comparison::AtMost,
            1e-9,
        ));
    }

    let name = "two-block q=0.5: recovery restores |0><0| (x) rho";
    let ch = two_block_channel(0.5, u, v).expect("valid channel");
    match build_subspace_representation(&ch, &top_code(), tol) {
        Ok(rep) => {
            let residual = matrix_units(2)
                .iter()
                .map(|rho| {
                    let sigma = kron(&ket0, rho);
                    max_abs(&(rep.recovery.apply_unchecked(&ch.apply_unchecked(&sigma)) - sigma))
                })
                .fold(0.0, f64::max);
            out.push(CheckOutcome::new(name, residual, Comparison::AtMost, 1e-8));
            out.push(count("two-block q=0.5: representation multiplicity", rep.multiplicity(), 2));
        }
        Err(_) => out.push(CheckOutcome::failed(name, 1e-8, Comparison::AtMost)),
    }
}

fn block_unitary_checks(
    tol: &Tolerance,
    u: &ComplexMatrix,
    v: &ComplexMatrix,
    w: &ComplexMatrix,
    out: &mut Vec<CheckOutcome>,
) {
    for (q, expected) in [(0.6, 2), (0.0, 1), (1.0, 1)] {
        let ch = block_unitary_channel(q, u, v, w).expect("valid channel");
        let name = format!("block-unitary q={q}: correction rank");
        match correction_rank(&ch, &top_code(), tol) {
            Ok(rank) => out.push(count(name, rank, expected)),
            Err(_) => out.push(CheckOutcome::failed(name, expected as f64, Comparison::Equals)),
        }
    }

    let ch = block_unitary_channel(0.6, u, v, v).expect("valid channel");
    let whole = CodeSubspace::from_basis_indices(4, &[0, 1, 2, 3], 2, 2).expect("valid indices");
    let name = "block-unitary q=0.6, W=V: subsystem certificate";
    match verify_ucc(&ch, &whole, tol) {
        Ok(ucc) => out.push(CheckOutcome::new(name, ucc.residual, Comparison::AtMost, 1e-8)),
        Err(_) => out.push(CheckOutcome::failed(name, 1e-8, Comparison::AtMost)),
    }

    let ch = block_unitary_channel(0.6, u, v, w).expect("valid channel");
    let dual = ch.dual();
    let image: Vec<ComplexMatrix> = matrix_units(2)
        .iter()
        .map(|rho| crate::numerics::direct_sum(&[u * rho * u.adjoint(), w * rho * w.adjoint()]))
        .collect();
    let mut worst: f64 = 0.0;
    for a in &image {
        for b in &image {
            worst = worst.max(multiplicativity_residual(&dual, a, b));
        }
    }
    out.push(CheckOutcome::new(
        "block-unitary q=0.6, W!=V: dual multiplicativity on image algebra",
        worst,
        Comparison::Above,
        1e-6,
    ));
    let name = "block-unitary q=0.6, W!=V: image algebra outside dual domain";
    match md_unital_check(&dual, tol, 0) {
        Ok(md) => {
            let outside = image.iter().map(|a| md.projection_residual(a)).fold(0.0, f64::max);
            out.push(CheckOutcome::new(name, outside, Comparison::Above, 1e-6));
        }
        Err(_) => out.push(CheckOutcome::failed(name, 1e-6, Comparison::Above)),
    }
}

fn corner_leak_checks(out: &mut Vec<CheckOutcome>) {
    let code = corner_leak_code();
    let ch = corner_leak_channel(0.25).expect("valid channel");
    out.push(count("corner-leak q=0.25: channel is not unital", ch.is_unital() as usize, 0));
    let residual = matrix_units(2)
        .iter()
        .map(|rho| {
            let sigma = code.lift(rho);
            max_abs(&(ch.apply_unchecked(&sigma) - sigma))
        })
        .fold(0.0, f64::max);
    out.push(CheckOutcome::new(
        "corner-leak q=0.25: code is decoherence free",
        residual,
        Comparison::AtMost,
        1e-9,
    ));
    for (q, comparison, threshold) in [(0.25, Comparison::Above, 1e-6), (0.0, Comparison::AtMost, 1e-9)] {
        let ch = corner_leak_channel(q).expect("valid channel");
        let dual = ch.dual();
        let basis: Vec<ComplexMatrix> = matrix_units(2).iter().map(|rho| code.lift(rho)).collect();
        let mut worst: f64 = 0.0;
        for a in &basis {
            for b in &basis {
                worst = worst.max(multiplicativity_residual(&dual, a, b));
            }
        }
        out.push(CheckOutcome::new(
            format!("corner-leak q={q}: dual multiplicativity on code algebra"),
            worst,
            comparison,
            threshold,
        ));
    }
}

fn block_shift_checks(tol: &Tolerance, seed: u64, out: &mut Vec<CheckOutcome>) {
    let ch = block_shift_channel().expect("valid channel");
    match compute_md(&ch, tol, seed) {
        Ok(r) => {
            out.push(count("block-shift: domain dimension", r.md.len(), 4));
            let third = block_shift_code(2);
            let expected = AlgebraBasis::from_span(
                6,
                &matrix_units(2).iter().map(|x| third.lift(x)).collect::<Vec<_>>(),
                tol,
            );
            out.push(CheckOutcome::new(
                "block-shift: domain is the third diagonal block",
                r.md.distance(&expected),
                Comparison::AtMost,
                1e-9,
            ));
            out.push(count(
                "block-shift: one qubit summand",
                (r.structure.summands == vec![Summand { dim_a: 1, dim_b: 2 }] && r.structure.null_dim == 4) as usize,
                1,
            ));
        }
        Err(_) => out.push(CheckOutcome::failed("block-shift: domain dimension", 4.0, Comparison::Equals)),
    }
    match extract_ucc_from_md(&ch, tol, seed) {
        Ok(codes) => {
            out.push(count("block-shift: codes extracted from domain", codes.len(), 1));
            let third = block_shift_code(2);
            let metric = codes
                .first()
                .map_or(f64::NAN, |c| max_abs(&(&c.code.projector - &third.projector)));
            out.push(CheckOutcome::new(
                "block-shift: extracted code is the third block",
                metric,
                Comparison::AtMost,
                1e-9,
            ));
        }
        Err(_) => out.push(CheckOutcome::failed("block-shift: codes extracted from domain", 1.0, Comparison::Equals)),
    }
    for k in 0..2 {
        let name = format!("block-shift: block {} is unitarily correctable", k + 1);
        match verify_ucc(&ch, &block_shift_code(k), tol) {
            Ok(ucc) => out.push(CheckOutcome::new(name, ucc.residual, Comparison::AtMost, 1e-8)),
            Err(_) => out.push(CheckOutcome::failed(name, 1e-8, Comparison::AtMost)),
        }
    }
}

/// `{[[A, B], [B, A]]}` in `M_4`.
fn swap_symmetric_algebra(tol: &Tolerance) -> AlgebraBasis {
    let ops: Vec<ComplexMatrix> = matrix_units(2)
        .iter()
        .flat_map(|x| {
            let z = zeros(2, 2);
            [
                block_matrix(&[vec![x.clone(), z.clone()], vec![z.clone(), x.clone()]]),
                block_matrix(&[vec![z.clone(), x.clone()], vec![x.clone(), z]]),
            ]
        })
        .collect();
    AlgebraBasis::from_span(4, &ops, tol)
}

fn symmetric_two_block_checks(tol: &Tolerance, seed: u64, out: &mut Vec<CheckOutcome>) {
    let ch = symmetric_two_block_channel(0.0).expect("valid channel");
    match (compute_md(&ch, tol, seed), ucc_algebra_unital(&ch, tol)) {
        (Ok(r), Ok(ucc)) => {
            out.push(count("symmetric two-block q=0: domain dimension", r.md.len(), 8));
            out.push(count(
                "symmetric two-block q=0: two qubit summands",
                (r.structure.summands == vec![Summand { dim_a: 1, dim_b: 2 }; 2]) as usize,
                1,
            ));
            out.push(CheckOutcome::new(
                "symmetric two-block q=0: domain equals swap-symmetric algebra",
                r.md.distance(&swap_symmetric_algebra(tol)),
                Comparison::AtMost,
                1e-9,
            ));
            out.push(CheckOutcome::new(
                "symmetric two-block q=0: domain equals correctable-code algebra",
                r.md.distance(&ucc),
                Comparison::AtMost,
                1e-7,
            ));
        }
        _ => out.push(CheckOutcome::failed("symmetric two-block q=0: domain dimension", 8.0, Comparison::Equals)),
    }
    for q in [0.5, 1.0] {
        let ch = symmetric_two_block_channel(q).expect("valid channel");
        let name = format!("symmetric two-block q={q}: domain dimension");
        match compute_md(&ch, tol, seed) {
            Ok(r) => out.push(count(name, r.md.len(), 0)),
            Err(_) => out.push(CheckOutcome::failed(name, 0.0, Comparison::Equals)),
        }
    }
    let ch = symmetric_two_block_channel(1.0).expect("valid channel");
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let i2 = identity(2);
    for (sign, label) in [(-1.0, "|->"), (1.0, "|+>")] {
        let expected = block_matrix(&[vec![i2.clone(), i2.scale(-sign)], vec![i2.scale(sign), i2.clone()]]).scale(s);
        let name = format!("symmetric two-block q=1: {label} code recovery unitary");
        match verify_ucc(&ch, &hadamard_pair_code(sign), tol) {
            Ok(ucc) => {
                let metric = ucc.residual.max(recovery_mismatch(&ch, &ucc.code, &ucc.recovery_unitary, &expected));
                out.push(CheckOutcome::new(name, metric, Comparison::AtMost, 1e-8));
            }
            Err(_) => out.push(CheckOutcome::failed(name, 1e-8, Comparison::AtMost)),
        }
    }
}

/// Distance between two recovery unitaries on the output range `ℰ(P_C)`,
/// minimised over a global phase.
pub fn recovery_mismatch(ch: &Channel, code: &CodeSubspace, found: &ComplexMatrix, expected: &ComplexMatrix) -> f64 {
    let range = crate::numerics::range_isometry(&ch.apply_unchecked(&code.projector), &Tolerance::default());
    let q = &range * range.adjoint();
    let a = found * &q;
    let b = expected * &q;
    let overlap = hs_inner(&b, &a);
    if overlap.norm() == 0.0 {
        return f64::INFINITY;
    }
    let phase = overlap / overlap.norm();
    max_abs(&(a - b * phase))
}
