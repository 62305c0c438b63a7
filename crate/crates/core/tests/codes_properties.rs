use mdqec::algebra::Summand;
use mdqec::channel::Channel;
use mdqec::codes::{
    analyze_code, build_subspace_representation, build_subsystem_recovery, correction_rank, kl_matrix,
    mixed_unitary_form, subsystem_correction_form, subsystem_kl, CodeError, CodeSubspace,
};
use mdqec::fixtures::random_correctable_channel;
use mdqec::numerics::{identity, kron, matrix_units, max_abs, min_eigenvalue, random, trace, ComplexMatrix, Tolerance};
use proptest::prelude::*;

fn tol() -> Tolerance {
    Tolerance::default()
}

/// `(n, summand, rank, kraus count)` with room for `rank` orthogonal images.
fn correctable_shapes(subspace_only: bool) -> impl Strategy<Value = (usize, Summand, usize, usize)> {
    let dim_a = if subspace_only { 1..=1usize } else { 1..=2usize };
    (dim_a, 1usize..=3, 1usize..=3, 1usize..=4, 0usize..=2)
        .prop_map(|(a, b, rank, kraus, spare)| {
            let s = Summand { dim_a: a, dim_b: b };
            (rank * s.size() + spare, s, rank, kraus)
        })
        .prop_filter("at most 8 dimensions", |(n, ..)| *n <= 8)
}

fn correctable(shape: (usize, Summand, usize, usize), seed: u64) -> (Channel, CodeSubspace) {
    let (n, s, rank, kraus) = shape;
    random_correctable_channel(n, s, rank, kraus, &mut random::seeded(seed))
}

fn code_basis(code: &CodeSubspace) -> Vec<ComplexMatrix> {
    matrix_units(code.dim()).iter().map(|x| code.lift(x)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn code_matrix_is_a_density_matrix(shape in correctable_shapes(true), seed in any::<u64>()) {
        let (ch, code) = correctable(shape, seed);
        let lambda = kl_matrix(&ch, &code, &tol()).unwrap();
        prop_assert!(min_eigenvalue(&lambda) >= -1e-9);
        prop_assert!((trace(&lambda).re - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn mixed_unitary_form_on_the_code(shape in correctable_shapes(true), seed in any::<u64>()) {
        let (ch, code) = correctable(shape, seed);
        let form = mixed_unitary_form(&ch, &code, &tol()).unwrap();
        prop_assert!((form.weights.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        prop_assert_eq!(form.weights.len(), shape.2.min(shape.3));
        for rho in code_basis(&code) {
            prop_assert!(max_abs(&(ch.apply(&rho).unwrap() - form.apply(&rho))) <= 1e-8);
        }
        let p = &code.projector;
        for (i, ui) in form.unitaries.iter().enumerate() {
            for (j, uj) in form.unitaries.iter().enumerate() {
                let overlap = p * ui.adjoint() * uj * p;
                let expected = if i == j { p.clone() } else { ComplexMatrix::zeros(p.nrows(), p.nrows()) };
                prop_assert!(max_abs(&(overlap - expected)) <= 1e-8);
            }
        }
    }

    #[test]
    fn representation_and_recovery(shape in correctable_shapes(true), seed in any::<u64>()) {
        let (ch, code) = correctable(shape, seed);
        let rep = build_subspace_representation(&ch, &code, &tol()).unwrap();
        let smear = ch.apply(&code.projector).unwrap();
        let basis = code_basis(&code);
        for a in &basis {
            prop_assert!(max_abs(&(rep.pi(&a.adjoint()) - rep.pi(a).adjoint())) <= 1e-8);
            for b in &basis {
                prop_assert!(max_abs(&(rep.pi(&(a * b)) - rep.pi(a) * rep.pi(b))) <= 1e-8);
            }
            let out = ch.apply(a).unwrap();
            prop_assert!(max_abs(&(&out - rep.pi(a) * &smear)) <= 1e-8);
            prop_assert!(max_abs(&(&out - &smear * rep.pi(a))) <= 1e-8);
            prop_assert!(max_abs(&(rep.recovery.apply(&out).unwrap() - a)) <= 1e-8);
        }
        prop_assert!(max_abs(&(rep.recovery.apply(&smear).unwrap() - &code.projector)) <= 1e-8);
        prop_assert_eq!(rep.multiplicity(), correction_rank(&ch, &code, &tol()).unwrap());
    }

    #[test]
    fn correction_form_weights(shape in correctable_shapes(false), seed in any::<u64>()) {
        let (ch, code) = correctable(shape, seed);
        let form = subsystem_correction_form(&ch, &code, &tol()).unwrap();
        let da = code.dim_a;
        prop_assert_eq!(form.terms.len(), shape.2.min(shape.3));
        let mut sum = ComplexMatrix::zeros(da, da);
        for s in &form.terms {
            sum += &s.d * &s.d;
            for t in &form.terms {
                prop_assert!(max_abs(&(&s.d * &t.d - &t.d * &s.d)) <= 1e-9);
            }
        }
        // The weights always carry total trace dim_a; they sum to I_A for subspace codes.
        prop_assert!((trace(&sum).re - da as f64).abs() <= 1e-9);
        if da == 1 {
            prop_assert!(form.weight_sum_residual(da) <= 1e-9);
        }
    }

    #[test]
    fn subsystem_smearing_identity(shape in correctable_shapes(false), seed in any::<u64>()) {
        let (ch, code) = correctable(shape, seed);
        let form = subsystem_correction_form(&ch, &code, &tol()).unwrap();
        let (da, db) = (code.dim_a, code.dim_b);
        let isometries: Vec<ComplexMatrix> = form
            .terms
            .iter()
            .map(|t| &t.unitary * code.lift(&kron(&t.support, &identity(db))))
            .collect();
        let pi = |x: &ComplexMatrix| {
            isometries.iter().fold(ComplexMatrix::zeros(x.nrows(), x.nrows()), |acc, v| acc + v * x * v.adjoint())
        };
        let smear = ch.apply(&code.projector).unwrap();
        for rho in matrix_units(db) {
            let x = code.lift(&kron(&identity(da), &rho));
            let out = ch.apply(&x).unwrap();
            prop_assert!(max_abs(&(&out - pi(&x) * &smear)) <= 1e-8);
            prop_assert!(max_abs(&(&out - &smear * pi(&x))) <= 1e-8);
        }
    }

    #[test]
    fn subsystem_recovery_certifies(shape in correctable_shapes(false), seed in any::<u64>()) {
        let (ch, code) = correctable(shape, seed);
        let (recovery, cert) = build_subsystem_recovery(&ch, &code, &tol()).unwrap();
        prop_assert!(cert.passes(1e-8));
        prop_assert!(recovery.tp_residual() <= 1e-9);
        let report = analyze_code(&ch, &code, &tol()).unwrap();
        prop_assert_eq!(report.correction_rank, shape.2.min(shape.3));
    }

    #[test]
    fn rank_is_unitarily_invariant(shape in correctable_shapes(false), seed in any::<u64>()) {
        let (ch, code) = correctable(shape, seed);
        let w = random::unitary(ch.dim(), &mut random::seeded(seed ^ 9));
        let before = correction_rank(&ch, &code, &tol()).unwrap();
        let after = correction_rank(&ch.conjugated(&w), &code.conjugated(&w), &tol()).unwrap();
        prop_assert_eq!(before, after);
    }

    #[test]
    fn generic_codes_are_not_correctable(n in 3usize..=6, seed in any::<u64>()) {
        // A random two-dimensional code under a random channel with three
        // Kraus operators violates the Knill-Laflamme condition.
        let mut rng = random::seeded(seed);
        let v = random::isometry(3 * n, n, &mut rng);
        let ops: Vec<ComplexMatrix> = (0..3).map(|k| v.rows(k * n, n).into_owned()).collect();
        let ch = Channel::validate(ops, &tol()).unwrap();
        let code = CodeSubspace::from_isometry(random::isometry(n, 2, &mut rng), 1, 2, &tol()).unwrap();
        let rejected = matches!(subsystem_kl(&ch, &code, &tol()), Err(CodeError::NotCorrectable { .. }));
        prop_assert!(rejected);
    }
}
