use mdqec::numerics::{
    eigh, hermitian_eig, identity, kron, max_abs, min_eigenvalue, null_space, numerical_rank, polar_partial_isometry,
    random, ComplexMatrix, Tolerance,
};
use proptest::prelude::*;

fn tol() -> Tolerance {
    Tolerance::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hermitian_eig_reconstructs(seed in any::<u64>(), n in 1usize..=7) {
        let m = random::hermitian(n, &mut random::seeded(seed));
        let eig = hermitian_eig(&m, &tol()).unwrap();
        let v = &eig.eigenvectors;
        let d = ComplexMatrix::from_diagonal(&eig.eigenvalues.iter().map(|&x| x.into()).collect::<Vec<_>>().into());
        prop_assert!(max_abs(&(v * d * v.adjoint() - &m)) <= 1e-8);
        prop_assert!(max_abs(&(v.adjoint() * v - identity(n))) <= 1e-8);
        prop_assert!(eig.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn polar_factors(seed in any::<u64>(), n in 1usize..=6, rank in 0usize..=6) {
        let mut rng = random::seeded(seed);
        let rank = rank.min(n);
        let m = random::ginibre(n, rank, &mut rng) * random::ginibre(rank, n, &mut rng);
        let (u, p) = polar_partial_isometry(&m, &tol()).unwrap();
        prop_assert!(max_abs(&(&u * &p - &m)) <= 1e-8);
        prop_assert!(max_abs(&(u.adjoint() * &u - identity(n))) <= 1e-8);
        prop_assert!(max_abs(&(p.adjoint() - &p)) <= 1e-8);
        prop_assert!(min_eigenvalue(&p) >= -1e-8);
    }

    #[test]
    fn rank_plus_nullity(seed in any::<u64>(), rows in 1usize..=8, cols in 1usize..=8, rank in 0usize..=8) {
        let mut rng = random::seeded(seed);
        let rank = rank.min(rows).min(cols);
        let m = random::ginibre(rows, rank, &mut rng) * random::ginibre(rank, cols, &mut rng);
        let null = null_space(&m, &tol());
        prop_assert_eq!(null.len() + numerical_rank(&m, &tol()), cols);
        prop_assert_eq!(null.len(), cols - rank);
        for v in &null {
            prop_assert!((&m * v).norm() <= 1e-8);
        }
    }

    #[test]
    fn kron_associative_and_bilinear(seed in any::<u64>(), a in 1usize..=3, b in 1usize..=3, c in 1usize..=3) {
        let mut rng = random::seeded(seed);
        let x = random::ginibre(a, a, &mut rng);
        let y = random::ginibre(b, b, &mut rng);
        let y2 = random::ginibre(b, b, &mut rng);
        let z = random::ginibre(c, c, &mut rng);
        let s = random::ginibre(1, 1, &mut rng)[(0, 0)];
        prop_assert!(max_abs(&(kron(&kron(&x, &y), &z) - kron(&x, &kron(&y, &z)))) <= 1e-10);
        let lhs = kron(&x, &(&y * s + &y2));
        let rhs = kron(&x, &y) * s + kron(&x, &y2);
        prop_assert!(max_abs(&(lhs - rhs)) <= 1e-10);
    }

    #[test]
    fn eigh_agrees_with_checked_version(seed in any::<u64>(), n in 1usize..=5) {
        let m = random::hermitian(n, &mut random::seeded(seed));
        prop_assert_eq!(eigh(&m), hermitian_eig(&m, &tol()).unwrap());
    }
}
