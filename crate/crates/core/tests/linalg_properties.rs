use finetti_core::linalg::{contract_legs, hs_inner, is_psd, tensor, LeggedOperator};
use finetti_core::random::{random_faithful, random_hermitian, random_psd, seeded};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// Contracting any subset of legs against a faithful functional keeps
    /// positive operators positive.
    #[test]
    fn contraction_preserves_positivity(seed in any::<u64>(), mask in 1u8..7) {
        let mut rng = seeded(seed);
        let x = random_psd(8, &mut rng).with_legs(vec![2, 2, 2]).unwrap();
        let rho = random_faithful(2, &mut rng);
        let legs: Vec<usize> = (0..3).filter(|i| mask & (1 << i) != 0).collect();
        let y = contract_legs(&x, &rho, &legs).unwrap();
        prop_assert_eq!(y.legs().len(), 3 - legs.len());
        prop_assert!(is_psd(&y, 1e-10).unwrap());
    }

    #[test]
    fn hs_inner_factorizes_over_tensors(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let (x, u) = (random_hermitian(2, &mut rng), random_hermitian(2, &mut rng));
        let (y, v) = (random_hermitian(3, &mut rng), random_hermitian(3, &mut rng));
        let lhs = hs_inner(&tensor(&x, &y), &tensor(&u, &v)).unwrap();
        let rhs = hs_inner(&x, &u).unwrap() * hs_inner(&y, &v).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm().max(1.0));
    }

    #[test]
    fn hs_inner_is_conjugate_symmetric(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let x = LeggedOperator::from_matrix(finetti_core::random::ginibre(3, &mut rng)).unwrap();
        let y = LeggedOperator::from_matrix(finetti_core::random::ginibre(3, &mut rng)).unwrap();
        let a = hs_inner(&x, &y).unwrap();
        let b = hs_inner(&y, &x).unwrap();
        prop_assert!((a - b.conj()).norm() < 1e-12 * a.norm().max(1.0));
    }
}
