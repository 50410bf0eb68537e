use ffcomm::ensemble::EnsembleKind;
use ffcomm::gaussian::{
    annihilation_residual, bogoliubov_blocks, coherent_state, haar_so, inverse_blocks, lambda_norm,
};
use ffcomm::liealg::{commutant_dim_kind, commutant_dim_weyl};
use ffcomm::moments::{
    positive_labels, purity_exact_k2, rate_function, saddle_residual, saddle_theta,
};
use ffcomm::pauli::{Pauli, PauliSum, C64};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn pauli(n: usize, x: u64, z: u64, phase: u8) -> Pauli {
    let mask = (1u64 << n) - 1;
    let c = [
        C64::new(1.0, 0.0),
        C64::new(0.0, 1.0),
        C64::new(-1.0, 0.0),
        C64::new(0.0, -1.0),
    ][phase as usize % 4];
    Pauli {
        coeff: c,
        x: x & mask,
        z: z & mask,
    }
}

fn dense(p: Pauli, n: usize) -> nalgebra::DMatrix<C64> {
    let mut s = PauliSum::zero();
    s.add_term(p);
    s.to_dense(n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pauli_product_matches_dense(n in 1usize..5, a in any::<(u64, u64, u8)>(), b in any::<(u64, u64, u8)>()) {
        let p = pauli(n, a.0, a.1, a.2);
        let q = pauli(n, b.0, b.1, b.2);
        let lhs = dense(p.mul(&q), n);
        let rhs = dense(p, n) * dense(q, n);
        prop_assert!((lhs - &rhs).norm() < 1e-12);
        let comm = dense(p, n) * dense(q, n) - dense(q, n) * dense(p, n);
        prop_assert_eq!(p.commutes(&q), comm.norm() < 1e-12);
    }

    #[test]
    fn bogoliubov_constraints_hold(k in 1usize..5, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = haar_so(2 * k, &mut rng).unwrap();
        prop_assert!(r.orthogonality_defect() < 1e-10);
        let b = bogoliubov_blocks(&r);
        prop_assert!(b.constraint_residual() < 1e-10);
        prop_assert!(inverse_blocks(&b).constraint_residual() < 1e-10);
    }

    #[test]
    fn coherent_states_are_gaussian(k in 1usize..4, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = haar_so(2 * k, &mut rng).unwrap();
        let v = coherent_state(&r).unwrap();
        prop_assert!((v.amplitudes.norm() - 1.0).abs() < 1e-10);
        prop_assert!(lambda_norm(&v) < 1e-9);
        prop_assert!(annihilation_residual(&inverse_blocks(&bogoliubov_blocks(&r)), &v) < 1e-9);
    }

    #[test]
    fn exact_k2_page_curve_is_symmetric(l in 1usize..21, cut in 0usize..21) {
        let ell = cut % (l + 1);
        let e = purity_exact_k2(l, ell).unwrap();
        prop_assert_eq!(&e, &purity_exact_k2(l, l - ell).unwrap());
        prop_assert!(e > num_rational::BigRational::zero() && e <= num_rational::BigRational::one());
        if ell == 0 {
            prop_assert!(e.is_one());
        }
    }

    #[test]
    fn weyl_matches_closed_form(k in 1usize..4, l in 1usize..7) {
        for kind in [EnsembleKind::Mg, EnsembleKind::MgStar, EnsembleKind::Nc] {
            prop_assert_eq!(commutant_dim_kind(kind, 1, k, l).unwrap(), commutant_dim_weyl(kind, 1, k, l).unwrap());
        }
        prop_assert_eq!(commutant_dim_kind(EnsembleKind::Mg, 1, 1, l).unwrap(), BigInt::from(2));
        prop_assert_eq!(commutant_dim_kind(EnsembleKind::Mg, 1, 2, l).unwrap(), BigInt::from(2 * (2 * l + 1)));
    }

    #[test]
    fn saddle_points_solve_the_equation(k in 2usize..7, r in 0.05f64..0.95) {
        for p in positive_labels(k) {
            let theta = saddle_theta(p, r, k).unwrap();
            prop_assert!(saddle_residual(theta, p, r, k).abs() < 1e-8, "p={p} theta={theta}");
        }
        let rate = rate_function(k, r).unwrap();
        prop_assert!(rate.is_finite() && rate > 0.0);
        prop_assert!((rate - rate_function(k, 1.0 - r).unwrap()).abs() < 1e-9);
    }
}
