//! Cross-module identities over randomly sampled words, automorphisms,
//! currents and rose points.

use num_traits::One;
use outdyn::currents::{counting_weights, push_forward, validate_kirchhoff};
use outdyn::intersection::{check_equivariance, intersect};
use outdyn::metric_trees::{LengthFunction, TreePoint};
use outdyn::sample::{random_automorphism, random_current, random_positive_rational, random_tree_point, random_word};
use outdyn::schottky::{atoroidal_search, flare_certify, Named, SearchOutcome};
use outdyn::spectra::{pf_eigen, transition_matrix};
use outdyn::whitehead::whitehead_minimize;
use outdyn::{cyclic_canonical, is_conjugate, Automorphism, RationalCurrent};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cyclic_length_is_rotation_invariant(seed in any::<u64>(), rank in 2usize..=4) {
        let mut r = rng(seed);
        let u = random_word(&mut r, rank, 0, 12);
        let v = random_word(&mut r, rank, 0, 12);
        prop_assert_eq!(cyclic_canonical(&u.mul(&v)).0.len(), cyclic_canonical(&v.mul(&u)).0.len());
    }

    #[test]
    fn composition_applies_right_to_left(seed in any::<u64>(), rank in 2usize..=4) {
        let mut r = rng(seed);
        let phi = random_automorphism(&mut r, rank, 4);
        let psi = random_automorphism(&mut r, rank, 4);
        let w = random_word(&mut r, rank, 0, 10);
        prop_assert_eq!(phi.compose(&psi).unwrap().apply(&w).unwrap(), phi.apply(&psi.apply(&w).unwrap()).unwrap());
    }

    #[test]
    fn automorphisms_preserve_conjugacy(seed in any::<u64>(), rank in 2usize..=4) {
        let mut r = rng(seed);
        let phi = random_automorphism(&mut r, rank, 4);
        let w = random_word(&mut r, rank, 1, 8);
        let u = random_word(&mut r, rank, 0, 6);
        let conj = u.mul(&w).mul(&u.inverse());
        prop_assert!(is_conjugate(&w, &conj));
        prop_assert!(is_conjugate(&phi.apply(&w).unwrap(), &phi.apply(&conj).unwrap()));
    }

    #[test]
    fn generator_images_are_primitive(seed in any::<u64>(), rank in 2usize..=3) {
        let mut r = rng(seed);
        let phi = random_automorphism(&mut r, rank, 3);
        let g = r.gen_range(1..=rank);
        let image = phi.image(g);
        let (min_len, _) = whitehead_minimize(image, rank).unwrap();
        prop_assert_eq!(min_len, 1);
        let w = random_word(&mut r, rank, 1, 10);
        prop_assert!(whitehead_minimize(&w, rank).unwrap().0 <= w.cyclic_len());
    }

    #[test]
    fn translation_length_identities(seed in any::<u64>(), rank in 2usize..=4, k in -4i64..=4) {
        let mut r = rng(seed);
        let tree = random_tree_point(&mut r, rank, 3);
        let phi = random_automorphism(&mut r, rank, 3);
        let w = random_word(&mut r, rank, 1, 8);
        let u = random_word(&mut r, rank, 0, 6);
        let c = random_positive_rational(&mut r, 9);
        let len = tree.translation_length(&w).unwrap();
        prop_assert_eq!(tree.translation_length(&u.mul(&w).mul(&u.inverse())).unwrap(), len.clone());
        prop_assert_eq!(tree.translation_length(&w.pow(k)).unwrap(), &len * outdyn::Rational::from_integer(k.abs().into()));
        prop_assert_eq!(
            tree.act_right(&phi).unwrap().translation_length(&w).unwrap(),
            tree.translation_length(&phi.apply(&w).unwrap()).unwrap()
        );
        prop_assert_eq!(tree.scaled(&c).unwrap().translation_length(&w).unwrap(), &c * len);
    }

    #[test]
    fn counting_currents_ignore_orientation_and_conjugation(seed in any::<u64>(), rank in 2usize..=4) {
        let mut r = rng(seed);
        let g = random_word(&mut r, rank, 1, 8);
        let u = random_word(&mut r, rank, 0, 8);
        let base = counting_weights(&RationalCurrent::counting(rank, &g).unwrap(), 3).unwrap();
        let inverse = counting_weights(&RationalCurrent::counting(rank, &g.inverse()).unwrap(), 3).unwrap();
        let conj = counting_weights(&RationalCurrent::counting(rank, &u.mul(&g).mul(&u.inverse())).unwrap(), 3).unwrap();
        prop_assert_eq!(&base, &inverse);
        prop_assert_eq!(&base, &conj);
        prop_assert_eq!(base.total_length_weight(), outdyn::Rational::from_integer(g.cyclic_len().into()));
    }

    #[test]
    fn push_forward_is_functorial_and_counts_images(seed in any::<u64>(), rank in 2usize..=3) {
        let mut r = rng(seed);
        let phi = random_automorphism(&mut r, rank, 3);
        let psi = random_automorphism(&mut r, rank, 3);
        let g = random_word(&mut r, rank, 1, 6);
        let mu = RationalCurrent::counting(rank, &g).unwrap();
        let composed = push_forward(&phi.compose(&psi).unwrap(), &mu).unwrap();
        let stepwise = push_forward(&phi, &push_forward(&psi, &mu).unwrap()).unwrap();
        prop_assert_eq!(&composed, &stepwise);
        let direct = RationalCurrent::counting(rank, &phi.apply(&g).unwrap()).unwrap();
        prop_assert_eq!(
            counting_weights(&push_forward(&phi, &mu).unwrap(), 3).unwrap(),
            counting_weights(&direct, 3).unwrap()
        );
    }

    #[test]
    fn counting_weights_satisfy_kirchhoff(seed in any::<u64>(), rank in 2usize..=4, len in 1usize..=4) {
        let mu = random_current(&mut rng(seed), rank, 3, 12);
        let report = validate_kirchhoff(&counting_weights(&mu, len).unwrap());
        prop_assert!(report.passed(), "{:?}", report.violations);
    }

    #[test]
    fn intersection_is_equivariant_and_matches_rose_length(seed in any::<u64>(), rank in 2usize..=4) {
        let mut r = rng(seed);
        let tree = random_tree_point(&mut r, rank, 3);
        let phi = random_automorphism(&mut r, rank, 3);
        let mu = random_current(&mut r, rank, 3, 8);
        prop_assert!(check_equivariance(&tree, &phi, &mu).unwrap());
        let g = random_word(&mut r, rank, 1, 20);
        let eta = RationalCurrent::counting(rank, &g).unwrap();
        let expected = outdyn::Rational::from_integer(g.cyclic_len().into());
        prop_assert_eq!(intersect(&TreePoint::unit_rose(rank), &eta).unwrap(), expected);
    }

    #[test]
    fn stretch_is_at_least_one(seed in any::<u64>(), rank in 2usize..=4) {
        let phi = random_automorphism(&mut rng(seed), rank, 4);
        if let Ok(d) = pf_eigen(&transition_matrix(&phi), 1e-10, 100_000) {
            prop_assert!(d.lambda >= 1.0 - 1e-9, "lambda {}", d.lambda);
        }
    }
}

#[test]
fn signed_permutations_have_unit_stretch() {
    let perm = Automorphism::signed_permutation(&[2, 0, 1], &[true, false, true]).unwrap();
    let d = pf_eigen(&transition_matrix(&perm), 1e-12, 100_000).unwrap();
    assert!((d.lambda - 1.0).abs() < 1e-9);
}

#[test]
fn passing_certificates_pass_on_smaller_balls() {
    let phi = Named::new("phi", Automorphism::parse(&["b", "c", "ab"], &["cA", "a", "b"]).unwrap());
    let psi = Named::new("psi", Automorphism::parse(&["bc", "c", "a"], &["c", "aB", "b"]).unwrap());
    let full = flare_certify(&phi, &psi, 10, 10, 5).unwrap();
    assert!(full.pass);
    for radius in 1..5 {
        assert!(flare_certify(&phi, &psi, 10, 10, radius).unwrap().pass);
    }
}

#[test]
fn identity_has_the_trivial_toroidal_witness() {
    for rank in 2..=4 {
        let outcome = atoroidal_search(&Automorphism::identity(rank), 3, 3).unwrap();
        let w = match outcome {
            SearchOutcome::Found(w) => w,
            other => panic!("{other:?}"),
        };
        assert_eq!((w.power, w.word.to_string()), (1, "a".to_string()));
        assert!(w.replay(&Automorphism::identity(rank)).unwrap());
        assert!(w.conjugator.is_identity());
    }
}

#[test]
fn unit_scale_leaves_the_rose_unchanged() {
    let rose = TreePoint::unit_rose(3);
    assert_eq!(rose.scaled(&outdyn::Rational::one()).unwrap(), rose);
}
