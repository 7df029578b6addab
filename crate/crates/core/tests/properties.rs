use jbtriple::bp::{is_bp_quasi_invertible, quasi_inverse};
use jbtriple::geometry::{dist_to_extreme_points, nearest_extreme_point};
use jbtriple::sampling::{gaussian_element, keyed_rng, sample_element};
use jbtriple::spectral::{generalized_inverse, generalized_inverse_residuals, quadratic_conorm};
use jbtriple::triple::triple_product;
use jbtriple::{SpaceDescriptor, Tolerance, TripleElement};
use num_complex::Complex64;
use proptest::prelude::*;

fn space() -> impl Strategy<Value = SpaceDescriptor> {
    prop::collection::vec((1usize..4, 1usize..4), 1..3).prop_map(|f| SpaceDescriptor::new(f).unwrap())
}

fn ranked(space: &SpaceDescriptor, pick: u64, scale: f64, seed: u64) -> TripleElement {
    let profile: Vec<usize> = space
        .full_ranks()
        .iter()
        .enumerate()
        .map(|(i, &k)| ((pick >> (2 * i)) as usize) % (k + 1))
        .collect();
    sample_element(space, &profile, scale, 0, seed).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn triple_product_is_symmetric_in_outer_arguments(s in space(), seed in any::<u64>()) {
        let mut rng = keyed_rng(seed, 0, 0);
        let [x, y, z] = std::array::from_fn(|_| gaussian_element(&s, &mut rng));
        let a = triple_product(&x, &y, &z).unwrap();
        let b = triple_product(&z, &y, &x).unwrap();
        prop_assert!(a.distance(&b).unwrap() <= 1e-12 * (1.0 + a.norm()));
    }

    #[test]
    fn triple_product_conjugate_linear_in_middle(s in space(), seed in any::<u64>(), re in -2.0..2.0f64, im in -2.0..2.0f64) {
        let mut rng = keyed_rng(seed, 0, 0);
        let [x, y, z] = std::array::from_fn(|_| gaussian_element(&s, &mut rng));
        let c = Complex64::new(re, im);
        let lhs = triple_product(&x, &y.scale(c), &z).unwrap();
        let rhs = triple_product(&x, &y, &z).unwrap().scale(c.conj());
        prop_assert!(lhs.distance(&rhs).unwrap() <= 1e-12 * (1.0 + rhs.norm()));
    }

    #[test]
    fn generalized_inverse_is_penrose(s in space(), pick in any::<u64>(), scale in 0.1..5.0f64, seed in any::<u64>()) {
        let a = ranked(&s, pick, scale, seed);
        if a.is_zero() {
            prop_assert!(generalized_inverse(&a, Tolerance::default()).is_err());
            return Ok(());
        }
        let g = generalized_inverse(&a, Tolerance::default()).unwrap();
        let r = generalized_inverse_residuals(&a, &g).unwrap();
        let size = 1.0 + a.norm() + g.norm();
        prop_assert!(r.iter().all(|&x| x <= 1e-10 * size.powi(3)), "{r:?}");
        let gamma = quadratic_conorm(&a, Tolerance::default());
        let v = gamma.finite_value().unwrap();
        prop_assert!((v * g.norm().powi(2) - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn bp_status_matches_quasi_inverse(s in space(), pick in any::<u64>(), seed in any::<u64>()) {
        let a = ranked(&s, pick, 1.3, seed);
        let tol = Tolerance::default();
        prop_assert_eq!(is_bp_quasi_invertible(&a, tol), quasi_inverse(&a, tol).is_ok());
    }

    #[test]
    fn nearest_extreme_point_attains_distance(s in space(), pick in any::<u64>(), scale in 0.0..3.0f64, seed in any::<u64>()) {
        let a = ranked(&s, pick, scale, seed);
        let tol = Tolerance::default();
        let d = dist_to_extreme_points(&a, tol);
        let e = nearest_extreme_point(&a);
        prop_assert!((a.distance(e.element()).unwrap() - d.formula).abs() <= 1e-10);
        prop_assert!(d.residual() <= 1e-10);
    }
}
