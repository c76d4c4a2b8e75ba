use lamehardy_core::poly::{
    apply_operator, classical_lame_residual, make_test_solution, Operator, PolyField, SolutionKind,
};
use lamehardy_core::LameParams;
use num_rational::BigRational;
use proptest::prelude::*;

fn params() -> impl Strategy<Value = LameParams> {
    (0.1..5.0f64, -0.6..5.0f64).prop_filter_map("admissible", |(mu, lambda)| {
        LameParams::new(mu, lambda).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn lame_factors_through_dirac(m in 3usize..=4, degree in 1u32..=3, seed in any::<u64>(), p in params()) {
        let f = PolyField::random(m, degree, seed).unwrap();
        let l = apply_operator(&f, Operator::L, &p);
        prop_assert_eq!(&l, &apply_operator(&f, Operator::M, &p).dirac_left());
        prop_assert_eq!(&l, &apply_operator(&f, Operator::Mbar, &p).dirac_right());
    }

    #[test]
    fn dirac_squared_is_minus_laplacian(m in 3usize..=4, degree in 0u32..=4, seed in any::<u64>()) {
        let f = PolyField::random(m, degree, seed).unwrap().scalar_component(0);
        let minus_one = BigRational::from_integer((-1).into());
        prop_assert_eq!(f.dirac_left().dirac_left(), f.laplacian().scale(&minus_one));
    }

    #[test]
    fn classical_and_clifford_forms_agree(m in 3usize..=4, degree in 0u32..=4, seed in any::<u64>(), p in params()) {
        let u = PolyField::random_vector(m, degree, seed).unwrap();
        prop_assert!(classical_lame_residual(&u, &p).unwrap().is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(5))]

    #[test]
    fn catalogue_solves_the_system(m in 3usize..=4, p in params()) {
        for kind in [
            SolutionKind::Constant,
            SolutionKind::Coordinate,
            SolutionKind::MonogenicLinear,
            SolutionKind::UniversalQuadratic,
        ] {
            let f = make_test_solution(&kind, m).unwrap();
            prop_assert!(apply_operator(f.as_poly().unwrap(), Operator::L, &p).is_zero(), "{}", kind);
        }
    }
}
