use std::sync::Arc;

use lamehardy_core::geometry::build_sphere_surface;
use lamehardy_core::poly::PolyField;
use lamehardy_core::volume::borel_pompeiu_residual_default;
use lamehardy_core::LameParams;
use proptest::prelude::*;

fn interior_point() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-0.5..0.5f64, 3)
        .prop_filter("inside", |x| x.iter().map(|c| c * c).sum::<f64>() <= 0.36)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(5))]

    #[test]
    fn borel_pompeiu_reproduces_polynomials(seed in any::<u64>(), degree in 1u32..=3, xs in prop::collection::vec(interior_point(), 5)) {
        let p = LameParams::default();
        let f = PolyField::random(3, degree, seed).unwrap();
        let surface = Arc::new(build_sphere_surface(3, 4, 1.0, &[0.0; 3]).unwrap());
        for x in &xs {
            let r = borel_pompeiu_residual_default(&f, &p, &surface, 16, x).unwrap();
            let scale = f.evaluate_f64(x).clifford_norm().max(1.0);
            prop_assert!(r.clifford_norm() <= 5e-2 * scale, "{} at {:?}", r.clifford_norm(), x);
        }
    }

    #[test]
    fn refinement_reduces_the_residual(seed in any::<u64>(), x in interior_point()) {
        let p = LameParams::default();
        let f = PolyField::random(3, 3, seed).unwrap();
        let coarse_surface = Arc::new(build_sphere_surface(3, 2, 1.0, &[0.0; 3]).unwrap());
        let fine_surface = Arc::new(build_sphere_surface(3, 3, 1.0, &[0.0; 3]).unwrap());
        let coarse = borel_pompeiu_residual_default(&f, &p, &coarse_surface, 8, &x).unwrap().clifford_norm();
        let fine = borel_pompeiu_residual_default(&f, &p, &fine_surface, 16, &x).unwrap().clifford_norm();
        prop_assert!(fine <= coarse, "{} then {}", coarse, fine);
    }
}
