use lamehardy_core::clifford::Multivector;
use lamehardy_core::kernels::{eval_e0, eval_e1};
use proptest::prelude::*;

const STEP: f64 = 1e-4;

fn unit_point(m: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, m)
        .prop_filter("away from the origin", |v| {
            v.iter().map(|c| c * c).sum::<f64>() > 1e-2
        })
        .prop_map(|v| {
            let r = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            v.into_iter().map(|c| c / r).collect()
        })
}

fn shifted(x: &[f64], j: usize, s: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[j] += s;
    y
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn e0_is_two_sided_monogenic((m, x) in (3usize..=6).prop_flat_map(|m| (Just(m), unit_point(m)))) {
        let mut left = Multivector::zero(m);
        let mut right = Multivector::zero(m);
        for j in 0..m {
            let d = (eval_e0(&shifted(&x, j, STEP)).unwrap() - eval_e0(&shifted(&x, j, -STEP)).unwrap())
                * (0.5 / STEP);
            let ej = Multivector::generator(m, j + 1);
            left += ej * d;
            right += d * ej;
        }
        prop_assert!(left.clifford_norm() <= 1e-5, "left {}", left.clifford_norm());
        prop_assert!(right.clifford_norm() <= 1e-5, "right {}", right.clifford_norm());
    }

    #[test]
    fn e1_is_harmonic((m, x) in (3usize..=6).prop_flat_map(|m| (Just(m), unit_point(m)))) {
        let centre = eval_e1(&x).unwrap();
        let mut lap = 0.0;
        for j in 0..m {
            lap += eval_e1(&shifted(&x, j, STEP)).unwrap() + eval_e1(&shifted(&x, j, -STEP)).unwrap() - 2.0 * centre;
        }
        lap /= STEP * STEP;
        prop_assert!(lap.abs() <= 1e-4, "laplacian {lap}");
    }
}
