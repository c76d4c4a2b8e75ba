use lamehardy_core::geometry::{build_ellipsoid_surface, build_sphere_surface, SurfaceMesh};
use proptest::prelude::*;

fn closure(mesh: &SurfaceMesh) -> f64 {
    let m = mesh.dim();
    let mut sum = vec![0.0; m];
    for q in 0..mesh.len() {
        for (s, n) in sum.iter_mut().zip(mesh.normal(q)) {
            *s += mesh.weight(q) * n;
        }
    }
    sum.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `Σ w (n · y)`, which equals `m |Ω|` by the divergence theorem for `∇·y = m`.
fn flux_of_position(mesh: &SurfaceMesh) -> f64 {
    (0..mesh.len())
        .map(|q| {
            mesh.weight(q)
                * mesh
                    .normal(q)
                    .iter()
                    .zip(mesh.node(q))
                    .map(|(n, y)| n * y)
                    .sum::<f64>()
        })
        .sum()
}

fn centre(m: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0..2.0f64, m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn sphere_quadrature_invariants(m in 3usize..=4, radius in 0.3..3.0f64, c in centre(4)) {
        let level = if m == 3 { 3 } else { 2 };
        let c = &c[..m];
        let mesh = build_sphere_surface(m, level, radius, c).unwrap();
        prop_assert!(closure(&mesh) <= 1e-3 * mesh.area());
        let expected = m as f64 * mesh.descriptor().volume();
        prop_assert!((flux_of_position(&mesh) - expected).abs() <= 5e-3 * expected);
        let finer = build_sphere_surface(m, level + 1, radius, c).unwrap();
        prop_assert!(finer.h() <= 0.6 * mesh.h());
    }

    #[test]
    fn ellipsoid_quadrature_invariants(r in prop::collection::vec(0.5..2.0f64, 3), c in centre(3)) {
        let mesh = build_ellipsoid_surface(3, &r, &c).unwrap();
        prop_assert!(closure(&mesh) <= 1e-3 * mesh.area());
        let expected = 3.0 * mesh.descriptor().volume();
        let shifted = flux_of_position(&mesh)
            - (0..mesh.len()).map(|q| mesh.weight(q) * mesh.normal(q).iter().zip(&c).map(|(n, x)| n * x).sum::<f64>()).sum::<f64>();
        prop_assert!((shifted - expected).abs() <= 5e-3 * expected, "{} vs {}", shifted, expected);
        let finer = build_ellipsoid_surface(4, &r, &c).unwrap();
        prop_assert!(finer.h() <= 0.6 * mesh.h());
    }
}
