use std::sync::Arc;

use lamehardy_core::boundary::{cauchy_monogenic, lame_cauchy_integral, projections_from, Side};
use lamehardy_core::clifford::Multivector;
use lamehardy_core::geometry::{build_sphere_surface, SurfaceMesh};
use lamehardy_core::poly::PolyField;
use lamehardy_core::{singular_sl, LameParams, LipschitzJet};
use proptest::prelude::*;

const STEP: f64 = 1e-4;

fn sphere(level: u32) -> Arc<SurfaceMesh> {
    Arc::new(build_sphere_surface(3, level, 1.0, &[0.0; 3]).unwrap())
}

fn smooth_jet(mesh: &Arc<SurfaceMesh>, seed: u64) -> LipschitzJet {
    LipschitzJet::from_poly(mesh.clone(), &PolyField::random(3, 3, seed).unwrap(), 1.0).unwrap()
}

fn params() -> impl Strategy<Value = LameParams> {
    (0.2..4.0f64, -0.1..4.0f64).prop_map(|(mu, lambda)| LameParams::new(mu, lambda).unwrap())
}

fn interior_point() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-0.4..0.4f64, 3).prop_filter("dist >= 0.3", |x| {
        x.iter().map(|c| c * c).sum::<f64>() <= 0.49
    })
}

/// `a Σ ∂_j F e_j + b Σ e_j ∂_j F` by central differences.
fn m_operator(jet: &LipschitzJet, p: &LameParams, x: &[f64]) -> Multivector {
    let mut out = Multivector::zero(3);
    for j in 0..3 {
        let mut plus = x.to_vec();
        let mut minus = x.to_vec();
        plus[j] += STEP;
        minus[j] -= STEP;
        let d = (lame_cauchy_integral(jet, p, &plus).unwrap()
            - lame_cauchy_integral(jet, p, &minus).unwrap())
            * (0.5 / STEP);
        let ej = Multivector::generator(3, j + 1);
        out += d * ej * p.a() + ej * d * p.b();
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn m_operator_intertwines_with_cauchy(seed in any::<u64>(), p in params(), x in interior_point()) {
        let mesh = sphere(3);
        let jet = smooth_jet(&mesh, seed);
        let traces: Vec<Multivector> = (0..mesh.len()).map(|q| jet.m_trace(q, &p)).collect();
        let lhs = m_operator(&jet, &p, &x);
        let rhs = cauchy_monogenic(&mesh, &traces, Side::Left, &x).unwrap();
        prop_assert!(lhs.distance(&rhs) <= 1e-2 * rhs.clifford_norm().max(1e-12), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn projection_algebra_follows_from_involution(seed in any::<u64>(), p in params()) {
        let mesh = sphere(2);
        let f = smooth_jet(&mesh, seed);
        let s = singular_sl(&f, &p).jet;
        let ss = singular_sl(&s, &p).jet;
        let involution = ss.sub(&f).unwrap().norm();
        let (plus, minus) = projections_from(&f, &s);
        let (pp, pm) = projections_from(&plus, &singular_sl(&plus, &p).jet);
        let (mp, mm) = projections_from(&minus, &singular_sl(&minus, &p).jet);
        prop_assert!(pp.sub(&plus).unwrap().norm() <= 2.0 * involution);
        prop_assert!(mm.sub(&minus).unwrap().norm() <= 2.0 * involution);
        prop_assert!(mp.norm() <= 2.0 * involution);
        prop_assert!(pm.norm() <= 2.0 * involution);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(3))]

    #[test]
    fn involution_residual_shrinks_under_refinement(seed in any::<u64>()) {
        let p = LameParams::default();
        let mut previous = f64::INFINITY;
        for level in 1..=3 {
            let f = smooth_jet(&sphere(level), seed);
            let s = singular_sl(&f, &p).jet;
            let residual = singular_sl(&s, &p).jet.sub(&f).unwrap().norm() / f.norm();
            prop_assert!(residual < previous, "level {}: {} after {}", level, residual, previous);
            previous = residual;
        }
    }
}
