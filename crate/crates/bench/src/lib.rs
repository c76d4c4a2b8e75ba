//! Shared fixtures for the algebra and operator benchmarks.

use std::sync::Arc;

use lamehardy_core::clifford::Multivector;
use lamehardy_core::geometry::{build_sphere_surface, SurfaceMesh};
use lamehardy_core::poly::PolyField;
use lamehardy_core::LipschitzJet;

/// Dense multivector with deterministic, non-trivial coefficients.
pub fn dense(m: usize, phase: f64) -> Multivector {
    let coeffs: Vec<f64> = (0..1usize << m)
        .map(|i| ((i as f64 + 1.0) * phase).sin())
        .collect();
    Multivector::from_coeffs(m, &coeffs).expect("valid dimension")
}

/// Unit sphere in R³ at the given icosphere level.
pub fn sphere(level: u32) -> Arc<SurfaceMesh> {
    Arc::new(build_sphere_surface(3, level, 1.0, &[0.0; 3]).expect("valid level"))
}

/// Jet of a seeded random cubic on `mesh`.
pub fn cubic_jet(mesh: &Arc<SurfaceMesh>) -> LipschitzJet {
    let f = PolyField::random(mesh.dim(), 3, 42).expect("valid dimension");
    LipschitzJet::from_poly(mesh.clone(), &f, 1.0).expect("jet sampling")
}
