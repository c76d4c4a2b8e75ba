//! Clifford-analysis toolkit for boundary integral operators of the
//! Lamé–Navier system on spheres and ellipsoids.

#![allow(clippy::needless_range_loop)]

pub mod boundary;
pub mod clifford;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod jet;
pub mod kernels;
pub mod params;
pub mod poly;
pub mod volume;

pub use boundary::{
    hardy_projections, lame_cauchy_integral, recover_jet, singular_sl, singular_sl_with,
    JetOperatorResult, SelfCell, Side, SlDiagnostics,
};
pub use clifford::{blade_product, geometric_product, BladeMask, Multivector};
pub use error::{Error, Result};
pub use geometry::{
    build_ball_volume, build_sphere_surface, ShapeDescriptor, SurfaceMesh, VolumeGrid,
};
pub use harness::{
    converge, decompose, decompose_file, run_suite, CheckRecord, ConvergenceRow, Decomposition,
    RunConfig, Suite, SuiteReport,
};
pub use jet::{JetFile, LipschitzJet};
pub use params::LameParams;
pub use poly::{
    apply_operator, classical_lame_residual, make_test_solution, Operator, PolyField, SolutionKind,
};
pub use volume::{
    borel_pompeiu_residual, exterior_representation_residual, teodorescu, ExteriorSolution,
    Teodorescu, VolumeSampleField,
};
