//! Teodorescu transforms and the volume/boundary representation residuals.

use std::sync::Arc;

use crate::boundary::lame_cauchy_integral;
use crate::clifford::{CompensatedSum, Multivector};
use crate::error::{domain, Error, Result};
use crate::geometry::{build_polar_volume, dist2, SurfaceMesh, VolumeGrid, DEFAULT_RESOLUTION};
use crate::jet::LipschitzJet;
use crate::kernels::{eval_e0, KernelConsts};
use crate::params::LameParams;
use crate::poly::{apply_operator, Operator, PolyField};

/// Multivector samples at the points of a volume grid.
#[derive(Debug, Clone)]
pub struct VolumeSampleField<'a> {
    grid: &'a VolumeGrid,
    values: Vec<Multivector>,
}

impl<'a> VolumeSampleField<'a> {
    pub fn new(grid: &'a VolumeGrid, values: Vec<Multivector>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(domain(format!(
                "{} samples for {} grid points",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| v.dim() != grid.dim()) {
            return Err(domain("sample dimension differs from the grid dimension"));
        }
        Ok(VolumeSampleField { grid, values })
    }

    /// Exact polynomial samples.
    pub fn from_poly(grid: &'a VolumeGrid, f: &PolyField) -> Result<Self> {
        if f.dim() != grid.dim() {
            return Err(domain("field and grid dimensions differ"));
        }
        let f = f.compile();
        let values = (0..grid.len()).map(|i| f.eval(grid.point(i))).collect();
        Ok(VolumeSampleField { grid, values })
    }

    pub fn grid(&self) -> &VolumeGrid {
        self.grid
    }

    pub fn values(&self) -> &[Multivector] {
        &self.values
    }
}

/// Which volume potential to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Teodorescu {
    /// Inverts `DD` (up to sign).
    H,
    /// Inverts `D·D`.
    I,
    /// The Lamé combination `-c_I T_I + c_H T_H`.
    L,
}

/// The evaluation point must be the grid's pole or stay one cell away from every point.
fn volume_guard(grid: &VolumeGrid, x: &[f64]) -> Result<()> {
    let scale = grid
        .pole()
        .iter()
        .chain(x)
        .fold(1.0f64, |a, v| a.max(v.abs()));
    if dist2(grid.pole(), x).sqrt() <= 1e-12 * scale {
        return Ok(());
    }
    let guard = grid.cell_diameter();
    let distance = (0..grid.len())
        .map(|i| dist2(grid.point(i), x))
        .fold(f64::INFINITY, f64::min)
        .sqrt();
    if distance < guard {
        return Err(Error::NearSingular { distance, guard });
    }
    Ok(())
}

/// `T_H = ∫ E₁(y-x) f(y) dy`, `T_I = -½(∫ E₀(y-x) f(y) (y-x) dy + Σ_i e_i ∫ E₁(y-x) f(y) dy e_i)`,
/// `T_L = -c_I T_I + c_H T_H`.
pub fn teodorescu(
    values: &VolumeSampleField<'_>,
    which: Teodorescu,
    p: &LameParams,
    x: &[f64],
) -> Result<Multivector> {
    let grid = values.grid;
    let m = grid.dim();
    if x.len() != m {
        return Err(domain("evaluation point has the wrong dimension"));
    }
    volume_guard(grid, x)?;
    let k = KernelConsts::new(m);
    let mut e1_sum = CompensatedSum::new(m);
    let mut e0_sum = CompensatedSum::new(m);
    for (i, f) in values.values.iter().enumerate() {
        let y = grid.point(i);
        let d: Vec<f64> = y.iter().zip(x).map(|(a, b)| a - b).collect();
        let r2: f64 = d.iter().map(|v| v * v).sum();
        if r2 == 0.0 {
            continue;
        }
        let irm = k.inv_rm(r2);
        let w = grid.weight(i);
        e1_sum.add_scaled(w * k.inv_sigma * irm * r2 / (m as f64 - 2.0), f);
        if which != Teodorescu::H {
            // E₀(d) f d = -(1/σ r^m) d f d
            e0_sum.add_scaled(
                -w * k.inv_sigma * irm,
                &f.vector_right_mul(&d).vector_left_mul(&d),
            );
        }
    }
    let th = e1_sum.total();
    let ti = || (e0_sum.total() + th.generator_sandwich()) * -0.5;
    Ok(match which {
        Teodorescu::H => th,
        Teodorescu::I => ti(),
        Teodorescu::L => ti() * -p.c_i() + th * p.c_h(),
    })
}

/// Borel–Pompeiu residual `C^l f + c_H C_H^l(M f) - c_I C_I^r(M̄ f) + T_L(L f) - f(x)`,
/// with the `-f(x)` term dropped when `x` lies outside the surface.
pub fn borel_pompeiu_residual(
    f: &PolyField,
    p: &LameParams,
    surface: &Arc<SurfaceMesh>,
    volume: &VolumeGrid,
    x: &[f64],
) -> Result<Multivector> {
    let m = surface.dim();
    if f.dim() != m || volume.dim() != m {
        return Err(domain("field, surface and grid dimensions differ"));
    }
    let jet = LipschitzJet::from_poly(surface.clone(), f, 1.0)?;
    let boundary = lame_cauchy_integral(&jet, p, x)?;
    let lf = apply_operator(f, Operator::L, p);
    let samples = VolumeSampleField::from_poly(volume, &lf)?;
    let volume_part = teodorescu(&samples, Teodorescu::L, p, x)?;
    let total = boundary + volume_part;
    if surface.descriptor().contains(x) {
        Ok(total - f.evaluate_at(x)?)
    } else {
        Ok(total)
    }
}

/// [`borel_pompeiu_residual`] on the polar grid centered at `x` (interior)
/// or at the surface center (exterior).
pub fn borel_pompeiu_residual_default(
    f: &PolyField,
    p: &LameParams,
    surface: &Arc<SurfaceMesh>,
    resolution: usize,
    x: &[f64],
) -> Result<Multivector> {
    let shape = surface.descriptor();
    let pole = if shape.contains(x) {
        x.to_vec()
    } else {
        shape.center.clone()
    };
    let grid = build_polar_volume(shape, &pole, resolution)?;
    borel_pompeiu_residual(f, p, surface, &grid, x)
}

/// Default polar volume resolution.
pub const DEFAULT_VOLUME_RESOLUTION: usize = DEFAULT_RESOLUTION;

/// Exterior Lamé solutions with a limit at infinity.
#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum ExteriorSolution {
    /// `E₀(· - c)` with `c` inside the surface; vanishes at infinity.
    TranslatedKernel { center: Vec<f64> },
    /// A constant multivector `κ`.
    Constant(Multivector),
}

impl ExteriorSolution {
    fn value(&self, x: &[f64]) -> Result<Multivector> {
        match self {
            ExteriorSolution::TranslatedKernel { center } => {
                let d: Vec<f64> = x.iter().zip(center).map(|(a, b)| a - b).collect();
                eval_e0(&d)
            }
            ExteriorSolution::Constant(k) => Ok(*k),
        }
    }

    fn at_infinity(&self, m: usize) -> Multivector {
        match self {
            ExteriorSolution::TranslatedKernel { .. } => Multivector::zero(m),
            ExteriorSolution::Constant(k) => *k,
        }
    }

    fn jet(&self, mesh: &Arc<SurfaceMesh>) -> Result<LipschitzJet> {
        match self {
            ExteriorSolution::TranslatedKernel { center } => {
                LipschitzJet::from_translated_kernel(mesh.clone(), center, 1.0)
            }
            ExteriorSolution::Constant(k) => {
                let n = mesh.len();
                let grad = vec![vec![Multivector::zero(mesh.dim()); mesh.dim()]; n];
                LipschitzJet::new(mesh.clone(), vec![*k; n], grad, 1.0)
            }
        }
    }
}

/// `f(x) + C^l f + c_H C_H^l(M f) - c_I C_I^r(M̄ f) - f(∞)` at an exterior point.
pub fn exterior_representation_residual(
    kind: &ExteriorSolution,
    p: &LameParams,
    surface: &Arc<SurfaceMesh>,
    x: &[f64],
) -> Result<Multivector> {
    let m = surface.dim();
    if x.len() != m {
        return Err(domain("evaluation point has the wrong dimension"));
    }
    if surface.descriptor().contains(x) {
        return Err(domain(
            "the exterior representation needs a point outside the surface",
        ));
    }
    if let ExteriorSolution::Constant(k) = kind {
        if k.dim() != m {
            return Err(domain("constant and surface dimensions differ"));
        }
    }
    let jet = kind.jet(surface)?;
    let boundary = lame_cauchy_integral(&jet, p, x)?;
    Ok(kind.value(x)? + boundary - kind.at_infinity(m))
}
