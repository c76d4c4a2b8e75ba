//! Fundamental solutions `E₀` (of `D`) and `E₁` (of `-Δ`) and their
//! derivatives with respect to the target point.
//!
//! All functions take the displacement `x = y - z` from the target `z` to the
//! source `y`. The gradients `E₀^j`, `E₁^j` differentiate in `z`, so they carry
//! the opposite sign of a derivative in `x`.

use std::f64::consts::PI;

use crate::clifford::Multivector;
use crate::error::{domain, Error, Result};

/// `Γ(k/2)` for a positive integer `k`, by the recurrence from `Γ(1/2)` or `Γ(1)`.
fn gamma_half(k: usize) -> f64 {
    let (mut value, mut x) = if k % 2 == 0 {
        (1.0, 1.0)
    } else {
        (PI.sqrt(), 0.5)
    };
    let target = k as f64 / 2.0;
    while x < target {
        value *= x;
        x += 1.0;
    }
    value
}

/// `σ_m = 2π^{m/2} / Γ(m/2)`, the area of the unit sphere in `R^m`.
pub fn surface_area_unit_sphere(m: usize) -> f64 {
    assert!(m >= 1, "surface area needs m ≥ 1");
    2.0 * PI.powf(m as f64 / 2.0) / gamma_half(m)
}

/// Volume of the unit ball, `σ_m / m`.
pub fn volume_unit_ball(m: usize) -> f64 {
    surface_area_unit_sphere(m) / m as f64
}

/// Dimension and normalisation shared by all kernel evaluations.
#[derive(Debug, Clone, Copy)]
pub struct KernelConsts {
    pub m: usize,
    pub sigma: f64,
    pub inv_sigma: f64,
}

impl KernelConsts {
    pub fn new(m: usize) -> Self {
        let sigma = surface_area_unit_sphere(m);
        KernelConsts {
            m,
            sigma,
            inv_sigma: 1.0 / sigma,
        }
    }

    /// `1/r^m` computed from `r² `.
    #[inline]
    pub fn inv_rm(&self, r2: f64) -> f64 {
        let r = r2.sqrt();
        match self.m {
            3 => 1.0 / (r2 * r),
            4 => 1.0 / (r2 * r2),
            m => 1.0 / r.powi(m as i32),
        }
    }
}

fn radius_squared(x: &[f64]) -> Result<f64> {
    if x.len() < 3 {
        return Err(domain(format!("kernels need m ≥ 3, got {}", x.len())));
    }
    let r2: f64 = x.iter().map(|v| v * v).sum();
    if r2 == 0.0 {
        return Err(Error::Singularity("kernel evaluated at the origin".into()));
    }
    Ok(r2)
}

/// `E₁(x) = 1 / ((m-2) σ_m |x|^{m-2})`.
pub fn eval_e1(x: &[f64]) -> Result<f64> {
    let r2 = radius_squared(x)?;
    let m = x.len();
    let k = KernelConsts::new(m);
    Ok(k.inv_sigma / ((m - 2) as f64 * r2.sqrt().powi(m as i32 - 2)))
}

/// `E₀(x) = -x / (σ_m |x|^m)`.
pub fn eval_e0(x: &[f64]) -> Result<Multivector> {
    let r2 = radius_squared(x)?;
    let k = KernelConsts::new(x.len());
    let s = -k.inv_sigma * k.inv_rm(r2);
    let scaled: Vec<f64> = x.iter().map(|v| s * v).collect();
    Multivector::embed_vector(&scaled)
}

fn check_axis(j: usize, m: usize) -> Result<()> {
    if (1..=m).contains(&j) {
        Ok(())
    } else {
        Err(domain(format!("axis {j} outside 1..={m}")))
    }
}

/// `E₀^j(x) = (1/σ_m) (e_j / |x|^m - m x_j x / |x|^{m+2})`.
pub fn eval_e0_grad(x: &[f64], j: usize) -> Result<Multivector> {
    let r2 = radius_squared(x)?;
    let m = x.len();
    check_axis(j, m)?;
    let k = KernelConsts::new(m);
    let irm = k.inv_rm(r2);
    let t = m as f64 * x[j - 1] * irm / r2;
    let mut v: Vec<f64> = x.iter().map(|xi| -t * xi).collect();
    v[j - 1] += irm;
    for c in v.iter_mut() {
        *c *= k.inv_sigma;
    }
    Multivector::embed_vector(&v)
}

/// `E₁^j(x) = x_j / (σ_m |x|^m)`.
pub fn eval_e1_grad(x: &[f64], j: usize) -> Result<f64> {
    let r2 = radius_squared(x)?;
    let m = x.len();
    check_axis(j, m)?;
    let k = KernelConsts::new(m);
    Ok(x[j - 1] * k.inv_sigma * k.inv_rm(r2))
}
