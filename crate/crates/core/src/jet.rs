//! First-order Whitney jets `{f⁰, f¹, …, f^m}` sampled at surface nodes.

use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clifford::{compensated_sum, Multivector};
use crate::error::{domain, Error, Result};
use crate::geometry::{dist2, ShapeDescriptor, SurfaceMesh};
use crate::kernels::{eval_e0, eval_e0_grad};
use crate::params::LameParams;
use crate::poly::{PolyField, TestSolution};

/// Boundary data of class `Lip(1+α, Γ)` on a mesh.
#[derive(Debug, Clone)]
pub struct LipschitzJet {
    mesh: Arc<SurfaceMesh>,
    f0: Vec<Multivector>,
    /// `grad[q * m + (j - 1)] = f^j(y_q)`
    grad: Vec<Multivector>,
    alpha: f64,
}

impl LipschitzJet {
    pub fn new(
        mesh: Arc<SurfaceMesh>,
        f0: Vec<Multivector>,
        grad: Vec<Vec<Multivector>>,
        alpha: f64,
    ) -> Result<Self> {
        let m = mesh.dim();
        let n = mesh.len();
        if f0.len() != n || grad.len() != n {
            return Err(domain(format!(
                "jet has {} values and {} gradients for {n} nodes",
                f0.len(),
                grad.len()
            )));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(domain(format!(
                "Hölder exponent must lie in (0, 1], got {alpha}"
            )));
        }
        let mut flat = Vec::with_capacity(n * m);
        for (q, g) in grad.into_iter().enumerate() {
            if g.len() != m {
                return Err(domain(format!(
                    "node {q} carries {} derivatives, expected {m}",
                    g.len()
                )));
            }
            flat.extend(g);
        }
        if f0.iter().chain(&flat).any(|v| v.dim() != m) {
            return Err(domain(
                "jet values must live in R_{0,m} of the mesh dimension",
            ));
        }
        Ok(LipschitzJet {
            mesh,
            f0,
            grad: flat,
            alpha,
        })
    }

    pub(crate) fn from_parts(
        mesh: Arc<SurfaceMesh>,
        f0: Vec<Multivector>,
        grad: Vec<Multivector>,
        alpha: f64,
    ) -> Self {
        debug_assert_eq!(f0.len(), mesh.len());
        debug_assert_eq!(grad.len(), mesh.len() * mesh.dim());
        LipschitzJet {
            mesh,
            f0,
            grad,
            alpha,
        }
    }

    pub fn zeros(mesh: Arc<SurfaceMesh>, alpha: f64) -> Self {
        let m = mesh.dim();
        let n = mesh.len();
        LipschitzJet::from_parts(
            mesh,
            vec![Multivector::zero(m); n],
            vec![Multivector::zero(m); n * m],
            alpha,
        )
    }

    /// Restriction of a polynomial and its partial derivatives.
    pub fn from_poly(mesh: Arc<SurfaceMesh>, f: &PolyField, alpha: f64) -> Result<Self> {
        let m = mesh.dim();
        if f.dim() != m {
            return Err(domain("field and mesh dimensions differ"));
        }
        let value = f.compile();
        let partials: Vec<_> = (1..=m)
            .map(|j| f.partial_derivative(j).map(|d| d.compile()))
            .collect::<Result<_>>()?;
        let mut f0 = Vec::with_capacity(mesh.len());
        let mut grad = Vec::with_capacity(mesh.len() * m);
        for q in 0..mesh.len() {
            let y = mesh.node(q);
            f0.push(value.eval(y));
            grad.extend(partials.iter().map(|p| p.eval(y)));
        }
        Ok(LipschitzJet::from_parts(mesh, f0, grad, alpha))
    }

    /// Restriction of `E₀(· - c)` with `∂_{y_j} E₀(y - c) = -E₀^j(y - c)`.
    pub fn from_translated_kernel(mesh: Arc<SurfaceMesh>, c: &[f64], alpha: f64) -> Result<Self> {
        let m = mesh.dim();
        if c.len() != m {
            return Err(domain("kernel center must have m coordinates"));
        }
        if !mesh.descriptor().contains(c) {
            return Err(domain("the kernel center must lie inside the surface"));
        }
        let mut f0 = Vec::with_capacity(mesh.len());
        let mut grad = Vec::with_capacity(mesh.len() * m);
        for q in 0..mesh.len() {
            let d: Vec<f64> = mesh.node(q).iter().zip(c).map(|(y, ci)| y - ci).collect();
            f0.push(eval_e0(&d)?);
            for j in 1..=m {
                grad.push(-eval_e0_grad(&d, j)?);
            }
        }
        Ok(LipschitzJet::from_parts(mesh, f0, grad, alpha))
    }

    /// Jet of a catalogued solution; the kernel marker is centered at the
    /// surface center.
    pub fn from_solution(
        mesh: Arc<SurfaceMesh>,
        solution: &TestSolution,
        alpha: f64,
    ) -> Result<Self> {
        match solution {
            TestSolution::Poly(f) => Self::from_poly(mesh, f, alpha),
            TestSolution::TranslatedKernel => {
                let c = mesh.descriptor().center.clone();
                Self::from_translated_kernel(mesh, &c, alpha)
            }
        }
    }

    pub fn mesh(&self) -> &Arc<SurfaceMesh> {
        &self.mesh
    }

    pub fn dim(&self) -> usize {
        self.mesh.dim()
    }

    pub fn len(&self) -> usize {
        self.f0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f0.is_empty()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    #[inline]
    pub fn f0(&self, q: usize) -> &Multivector {
        &self.f0[q]
    }

    pub fn values(&self) -> &[Multivector] {
        &self.f0
    }

    /// `f^j(y_q)`, 1-based `j`.
    #[inline]
    pub fn grad(&self, q: usize, j: usize) -> &Multivector {
        &self.grad[q * self.dim() + j - 1]
    }

    pub fn grads(&self, q: usize) -> &[Multivector] {
        let m = self.dim();
        &self.grad[q * m..(q + 1) * m]
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if !Arc::ptr_eq(&self.mesh, &other.mesh)
            && self.mesh.descriptor() != other.mesh.descriptor()
        {
            return Err(domain("jets live on different meshes"));
        }
        Ok(())
    }

    /// `s·self + t·other`.
    pub fn combine(&self, s: f64, other: &Self, t: f64) -> Result<Self> {
        self.check_compatible(other)?;
        let f0 = self
            .f0
            .iter()
            .zip(&other.f0)
            .map(|(a, b)| *a * s + *b * t)
            .collect();
        let grad = self
            .grad
            .iter()
            .zip(&other.grad)
            .map(|(a, b)| *a * s + *b * t)
            .collect();
        Ok(LipschitzJet::from_parts(
            self.mesh.clone(),
            f0,
            grad,
            self.alpha,
        ))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(1.0, other, -1.0)
    }

    pub fn scale(&self, s: f64) -> Self {
        let f0 = self.f0.iter().map(|a| *a * s).collect();
        let grad = self.grad.iter().map(|a| *a * s).collect();
        LipschitzJet::from_parts(self.mesh.clone(), f0, grad, self.alpha)
    }

    /// Weighted `L²(Γ)` norm over all `m + 1` components.
    pub fn norm(&self) -> f64 {
        compensated_sum((0..self.len()).map(|q| {
            let g: f64 = self.grads(q).iter().map(Multivector::norm_squared).sum();
            self.mesh.weight(q) * (self.f0[q].norm_squared() + g)
        }))
        .max(0.0)
        .sqrt()
    }

    /// Weighted `L²(Γ)` norm of the value component only.
    pub fn value_norm(&self) -> f64 {
        compensated_sum((0..self.len()).map(|q| self.mesh.weight(q) * self.f0[q].norm_squared()))
            .max(0.0)
            .sqrt()
    }

    /// `a Σ f^j e_j + b Σ e_j f^j` at node `q`.
    pub fn m_trace(&self, q: usize, p: &LameParams) -> Multivector {
        let (fe, ef) = self.dirac_sums(q);
        fe * p.a() + ef * p.b()
    }

    /// `b Σ f^j e_j + a Σ e_j f^j` at node `q`.
    pub fn mbar_trace(&self, q: usize, p: &LameParams) -> Multivector {
        let (fe, ef) = self.dirac_sums(q);
        fe * p.b() + ef * p.a()
    }

    fn dirac_sums(&self, q: usize) -> (Multivector, Multivector) {
        let m = self.dim();
        let mut fe = Multivector::zero(m);
        let mut ef = Multivector::zero(m);
        for (j, g) in self.grads(q).iter().enumerate() {
            fe += g.right_generator(j + 1);
            ef += g.left_generator(j + 1);
        }
        (fe, ef)
    }

    /// Largest sampled Whitney quotient
    /// `‖f⁰(x) - f⁰(y) - Σ f^j(y)(x_j - y_j)‖ / |x - y|^{1+α}` over random
    /// node pairs with `|x - y| ≤ 8h`.
    pub fn whitney_constant(&self, samples: usize, seed: u64) -> f64 {
        let n = self.len();
        let m = self.dim();
        let reach2 = (8.0 * self.mesh.h()).powi(2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        let mut taken = 0;
        let mut attempts = 0;
        while taken < samples && attempts < samples * 1000 {
            attempts += 1;
            let (qx, qy) = (rng.random_range(0..n), rng.random_range(0..n));
            let (x, y) = (self.mesh.node(qx), self.mesh.node(qy));
            let r2 = dist2(x, y);
            if qx == qy || r2 > reach2 {
                continue;
            }
            taken += 1;
            let mut rem = self.f0[qx] - self.f0[qy];
            for j in 1..=m {
                rem.axpy(-(x[j - 1] - y[j - 1]), self.grad(qy, j));
            }
            worst = worst.max(rem.clifford_norm() / r2.sqrt().powf(1.0 + self.alpha));
        }
        worst
    }

    pub fn to_file(&self) -> JetFile {
        JetFile {
            m: self.dim(),
            alpha: self.alpha,
            mesh: self.mesh.descriptor().clone(),
            f0: self.f0.clone(),
            grad: self
                .grad
                .chunks_exact(self.dim())
                .map(<[Multivector]>::to_vec)
                .collect(),
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string(&self.to_file())?;
        std::fs::write(path, text)?;
        Ok(())
    }

    /// Loads a jet file, building its mesh from the stored descriptor.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let file: JetFile =
            serde_json::from_str(&text).map_err(|e| Error::Malformed(e.to_string()))?;
        file.into_jet(None)
    }
}

/// Jet JSON form.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JetFile {
    pub m: usize,
    pub alpha: f64,
    pub mesh: ShapeDescriptor,
    pub f0: Vec<Multivector>,
    pub grad: Vec<Vec<Multivector>>,
}

impl JetFile {
    /// Attaches the data to `mesh` when given (its descriptor must match),
    /// otherwise builds the mesh from the descriptor.
    pub fn into_jet(self, mesh: Option<Arc<SurfaceMesh>>) -> Result<LipschitzJet> {
        if self.m != self.mesh.m {
            return Err(Error::Malformed(format!(
                "jet dimension {} differs from mesh dimension {}",
                self.m, self.mesh.m
            )));
        }
        let mesh = match mesh {
            Some(mesh) => {
                if mesh.descriptor() != &self.mesh {
                    return Err(Error::Malformed(
                        "jet mesh descriptor does not match".into(),
                    ));
                }
                mesh
            }
            None => Arc::new(SurfaceMesh::from_descriptor(&self.mesh)?),
        };
        LipschitzJet::new(mesh, self.f0, self.grad, self.alpha)
            .map_err(|e| Error::Malformed(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_sphere_surface;
    use crate::poly::{make_test_solution, SolutionKind};

    fn mesh(level: u32) -> Arc<SurfaceMesh> {
        Arc::new(build_sphere_surface(3, level, 1.0, &[0.0; 3]).unwrap())
    }

    fn jet_of(kind: SolutionKind, level: u32) -> LipschitzJet {
        let sol = make_test_solution(&kind, 3).unwrap();
        LipschitzJet::from_solution(mesh(level), &sol, 1.0).unwrap()
    }

    #[test]
    fn trace_examples() {
        let p = LameParams::new(1.0, 1.0).unwrap();
        let c = jet_of(SolutionKind::Constant, 1);
        assert!(c.m_trace(0, &p).is_zero());
        let y1 = jet_of(SolutionKind::Coordinate, 1);
        let expected = Multivector::generator(3, 1) * 3.0;
        assert_eq!(y1.m_trace(5, &p), expected);
        let lin = jet_of(SolutionKind::MonogenicLinear, 1);
        assert!(lin.m_trace(7, &p).max_abs() < 1e-15);
        assert!(lin.mbar_trace(7, &p).max_abs() < 1e-15);
    }

    #[test]
    fn whitney_constant_is_finite_for_smooth_data() {
        let jet = jet_of(SolutionKind::RandomPoly { degree: 3, seed: 4 }, 2);
        let c = jet.whitney_constant(500, 1);
        assert!(c.is_finite() && c > 0.0);
        let lin = jet_of(SolutionKind::MonogenicLinear, 2);
        assert!(lin.whitney_constant(500, 1) < 1e-10);
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let m = mesh(0);
        let f0 = vec![Multivector::zero(3); 3];
        assert!(LipschitzJet::new(m, f0, vec![], 1.0).is_err());
    }

    #[test]
    fn json_round_trip() {
        let jet = jet_of(SolutionKind::UniversalQuadratic, 0);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("jet.json");
        jet.save(&path).unwrap();
        let back = LipschitzJet::load(&path).unwrap();
        assert_eq!(back.values(), jet.values());
        assert_eq!(back.grads(3), jet.grads(3));
        std::fs::write(&path, "{\"m\":3}").unwrap();
        assert!(matches!(
            LipschitzJet::load(&path),
            Err(Error::Malformed(_))
        ));
    }
}
