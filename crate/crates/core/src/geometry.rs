//! Surface and volume quadrature on spheres and ellipsoids in `R^3` and `R^4`.

use std::collections::HashMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Largest refinement level accepted for surfaces.
pub const MAX_LEVEL_M3: u32 = 6;
pub const MAX_LEVEL_M4: u32 = 4;
/// Largest volume resolution.
pub const MAX_RESOLUTION: usize = 64;
/// Volume resolution used when none is given.
pub const DEFAULT_RESOLUTION: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Sphere,
    Ellipsoid,
}

/// Everything needed to rebuild a mesh: shape, center, semi-axes and level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeDescriptor {
    pub shape: Shape,
    pub m: usize,
    pub center: Vec<f64>,
    pub radii: Vec<f64>,
    pub level: u32,
}

impl ShapeDescriptor {
    pub fn sphere(m: usize, level: u32, radius: f64, center: &[f64]) -> Self {
        ShapeDescriptor {
            shape: Shape::Sphere,
            m,
            center: center.to_vec(),
            radii: vec![radius; m],
            level,
        }
    }

    pub fn unit_sphere(m: usize, level: u32) -> Self {
        Self::sphere(m, level, 1.0, &vec![0.0; m])
    }

    pub fn ellipsoid(level: u32, radii: &[f64], center: &[f64]) -> Self {
        ShapeDescriptor {
            shape: Shape::Ellipsoid,
            m: radii.len(),
            center: center.to_vec(),
            radii: radii.to_vec(),
            level,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m != 3 && self.m != 4 {
            return Err(domain(format!(
                "surfaces are available for m ∈ {{3, 4}}, got {}",
                self.m
            )));
        }
        if self.center.len() != self.m || self.radii.len() != self.m {
            return Err(domain("center and radii must have m entries"));
        }
        if self.radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(domain("radii must be positive"));
        }
        if self.shape == Shape::Sphere && self.radii.iter().any(|r| *r != self.radii[0]) {
            return Err(domain("a sphere needs equal radii"));
        }
        let cap = if self.m == 3 {
            MAX_LEVEL_M3
        } else {
            MAX_LEVEL_M4
        };
        if self.level > cap {
            return Err(domain(format!(
                "level {} exceeds the cap {cap} for m = {}",
                self.level, self.m
            )));
        }
        Ok(())
    }

    /// `Σ ((x_i - c_i)/r_i)²`; below 1 inside, above 1 outside.
    pub fn level_set(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(&self.center)
            .zip(&self.radii)
            .map(|((xi, ci), ri)| ((xi - ci) / ri).powi(2))
            .sum()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.level_set(x) < 1.0
    }

    /// Exact distance for spheres; for ellipsoids a lower bound from the
    /// semi-axes.
    pub fn distance_to_boundary(&self, x: &[f64]) -> f64 {
        let scaled = self.level_set(x).sqrt();
        let rmin = self.radii.iter().cloned().fold(f64::INFINITY, f64::min);
        match self.shape {
            Shape::Sphere => (scaled - 1.0).abs() * self.radii[0],
            Shape::Ellipsoid => (scaled - 1.0).abs() * rmin,
        }
    }

    pub fn volume(&self) -> f64 {
        crate::kernels::volume_unit_ball(self.m) * self.radii.iter().product::<f64>()
    }
}

/// Quadrature nodes, outward unit normals, weights and tangent frames on a
/// closed surface. Point data are stored flat with stride `m`.
#[derive(Debug, Clone)]
pub struct SurfaceMesh {
    descriptor: ShapeDescriptor,
    nodes: Vec<f64>,
    normals: Vec<f64>,
    weights: Vec<f64>,
    frames: Vec<f64>,
    h: f64,
}

impl SurfaceMesh {
    pub fn from_descriptor(descriptor: &ShapeDescriptor) -> Result<Self> {
        descriptor.validate()?;
        let m = descriptor.m;
        let (units, sphere_weights) = match m {
            3 => icosphere(descriptor.level),
            _ => cubed_hypersphere(descriptor.level),
        };
        let n = sphere_weights.len();
        let volume_factor: f64 = descriptor.radii.iter().product();
        let mut nodes = Vec::with_capacity(n * m);
        let mut normals = Vec::with_capacity(n * m);
        let mut weights = Vec::with_capacity(n);
        for (u, w) in units.chunks_exact(m).zip(&sphere_weights) {
            // y = c + R u, with area element |det R| |R^{-1} u| dS(u)
            let grad: Vec<f64> = u
                .iter()
                .zip(&descriptor.radii)
                .map(|(ui, ri)| ui / ri)
                .collect();
            let gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
            for i in 0..m {
                nodes.push(descriptor.center[i] + descriptor.radii[i] * u[i]);
                normals.push(grad[i] / gnorm);
            }
            weights.push(w * volume_factor * gnorm);
        }
        let mut frames = Vec::with_capacity(n * (m - 1) * m);
        for normal in normals.chunks_exact(m) {
            frames.extend(frame_for(normal));
        }
        let area: f64 = weights.iter().sum();
        let h = (area / n as f64).powf(1.0 / (m as f64 - 1.0));
        Ok(SurfaceMesh {
            descriptor: descriptor.clone(),
            nodes,
            normals,
            weights,
            frames,
            h,
        })
    }

    pub fn descriptor(&self) -> &ShapeDescriptor {
        &self.descriptor
    }

    pub fn dim(&self) -> usize {
        self.descriptor.m
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    #[inline]
    pub fn node(&self, q: usize) -> &[f64] {
        let m = self.dim();
        &self.nodes[q * m..(q + 1) * m]
    }

    #[inline]
    pub fn normal(&self, q: usize) -> &[f64] {
        let m = self.dim();
        &self.normals[q * m..(q + 1) * m]
    }

    #[inline]
    pub fn weight(&self, q: usize) -> f64 {
        self.weights[q]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub(crate) fn nodes_flat(&self) -> &[f64] {
        &self.nodes
    }

    pub(crate) fn normals_flat(&self) -> &[f64] {
        &self.normals
    }

    /// Characteristic spacing `(area / N)^{1/(m-1)}`.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn area(&self) -> f64 {
        crate::clifford::compensated_sum(self.weights.iter().copied())
    }

    /// `m - 1` orthonormal vectors spanning the tangent space at node `q`.
    pub fn tangent_frame(&self, q: usize) -> Result<Vec<Vec<f64>>> {
        if q >= self.len() {
            return Err(domain(format!(
                "node index {q} out of range (N = {})",
                self.len()
            )));
        }
        let m = self.dim();
        let stride = (m - 1) * m;
        Ok(self.frames[q * stride..(q + 1) * stride]
            .chunks_exact(m)
            .map(<[f64]>::to_vec)
            .collect())
    }

    pub(crate) fn frame_flat(&self, q: usize) -> &[f64] {
        let m = self.dim();
        let stride = (m - 1) * m;
        &self.frames[q * stride..(q + 1) * stride]
    }

    /// Interior and exterior probes `y_q ∓ δ n_q`.
    pub fn probe_pair(&self, q: usize, delta: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        if q >= self.len() {
            return Err(domain(format!(
                "node index {q} out of range (N = {})",
                self.len()
            )));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(domain(format!(
                "probe offset must be positive, got {delta}"
            )));
        }
        let y = self.node(q);
        let n = self.normal(q);
        let plus: Vec<f64> = y.iter().zip(n).map(|(yi, ni)| yi - delta * ni).collect();
        let minus: Vec<f64> = y.iter().zip(n).map(|(yi, ni)| yi + delta * ni).collect();
        if !self.descriptor.contains(&plus) {
            return Err(domain(format!(
                "interior probe at δ = {delta} leaves the domain"
            )));
        }
        Ok((plus, minus))
    }

    /// Smallest distance from `x` to a quadrature node.
    pub fn nearest_node_distance(&self, x: &[f64]) -> f64 {
        self.nodes
            .chunks_exact(self.dim())
            .map(|y| dist2(x, y))
            .fold(f64::INFINITY, f64::min)
            .sqrt()
    }

    /// Distance from `x` to the surface: analytic for spheres, the smaller of
    /// the semi-axis bound and the node distance for ellipsoids.
    pub fn distance_to_surface(&self, x: &[f64]) -> f64 {
        match self.descriptor.shape {
            Shape::Sphere => self.descriptor.distance_to_boundary(x),
            Shape::Ellipsoid => self
                .descriptor
                .distance_to_boundary(x)
                .min(self.nearest_node_distance(x)),
        }
    }

    pub fn export(&self) -> MeshExport {
        let m = self.dim();
        MeshExport {
            nodes: self.nodes.chunks_exact(m).map(<[f64]>::to_vec).collect(),
            normals: self.normals.chunks_exact(m).map(<[f64]>::to_vec).collect(),
            weights: self.weights.clone(),
        }
    }
}

/// Mesh export JSON form.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeshExport {
    pub nodes: Vec<Vec<f64>>,
    pub normals: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

pub fn build_sphere_surface(
    m: usize,
    level: u32,
    radius: f64,
    center: &[f64],
) -> Result<SurfaceMesh> {
    SurfaceMesh::from_descriptor(&ShapeDescriptor::sphere(m, level, radius, center))
}

pub fn build_ellipsoid_surface(level: u32, radii: &[f64], center: &[f64]) -> Result<SurfaceMesh> {
    SurfaceMesh::from_descriptor(&ShapeDescriptor::ellipsoid(level, radii, center))
}

#[inline]
pub(crate) fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn normalize(v: &mut [f64]) {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in v.iter_mut() {
        *x /= n;
    }
}

/// Gram–Schmidt on the coordinate axes, skipping the axis most aligned with `n`.
fn frame_for(n: &[f64]) -> Vec<f64> {
    let m = n.len();
    let skip = (0..m)
        .max_by(|&a, &b| n[a].abs().total_cmp(&n[b].abs()))
        .expect("nonempty normal");
    let mut basis: Vec<Vec<f64>> = vec![n.to_vec()];
    for axis in (0..m).filter(|&k| k != skip) {
        let mut v = vec![0.0; m];
        v[axis] = 1.0;
        // two passes keep the result orthogonal to rounding level
        for _ in 0..2 {
            for b in &basis {
                let dot: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= dot * bi;
                }
            }
        }
        normalize(&mut v);
        basis.push(v);
    }
    basis.into_iter().skip(1).flatten().collect()
}

/// Geodesic icosphere: per-face nodes at the centroid projected onto the unit
/// sphere, weighted by the spherical triangle area.
fn icosphere(level: u32) -> (Vec<f64>, Vec<f64>) {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let raw: [[f64; 3]; 12] = [
        [-1.0, phi, 0.0],
        [1.0, phi, 0.0],
        [-1.0, -phi, 0.0],
        [1.0, -phi, 0.0],
        [0.0, -1.0, phi],
        [0.0, 1.0, phi],
        [0.0, -1.0, -phi],
        [0.0, 1.0, -phi],
        [phi, 0.0, -1.0],
        [phi, 0.0, 1.0],
        [-phi, 0.0, -1.0],
        [-phi, 0.0, 1.0],
    ];
    let mut verts: Vec<[f64; 3]> = raw.iter().map(|v| unit3(*v)).collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..level {
        let mut cache: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |i: usize, j: usize, verts: &mut Vec<[f64; 3]>| -> usize {
            let key = (i.min(j), i.max(j));
            *cache.entry(key).or_insert_with(|| {
                let (a, b) = (verts[i], verts[j]);
                verts.push(unit3([a[0] + b[0], a[1] + b[1], a[2] + b[2]]));
                verts.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for &[a, b, c] in &faces {
            let ab = midpoint(a, b, &mut verts);
            let bc = midpoint(b, c, &mut verts);
            let ca = midpoint(c, a, &mut verts);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    let mut nodes = Vec::with_capacity(faces.len() * 3);
    let mut weights = Vec::with_capacity(faces.len());
    for &[a, b, c] in &faces {
        let (va, vb, vc) = (verts[a], verts[b], verts[c]);
        let centroid = unit3([
            va[0] + vb[0] + vc[0],
            va[1] + vb[1] + vc[1],
            va[2] + vb[2] + vc[2],
        ]);
        nodes.extend(centroid);
        weights.push(spherical_triangle_area(va, vb, vc));
    }
    (nodes, weights)
}

fn unit3(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

/// Solid angle of the triangle `(a, b, c)` on the unit sphere.
fn spherical_triangle_area(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    let dot = |u: [f64; 3], v: [f64; 3]| u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    let cross = [
        b[1] * c[2] - b[2] * c[1],
        b[2] * c[0] - b[0] * c[2],
        b[0] * c[1] - b[1] * c[0],
    ];
    let num = dot(a, cross).abs();
    let den = 1.0 + dot(a, b) + dot(b, c) + dot(c, a);
    2.0 * num.atan2(den)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for k in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * k + 1) as f64 * z * p1 - k as f64 * p2) / (k + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Equiangular cubed hypersphere: each of the eight facets `x_a = ±1` of the
/// cube `[-1, 1]⁴` is split into `n³` cells with `n = 2^level`, uniform in the
/// angles `arctan u_i`, and projected radially onto `S³`. Nodes are the
/// projected cell centers; weights integrate the projection Jacobian
/// `|p|^{-4}` with a 3-point Gauss rule per direction.
fn cubed_hypersphere(level: u32) -> (Vec<f64>, Vec<f64>) {
    let n = 1usize << level;
    let step = 0.5 * PI / n as f64;
    let (gx, gw) = gauss_legendre(3);
    let mut cell_nodes = Vec::with_capacity(n * n * n * 3);
    let mut cell_weights = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let lo = [i, j, k].map(|c| -0.25 * PI + c as f64 * step);
                cell_nodes.push(lo.map(|a| (a + 0.5 * step).tan()));
                let mut w = 0.0;
                for (xa, wa) in gx.iter().zip(&gw) {
                    let ta = lo[0] + 0.5 * step * (xa + 1.0);
                    for (xb, wb) in gx.iter().zip(&gw) {
                        let tb = lo[1] + 0.5 * step * (xb + 1.0);
                        for (xc, wc) in gx.iter().zip(&gw) {
                            let tc = lo[2] + 0.5 * step * (xc + 1.0);
                            let u = [ta.tan(), tb.tan(), tc.tan()];
                            let norm2 = 1.0 + u.iter().map(|v| v * v).sum::<f64>();
                            let jac: f64 =
                                [ta, tb, tc].iter().map(|t| 1.0 / t.cos().powi(2)).product();
                            w += wa * wb * wc * jac / (norm2 * norm2);
                        }
                    }
                }
                cell_weights.push(w * (0.5 * step).powi(3));
            }
        }
    }
    let mut nodes = Vec::with_capacity(8 * cell_weights.len() * 4);
    let mut weights = Vec::with_capacity(8 * cell_weights.len());
    for axis in 0..4 {
        for s in [1.0, -1.0] {
            for (u, &w) in cell_nodes.iter().zip(&cell_weights) {
                let mut p = [0.0; 4];
                p[axis] = s;
                let mut rest = u.iter();
                for (c, slot) in p.iter_mut().enumerate() {
                    if c != axis {
                        *slot = *rest.next().expect("three free coordinates");
                    }
                }
                normalize(&mut p);
                nodes.extend(p);
                weights.push(w);
            }
        }
    }
    (nodes, weights)
}

/// Cells of a volume quadrature rule inside a closed surface.
#[derive(Debug, Clone)]
pub struct VolumeGrid {
    m: usize,
    points: Vec<f64>,
    weights: Vec<f64>,
    pole: Vec<f64>,
    cell_diameter: f64,
}

impl VolumeGrid {
    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.m..(i + 1) * self.m]
    }

    #[inline]
    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn total_weight(&self) -> f64 {
        crate::clifford::compensated_sum(self.weights.iter().copied())
    }

    /// Center of the polar rule; integrands singular here are still
    /// integrated accurately because the radial Jacobian cancels them.
    pub fn pole(&self) -> &[f64] {
        &self.pole
    }

    /// Characteristic cell size `(|Ω| / N)^{1/m}`.
    pub fn cell_diameter(&self) -> f64 {
        self.cell_diameter
    }
}

/// Polar rule about `center`, the ball's own center.
pub fn build_ball_volume(
    m: usize,
    resolution: usize,
    radius: f64,
    center: &[f64],
) -> Result<VolumeGrid> {
    let shape = ShapeDescriptor::sphere(m, 0, radius, center);
    build_polar_volume(&shape, center, resolution)
}

/// Polar rule about an interior `pole`: rays in the directions of an angular
/// product rule, each sampled with Gauss–Legendre points up to the boundary.
///
/// `resolution` sets the radial and polar counts; azimuth uses twice as many.
pub fn build_polar_volume(
    shape: &ShapeDescriptor,
    pole: &[f64],
    resolution: usize,
) -> Result<VolumeGrid> {
    let m = shape.m;
    if m != 3 && m != 4 {
        return Err(domain(format!(
            "volume grids are available for m ∈ {{3, 4}}, got {m}"
        )));
    }
    if shape.center.len() != m || shape.radii.len() != m || pole.len() != m {
        return Err(domain("center, radii and pole must have m entries"));
    }
    if resolution == 0 || resolution > MAX_RESOLUTION {
        return Err(domain(format!(
            "resolution must lie in 1..={MAX_RESOLUTION}, got {resolution}"
        )));
    }
    if !shape.contains(pole) {
        return Err(domain(
            "the pole of a volume grid must lie inside the domain",
        ));
    }
    let (dirs, dir_weights) = angular_rule(m, resolution);
    let (gx, gw) = gauss_legendre(resolution);
    let mut points = Vec::with_capacity(dir_weights.len() * resolution * m);
    let mut weights = Vec::with_capacity(dir_weights.len() * resolution);
    for (u, wu) in dirs.chunks_exact(m).zip(&dir_weights) {
        let reach = ray_exit(shape, pole, u);
        for (&x, &w) in gx.iter().zip(&gw) {
            let r = 0.5 * reach * (x + 1.0);
            points.extend(pole.iter().zip(u).map(|(p, ui)| p + r * ui));
            weights.push(wu * 0.5 * reach * w * r.powi(m as i32 - 1));
        }
    }
    let cell_diameter = (shape.volume() / weights.len() as f64).powf(1.0 / m as f64);
    Ok(VolumeGrid {
        m,
        points,
        weights,
        pole: pole.to_vec(),
        cell_diameter,
    })
}

/// Distance from `p` along unit `u` to the boundary of the ellipsoid.
fn ray_exit(shape: &ShapeDescriptor, p: &[f64], u: &[f64]) -> f64 {
    let (mut qa, mut qb, mut qc) = (0.0, 0.0, -1.0);
    for i in 0..shape.m {
        let ri2 = shape.radii[i] * shape.radii[i];
        let d = p[i] - shape.center[i];
        qa += u[i] * u[i] / ri2;
        qb += 2.0 * u[i] * d / ri2;
        qc += d * d / ri2;
    }
    (-qb + (qb * qb - 4.0 * qa * qc).sqrt()) / (2.0 * qa)
}

/// Directions and weights integrating over the unit sphere `S^{m-1}`.
fn angular_rule(m: usize, n: usize) -> (Vec<f64>, Vec<f64>) {
    let (gx, gw) = gauss_legendre(n);
    let n_az = 2 * n;
    let dphi = 2.0 * PI / n_az as f64;
    let mut dirs = Vec::new();
    let mut weights = Vec::new();
    match m {
        3 => {
            for (&ct, &wt) in gx.iter().zip(&gw) {
                let st = (1.0 - ct * ct).sqrt();
                for k in 0..n_az {
                    let phi = (k as f64 + 0.5) * dphi;
                    dirs.extend([st * phi.cos(), st * phi.sin(), ct]);
                    weights.push(wt * dphi);
                }
            }
        }
        _ => {
            // sin²ψ dψ handled as sqrt(1 - t²) dt by second-kind Gauss–Chebyshev
            for k in 1..=n {
                let ang = k as f64 * PI / (n as f64 + 1.0);
                let t = ang.cos();
                let wpsi = PI / (n as f64 + 1.0) * ang.sin().powi(2);
                let spsi = ang.sin();
                for (&ct, &wt) in gx.iter().zip(&gw) {
                    let st = (1.0 - ct * ct).sqrt();
                    for a in 0..n_az {
                        let phi = (a as f64 + 0.5) * dphi;
                        dirs.extend([t, spsi * ct, spsi * st * phi.cos(), spsi * st * phi.sin()]);
                        weights.push(wpsi * wt * dphi);
                    }
                }
            }
        }
    }
    (dirs, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(5);
        let integral: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(8)).sum();
        assert!((integral - 2.0 / 9.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn icosphere_counts_and_area() {
        let mesh = build_sphere_surface(3, 0, 1.0, &[0.0; 3]).unwrap();
        assert_eq!(mesh.len(), 20);
        let mesh = build_sphere_surface(3, 3, 1.0, &[0.0; 3]).unwrap();
        assert_eq!(mesh.len(), 20 * 64);
        assert!((mesh.area() - 4.0 * PI).abs() <= 0.002 * 4.0 * PI);
    }

    #[test]
    fn hypersphere_area() {
        for level in 1..=3 {
            let mesh = build_sphere_surface(4, level, 1.0, &[0.0; 4]).unwrap();
            assert_eq!(mesh.len(), 8 << (3 * level));
            assert!((mesh.area() - 2.0 * PI * PI).abs() < 1e-4 * 2.0 * PI * PI);
        }
    }

    #[test]
    fn normals_point_outward() {
        for m in 3..=4 {
            let mesh = build_sphere_surface(m, 1, 2.0, &vec![0.5; m]).unwrap();
            for q in 0..mesh.len() {
                let n = mesh.normal(q);
                let d: f64 = n
                    .iter()
                    .zip(mesh.node(q))
                    .map(|(ni, yi)| ni * (yi - 0.5))
                    .sum();
                assert!(d > 0.0);
                assert!((n.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn frame_at_pole_spans_the_equatorial_plane() {
        let frame = frame_for(&[0.0, 0.0, 1.0]);
        assert_eq!(frame, vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn unsupported_requests_are_rejected() {
        assert!(build_sphere_surface(5, 1, 1.0, &[0.0; 5]).is_err());
        assert!(build_sphere_surface(3, 7, 1.0, &[0.0; 3]).is_err());
        assert!(build_ball_volume(5, 8, 1.0, &[0.0; 5]).is_err());
    }

    #[test]
    fn probe_examples() {
        let mesh = build_sphere_surface(3, 1, 1.0, &[0.0; 3]).unwrap();
        let (plus, minus) = mesh.probe_pair(0, 0.1).unwrap();
        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((norm(&plus) - 0.9).abs() < 1e-12);
        assert!((norm(&minus) - 1.1).abs() < 1e-12);
        assert!(mesh.probe_pair(0, 0.0).is_err());
        assert!(mesh.probe_pair(0, 2.5).is_err());
    }

    #[test]
    fn ball_volume_examples() {
        let grid = build_ball_volume(3, DEFAULT_RESOLUTION, 1.0, &[0.0; 3]).unwrap();
        let vol = 4.0 * PI / 3.0;
        assert!((grid.total_weight() - vol).abs() <= 0.005 * vol);
        let first: f64 = (0..grid.len())
            .map(|i| grid.weight(i) * grid.point(i)[0])
            .sum();
        assert!(first.abs() <= 1e-10 * vol);
        for i in 0..grid.len() {
            assert!(grid.point(i).iter().map(|x| x * x).sum::<f64>().sqrt() < 1.0);
        }
    }

    #[test]
    fn off_center_polar_grid_has_the_right_volume() {
        let shape = ShapeDescriptor::ellipsoid(0, &[1.0, 0.8, 0.6], &[0.0; 3]);
        let grid = build_polar_volume(&shape, &[0.3, -0.2, 0.1], 16).unwrap();
        let vol = 4.0 * PI / 3.0 * 0.48;
        assert!((grid.total_weight() - vol).abs() <= 1e-3 * vol);
    }
}
