//! Boundary integral operators: Cauchy transforms for `D`, `DD`, `D·D` and the
//! Lamé–Navier operator, the Cauchy-type integral of a jet, the singular
//! operator `S_L`, the Hardy projections and jet recovery from traces.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clifford::{sandwich_factor, sign, CompensatedSum, Multivector};
use crate::error::{Error, Result};
use crate::geometry::{dist2, SurfaceMesh};
use crate::jet::LipschitzJet;
use crate::kernels::KernelConsts;
use crate::params::LameParams;

/// Order of the kernel relative to the density.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Off-surface evaluations closer than `h/2` are refused.
pub fn near_singular_guard(mesh: &SurfaceMesh, x: &[f64]) -> Result<()> {
    let guard = 0.5 * mesh.h();
    let distance = mesh.distance_to_surface(x);
    if distance < guard {
        return Err(Error::NearSingular { distance, guard });
    }
    Ok(())
}

fn check_samples(mesh: &SurfaceMesh, samples: &[Multivector], x: &[f64]) -> Result<()> {
    if samples.len() != mesh.len() {
        return Err(crate::error::domain(format!(
            "{} samples for {} nodes",
            samples.len(),
            mesh.len()
        )));
    }
    if x.len() != mesh.dim() {
        return Err(crate::error::domain(
            "evaluation point has the wrong dimension",
        ));
    }
    near_singular_guard(mesh, x)
}

/// Per-node geometry relative to `x`: displacement `d = y - x`, `1/|d|^m`, and `E₁(d)`.
struct Pair<'a> {
    d: [f64; 4],
    irm: f64,
    e1: f64,
    n: &'a [f64],
    w: f64,
}

fn pairs<'a>(
    mesh: &'a SurfaceMesh,
    x: &'a [f64],
    k: &'a KernelConsts,
) -> impl Iterator<Item = (usize, Pair<'a>)> + 'a {
    let m = mesh.dim();
    (0..mesh.len()).map(move |q| {
        let y = mesh.node(q);
        let mut d = [0.0; 4];
        for i in 0..m {
            d[i] = y[i] - x[i];
        }
        let r2: f64 = d[..m].iter().map(|v| v * v).sum();
        let irm = k.inv_rm(r2);
        let e1 = k.inv_sigma * irm * r2 / (m as f64 - 2.0);
        (
            q,
            Pair {
                d,
                irm,
                e1,
                n: mesh.normal(q),
                w: mesh.weight(q),
            },
        )
    })
}

/// `∫ E₀(y-x) n(y) f(y) dy` (left) or `∫ f(y) n(y) E₀(y-x) dy` (right).
pub fn cauchy_monogenic(
    mesh: &SurfaceMesh,
    samples: &[Multivector],
    side: Side,
    x: &[f64],
) -> Result<Multivector> {
    check_samples(mesh, samples, x)?;
    let m = mesh.dim();
    let k = KernelConsts::new(m);
    let mut acc = CompensatedSum::new(m);
    for (q, pr) in pairs(mesh, x, &k) {
        let d = &pr.d[..m];
        // E₀ = -d / (σ r^m)
        let term = match side {
            Side::Left => samples[q].vector_left_mul(pr.n).vector_left_mul(d),
            Side::Right => samples[q].vector_right_mul(pr.n).vector_right_mul(d),
        };
        acc.add_scaled(-pr.w * k.inv_sigma * pr.irm, &term);
    }
    Ok(acc.total())
}

/// `-∫ E₁(y-x) n(y) f(y) dy` (left) or `-∫ f(y) n(y) E₁(y-x) dy` (right).
pub fn cauchy_harmonic(
    mesh: &SurfaceMesh,
    samples: &[Multivector],
    side: Side,
    x: &[f64],
) -> Result<Multivector> {
    check_samples(mesh, samples, x)?;
    let m = mesh.dim();
    let k = KernelConsts::new(m);
    let mut acc = CompensatedSum::new(m);
    for (q, pr) in pairs(mesh, x, &k) {
        let term = match side {
            Side::Left => samples[q].vector_left_mul(pr.n),
            Side::Right => samples[q].vector_right_mul(pr.n),
        };
        acc.add_scaled(-pr.w * pr.e1, &term);
    }
    Ok(acc.total())
}

/// Right: `½(∫ E₀ f n (y-x) dy + Σ_j e_j ∫ E₁ f n dy e_j)`;
/// left: `½(∫ E₀ n f (y-x) dy + Σ_j e_j ∫ E₁ n f dy e_j)`.
pub fn cauchy_infra(
    mesh: &SurfaceMesh,
    samples: &[Multivector],
    side: Side,
    x: &[f64],
) -> Result<Multivector> {
    check_samples(mesh, samples, x)?;
    let m = mesh.dim();
    let k = KernelConsts::new(m);
    let mut first = CompensatedSum::new(m);
    let mut second = CompensatedSum::new(m);
    for (q, pr) in pairs(mesh, x, &k) {
        let d = &pr.d[..m];
        let core = match side {
            Side::Left => samples[q].vector_left_mul(pr.n),
            Side::Right => samples[q].vector_right_mul(pr.n),
        };
        // E₀ core d = -(1/σr^m) d core d
        first.add_scaled(
            -pr.w * k.inv_sigma * pr.irm,
            &core.vector_right_mul(d).vector_left_mul(d),
        );
        second.add_scaled(pr.w * pr.e1, &core);
    }
    Ok((first.total() + second.total().generator_sandwich()) * 0.5)
}

/// `-c_I C_I + c_H C_H` with matching sides.
pub fn cauchy_lame(
    mesh: &SurfaceMesh,
    samples: &[Multivector],
    side: Side,
    x: &[f64],
    p: &LameParams,
) -> Result<Multivector> {
    let infra = cauchy_infra(mesh, samples, side, x)?;
    let harmonic = cauchy_harmonic(mesh, samples, side, x)?;
    Ok(infra * -p.c_i() + harmonic * p.c_h())
}

/// Node data packed with stride `2^m` for the quadrature loops.
struct Packed {
    f0: Vec<f64>,
    grad: Vec<f64>,
    mt: Vec<f64>,
    mbt: Vec<f64>,
}

impl Packed {
    fn new(jet: &LipschitzJet, p: &LameParams) -> Self {
        let m = jet.dim();
        let nb = 1 << m;
        let n = jet.len();
        let mut f0 = Vec::with_capacity(n * nb);
        let mut grad = Vec::with_capacity(n * m * nb);
        let mut mt = Vec::with_capacity(n * nb);
        let mut mbt = Vec::with_capacity(n * nb);
        for q in 0..n {
            f0.extend_from_slice(jet.f0(q).coeffs());
            for g in jet.grads(q) {
                grad.extend_from_slice(g.coeffs());
            }
            mt.extend_from_slice(jet.m_trace(q, p).coeffs());
            mbt.extend_from_slice(jet.mbar_trace(q, p).coeffs());
        }
        Packed { f0, grad, mt, mbt }
    }
}

/// Value of the Cauchy-type integral `C_L⁰ f` at an off-surface point:
/// `C^l f⁰ + c_H C_H^l(M f) - c_I C_I^r(M̄ f)` with the jet's traces.
pub fn lame_cauchy_integral(jet: &LipschitzJet, p: &LameParams, x: &[f64]) -> Result<Multivector> {
    let packed = Packed::new(jet, p);
    cauchy_type_packed(jet.mesh(), &packed, p, x)
}

/// [`lame_cauchy_integral`] at many points, in parallel over the points.
pub fn lame_cauchy_integral_many(
    jet: &LipschitzJet,
    p: &LameParams,
    xs: &[Vec<f64>],
) -> Result<Vec<Multivector>> {
    let packed = Packed::new(jet, p);
    xs.par_iter()
        .map(|x| cauchy_type_packed(jet.mesh(), &packed, p, x))
        .collect()
}

fn cauchy_type_packed(
    mesh: &SurfaceMesh,
    packed: &Packed,
    p: &LameParams,
    x: &[f64],
) -> Result<Multivector> {
    let m = mesh.dim();
    if x.len() != m {
        return Err(crate::error::domain(
            "evaluation point has the wrong dimension",
        ));
    }
    near_singular_guard(mesh, x)?;
    let k = KernelConsts::new(m);
    let coeffs = match m {
        3 => cauchy_type_m::<3, 8>(mesh, packed, &k, p, x),
        4 => cauchy_type_m::<4, 16>(mesh, packed, &k, p, x),
        m => unreachable!("surfaces exist only for m ∈ {{3, 4}}, got {m}"),
    };
    Ok(Multivector::from_coeffs(m, &coeffs).expect("m checked"))
}

fn cauchy_type_m<const M: usize, const N: usize>(
    mesh: &SurfaceMesh,
    packed: &Packed,
    k: &KernelConsts,
    p: &LameParams,
    x: &[f64],
) -> Vec<f64> {
    let signs = GenSigns::<M, N>::new();
    let (ci, ch) = (p.c_i(), p.c_h());
    let mut sand = [0.0; N];
    for (b, s) in sand.iter_mut().enumerate() {
        *s = sandwich_factor(b, M);
    }
    let x: [f64; M] = x.try_into().expect("dimension checked");
    let nodes = mesh.nodes_flat();
    let normals = mesh.normals_flat();
    let weights = mesh.weights();
    let mut block = [0.0; N];
    let mut merged = Merged::new(N);
    for q in 0..mesh.len() {
        let y: [f64; M] = load(nodes, q);
        let n: [f64; M] = load(normals, q);
        let mut d = [0.0; M];
        for i in 0..M {
            d[i] = y[i] - x[i];
        }
        let r2: f64 = d.iter().map(|v| v * v).sum();
        let irm = k.inv_rm(r2);
        let w = weights[q];
        let e0 = -w * k.inv_sigma * irm;
        let e1 = w * k.inv_sigma * irm * r2 / (M as f64 - 2.0);
        let f0: [f64; N] = load(&packed.f0, q);
        let mt: [f64; N] = load(&packed.mt, q);
        let mbt: [f64; N] = load(&packed.mbt, q);
        // E₀ n f⁰ - (c_I/2) E₀ M̄f n d, with E₀ = -d/(σ r^m)
        let nf = signs.vl(&n, &f0);
        let mbt_n = signs.vr(&mbt, &n);
        let mbt_nd = signs.vr(&mbt_n, &d);
        let mut inner = [0.0; N];
        for b in 0..N {
            inner[b] = nf[b] - 0.5 * ci * mbt_nd[b];
        }
        let left = signs.vl(&d, &inner);
        // -c_H E₁ n M f - (c_I/2) E₁ sand(M̄f n)
        let nmt = signs.vl(&n, &mt);
        for b in 0..N {
            block[b] += e0 * left[b] + e1 * (-ch * nmt[b] - 0.5 * ci * sand[b] * mbt_n[b]);
        }
        if (q + 1) % BLOCK == 0 || q + 1 == mesh.len() {
            merged.merge(block.iter().copied());
            block = [0.0; N];
        }
    }
    merged.totals().collect()
}

/// Quadrature of `∫_Γ E₀(y - y_q) n(y) dy` with node `q` excluded.
pub fn half_value_integral(mesh: &SurfaceMesh, q: usize) -> Multivector {
    let m = mesh.dim();
    let k = KernelConsts::new(m);
    let x = mesh.node(q);
    let mut acc = CompensatedSum::new(m);
    for (i, pr) in pairs(mesh, x, &k) {
        if i == q {
            continue;
        }
        let dn = Multivector::embed_vector(&pr.d[..m])
            .expect("m checked")
            .vector_right_mul(pr.n);
        acc.add_scaled(-pr.w * k.inv_sigma * pr.irm, &dn);
    }
    acc.total()
}

/// Scalar parts of [`half_value_integral`] at every node.
pub fn half_value_scalars(mesh: &SurfaceMesh) -> Vec<f64> {
    let m = mesh.dim();
    let k = KernelConsts::new(m);
    (0..mesh.len())
        .into_par_iter()
        .map(|t| {
            let x = mesh.node(t);
            let terms = pairs(mesh, x, &k).filter(|(q, _)| *q != t).map(|(_, pr)| {
                let dn: f64 = pr.d[..m].iter().zip(pr.n).map(|(a, b)| a * b).sum();
                pr.w * k.inv_sigma * pr.irm * dn
            });
            crate::clifford::compensated_sum(terms)
        })
        .collect()
}

/// Boundary values `2 p.v.∫ E₀(y - x) n(y) g(y) dy` at every node, regularized as
/// `2 Σ_{q ≠ t} w_q E₀(y_q - x) n_q (g_q - g(x)) + g(x)`.
pub fn monogenic_singular(mesh: &SurfaceMesh, samples: &[Multivector]) -> Result<Vec<Multivector>> {
    if samples.len() != mesh.len() {
        return Err(crate::error::domain("one sample per node required"));
    }
    let m = mesh.dim();
    let k = KernelConsts::new(m);
    Ok((0..mesh.len())
        .into_par_iter()
        .map(|t| {
            let x = mesh.node(t);
            let mut acc = CompensatedSum::new(m);
            for (q, pr) in pairs(mesh, x, &k) {
                if q == t {
                    continue;
                }
                let diff = (samples[q] - samples[t])
                    .vector_left_mul(pr.n)
                    .vector_left_mul(&pr.d[..m]);
                acc.add_scaled(-2.0 * pr.w * k.inv_sigma * pr.irm, &diff);
            }
            acc.total() + samples[t]
        })
        .collect())
}

/// Per-node metadata of a singular operator application.
#[derive(Debug, Clone)]
pub struct SlDiagnostics {
    /// Scalar part of `∫ E₀(y-x) n(y) dy` at each node with the node itself excluded.
    pub half_value: Vec<f64>,
    /// Weight of each node's own cell, left out of the plain node sum.
    pub excluded_weight: Vec<f64>,
}

impl SlDiagnostics {
    /// Largest deviation of the half-value integrals from `1/2`.
    pub fn max_half_value_error(&self) -> f64 {
        self.half_value
            .iter()
            .map(|v| (v - 0.5).abs())
            .fold(0.0, f64::max)
    }
}

/// Output collection of a jet operator together with its diagnostics.
#[derive(Debug, Clone)]
pub struct JetOperatorResult {
    pub jet: LipschitzJet,
    pub diagnostics: SlDiagnostics,
}

/// Treatment of the target node's own cell in the singular quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelfCell {
    /// Drop the cell.
    Excluded,
    /// Integrate the cell on a tangent ball with a second-order local extension of the jet.
    #[default]
    Corrected,
}

/// The singular operator `S_L` on jets, with the default [`SelfCell::Corrected`] rule.
///
/// Each component integrates the remainder `R_x(y) = f⁰(y) - f⁰(x) - Σ f^j(x)(y_j - x_j)`
/// and the trace differences `M f(y) - M f(x)`, `M̄ f(y) - M̄ f(x)` against the
/// kernels.
pub fn singular_sl(jet: &LipschitzJet, p: &LameParams) -> JetOperatorResult {
    singular_sl_with(jet, p, SelfCell::default())
}

/// [`singular_sl`] with an explicit self-cell rule.
pub fn singular_sl_with(jet: &LipschitzJet, p: &LameParams, rule: SelfCell) -> JetOperatorResult {
    let mesh = jet.mesh().clone();
    let m = mesh.dim();
    let n = mesh.len();
    let packed = Packed::new(jet, p);
    let k = KernelConsts::new(m);
    let outputs: Vec<TargetOutput> = (0..n)
        .into_par_iter()
        .map(|t| sl_target(&mesh, &packed, &k, p, t, rule))
        .collect();

    let mut f0 = Vec::with_capacity(n);
    let mut grad = Vec::with_capacity(n * m);
    let mut half_value = Vec::with_capacity(n);
    for (s0, sj, hv) in outputs {
        f0.push(Multivector::from_coeffs(m, &s0).expect("m checked"));
        for g in sj {
            grad.push(Multivector::from_coeffs(m, &g).expect("m checked"));
        }
        half_value.push(hv);
    }
    let out = LipschitzJet::from_parts(mesh.clone(), f0, grad, jet.alpha());
    JetOperatorResult {
        jet: out,
        diagnostics: SlDiagnostics {
            half_value,
            excluded_weight: mesh.weights().to_vec(),
        },
    }
}

/// Signs of `e_i e_b` (left) and `e_b e_i` (right) for the generators of `R_{0,M}`.
struct GenSigns<const M: usize, const N: usize> {
    left: [[f64; N]; M],
    right: [[f64; N]; M],
}

impl<const M: usize, const N: usize> GenSigns<M, N> {
    fn new() -> Self {
        let mut left = [[0.0; N]; M];
        let mut right = [[0.0; N]; M];
        for i in 0..M {
            for b in 0..N {
                left[i][b] = sign(1 << i, b);
                right[i][b] = sign(b, 1 << i);
            }
        }
        GenSigns { left, right }
    }

    /// `v · a`
    #[inline(always)]
    fn vl(&self, v: &[f64; M], a: &[f64; N]) -> [f64; N] {
        let mut out = [0.0; N];
        for i in 0..M {
            let g = 1usize << i;
            for b in 0..N {
                out[(g ^ b) & (N - 1)] += self.left[i][b] * v[i] * a[b];
            }
        }
        out
    }

    /// `a · v`
    #[inline(always)]
    fn vr(&self, a: &[f64; N], v: &[f64; M]) -> [f64; N] {
        let mut out = [0.0; N];
        for i in 0..M {
            let g = 1usize << i;
            for b in 0..N {
                out[(g ^ b) & (N - 1)] += self.right[i][b] * a[b] * v[i];
            }
        }
        out
    }
}

/// Nodes summed plainly before each compensated merge.
const BLOCK: usize = 64;

/// Running sums of one target's quadrature: `S⁰`, the three `e_j`-free
/// gradient sums, the per-axis gradient sums and the half-value scalar.
struct Sums<const M: usize, const N: usize> {
    s0: [f64; N],
    u1: [f64; N],
    u2: [f64; N],
    u3: [f64; N],
    v: [[f64; N]; M],
    half: f64,
}

impl<const M: usize, const N: usize> Sums<M, N> {
    fn zero() -> Self {
        Sums {
            s0: [0.0; N],
            u1: [0.0; N],
            u2: [0.0; N],
            u3: [0.0; N],
            v: [[0.0; N]; M],
            half: 0.0,
        }
    }

    fn slots(&self) -> impl Iterator<Item = f64> + '_ {
        self.s0
            .iter()
            .chain(&self.u1)
            .chain(&self.u2)
            .chain(&self.u3)
            .chain(self.v.iter().flatten())
            .chain(std::iter::once(&self.half))
            .copied()
    }

    fn set_slots(&mut self, mut values: impl Iterator<Item = f64>) {
        let fields = [&mut self.s0, &mut self.u1, &mut self.u2, &mut self.u3];
        for field in fields {
            for x in field.iter_mut() {
                *x = values.next().unwrap_or(0.0);
            }
        }
        for x in self.v.iter_mut().flatten() {
            *x = values.next().unwrap_or(0.0);
        }
        self.half = values.next().unwrap_or(0.0);
    }
}

/// Neumaier merge of block partial sums.
struct Merged {
    sum: Vec<f64>,
    comp: Vec<f64>,
}

impl Merged {
    fn new(len: usize) -> Self {
        Merged {
            sum: vec![0.0; len],
            comp: vec![0.0; len],
        }
    }

    fn merge(&mut self, values: impl Iterator<Item = f64>) {
        for ((s, c), x) in self.sum.iter_mut().zip(self.comp.iter_mut()).zip(values) {
            let t = *s + x;
            if s.abs() >= x.abs() {
                *c += (*s - t) + x;
            } else {
                *c += (x - t) + *s;
            }
            *s = t;
        }
    }

    fn totals(&self) -> impl Iterator<Item = f64> + '_ {
        self.sum.iter().zip(&self.comp).map(|(s, c)| s + c)
    }
}

type TargetOutput = (Vec<f64>, Vec<Vec<f64>>, f64);

fn sl_target(
    mesh: &SurfaceMesh,
    packed: &Packed,
    k: &KernelConsts,
    p: &LameParams,
    t: usize,
    rule: SelfCell,
) -> TargetOutput {
    match mesh.dim() {
        3 => sl_target_m::<3, 8>(mesh, packed, k, p, t, rule),
        4 => sl_target_m::<4, 16>(mesh, packed, k, p, t, rule),
        m => unreachable!("surfaces exist only for m ∈ {{3, 4}}, got {m}"),
    }
}

#[inline(always)]
fn load<const L: usize>(v: &[f64], q: usize) -> [f64; L] {
    v[q * L..(q + 1) * L].try_into().expect("stride matches")
}

/// Per-target constants of the `S_L` integrand.
struct Target<const M: usize, const N: usize> {
    signs: GenSigns<M, N>,
    mf: f64,
    ci: f64,
    ch: f64,
    is: f64,
    x: [f64; M],
    fx: [f64; N],
    gx: [[f64; N]; M],
    mtx: [f64; N],
    mbtx: [f64; N],
    sand: [f64; N],
}

impl<const M: usize, const N: usize> Target<M, N> {
    /// Adds the contribution of one quadrature point `y = x + d` with normal
    /// `nq`, weight `w` and density data `fq`, `mtq`, `mbtq`.
    #[allow(clippy::too_many_arguments)]
    #[inline(always)]
    fn accumulate(
        &self,
        sums: &mut Sums<M, N>,
        k: &KernelConsts,
        d: &[f64; M],
        nq: &[f64; M],
        w: f64,
        fq: &[f64; N],
        mtq: &[f64; N],
        mbtq: &[f64; N],
    ) {
        let signs = &self.signs;
        let (mf, ci, ch, is) = (self.mf, self.ci, self.ch, self.is);
        let r2: f64 = d.iter().map(|v| v * v).sum();
        let irm = k.inv_rm(r2);
        let ir2 = 1.0 / r2;
        let e1 = is * irm * r2 / (mf - 2.0);

        let mut rem = [0.0; N];
        let mut mr = [0.0; N];
        let mut mbr = [0.0; N];
        for b in 0..N {
            let mut r = fq[b] - self.fx[b];
            for j in 0..M {
                r -= self.gx[j][b] * d[j];
            }
            rem[b] = r;
            mr[b] = mtq[b] - self.mtx[b];
            mbr[b] = mbtq[b] - self.mbtx[b];
        }
        let n_r = signs.vl(nq, &rem);
        let n_mr = signs.vl(nq, &mr);
        let mbr_n = signs.vr(&mbr, nq);
        let p1 = signs.vr(&mbr_n, d);
        let qd = signs.vl(d, &mbr_n);
        let p2 = signs.vl(d, &p1);
        let dn_r = signs.vl(d, &n_r);

        // value: 2E₀nR - 2c_H E₁ n MR - c_I (E₀ M̄R n d + sand(E₁ M̄R n))
        let c0 = w * is * irm;
        let wi = w * irm;
        let cb = is * irm;
        let mut b_term = [0.0; N];
        for b in 0..N {
            let s_mbr_n = self.sand[b] * mbr_n[b];
            let core = -2.0 * dn_r[b] + ci * p2[b];
            sums.s0[b] += c0 * core - w * e1 * (2.0 * ch * n_mr[b] + ci * s_mbr_n);
            // gradient sums split into e_j-independent parts
            sums.u1[b] += wi * n_r[b];
            sums.u2[b] += wi * p1[b];
            sums.u3[b] += wi * qd[b];
            b_term[b] = cb * (mf * ir2 * core - 2.0 * ch * n_mr[b] - ci * s_mbr_n);
        }
        for j in 0..M {
            let s = w * d[j];
            for b in 0..N {
                sums.v[j][b] += s * b_term[b];
            }
        }
    }
}

/// Nearest-node count for the local gradient fit of the self-cell correction.
const SELF_CELL_NEIGHBOURS: usize = 8;
/// Radial Gauss points of the self-cell rule.
const SELF_CELL_RADIAL: usize = 4;
/// Angular points per circle of the self-cell rule.
const SELF_CELL_ANGULAR: usize = 8;

/// Polar rule on the tangent ball of `m - 1` dimensions with unit radius:
/// offsets and weights summing to one.
fn tangent_ball_rule(km: usize) -> Vec<(Vec<f64>, f64)> {
    let (rx, rw) = crate::geometry::gauss_legendre(SELF_CELL_RADIAL);
    let radial: Vec<(f64, f64)> = rx
        .iter()
        .zip(&rw)
        .map(|(x, w)| {
            let r = 0.5 * (x + 1.0);
            (r, 0.5 * w * r.powi(km as i32 - 1))
        })
        .collect();
    let directions: Vec<(Vec<f64>, f64)> = match km {
        2 => (0..SELF_CELL_ANGULAR)
            .map(|a| {
                let th = 2.0 * std::f64::consts::PI * (a as f64 + 0.5) / SELF_CELL_ANGULAR as f64;
                (vec![th.cos(), th.sin()], 1.0)
            })
            .collect(),
        _ => {
            let (cx, cw) = crate::geometry::gauss_legendre(SELF_CELL_RADIAL);
            let mut out = Vec::new();
            for (c, wc) in cx.iter().zip(&cw) {
                let s = (1.0 - c * c).sqrt();
                for a in 0..SELF_CELL_ANGULAR {
                    let th =
                        2.0 * std::f64::consts::PI * (a as f64 + 0.5) / SELF_CELL_ANGULAR as f64;
                    out.push((vec![s * th.cos(), s * th.sin(), *c], *wc));
                }
            }
            out
        }
    };
    let mut rule = Vec::with_capacity(radial.len() * directions.len());
    for (r, wr) in &radial {
        for (dir, wd) in &directions {
            rule.push((dir.iter().map(|v| v * r).collect(), wr * wd));
        }
    }
    let total: f64 = rule.iter().map(|(_, w)| w).sum();
    rule.into_iter().map(|(u, w)| (u, w / total)).collect()
}

/// Contribution of the target's own cell, integrated on a tangent ball of
/// equal measure with the jet extended to second order. The tangential
/// derivatives of the gradient come from a weighted least-squares fit over
/// the nearest nodes.
fn self_cell<const M: usize, const N: usize>(
    mesh: &SurfaceMesh,
    packed: &Packed,
    k: &KernelConsts,
    p: &LameParams,
    tg: &Target<M, N>,
    t: usize,
    near: &[(f64, usize)],
) -> Sums<M, N> {
    let km = M - 1;
    let frame = mesh.frame_flat(t);
    let mut normal = DMatrix::<f64>::zeros(km, km);
    let mut rhs = DMatrix::<f64>::zeros(km, M * N);
    for &(_, q) in near {
        let y: [f64; M] = load(mesh.nodes_flat(), q);
        let tau: Vec<f64> = (0..km)
            .map(|a| (0..M).map(|i| frame[a * M + i] * (y[i] - tg.x[i])).sum())
            .collect();
        let omega = 1.0 / tau.iter().map(|v| v * v).sum::<f64>();
        for a in 0..km {
            for c in 0..km {
                normal[(a, c)] += omega * tau[a] * tau[c];
            }
            for j in 0..M {
                let g: [f64; N] = load(&packed.grad, q * M + j);
                for b in 0..N {
                    rhs[(a, j * N + b)] += omega * tau[a] * (g[b] - tg.gx[j][b]);
                }
            }
        }
    }
    let mut sums = Sums::<M, N>::zero();
    let Some(dg) = normal.lu().solve(&rhs) else {
        return sums;
    };
    let w_t = mesh.weight(t);
    let ball = crate::kernels::volume_unit_ball(km);
    let rho = (w_t / ball).powf(1.0 / km as f64);
    let shape = mesh.descriptor();
    let (a, bq) = (p.a(), p.b());
    for (u, wu) in tangent_ball_rule(km) {
        let mut y = tg.x;
        for c in 0..km {
            for i in 0..M {
                y[i] += rho * u[c] * frame[c * M + i];
            }
        }
        let scale = shape.level_set(&y).sqrt();
        let mut nq = [0.0; M];
        let mut d = [0.0; M];
        for i in 0..M {
            y[i] = shape.center[i] + (y[i] - shape.center[i]) / scale;
            d[i] = y[i] - tg.x[i];
            nq[i] = (y[i] - shape.center[i]) / (shape.radii[i] * shape.radii[i]);
        }
        let nn = nq.iter().map(|v| v * v).sum::<f64>().sqrt();
        nq.iter_mut().for_each(|v| *v /= nn);
        let tau: Vec<f64> = (0..km)
            .map(|c| (0..M).map(|i| frame[c * M + i] * d[i]).sum())
            .collect();
        let mut g = tg.gx;
        for (j, gj) in g.iter_mut().enumerate() {
            for b in 0..N {
                gj[b] += (0..km).map(|c| dg[(c, j * N + b)] * tau[c]).sum::<f64>();
            }
        }
        let mut fq = tg.fx;
        for b in 0..N {
            for j in 0..M {
                fq[b] += 0.5 * (tg.gx[j][b] + g[j][b]) * d[j];
            }
        }
        let mut fe = [0.0; N];
        let mut ef = [0.0; N];
        for (j, gj) in g.iter().enumerate() {
            let right = tg.signs.vr(gj, &unit::<M>(j));
            let left = tg.signs.vl(&unit::<M>(j), gj);
            for b in 0..N {
                fe[b] += right[b];
                ef[b] += left[b];
            }
        }
        let mut mtq = [0.0; N];
        let mut mbtq = [0.0; N];
        for b in 0..N {
            mtq[b] = a * fe[b] + bq * ef[b];
            mbtq[b] = bq * fe[b] + a * ef[b];
        }
        tg.accumulate(&mut sums, k, &d, &nq, w_t * wu, &fq, &mtq, &mbtq);
    }
    sums
}

fn sl_target_m<const M: usize, const N: usize>(
    mesh: &SurfaceMesh,
    packed: &Packed,
    k: &KernelConsts,
    p: &LameParams,
    t: usize,
    rule: SelfCell,
) -> TargetOutput {
    let mut gx = [[0.0; N]; M];
    for (j, g) in gx.iter_mut().enumerate() {
        *g = load(&packed.grad, t * M + j);
    }
    let mut sand = [0.0; N];
    for (b, s) in sand.iter_mut().enumerate() {
        *s = sandwich_factor(b, M);
    }
    let tg = Target::<M, N> {
        signs: GenSigns::new(),
        mf: M as f64,
        ci: p.c_i(),
        ch: p.c_h(),
        is: k.inv_sigma,
        x: load(mesh.nodes_flat(), t),
        fx: load(&packed.f0, t),
        gx,
        mtx: load(&packed.mt, t),
        mbtx: load(&packed.mbt, t),
        sand,
    };
    let (ci, is) = (tg.ci, tg.is);
    let x = tg.x;

    let mut block = Sums::<M, N>::zero();
    let mut merged = Merged::new(N * (4 + M) + 1);
    let mut near = [(f64::INFINITY, usize::MAX); SELF_CELL_NEIGHBOURS];
    let nodes = mesh.nodes_flat();
    let normals = mesh.normals_flat();
    let weights = mesh.weights();
    for q in 0..mesh.len() {
        if q != t {
            let y: [f64; M] = load(nodes, q);
            let nq: [f64; M] = load(normals, q);
            let w = weights[q];
            let mut d = [0.0; M];
            for i in 0..M {
                d[i] = y[i] - x[i];
            }
            let r2: f64 = d.iter().map(|v| v * v).sum();
            if r2 < near[SELF_CELL_NEIGHBOURS - 1].0 {
                let mut i = SELF_CELL_NEIGHBOURS - 1;
                while i > 0 && near[i - 1].0 > r2 {
                    near[i] = near[i - 1];
                    i -= 1;
                }
                near[i] = (r2, q);
            }
            let fq: [f64; N] = load(&packed.f0, q);
            let mtq: [f64; N] = load(&packed.mt, q);
            let mbtq: [f64; N] = load(&packed.mbt, q);
            tg.accumulate(&mut block, k, &d, &nq, w, &fq, &mtq, &mbtq);
            // scalar part of E₀ n: (d·n) / (σ r^m)
            let dn: f64 = d.iter().zip(&nq).map(|(a, b)| a * b).sum();
            block.half += w * is * k.inv_rm(r2) * dn;
        }
        if (q + 1) % BLOCK == 0 || q + 1 == mesh.len() {
            merged.merge(block.slots());
            block = Sums::zero();
        }
    }
    let near: Vec<(f64, usize)> = near.into_iter().filter(|(_, q)| *q != usize::MAX).collect();
    if rule == SelfCell::Corrected {
        merged.merge(self_cell(mesh, packed, k, p, &tg, t, &near).slots());
    }
    let mut total = Sums::<M, N>::zero();
    total.set_slots(merged.totals());

    let mut value = total.s0.to_vec();
    for b in 0..N {
        value[b] += tg.fx[b];
    }
    let mut tmp = [0.0; N];
    for b in 0..N {
        tmp[b] = 2.0 * total.u1[b] - ci * total.u2[b];
    }
    let mut grads = Vec::with_capacity(M);
    for j in 0..M {
        let mut g = total.v[j];
        for b in 0..N {
            g[b] += tg.gx[j][b];
        }
        // (2/σ) e_j U1 - (c_I/σ) e_j U2 - (c_I/σ) U3 e_j
        let e_left = tg.signs.vl(&unit::<M>(j), &tmp);
        let e_right = tg.signs.vr(&total.u3, &unit::<M>(j));
        for b in 0..N {
            g[b] += is * e_left[b] - is * ci * e_right[b];
        }
        grads.push(g.to_vec());
    }
    (value, grads, total.half)
}

fn unit<const M: usize>(j: usize) -> [f64; M] {
    let mut e = [0.0; M];
    e[j] = 1.0;
    e
}

/// `P± = ½(I ± S_L)`.
pub fn hardy_projections(jet: &LipschitzJet, p: &LameParams) -> (LipschitzJet, LipschitzJet) {
    let s = singular_sl(jet, p).jet;
    projections_from(jet, &s)
}

/// Projections from a precomputed `S_L f`.
pub fn projections_from(jet: &LipschitzJet, s: &LipschitzJet) -> (LipschitzJet, LipschitzJet) {
    let plus = jet.combine(0.5, s, 0.5).expect("same mesh");
    let minus = jet.combine(0.5, s, -0.5).expect("same mesh");
    (plus, minus)
}

/// Neighbours used for the tangential derivative fit.
pub const RECOVERY_NEIGHBOURS: usize = 6;
/// Pivot ratio below which a local system counts as singular.
pub const CONDITIONING_LIMIT: f64 = 1e-10;

/// Rebuilds `f¹ … f^m` from `f⁰` and the trace `c1 Σ f^j e_j + c2 Σ e_j f^j`.
///
/// At each node the `m - 1` tangential derivatives of `f⁰` come from a
/// weighted least-squares fit over the nearest nodes; together with the trace
/// equation they form a square real system of size `m 2^m`.
pub fn recover_jet(
    f0: &[Multivector],
    m_trace: &[Multivector],
    c1: f64,
    c2: f64,
    mesh: &Arc<SurfaceMesh>,
) -> Result<Vec<Vec<Multivector>>> {
    let scale = c1.abs().max(c2.abs());
    if scale == 0.0 || (c1 - c2).abs() <= 1e-12 * scale || (c1 + c2).abs() <= 1e-12 * scale {
        return Err(Error::Degenerate { c1, c2 });
    }
    let n = mesh.len();
    if f0.len() != n || m_trace.len() != n {
        return Err(crate::error::domain(
            "trace data must have one value per node",
        ));
    }
    (0..n)
        .into_par_iter()
        .map(|q| recover_node(f0, m_trace, c1, c2, mesh, q))
        .collect()
}

/// The `count` nearest other nodes of `q`, closest first, ties by index.
pub fn nearest_nodes(mesh: &SurfaceMesh, q: usize, count: usize) -> Vec<usize> {
    let y = mesh.node(q);
    let mut cand: Vec<(f64, usize)> = (0..mesh.len())
        .filter(|&i| i != q)
        .map(|i| (dist2(y, mesh.node(i)), i))
        .collect();
    let count = count.min(cand.len());
    cand.select_nth_unstable_by(count.saturating_sub(1), |a, b| {
        a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
    });
    cand.truncate(count);
    cand.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    cand.into_iter().map(|(_, i)| i).collect()
}

/// Weighted least-squares tangential derivatives of `f⁰` at node `q`.
pub fn tangential_derivatives(
    mesh: &SurfaceMesh,
    f0: &[Multivector],
    q: usize,
) -> Result<Vec<Multivector>> {
    let m = mesh.dim();
    let nb = 1 << m;
    let frame = mesh.frame_flat(q);
    let y = mesh.node(q);
    let nbrs = nearest_nodes(mesh, q, RECOVERY_NEIGHBOURS);
    let km = m - 1;
    let mut normal = DMatrix::<f64>::zeros(km, km);
    let mut rhs = DMatrix::<f64>::zeros(km, nb);
    for &i in &nbrs {
        let diff: Vec<f64> = mesh.node(i).iter().zip(y).map(|(a, b)| a - b).collect();
        let t: Vec<f64> = (0..km)
            .map(|k| {
                frame[k * m..(k + 1) * m]
                    .iter()
                    .zip(&diff)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect();
        let weight = 1.0 / t.iter().map(|v| v * v).sum::<f64>();
        let df = f0[i] - f0[q];
        for a in 0..km {
            for b in 0..km {
                normal[(a, b)] += weight * t[a] * t[b];
            }
            for c in 0..nb {
                rhs[(a, c)] += weight * t[a] * df.coeffs()[c];
            }
        }
    }
    let eig = normal.clone().symmetric_eigenvalues();
    let (lo, hi) = eig.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| {
        (lo.min(v.abs()), hi.max(v.abs()))
    });
    let ratio = if hi > 0.0 { lo / hi } else { 0.0 };
    if ratio < CONDITIONING_LIMIT {
        return Err(Error::Conditioning { node: q, ratio });
    }
    let sol = normal.lu().solve(&rhs).ok_or(Error::Conditioning {
        node: q,
        ratio: 0.0,
    })?;
    Ok((0..km)
        .map(|k| {
            let row: Vec<f64> = (0..nb).map(|c| sol[(k, c)]).collect();
            Multivector::from_coeffs(m, &row).expect("m checked")
        })
        .collect())
}

fn recover_node(
    f0: &[Multivector],
    m_trace: &[Multivector],
    c1: f64,
    c2: f64,
    mesh: &SurfaceMesh,
    q: usize,
) -> Result<Vec<Multivector>> {
    let m = mesh.dim();
    let nb = 1 << m;
    let size = m * nb;
    let tangential = tangential_derivatives(mesh, f0, q)?;
    let frame = mesh.frame_flat(q);
    let mut a = DMatrix::<f64>::zeros(size, size);
    let mut rhs = DVector::<f64>::zeros(size);
    // Σ_j v_{k,j} f^j = ∂_{v_k} f⁰
    for k in 0..m - 1 {
        for b in 0..nb {
            let row = k * nb + b;
            for j in 0..m {
                a[(row, j * nb + b)] = frame[k * m + j];
            }
            rhs[row] = tangential[k].coeffs()[b];
        }
    }
    // c1 Σ f^j e_j + c2 Σ e_j f^j = trace
    let base = (m - 1) * nb;
    for j in 0..m {
        let g = 1usize << j;
        for b in 0..nb {
            a[(base + (b ^ g), j * nb + b)] += c1 * sign(b, g) + c2 * sign(g, b);
        }
    }
    for b in 0..nb {
        rhs[base + b] = m_trace[q].coeffs()[b];
    }
    let lu = a.lu();
    let u = lu.u();
    let diag: Vec<f64> = (0..size).map(|i| u[(i, i)].abs()).collect();
    let hi = diag.iter().cloned().fold(0.0, f64::max);
    let lo = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    let ratio = if hi > 0.0 { lo / hi } else { 0.0 };
    if ratio < CONDITIONING_LIMIT {
        return Err(Error::Conditioning { node: q, ratio });
    }
    let sol = lu
        .solve(&rhs)
        .ok_or(Error::Conditioning { node: q, ratio })?;
    Ok((0..m)
        .map(|j| {
            let c: Vec<f64> = (0..nb).map(|b| sol[j * nb + b]).collect();
            Multivector::from_coeffs(m, &c).expect("m checked")
        })
        .collect())
}
