//! The checks behind each suite.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    first_order_tolerance, relative, timed, CheckRecord, ConvergenceRow, FittedExponent, RunConfig,
    Suite, SuiteReport,
};
use crate::boundary::{
    cauchy_harmonic, cauchy_infra, cauchy_lame, cauchy_monogenic, half_value_scalars,
    lame_cauchy_integral_many, monogenic_singular, projections_from, recover_jet, singular_sl,
    singular_sl_with, SelfCell, Side,
};
use crate::clifford::{blade_product, BladeMask, Multivector};
use crate::error::{Error, Result};
use crate::geometry::{build_ball_volume, build_polar_volume, SurfaceMesh, MAX_RESOLUTION};
use crate::harness::fit_exponent;
use crate::jet::LipschitzJet;
use crate::kernels::{eval_e0, eval_e0_grad, eval_e1, eval_e1_grad};
use crate::params::LameParams;
use crate::poly::{
    apply_operator, classical_lame_residual, make_test_solution, Operator, PolyField, SolutionKind,
};
use crate::volume::{
    borel_pompeiu_residual, exterior_representation_residual, teodorescu, ExteriorSolution,
    Teodorescu, VolumeSampleField,
};

/// Interior Lamé solutions of the catalogue.
pub(crate) const INTERIOR_KINDS: [SolutionKind; 4] = [
    SolutionKind::Constant,
    SolutionKind::Coordinate,
    SolutionKind::MonogenicLinear,
    SolutionKind::UniversalQuadratic,
];

/// Seeded smooth jets per suite.
const SMOOTH_JETS: u64 = 5;
const SMOOTH_DEGREE: u32 = 3;

fn random_multivector(rng: &mut ChaCha8Rng, m: usize) -> Multivector {
    let coeffs: Vec<f64> = (0..1usize << m)
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    Multivector::from_coeffs(m, &coeffs).expect("valid dimension")
}

fn random_point(rng: &mut ChaCha8Rng, m: usize, r_min: f64, r_max: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-3 && n <= 1.0 {
            let r = rng.random_range(r_min..=r_max);
            return v.iter().map(|x| x * r / n).collect();
        }
    }
}

/// Sign of `e_A e_B` by writing out the generator word and bubble sorting it.
fn word_oracle(a: usize, b: usize, m: usize) -> (i8, usize) {
    let mut word: Vec<usize> = (0..m).filter(|i| a >> i & 1 == 1).collect();
    word.extend((0..m).filter(|i| b >> i & 1 == 1));
    let mut sign = 1i8;
    for i in 0..word.len() {
        for j in 0..word.len() - 1 - i {
            if word[j] > word[j + 1] {
                word.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    let mut mask = 0usize;
    let mut k = 0;
    while k < word.len() {
        if k + 1 < word.len() && word[k] == word[k + 1] {
            sign = -sign;
            k += 2;
        } else {
            mask |= 1 << word[k];
            k += 1;
        }
    }
    (sign, mask)
}

pub(crate) fn algebra(config: &RunConfig, report: &mut SuiteReport) -> Result<()> {
    let m = config.m;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let checks = timed(config, || {
        let n = 1usize << m;
        let mut mismatches = 0usize;
        for a in 0..n {
            for b in 0..n {
                let (s, mask) = blade_product(BladeMask(a as u8), BladeMask(b as u8), m)?;
                if (s, mask.index()) != word_oracle(a, b, m) {
                    mismatches += 1;
                }
            }
        }
        let mut relations: f64 = 0.0;
        for i in 1..=m {
            for j in 1..=m {
                let (ei, ej) = (Multivector::generator(m, i), Multivector::generator(m, j));
                let anti =
                    ei * ej + ej * ei + Multivector::scalar(m, if i == j { 2.0 } else { 0.0 });
                relations = relations.max(anti.max_abs());
            }
        }
        Ok(vec![
            CheckRecord::at_most("blade_product_oracle_mismatches", mismatches as f64, 0.0),
            CheckRecord::at_most("generator_relations", relations, 0.0),
        ])
    })?;
    checks.into_iter().for_each(|c| report.push(c));

    let checks = timed(config, || {
        let (mut assoc, mut conj, mut norm, mut inverse): (f64, f64, f64, f64) =
            (0.0, 0.0, 0.0, 0.0);
        for _ in 0..200 {
            let (a, b, c) = (
                random_multivector(&mut rng, m),
                random_multivector(&mut rng, m),
                random_multivector(&mut rng, m),
            );
            let scale = a.clifford_norm() * b.clifford_norm() * c.clifford_norm();
            assoc = assoc.max(((a * b) * c - a * (b * c)).clifford_norm() / scale);
            let ab = a * b;
            let anti = ab.conjugate() - b.conjugate() * a.conjugate();
            conj = conj.max(anti.clifford_norm() / (a.clifford_norm() * b.clifford_norm()));
            conj = conj.max((a.conjugate().conjugate() - a).max_abs());
            let euclid: f64 = a.coeffs().iter().map(|x| x * x).sum();
            let product = (a * a.conjugate()).scalar_part();
            norm = norm.max((product - euclid).abs() / euclid);
            let v: Vec<f64> = (0..m).map(|_| rng.random_range(-2.0..2.0)).collect();
            let u = Multivector::embed_vector(&v)?;
            let ui = u.invert_vector()?;
            let one = Multivector::scalar(m, 1.0);
            inverse = inverse
                .max((u * ui - one).max_abs())
                .max((ui * u - one).max_abs());
        }
        let bound = 2f64.powf(m as f64 / 2.0);
        let mut worst: f64 = 0.0;
        for _ in 0..10_000 {
            let (a, b) = (
                random_multivector(&mut rng, m),
                random_multivector(&mut rng, m),
            );
            worst = worst
                .max((a * b).clifford_norm() / (bound * a.clifford_norm() * b.clifford_norm()));
        }
        Ok(vec![
            CheckRecord::at_most("associativity", assoc, 1e-12),
            CheckRecord::at_most("conjugation_anti_automorphism", conj, 1e-12),
            CheckRecord::at_most("norm_is_euclidean", norm, 1e-12),
            CheckRecord::at_most("vector_inverse", inverse, 1e-12),
            CheckRecord::at_most("norm_bound_ratio", worst, 1.0),
        ])
    })?;
    checks.into_iter().for_each(|c| report.push(c));

    let checks = timed(config, || {
        let count = if m <= 4 { 50 } else { 10 };
        let p = &config.params;
        let (mut factor, mut classical) = (0usize, 0usize);
        for i in 0..count {
            let f = PolyField::random(m, SMOOTH_DEGREE, config.seed.wrapping_add(i))?;
            let l = apply_operator(&f, Operator::L, p);
            let via_m = apply_operator(&f, Operator::M, p).dirac_left();
            let via_mbar = apply_operator(&f, Operator::Mbar, p).dirac_right();
            if !via_m.sub(&l)?.is_zero() || !via_mbar.sub(&l)?.is_zero() {
                factor += 1;
            }
            let u = PolyField::random_vector(m, SMOOTH_DEGREE, config.seed.wrapping_add(1000 + i))?;
            if !classical_lame_residual(&u, p)?.is_zero() {
                classical += 1;
            }
        }
        Ok(vec![
            CheckRecord::at_most("lame_factorization_nonzero_residuals", factor as f64, 0.0),
            CheckRecord::at_most(
                "classical_clifford_equivalence_nonzero_residuals",
                classical as f64,
                0.0,
            ),
        ])
    })?;
    checks.into_iter().for_each(|c| report.push(c));
    Ok(())
}

fn shifted(x: &[f64], j: usize, h: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[j] += h;
    y
}

pub(crate) fn kernels(config: &RunConfig, report: &mut SuiteReport) -> Result<()> {
    let m = config.m;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let checks = timed(config, || {
        let (mut dirac, mut fd0, mut fd1, mut odd): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
        for _ in 0..100 {
            let x = random_point(&mut rng, m, 0.5, 2.0);
            let e0 = eval_e0(&x)?;
            let mut sum = Multivector::zero(m);
            for j in 1..=m {
                // ∂_{x_j} E₁ = -E₁^j
                sum -= Multivector::generator(m, j) * eval_e1_grad(&x, j)?;
            }
            dirac = dirac.max((sum - e0).clifford_norm() / e0.clifford_norm());
            let neg: Vec<f64> = x.iter().map(|v| -v).collect();
            for j in 1..=m {
                odd = odd.max((eval_e1_grad(&x, j)? + eval_e1_grad(&neg, j)?).abs());
            }
        }
        for _ in 0..100 {
            let x = random_point(&mut rng, m, 0.95, 1.05);
            let step = 1e-5;
            for j in 1..=m {
                let g0 = eval_e0_grad(&x, j)?;
                let fd = (eval_e0(&shifted(&x, j - 1, step))?
                    - eval_e0(&shifted(&x, j - 1, -step))?)
                    * (-0.5 / step);
                fd0 = fd0.max((fd - g0).clifford_norm() / g0.clifford_norm());
                let g1 = eval_e1_grad(&x, j)?;
                let fd = -(eval_e1(&shifted(&x, j - 1, step))?
                    - eval_e1(&shifted(&x, j - 1, -step))?)
                    / (2.0 * step);
                fd1 = fd1.max((fd - g1).abs() / g1.abs().max(1e-3 * eval_e1(&x)?));
            }
        }
        Ok(vec![
            CheckRecord::at_most("dirac_of_e1_is_e0", dirac, 1e-10),
            CheckRecord::at_most("e0_gradient_vs_finite_difference", fd0, 1e-6),
            CheckRecord::at_most("e1_gradient_vs_finite_difference", fd1, 1e-6),
            CheckRecord::at_most("e1_gradient_odd", odd, 0.0),
        ])
    })?;
    checks.into_iter().for_each(|c| report.push(c));

    let checks = timed(config, || {
        let (mut left, mut right, mut lap): (f64, f64, f64) = (0.0, 0.0, 0.0);
        for _ in 0..20 {
            let x = random_point(&mut rng, m, 1.0, 1.0);
            let h = 1e-4;
            let mut dl = Multivector::zero(m);
            let mut dr = Multivector::zero(m);
            let mut l = 0.0;
            for j in 0..m {
                let diff =
                    (eval_e0(&shifted(&x, j, h))? - eval_e0(&shifted(&x, j, -h))?) * (0.5 / h);
                dl += Multivector::generator(m, j + 1) * diff;
                dr += diff * Multivector::generator(m, j + 1);
                l += (eval_e1(&shifted(&x, j, h))? - 2.0 * eval_e1(&x)?
                    + eval_e1(&shifted(&x, j, -h))?)
                    / (h * h);
            }
            left = left.max(dl.clifford_norm());
            right = right.max(dr.clifford_norm());
            lap = lap.max(l.abs());
        }
        Ok(vec![
            CheckRecord::at_most("e0_left_monogenic", left, 1e-5),
            CheckRecord::at_most("e0_right_monogenic", right, 1e-5),
            CheckRecord::at_most("e1_harmonic", lap, 1e-4),
        ])
    })?;
    checks.into_iter().for_each(|c| report.push(c));
    Ok(())
}

fn solution_jet(kind: &SolutionKind, mesh: &Arc<SurfaceMesh>, alpha: f64) -> Result<LipschitzJet> {
    let sol = make_test_solution(kind, mesh.dim())?;
    LipschitzJet::from_solution(mesh.clone(), &sol, alpha)
}

fn sup_norm(values: &[Multivector]) -> f64 {
    values
        .iter()
        .map(Multivector::clifford_norm)
        .fold(0.0, f64::max)
}

fn points(rng: &mut ChaCha8Rng, m: usize, count: usize, r_min: f64, r_max: f64) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| random_point(rng, m, r_min, r_max))
        .collect()
}

/// Relative RMS mismatch of the probe-pair jump `C(y - δn) - C(y + δn)` against `f⁰`.
pub(crate) fn jump_residual(
    jet: &LipschitzJet,
    p: &LameParams,
    delta: f64,
    stride: usize,
) -> Result<f64> {
    let mesh = jet.mesh();
    let nodes: Vec<usize> = (0..mesh.len()).step_by(stride.max(1)).collect();
    let mut probes = Vec::with_capacity(2 * nodes.len());
    for &q in &nodes {
        let (inside, outside) = mesh.probe_pair(q, delta)?;
        probes.push(inside);
        probes.push(outside);
    }
    let values = lame_cauchy_integral_many(jet, p, &probes)?;
    let (mut num, mut den) = (0.0, 0.0);
    for (i, &q) in nodes.iter().enumerate() {
        let jump = values[2 * i] - values[2 * i + 1];
        num += mesh.weight(q) * (jump - *jet.f0(q)).norm_squared();
        den += mesh.weight(q) * jet.f0(q).norm_squared();
    }
    Ok(relative(num.sqrt(), den.sqrt()))
}

/// Same as [`jump_residual`] after first-order extrapolation `2 D(δ/2) - D(δ)`.
fn jump_extrapolated(jet: &LipschitzJet, p: &LameParams, delta: f64, stride: usize) -> Result<f64> {
    let mesh = jet.mesh();
    let nodes: Vec<usize> = (0..mesh.len()).step_by(stride.max(1)).collect();
    let mut probes = Vec::with_capacity(4 * nodes.len());
    for &q in &nodes {
        for d in [delta, 0.5 * delta] {
            let (inside, outside) = mesh.probe_pair(q, d)?;
            probes.push(inside);
            probes.push(outside);
        }
    }
    let v = lame_cauchy_integral_many(jet, p, &probes)?;
    let (mut num, mut den) = (0.0, 0.0);
    for (i, &q) in nodes.iter().enumerate() {
        let coarse = v[4 * i] - v[4 * i + 1];
        let fine = v[4 * i + 2] - v[4 * i + 3];
        let jump = fine * 2.0 - coarse;
        num += mesh.weight(q) * (jump - *jet.f0(q)).norm_squared();
        den += mesh.weight(q) * jet.f0(q).norm_squared();
    }
    Ok(relative(num.sqrt(), den.sqrt()))
}

/// Probe every `stride`-th node so that about 256 nodes are used.
pub(crate) fn probe_stride(mesh: &SurfaceMesh) -> usize {
    (mesh.len() / 256).max(1)
}

pub(crate) fn half_value_error(mesh: &SurfaceMesh) -> f64 {
    half_value_scalars(mesh)
        .iter()
        .map(|v| (v - 0.5).abs())
        .fold(0.0, f64::max)
}

pub(crate) fn cauchy(config: &RunConfig, report: &mut SuiteReport) -> Result<()> {
    let mesh = config.mesh(config.level)?;
    let m = config.m;
    let p = &config.params;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let inside = points(&mut rng, m, 8, 0.0, 0.7);
    let outside = points(&mut rng, m, 8, 1.5, 3.0);

    let checks = timed(config, || {
        let mut out = Vec::new();
        for kind in &INTERIOR_KINDS {
            let jet = solution_jet(kind, &mesh, config.alpha)?;
            let sol = make_test_solution(kind, m)?;
            let f = sol.as_poly().expect("interior kinds are polynomial");
            let scale = sup_norm(jet.values());
            let got = lame_cauchy_integral_many(&jet, p, &inside)?;
            let err = inside
                .iter()
                .zip(&got)
                .map(|(x, v)| (*v - f.evaluate_f64(x)).clifford_norm())
                .fold(0.0, f64::max);
            out.push(CheckRecord::at_most(
                format!("reproduction_interior_{kind}"),
                err / scale,
                1e-2,
            ));
            let got = lame_cauchy_integral_many(&jet, p, &outside)?;
            out.push(CheckRecord::at_most(
                format!("vanishing_exterior_{kind}"),
                sup_norm(&got) / scale,
                1e-2,
            ));
        }
        Ok(out)
    })?;
    checks.into_iter().for_each(|c| report.push(c));

    let checks = timed(config, || {
        Ok(vec![CheckRecord::at_most(
            "half_value",
            half_value_error(&mesh),
            1e-1,
        )])
    })?;
    checks.into_iter().for_each(|c| report.push(c));

    // universal quadratic: harmonic and inframonogenic representations
    let checks = timed(config, || {
        let f = make_test_solution(&SolutionKind::UniversalQuadratic, m)?;
        let f = f.as_poly().expect("polynomial");
        let df = f.dirac_left();
        let fs: Vec<Multivector> = (0..mesh.len())
            .map(|q| f.evaluate_f64(mesh.node(q)))
            .collect();
        let dfs: Vec<Multivector> = (0..mesh.len())
            .map(|q| df.evaluate_f64(mesh.node(q)))
            .collect();
        let scale = sup_norm(&fs);
        let (mut harm, mut infra, mut harm_out, mut infra_out): (f64, f64, f64, f64) =
            (0.0, 0.0, 0.0, 0.0);
        for x in &inside {
            let c = cauchy_monogenic(&mesh, &fs, Side::Left, x)?;
            let exact = f.evaluate_f64(x);
            harm = harm
                .max((c + cauchy_harmonic(&mesh, &dfs, Side::Left, x)? - exact).clifford_norm());
            infra =
                infra.max((c + cauchy_infra(&mesh, &dfs, Side::Right, x)? - exact).clifford_norm());
        }
        for x in &outside {
            let c = cauchy_monogenic(&mesh, &fs, Side::Left, x)?;
            harm_out =
                harm_out.max((c + cauchy_harmonic(&mesh, &dfs, Side::Left, x)?).clifford_norm());
            infra_out =
                infra_out.max((c + cauchy_infra(&mesh, &dfs, Side::Right, x)?).clifford_norm());
        }
        Ok(vec![
            CheckRecord::at_most("harmonic_representation_interior", harm / scale, 1e-2),
            CheckRecord::at_most("harmonic_representation_exterior", harm_out / scale, 1e-2),
            CheckRecord::at_most("infra_representation_interior", infra / scale, 1e-2),
            CheckRecord::at_most("infra_representation_exterior", infra_out / scale, 1e-2),
        ])
    })?;
    checks.into_iter().for_each(|c| report.push(c));

    let checks = timed(config, || {
        let center = vec![0.0; m];
        let kernel = ExteriorSolution::TranslatedKernel {
            center: center.clone(),
        };
        let kappa = Multivector::scalar(m, 1.0) + Multivector::generator(m, 1) * 0.5;
        let constant = ExteriorSolution::Constant(kappa);
        let mut worst_kernel: f64 = 0.0;
        let mut worst_const: f64 = 0.0;
        for x in &outside {
            let value = eval_e0(x)?.clifford_norm();
            worst_kernel = worst_kernel.max(
                exterior_representation_residual(&kernel, p, &mesh, x)?.clifford_norm() / value,
            );
            worst_const = worst_const.max(
                exterior_representation_residual(&constant, p, &mesh, x)?.clifford_norm()
                    / kappa.clifford_norm(),
            );
        }
        let mut near = vec![0.0; m];
        near[0] = 1.5;
        let mut far = vec![0.0; m];
        far[0] = 10.0;
        let near_res = exterior_representation_residual(&kernel, p, &mesh, &near)?.clifford_norm();
        let far_res = exterior_representation_residual(&kernel, p, &mesh, &far)?.clifford_norm();
        Ok(vec![
            CheckRecord::at_most("exterior_representation_kernel", worst_kernel, 5e-2),
            CheckRecord::at_most("exterior_representation_constant", worst_const, 1e-2),
            CheckRecord::holds(
                "exterior_representation_far_field_decay",
                far_res < near_res,
            ),
        ])
    })?;
    checks.into_iter().for_each(|c| report.push(c));

    let checks = timed(config, || {
        let f: Vec<Multivector> = (0..mesh.len())
            .map(|_| random_multivector(&mut rng, m))
            .collect();
        let g: Vec<Multivector> = (0..mesh.len())
            .map(|_| random_multivector(&mut rng, m))
            .collect();
        let (s, t) = (0.7, -1.3);
        let combo: Vec<Multivector> = f.iter().zip(&g).map(|(a, b)| *a * s + *b * t).collect();
        let mut worst: f64 = 0.0;
        for side in [Side::Left, Side::Right] {
            let x = &inside[0];
            let lhs = cauchy_lame(&mesh, &combo, side, x, p)?;
            let rhs =
                cauchy_lame(&mesh, &f, side, x, p)? * s + cauchy_lame(&mesh, &g, side, x, p)? * t;
            worst = worst.max((lhs - rhs).clifford_norm() / lhs.clifford_norm().max(1.0));
        }
        let (mu, la) = (p.mu(), p.lambda());
        let ci = (mu + la) / (2.0 * mu * (2.0 * mu + la));
        let ch = (3.0 * mu + la) / (2.0 * mu * (2.0 * mu + la));
        let coeff = ((p.c_i() - ci).abs() / ci).max((p.c_h() - ch).abs() / ch);
        Ok(vec![
            CheckRecord::at_most("cauchy_lame_linearity", worst, 1e-12),
            CheckRecord::at_most("lame_coefficients", coeff, 1e-15),
        ])
    })?;
    checks.into_iter().for_each(|c| report.push(c));

    let checks = timed(config, || {
        let delta = 4.0 * mesh.h();
        let stride = probe_stride(&mesh);
        let mut kinds: Vec<SolutionKind> = INTERIOR_KINDS.to_vec();
        kinds.push(SolutionKind::TranslatedCauchyKernel);
        let mut out = Vec::new();
        for kind in &kinds {
            let jet = solution_jet(kind, &mesh, config.alpha)?;
            out.push(CheckRecord::at_most(
                format!("jump_{kind}"),
                jump_residual(&jet, p, delta, stride)?,
                1e-1,
            ));
        }
        Ok(out)
    })?;
    checks.into_iter().for_each(|c| report.push(c));
    let delta = 4.0 * mesh.h();
    report.diagnostic("jump_delta", delta);
    let jet = solution_jet(&SolutionKind::Coordinate, &mesh, config.alpha)?;
    report.diagnostic(
        "jump_extrapolated_coordinate",
        jump_extrapolated(&jet, p, delta, probe_stride(&mesh))?,
    );
    Ok(())
}

/// Volume resolution paired with `level` when refining surface and volume together.
pub(crate) fn resolution_for(config: &RunConfig, level: u32) -> usize {
    let shift = level as i64 - config.level as i64;
    let r = if shift >= 0 {
        config.resolution << shift.min(8)
    } else {
        config.resolution >> (-shift).min(8)
    };
    r.clamp(2, MAX_RESOLUTION)
}

fn x1_squared(m: usize) -> Result<PolyField> {
    let x1 = PolyField::coordinate(m, 1)?;
    x1.mul(&x1)
}

/// Largest Borel–Pompeiu residual for `x₁²` over interior points, each with its own polar grid.
fn bp_interior(
    f: &PolyField,
    p: &LameParams,
    mesh: &Arc<SurfaceMesh>,
    resolution: usize,
    xs: &[Vec<f64>],
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for x in xs {
        let grid = build_polar_volume(mesh.descriptor(), x, resolution)?;
        worst = worst.max(borel_pompeiu_residual(f, p, mesh, &grid, x)?.clifford_norm());
    }
    Ok(worst)
}

pub(crate) fn bp_points(config: &RunConfig) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut xs = points(&mut rng, config.m, 4, 0.1, 0.6);
    xs.push(vec![0.0; config.m]);
    xs
}

pub(crate) fn borel_pompeiu(config: &RunConfig, report: &mut SuiteReport) -> Result<()> {
    let m = config.m;
    let p = &config.params;
    let mesh = config.mesh(config.level)?;
    let xs = bp_points(config);
    let f = x1_squared(m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5eed);

    let checks = timed(config, || {
        let interior = bp_interior(&f, p, &mesh, config.resolution, &xs)?;
        let ball = build_ball_volume(m, config.resolution, 1.0, &vec![0.0; m])?;
        let mut exterior: f64 = 0.0;
        for x in points(&mut rng, m, 3, 1.5, 3.0) {
            exterior =
                exterior.max(borel_pompeiu_residual(&f, p, &mesh, &ball, &x)?.clifford_norm());
        }
        let sol = make_test_solution(&SolutionKind::Coordinate, m)?;
        let y1 = sol.as_poly().expect("polynomial");
        let solution = bp_interior(y1, p, &mesh, config.resolution, &xs)?;
        let mut out = vec![
            CheckRecord::at_most("x1_squared_interior", interior, 5e-2),
            CheckRecord::at_most("x1_squared_exterior", exterior, 5e-2),
            CheckRecord::at_most("lame_solution_interior", solution, 1e-2),
        ];
        if config.level >= 1 {
            let coarse_mesh = config.mesh(config.level - 1)?;
            let coarse = bp_interior(
                &f,
                p,
                &coarse_mesh,
                resolution_for(config, config.level - 1),
                &xs,
            )?;
            out.push(CheckRecord::holds(
                "x1_squared_refinement_decreases",
                interior < coarse,
            ));
        }
        Ok(out)
    })?;
    checks.into_iter().for_each(|c| report.push(c));

    let checks = timed(config, || {
        let mut worst: f64 = 0.0;
        for i in 0..5 {
            let g = PolyField::random(m, SMOOTH_DEGREE, config.seed.wrapping_add(i))?;
            let scale = (0..mesh.len())
                .map(|q| g.evaluate_f64(mesh.node(q)).clifford_norm())
                .fold(0.0, f64::max);
            worst = worst.max(bp_interior(&g, p, &mesh, config.resolution, &xs)? / scale);
        }
        Ok(vec![CheckRecord::at_most(
            "random_polynomials_interior",
            worst,
            5e-2,
        )])
    })?;
    checks.into_iter().for_each(|c| report.push(c));

    let checks = timed(config, || {
        let ball = build_ball_volume(m, config.resolution, 1.0, &vec![0.0; m])?;
        let ones = VolumeSampleField::new(&ball, vec![Multivector::scalar(m, 1.0); ball.len()])?;
        let mut x = vec![0.0; m];
        x[0] = 10.0;
        let th = teodorescu(&ones, Teodorescu::H, p, &x)?.scalar_part();
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let monopole = crate::kernels::volume_unit_ball(m) * eval_e1(&neg)?;
        let a: Vec<Multivector> = (0..ball.len())
            .map(|_| random_multivector(&mut rng, m))
            .collect();
        let b: Vec<Multivector> = (0..ball.len())
            .map(|_| random_multivector(&mut rng, m))
            .collect();
        let combo: Vec<Multivector> = a.iter().zip(&b).map(|(u, v)| *u * 2.0 - *v * 0.5).collect();
        let y = vec![0.0; m];
        let fa = teodorescu(&VolumeSampleField::new(&ball, a)?, Teodorescu::L, p, &y)?;
        let fb = teodorescu(&VolumeSampleField::new(&ball, b)?, Teodorescu::L, p, &y)?;
        let fc = teodorescu(&VolumeSampleField::new(&ball, combo)?, Teodorescu::L, p, &y)?;
        let lin = (fc - (fa * 2.0 - fb * 0.5)).clifford_norm() / fc.clifford_norm().max(1.0);
        Ok(vec![
            CheckRecord::at_most(
                "teodorescu_far_field_monopole",
                (th - monopole).abs() / monopole,
                2e-2,
            ),
            CheckRecord::at_most("teodorescu_linearity", lin, 1e-12),
        ])
    })?;
    checks.into_iter().for_each(|c| report.push(c));
    Ok(())
}

/// `Σ_q w_q (⟨f⁰, g⁰⟩ + Σ_j ⟨f^j, g^j⟩)` with the Euclidean coefficient product.
fn jet_inner(f: &LipschitzJet, g: &LipschitzJet) -> f64 {
    let dot = |a: &Multivector, b: &Multivector| {
        a.coeffs()
            .iter()
            .zip(b.coeffs())
            .map(|(x, y)| x * y)
            .sum::<f64>()
    };
    let mesh = f.mesh();
    crate::clifford::compensated_sum((0..f.len()).map(|q| {
        let grads: f64 = f
            .grads(q)
            .iter()
            .zip(g.grads(q))
            .map(|(a, b)| dot(a, b))
            .sum();
        mesh.weight(q) * (dot(f.f0(q), g.f0(q)) + grads)
    }))
}

pub(crate) fn smooth_jet(
    config: &RunConfig,
    mesh: &Arc<SurfaceMesh>,
    i: u64,
) -> Result<LipschitzJet> {
    let kind = SolutionKind::RandomPoly {
        degree: SMOOTH_DEGREE,
        seed: config.seed.wrapping_add(i),
    };
    solution_jet(&kind, mesh, config.alpha)
}

/// `‖S² f - f‖ / ‖f‖` with `S f` and `S² f`.
pub(crate) fn involution_residual(
    jet: &LipschitzJet,
    p: &LameParams,
) -> Result<(f64, LipschitzJet, LipschitzJet)> {
    let s = singular_sl(jet, p).jet;
    let s2 = singular_sl(&s, p).jet;
    Ok((relative(s2.sub(jet)?.norm(), jet.norm()), s, s2))
}

pub(crate) fn involution(config: &RunConfig, report: &mut SuiteReport) -> Result<()> {
    let p = &config.params;
    let mesh = config.mesh(config.level)?;
    let tol = first_order_tolerance(super::INVOLUTION_TOLERANCE, mesh.h());
    report.diagnostic("involution_tolerance", tol);
    let mut first: Option<(LipschitzJet, LipschitzJet, f64)> = None;
    let checks = timed(config, || {
        let mut out = Vec::new();
        for i in 0..SMOOTH_JETS {
            let jet = smooth_jet(config, &mesh, i)?;
            let (res, s, s2) = involution_residual(&jet, p)?;
            let bias = jet_inner(&s2.sub(&jet)?, &jet) / jet_inner(&jet, &jet);
            report.diagnostic(
                format!("involution_bias_seed_{}", config.seed.wrapping_add(i)),
                bias,
            );
            out.push(CheckRecord::at_most(
                format!("involution_seed_{}", config.seed.wrapping_add(i)),
                res,
                tol,
            ));
            if first.is_none() {
                first = Some((jet, s, res));
            }
        }
        Ok(out)
    })?;
    checks.into_iter().for_each(|c| report.push(c));
    let (jet, s, res) = first.expect("at least one jet");
    let s_ex = singular_sl_with(&jet, p, SelfCell::Excluded).jet;
    let s2_ex = singular_sl_with(&s_ex, p, SelfCell::Excluded).jet;
    report.diagnostic(
        format!("involution_excluded_self_cell_seed_{}", config.seed),
        relative(s2_ex.sub(&jet)?.norm(), jet.norm()),
    );

    let checks = timed(config, || {
        let (plus, minus) = projections_from(&jet, &s);
        let norm = jet.norm();
        let sp = singular_sl(&plus, p).jet;
        let sm = singular_sl(&minus, p).jet;
        let (pp, pm) = projections_from(&plus, &sp);
        let (mp, mm) = projections_from(&minus, &sm);
        let worst = [
            pp.sub(&plus)?.norm(),
            mm.sub(&minus)?.norm(),
            pm.norm(),
            mp.norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        Ok(vec![CheckRecord::at_most(
            "projection_algebra",
            relative(worst, norm),
            2.0 * res,
        )])
    })?;
    checks.into_iter().for_each(|c| report.push(c));

    let checks = timed(config, || {
        let mtr: Vec<Multivector> = (0..jet.len()).map(|q| jet.m_trace(q, p)).collect();
        let expected = monogenic_singular(&mesh, &mtr)?;
        let (mut num, mut den) = (0.0, 0.0);
        for (q, e) in expected.iter().enumerate() {
            num += mesh.weight(q) * (s.m_trace(q, p) - *e).norm_squared();
            den += mesh.weight(q) * e.norm_squared();
        }
        Ok(vec![CheckRecord::at_most(
            "trace_identity",
            relative(num.sqrt(), den.sqrt()),
            tol,
        )])
    })?;
    checks.into_iter().for_each(|c| report.push(c));

    if config.level >= 3 {
        for level in 2..=config.level {
            let mesh = config.mesh(level)?;
            let jet = smooth_jet(config, &mesh, 0)?;
            let (residual, _, _) = involution_residual(&jet, p)?;
            report.convergence.push(ConvergenceRow {
                level,
                nodes: mesh.len(),
                h: mesh.h(),
                residual,
            });
        }
        let monotone = super::is_monotone_decreasing(&report.convergence);
        report.push(CheckRecord::holds("involution_monotone_decrease", monotone));
    }
    Ok(())
}

/// Largest `‖P⁻f‖/‖f‖` over the interior kinds, and `‖P⁺f‖/‖f‖` for the exterior kernel.
pub(crate) fn hardy_ratios(
    config: &RunConfig,
    mesh: &Arc<SurfaceMesh>,
) -> Result<(Vec<(SolutionKind, f64)>, f64)> {
    let p = &config.params;
    let mut interior = Vec::new();
    for kind in &INTERIOR_KINDS {
        let jet = solution_jet(kind, mesh, config.alpha)?;
        let s = singular_sl(&jet, p).jet;
        let (_, minus) = projections_from(&jet, &s);
        interior.push((kind.clone(), relative(minus.norm(), jet.norm())));
    }
    let jet = solution_jet(&SolutionKind::TranslatedCauchyKernel, mesh, config.alpha)?;
    let s = singular_sl(&jet, p).jet;
    let (plus, _) = projections_from(&jet, &s);
    Ok((interior, relative(plus.norm(), jet.norm())))
}

pub(crate) fn hardy(config: &RunConfig, report: &mut SuiteReport) -> Result<()> {
    let p = &config.params;
    let mesh = config.mesh(config.level)?;
    let m = config.m;
    let checks = timed(config, || {
        let mut out = Vec::new();
        let mut reconstruction: f64 = 0.0;
        for kind in &INTERIOR_KINDS {
            let jet = solution_jet(kind, &mesh, config.alpha)?;
            let s = singular_sl(&jet, p).jet;
            let (plus, minus) = projections_from(&jet, &s);
            let norm = jet.norm();
            reconstruction =
                reconstruction.max(relative(plus.add(&minus)?.sub(&jet)?.norm(), norm));
            out.push(CheckRecord::at_most(
                format!("minus_part_{kind}"),
                relative(minus.norm(), norm),
                5e-2,
            ));
            // trace conditions: F|Γ = (P⁺f)⁰ and M F|Γ = M-trace of P⁺f
            let sol = make_test_solution(kind, m)?;
            let f = sol.as_poly().expect("polynomial");
            let mf = apply_operator(f, Operator::M, p);
            let (mut vnum, mut vden, mut mnum, mut mden) = (0.0, 0.0, 0.0, 0.0);
            for q in 0..mesh.len() {
                let y = mesh.node(q);
                let (fv, mv) = (f.evaluate_f64(y), mf.evaluate_f64(y));
                let w = mesh.weight(q);
                vnum += w * (*plus.f0(q) - fv).norm_squared();
                vden += w * fv.norm_squared();
                mnum += w * (plus.m_trace(q, p) - mv).norm_squared();
                mden += w * mv.norm_squared();
            }
            let value = relative(vnum.sqrt(), vden.sqrt());
            let trace = if mden > 0.0 {
                relative(mnum.sqrt(), vden.sqrt().max(mden.sqrt()))
            } else {
                mnum.sqrt() / vden.sqrt()
            };
            out.push(CheckRecord::at_most(
                format!("trace_conditions_{kind}"),
                value.max(trace),
                5e-2,
            ));
        }
        let jet = solution_jet(&SolutionKind::TranslatedCauchyKernel, &mesh, config.alpha)?;
        let s = singular_sl(&jet, p).jet;
        let (plus, minus) = projections_from(&jet, &s);
        let norm = jet.norm();
        reconstruction = reconstruction.max(relative(plus.add(&minus)?.sub(&jet)?.norm(), norm));
        out.push(CheckRecord::at_most(
            "plus_part_translated_cauchy_kernel",
            relative(plus.norm(), norm),
            5e-2,
        ));
        out.push(CheckRecord::at_most(
            "reconstruction",
            reconstruction,
            super::RECONSTRUCTION_TOLERANCE,
        ));
        Ok(out)
    })?;
    checks.into_iter().for_each(|c| report.push(c));
    Ok(())
}

/// Relative weighted `L²` error of recovered gradients.
fn gradient_error(mesh: &SurfaceMesh, got: &[Vec<Multivector>], want: &LipschitzJet) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for (q, g) in got.iter().enumerate() {
        for (j, v) in g.iter().enumerate() {
            let w = want.grad(q, j + 1);
            num += mesh.weight(q) * (*v - *w).norm_squared();
            den += mesh.weight(q) * w.norm_squared();
        }
    }
    relative(num.sqrt(), den.sqrt())
}

pub(crate) fn recovery(config: &RunConfig, report: &mut SuiteReport) -> Result<()> {
    let p = &config.params;
    let mesh = config.mesh(config.level)?;
    let m = config.m;
    let (c1, c2) = (p.a(), p.b());
    let tol = first_order_tolerance(5e-2, mesh.h());
    let checks = timed(config, || {
        let mut out = Vec::new();
        let mut jets = vec![(
            "coordinate".to_string(),
            solution_jet(&SolutionKind::Coordinate, &mesh, config.alpha)?,
        )];
        for i in 0..3 {
            jets.push((
                format!("random_seed_{}", config.seed.wrapping_add(i)),
                smooth_jet(config, &mesh, i)?,
            ));
        }
        let mut consistency: f64 = 0.0;
        for (name, jet) in &jets {
            let mtr: Vec<Multivector> = (0..jet.len()).map(|q| jet.m_trace(q, p)).collect();
            let got = recover_jet(jet.values(), &mtr, c1, c2, &mesh)?;
            out.push(CheckRecord::at_most(
                format!("planted_gradients_{name}"),
                gradient_error(&mesh, &got, jet),
                tol,
            ));
            let rebuilt =
                LipschitzJet::new(mesh.clone(), jet.values().to_vec(), got, config.alpha)?;
            for q in 0..mesh.len() {
                consistency = consistency
                    .max((rebuilt.m_trace(q, p) - mtr[q]).max_abs() / mtr[q].max_abs().max(1.0));
            }
        }
        out.push(CheckRecord::at_most(
            "trace_equation_satisfied",
            consistency,
            1e-10,
        ));
        let zeros = vec![Multivector::zero(m); mesh.len()];
        let got = recover_jet(&zeros, &zeros, c1, c2, &mesh)?;
        let worst = got
            .iter()
            .flatten()
            .map(Multivector::max_abs)
            .fold(0.0, f64::max);
        out.push(CheckRecord::at_most("zero_data_zero_gradients", worst, 0.0));
        let scalar: Vec<Multivector> = (0..mesh.len())
            .map(|q| Multivector::scalar(m, mesh.node(q)[0]))
            .collect();
        let equal = matches!(
            recover_jet(&scalar, &zeros, c1, c1, &mesh),
            Err(Error::Degenerate { .. })
        );
        let opposite = matches!(
            recover_jet(&scalar, &zeros, c1, -c1, &mesh),
            Err(Error::Degenerate { .. })
        );
        out.push(CheckRecord::holds(
            "degenerate_equal_coefficients_rejected",
            equal,
        ));
        out.push(CheckRecord::holds(
            "degenerate_opposite_coefficients_rejected",
            opposite,
        ));
        Ok(out)
    })?;
    checks.into_iter().for_each(|c| report.push(c));
    Ok(())
}

/// `(|t - p|, ‖h⁰(t) - h⁰(p) - Σ h^j(p)(t_j - p_j)‖)` over node pairs at
/// log-spaced separations from `h` to `1.9` times the surface radius.
pub fn whitney_pairs(
    jet: &LipschitzJet,
    bases: usize,
    per_base: usize,
    seed: u64,
) -> Vec<(f64, f64)> {
    let mesh = jet.mesh();
    let m = jet.dim();
    let radius = mesh.descriptor().radii[0];
    let (lo, hi) = (mesh.h(), 1.9 * radius);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(bases * per_base);
    for _ in 0..bases {
        let p = rng.random_range(0..mesh.len());
        let y = mesh.node(p);
        let dist: Vec<f64> = (0..mesh.len())
            .map(|q| crate::geometry::dist2(y, mesh.node(q)).sqrt())
            .collect();
        let mut taken = Vec::new();
        for k in 0..per_base {
            let target = lo * (hi / lo).powf(k as f64 / (per_base - 1) as f64);
            let t = (0..mesh.len())
                .filter(|&q| q != p)
                .min_by(|&a, &b| {
                    (dist[a] - target)
                        .abs()
                        .total_cmp(&(dist[b] - target).abs())
                })
                .expect("mesh has more than one node");
            if taken.contains(&t) {
                continue;
            }
            taken.push(t);
            let x = mesh.node(t);
            let mut rem = *jet.f0(t) - *jet.f0(p);
            for j in 1..=m {
                rem.axpy(-(x[j - 1] - y[j - 1]), jet.grad(p, j));
            }
            out.push((dist[t], rem.clifford_norm()));
        }
    }
    out
}

pub(crate) fn holder(config: &RunConfig, report: &mut SuiteReport) -> Result<()> {
    let p = &config.params;
    let mesh = config.mesh(config.level)?;
    let bound = 1.0 + config.alpha - 0.2;
    let checks = timed(config, || {
        let mut out = Vec::new();
        for i in 0..3 {
            let jet = smooth_jet(config, &mesh, i)?;
            let s = singular_sl(&jet, p).jet;
            let seed = config.seed.wrapping_add(i);
            if let Ok(input) = fit_exponent(&whitney_pairs(&jet, 40, 12, seed)) {
                report.exponents.push(FittedExponent {
                    name: format!("input_seed_{seed}"),
                    fit: input,
                });
            }
            match fit_exponent(&whitney_pairs(&s, 40, 12, seed)) {
                Ok(fit) => {
                    out.push(CheckRecord::at_least(
                        format!("sl_exponent_seed_{seed}"),
                        fit.exponent,
                        bound,
                    ));
                    out.push(CheckRecord::at_least(
                        format!("sl_r_squared_seed_{seed}"),
                        fit.r_squared,
                        0.9,
                    ));
                    report.exponents.push(FittedExponent {
                        name: format!("sl_seed_{seed}"),
                        fit,
                    });
                }
                Err(Error::InsufficientData(reason)) => {
                    log::warn!("no exponent fit at level {}: {reason}", config.level);
                    out.push(CheckRecord::holds(
                        format!("sl_exponent_seed_{seed}"),
                        false,
                    ));
                }
                Err(e) => return Err(e),
            }
        }
        Ok(out)
    })?;
    checks.into_iter().for_each(|c| report.push(c));
    Ok(())
}

/// One residual per level for convergence tables.
pub(crate) fn headline_residual(
    config: &RunConfig,
    suite: Suite,
    mesh: &Arc<SurfaceMesh>,
) -> Result<f64> {
    match suite {
        Suite::Involution => {
            let mut worst: f64 = 0.0;
            for i in 0..SMOOTH_JETS {
                let jet = smooth_jet(config, mesh, i)?;
                worst = worst.max(involution_residual(&jet, &config.params)?.0);
            }
            Ok(worst)
        }
        Suite::Cauchy => Ok(half_value_error(mesh)),
        Suite::Hardy => {
            let (interior, exterior) = hardy_ratios(config, mesh)?;
            Ok(interior
                .into_iter()
                .map(|(_, r)| r)
                .fold(exterior, f64::max))
        }
        Suite::BorelPompeiu => {
            let f = x1_squared(config.m)?;
            bp_interior(
                &f,
                &config.params,
                mesh,
                resolution_for(config, config.level),
                &bp_points(config),
            )
        }
        other => Err(Error::Config(format!(
            "no convergence study for suite {other}"
        ))),
    }
}
