//! Dense arithmetic in the real Clifford algebra `R_{0,m}`.
//!
//! Generators satisfy `e_i e_j + e_j e_i = -2 δ_ij`. A basis blade
//! `e_A = e_{h1} e_{h2} ... e_{hk}` with `h1 < h2 < ... < hk` is encoded by the
//! bitmask whose bit `h-1` is set for every `h ∈ A`; mask 0 is the scalar
//! blade. Values store all `2^m` coefficients, indexed by mask.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::LazyLock;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Largest supported dimension.
pub const MAX_DIM: usize = 6;
/// Smallest supported dimension.
pub const MIN_DIM: usize = 3;
pub(crate) const MAX_BLADES: usize = 1 << MAX_DIM;

/// Basis blade bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BladeMask(pub u8);

impl BladeMask {
    pub const SCALAR: BladeMask = BladeMask(0);

    /// The single generator `e_j` (1-based, as in the usual notation).
    pub fn generator(j: usize) -> BladeMask {
        debug_assert!((1..=MAX_DIM).contains(&j));
        BladeMask(1 << (j - 1))
    }

    pub fn grade(self) -> u32 {
        self.0.count_ones()
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Sign of `e_A e_B` for masks `A`, `B`, ignoring the metric contraction.
///
/// Counts the transpositions needed to merge the two ascending generator
/// lists: every generator of `B` must move past each generator of `A` with a
/// larger index.
fn reorder_swaps(a: u32, b: u32) -> u32 {
    let mut swaps = 0;
    let mut rest = a >> 1;
    while rest != 0 {
        swaps += (rest & b).count_ones();
        rest >>= 1;
    }
    swaps
}

fn product_sign(a: u32, b: u32) -> f64 {
    // each shared generator contracts with e_i e_i = -1
    let parity = reorder_swaps(a, b) + (a & b).count_ones();
    if parity % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `SIGN[a][b]` is the sign of `e_a e_b`; the product blade is `a ^ b`.
/// The sign depends only on the masks, so one table serves every `m ≤ 6`.
static SIGN: LazyLock<Box<[[f64; MAX_BLADES]; MAX_BLADES]>> = LazyLock::new(|| {
    let mut table = Box::new([[0.0; MAX_BLADES]; MAX_BLADES]);
    for (a, row) in table.iter_mut().enumerate() {
        for (b, s) in row.iter_mut().enumerate() {
            *s = product_sign(a as u32, b as u32);
        }
    }
    table
});

#[inline]
pub(crate) fn sign(a: usize, b: usize) -> f64 {
    SIGN[a][b]
}

pub(crate) fn check_dim(m: usize) -> Result<()> {
    if (MIN_DIM..=MAX_DIM).contains(&m) {
        Ok(())
    } else {
        Err(domain(format!(
            "dimension m = {m} outside {MIN_DIM}..={MAX_DIM}"
        )))
    }
}

/// Sign and mask of `e_A e_B` in `R_{0,m}`.
pub fn blade_product(a: BladeMask, b: BladeMask, m: usize) -> Result<(i8, BladeMask)> {
    check_dim(m)?;
    let limit = 1usize << m;
    if a.index() >= limit || b.index() >= limit {
        return Err(domain(format!(
            "blade mask out of range for m = {m}: {:#b}, {:#b}",
            a.0, b.0
        )));
    }
    let s = if product_sign(a.0 as u32, b.0 as u32) > 0.0 {
        1
    } else {
        -1
    };
    Ok((s, BladeMask(a.0 ^ b.0)))
}

/// Coefficient of `e_A` under conjugation: `(-1)^k (-1)^{k(k-1)/2}` for grade `k`.
#[inline]
fn conjugation_sign(mask: usize) -> f64 {
    let k = mask.count_ones();
    let flips = k + k * k.saturating_sub(1) / 2;
    if flips % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Eigenvalue of `X ↦ Σ_i e_i X e_i` on a grade-`k` blade: `(-1)^{k+1} (m - 2k)`.
#[inline]
pub(crate) fn sandwich_factor(mask: usize, m: usize) -> f64 {
    let k = mask.count_ones() as i64;
    let value = (m as i64 - 2 * k) as f64;
    if k % 2 == 0 {
        -value
    } else {
        value
    }
}

/// A value of `R_{0,m}`, dense over the `2^m` blades.
#[derive(Clone, Copy, PartialEq)]
pub struct Multivector {
    dim: u8,
    coeffs: [f64; MAX_BLADES],
}

impl fmt::Debug for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Multivector")
            .field("m", &self.dim)
            .field("coeffs", &self.coeffs())
            .finish()
    }
}

impl fmt::Display for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (mask, &c) in self.coeffs().iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if mask == 0 {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}e")?;
                for bit in 0..self.dim as usize {
                    if mask & (1 << bit) != 0 {
                        write!(f, "{}", bit + 1)?;
                    }
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Multivector {
    /// Zero element of `R_{0,m}`.
    ///
    /// Panics if `m` is outside the supported range; use
    /// [`Multivector::from_coeffs`] for unchecked input.
    pub fn zero(m: usize) -> Self {
        assert!(
            (MIN_DIM..=MAX_DIM).contains(&m),
            "dimension m = {m} outside {MIN_DIM}..={MAX_DIM}"
        );
        Multivector {
            dim: m as u8,
            coeffs: [0.0; MAX_BLADES],
        }
    }

    pub fn scalar(m: usize, s: f64) -> Self {
        let mut out = Self::zero(m);
        out.coeffs[0] = s;
        out
    }

    pub fn blade(m: usize, mask: BladeMask, value: f64) -> Self {
        let mut out = Self::zero(m);
        assert!(mask.index() < 1 << m, "blade mask out of range");
        out.coeffs[mask.index()] = value;
        out
    }

    /// The generator `e_j`, 1-based.
    pub fn generator(m: usize, j: usize) -> Self {
        assert!((1..=m).contains(&j), "generator index {j} outside 1..={m}");
        Self::blade(m, BladeMask::generator(j), 1.0)
    }

    pub fn from_coeffs(m: usize, coeffs: &[f64]) -> Result<Self> {
        check_dim(m)?;
        if coeffs.len() != 1 << m {
            return Err(domain(format!(
                "expected {} coefficients for m = {m}, got {}",
                1 << m,
                coeffs.len()
            )));
        }
        let mut out = Self::zero(m);
        out.coeffs[..coeffs.len()].copy_from_slice(coeffs);
        Ok(out)
    }

    /// Identifies `x = (x_1, ..., x_m)` with `Σ x_i e_i`.
    pub fn embed_vector(x: &[f64]) -> Result<Self> {
        let m = x.len();
        check_dim(m)?;
        let mut out = Self::zero(m);
        for (i, &xi) in x.iter().enumerate() {
            out.coeffs[1 << i] = xi;
        }
        Ok(out)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    #[inline]
    pub fn blade_count(&self) -> usize {
        1 << self.dim
    }

    #[inline]
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs[..self.blade_count()]
    }

    #[inline]
    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        let n = self.blade_count();
        &mut self.coeffs[..n]
    }

    pub fn coeff(&self, mask: BladeMask) -> f64 {
        self.coeffs()[mask.index()]
    }

    /// `Sc[a]`, the coefficient of the scalar blade.
    pub fn scalar_part(&self) -> f64 {
        self.coeffs[0]
    }

    /// Vector part as an `m`-tuple.
    pub fn vector_part(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.coeffs[1 << i]).collect()
    }

    pub fn grade_part(&self, k: u32) -> Self {
        let mut out = Self::zero(self.dim());
        for (mask, &c) in self.coeffs().iter().enumerate() {
            if mask.count_ones() == k {
                out.coeffs[mask] = c;
            }
        }
        out
    }

    /// True when every coefficient outside grade `k` is exactly zero.
    pub fn is_grade(&self, k: u32) -> bool {
        self.coeffs()
            .iter()
            .enumerate()
            .all(|(mask, &c)| mask.count_ones() == k || c == 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs().iter().all(|&c| c == 0.0)
    }

    /// The anti-involution with `ē_i = -e_i`.
    pub fn conjugate(&self) -> Self {
        let mut out = *self;
        for (mask, c) in out.coeffs_mut().iter_mut().enumerate() {
            *c *= conjugation_sign(mask);
        }
        out
    }

    /// `‖a‖² = Sc[a ā]`, evaluated from the scalar part of the product.
    pub fn norm_squared(&self) -> f64 {
        let conj = self.conjugate();
        // only A·A contributes to the scalar blade
        self.coeffs()
            .iter()
            .zip(conj.coeffs())
            .enumerate()
            .map(|(mask, (&a, &b))| sign(mask, mask) * a * b)
            .sum()
    }

    pub fn clifford_norm(&self) -> f64 {
        self.norm_squared().max(0.0).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs().iter().fold(0.0, |acc, c| acc.max(c.abs()))
    }

    /// Geometric product with dimension checking.
    pub fn try_mul(&self, rhs: &Multivector) -> Result<Multivector> {
        if self.dim != rhs.dim {
            return Err(domain(format!(
                "dimension mismatch in product: {} vs {}",
                self.dim, rhs.dim
            )));
        }
        Ok(self.mul_unchecked(rhs))
    }

    fn mul_unchecked(&self, rhs: &Multivector) -> Multivector {
        let n = self.blade_count();
        let mut out = Multivector {
            dim: self.dim,
            coeffs: [0.0; MAX_BLADES],
        };
        for (a, &ca) in self.coeffs[..n].iter().enumerate() {
            if ca == 0.0 {
                continue;
            }
            let row = &SIGN[a];
            for (b, &cb) in rhs.coeffs[..n].iter().enumerate() {
                out.coeffs[a ^ b] += row[b] * ca * cb;
            }
        }
        out
    }

    /// `e_j · self` (1-based `j`), a signed permutation of the coefficients.
    pub fn left_generator(&self, j: usize) -> Multivector {
        let g = 1usize << (j - 1);
        let mut out = Multivector {
            dim: self.dim,
            coeffs: [0.0; MAX_BLADES],
        };
        for (a, &c) in self.coeffs().iter().enumerate() {
            out.coeffs[g ^ a] = sign(g, a) * c;
        }
        out
    }

    /// `self · e_j` (1-based `j`).
    pub fn right_generator(&self, j: usize) -> Multivector {
        let g = 1usize << (j - 1);
        let mut out = Multivector {
            dim: self.dim,
            coeffs: [0.0; MAX_BLADES],
        };
        for (a, &c) in self.coeffs().iter().enumerate() {
            out.coeffs[a ^ g] = sign(a, g) * c;
        }
        out
    }

    /// `Σ_i e_i · self · e_i`, which acts diagonally on blades.
    pub fn generator_sandwich(&self) -> Multivector {
        let m = self.dim();
        let mut out = *self;
        for (mask, c) in out.coeffs_mut().iter_mut().enumerate() {
            *c *= sandwich_factor(mask, m);
        }
        out
    }

    /// `v · self` for a vector `v` given by its `m` components.
    pub fn vector_left_mul(&self, v: &[f64]) -> Multivector {
        let mut out = Multivector {
            dim: self.dim,
            coeffs: [0.0; MAX_BLADES],
        };
        let n = self.blade_count();
        raw::vector_left(v, &self.coeffs[..n], &mut out.coeffs[..n]);
        out
    }

    /// `self · v` for a vector `v` given by its `m` components.
    pub fn vector_right_mul(&self, v: &[f64]) -> Multivector {
        let mut out = Multivector {
            dim: self.dim,
            coeffs: [0.0; MAX_BLADES],
        };
        let n = self.blade_count();
        raw::vector_right(&self.coeffs[..n], v, &mut out.coeffs[..n]);
        out
    }

    /// Inverse of a nonzero grade-1 element: `u⁻¹ = -u / |u|²`.
    pub fn invert_vector(&self) -> Result<Multivector> {
        if !self.is_grade(1) {
            return Err(domain("invert_vector expects a grade-1 element"));
        }
        let n2 = self.norm_squared();
        if n2 == 0.0 {
            return Err(Error::Singularity("cannot invert the zero vector".into()));
        }
        Ok(*self * (-1.0 / n2))
    }

    pub fn scale(&self, s: f64) -> Multivector {
        *self * s
    }

    /// `self += s * other`.
    #[inline]
    pub fn axpy(&mut self, s: f64, other: &Multivector) {
        debug_assert_eq!(self.dim, other.dim);
        let n = self.blade_count();
        for (a, b) in self.coeffs[..n].iter_mut().zip(&other.coeffs[..n]) {
            *a += s * b;
        }
    }

    pub fn distance(&self, other: &Multivector) -> f64 {
        (*self - *other).clifford_norm()
    }
}

/// Geometric product of two values of equal dimension.
pub fn geometric_product(a: &Multivector, b: &Multivector) -> Result<Multivector> {
    a.try_mul(b)
}

impl Mul for Multivector {
    type Output = Multivector;

    /// Panics on a dimension mismatch; see [`Multivector::try_mul`].
    fn mul(self, rhs: Multivector) -> Multivector {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in product");
        self.mul_unchecked(&rhs)
    }
}

impl Mul<&Multivector> for &Multivector {
    type Output = Multivector;

    fn mul(self, rhs: &Multivector) -> Multivector {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in product");
        self.mul_unchecked(rhs)
    }
}

impl Mul<f64> for Multivector {
    type Output = Multivector;

    fn mul(mut self, s: f64) -> Multivector {
        for c in self.coeffs_mut() {
            *c *= s;
        }
        self
    }
}

impl Mul<Multivector> for f64 {
    type Output = Multivector;

    fn mul(self, rhs: Multivector) -> Multivector {
        rhs * self
    }
}

impl Add for Multivector {
    type Output = Multivector;

    fn add(mut self, rhs: Multivector) -> Multivector {
        self += rhs;
        self
    }
}

impl AddAssign for Multivector {
    fn add_assign(&mut self, rhs: Multivector) {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in sum");
        self.axpy(1.0, &rhs);
    }
}

impl Sub for Multivector {
    type Output = Multivector;

    fn sub(mut self, rhs: Multivector) -> Multivector {
        self -= rhs;
        self
    }
}

impl SubAssign for Multivector {
    fn sub_assign(&mut self, rhs: Multivector) {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in difference");
        self.axpy(-1.0, &rhs);
    }
}

impl Neg for Multivector {
    type Output = Multivector;

    fn neg(self) -> Multivector {
        self * -1.0
    }
}

#[derive(Serialize, Deserialize)]
struct MultivectorRepr {
    m: usize,
    coeffs: Vec<f64>,
}

impl Serialize for Multivector {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        MultivectorRepr {
            m: self.dim(),
            coeffs: self.coeffs().to_vec(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Multivector {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = MultivectorRepr::deserialize(deserializer)?;
        Multivector::from_coeffs(repr.m, &repr.coeffs).map_err(serde::de::Error::custom)
    }
}

/// Neumaier-compensated accumulator for multivector sums.
///
/// Quadrature reductions go through this type in a fixed node order so that
/// results are reproducible bit for bit.
#[derive(Clone, Copy)]
pub struct CompensatedSum {
    dim: u8,
    sum: [f64; MAX_BLADES],
    comp: [f64; MAX_BLADES],
}

impl CompensatedSum {
    pub fn new(m: usize) -> Self {
        CompensatedSum {
            dim: m as u8,
            sum: [0.0; MAX_BLADES],
            comp: [0.0; MAX_BLADES],
        }
    }

    #[inline]
    pub fn add_scaled(&mut self, s: f64, value: &Multivector) {
        let n = 1usize << self.dim;
        for i in 0..n {
            neumaier(&mut self.sum[i], &mut self.comp[i], s * value.coeffs[i]);
        }
    }

    #[inline]
    pub fn add(&mut self, value: &Multivector) {
        self.add_scaled(1.0, value);
    }

    pub fn total(&self) -> Multivector {
        let mut out = Multivector::zero(self.dim as usize);
        for (i, c) in out.coeffs_mut().iter_mut().enumerate() {
            *c = self.sum[i] + self.comp[i];
        }
        out
    }
}

#[inline(always)]
fn neumaier(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

/// Scalar compensated sum in a fixed order.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let (mut sum, mut comp) = (0.0, 0.0);
    for x in values {
        neumaier(&mut sum, &mut comp, x);
    }
    sum + comp
}

/// Products with grade-1 operands written into caller-owned buffers, for the
/// quadrature inner loops where a fresh `Multivector` per product would
/// dominate the cost.
pub(crate) mod raw {
    use super::SIGN;

    /// `out = v · a` where `v` is a vector given by its `m` components.
    #[inline]
    pub fn vector_left(v: &[f64], a: &[f64], out: &mut [f64]) {
        let n = a.len();
        out[..n].fill(0.0);
        for (i, &vi) in v.iter().enumerate() {
            let g = 1usize << i;
            let row = &SIGN[g];
            for b in 0..n {
                out[g ^ b] += row[b] * vi * a[b];
            }
        }
    }

    /// `out = a · v` where `v` is a vector given by its `m` components.
    #[inline]
    pub fn vector_right(a: &[f64], v: &[f64], out: &mut [f64]) {
        let n = a.len();
        out[..n].fill(0.0);
        for (i, &vi) in v.iter().enumerate() {
            let g = 1usize << i;
            for b in 0..n {
                out[b ^ g] += SIGN[b][g] * a[b] * vi;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: write out the generator word, bubble-sort it while
    /// counting swaps, then cancel adjacent equal generators with `e_i e_i = -1`.
    fn brute_force(a: u32, b: u32, m: usize) -> (i8, u32) {
        let mut word: Vec<u32> = (0..m as u32).filter(|i| a & (1 << i) != 0).collect();
        word.extend((0..m as u32).filter(|i| b & (1 << i) != 0));
        let mut sign = 1i8;
        let n = word.len();
        for pass in 0..n {
            for k in 0..n.saturating_sub(1 + pass) {
                if word[k] > word[k + 1] {
                    word.swap(k, k + 1);
                    sign = -sign;
                }
            }
        }
        let mut reduced: Vec<u32> = Vec::new();
        for g in word {
            if reduced.last() == Some(&g) {
                reduced.pop();
                sign = -sign;
            } else {
                reduced.push(g);
            }
        }
        (sign, reduced.iter().fold(0, |acc, g| acc | (1 << g)))
    }

    #[test]
    fn blade_product_matches_brute_force_up_to_m4() {
        for m in 3..=4 {
            for a in 0..(1u32 << m) {
                for b in 0..(1u32 << m) {
                    let (s, r) = blade_product(BladeMask(a as u8), BladeMask(b as u8), m).unwrap();
                    assert_eq!(
                        (s, r.0 as u32),
                        brute_force(a, b, m),
                        "m={m} a={a:#b} b={b:#b}"
                    );
                }
            }
        }
    }

    #[test]
    fn blade_product_examples() {
        let e1 = BladeMask(0b001);
        let e2 = BladeMask(0b010);
        let e12 = BladeMask(0b011);
        assert_eq!(blade_product(e1, e1, 3).unwrap(), (-1, BladeMask::SCALAR));
        assert_eq!(blade_product(e1, e2, 3).unwrap(), (1, e12));
        assert_eq!(blade_product(e12, e2, 3).unwrap(), (-1, e1));
    }

    #[test]
    fn blade_product_rejects_out_of_range_masks() {
        assert!(blade_product(BladeMask(8), BladeMask(1), 3).is_err());
        assert!(blade_product(BladeMask(1), BladeMask(1), 7).is_err());
    }

    #[test]
    fn geometric_product_examples() {
        let m = 3;
        let e1 = Multivector::generator(m, 1);
        let e2 = Multivector::generator(m, 2);
        let two_plus_e1 = Multivector::scalar(m, 2.0) + e1;
        let prod = two_plus_e1 * e1;
        assert_eq!(prod, Multivector::scalar(m, -1.0) + e1 * 2.0);

        let e12 = e1 * e2;
        let e21 = e2 * e1;
        assert_eq!(e12 * e21, Multivector::scalar(m, 1.0));

        let a = Multivector::from_coeffs(m, &[1.0, -2.0, 0.5, 3.0, 0.0, 1.5, -1.0, 2.0]).unwrap();
        assert_eq!(a * Multivector::scalar(m, 1.0), a);
    }

    #[test]
    fn mismatched_dimensions_are_rejected() {
        let a = Multivector::scalar(3, 1.0);
        let b = Multivector::scalar(4, 1.0);
        assert!(matches!(geometric_product(&a, &b), Err(Error::Domain(_))));
    }

    #[test]
    fn conjugation_examples() {
        let m = 3;
        let e1 = Multivector::generator(m, 1);
        assert_eq!(e1.conjugate(), -e1);
        assert_eq!(
            Multivector::scalar(m, 1.0).conjugate(),
            Multivector::scalar(m, 1.0)
        );
        let e12 = Multivector::blade(m, BladeMask(0b011), 1.0);
        assert_eq!(e12.conjugate(), -e12);
    }

    #[test]
    fn scalar_part_and_norm_examples() {
        let m = 3;
        let e1 = Multivector::generator(m, 1);
        assert_eq!((Multivector::scalar(m, 3.0) + e1).scalar_part(), 3.0);
        assert_eq!(Multivector::blade(m, BladeMask(3), 1.0).scalar_part(), 0.0);
        assert_eq!((e1 * e1).scalar_part(), -1.0);

        let x = Multivector::embed_vector(&[3.0, 4.0, 0.0]).unwrap();
        assert!((x.clifford_norm() - 5.0).abs() < 1e-15);
        assert_eq!(Multivector::zero(m).clifford_norm(), 0.0);
        let a = Multivector::scalar(m, 1.0) + Multivector::blade(m, BladeMask(3), 1.0);
        assert!((a.clifford_norm() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn embed_vector_examples() {
        let e1 = Multivector::embed_vector(&[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(e1, Multivector::generator(3, 1));
        assert!(Multivector::embed_vector(&[0.0; 3]).unwrap().is_zero());
        let v = Multivector::embed_vector(&[1.0, 2.0, 2.0]).unwrap();
        assert!((v.clifford_norm() - 3.0).abs() < 1e-15);
        assert!(Multivector::embed_vector(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn invert_vector_examples() {
        let m = 3;
        let one = Multivector::scalar(m, 1.0);
        let e1 = Multivector::generator(m, 1);
        assert_eq!(e1.invert_vector().unwrap(), -e1);

        let u = Multivector::generator(m, 2) * 2.0;
        let inv = u.invert_vector().unwrap();
        assert_eq!(inv, Multivector::generator(m, 2) * -0.5);
        assert_eq!(u * inv, one);
        assert_eq!(inv * u, one);

        assert!(matches!(
            Multivector::zero(m).invert_vector(),
            Err(Error::Singularity(_))
        ));
        assert!(matches!(one.invert_vector(), Err(Error::Domain(_))));
    }

    #[test]
    fn generator_shortcuts_agree_with_products() {
        let m = 4;
        let a = Multivector::from_coeffs(m, &(0..16).map(|i| i as f64 - 7.5).collect::<Vec<_>>())
            .unwrap();
        for j in 1..=m {
            let e = Multivector::generator(m, j);
            assert_eq!(a.left_generator(j), e * a);
            assert_eq!(a.right_generator(j), a * e);
        }
        let mut sandwich = Multivector::zero(m);
        for j in 1..=m {
            let e = Multivector::generator(m, j);
            sandwich += e * a * e;
        }
        assert_eq!(a.generator_sandwich(), sandwich);
    }

    #[test]
    fn raw_vector_products_agree_with_dense_product() {
        let m = 3;
        let a = Multivector::from_coeffs(m, &[0.3, -1.0, 2.0, 0.5, 1.5, -0.25, 0.75, 2.5]).unwrap();
        let v = [0.2, -0.7, 1.1];
        let vm = Multivector::embed_vector(&v).unwrap();
        let mut out = [0.0; 8];
        let close = |x: &[f64], y: &Multivector| {
            x.iter()
                .zip(y.coeffs())
                .all(|(p, q)| (p - q).abs() <= 1e-14)
        };
        raw::vector_left(&v, a.coeffs(), &mut out);
        assert!(close(&out, &(vm * a)));
        raw::vector_right(a.coeffs(), &v, &mut out);
        assert!(close(&out, &(a * vm)));
    }

    #[test]
    fn json_form_round_trips() {
        let a = Multivector::from_coeffs(3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]).unwrap();
        let text = serde_json::to_string(&a).unwrap();
        assert_eq!(
            text,
            r#"{"m":3,"coeffs":[1.0,2.0,3.0,4.0,5.0,6.0,7.0,8.0]}"#
        );
        let back: Multivector = serde_json::from_str(&text).unwrap();
        assert_eq!(back, a);
        assert!(serde_json::from_str::<Multivector>(r#"{"m":3,"coeffs":[1.0]}"#).is_err());
    }

    #[test]
    fn compensated_sum_recovers_cancelled_terms() {
        let total = compensated_sum([1.0, 1e100, 1.0, -1e100]);
        assert_eq!(total, 2.0);
    }
}
