//! Multivector-valued polynomials with exact rational coefficients and the
//! first- and second-order Clifford differential operators acting on them.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::LazyLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clifford::{check_dim, sign, Multivector};
use crate::error::{domain, Error, Result};
use crate::params::LameParams;

/// Exponent multi-index `(j_1, …, j_m)`.
pub type Exponents = Vec<u32>;

/// A multivector with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMultivector {
    coeffs: Vec<BigRational>,
}

impl RationalMultivector {
    pub fn zero(m: usize) -> Self {
        RationalMultivector {
            coeffs: vec![BigRational::zero(); 1 << m],
        }
    }

    pub fn scalar(m: usize, s: BigRational) -> Self {
        let mut out = Self::zero(m);
        out.coeffs[0] = s;
        out
    }

    pub fn blade(m: usize, mask: usize, value: BigRational) -> Self {
        let mut out = Self::zero(m);
        out.coeffs[mask] = value;
        out
    }

    pub fn generator(m: usize, j: usize) -> Self {
        Self::blade(m, 1 << (j - 1), BigRational::one())
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    fn dim(&self) -> usize {
        self.coeffs.len().trailing_zeros() as usize
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len();
        let mut out = Self::zero(self.dim());
        for (a, ca) in self.coeffs.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (b, cb) in rhs.coeffs[..n].iter().enumerate() {
                if cb.is_zero() {
                    continue;
                }
                let prod = ca * cb;
                if sign(a, b) > 0.0 {
                    out.coeffs[a ^ b] += prod;
                } else {
                    out.coeffs[a ^ b] -= prod;
                }
            }
        }
        out
    }

    fn add_assign(&mut self, rhs: &Self) {
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }

    fn scaled(&self, s: &BigRational) -> Self {
        RationalMultivector {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn to_f64(&self) -> Multivector {
        let values: Vec<f64> = self.coeffs.iter().map(rational_to_f64).collect();
        Multivector::from_coeffs(self.dim(), &values).expect("dimension checked at construction")
    }
}

fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_positive() {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        }
    })
}

fn int(k: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(k))
}

/// A polynomial `Σ_j x^j c_j` with exact multivector coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct PolyField {
    dim: usize,
    terms: BTreeMap<Exponents, RationalMultivector>,
}

impl fmt::Debug for PolyField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyField(m = {}, {} terms)", self.dim, self.terms.len())
    }
}

/// A [`PolyField`] with coefficients rounded to `f64`.
#[derive(Debug, Clone)]
pub struct CompiledPoly {
    dim: usize,
    terms: Vec<(Exponents, Multivector)>,
}

impl CompiledPoly {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Panics if `x` has the wrong length.
    pub fn eval(&self, x: &[f64]) -> Multivector {
        assert_eq!(x.len(), self.dim, "point dimension");
        let mut out = Multivector::zero(self.dim);
        for (e, c) in &self.terms {
            let mono: f64 = x.iter().zip(e).map(|(&xi, &k)| xi.powi(k as i32)).product();
            out.axpy(mono, c);
        }
        out
    }
}

/// Operators of second or first order acting on polynomial fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operator {
    /// `a (f D) + b (D f)`
    M,
    /// `a (D f) + b (f D)`
    Mbar,
    /// `a D f D + b D D f`
    L,
    /// `D D f`
    DD,
}

impl PolyField {
    pub fn zero(m: usize) -> Result<Self> {
        check_dim(m)?;
        Ok(PolyField {
            dim: m,
            terms: BTreeMap::new(),
        })
    }

    /// The constant field with value `c`.
    pub fn constant(c: RationalMultivector) -> Result<Self> {
        Self::monomial(vec![0; c.dim()], c)
    }

    /// `x^exps · c`.
    pub fn monomial(exps: Exponents, c: RationalMultivector) -> Result<Self> {
        let m = exps.len();
        check_dim(m)?;
        if c.coeffs.len() != 1 << m {
            return Err(domain(
                "coefficient dimension does not match the exponent length",
            ));
        }
        let mut out = PolyField {
            dim: m,
            terms: BTreeMap::new(),
        };
        if !c.is_zero() {
            out.terms.insert(exps, c);
        }
        Ok(out)
    }

    /// The scalar coordinate function `x_i` (1-based).
    pub fn coordinate(m: usize, i: usize) -> Result<Self> {
        if !(1..=m).contains(&i) {
            return Err(domain(format!("axis {i} outside 1..={m}")));
        }
        let mut exps = vec![0; m];
        exps[i - 1] = 1;
        Self::monomial(exps, RationalMultivector::scalar(m, BigRational::one()))
    }

    /// The identity field `x ↦ Σ x_i e_i`.
    pub fn position(m: usize) -> Result<Self> {
        let mut out = Self::zero(m)?;
        for i in 1..=m {
            out = out.add(
                &Self::coordinate(m, i)?.right_mul_const(&RationalMultivector::generator(m, i)),
            )?;
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &RationalMultivector)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// True when every coefficient is grade 1.
    pub fn is_vector_valued(&self) -> bool {
        self.terms.values().all(|c| {
            c.coeffs
                .iter()
                .enumerate()
                .all(|(mask, v)| mask.count_ones() == 1 || v.is_zero())
        })
    }

    fn insert_add(&mut self, exps: Exponents, c: RationalMultivector) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(exps) {
            Entry::Vacant(v) => {
                if !c.is_zero() {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                o.get_mut().add_assign(&c);
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(domain(format!(
                "dimension mismatch: {} vs {}",
                self.dim, other.dim
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert_add(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&int(-1)))
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        let mut out = PolyField {
            dim: self.dim,
            terms: BTreeMap::new(),
        };
        for (e, c) in &self.terms {
            out.insert_add(e.clone(), c.scaled(s));
        }
        out
    }

    /// Pointwise geometric product `self(x) · other(x)`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let mut out = PolyField {
            dim: self.dim,
            terms: BTreeMap::new(),
        };
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exps: Exponents = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.insert_add(exps, ca.mul(cb));
            }
        }
        Ok(out)
    }

    /// `c · self`.
    pub fn left_mul_const(&self, c: &RationalMultivector) -> Self {
        let mut out = PolyField {
            dim: self.dim,
            terms: BTreeMap::new(),
        };
        for (e, v) in &self.terms {
            out.insert_add(e.clone(), c.mul(v));
        }
        out
    }

    /// `self · c`.
    pub fn right_mul_const(&self, c: &RationalMultivector) -> Self {
        let mut out = PolyField {
            dim: self.dim,
            terms: BTreeMap::new(),
        };
        for (e, v) in &self.terms {
            out.insert_add(e.clone(), v.mul(c));
        }
        out
    }

    /// Exact `∂f/∂x_j`, 1-based axis.
    pub fn partial_derivative(&self, j: usize) -> Result<Self> {
        if !(1..=self.dim).contains(&j) {
            return Err(domain(format!("axis {j} outside 1..={}", self.dim)));
        }
        let axis = j - 1;
        let mut out = PolyField {
            dim: self.dim,
            terms: BTreeMap::new(),
        };
        for (e, c) in &self.terms {
            let k = e[axis];
            if k == 0 {
                continue;
            }
            let mut exps = e.clone();
            exps[axis] = k - 1;
            out.insert_add(exps, c.scaled(&int(k as i64)));
        }
        Ok(out)
    }

    fn partial(&self, j: usize) -> Self {
        self.partial_derivative(j).expect("axis in range")
    }

    /// `Σ e_j ∂_j f`.
    pub fn dirac_left(&self) -> Self {
        let mut out = PolyField {
            dim: self.dim,
            terms: BTreeMap::new(),
        };
        for j in 1..=self.dim {
            let e = RationalMultivector::generator(self.dim, j);
            for (exps, c) in self.partial(j).terms {
                out.insert_add(exps, e.mul(&c));
            }
        }
        out
    }

    /// `Σ (∂_j f) e_j`.
    pub fn dirac_right(&self) -> Self {
        let mut out = PolyField {
            dim: self.dim,
            terms: BTreeMap::new(),
        };
        for j in 1..=self.dim {
            let e = RationalMultivector::generator(self.dim, j);
            for (exps, c) in self.partial(j).terms {
                out.insert_add(exps, c.mul(&e));
            }
        }
        out
    }

    /// `Σ_j ∂_j² f`.
    pub fn laplacian(&self) -> Self {
        let mut out = PolyField {
            dim: self.dim,
            terms: BTreeMap::new(),
        };
        for j in 1..=self.dim {
            for (exps, c) in self.partial(j).partial(j).terms {
                out.insert_add(exps, c);
            }
        }
        out
    }

    /// Exact evaluation, rounded to double precision at the end.
    pub fn evaluate_at(&self, x: &[f64]) -> Result<Multivector> {
        if x.len() != self.dim {
            return Err(domain(format!(
                "point has {} coordinates, expected {}",
                x.len(),
                self.dim
            )));
        }
        let xs: Vec<BigRational> = x
            .iter()
            .map(|&v| BigRational::from_f64(v).ok_or_else(|| domain("non-finite coordinate")))
            .collect::<Result<_>>()?;
        let mut acc = RationalMultivector::zero(self.dim);
        for (e, c) in &self.terms {
            let mut mono = BigRational::one();
            for (xi, &k) in xs.iter().zip(e) {
                for _ in 0..k {
                    mono *= xi;
                }
            }
            acc.add_assign(&c.scaled(&mono));
        }
        Ok(acc.to_f64())
    }

    /// Double-precision evaluation by Horner-free monomial summation. Faster
    /// than [`PolyField::evaluate_at`] and accurate to rounding for the small
    /// integer-coefficient fields used in tests.
    pub fn evaluate_f64(&self, x: &[f64]) -> Multivector {
        let mut out = Multivector::zero(self.dim);
        for (e, c) in &self.terms {
            let mono: f64 = x.iter().zip(e).map(|(&xi, &k)| xi.powi(k as i32)).product();
            for (slot, v) in out.coeffs_mut().iter_mut().zip(&c.coeffs) {
                if !v.is_zero() {
                    *slot += rational_to_f64(v) * mono;
                }
            }
        }
        out
    }

    /// Double-precision copy for repeated evaluation.
    pub fn compile(&self) -> CompiledPoly {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let coeffs: Vec<f64> = c.coeffs.iter().map(rational_to_f64).collect();
                (
                    e.clone(),
                    Multivector::from_coeffs(self.dim, &coeffs).expect("dimension checked"),
                )
            })
            .collect();
        CompiledPoly {
            dim: self.dim,
            terms,
        }
    }

    /// Value and first partial derivatives at `x`.
    pub fn jet_at(&self, x: &[f64]) -> Result<(Multivector, Vec<Multivector>)> {
        let value = self.evaluate_at(x)?;
        let grads = (1..=self.dim)
            .map(|j| self.partial(j).evaluate_at(x))
            .collect::<Result<_>>()?;
        Ok((value, grads))
    }

    /// Random field of the given total degree with small integer coefficients.
    pub fn random(m: usize, degree: u32, seed: u64) -> Result<Self> {
        check_dim(m)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Self::zero(m)?;
        for exps in exponents_up_to(m, degree) {
            let mut c = RationalMultivector::zero(m);
            for slot in c.coeffs.iter_mut() {
                if rng.random_bool(0.5) {
                    *slot = int(rng.random_range(-3..=3));
                }
            }
            out.insert_add(exps, c);
        }
        Ok(out)
    }

    /// Random grade-1 field of the given total degree.
    pub fn random_vector(m: usize, degree: u32, seed: u64) -> Result<Self> {
        check_dim(m)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Self::zero(m)?;
        for exps in exponents_up_to(m, degree) {
            let mut c = RationalMultivector::zero(m);
            for i in 0..m {
                if rng.random_bool(0.6) {
                    c.coeffs[1 << i] = int(rng.random_range(-4..=4));
                }
            }
            out.insert_add(exps, c);
        }
        Ok(out)
    }
}

/// All exponent multi-indices with `|j| ≤ degree`, in lexicographic order.
fn exponents_up_to(m: usize, degree: u32) -> Vec<Exponents> {
    fn rec(m: usize, left: u32, prefix: &mut Exponents, out: &mut Vec<Exponents>) {
        if prefix.len() == m {
            out.push(prefix.clone());
            return;
        }
        for k in 0..=left {
            prefix.push(k);
            rec(m, left - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, degree, &mut Vec::with_capacity(m), &mut out);
    out
}

/// Applies `M`, `M̄`, `L` or `DD` exactly.
pub fn apply_operator(f: &PolyField, which: Operator, p: &LameParams) -> PolyField {
    let (a, b) = p.exact_ab();
    match which {
        Operator::M => f
            .dirac_right()
            .scale(&a)
            .add(&f.dirac_left().scale(&b))
            .expect("same dimension"),
        Operator::Mbar => f
            .dirac_left()
            .scale(&a)
            .add(&f.dirac_right().scale(&b))
            .expect("same dimension"),
        Operator::L => {
            let dfd = f.dirac_left().dirac_right();
            let ddf = f.dirac_left().dirac_left();
            dfd.scale(&a).add(&ddf.scale(&b)).expect("same dimension")
        }
        Operator::DD => f.dirac_left().dirac_left(),
    }
}

/// `μ Δu + (μ+λ) ∇(∇·u)` for a grade-1 field `u`, assembled componentwise.
pub fn classical_lame(u: &PolyField, p: &LameParams) -> Result<PolyField> {
    if !u.is_vector_valued() {
        return Err(domain("the classical Lamé operator needs a grade-1 field"));
    }
    let m = u.dim;
    let (mu, lambda) = p.exact();
    let components: Vec<PolyField> = (1..=m).map(|i| u.scalar_component(1 << (i - 1))).collect();
    let mut divergence = PolyField::zero(m)?;
    for (k, comp) in components.iter().enumerate() {
        divergence = divergence.add(&comp.partial(k + 1))?;
    }
    let mut out = PolyField::zero(m)?;
    for (i, comp) in components.iter().enumerate() {
        let e = RationalMultivector::generator(m, i + 1);
        let value = comp
            .laplacian()
            .scale(&mu)
            .add(&divergence.partial(i + 1).scale(&(&mu + &lambda)))?;
        out = out.add(&value.right_mul_const(&e))?;
    }
    Ok(out)
}

impl PolyField {
    /// The scalar field carrying the coefficient of blade `mask`.
    pub fn scalar_component(&self, mask: usize) -> PolyField {
        let mut out = PolyField {
            dim: self.dim,
            terms: BTreeMap::new(),
        };
        for (e, c) in &self.terms {
            let v = c.coeffs[mask].clone();
            out.insert_add(e.clone(), RationalMultivector::scalar(self.dim, v));
        }
        out
    }
}

/// Sign relating the two forms of the Lamé system, derived once from `u = x₁² e₁`.
pub static LAME_SIGN: LazyLock<i32> = LazyLock::new(|| {
    let m = 3;
    let p = LameParams::default();
    let mut exps = vec![0; m];
    exps[0] = 2;
    let u =
        PolyField::monomial(exps, RationalMultivector::generator(m, 1)).expect("valid monomial");
    let clifford = apply_operator(&u, Operator::L, &p);
    let classical = classical_lame(&u, &p).expect("vector field");
    if clifford.add(&classical).expect("same dimension").is_zero() {
        1
    } else {
        debug_assert!(clifford.sub(&classical).expect("same dimension").is_zero());
        -1
    }
});

/// `[a DuD + b DDu] + σ [μΔu + (μ+λ)∇(∇·u)]`, identically zero for every
/// polynomial vector field.
pub fn classical_lame_residual(u: &PolyField, p: &LameParams) -> Result<PolyField> {
    let classical = classical_lame(u, p)?;
    let clifford = apply_operator(u, Operator::L, p);
    clifford.add(&classical.scale(&int(*LAME_SIGN as i64)))
}

/// Catalogued closed-form solutions and generic fields used as test data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SolutionKind {
    /// `1 + ½e₁₂`.
    Constant,
    /// `y₁`.
    Coordinate,
    /// `x₁e₂ + x₂e₁`, two-sided monogenic.
    MonogenicLinear,
    /// `x₁² − x₂²`, harmonic and inframonogenic.
    UniversalQuadratic,
    /// `E₀(· − c)` with `c` the surface center.
    TranslatedCauchyKernel,
    /// Generic polynomial of the given degree.
    RandomPoly { degree: u32, seed: u64 },
}

impl FromStr for SolutionKind {
    type Err = Error;

    /// Accepts the snake-case names, with `random_poly:<degree>:<seed>`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constant" => Ok(SolutionKind::Constant),
            "coordinate" => Ok(SolutionKind::Coordinate),
            "monogenic_linear" => Ok(SolutionKind::MonogenicLinear),
            "universal_quadratic" => Ok(SolutionKind::UniversalQuadratic),
            "translated_cauchy_kernel" | "translated_cauchy_kernel_marker" => {
                Ok(SolutionKind::TranslatedCauchyKernel)
            }
            other => {
                let parts: Vec<&str> = other.split(':').collect();
                match parts.as_slice() {
                    ["random_poly", degree, seed] => {
                        let degree = degree.parse().map_err(|_| Error::UnknownKind(s.into()))?;
                        let seed = seed.parse().map_err(|_| Error::UnknownKind(s.into()))?;
                        Ok(SolutionKind::RandomPoly { degree, seed })
                    }
                    _ => Err(Error::UnknownKind(s.into())),
                }
            }
        }
    }
}

impl fmt::Display for SolutionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolutionKind::Constant => write!(f, "constant"),
            SolutionKind::Coordinate => write!(f, "coordinate"),
            SolutionKind::MonogenicLinear => write!(f, "monogenic_linear"),
            SolutionKind::UniversalQuadratic => write!(f, "universal_quadratic"),
            SolutionKind::TranslatedCauchyKernel => write!(f, "translated_cauchy_kernel"),
            SolutionKind::RandomPoly { degree, seed } => write!(f, "random_poly:{degree}:{seed}"),
        }
    }
}

/// Either an explicit polynomial or the translated Cauchy kernel marker.
#[derive(Debug, Clone)]
pub enum TestSolution {
    Poly(PolyField),
    TranslatedKernel,
}

impl TestSolution {
    pub fn as_poly(&self) -> Option<&PolyField> {
        match self {
            TestSolution::Poly(f) => Some(f),
            TestSolution::TranslatedKernel => None,
        }
    }
}

pub fn make_test_solution(kind: &SolutionKind, m: usize) -> Result<TestSolution> {
    check_dim(m)?;
    let scalar_one = || RationalMultivector::scalar(m, BigRational::one());
    let field = match kind {
        SolutionKind::Constant => {
            let mut c = scalar_one();
            c.coeffs[0b11] = BigRational::new(1.into(), 2.into());
            PolyField::constant(c)?
        }
        SolutionKind::Coordinate => PolyField::coordinate(m, 1)?,
        SolutionKind::MonogenicLinear => {
            let x1e2 =
                PolyField::coordinate(m, 1)?.right_mul_const(&RationalMultivector::generator(m, 2));
            let x2e1 =
                PolyField::coordinate(m, 2)?.right_mul_const(&RationalMultivector::generator(m, 1));
            x1e2.add(&x2e1)?
        }
        SolutionKind::UniversalQuadratic => {
            let mut e1 = vec![0; m];
            e1[0] = 2;
            let mut e2 = vec![0; m];
            e2[1] = 2;
            PolyField::monomial(e1, scalar_one())?.sub(&PolyField::monomial(e2, scalar_one())?)?
        }
        SolutionKind::TranslatedCauchyKernel => return Ok(TestSolution::TranslatedKernel),
        SolutionKind::RandomPoly { degree, seed } => PolyField::random(m, *degree, *seed)?,
    };
    Ok(TestSolution::Poly(field))
}

#[derive(Serialize)]
struct TermRepr {
    exponents: Vec<u32>,
    coeffs: Vec<String>,
}

impl Serialize for PolyField {
    /// Debug dump: each term as exponents plus rational coefficients written as strings.
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            m: usize,
            terms: Vec<TermRepr>,
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| TermRepr {
                exponents: e.clone(),
                coeffs: c.coeffs.iter().map(|v| v.to_string()).collect(),
            })
            .collect();
        Repr { m: self.dim, terms }.serialize(serializer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mono(m: usize, exps: &[u32], mask: usize, v: i64) -> PolyField {
        PolyField::monomial(exps.to_vec(), RationalMultivector::blade(m, mask, int(v))).unwrap()
    }

    #[test]
    fn partial_derivative_examples() {
        let f = mono(3, &[2, 0, 0], 0b010, 1);
        assert_eq!(
            f.partial_derivative(1).unwrap(),
            mono(3, &[1, 0, 0], 0b010, 2)
        );
        let c = mono(3, &[0, 0, 0], 0, 5);
        assert!(c.partial_derivative(2).unwrap().is_zero());
        assert!(c.partial_derivative(4).is_err());
        assert!(c.partial_derivative(0).is_err());
    }

    #[test]
    fn mixed_partials_commute() {
        for seed in 0..5 {
            let f = PolyField::random(3, 3, seed).unwrap();
            let a = f
                .partial_derivative(1)
                .unwrap()
                .partial_derivative(2)
                .unwrap();
            let b = f
                .partial_derivative(2)
                .unwrap()
                .partial_derivative(1)
                .unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn dirac_examples() {
        let m = 3;
        let x = PolyField::position(m).unwrap();
        assert_eq!(x.dirac_left(), mono(m, &[0, 0, 0], 0, -(m as i64)));
        let f = match make_test_solution(&SolutionKind::MonogenicLinear, m).unwrap() {
            TestSolution::Poly(f) => f,
            _ => unreachable!(),
        };
        assert!(f.dirac_left().is_zero());
        assert!(f.dirac_right().is_zero());
        assert!(mono(m, &[0, 0, 0], 0b101, 3).dirac_left().is_zero());
    }

    #[test]
    fn operator_examples() {
        let m = 3;
        let p = LameParams::default();
        let lin = PolyField::random(m, 1, 9).unwrap();
        assert!(apply_operator(&lin, Operator::L, &p).is_zero());

        let q = make_test_solution(&SolutionKind::UniversalQuadratic, m).unwrap();
        let q = q.as_poly().unwrap();
        assert!(apply_operator(q, Operator::L, &p).is_zero());
        assert!(apply_operator(q, Operator::DD, &p).is_zero());

        let x1sq = mono(m, &[2, 0, 0], 0, 1);
        assert_eq!(
            apply_operator(&x1sq, Operator::L, &p),
            mono(m, &[0, 0, 0], 0, -6)
        );
    }

    #[test]
    fn laplacian_sign_convention() {
        for seed in 0..5 {
            let f = PolyField::random(3, 3, seed).unwrap().scalar_component(0);
            let dd = f.dirac_left().dirac_left();
            assert_eq!(dd, f.laplacian().scale(&int(-1)));
        }
    }

    #[test]
    fn classical_residual_examples() {
        let m = 3;
        let p = LameParams::default();
        assert_eq!(*LAME_SIGN, 1);
        assert!(classical_lame_residual(&mono(m, &[1, 0, 0], 0b001, 1), &p)
            .unwrap()
            .is_zero());

        let u = mono(m, &[2, 0, 0], 0b001, 1);
        assert_eq!(
            apply_operator(&u, Operator::L, &p),
            mono(m, &[0, 0, 0], 0b001, -6)
        );
        assert_eq!(
            classical_lame(&u, &p).unwrap(),
            mono(m, &[0, 0, 0], 0b001, 6)
        );
        assert!(classical_lame_residual(&u, &p).unwrap().is_zero());

        assert!(classical_lame_residual(&mono(m, &[1, 0, 0], 0b011, 1), &p).is_err());
    }

    #[test]
    fn evaluation_examples() {
        let q = make_test_solution(&SolutionKind::UniversalQuadratic, 3).unwrap();
        let q = q.as_poly().unwrap();
        assert!(q.evaluate_at(&[1.0, 1.0, 0.0]).unwrap().is_zero());

        let f = make_test_solution(&SolutionKind::MonogenicLinear, 3).unwrap();
        let v = f.as_poly().unwrap().evaluate_at(&[2.0, 3.0, 0.0]).unwrap();
        assert_eq!(v, Multivector::embed_vector(&[3.0, 2.0, 0.0]).unwrap());
        assert_eq!(f.as_poly().unwrap().evaluate_f64(&[2.0, 3.0, 0.0]), v);
    }

    #[test]
    fn catalogued_solutions_solve_the_system() {
        let params = [(1.0, 1.0), (0.5, 2.0), (3.0, -1.5), (2.0, 0.25), (0.7, 9.0)];
        for m in 3..=4 {
            for kind in [
                SolutionKind::Constant,
                SolutionKind::Coordinate,
                SolutionKind::MonogenicLinear,
                SolutionKind::UniversalQuadratic,
            ] {
                let f = make_test_solution(&kind, m).unwrap();
                for &(mu, lambda) in &params {
                    let p = LameParams::new(mu, lambda).unwrap();
                    assert!(
                        apply_operator(f.as_poly().unwrap(), Operator::L, &p).is_zero(),
                        "{kind}"
                    );
                }
            }
        }
    }

    #[test]
    fn random_poly_is_generic() {
        let f = make_test_solution(&SolutionKind::RandomPoly { degree: 3, seed: 1 }, 3).unwrap();
        assert!(
            !apply_operator(f.as_poly().unwrap(), Operator::L, &LameParams::default()).is_zero()
        );
    }

    #[test]
    fn kind_parsing() {
        assert_eq!(
            "universal_quadratic".parse::<SolutionKind>().unwrap(),
            SolutionKind::UniversalQuadratic
        );
        assert_eq!(
            "random_poly:3:7".parse::<SolutionKind>().unwrap(),
            SolutionKind::RandomPoly { degree: 3, seed: 7 }
        );
        assert!(matches!(
            "bogus".parse::<SolutionKind>(),
            Err(Error::UnknownKind(_))
        ));
        for kind in [
            "constant",
            "coordinate",
            "translated_cauchy_kernel",
            "random_poly:2:5",
        ] {
            assert_eq!(kind.parse::<SolutionKind>().unwrap().to_string(), kind);
        }
    }

    #[test]
    fn json_dump_lists_terms() {
        let f = mono(3, &[1, 0, 0], 0b010, 1);
        let v = serde_json::to_value(&f).unwrap();
        assert_eq!(v["m"], 3);
        assert_eq!(v["terms"][0]["exponents"], serde_json::json!([1, 0, 0]));
        assert_eq!(v["terms"][0]["coeffs"][2], "1");
    }
}
