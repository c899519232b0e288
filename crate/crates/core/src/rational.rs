//! Rational functions with factored denominators.
//!
//! A [`RationalFunction`] is `p(z) / Π (z - a_j)^{m_j}` where the poles `a_j`
//! are stored explicitly. Membership of `R_0(X)` ("poles off `X`") is then a
//! distance computation rather than a root-finding problem. No common factors
//! are ever cancelled: sums and products are correct pointwise, nothing more.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::SwissCheese;
use crate::json;
use crate::rng::{rng_from_seed, CheeseRng};

/// Evaluations closer than this to a pole are refused.
pub const POLE_GUARD: f64 = 1e-13;

/// Dense polynomial, coefficients in ascending degree. The highest stored
/// coefficient is nonzero; the zero polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Polynomial {
    #[serde(with = "json::complex_pairs")]
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last().is_some_and(|c| *c == Complex64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: Complex64) -> Self {
        Polynomial::new(vec![c])
    }

    /// `z^n`.
    pub fn monomial(n: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
        coeffs[n] = Complex64::new(1.0, 0.0);
        Polynomial { coeffs }
    }

    /// `z - a`.
    pub fn linear(a: Complex64) -> Self {
        Polynomial::new(vec![-a, Complex64::new(1.0, 0.0)])
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    pub fn derivative(&self) -> Polynomial {
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * k as f64)
                .collect(),
        )
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(other.coeffs.len());
        let zero = Complex64::new(0.0, 0.0);
        Polynomial::new(
            (0..len)
                .map(|k| self.coeffs.get(k).copied().unwrap_or(zero) + other.coeffs.get(k).copied().unwrap_or(zero))
                .collect(),
        )
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    pub fn scale(&self, c: Complex64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn pow(&self, n: u32) -> Polynomial {
        (0..n).fold(Polynomial::constant(Complex64::new(1.0, 0.0)), |acc, _| acc.mul(self))
    }

    /// Coefficients of the same polynomial in powers of `(z - a)`, by
    /// repeated synthetic division.
    pub fn taylor_at(&self, a: Complex64) -> Vec<Complex64> {
        let mut work = self.coeffs.clone();
        let n = work.len();
        for start in 0..n {
            for k in (start..n - 1).rev() {
                let carry = work[k + 1] * a;
                work[k] += carry;
            }
        }
        work
    }
}

/// One factor `(z - pole)^mult` of a denominator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoleFactor {
    #[serde(with = "json::complex_pair")]
    pub pole: Complex64,
    pub mult: u32,
}

/// `numerator(z) / Π (z - pole_j)^{mult_j}` with pairwise distinct poles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RationalRepr")]
pub struct RationalFunction {
    #[serde(rename = "num")]
    numerator: Polynomial,
    factors: Vec<PoleFactor>,
}

#[derive(Deserialize)]
struct RationalRepr {
    num: Polynomial,
    factors: Vec<PoleFactor>,
}

impl TryFrom<RationalRepr> for RationalFunction {
    type Error = Error;

    fn try_from(r: RationalRepr) -> Result<Self> {
        RationalFunction::new(r.num, r.factors)
    }
}

fn merge_factors(into: &mut Vec<PoleFactor>, factor: PoleFactor, combine: impl Fn(u32, u32) -> u32) {
    match into.iter_mut().find(|f| f.pole == factor.pole) {
        Some(existing) => existing.mult = combine(existing.mult, factor.mult),
        None => into.push(factor),
    }
}

impl RationalFunction {
    /// Checked constructor: multiplicities are positive, poles finite and distinct.
    pub fn new(numerator: Polynomial, factors: Vec<PoleFactor>) -> Result<Self> {
        for (i, f) in factors.iter().enumerate() {
            if f.mult == 0 {
                return Err(Error::InvalidArgument(format!("pole {} has multiplicity 0", f.pole)));
            }
            if !f.pole.re.is_finite() || !f.pole.im.is_finite() {
                return Err(Error::InvalidArgument("non-finite pole".into()));
            }
            if factors[..i].iter().any(|g| g.pole == f.pole) {
                return Err(Error::InvalidArgument(format!("pole {} listed twice", f.pole)));
            }
        }
        if numerator.coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidArgument("non-finite coefficient".into()));
        }
        Ok(RationalFunction { numerator, factors })
    }

    pub fn polynomial(p: Polynomial) -> Self {
        RationalFunction {
            numerator: p,
            factors: Vec::new(),
        }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::polynomial(Polynomial::constant(c))
    }

    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    /// `z^n`.
    pub fn power(n: usize) -> Self {
        Self::polynomial(Polynomial::monomial(n))
    }

    /// `z^{-n}`.
    pub fn inverse_power(n: u32) -> Self {
        RationalFunction {
            numerator: Polynomial::constant(Complex64::new(1.0, 0.0)),
            factors: vec![PoleFactor {
                pole: Complex64::new(0.0, 0.0),
                mult: n,
            }],
        }
        .pruned()
    }

    /// `1 / (z - a)^mult`.
    pub fn pole_power(a: Complex64, mult: u32) -> Self {
        RationalFunction {
            numerator: Polynomial::constant(Complex64::new(1.0, 0.0)),
            factors: vec![PoleFactor { pole: a, mult }],
        }
        .pruned()
    }

    fn pruned(mut self) -> Self {
        self.factors.retain(|f| f.mult > 0);
        self
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.numerator
    }

    pub fn factors(&self) -> &[PoleFactor] {
        &self.factors
    }

    pub fn poles(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.factors.iter().map(|f| f.pole)
    }

    /// The denominator expanded into a polynomial.
    pub fn denominator(&self) -> Polynomial {
        self.factors
            .iter()
            .fold(Polynomial::constant(Complex64::new(1.0, 0.0)), |acc, f| {
                acc.mul(&Polynomial::linear(f.pole).pow(f.mult))
            })
    }

    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        self.evaluate_local(z, Complex64::new(0.0, 0.0))
    }

    /// Evaluates at `base + offset`, forming each `z - pole` as
    /// `(base - pole) + offset`. When `base` is itself a pole the distance is
    /// then exact, which matters on tiny circles around it.
    pub fn evaluate_local(&self, base: Complex64, offset: Complex64) -> Result<Complex64> {
        let z = base + offset;
        let mut value = self.numerator.eval(z);
        for f in &self.factors {
            let d = (base - f.pole) + offset;
            let dist = d.norm();
            if dist < POLE_GUARD {
                return Err(Error::PoleEvaluation {
                    z: z.to_string(),
                    pole: f.pole.to_string(),
                    distance: dist,
                });
            }
            value /= d.powu(f.mult);
        }
        Ok(value)
    }

    /// Exact derivative: `(p' S - p Σ_j m_j S / (z - a_j)) / Π (z - a_j)^{m_j + 1}`
    /// with `S = Π (z - a_j)`.
    pub fn derivative(&self) -> RationalFunction {
        if self.factors.is_empty() {
            return Self::polynomial(self.numerator.derivative());
        }
        let one = Polynomial::constant(Complex64::new(1.0, 0.0));
        let linears: Vec<Polynomial> = self.factors.iter().map(|f| Polynomial::linear(f.pole)).collect();
        let squarefree = linears.iter().fold(one.clone(), |acc, l| acc.mul(l));
        let weighted = self.factors.iter().enumerate().fold(Polynomial::zero(), |acc, (j, f)| {
            let others = linears
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != j)
                .fold(one.clone(), |p, (_, l)| p.mul(l));
            acc.add(&others.scale(Complex64::new(f.mult as f64, 0.0)))
        });
        let numerator = self
            .numerator
            .derivative()
            .mul(&squarefree)
            .add(&self.numerator.mul(&weighted).scale(Complex64::new(-1.0, 0.0)));
        RationalFunction {
            numerator,
            factors: self
                .factors
                .iter()
                .map(|f| PoleFactor {
                    pole: f.pole,
                    mult: f.mult + 1,
                })
                .collect(),
        }
    }

    /// Sum over the common denominator (maximum multiplicity per pole).
    pub fn add(&self, other: &RationalFunction) -> RationalFunction {
        let mut common = self.factors.clone();
        for f in &other.factors {
            merge_factors(&mut common, *f, u32::max);
        }
        let lift = |r: &RationalFunction| {
            common.iter().fold(r.numerator.clone(), |acc, c| {
                let own = r.factors.iter().find(|f| f.pole == c.pole).map_or(0, |f| f.mult);
                acc.mul(&Polynomial::linear(c.pole).pow(c.mult - own))
            })
        };
        RationalFunction {
            numerator: lift(self).add(&lift(other)),
            factors: common,
        }
    }

    /// Product; multiplicities add at coincident poles.
    pub fn multiply(&self, other: &RationalFunction) -> RationalFunction {
        let mut factors = self.factors.clone();
        for f in &other.factors {
            merge_factors(&mut factors, *f, |a, b| a + b);
        }
        RationalFunction {
            numerator: self.numerator.mul(&other.numerator),
            factors,
        }
    }

    pub fn scale(&self, c: Complex64) -> RationalFunction {
        RationalFunction {
            numerator: self.numerator.scale(c),
            factors: self.factors.clone(),
        }
    }

    /// Smallest distance from a pole to `X`; `f64::MAX` without poles.
    /// Positive exactly when the function belongs to `R_0(X)`.
    pub fn pole_clearance(&self, cheese: &SwissCheese) -> f64 {
        self.poles().map(|p| cheese.distance_to_x(p)).fold(f64::MAX, f64::min)
    }

    /// Smallest distance from a pole to the circle `|z| = radius`.
    pub fn circle_clearance(&self, center: Complex64, radius: f64) -> f64 {
        self.poles()
            .map(|p| ((p - center).norm() - radius).abs())
            .fold(f64::MAX, f64::min)
    }

    pub fn to_json(&self) -> Result<String> {
        json::to_string_compact(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Where [`random_member`] may put poles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    /// Inside a deleted disc with probability [`INSIDE_PROBABILITY`], else outside.
    Mixed,
    InsideOnly,
    OutsideOnly,
}

/// Chance that a pole goes into a deleted disc under [`Placement::Mixed`].
pub const INSIDE_PROBABILITY: f64 = 0.7;

/// Parameters of the random test family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub max_degree: usize,
    pub max_poles: usize,
    /// Outside poles satisfy `|p| > 1 + min_clearance`.
    pub min_clearance: f64,
    pub placement: Placement,
}

impl FamilySpec {
    pub fn new(max_degree: usize, max_poles: usize, min_clearance: f64) -> Self {
        FamilySpec {
            max_degree,
            max_poles,
            min_clearance,
            placement: Placement::Mixed,
        }
    }

    pub fn with_placement(mut self, placement: Placement) -> Self {
        self.placement = placement;
        self
    }

    /// Lower bound on the pole clearance of every member generated on `cheese`.
    pub fn guaranteed_clearance(&self, cheese: &SwissCheese) -> f64 {
        match (self.placement, cheese.smallest_radius()) {
            (Placement::OutsideOnly, _) | (_, None) => self.min_clearance,
            (_, Some(r)) => self.min_clearance.min(r),
        }
    }
}

fn unit_box(rng: &mut CheeseRng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))
}

/// Draws a member of `R_0(X)` for the test sweeps.
///
/// Numerator degree and coefficients (in the unit box) are uniform. A pole
/// placed inside a deleted disc sits at its center, each disc used at most
/// once per function, so its clearance is the full radius. Outside poles
/// have modulus in `(1 + min_clearance, 2.5 + min_clearance]`. Multiplicities
/// are 1 or 2.
pub fn random_member(cheese: &SwissCheese, spec: &FamilySpec, seed: u64) -> Result<RationalFunction> {
    if !(spec.min_clearance > 0.0) {
        return Err(Error::InvalidArgument("min_clearance must be positive".into()));
    }
    let discs: Vec<_> = cheese.discs().copied().collect();
    if spec.placement == Placement::InsideOnly && spec.max_poles > 0 && discs.is_empty() {
        return Err(Error::GenerationFailure(
            "inside-only placement requested but the cheese has no deleted discs".into(),
        ));
    }
    let mut rng = rng_from_seed(seed);

    let degree = rng.gen_range(0..=spec.max_degree);
    let mut coeffs: Vec<Complex64> = (0..=degree).map(|_| unit_box(&mut rng)).collect();
    if coeffs[degree] == Complex64::new(0.0, 0.0) {
        coeffs[degree] = Complex64::new(1.0, 0.0);
    }

    let mut order: Vec<usize> = (0..discs.len()).collect();
    order.shuffle(&mut rng);
    let mut unused = order.into_iter();

    let pole_count = rng.gen_range(0..=spec.max_poles);
    let mut factors = Vec::with_capacity(pole_count);
    for _ in 0..pole_count {
        let inside = match spec.placement {
            Placement::InsideOnly => true,
            Placement::OutsideOnly => false,
            Placement::Mixed => rng.gen_bool(INSIDE_PROBABILITY),
        };
        let pole = if inside {
            match unused.next() {
                Some(k) => discs[k].center,
                None if spec.placement == Placement::InsideOnly => break,
                None => outside_pole(&mut rng, spec.min_clearance),
            }
        } else {
            outside_pole(&mut rng, spec.min_clearance)
        };
        let mult = rng.gen_range(1..=2);
        if factors.iter().all(|f: &PoleFactor| f.pole != pole) {
            factors.push(PoleFactor { pole, mult });
        }
    }
    RationalFunction::new(Polynomial::new(coeffs), factors)
}

fn outside_pole(rng: &mut CheeseRng, min_clearance: f64) -> Complex64 {
    let u: f64 = rng.gen();
    let modulus = 1.0 + min_clearance + 1.5 * (1.0 - u);
    let angle = rng.gen_range(0.0..std::f64::consts::TAU);
    Complex64::from_polar(modulus, angle)
}
