//! Trapezoidal quadrature on circles with node doubling, plus a residue
//! oracle for `∫_T f' g dz` that never touches quadrature.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::RationalFunction;

/// Node schedule and stopping rule for [`circle_integral`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Power of two, at least 16.
    pub initial_nodes: usize,
    pub max_doublings: u32,
    /// Stop once two successive estimates differ by at most
    /// `rel_tolerance * (1 + |value|)`. At least `1e-14`.
    pub rel_tolerance: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            initial_nodes: 32,
            max_doublings: 12,
            rel_tolerance: 1e-11,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.initial_nodes < 16 || !self.initial_nodes.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "initial_nodes must be a power of two >= 16, got {}",
                self.initial_nodes
            )));
        }
        if self.max_doublings == 0 {
            return Err(Error::InvalidArgument("max_doublings must be positive".into()));
        }
        if !(self.rel_tolerance >= 1e-14) {
            return Err(Error::InvalidArgument(format!(
                "rel_tolerance must be >= 1e-14, got {}",
                self.rel_tolerance
            )));
        }
        Ok(())
    }

    pub fn max_nodes(&self) -> usize {
        self.initial_nodes << self.max_doublings
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Ccw,
    Cw,
}

/// Outcome of an adaptive integral. Non-convergence is reported, not raised.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "IntegralRepr", into = "IntegralRepr")]
pub struct IntegralResult {
    pub value: Complex64,
    pub nodes_used: usize,
    pub est_error: f64,
    pub converged: bool,
}

#[derive(Serialize, Deserialize)]
struct IntegralRepr {
    re: f64,
    im: f64,
    nodes: usize,
    err: f64,
    converged: bool,
}

impl From<IntegralRepr> for IntegralResult {
    fn from(r: IntegralRepr) -> Self {
        IntegralResult {
            value: Complex64::new(r.re, r.im),
            nodes_used: r.nodes,
            est_error: r.err,
            converged: r.converged,
        }
    }
}

impl From<IntegralResult> for IntegralRepr {
    fn from(r: IntegralResult) -> Self {
        IntegralRepr {
            re: r.value.re,
            im: r.value.im,
            nodes: r.nodes_used,
            err: r.est_error,
            converged: r.converged,
        }
    }
}

impl IntegralResult {
    /// The value, or an error carrying the diagnostics if it did not converge.
    pub fn require(self, what: &str) -> Result<Complex64> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(Error::NonConvergence(format!(
                "{what}: estimate {} after {} nodes, successive difference {:e}",
                self.value, self.nodes_used, self.est_error
            )))
        }
    }
}

/// `∫_0^{2π} g(θ) dθ` for a `2π`-periodic `g`, by the trapezoid rule with
/// nested node doubling. Sums run in node order, so results are reproducible.
pub fn periodic_integral<G>(mut g: G, spec: &QuadratureSpec) -> Result<IntegralResult>
where
    G: FnMut(f64) -> Result<Complex64>,
{
    spec.validate()?;
    let mut nodes = spec.initial_nodes;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..nodes {
        sum += g(TAU * k as f64 / nodes as f64)?;
    }
    let mut value = sum * (TAU / nodes as f64);
    let mut est_error = f64::INFINITY;
    for _ in 0..spec.max_doublings {
        let finer = 2 * nodes;
        for k in (1..finer).step_by(2) {
            sum += g(TAU * k as f64 / finer as f64)?;
        }
        nodes = finer;
        let next = sum * (TAU / nodes as f64);
        est_error = (next - value).norm();
        value = next;
        if est_error <= spec.rel_tolerance * (1.0 + value.norm()) {
            return Ok(IntegralResult {
                value,
                nodes_used: nodes,
                est_error,
                converged: true,
            });
        }
    }
    Ok(IntegralResult {
        value,
        nodes_used: nodes,
        est_error,
        converged: false,
    })
}

/// Contour integral over the circle `center + radius e^{iθ}`.
///
/// The integrand receives the offset `radius e^{iθ}` from the center rather
/// than the point itself, so callers can form differences to the center
/// exactly (see [`RationalFunction::evaluate_local`]).
pub fn circle_integral_local<H>(
    mut h: H,
    radius: f64,
    orientation: Orientation,
    spec: &QuadratureSpec,
) -> Result<IntegralResult>
where
    H: FnMut(Complex64) -> Result<Complex64>,
{
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
    }
    let i = Complex64::new(0.0, 1.0);
    let mut result = periodic_integral(
        |theta| {
            let offset = Complex64::from_polar(radius, theta);
            Ok(h(offset)? * i * offset)
        },
        spec,
    )?;
    if orientation == Orientation::Cw {
        result.value = -result.value;
    }
    Ok(result)
}

/// `∮ h(z) dz` over the circle of the given center and radius.
pub fn circle_integral<H>(
    mut h: H,
    center: Complex64,
    radius: f64,
    orientation: Orientation,
    spec: &QuadratureSpec,
) -> Result<IntegralResult>
where
    H: FnMut(Complex64) -> Result<Complex64>,
{
    circle_integral_local(|offset| h(center + offset), radius, orientation, spec)
}

/// `∫_T f'(z) g(z) dz` by quadrature on the unit circle.
pub fn pairing_t(f: &RationalFunction, g: &RationalFunction, spec: &QuadratureSpec) -> Result<IntegralResult> {
    let df = f.derivative();
    circle_integral(
        |z| Ok(df.evaluate(z)? * g.evaluate(z)?),
        Complex64::new(0.0, 0.0),
        1.0,
        Orientation::Ccw,
        spec,
    )
}

/// Poles closer than this to the unit circle make the oracle inapplicable.
pub const ORACLE_CIRCLE_GUARD: f64 = 1e-9;

/// `∫_T f'(z) g(z) dz` as `2πi` times the residues of `f' g` inside the disc.
///
/// Each residue is read off the Laurent expansion at the pole: the numerator
/// is re-expanded in powers of `(z - a)`, every other denominator factor is
/// expanded as a power series there, and the coefficient of `(z - a)^{m-1}`
/// of the product is the residue.
///
/// The residues of a rational function sum to zero over the sphere, so the
/// inside sum also equals minus the residue at infinity minus the outside
/// residues. Both sums are formed and the one built from smaller terms is
/// returned.
pub fn residue_oracle_t(f: &RationalFunction, g: &RationalFunction) -> Result<Complex64> {
    let integrand = f.derivative().multiply(g);
    for pole in integrand.poles() {
        let distance = (pole.norm() - 1.0).abs();
        if distance <= ORACLE_CIRCLE_GUARD {
            return Err(Error::OracleInapplicable {
                pole: pole.to_string(),
                distance,
            });
        }
    }
    let zero = Complex64::new(0.0, 0.0);
    let (mut inside, mut inside_mass) = (zero, 0.0);
    let at_infinity = residue_at_infinity(&integrand);
    let (mut outside, mut outside_mass) = (-at_infinity, at_infinity.norm());
    for fac in integrand.factors() {
        let r = residue(&integrand, fac.pole, fac.mult as usize);
        if fac.pole.norm() < 1.0 {
            inside += r;
            inside_mass += r.norm();
        } else {
            outside -= r;
            outside_mass += r.norm();
        }
    }
    let total = if outside_mass < inside_mass { outside } else { inside };
    Ok(Complex64::new(0.0, 2.0 * PI) * total)
}

fn residue(r: &RationalFunction, pole: Complex64, mult: usize) -> Complex64 {
    let zero = Complex64::new(0.0, 0.0);
    let mut series: Vec<Complex64> = r.numerator().taylor_at(pole);
    series.resize(mult.max(series.len()), zero);
    series.truncate(mult);
    for other in r.factors().iter().filter(|f| f.pole != pole) {
        // (t - d)^{-k} = (-d)^{-k} Σ_j C(k+j-1, j) (t/d)^j,  d = b - a
        let d = other.pole - pole;
        let k = other.mult as usize;
        let lead = (-d).powi(-(k as i32));
        let mut expansion = Vec::with_capacity(mult);
        let mut binom = 1.0;
        let mut dpow = Complex64::new(1.0, 0.0);
        for j in 0..mult {
            if j > 0 {
                binom *= (k + j - 1) as f64 / j as f64;
                dpow /= d;
            }
            expansion.push(lead * binom * dpow);
        }
        series = (0..mult)
            .map(|n| (0..=n).map(|j| series[j] * expansion[n - j]).sum())
            .collect();
    }
    series[mult - 1]
}

/// Minus the coefficient of `1/z` in the expansion of `r` about infinity.
fn residue_at_infinity(r: &RationalFunction) -> Complex64 {
    let zero = Complex64::new(0.0, 0.0);
    let Some(d) = r.numerator().degree() else {
        return zero;
    };
    let m: usize = r.factors().iter().map(|f| f.mult as usize).sum();
    // r = w^{m-d} N(1/w) w^d / Π (1 - a w)^k,  w = 1/z
    if d + 1 < m {
        return zero;
    }
    let want = d + 1 - m;
    let coeffs = r.numerator().coeffs();
    let mut series: Vec<Complex64> = (0..=want).map(|j| if j <= d { coeffs[d - j] } else { zero }).collect();
    for fac in r.factors() {
        let k = fac.mult as usize;
        let mut expansion = Vec::with_capacity(want + 1);
        let mut term = Complex64::new(1.0, 0.0);
        for j in 0..=want {
            if j > 0 {
                term *= fac.pole * ((k + j - 1) as f64 / j as f64);
            }
            expansion.push(term);
        }
        series = (0..=want)
            .map(|n| (0..=n).map(|j| series[j] * expansion[n - j]).sum())
            .collect();
    }
    -series[want]
}

/// `∫_0^{2π} |f(e^{iθ})| dθ`, the `L¹(T)` norm with arc-length measure.
pub fn l1_norm_t(f: &RationalFunction, spec: &QuadratureSpec) -> Result<IntegralResult> {
    periodic_integral(
        |theta| {
            Ok(Complex64::new(
                f.evaluate(Complex64::from_polar(1.0, theta))?.norm(),
                0.0,
            ))
        },
        spec,
    )
}
