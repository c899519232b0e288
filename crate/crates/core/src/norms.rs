//! Sup-norm estimates on `T` and on `X`.
//!
//! A member of `R_0(X)` is analytic on a neighbourhood of the (finite) cheese,
//! so by the maximum principle its modulus peaks on `∂X`: the unit circle
//! together with the deleted circles. Each circle is sampled on an
//! equispaced grid, the best grid maxima are polished with a golden-section
//! search, and the grid is doubled until the maximum settles. The estimate
//! approaches the true norm from below.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::SwissCheese;
use crate::json;
use crate::quadrature::QuadratureSpec;
use crate::rational::RationalFunction;

/// Relative change between refinements below which a maximum is accepted.
pub const NORM_REL_CHANGE: f64 = 1e-10;
const POLISHED_CANDIDATES: usize = 3;
const GOLDEN_STEPS: usize = 80;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    #[serde(rename = "argmax", with = "json::complex_pair")]
    pub arg_max: Complex64,
    pub samples: usize,
    pub converged: bool,
}

/// Maximum of `|f(center + radius e^{iθ})|`, with `f` evaluated through
/// [`RationalFunction::evaluate_local`].
pub fn sup_on_circle(
    f: &RationalFunction,
    center: Complex64,
    radius: f64,
    spec: &QuadratureSpec,
) -> Result<NormEstimate> {
    spec.validate()?;
    let modulus =
        |theta: f64| -> Result<f64> { Ok(f.evaluate_local(center, Complex64::from_polar(radius, theta))?.norm()) };

    let mut best_theta = 0.0;
    let mut best = modulus(0.0)?;
    let mut previous = f64::NAN;
    let mut nodes = spec.initial_nodes;
    let mut samples = 0;
    for _ in 0..=spec.max_doublings {
        let step = TAU / nodes as f64;
        let values: Vec<f64> = (0..nodes).map(|k| modulus(step * k as f64)).collect::<Result<_>>()?;
        samples += nodes;

        let mut peaks: Vec<usize> = (0..nodes)
            .filter(|&k| {
                let v = values[k];
                v >= values[(k + nodes - 1) % nodes] && v >= values[(k + 1) % nodes]
            })
            .collect();
        peaks.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
        for &k in peaks.iter().take(POLISHED_CANDIDATES) {
            let centre = step * k as f64;
            let (theta, value) = golden_max(&modulus, centre - step, centre + step)?;
            samples += GOLDEN_STEPS + 2;
            for (t, v) in [(centre, values[k]), (theta, value)] {
                if v > best {
                    best = v;
                    best_theta = t;
                }
            }
        }

        if previous.is_finite() && (best - previous).abs() <= NORM_REL_CHANGE * best {
            return Ok(estimate(center, radius, best_theta, best, samples, true));
        }
        previous = best;
        nodes *= 2;
    }
    Ok(estimate(center, radius, best_theta, best, samples, false))
}

fn estimate(center: Complex64, radius: f64, theta: f64, value: f64, samples: usize, converged: bool) -> NormEstimate {
    NormEstimate {
        value,
        arg_max: center + Complex64::from_polar(radius, theta),
        samples,
        converged,
    }
}

fn golden_max<F: Fn(f64) -> Result<f64>>(f: &F, mut lo: f64, mut hi: f64) -> Result<(f64, f64)> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - inv_phi * (hi - lo);
    let mut b = lo + inv_phi * (hi - lo);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    for _ in 0..GOLDEN_STEPS {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = f(b)?;
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = f(a)?;
        }
    }
    Ok(if fa >= fb { (a, fa) } else { (b, fb) })
}

/// `|f|_T`.
pub fn sup_norm_t(f: &RationalFunction, spec: &QuadratureSpec) -> Result<NormEstimate> {
    sup_on_circle(f, Complex64::new(0.0, 0.0), 1.0, spec)
}

/// `|f|_X`, the maximum over `T` and every deleted circle, each refined
/// independently.
pub fn sup_norm_x(f: &RationalFunction, cheese: &SwissCheese, spec: &QuadratureSpec) -> Result<NormEstimate> {
    let mut best = sup_norm_t(f, spec)?;
    let mut samples = best.samples;
    let mut converged = best.converged;
    for disc in cheese.discs() {
        let est = sup_on_circle(f, disc.center, disc.radius, spec)?;
        samples += est.samples;
        converged &= est.converged;
        if est.value > best.value {
            best = est;
        }
    }
    best.samples = samples;
    best.converged = converged;
    Ok(best)
}
