//! Swiss cheese sets: the closed unit disc with finitely many disjoint open
//! discs removed, organised by the annulus that hosts them.
//!
//! Annulus `n` owns the discs placed inside the closed disc of radius
//! `R_n = (n - 1) / n` and has a radius budget `C (1 - R_n)^2 / (2^(n+3) π)`.
//! Since every disc of annulus `n` is at distance at least `1 - R_n` from the
//! unit circle, the certificate `4π Σ r / s²` of a generated cheese never
//! exceeds `C / 2`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json;
use crate::rng::{rng_from_seed, CheeseRng};

/// Fraction of each annulus budget actually spent by the generator.
pub const BUDGET_SAFETY: f64 = 0.9;
/// Center draws per radius level before the radius is halved.
pub const PLACEMENT_ATTEMPTS: usize = 64;
/// Radius halvings before placement gives up.
pub const MAX_HALVINGS: usize = 8;

/// An open disc removed from the closed unit disc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "DiscRepr", into = "DiscRepr")]
pub struct Disc {
    pub center: Complex64,
    pub radius: f64,
}

#[derive(Serialize, Deserialize)]
struct DiscRepr {
    re: f64,
    im: f64,
    r: f64,
}

impl From<DiscRepr> for Disc {
    fn from(d: DiscRepr) -> Self {
        Disc {
            center: Complex64::new(d.re, d.im),
            radius: d.r,
        }
    }
}

impl From<Disc> for DiscRepr {
    fn from(d: Disc) -> Self {
        DiscRepr {
            re: d.center.re,
            im: d.center.im,
            r: d.radius,
        }
    }
}

impl Disc {
    /// Checked constructor: the radius is positive and the closed disc sits
    /// inside the open unit disc.
    pub fn new(center: Complex64, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !center.re.is_finite() || !center.im.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "disc radius must be positive and center finite, got center {center}, radius {radius}"
            )));
        }
        if center.norm() + radius >= 1.0 {
            return Err(Error::InvalidArgument(format!(
                "closed disc at {center} with radius {radius} is not inside the open unit disc"
            )));
        }
        Ok(Disc { center, radius })
    }

    /// Distance from the disc to the unit circle, `1 - (|center| + radius)`.
    pub fn gap_to_circle(&self) -> f64 {
        1.0 - (self.center.norm() + self.radius)
    }

    /// Whether `p` lies in the open disc.
    pub fn contains(&self, p: Complex64) -> bool {
        (p - self.center).norm() < self.radius
    }

    /// Whether the closed discs are disjoint.
    pub fn closure_disjoint(&self, other: &Disc) -> bool {
        (self.center - other.center).norm() > self.radius + other.radius
    }
}

/// The discs hosted by annulus `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnulusRecord {
    pub n: u32,
    #[serde(rename = "R_n")]
    pub r_n: f64,
    pub budget: f64,
    pub discs: Vec<Disc>,
}

impl AnnulusRecord {
    pub fn radius_sum(&self) -> f64 {
        self.discs.iter().map(|d| d.radius).sum()
    }
}

/// A finite Swiss cheese `X = closed unit disc minus the union of the discs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwissCheese {
    #[serde(rename = "C")]
    pub c: f64,
    pub seed: u64,
    pub annuli: Vec<AnnulusRecord>,
}

/// `R_n = (n - 1) / n`.
pub fn annulus_radius(n: u32) -> f64 {
    (n as f64 - 1.0) / n as f64
}

/// Radius budget of annulus `n` for the constant `c`.
pub fn annulus_budget(c: f64, n: u32) -> Result<f64> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::InvalidArgument(format!("C must be positive, got {c}")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("annulus index must be >= 1".into()));
    }
    let gap = 1.0 - annulus_radius(n);
    Ok(c * gap * gap / (2f64.powi(n as i32 + 3) * PI))
}

fn sample_in_disc(rng: &mut CheeseRng, reach: f64) -> Complex64 {
    loop {
        let x = rng.gen_range(-reach..reach);
        let y = rng.gen_range(-reach..reach);
        if x * x + y * y < reach * reach {
            return Complex64::new(x, y);
        }
    }
}

/// Builds a cheese with `annuli_count` annuli and `discs_per_annulus` discs
/// in every annulus except the first, whose host region is a single point.
///
/// Centers are drawn uniformly from the open disc of radius `R_n - ρ` with
/// `ρ = 0.9 budget / discs_per_annulus`. A disc that collides with an
/// earlier one is redrawn up to [`PLACEMENT_ATTEMPTS`] times; after that `ρ`
/// is halved (and stays halved for the rest of the annulus), at most
/// [`MAX_HALVINGS`] times.
pub fn generate_cheese(c: f64, annuli_count: u32, discs_per_annulus: usize, seed: u64) -> Result<SwissCheese> {
    if annuli_count == 0 || discs_per_annulus == 0 {
        return Err(Error::InvalidArgument(
            "annuli_count and discs_per_annulus must be positive".into(),
        ));
    }
    let mut rng = rng_from_seed(seed);
    let mut placed: Vec<Disc> = Vec::new();
    let mut annuli = Vec::with_capacity(annuli_count as usize);

    for n in 1..=annuli_count {
        let r_n = annulus_radius(n);
        let budget = annulus_budget(c, n)?;
        let mut discs = Vec::new();
        if n >= 2 {
            let mut rho = BUDGET_SAFETY * budget / discs_per_annulus as f64;
            for k in 0..discs_per_annulus {
                let disc = place_disc(&mut rng, r_n, &mut rho, &placed)
                    .ok_or(Error::ConstructionFailure { annulus: n, disc: k })?;
                placed.push(disc);
                discs.push(disc);
            }
        }
        annuli.push(AnnulusRecord { n, r_n, budget, discs });
    }
    Ok(SwissCheese { c, seed, annuli })
}

fn place_disc(rng: &mut CheeseRng, r_n: f64, rho: &mut f64, placed: &[Disc]) -> Option<Disc> {
    for level in 0..=MAX_HALVINGS {
        if level > 0 {
            *rho *= 0.5;
        }
        let reach = r_n - *rho;
        if !(reach > 0.0) {
            continue;
        }
        for _ in 0..PLACEMENT_ATTEMPTS {
            let candidate = Disc {
                center: sample_in_disc(rng, reach),
                radius: *rho,
            };
            if placed.iter().all(|d| d.closure_disjoint(&candidate)) {
                return Some(candidate);
            }
        }
    }
    None
}

/// Which invariant a [`Violation`] breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Invariant {
    PositiveConstant,
    PositiveRadius,
    InsideUnitDisc,
    InsideAnnulus,
    AnnulusRadius,
    AnnulusBudget,
    RadiusSum,
    Disjoint,
    CircleInX,
}

/// One broken invariant, naming the flat indices of the discs involved
/// (discs enumerated annulus by annulus).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub invariant: Invariant,
    pub discs: Vec<usize>,
    pub annulus: Option<u32>,
    pub message: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}: {}", self.invariant, self.message)
    }
}

impl SwissCheese {
    /// A cheese without deleted discs, i.e. the closed unit disc.
    pub fn empty(c: f64, seed: u64) -> Self {
        SwissCheese {
            c,
            seed,
            annuli: Vec::new(),
        }
    }

    pub fn discs(&self) -> impl Iterator<Item = &Disc> + '_ {
        self.annuli.iter().flat_map(|a| a.discs.iter())
    }

    pub fn disc_count(&self) -> usize {
        self.annuli.iter().map(|a| a.discs.len()).sum()
    }

    pub fn smallest_radius(&self) -> Option<f64> {
        self.discs().map(|d| d.radius).reduce(f64::min)
    }

    /// `Σ r / s²` over the deleted discs, `s` being the distance to the unit circle.
    pub fn lemma21_sum(&self) -> f64 {
        self.discs()
            .map(|d| {
                let s = d.gap_to_circle();
                d.radius / (s * s)
            })
            .fold(0.0, |acc, t| acc + t)
    }

    /// `4π Σ r / s²`: the constant bounding `|∫_T f' g dz| / (|f|_X |g|_X)`.
    pub fn certified_bound(&self) -> f64 {
        4.0 * PI * self.lemma21_sum()
    }

    /// Membership in `X`.
    pub fn contains(&self, p: Complex64) -> bool {
        p.norm() <= 1.0 && !self.discs().any(|d| d.contains(p))
    }

    /// Distance from `p` to `X`. Requires disjoint discs: the boundary of
    /// each deleted disc then lies in `X`.
    pub fn distance_to_x(&self, p: Complex64) -> f64 {
        let modulus = p.norm();
        if modulus > 1.0 {
            return modulus - 1.0;
        }
        self.discs()
            .find(|d| d.contains(p))
            .map_or(0.0, |d| d.radius - (p - d.center).norm())
    }

    /// Lists every broken invariant; empty iff the cheese is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if !(self.c > 0.0) || !self.c.is_finite() {
            out.push(Violation {
                invariant: Invariant::PositiveConstant,
                discs: vec![],
                annulus: None,
                message: format!("C = {} is not a positive number", self.c),
            });
        }

        let mut flat: Vec<(usize, u32, Disc)> = Vec::new();
        for annulus in &self.annuli {
            let n = annulus.n;
            if n == 0 || annulus.r_n != annulus_radius(n) {
                out.push(Violation {
                    invariant: Invariant::AnnulusRadius,
                    discs: vec![],
                    annulus: Some(n),
                    message: format!("R_n = {} but (n-1)/n = {}", annulus.r_n, annulus_radius(n.max(1))),
                });
            }
            if let Ok(expected) = annulus_budget(self.c, n) {
                if (annulus.budget - expected).abs() > 1e-12 * expected {
                    out.push(Violation {
                        invariant: Invariant::AnnulusBudget,
                        discs: vec![],
                        annulus: Some(n),
                        message: format!(
                            "budget {} differs from C(1-R_n)^2/(2^(n+3)π) = {expected}",
                            annulus.budget
                        ),
                    });
                }
            }
            let first = flat.len();
            for disc in &annulus.discs {
                let index = flat.len();
                flat.push((index, n, *disc));
                if !(disc.radius > 0.0) {
                    out.push(Violation {
                        invariant: Invariant::PositiveRadius,
                        discs: vec![index],
                        annulus: Some(n),
                        message: format!("disc {index} has radius {}", disc.radius),
                    });
                }
                let reach = disc.center.norm() + disc.radius;
                if !(reach < 1.0) {
                    out.push(Violation {
                        invariant: Invariant::InsideUnitDisc,
                        discs: vec![index],
                        annulus: Some(n),
                        message: format!("disc {index} has |center| + radius = {reach}"),
                    });
                }
                if reach > annulus.r_n {
                    out.push(Violation {
                        invariant: Invariant::InsideAnnulus,
                        discs: vec![index],
                        annulus: Some(n),
                        message: format!("disc {index} reaches {reach} beyond R_n = {}", annulus.r_n),
                    });
                }
                // T ⊆ X, checked on its own: the nearest point of T to the center is at distance 1 - |center|.
                if !(1.0 - disc.center.norm() > disc.radius) {
                    out.push(Violation {
                        invariant: Invariant::CircleInX,
                        discs: vec![index],
                        annulus: Some(n),
                        message: format!("disc {index} meets the unit circle"),
                    });
                }
            }
            if !(annulus.radius_sum() < annulus.budget) {
                out.push(Violation {
                    invariant: Invariant::RadiusSum,
                    discs: (first..flat.len()).collect(),
                    annulus: Some(n),
                    message: format!(
                        "radius sum {} is not below the budget {}",
                        annulus.radius_sum(),
                        annulus.budget
                    ),
                });
            }
        }

        for (i, a) in flat.iter().enumerate() {
            for b in &flat[i + 1..] {
                if !a.2.closure_disjoint(&b.2) {
                    out.push(Violation {
                        invariant: Invariant::Disjoint,
                        discs: vec![a.0, b.0],
                        annulus: None,
                        message: format!("discs {} and {} overlap", a.0, b.0),
                    });
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        json::to_string_pretty(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// SHA-256 of the canonical JSON serialization.
    pub fn digest(&self) -> Result<String> {
        Ok(json::digest(self.to_json()?.as_bytes()))
    }
}
