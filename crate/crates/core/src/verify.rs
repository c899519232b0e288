//! Seeded verification sweeps and the JSON report they produce.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::derivation::{inputs_digest, Checker, DerivationCheckRecord, Scalar, Tolerances};
use crate::error::{Error, Result};
use crate::geometry::{generate_cheese, SwissCheese, Violation};
use crate::json;
use crate::quadrature::QuadratureSpec;
use crate::rational::{random_member, FamilySpec, RationalFunction};
use crate::rng::{derive_seed, rng_from_seed};

/// Modulus of the `w` points used by the deflection sweep.
pub const DEFLECTION_RADIUS: f64 = 1.5;
/// Largest `n` in the monomial checks.
pub const MONOMIAL_MAX: u32 = 8;

const STREAM_F: u64 = 1;
const STREAM_G: u64 = 2;
const STREAM_TRIPLE: [u64; 3] = [3, 4, 5];
const STREAM_SPLIT: u64 = 6;
const STREAM_FUBINI: [u64; 2] = [7, 8];
const STREAM_DEFLECTION: u64 = 9;
const STREAM_DEFLECTION_W: u64 = 10;
const STREAM_SPLIT_POLY: u64 = 11;

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(rename = "C")]
    pub c: f64,
    pub annuli: u32,
    pub discs_per_annulus: usize,
    pub seed: u64,
    pub sweep_pairs: usize,
    pub sweep_triples: usize,
    pub max_degree: usize,
    pub max_poles: usize,
    pub min_clearance: f64,
    pub rho: f64,
    pub tolerances: Tolerances,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            c: 1.0,
            annuli: 4,
            discs_per_annulus: 3,
            seed: 7,
            sweep_pairs: 200,
            sweep_triples: 100,
            max_degree: 6,
            max_poles: 3,
            min_clearance: 0.02,
            rho: 1.25,
            tolerances: Tolerances::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0) || !self.c.is_finite() {
            return Err(Error::InvalidArgument(format!("C must be positive, got {}", self.c)));
        }
        if self.annuli == 0 || self.discs_per_annulus == 0 {
            return Err(Error::InvalidArgument(
                "annuli and discs_per_annulus must be positive".into(),
            ));
        }
        if !(self.rho > 1.0) {
            return Err(Error::InvalidArgument(format!("rho must exceed 1, got {}", self.rho)));
        }
        if !(self.min_clearance > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "min_clearance must be positive, got {}",
                self.min_clearance
            )));
        }
        Ok(())
    }

    /// Cheese described by this config.
    pub fn generate(&self) -> Result<SwissCheese> {
        self.validate()?;
        generate_cheese(self.c, self.annuli, self.discs_per_annulus, self.seed)
    }

    /// Family for the pair and triple sweeps.
    pub fn family(&self) -> FamilySpec {
        FamilySpec::new(self.max_degree, self.max_poles, self.min_clearance)
    }

    /// Family for the contour sweeps: outside poles sit beyond `1.2 rho`,
    /// well clear of the outer contour `|w| = rho`.
    pub fn contour_family(&self) -> FamilySpec {
        FamilySpec::new(
            self.max_degree,
            self.max_poles,
            self.min_clearance.max(1.2 * self.rho - 1.0),
        )
    }

    /// Number of functions in each of the contour sweeps.
    pub fn contour_count(&self) -> usize {
        self.sweep_pairs.div_ceil(4)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub records: usize,
    pub failures: usize,
    pub max_defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub config: RunConfig,
    pub cheese_digest: String,
    pub certified_bound: f64,
    pub violations: Vec<Violation>,
    pub checks: BTreeMap<String, Vec<DerivationCheckRecord>>,
    pub summary: BTreeMap<String, CheckSummary>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// Wall-clock seconds per phase; only present when requested, so that
    /// default reports are byte-for-byte reproducible.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
}

impl VerificationReport {
    fn assemble(
        config: &RunConfig,
        cheese: &SwissCheese,
        records: Vec<DerivationCheckRecord>,
        notes: Vec<String>,
        timings: Option<BTreeMap<String, f64>>,
    ) -> Result<Self> {
        let mut checks: BTreeMap<String, Vec<DerivationCheckRecord>> = BTreeMap::new();
        for r in records {
            checks.entry(r.check_name.clone()).or_default().push(r);
        }
        let summary: BTreeMap<String, CheckSummary> = checks
            .iter()
            .map(|(name, rs)| {
                (
                    name.clone(),
                    CheckSummary {
                        records: rs.len(),
                        failures: rs.iter().filter(|r| !r.pass).count(),
                        max_defect: rs.iter().map(|r| r.defect).fold(0.0, f64::max),
                    },
                )
            })
            .collect();
        let pass = checks.values().flatten().all(|r| r.pass);
        Ok(VerificationReport {
            config: config.clone(),
            cheese_digest: cheese.digest()?,
            certified_bound: cheese.certified_bound(),
            violations: cheese.validate(),
            checks,
            summary,
            pass,
            notes,
            timings,
        })
    }

    pub fn failures(&self) -> impl Iterator<Item = &DerivationCheckRecord> + '_ {
        self.checks.values().flatten().filter(|r| !r.pass)
    }

    pub fn to_json(&self) -> Result<String> {
        json::to_string_pretty(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

fn settle(name: &str, digest: impl FnOnce() -> String, result: Result<DerivationCheckRecord>) -> DerivationCheckRecord {
    result.unwrap_or_else(|e| DerivationCheckRecord::aborted(name, digest(), &e))
}

fn renamed(mut r: DerivationCheckRecord, name: &str) -> DerivationCheckRecord {
    r.check_name = name.to_string();
    r
}

fn member(cheese: &SwissCheese, family: &FamilySpec, seed: u64, stream: u64, i: usize) -> Result<RationalFunction> {
    random_member(cheese, family, derive_seed(derive_seed(seed, stream), i as u64))
}

/// Checks that do not depend on random functions.
pub fn structural_checks(cheese: &SwissCheese, checker: &Checker) -> Vec<DerivationCheckRecord> {
    let cheese_digest = cheese.digest().unwrap_or_default();
    let violations = cheese.validate();
    let mut out = vec![DerivationCheckRecord::new(
        "validate",
        violations.len() as f64,
        0.0,
        violations.len() as f64,
        0.0,
        cheese_digest.clone(),
    )];

    let certificate = cheese.certified_bound();
    let half_c = cheese.c / 2.0;
    out.push(
        DerivationCheckRecord::new(
            "budget_certificate",
            certificate,
            half_c,
            (certificate - half_c).max(0.0),
            0.0,
            cheese_digest,
        )
        .with("lemma_sum", cheese.lemma21_sum()),
    );

    for n in 1..=MONOMIAL_MAX {
        let f = RationalFunction::power(n as usize);
        let g = RationalFunction::inverse_power(n);
        let digest = || inputs_digest(&[&f, &g], "");
        out.push(settle("monomial_pairing", digest, checker.monomial_check(n)));
        let equality = checker.restriction_bound_check(&f, &g).map(|r| {
            let (Scalar::Real(lhs), Scalar::Real(rhs)) = (r.lhs, r.rhs) else {
                unreachable!("restriction records are real")
            };
            let mut eq = DerivationCheckRecord::new(
                "restriction_equality",
                lhs,
                rhs,
                (lhs - rhs).abs(),
                checker.tol.restriction * (1.0 + rhs),
                r.inputs_digest.clone(),
            );
            eq.diagnostics = r.diagnostics;
            eq.with("n", n as f64)
        });
        out.push(settle("restriction_equality", digest, equality));
    }

    match checker.l1_unboundedness_demo(MONOMIAL_MAX, cheese) {
        Ok(rows) => out.extend(rows.iter().flat_map(|row| checker.unboundedness_records(row))),
        Err(e) => out.push(DerivationCheckRecord::aborted("l1_norm", String::new(), &e)),
    }
    out
}

fn pair_records(
    checker: &Checker,
    cheese: &SwissCheese,
    f: &RationalFunction,
    g: &RationalFunction,
) -> Vec<DerivationCheckRecord> {
    let digest = || inputs_digest(&[f, g], "");
    let one = RationalFunction::one();
    vec![
        settle("oracle_agreement", digest, checker.oracle_check(f, g)),
        settle("cyclicity", digest, checker.cyclicity_check(f, g)),
        settle(
            "cyclicity_unit",
            || inputs_digest(&[f, &one], ""),
            checker.cyclicity_check(f, &one).map(|r| renamed(r, "cyclicity_unit")),
        ),
        settle("morris_bound", digest, checker.morris_bound_check(f, g, cheese)),
        settle("restriction_bound", digest, checker.restriction_bound_check(f, g)),
    ]
}

fn generation_failure(e: Error) -> Vec<DerivationCheckRecord> {
    vec![DerivationCheckRecord::aborted("family_generation", String::new(), &e)]
}

/// Runs every sweep on `cheese` and assembles the report.
pub fn run_verification(cheese: &SwissCheese, config: &RunConfig, with_timings: bool) -> Result<VerificationReport> {
    config.validate()?;
    let checker = Checker::new(QuadratureSpec::default(), config.tolerances);
    let family = config.family();
    let contour_family = config.contour_family();
    let seed = config.seed;
    let mut timings = BTreeMap::new();
    let mut records = Vec::new();

    let clock = Instant::now();
    records.extend(structural_checks(cheese, &checker));
    timings.insert("structural".to_string(), clock.elapsed().as_secs_f64());

    let clock = Instant::now();
    let pairs: Vec<Vec<DerivationCheckRecord>> = (0..config.sweep_pairs)
        .into_par_iter()
        .map(|i| {
            let f = member(cheese, &family, seed, STREAM_F, i);
            let g = member(cheese, &family, seed, STREAM_G, i);
            match (f, g) {
                (Ok(f), Ok(g)) => pair_records(&checker, cheese, &f, &g),
                (Err(e), _) | (_, Err(e)) => generation_failure(e),
            }
        })
        .collect();
    records.extend(pairs.into_iter().flatten());
    timings.insert("pairs".to_string(), clock.elapsed().as_secs_f64());

    let clock = Instant::now();
    let triples: Vec<DerivationCheckRecord> = (0..config.sweep_triples)
        .into_par_iter()
        .map(|i| {
            let fs: Result<Vec<_>> = STREAM_TRIPLE
                .iter()
                .map(|&s| member(cheese, &family, seed, s, i))
                .collect();
            match fs {
                Ok(fs) => settle(
                    "leibniz",
                    || inputs_digest(&[&fs[0], &fs[1], &fs[2]], ""),
                    checker.leibniz_check(&fs[0], &fs[1], &fs[2]),
                ),
                Err(e) => generation_failure(e).remove(0),
            }
        })
        .collect();
    records.extend(triples);
    timings.insert("triples".to_string(), clock.elapsed().as_secs_f64());

    let clock = Instant::now();
    let contour_count = config.contour_count();
    let polynomials = FamilySpec::new(config.max_degree, 0, config.min_clearance);
    let rho = config.rho;
    let contour: Vec<Vec<DerivationCheckRecord>> = (0..contour_count)
        .into_par_iter()
        .map(|i| {
            let mut out = Vec::new();
            match member(cheese, &contour_family, seed, STREAM_SPLIT, i) {
                Ok(f) => out.push(settle(
                    "cauchy_split",
                    || inputs_digest(&[&f], ""),
                    checker.cauchy_split_check(&f, cheese, rho),
                )),
                Err(e) => out.extend(generation_failure(e)),
            }
            if i % 5 == 0 {
                match member(cheese, &polynomials, seed, STREAM_SPLIT_POLY, i) {
                    Ok(p) => {
                        let split = checker.cauchy_split_check(&p, cheese, rho).map(|r| {
                            let h2 = r.diagnostics["max_h2"];
                            DerivationCheckRecord::new(
                                "cauchy_split_polynomial_h2",
                                h2,
                                0.0,
                                h2,
                                checker.tol.split_polynomial_h2,
                                r.inputs_digest.clone(),
                            )
                        });
                        out.push(settle("cauchy_split_polynomial_h2", || inputs_digest(&[&p], ""), split));
                    }
                    Err(e) => out.extend(generation_failure(e)),
                }
            }
            let fg = (
                member(cheese, &contour_family, seed, STREAM_FUBINI[0], i),
                member(cheese, &contour_family, seed, STREAM_FUBINI[1], i),
            );
            match fg {
                (Ok(f), Ok(g)) => out.push(settle(
                    "fubini",
                    || inputs_digest(&[&f, &g], ""),
                    checker.fubini_check(&f, &g, cheese, rho),
                )),
                (Err(e), _) | (_, Err(e)) => out.extend(generation_failure(e)),
            }
            match member(cheese, &family, seed, STREAM_DEFLECTION, i) {
                Ok(g) => {
                    let mut rng = rng_from_seed(derive_seed(derive_seed(seed, STREAM_DEFLECTION_W), i as u64));
                    let w = Complex64::from_polar(DEFLECTION_RADIUS, rng.gen_range(0.0..TAU));
                    out.push(settle(
                        "cauchy_deflection",
                        || inputs_digest(&[&g], ""),
                        checker.cauchy_deflection_check(&g, w, cheese),
                    ));
                }
                Err(e) => out.extend(generation_failure(e)),
            }
            out
        })
        .collect();
    records.extend(contour.into_iter().flatten());
    timings.insert("contour".to_string(), clock.elapsed().as_secs_f64());

    VerificationReport::assemble(config, cheese, records, Vec::new(), with_timings.then_some(timings))
}

/// Runs every check that applies to a single user-supplied pair.
pub fn pair_test(
    cheese: &SwissCheese,
    f: &RationalFunction,
    g: &RationalFunction,
    config: &RunConfig,
) -> Result<VerificationReport> {
    config.validate()?;
    let checker = Checker::new(QuadratureSpec::default(), config.tolerances);
    let mut notes = Vec::new();
    for (name, h) in [("f", f), ("g", g)] {
        if !(h.pole_clearance(cheese) > 0.0) {
            notes.push(format!("{name} has a pole on X and is not in R_0(X)"));
        }
    }
    let mut records = pair_records(&checker, cheese, f, g);
    records.push(settle(
        "leibniz",
        || inputs_digest(&[f, g, f], ""),
        checker.leibniz_check(f, g, f),
    ));
    match checker.cauchy_split_check(f, cheese, config.rho) {
        Err(Error::Precondition(msg)) => notes.push(format!("cauchy_split and fubini skipped: {msg}")),
        split => {
            records.push(settle("cauchy_split", || inputs_digest(&[f], ""), split));
            records.push(settle(
                "fubini",
                || inputs_digest(&[f, g], ""),
                checker.fubini_check(f, g, cheese, config.rho),
            ));
        }
    }
    let w = Complex64::new(DEFLECTION_RADIUS, 0.0);
    match checker.cauchy_deflection_check(g, w, cheese) {
        Err(Error::Precondition(msg)) => notes.push(format!("cauchy_deflection skipped: {msg}")),
        deflection => records.push(settle("cauchy_deflection", || inputs_digest(&[g], ""), deflection)),
    }
    VerificationReport::assemble(config, cheese, records, notes, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> RunConfig {
        RunConfig {
            sweep_pairs: 8,
            sweep_triples: 4,
            ..RunConfig::default()
        }
    }

    #[test]
    fn config_validation() {
        assert!(RunConfig::default().validate().is_ok());
        assert!(RunConfig {
            rho: 1.0,
            ..RunConfig::default()
        }
        .validate()
        .is_err());
        assert!(RunConfig {
            min_clearance: 0.0,
            ..RunConfig::default()
        }
        .validate()
        .is_err());
        assert!(RunConfig {
            annuli: 0,
            ..RunConfig::default()
        }
        .validate()
        .is_err());
        let partial: RunConfig = serde_json::from_str(r#"{"C": 2.0, "seed": 3}"#).unwrap();
        assert_eq!(partial.c, 2.0);
        assert_eq!(partial.sweep_pairs, 200);
        assert!(serde_json::from_str::<RunConfig>(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn small_run_passes_and_is_reproducible() {
        let config = small_config();
        let cheese = config.generate().unwrap();
        let a = run_verification(&cheese, &config, false).unwrap();
        assert!(a.pass, "{:?}", a.failures().collect::<Vec<_>>());
        let b = run_verification(&cheese, &config, false).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        assert_eq!(VerificationReport::from_json(&a.to_json().unwrap()).unwrap(), a);
        assert_eq!(a.checks["cyclicity"].len(), 8);
        assert_eq!(a.checks["leibniz"].len(), 4);
        assert_eq!(a.checks["cauchy_split"].len(), 2);
    }

    #[test]
    fn zero_pairs_leaves_structural_checks() {
        let config = RunConfig {
            sweep_pairs: 0,
            sweep_triples: 0,
            ..RunConfig::default()
        };
        let cheese = config.generate().unwrap();
        let report = run_verification(&cheese, &config, true).unwrap();
        assert!(report.pass);
        let names: Vec<_> = report.checks.keys().cloned().collect();
        assert_eq!(
            names,
            [
                "budget_certificate",
                "l1_norm",
                "monomial_pairing",
                "restriction_equality",
                "sup_norm_monomial",
                "validate"
            ]
        );
        assert!(report.timings.is_some());
    }

    #[test]
    fn overlapping_cheese_fails() {
        let config = RunConfig {
            sweep_pairs: 0,
            sweep_triples: 0,
            ..RunConfig::default()
        };
        let mut cheese = config.generate().unwrap();
        let d = cheese.annuli[1].discs[0];
        cheese.annuli[1].discs[1].center = d.center;
        let report = run_verification(&cheese, &config, false).unwrap();
        assert!(!report.pass);
        assert!(!report.violations.is_empty());
        assert!(!report.checks["validate"][0].pass);
    }

    #[test]
    fn single_pair() {
        let config = RunConfig::default();
        let cheese = config.generate().unwrap();
        let centre = cheese.annuli[2].discs[0].center;
        let f = RationalFunction::pole_power(centre, 2).add(&RationalFunction::power(2));
        let g = RationalFunction::pole_power(Complex64::new(1.1, 0.0), 1);
        let report = pair_test(&cheese, &f, &g, &config).unwrap();
        assert!(report.pass, "{:?}", report.failures().collect::<Vec<_>>());
        assert!(report.checks.contains_key("cauchy_split"));
        assert!(report.checks.contains_key("cauchy_deflection"));

        let report = pair_test(&cheese, &g, &f, &config).unwrap();
        assert!(report.pass);
        assert!(!report.checks.contains_key("cauchy_split"));
        assert!(!report.notes.is_empty());
    }
}
