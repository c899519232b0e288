//! The derivation `D(f)(g) = ∫_T f'(z) g(z) dz` and the checks built on it.
//!
//! Every check returns a [`DerivationCheckRecord`] whose `defect` is compared
//! against a tolerance of the form `rel * (1 + magnitude)`, the magnitude
//! being the size of the quantities actually computed. The identities are
//! exact, so all defect is numerical.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::SwissCheese;
use crate::json;
use crate::norms::{sup_norm_t, sup_norm_x};
use crate::quadrature::{
    circle_integral, circle_integral_local, l1_norm_t, pairing_t, residue_oracle_t, Orientation, QuadratureSpec,
};
use crate::rational::RationalFunction;

/// Sample points on `T` used by the Cauchy split check.
pub const SPLIT_POINTS: usize = 32;
/// Poles closer than this to a contour violate the contour preconditions.
pub const CONTOUR_GUARD: f64 = 1e-6;

/// Real or complex quantity in a record; serialized as a number or `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Real(f64),
    #[serde(with = "json::complex_pair")]
    Complex(Complex64),
}

impl From<f64> for Scalar {
    fn from(x: f64) -> Self {
        Scalar::Real(x)
    }
}

impl From<Complex64> for Scalar {
    fn from(z: Complex64) -> Self {
        Scalar::Complex(z)
    }
}

/// Outcome of one check. `pass` holds iff `defect <= tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivationCheckRecord {
    pub check_name: String,
    pub lhs: Scalar,
    pub rhs: Scalar,
    pub defect: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub inputs_digest: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub diagnostics: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl DerivationCheckRecord {
    pub fn new(
        check_name: &str,
        lhs: impl Into<Scalar>,
        rhs: impl Into<Scalar>,
        defect: f64,
        tolerance: f64,
        inputs_digest: String,
    ) -> Self {
        DerivationCheckRecord {
            check_name: check_name.to_string(),
            lhs: lhs.into(),
            rhs: rhs.into(),
            defect,
            tolerance,
            pass: defect <= tolerance,
            inputs_digest,
            diagnostics: BTreeMap::new(),
            error: None,
        }
    }

    /// A failed record standing in for a check that could not run.
    pub fn aborted(check_name: &str, inputs_digest: String, error: &Error) -> Self {
        DerivationCheckRecord {
            check_name: check_name.to_string(),
            lhs: Scalar::Real(0.0),
            rhs: Scalar::Real(0.0),
            defect: f64::MAX,
            tolerance: 0.0,
            pass: false,
            inputs_digest,
            diagnostics: BTreeMap::new(),
            error: Some(error.to_string()),
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.diagnostics.insert(key.to_string(), value);
        self
    }
}

/// Short digest identifying the inputs of a check.
pub fn inputs_digest(parts: &[&RationalFunction], extra: &str) -> String {
    let mut text = String::new();
    for p in parts {
        text.push_str(&p.to_json().unwrap_or_default());
        text.push('|');
    }
    text.push_str(extra);
    json::digest(text.as_bytes())[..16].to_string()
}

/// Relative tolerances of the checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub oracle: f64,
    pub monomial: f64,
    pub cyclicity: f64,
    pub leibniz: f64,
    pub morris: f64,
    pub cauchy_split: f64,
    pub split_polynomial_h2: f64,
    pub fubini: f64,
    pub deflection: f64,
    pub restriction: f64,
    pub l1: f64,
    pub sup_monomial: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            oracle: 1e-9,
            monomial: 1e-10,
            cyclicity: 1e-9,
            leibniz: 1e-8,
            morris: 1e-8,
            cauchy_split: 1e-8,
            split_polynomial_h2: 1e-11,
            fubini: 1e-8,
            deflection: 1e-9,
            restriction: 1e-9,
            l1: 1e-9,
            sup_monomial: 1e-12,
        }
    }
}

/// One row of the `L¹` demonstration for `f = z^n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnboundednessRow {
    pub n: u32,
    pub sup_norm_x: f64,
    pub l1_norm_derivative: f64,
}

/// Evaluates `D` and runs checks with a fixed quadrature spec and tolerances.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Checker {
    pub quad: QuadratureSpec,
    pub tol: Tolerances,
}

fn i_unit() -> Complex64 {
    Complex64::new(0.0, 1.0)
}

impl Checker {
    pub fn new(quad: QuadratureSpec, tol: Tolerances) -> Self {
        Checker { quad, tol }
    }

    /// `D(f)(g)`.
    pub fn derivation(&self, f: &RationalFunction, g: &RationalFunction) -> Result<Complex64> {
        pairing_t(f, g, &self.quad)?.require("∫_T f' g dz")
    }

    /// Quadrature against the residue oracle.
    pub fn oracle_check(&self, f: &RationalFunction, g: &RationalFunction) -> Result<DerivationCheckRecord> {
        let quad = pairing_t(f, g, &self.quad)?;
        let d = quad.require("∫_T f' g dz")?;
        let oracle = residue_oracle_t(f, g)?;
        let defect = (d - oracle).norm();
        Ok(DerivationCheckRecord::new(
            "oracle_agreement",
            d,
            oracle,
            defect,
            self.tol.oracle * (1.0 + oracle.norm()),
            inputs_digest(&[f, g], ""),
        )
        .with("nodes", quad.nodes_used as f64))
    }

    /// `D(z^n)(z^{-n}) = 2πi n`, by quadrature and by residues.
    pub fn monomial_check(&self, n: u32) -> Result<DerivationCheckRecord> {
        let f = RationalFunction::power(n as usize);
        let g = RationalFunction::inverse_power(n);
        let expected = Complex64::new(0.0, TAU * n as f64);
        let d = self.derivation(&f, &g)?;
        let oracle = residue_oracle_t(&f, &g)?;
        let defect = (d - expected).norm().max((oracle - expected).norm());
        Ok(DerivationCheckRecord::new(
            "monomial_pairing",
            d,
            expected,
            defect,
            self.tol.monomial,
            inputs_digest(&[&f, &g], ""),
        )
        .with("n", n as f64)
        .with("oracle_defect", (oracle - expected).norm()))
    }

    /// `D(f)(g) + D(g)(f) = 0`; with `g = 1` this is `D(f)(1) = 0`.
    pub fn cyclicity_check(&self, f: &RationalFunction, g: &RationalFunction) -> Result<DerivationCheckRecord> {
        let fg = self.derivation(f, g)?;
        let gf = self.derivation(g, f)?;
        let defect = (fg + gf).norm();
        Ok(DerivationCheckRecord::new(
            "cyclicity",
            fg,
            -gf,
            defect,
            self.tol.cyclicity * (1.0 + fg.norm()),
            inputs_digest(&[f, g], ""),
        ))
    }

    /// `D(fg)(h) = D(g)(fh) + D(f)(gh)`.
    pub fn leibniz_check(
        &self,
        f: &RationalFunction,
        g: &RationalFunction,
        h: &RationalFunction,
    ) -> Result<DerivationCheckRecord> {
        let product = self.derivation(&f.multiply(g), h)?;
        let via_f = self.derivation(f, &g.multiply(h))?;
        let via_g = self.derivation(g, &f.multiply(h))?;
        let defect = (product - via_f - via_g).norm();
        let scale = product.norm().max(via_f.norm()).max(via_g.norm());
        Ok(DerivationCheckRecord::new(
            "leibniz",
            product,
            via_f + via_g,
            defect,
            self.tol.leibniz * (1.0 + scale),
            inputs_digest(&[f, g, h], ""),
        ))
    }

    /// `|D(f)(g)| <= 4π (Σ r/s²) |f|_X |g|_X`, and the constant-`C` form
    /// whenever the certificate does not exceed `C`.
    pub fn morris_bound_check(
        &self,
        f: &RationalFunction,
        g: &RationalFunction,
        cheese: &SwissCheese,
    ) -> Result<DerivationCheckRecord> {
        let d = self.derivation(f, g)?;
        let fx = sup_norm_x(f, cheese, &self.quad)?;
        let gx = sup_norm_x(g, cheese, &self.quad)?;
        let norms = fx.value * gx.value;
        let certificate = cheese.certified_bound();
        let bound = certificate * norms;
        let defect = (d.norm() - bound).max(0.0);
        let mut record = DerivationCheckRecord::new(
            "morris_bound",
            d.norm(),
            bound,
            defect,
            self.tol.morris * (1.0 + norms),
            inputs_digest(&[f, g], &cheese.digest().unwrap_or_default()),
        )
        .with("sup_f_x", fx.value)
        .with("sup_g_x", gx.value)
        .with("certified_bound", certificate);
        if certificate <= cheese.c {
            let theorem = cheese.c * norms;
            record = record
                .with("theorem_bound", theorem)
                .with("theorem_defect", (d.norm() - theorem).max(0.0));
        }
        Ok(record)
    }

    fn split_preconditions(&self, f: &RationalFunction, cheese: &SwissCheese, rho: f64) -> Result<()> {
        if !(rho > 1.0) {
            return Err(Error::InvalidArgument(format!("rho must exceed 1, got {rho}")));
        }
        for pole in f.poles() {
            let in_disc = cheese
                .discs()
                .any(|d| d.radius - (pole - d.center).norm() > CONTOUR_GUARD);
            if !in_disc && !(pole.norm() > rho + CONTOUR_GUARD) {
                return Err(Error::Precondition(format!(
                    "pole {pole} is neither inside a deleted disc nor beyond |w| = {rho}"
                )));
            }
        }
        Ok(())
    }

    /// `h_1(z) = (1/2πi) ∮_{|w| = rho} f(w) / (w - z)² dw`.
    pub fn h1(&self, f: &RationalFunction, z: Complex64, rho: f64) -> Result<Complex64> {
        let r = circle_integral(
            |w| Ok(f.evaluate(w)? / (w - z).powu(2)),
            Complex64::new(0.0, 0.0),
            rho,
            Orientation::Ccw,
            &self.quad,
        )?;
        Ok(r.require("h1")? / (2.0 * PI * i_unit()))
    }

    /// `h_2(z) = (1/2πi) Σ ∮_{∂D, cw} f(w) / (w - z)² dw`.
    pub fn h2(&self, f: &RationalFunction, z: Complex64, cheese: &SwissCheese) -> Result<Complex64> {
        let mut total = Complex64::new(0.0, 0.0);
        for disc in cheese.discs() {
            let r = circle_integral_local(
                |offset| Ok(f.evaluate_local(disc.center, offset)? / ((disc.center - z) + offset).powu(2)),
                disc.radius,
                Orientation::Cw,
                &self.quad,
            )?;
            total += r.require("h2")?;
        }
        Ok(total / (2.0 * PI * i_unit()))
    }

    /// `f' = h_1 + h_2` at equispaced points of `T`.
    pub fn cauchy_split_check(
        &self,
        f: &RationalFunction,
        cheese: &SwissCheese,
        rho: f64,
    ) -> Result<DerivationCheckRecord> {
        self.split_preconditions(f, cheese, rho)?;
        let df = f.derivative();
        let mut defect: f64 = 0.0;
        let mut max_df: f64 = 0.0;
        let mut max_h2: f64 = 0.0;
        let mut worst = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for k in 0..SPLIT_POINTS {
            let z = Complex64::from_polar(1.0, TAU * k as f64 / SPLIT_POINTS as f64);
            let exact = df.evaluate(z)?;
            let h1 = self.h1(f, z, rho)?;
            let h2 = self.h2(f, z, cheese)?;
            let gap = (exact - h1 - h2).norm();
            max_df = max_df.max(exact.norm());
            max_h2 = max_h2.max(h2.norm());
            if gap >= defect {
                defect = gap;
                worst = (exact, h1 + h2);
            }
        }
        Ok(DerivationCheckRecord::new(
            "cauchy_split",
            worst.0,
            worst.1,
            defect,
            self.tol.cauchy_split * (1.0 + max_df),
            inputs_digest(&[f], &format!("rho={rho}")),
        )
        .with("max_h2", max_h2)
        .with("max_df", max_df))
    }

    /// The two orders of integration in `∫_T h_1 g dz`.
    pub fn fubini_check(
        &self,
        f: &RationalFunction,
        g: &RationalFunction,
        cheese: &SwissCheese,
        rho: f64,
    ) -> Result<DerivationCheckRecord> {
        self.split_preconditions(f, cheese, rho)?;
        if g.poles().any(|p| (p.norm() - 1.0).abs() <= CONTOUR_GUARD) {
            return Err(Error::Precondition("g has a pole on the unit circle".into()));
        }
        let origin = Complex64::new(0.0, 0.0);
        let two_pi_i = 2.0 * PI * i_unit();

        // γ₁ inside, T outside
        let a = circle_integral(
            |z| Ok(self.h1(f, z, rho)? * g.evaluate(z)?),
            origin,
            1.0,
            Orientation::Ccw,
            &self.quad,
        )?
        .require("∫_T h1 g dz")?;

        // T inside, γ₁ outside
        let inner = |w: Complex64| -> Result<Complex64> {
            circle_integral(
                |z| Ok(g.evaluate(z)? / (w - z).powu(2)),
                origin,
                1.0,
                Orientation::Ccw,
                &self.quad,
            )?
            .require("∫_T g/(w-z)² dz")
        };
        let b = circle_integral(
            |w| Ok(f.evaluate(w)? * inner(w)?),
            origin,
            rho,
            Orientation::Ccw,
            &self.quad,
        )?
        .require("∫_γ1 f(w) (...) dw")?
            / two_pi_i;

        Ok(DerivationCheckRecord::new(
            "fubini",
            a,
            b,
            (a - b).norm(),
            self.tol.fubini * (1.0 + a.norm()),
            inputs_digest(&[f, g], &format!("rho={rho}")),
        ))
    }

    /// `∫_T g(z)/(w - z)² dz + ∫_{γ₂} g(z)/(w - z)² dz = 0` for `|w| > 1`,
    /// with `γ₂` running clockwise around every deleted circle.
    pub fn cauchy_deflection_check(
        &self,
        g: &RationalFunction,
        w: Complex64,
        cheese: &SwissCheese,
    ) -> Result<DerivationCheckRecord> {
        if !(w.norm() > 1.0 + CONTOUR_GUARD) {
            return Err(Error::InvalidArgument(format!(
                "w = {w} must lie outside the closed unit disc"
            )));
        }
        for pole in g.poles() {
            let in_disc = cheese
                .discs()
                .any(|d| d.radius - (pole - d.center).norm() > CONTOUR_GUARD);
            if !in_disc && !(pole.norm() > 1.0 + CONTOUR_GUARD) {
                return Err(Error::Precondition(format!("pole {pole} of g lies on or near X")));
            }
        }
        let on_t = circle_integral(
            |z| Ok(g.evaluate(z)? / (w - z).powu(2)),
            Complex64::new(0.0, 0.0),
            1.0,
            Orientation::Ccw,
            &self.quad,
        )?
        .require("∫_T g/(w-z)² dz")?;
        let mut on_gamma2 = Complex64::new(0.0, 0.0);
        for disc in cheese.discs() {
            on_gamma2 += circle_integral_local(
                |offset| Ok(g.evaluate_local(disc.center, offset)? / ((w - disc.center) - offset).powu(2)),
                disc.radius,
                Orientation::Cw,
                &self.quad,
            )?
            .require("∮ g/(w-z)² dz over a deleted circle")?;
        }
        Ok(DerivationCheckRecord::new(
            "cauchy_deflection",
            on_t,
            -on_gamma2,
            (on_t + on_gamma2).norm(),
            self.tol.deflection * (1.0 + on_t.norm()),
            inputs_digest(&[g], &format!("w={},{}", w.re, w.im)),
        ))
    }

    /// `|D(f)(g)| <= 2π |f'|_T |g|_T` and `|D(f)(g)| <= 2π |f|_T |g'|_T`.
    pub fn restriction_bound_check(&self, f: &RationalFunction, g: &RationalFunction) -> Result<DerivationCheckRecord> {
        let d = self.derivation(f, g)?.norm();
        let df_t = sup_norm_t(&f.derivative(), &self.quad)?.value;
        let g_t = sup_norm_t(g, &self.quad)?.value;
        let f_t = sup_norm_t(f, &self.quad)?.value;
        let dg_t = sup_norm_t(&g.derivative(), &self.quad)?.value;
        let via_f = TAU * df_t * g_t;
        let via_g = TAU * f_t * dg_t;
        let bound = via_f.min(via_g);
        Ok(DerivationCheckRecord::new(
            "restriction_bound",
            d,
            bound,
            (d - bound).max(0.0),
            self.tol.restriction * (1.0 + bound),
            inputs_digest(&[f, g], ""),
        )
        .with("bound_f_prime", via_f)
        .with("bound_g_prime", via_g))
    }

    /// `(n, |z^n|_X, ‖(z^n)'‖_{L¹(T)})` for `n = 1..=n_max`.
    pub fn l1_unboundedness_demo(&self, n_max: u32, cheese: &SwissCheese) -> Result<Vec<UnboundednessRow>> {
        if n_max == 0 {
            return Err(Error::InvalidArgument("n_max must be at least 1".into()));
        }
        (1..=n_max)
            .map(|n| {
                let f = RationalFunction::power(n as usize);
                let sup = sup_norm_x(&f, cheese, &self.quad)?.value;
                let l1 = l1_norm_t(&f.derivative(), &self.quad)?.require("L1 norm")?.re;
                Ok(UnboundednessRow {
                    n,
                    sup_norm_x: sup,
                    l1_norm_derivative: l1,
                })
            })
            .collect()
    }

    /// Records comparing a demo row with `(1, 2πn)`.
    pub fn unboundedness_records(&self, row: &UnboundednessRow) -> [DerivationCheckRecord; 2] {
        let f = RationalFunction::power(row.n as usize);
        let digest = inputs_digest(&[&f], "");
        let expected = TAU * row.n as f64;
        [
            DerivationCheckRecord::new(
                "l1_norm",
                row.l1_norm_derivative,
                expected,
                (row.l1_norm_derivative - expected).abs(),
                self.tol.l1,
                digest.clone(),
            )
            .with("n", row.n as f64),
            DerivationCheckRecord::new(
                "sup_norm_monomial",
                row.sup_norm_x,
                1.0,
                (row.sup_norm_x - 1.0).abs(),
                self.tol.sup_monomial,
                digest,
            )
            .with("n", row.n as f64),
        ]
    }
}

/// `D(f)(g)` with the default quadrature spec.
pub fn derivation(f: &RationalFunction, g: &RationalFunction, spec: &QuadratureSpec) -> Result<Complex64> {
    Checker::new(*spec, Tolerances::default()).derivation(f, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{generate_cheese, AnnulusRecord, Disc};
    use crate::rational::{random_member, FamilySpec, Placement, PoleFactor, Polynomial};
    use crate::rng::derive_seed;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn checker() -> Checker {
        Checker::default()
    }

    /// One disc of radius 0.2 around the origin, big enough to host poles comfortably.
    fn roomy_cheese() -> SwissCheese {
        SwissCheese {
            c: 10.0,
            seed: 0,
            annuli: vec![AnnulusRecord {
                n: 1,
                r_n: 0.0,
                budget: 1.0,
                discs: vec![
                    Disc::new(c(0.0, 0.0), 0.2).unwrap(),
                    Disc::new(c(0.5, 0.3), 0.1).unwrap(),
                ],
            }],
        }
    }

    #[test]
    fn derivation_examples() {
        let ck = checker();
        let g = RationalFunction::pole_power(c(0.1, 0.2), 2);
        assert!(ck.derivation(&RationalFunction::one(), &g).unwrap().norm() < 1e-15);
        let d = ck
            .derivation(&RationalFunction::power(1), &RationalFunction::inverse_power(1))
            .unwrap();
        assert!((d - c(0.0, TAU)).norm() < 1e-12);
        for n in 1..=8 {
            let r = ck.monomial_check(n).unwrap();
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn cyclicity_examples() {
        let ck = checker();
        let z = RationalFunction::power(1);
        let inv = RationalFunction::inverse_power(1);
        let r = ck.cyclicity_check(&z, &inv).unwrap();
        assert!(r.pass);
        assert_eq!(r.lhs, Scalar::Complex(ck.derivation(&z, &inv).unwrap()));
        let back = ck.derivation(&inv, &z).unwrap();
        assert!((back + c(0.0, TAU)).norm() < 1e-12);

        let f = RationalFunction::pole_power(c(0.3, 0.0), 2).add(&RationalFunction::power(3));
        assert!(ck.cyclicity_check(&f, &f).unwrap().pass);
        assert!(ck.cyclicity_check(&f, &RationalFunction::one()).unwrap().pass);
    }

    #[test]
    fn leibniz_examples() {
        let ck = checker();
        let one = RationalFunction::one();
        assert!(ck.leibniz_check(&one, &one, &one).unwrap().pass);
        let z = RationalFunction::power(1);
        let h = RationalFunction::inverse_power(2);
        let r = ck.leibniz_check(&z, &z, &h).unwrap();
        assert!(r.pass, "{r:?}");
        // D(z²)(z⁻²) = ∫ 2z · z⁻² dz = 4πi
        assert!(matches!(r.lhs, Scalar::Complex(v) if (v - c(0.0, 2.0 * TAU)).norm() < 1e-11));
    }

    #[test]
    fn morris_examples() {
        let ck = checker();
        let cheese = generate_cheese(1.0, 4, 3, 7).unwrap();
        let one = RationalFunction::one();
        assert!(ck.morris_bound_check(&one, &one, &cheese).unwrap().pass);
        let p = RationalFunction::power(3);
        let q = RationalFunction::polynomial(Polynomial::new(vec![c(0.0, 0.0), c(0.5, 0.0), c(0.0, 0.5)]));
        let r = ck.morris_bound_check(&p, &q, &cheese).unwrap();
        assert!(r.pass);
        assert!(matches!(r.lhs, Scalar::Real(v) if v < 1e-13));
        let inside = FamilySpec::new(4, 2, 0.02).with_placement(Placement::InsideOnly);
        let mut nonzero = 0;
        for i in 0..20 {
            let f = random_member(&cheese, &inside, derive_seed(8, i)).unwrap();
            let g = random_member(&cheese, &inside, derive_seed(9, i)).unwrap();
            let r = ck.morris_bound_check(&f, &g, &cheese).unwrap();
            assert!(r.pass, "{r:?}");
            assert!(r.diagnostics.contains_key("theorem_bound"));
            if matches!(r.lhs, Scalar::Real(v) if v > 1e-6) {
                nonzero += 1;
            }
        }
        assert!(nonzero > 0);
    }

    #[test]
    fn split_for_polynomials_has_no_h2() {
        let ck = checker();
        let cheese = generate_cheese(1.0, 4, 3, 7).unwrap();
        let p = RationalFunction::polynomial(Polynomial::new(vec![
            c(1.0, 0.0),
            c(-0.5, 0.2),
            c(0.0, 0.0),
            c(0.3, 0.3),
        ]));
        let r = ck.cauchy_split_check(&p, &cheese, 1.25).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.diagnostics["max_h2"] <= 1e-11);
    }

    #[test]
    fn split_with_inside_pole_is_nontrivial() {
        let ck = checker();
        let cheese = roomy_cheese();
        let f = RationalFunction::pole_power(c(0.05, -0.02), 1);
        let r = ck.cauchy_split_check(&f, &cheese, 1.25).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.diagnostics["max_h2"] > 0.1);

        let generated = generate_cheese(1.0, 4, 3, 7).unwrap();
        let centre = generated.annuli[3].discs[1].center;
        let f = RationalFunction::pole_power(centre, 2);
        assert!(ck.cauchy_split_check(&f, &generated, 1.25).unwrap().pass);
    }

    #[test]
    fn split_rejects_poles_between_contours() {
        let ck = checker();
        let cheese = roomy_cheese();
        let f = RationalFunction::pole_power(c(1.1, 0.0), 1);
        assert!(matches!(
            ck.cauchy_split_check(&f, &cheese, 1.25),
            Err(Error::Precondition(_))
        ));
        let f = RationalFunction::pole_power(c(0.0, 0.2 + 1e-8), 1);
        assert!(matches!(
            ck.cauchy_split_check(&f, &cheese, 1.25),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn fubini_examples() {
        let ck = checker();
        let cheese = roomy_cheese();
        let one = RationalFunction::one();
        let r = ck.fubini_check(&one, &one, &cheese, 1.25).unwrap();
        assert!(r.pass);
        assert!(matches!(r.lhs, Scalar::Complex(v) if v.norm() < 1e-14));
        let r = ck
            .fubini_check(
                &RationalFunction::power(2),
                &RationalFunction::inverse_power(1),
                &cheese,
                1.25,
            )
            .unwrap();
        assert!(r.pass, "{r:?}");
        // h1 = f' = 2z for a polynomial, so A = ∫_T 2z · z⁻¹ dz = 0
        assert!(matches!(r.lhs, Scalar::Complex(v) if v.norm() < 1e-10));
    }

    #[test]
    fn deflection_examples() {
        let ck = checker();
        let cheese = roomy_cheese();
        let w = c(1.5, 0.0);
        let r = ck
            .cauchy_deflection_check(&RationalFunction::one(), w, &cheese)
            .unwrap();
        assert!(r.pass && r.defect < 1e-14);
        let p = RationalFunction::polynomial(Polynomial::new(vec![c(0.2, 0.0), c(1.0, 1.0), c(0.0, -0.7)]));
        assert!(ck.cauchy_deflection_check(&p, w, &cheese).unwrap().pass);
        let g = RationalFunction::new(
            Polynomial::new(vec![c(1.0, 0.0), c(0.0, 1.0)]),
            vec![PoleFactor {
                pole: c(0.52, 0.31),
                mult: 2,
            }],
        )
        .unwrap();
        let r = ck.cauchy_deflection_check(&g, w, &cheese).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(matches!(r.lhs, Scalar::Complex(v) if v.norm() > 1e-3));
        assert!(ck.cauchy_deflection_check(&g, c(0.5, 0.0), &cheese).is_err());
    }

    #[test]
    fn restriction_examples() {
        let ck = checker();
        let r = ck
            .restriction_bound_check(&RationalFunction::power(1), &RationalFunction::one())
            .unwrap();
        assert!(r.pass);
        for n in 1..=8 {
            let r = ck
                .restriction_bound_check(
                    &RationalFunction::power(n as usize),
                    &RationalFunction::inverse_power(n),
                )
                .unwrap();
            assert!(r.pass, "{r:?}");
            let (Scalar::Real(lhs), Scalar::Real(rhs)) = (r.lhs, r.rhs) else {
                panic!()
            };
            assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs), "n = {n}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn unboundedness_table() {
        let ck = checker();
        let rows = ck.l1_unboundedness_demo(8, &SwissCheese::empty(1.0, 0)).unwrap();
        assert_eq!(rows.len(), 8);
        assert!((rows[0].l1_norm_derivative - TAU).abs() < 1e-9);
        assert!((rows[4].l1_norm_derivative - 10.0 * PI).abs() < 1e-9);
        for row in &rows {
            assert!((row.sup_norm_x - 1.0).abs() < 1e-12);
            assert!(ck.unboundedness_records(row).iter().all(|r| r.pass));
        }
        assert!(rows
            .windows(2)
            .all(|w| w[1].l1_norm_derivative > w[0].l1_norm_derivative));
        assert!(ck.l1_unboundedness_demo(0, &SwissCheese::empty(1.0, 0)).is_err());
    }

    #[test]
    fn bilinearity() {
        let ck = checker();
        let cheese = generate_cheese(1.0, 4, 3, 7).unwrap();
        let family = FamilySpec::new(5, 3, 0.02);
        let a = c(0.3, -1.2);
        for i in 0..10 {
            let f1 = random_member(&cheese, &family, derive_seed(30, i)).unwrap();
            let f2 = random_member(&cheese, &family, derive_seed(31, i)).unwrap();
            let g = random_member(&cheese, &family, derive_seed(32, i)).unwrap();
            let lhs = ck.derivation(&f1.scale(a).add(&f2), &g).unwrap();
            let rhs = a * ck.derivation(&f1, &g).unwrap() + ck.derivation(&f2, &g).unwrap();
            assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + rhs.norm()));
            let g2 = random_member(&cheese, &family, derive_seed(33, i)).unwrap();
            let lin = ck.derivation(&f1, &g.add(&g2)).unwrap();
            let sep = ck.derivation(&f1, &g).unwrap() + ck.derivation(&f1, &g2).unwrap();
            assert!((lin - sep).norm() <= 1e-9 * (1.0 + sep.norm()));
        }
    }

    #[test]
    fn record_json_round_trip() {
        let r = DerivationCheckRecord::new("x", c(1.0, 2.0), 3.0, 0.5, 1.0, "abc".into()).with("k", 4.0);
        let text = crate::json::to_string_compact(&r).unwrap();
        let back: DerivationCheckRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }
}
