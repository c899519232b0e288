//! Python bindings: `import swiss_cheese`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use cheese_core::derivation::Checker;
use cheese_core::norms::{sup_norm_t as core_sup_t, sup_norm_x as core_sup_x};
use cheese_core::quadrature::{pairing_t as core_pairing_t, residue_oracle_t as core_oracle};
use cheese_core::verify::{pair_test as core_pair_test, run_verification, RunConfig};
use cheese_core::{Complex64, Error, FamilySpec, Placement, Polynomial, QuadratureSpec};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::InvalidArgument(_) | Error::Serialization(_) | Error::Precondition(_) => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn config_from(json: Option<&str>) -> PyResult<RunConfig> {
    let config: RunConfig = match json {
        Some(text) => serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?,
        None => RunConfig::default(),
    };
    config.validate().map_err(py_err)?;
    Ok(config)
}

/// A finite Swiss cheese: the closed unit disc minus disjoint open discs.
#[pyclass(name = "SwissCheese", module = "swiss_cheese", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PySwissCheese {
    inner: cheese_core::SwissCheese,
}

#[pymethods]
impl PySwissCheese {
    #[staticmethod]
    #[pyo3(signature = (c=1.0, annuli=4, discs_per_annulus=3, seed=7))]
    fn generate(c: f64, annuli: u32, discs_per_annulus: usize, seed: u64) -> PyResult<Self> {
        let inner = cheese_core::generate_cheese(c, annuli, discs_per_annulus, seed).map_err(py_err)?;
        Ok(PySwissCheese { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = cheese_core::SwissCheese::from_json(text).map_err(py_err)?;
        Ok(PySwissCheese { inner })
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(py_err)
    }

    #[getter]
    fn c(&self) -> f64 {
        self.inner.c
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    fn discs(&self) -> Vec<(Complex64, f64)> {
        self.inner.discs().map(|d| (d.center, d.radius)).collect()
    }

    fn __len__(&self) -> usize {
        self.inner.disc_count()
    }

    fn lemma21_sum(&self) -> f64 {
        self.inner.lemma21_sum()
    }

    fn certified_bound(&self) -> f64 {
        self.inner.certified_bound()
    }

    /// Violated invariants as human-readable messages; empty when valid.
    fn validate(&self) -> Vec<String> {
        self.inner.validate().iter().map(ToString::to_string).collect()
    }

    fn contains(&self, z: Complex64) -> bool {
        self.inner.contains(z)
    }

    fn distance_to_x(&self, z: Complex64) -> f64 {
        self.inner.distance_to_x(z)
    }

    fn digest(&self) -> PyResult<String> {
        self.inner.digest().map_err(py_err)
    }

    fn render_svg(&self) -> String {
        cheese_core::render::render_svg(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "SwissCheese(C={}, annuli={}, discs={}, seed={})",
            self.inner.c,
            self.inner.annuli.len(),
            self.inner.disc_count(),
            self.inner.seed
        )
    }
}

/// Rational function with a factored denominator.
#[pyclass(name = "RationalFunction", module = "swiss_cheese", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyRationalFunction {
    inner: cheese_core::RationalFunction,
}

fn wrap(inner: cheese_core::RationalFunction) -> PyRationalFunction {
    PyRationalFunction { inner }
}

#[pymethods]
impl PyRationalFunction {
    /// Polynomial with coefficients in increasing degree.
    #[staticmethod]
    fn polynomial(coeffs: Vec<Complex64>) -> Self {
        wrap(cheese_core::RationalFunction::polynomial(Polynomial::new(coeffs)))
    }

    #[staticmethod]
    fn constant(c: Complex64) -> Self {
        wrap(cheese_core::RationalFunction::constant(c))
    }

    /// `z^n`.
    #[staticmethod]
    fn power(n: usize) -> Self {
        wrap(cheese_core::RationalFunction::power(n))
    }

    /// `z^{-n}`.
    #[staticmethod]
    fn inverse_power(n: u32) -> Self {
        wrap(cheese_core::RationalFunction::inverse_power(n))
    }

    /// `(z - a)^{-m}`.
    #[staticmethod]
    fn pole_power(a: Complex64, m: u32) -> Self {
        wrap(cheese_core::RationalFunction::pole_power(a, m))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        cheese_core::RationalFunction::from_json(text).map(wrap).map_err(py_err)
    }

    /// Seeded member of the family of rational functions with poles off the cheese.
    #[staticmethod]
    #[pyo3(signature = (cheese, seed, max_degree=6, max_poles=3, min_clearance=0.02, placement="mixed"))]
    fn random(
        cheese: &PySwissCheese,
        seed: u64,
        max_degree: usize,
        max_poles: usize,
        min_clearance: f64,
        placement: &str,
    ) -> PyResult<Self> {
        let placement = match placement {
            "mixed" => Placement::Mixed,
            "inside_only" => Placement::InsideOnly,
            "outside_only" => Placement::OutsideOnly,
            other => return Err(PyValueError::new_err(format!("unknown placement {other:?}"))),
        };
        let family = FamilySpec::new(max_degree, max_poles, min_clearance).with_placement(placement);
        cheese_core::random_member(&cheese.inner, &family, seed)
            .map(wrap)
            .map_err(py_err)
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(py_err)
    }

    fn poles(&self) -> Vec<(Complex64, u32)> {
        self.inner.factors().iter().map(|f| (f.pole, f.mult)).collect()
    }

    fn numerator(&self) -> Vec<Complex64> {
        self.inner.numerator().coeffs().to_vec()
    }

    fn __call__(&self, z: Complex64) -> PyResult<Complex64> {
        self.inner.evaluate(z).map_err(py_err)
    }

    fn derivative(&self) -> Self {
        wrap(self.inner.derivative())
    }

    fn __add__(&self, other: &Self) -> Self {
        wrap(self.inner.add(&other.inner))
    }

    fn __mul__(&self, other: &Self) -> Self {
        wrap(self.inner.multiply(&other.inner))
    }

    fn scale(&self, c: Complex64) -> Self {
        wrap(self.inner.scale(c))
    }

    fn pole_clearance(&self, cheese: &PySwissCheese) -> f64 {
        self.inner.pole_clearance(&cheese.inner)
    }

    fn __repr__(&self) -> String {
        self.inner.to_json().unwrap_or_default()
    }
}

/// `D(f)(g) = ∫_T f'(z) g(z) dz`.
#[pyfunction]
fn derivation(f: &PyRationalFunction, g: &PyRationalFunction) -> PyResult<Complex64> {
    cheese_core::derivation::derivation(&f.inner, &g.inner, &QuadratureSpec::default()).map_err(py_err)
}

/// Quadrature value of `∫_T f' g dz` with `(value, nodes, error estimate, converged)`.
#[pyfunction]
fn pairing_t(f: &PyRationalFunction, g: &PyRationalFunction) -> PyResult<(Complex64, usize, f64, bool)> {
    let r = core_pairing_t(&f.inner, &g.inner, &QuadratureSpec::default()).map_err(py_err)?;
    Ok((r.value, r.nodes_used, r.est_error, r.converged))
}

/// `∫_T f' g dz` by residues, with no quadrature.
#[pyfunction]
fn residue_oracle_t(f: &PyRationalFunction, g: &PyRationalFunction) -> PyResult<Complex64> {
    core_oracle(&f.inner, &g.inner).map_err(py_err)
}

#[pyfunction]
fn sup_norm_t(f: &PyRationalFunction) -> PyResult<f64> {
    Ok(core_sup_t(&f.inner, &QuadratureSpec::default()).map_err(py_err)?.value)
}

#[pyfunction]
fn sup_norm_x(f: &PyRationalFunction, cheese: &PySwissCheese) -> PyResult<f64> {
    Ok(core_sup_x(&f.inner, &cheese.inner, &QuadratureSpec::default())
        .map_err(py_err)?
        .value)
}

/// Rows `(n, |z^n|_X, L¹ norm of (z^n)' on T)`.
#[pyfunction]
#[pyo3(signature = (n_max, cheese=None))]
fn l1_unboundedness_demo(n_max: u32, cheese: Option<&PySwissCheese>) -> PyResult<Vec<(u32, f64, f64)>> {
    let empty = cheese_core::SwissCheese::empty(1.0, 0);
    let cheese = cheese.map_or(&empty, |c| &c.inner);
    let rows = Checker::default()
        .l1_unboundedness_demo(n_max, cheese)
        .map_err(py_err)?;
    Ok(rows.iter().map(|r| (r.n, r.sup_norm_x, r.l1_norm_derivative)).collect())
}

/// Full verification run; returns the report as JSON.
#[pyfunction]
#[pyo3(signature = (cheese, config=None))]
fn verify(py: Python<'_>, cheese: &PySwissCheese, config: Option<&str>) -> PyResult<String> {
    let config = config_from(config)?;
    let report = py
        .detach(|| run_verification(&cheese.inner, &config, false))
        .map_err(py_err)?;
    report.to_json().map_err(py_err)
}

/// Checks on a single pair; returns the report as JSON.
#[pyfunction]
#[pyo3(signature = (cheese, f, g, config=None))]
fn pair_test(
    cheese: &PySwissCheese,
    f: &PyRationalFunction,
    g: &PyRationalFunction,
    config: Option<&str>,
) -> PyResult<String> {
    let config = config_from(config)?;
    let report = core_pair_test(&cheese.inner, &f.inner, &g.inner, &config).map_err(py_err)?;
    report.to_json().map_err(py_err)
}

#[pymodule]
pub fn swiss_cheese(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySwissCheese>()?;
    m.add_class::<PyRationalFunction>()?;
    m.add_function(wrap_pyfunction!(derivation, m)?)?;
    m.add_function(wrap_pyfunction!(pairing_t, m)?)?;
    m.add_function(wrap_pyfunction!(residue_oracle_t, m)?)?;
    m.add_function(wrap_pyfunction!(sup_norm_t, m)?)?;
    m.add_function(wrap_pyfunction!(sup_norm_x, m)?)?;
    m.add_function(wrap_pyfunction!(l1_unboundedness_demo, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(pair_test, m)?)?;
    Ok(())
}
