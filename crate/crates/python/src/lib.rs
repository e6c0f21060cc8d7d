//! Python bindings. Points are passed as tuples: a real point is `(t, x)`,
//! a complex point is `((re_t, re_x), (im_t, im_x))` or a plain real pair.

use lightcone::envelopes::{self, EnvelopeVerdict, TOL_ENV};
use lightcone::oracle::{self, OracleConfig};
use lightcone::spectral::{massgap_contradiction, SpectrumHypothesis};
use lightcone::{transforms, ComplexPoint2, RealPoint2};
use pyo3::exceptions::{PyNotImplementedError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyTuple;

fn to_py(e: lightcone::Error) -> PyErr {
    match e {
        lightcone::Error::UnsupportedRegion(_) | lightcone::Error::UnsupportedConfiguration(_) => {
            PyNotImplementedError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn real(p: (f64, f64)) -> PyResult<RealPoint2> {
    RealPoint2::try_new(p.0, p.1).map_err(to_py)
}

fn complex(z: &Bound<'_, PyAny>) -> PyResult<ComplexPoint2> {
    if let Ok(p) = z.extract::<(f64, f64)>() {
        return Ok(real(p)?.complexify());
    }
    let (re, im) = z.extract::<((f64, f64), (f64, f64))>()?;
    ComplexPoint2::try_from_parts(real(re)?, real(im)?).map_err(to_py)
}

fn pair(p: RealPoint2) -> (f64, f64) {
    (p.t, p.x)
}

fn json_value(py: Python<'_>, text: String) -> PyResult<PyObject> {
    Ok(py.import_bound("json")?.call_method1("loads", (text,))?.unbind())
}

fn verdict(v: EnvelopeVerdict) -> &'static str {
    v.label()
}

/// A real region, built from its JSON form.
#[pyclass(name = "Region", module = "lightcone", frozen)]
struct PyRegion {
    inner: lightcone::Region,
}

#[pymethods]
impl PyRegion {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self { inner: lightcone::Region::from_json(text).map_err(to_py)? })
    }

    #[staticmethod]
    fn mu_cone(mu: f64) -> Self {
        Self { inner: lightcone::Region::mu_cone(mu) }
    }

    #[staticmethod]
    fn double_cone(a: (f64, f64), b: (f64, f64)) -> PyResult<Self> {
        Ok(Self { inner: lightcone::Region::double_cone(real(a)?, real(b)?).map_err(to_py)? })
    }

    #[staticmethod]
    fn shell(m1: f64, m2: f64) -> PyResult<Self> {
        Ok(Self { inner: lightcone::Region::shell(m1, m2).map_err(to_py)? })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn tag(&self) -> &'static str {
        self.inner.tag()
    }

    fn contains(&self, p: (f64, f64)) -> PyResult<bool> {
        Ok(self.inner.contains(real(p)?))
    }

    fn signed_distance(&self, p: (f64, f64)) -> PyResult<f64> {
        Ok(self.inner.signed_distance(real(p)?))
    }

    /// Membership of a complex point in the edge-of-the-wedge neighbourhood.
    fn edge_contains(&self, z: &Bound<'_, PyAny>) -> PyResult<bool> {
        Ok(lightcone::edge_neighborhood_contains(&self.inner, complex(z)?))
    }

    fn __repr__(&self) -> String {
        format!("Region({})", self.inner.to_json())
    }
}

#[pyfunction]
fn dot(a: (f64, f64), b: (f64, f64)) -> PyResult<f64> {
    Ok(real(a)?.dot(&real(b)?))
}

#[pyfunction]
fn classify(y: (f64, f64)) -> PyResult<String> {
    Ok(format!("{:?}", lightcone::classify(real(y)?)))
}

#[pyfunction]
fn hat_dual(y: (f64, f64)) -> PyResult<(f64, f64)> {
    Ok(pair(lightcone::hat_dual(real(y)?).map_err(to_py)?))
}

#[pyfunction]
fn mu_cone_margin(z: &Bound<'_, PyAny>, mu: f64) -> PyResult<f64> {
    Ok(envelopes::mu_cone_margin(complex(z)?, mu))
}

#[pyfunction]
fn band_margin(z: &Bound<'_, PyAny>, m1: f64, m2: f64) -> PyResult<f64> {
    Ok(envelopes::g1_margin(complex(z)?, m1, m2))
}

#[pyfunction]
fn shell_complement_margin(z: &Bound<'_, PyAny>, m: f64) -> PyResult<f64> {
    Ok(envelopes::shell_complement_margin(complex(z)?, m))
}

/// `"inside"`, `"boundary"` or `"excluded"` for one of the closed-form envelopes.
#[pyfunction]
#[pyo3(signature = (envelope, z, mu=None, m=None, m1=None, m2=None))]
fn member(
    envelope: &str,
    z: &Bound<'_, PyAny>,
    mu: Option<f64>,
    m: Option<f64>,
    m1: Option<f64>,
    m2: Option<f64>,
) -> PyResult<&'static str> {
    let z = complex(z)?;
    let need = |v: Option<f64>, name: &str| v.ok_or_else(|| PyValueError::new_err(format!("{envelope} needs {name}")));
    let v = match envelope {
        "mu-cone" => envelopes::envelope_mu_cone(z, need(mu, "mu")?),
        "band" => envelopes::envelope_g1(z, need(m1, "m1")?, need(m2, "m2")?),
        "shell" => envelopes::envelope_shell_complement(z, need(m, "m")?),
        _ => return Err(PyValueError::new_err(format!("unknown envelope {envelope:?}"))),
    };
    Ok(verdict(v.map_err(to_py)?))
}

#[pyfunction]
fn phi(z: &Bound<'_, PyAny>) -> PyResult<((f64, f64), (f64, f64))> {
    let w = transforms::phi(complex(z)?).map_err(to_py)?;
    Ok((pair(w.re()), pair(w.im())))
}

/// Mass-gap witness as a dict, or `None` when there is no gap.
#[pyfunction]
#[pyo3(signature = (m, m1, s=(1.0, 0.0), epsilon=0.1))]
fn massgap(py: Python<'_>, m: f64, m1: f64, s: (f64, f64), epsilon: f64) -> PyResult<PyObject> {
    let h = SpectrumHypothesis::new(m, m1, real(s)?, epsilon).map_err(to_py)?;
    match massgap_contradiction(&h).map_err(to_py)? {
        Some(w) => json_value(py, serde_json::to_string(&w).expect("witness serializes")),
        None => Ok(py.None()),
    }
}

/// Runs one of the numerical consistency suites and returns its report.
#[pyfunction]
#[pyo3(signature = (suite, seed=7, n=None, grid=None))]
fn run_oracle(py: Python<'_>, suite: &str, seed: u64, n: Option<usize>, grid: Option<usize>) -> PyResult<PyObject> {
    let cfg = OracleConfig { seed, n, grid };
    let r = py.allow_threads(|| oracle::run_suite(suite, &cfg)).map_err(to_py)?;
    json_value(py, serde_json::to_string(&r).expect("report serializes"))
}

#[pymodule]
#[pyo3(name = "lightcone")]
fn lightcone_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRegion>()?;
    m.add("TOL_ENV", TOL_ENV)?;
    m.add("SUITES", PyTuple::new_bound(m.py(), oracle::SUITES))?;
    m.add_function(wrap_pyfunction!(dot, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(hat_dual, m)?)?;
    m.add_function(wrap_pyfunction!(mu_cone_margin, m)?)?;
    m.add_function(wrap_pyfunction!(band_margin, m)?)?;
    m.add_function(wrap_pyfunction!(shell_complement_margin, m)?)?;
    m.add_function(wrap_pyfunction!(member, m)?)?;
    m.add_function(wrap_pyfunction!(phi, m)?)?;
    m.add_function(wrap_pyfunction!(massgap, m)?)?;
    m.add_function(wrap_pyfunction!(run_oracle, m)?)?;
    Ok(())
}
