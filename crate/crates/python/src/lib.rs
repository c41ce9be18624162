//! Python bindings: a `StackyFan` class exposing the main invariants.
//!
//! Inputs and outputs mirror the CLI JSON formats; reports come back as
//! plain Python dicts and lists.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::IntoPyObjectExt;
use pyo3::types::{PyDict, PyList};
use stacktor::io;
use stacktor::oracle::check_gale_exactness;
use stacktor::presentations::{cr_ring, k_ring, TwistSpec};
use stacktor::stringy::{
    chern_character_in, chern_ring_check_in, cr_product_check_in, spectrum_points,
    StringyContext,
};

fn err<E: ToString>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn json_to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Py<PyAny>> {
    match v {
        serde_json::Value::Null => Ok(py.None()),
        serde_json::Value::Bool(b) => b.into_py_any(py),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_py_any(py)
            } else if let Some(u) = n.as_u64() {
                u.into_py_any(py)
            } else {
                n.as_f64().unwrap_or(f64::NAN).into_py_any(py)
            }
        }
        serde_json::Value::String(s) => s.into_py_any(py),
        serde_json::Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_py_any(py)
        }
        serde_json::Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, val) in map {
                dict.set_item(k, json_to_py(py, val)?)?;
            }
            dict.into_py_any(py)
        }
    }
}

fn to_py<T: serde::Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let v = serde_json::to_value(value).map_err(err)?;
    json_to_py(py, &v)
}

fn twist_for(sf: &stacktor::stackyfan::StackyFan, base: &str) -> PyResult<TwistSpec> {
    io::base_from_name(base, sf.group().free_rank).map_err(err)
}

/// A stacky fan: the lattice data behind a toric Deligne-Mumford stack.
#[pyclass]
struct StackyFan {
    inner: stacktor::stackyfan::StackyFan,
}

#[pymethods]
impl StackyFan {
    /// Parse from the JSON format used by the CLI (a bare stacky-fan object
    /// or a wrapper with a "stacky_fan" key).
    #[new]
    fn new(json: &str) -> PyResult<Self> {
        let input: io::InputJson = serde_json::from_str(json).map_err(err)?;
        let inner = io::stacky_fan_from_json(input.stacky_fan_json()).map_err(err)?;
        Ok(StackyFan { inner })
    }

    fn __repr__(&self) -> String {
        format!(
            "StackyFan(N = {:?}, rays = {}, vectors = {})",
            self.inner.group(),
            self.inner.num_rays(),
            self.inner.num_generators()
        )
    }

    /// Violations of the stacky-fan axioms (empty list when valid).
    fn validation_errors(&self) -> Vec<String> {
        self.inner
            .validation_report()
            .iter()
            .map(|e| e.to_string())
            .collect()
    }

    /// The stacky fan serialized back to JSON.
    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string_pretty(&io::stacky_fan_to_json(&self.inner)).map_err(err)
    }

    /// Box elements with exact fractional coordinates.
    fn box_total(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let reports: Vec<_> = self
            .inner
            .box_total()
            .iter()
            .map(io::box_element_report)
            .collect();
        to_py(py, &reports)
    }

    /// The twisted sectors: box elements with their quotient stacky fans.
    fn sectors(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let mut out = Vec::new();
        for (v, q) in self.inner.sectors().map_err(err)? {
            out.push(serde_json::json!({
                "box": serde_json::to_value(io::box_element_report(&v)).map_err(err)?,
                "local_group": serde_json::to_value(io::group_to_json(q.stacky_fan.group())).map_err(err)?,
                "quotient": serde_json::to_value(io::stacky_fan_to_json(&q.stacky_fan)).map_err(err)?,
            }));
        }
        json_to_py(py, &serde_json::Value::Array(out))
    }

    /// Gale dual of the full lattice map with the exactness verdict.
    fn gale_dual(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let beta = self.inner.beta();
        let gd = stacktor::lattice::gale_dual(&beta).map_err(err)?;
        let exact = check_gale_exactness(&beta, &gd);
        let matrix: Vec<Vec<String>> = (0..gd.dual_map.matrix.rows())
            .map(|r| {
                (0..gd.dual_map.matrix.cols())
                    .map(|c| gd.dual_map.matrix.at(r, c).to_string())
                    .collect()
            })
            .collect();
        let v = serde_json::json!({
            "dual_group": serde_json::to_value(io::group_to_json(&gd.group)).map_err(err)?,
            "dual_map": matrix,
            "exactness_holds": exact.all_hold(),
        });
        json_to_py(py, &v)
    }

    /// K-theory presentation over a base ("point" or "Pn:r").
    #[pyo3(signature = (base = "point"))]
    fn k_ring(&self, py: Python<'_>, base: &str) -> PyResult<Py<PyAny>> {
        let twist = twist_for(&self.inner, base)?;
        let k = k_ring(&self.inner, &twist).map_err(err)?;
        let v = serde_json::json!({
            "presentation": serde_json::to_value(io::presentation_report(&k.presentation)).map_err(err)?,
            "x_classes": k.x_classes.iter().map(|p| format!("{}", p)).collect::<Vec<_>>(),
            "dimension": k.presentation.dimension(),
        });
        json_to_py(py, &v)
    }

    /// Chen-Ruan presentation and sector decomposition over a base.
    #[pyo3(signature = (base = "point"))]
    fn cr_ring(&self, py: Python<'_>, base: &str) -> PyResult<Py<PyAny>> {
        let twist = twist_for(&self.inner, base)?;
        let cr = cr_ring(&self.inner, &twist).map_err(err)?;
        let sectors: Vec<serde_json::Value> = cr
            .decomposition
            .sectors
            .iter()
            .map(|s| {
                serde_json::json!({
                    "box": serde_json::to_value(io::box_element_report(&s.v)).unwrap(),
                    "degree_shift": s.shift.to_string(),
                    "dimension": s.presentation.dimension(),
                    "presentation": serde_json::to_value(io::presentation_report(&s.presentation)).unwrap(),
                })
            })
            .collect();
        let v = serde_json::json!({
            "global": serde_json::to_value(io::presentation_report(&cr.global)).map_err(err)?,
            "total_dimension": cr.decomposition.total_dimension,
            "sectors": sectors,
            "completeness_warning": cr.completeness_warning,
        });
        json_to_py(py, &v)
    }

    /// Spectrum points of the complexified K-presentation (point base only).
    fn spectrum(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let twist = TwistSpec::point(self.inner.group().free_rank);
        let points = spectrum_points(&self.inner, &twist).map_err(err)?;
        let out: Vec<serde_json::Value> = points
            .iter()
            .map(|p| {
                serde_json::json!({
                    "box": serde_json::to_value(io::box_element_report(&p.v)).unwrap(),
                    "values": p.values.iter().map(|(n, s)| (n.clone(), s.to_string())).collect::<Vec<_>>(),
                    "relations_vanish": p.relations_vanish,
                })
            })
            .collect();
        json_to_py(py, &serde_json::Value::Array(out))
    }

    /// Chern character matrix plus the product and ring checks.
    #[pyo3(signature = (base = "point"))]
    fn chern(&self, py: Python<'_>, base: &str) -> PyResult<Py<PyAny>> {
        let twist = twist_for(&self.inner, base)?;
        let ctx = StringyContext::new(&self.inner, &twist, None).map_err(err)?;
        let chern = chern_character_in(&ctx).map_err(err)?;
        let product = cr_product_check_in(&ctx).map_err(err)?;
        let ring = chern_ring_check_in(&ctx).map_err(err)?;
        let v = serde_json::json!({
            "cyclotomic_order": chern.cyclotomic_order,
            "k_dimension": chern.k_dimension,
            "cr_dimension": chern.cr_dimension,
            "bijective": chern.bijective,
            "matrix": chern.matrix,
            "product_check_clean": product.clean(),
            "ring_check_clean": ring.clean(),
        });
        json_to_py(py, &v)
    }
}

/// Build the finite abelian gerbe for cyclic factors and return its stacky fan.
#[pyfunction]
fn gerbe(factors: Vec<u32>) -> PyResult<StackyFan> {
    let inner = stacktor::presentations::gerbe_stacky_fan(&factors).map_err(err)?;
    Ok(StackyFan { inner })
}

#[pymodule]
fn stacktor_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<StackyFan>()?;
    m.add_function(wrap_pyfunction!(gerbe, m)?)?;
    Ok(())
}
