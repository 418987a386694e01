use std::collections::BTreeMap;

use bellows::continuation;
use bellows::error::Error;
use bellows::flexion::{self, ConstraintSystem, FlexOptions};
use bellows::gram::{self, IndexSet, RealGram, Sign, Space};
use bellows::io::{ComplexFile, CoordsFile};
use bellows::polyhedra::{self, Configuration, PseudoManifold};
use bellows::simplex_volume;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn err(e: Error) -> PyErr {
    match e {
        Error::Argument(_) | Error::Domain(_) | Error::Json(_) | Error::Io(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn space(s: &str) -> PyResult<Space> {
    s.parse().map_err(err)
}

/// Real Gram matrix with unit diagonal.
#[pyclass(name = "Gram", module = "bellows_py", from_py_object)]
#[derive(Clone)]
struct PyGram {
    inner: RealGram,
}

#[pymethods]
impl PyGram {
    #[new]
    fn new(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        let size = rows.len();
        if rows.iter().any(|r| r.len() != size) {
            return Err(PyValueError::new_err("Gram matrix must be square"));
        }
        let values: Vec<f64> = rows.into_iter().flatten().collect();
        let mat = bellows::linalg::Mat::from_row_major(size, values)
            .ok_or_else(|| PyValueError::new_err("bad matrix shape"))?;
        Ok(PyGram { inner: RealGram::new(mat).map_err(err)? })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn det(&self) -> f64 {
        self.inner.det()
    }

    fn minor(&self, indices: Vec<usize>) -> f64 {
        self.inner.principal_minor(IndexSet::from_indices(indices))
    }

    /// `"hyperbolic"`, `"sphere"`, `"hypersurface"`, or `"other"`.
    #[pyo3(signature = (tol=None))]
    fn classify(&self, tol: Option<f64>) -> &'static str {
        let tol = tol.unwrap_or_else(|| gram::default_tolerance(&self.inner));
        match gram::classify_domain(&self.inner, tol) {
            gram::DomainClass::HyperbolicSimplex => "hyperbolic",
            gram::DomainClass::SphericalSimplex => "sphere",
            gram::DomainClass::OnHypersurface(_) => "hypersurface",
            _ => "other",
        }
    }

    #[pyo3(signature = (space="hyperbolic", tol=1e-10))]
    fn volume(&self, space: &str, tol: f64) -> PyResult<(f64, f64)> {
        let r = simplex_volume::volume(&self.inner, self::space(space)?, tol).map_err(err)?;
        Ok((r.value, r.error_estimate))
    }

    #[pyo3(signature = (space="hyperbolic", target_err=1e-8))]
    fn oracle_volume(&self, space: &str, target_err: f64) -> PyResult<(f64, f64)> {
        let r = simplex_volume::volume_oracle_quadrature(&self.inner, self::space(space)?, target_err).map_err(err)?;
        Ok((r.value, r.error_estimate))
    }

    /// Dihedral angle at each codimension-2 face, keyed by the face's index tuple.
    #[pyo3(signature = (space="hyperbolic"))]
    fn dihedral_angles(&self, space: &str) -> PyResult<BTreeMap<Vec<usize>, f64>> {
        let a = simplex_volume::dihedral_angles(&self.inner, self::space(space)?).map_err(err)?;
        Ok(a.into_iter().map(|d| (d.face.to_vec(), d.value)).collect())
    }

    fn to_list(&self) -> Vec<Vec<f64>> {
        let s = self.inner.size();
        (0..s).map(|j| (0..s).map(|k| self.inner.entry(j, k)).collect()).collect()
    }

    fn __repr__(&self) -> String {
        format!("Gram(n={}, det={:e})", self.inner.n(), self.inner.det())
    }
}

#[pyfunction]
#[pyo3(signature = (n, edge=1.0, space="hyperbolic"))]
fn regular_simplex(n: usize, edge: f64, space: &str) -> PyResult<PyGram> {
    let inner = simplex_volume::regular_simplex_gram(n, edge, self::space(space)?).map_err(err)?;
    Ok(PyGram { inner })
}

#[pyfunction]
#[pyo3(signature = (n, indices, sigma="+"))]
fn witness(n: usize, indices: Vec<usize>, sigma: &str) -> PyResult<PyGram> {
    let sigma: Sign = sigma.parse().map_err(err)?;
    let inner = gram::witness_matrix(n, IndexSet::from_indices(indices), sigma).map_err(err)?;
    Ok(PyGram { inner })
}

/// An oriented pseudo-manifold with vertex positions in the hyperboloid model.
#[pyclass(name = "Polyhedron", module = "bellows_py")]
struct PyPolyhedron {
    complex: PseudoManifold,
    config: Configuration,
}

#[pymethods]
impl PyPolyhedron {
    /// From the JSON complex and coordinate formats used by the CLI.
    #[staticmethod]
    fn from_json(complex: &str, coords: &str) -> PyResult<Self> {
        let k: ComplexFile = serde_json::from_str(complex).map_err(|e| err(e.into()))?;
        let complex = k.to_complex().map_err(err)?;
        let c: CoordsFile = serde_json::from_str(coords).map_err(|e| err(e.into()))?;
        let config = c.to_configuration(&complex).map_err(err)?;
        Ok(PyPolyhedron { complex, config })
    }

    /// The default line-symmetric flexible octahedron.
    #[staticmethod]
    fn bricard() -> Self {
        let (complex, config) = flexion::default_bricard();
        PyPolyhedron { complex, config }
    }

    /// A flexible quadrilateral in the hyperbolic plane.
    #[staticmethod]
    fn quadrilateral() -> Self {
        let (complex, config) = flexion::quadrilateral();
        PyPolyhedron { complex, config }
    }

    #[getter]
    fn coords(&self) -> Vec<Vec<f64>> {
        self.config.coords.clone()
    }

    fn validate(&self) -> Vec<String> {
        self.complex.validate().iter().map(|v| format!("{v:?}")).collect()
    }

    #[pyo3(signature = (apex=None, tol=1e-11))]
    fn generalized_volume(&self, apex: Option<Vec<f64>>, tol: f64) -> PyResult<f64> {
        let apex = apex.unwrap_or_else(|| {
            let mut o = vec![0.0; self.complex.n() + 1];
            o[0] = 1.0;
            o
        });
        polyhedra::generalized_volume(&self.complex, &self.config, &apex, tol).map_err(err)
    }

    fn total_mean_curvature(&self) -> PyResult<f64> {
        polyhedra::total_mean_curvature(&self.complex, &self.config).map_err(err)
    }

    fn dihedral_angles(&self) -> PyResult<Vec<(Vec<String>, f64)>> {
        let labels = self.complex.labels();
        self.complex
            .ridges()
            .keys()
            .map(|r| {
                let a = polyhedra::oriented_dihedral_angle(&self.complex, &self.config, r).map_err(err)?;
                Ok((r.iter().map(|&v| labels[v].clone()).collect(), a))
            })
            .collect()
    }

    fn flex_dim(&self) -> PyResult<usize> {
        let s = ConstraintSystem::from_configuration(self.complex.clone(), &self.config).map_err(err)?;
        Ok(flexion::flex_analysis(&s, &self.config, None).map_err(err)?.flex_dim)
    }

    /// Traces the flexion that keeps the current edge lengths; returns columns
    /// `t`, `volume`, `tmc`, `max_residual`.
    #[pyo3(signature = (steps=200, step_length=1e-2))]
    fn trace(&self, steps: usize, step_length: f64) -> PyResult<BTreeMap<String, Vec<f64>>> {
        let s = ConstraintSystem::from_configuration(self.complex.clone(), &self.config).map_err(err)?;
        let opts = FlexOptions { steps, step_length, ..FlexOptions::default() };
        let tr = flexion::trace_flexion(&s, &self.config, &opts).map_err(err)?;
        if let Some(msg) = tr.truncated {
            return Err(PyRuntimeError::new_err(format!("trace truncated: {msg}")));
        }
        let col = |f: &dyn Fn(&flexion::FlexionStep) -> f64| tr.steps.iter().map(f).collect::<Vec<_>>();
        Ok(BTreeMap::from([
            ("t".to_string(), col(&|s| s.t)),
            ("volume".to_string(), col(&|s| s.volume)),
            ("tmc".to_string(), col(&|s| s.total_mean_curvature)),
            ("max_residual".to_string(), col(&|s| s.max_residual)),
        ]))
    }
}

/// Continues the volume around the `index`-th elementary loop at the default
/// basepoint; returns `(label, lk with the full-determinant component, V_start, V_end)`.
#[pyfunction]
#[pyo3(signature = (n, space="hyperbolic", index=0))]
fn monodromy(n: usize, space: &str, index: usize) -> PyResult<(String, i64, (f64, f64), (f64, f64))> {
    let sp = self::space(space)?;
    let base = continuation::default_basepoint(n, sp).map_err(err)?;
    let suite = continuation::loop_suite(&base, 0, 0, 0).map_err(err)?;
    let l = suite
        .get(index)
        .ok_or_else(|| PyValueError::new_err(format!("only {} elementary loops", suite.len())))?;
    let (start, end) = continuation::continue_loop(&l.path, sp, 1e-10).map_err(err)?;
    let full = IndexSet::full(n + 1);
    let lk = continuation::linking_table(&l.path)
        .map_err(err)?
        .into_iter()
        .filter(|c| c.component.set == full && (n == 1 || c.component.sign.is_none()))
        .map(|c| c.lk)
        .sum();
    let (a, b) = (start.volume(), end.volume());
    Ok((l.label.clone(), lk, (a.re, a.im), (b.re, b.im)))
}

#[pymodule]
fn bellows_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGram>()?;
    m.add_class::<PyPolyhedron>()?;
    m.add_function(wrap_pyfunction!(regular_simplex, m)?)?;
    m.add_function(wrap_pyfunction!(witness, m)?)?;
    m.add_function(wrap_pyfunction!(monodromy, m)?)?;
    Ok(())
}
