//! Python bindings. Posets, measures and systems are exchanged as text in
//! the command-line file formats; rationals travel as strings like `"1/3"`.

use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use ::posetmono::classify::{has_acyclic_extension, is_acyclic, is_w_class, is_y_class, verdict};
use ::posetmono::feasibility::{is_realizably_monotone, max_theta, strassen_lp};
use ::posetmono::fixtures::{all_fixtures, check_fixture, fixture_by_name};
use ::posetmono::format;
use ::posetmono::markov::{decompose_generator, massey_check, uniformize};
use ::posetmono::measures::{stoch_leq, system_is_stoch_monotone, violating_up_set, Measure};
use ::posetmono::poset::{Poset, DEFAULT_MAP_BOUND};
use ::posetmono::rational;

fn err(e: ::posetmono::error::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "Poset", frozen)]
struct PyPoset {
    inner: Poset,
}

#[pymethods]
impl PyPoset {
    #[new]
    fn new(elements: Vec<String>, covers: Vec<(String, String)>) -> PyResult<Self> {
        Ok(PyPoset { inner: Poset::from_cover_edges(&elements, &covers).map_err(err)? })
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(PyPoset { inner: format::parse_poset(text).map_err(err)? })
    }

    fn to_text(&self) -> String {
        format::poset_to_text(&self.inner)
    }

    fn elements(&self) -> Vec<String> {
        self.inner.names().to_vec()
    }

    fn covers(&self) -> Vec<(String, String)> {
        self.inner.cover_names()
    }

    fn leq(&self, x: &str, y: &str) -> PyResult<bool> {
        let p = &self.inner;
        Ok(p.leq(p.require(x).map_err(err)?, p.require(y).map_err(err)?))
    }

    fn dual(&self) -> Self {
        PyPoset { inner: self.inner.dual() }
    }

    fn up_sets(&self) -> Vec<Vec<String>> {
        self.inner.up_sets().iter().map(|&u| self.inner.set_names(u)).collect()
    }

    /// One of `Acyclic`, `YGluedBipartite`, `WGluedDiamond`, `Fails`.
    fn verdict(&self) -> PyResult<&'static str> {
        Ok(verdict(&self.inner).map_err(err)?.kind.as_str())
    }

    fn is_acyclic(&self) -> bool {
        is_acyclic(&self.inner)
    }

    fn is_y_class(&self) -> bool {
        is_y_class(&self.inner)
    }

    fn is_w_class(&self) -> bool {
        is_w_class(&self.inner)
    }

    fn has_acyclic_extension(&self) -> bool {
        has_acyclic_extension(&self.inner)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }
}

fn measure(p: &Poset, masses: BTreeMap<String, String>) -> PyResult<Measure> {
    let mut m = Measure::zeros(p.len());
    for (x, q) in masses {
        m.add_at(p.require(&x).map_err(err)?, &rational::parse(&q).map_err(err)?);
    }
    Ok(m)
}

/// Whether `p ⪯ q`; both are maps from element names to masses.
#[pyfunction]
fn stochastically_leq(poset: PyRef<'_, PyPoset>, p: BTreeMap<String, String>, q: BTreeMap<String, String>) -> PyResult<bool> {
    let s = &poset.inner;
    stoch_leq(s, &measure(s, p)?, &measure(s, q)?).map_err(err)
}

/// An up-set `U` with `p(U) > q(U)`, if any.
#[pyfunction]
fn violating_set(
    poset: PyRef<'_, PyPoset>,
    p: BTreeMap<String, String>,
    q: BTreeMap<String, String>,
) -> PyResult<Option<Vec<String>>> {
    let s = &poset.inner;
    let u = violating_up_set(s, &measure(s, p)?, &measure(s, q)?).map_err(err)?;
    Ok(u.map(|u| s.set_names(u)))
}

/// An ordered coupling of `p ⪯ q` as `(x, y, weight)` triples.
#[pyfunction]
fn couple(
    poset: PyRef<'_, PyPoset>,
    p: BTreeMap<String, String>,
    q: BTreeMap<String, String>,
) -> PyResult<Option<Vec<(String, String, String)>>> {
    let s = &poset.inner;
    let c = strassen_lp(s, &measure(s, p)?, &measure(s, q)?).map_err(err)?;
    Ok(c.map(|c| {
        c.weights
            .iter()
            .map(|(&(x, y), w)| (s.name(x).to_string(), s.name(y).to_string(), rational::format(w)))
            .collect()
    }))
}

#[pyfunction]
fn is_stochastically_monotone(poset: PyRef<'_, PyPoset>, system: &str) -> PyResult<bool> {
    let sys = format::parse_system(system, &poset.inner).map_err(err)?;
    system_is_stoch_monotone(&sys).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (poset, system, bound = DEFAULT_MAP_BOUND))]
fn is_realizable(poset: PyRef<'_, PyPoset>, system: &str, bound: usize) -> PyResult<bool> {
    let sys = format::parse_system(system, &poset.inner).map_err(err)?;
    Ok(is_realizably_monotone(&sys, bound).map_err(err)?.is_some())
}

/// The largest mixing weight for which the weak combination is realizable.
#[pyfunction]
#[pyo3(signature = (poset, system, bound = DEFAULT_MAP_BOUND))]
fn weak_theta(poset: PyRef<'_, PyPoset>, system: &str, bound: usize) -> PyResult<String> {
    let sys = format::parse_system(system, &poset.inner).map_err(err)?;
    Ok(rational::format(&max_theta(&sys, bound).map_err(err)?.0))
}

#[pyfunction]
fn massey(generator: &str) -> PyResult<bool> {
    Ok(massey_check(&format::parse_generator(generator).map_err(err)?))
}

/// Rows of `I + L / lambda`, with `lambda` defaulting to twice the largest
/// exit rate.
#[pyfunction]
#[pyo3(signature = (generator, rate = None))]
fn uniformized(generator: &str, rate: Option<&str>) -> PyResult<Vec<Vec<String>>> {
    let g = format::parse_generator(generator).map_err(err)?;
    let lambda = match rate {
        Some(r) => rational::parse(r).map_err(err)?,
        None => g.default_rate(),
    };
    let k = uniformize(&g, &lambda).map_err(err)?;
    Ok(k.members().iter().map(|m| m.0.iter().map(rational::format).collect()).collect())
}

/// Jump rates on monotone maps, as `(images, rate)` with images listed in
/// element order; `None` if the generator has no such decomposition.
#[pyfunction]
#[pyo3(signature = (generator, bound = DEFAULT_MAP_BOUND))]
fn decompose(generator: &str, bound: usize) -> PyResult<Option<Vec<(Vec<String>, String)>>> {
    let g = format::parse_generator(generator).map_err(err)?;
    let p = g.states();
    let gamma = decompose_generator(&g, bound).map_err(err)?;
    Ok(gamma.map(|gamma| {
        gamma
            .iter()
            .map(|(h, w)| (h.0.iter().map(|&y| p.name(y).to_string()).collect(), rational::format(w)))
            .collect()
    }))
}

#[pyfunction]
fn fixture_names() -> Vec<&'static str> {
    all_fixtures().iter().map(|f| f.name).collect()
}

/// Whether the named fixture is stochastically monotone with `max_theta = 0`.
#[pyfunction]
fn fixture_holds(name: &str) -> PyResult<bool> {
    let f = fixture_by_name(name).ok_or_else(|| PyValueError::new_err(format!("unknown fixture `{name}`")))?;
    Ok(check_fixture(&f, DEFAULT_MAP_BOUND).map_err(err)?.passed(&f))
}

#[pymodule]
fn posetmono(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPoset>()?;
    m.add_function(wrap_pyfunction!(stochastically_leq, m)?)?;
    m.add_function(wrap_pyfunction!(violating_set, m)?)?;
    m.add_function(wrap_pyfunction!(couple, m)?)?;
    m.add_function(wrap_pyfunction!(is_stochastically_monotone, m)?)?;
    m.add_function(wrap_pyfunction!(is_realizable, m)?)?;
    m.add_function(wrap_pyfunction!(weak_theta, m)?)?;
    m.add_function(wrap_pyfunction!(massey, m)?)?;
    m.add_function(wrap_pyfunction!(uniformized, m)?)?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(fixture_names, m)?)?;
    m.add_function(wrap_pyfunction!(fixture_holds, m)?)?;
    Ok(())
}
