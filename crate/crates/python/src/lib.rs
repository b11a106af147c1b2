//! Python bindings: `import housing`.
//!
//! Permutations may be passed as `housing.Permutation` objects or as plain
//! sequences of 1-based integers; exact rationals come back as
//! `fractions.Fraction`.

use housing_core::exact_stats;
use housing_core::experiments::{self, RankConvention, SimulationMethod};
use housing_core::{self as core, format_rational, ExactRational};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyAny;

create_exception!(housing, HousingError, PyValueError, "Invalid input to a housing operation.");

fn err(e: core::Error) -> PyErr {
    HousingError::new_err(e.to_string())
}

#[pyclass(name = "Permutation", module = "housing", frozen, eq, hash, skip_from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PyPermutation(core::Permutation);

#[pymethods]
impl PyPermutation {
    #[new]
    fn new(values: Vec<usize>) -> PyResult<Self> {
        core::Permutation::new(values).map(PyPermutation).map_err(err)
    }

    #[staticmethod]
    fn identity(n: usize) -> Self {
        PyPermutation(core::Permutation::identity(n))
    }

    /// Parse `"5,3,4"`.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        core::Permutation::parse_list(text).map(PyPermutation).map_err(err)
    }

    #[staticmethod]
    fn from_lex_rank(n: usize, rank: u64) -> PyResult<Self> {
        core::Permutation::from_lex_rank(n, rank).map(PyPermutation).map_err(err)
    }

    #[getter]
    fn values(&self) -> Vec<usize> {
        self.0.as_slice().to_vec()
    }

    fn inverse(&self) -> Self {
        PyPermutation(self.0.inverse())
    }

    /// `self ∘ other`.
    fn compose(&self, other: &Bound<'_, PyAny>) -> PyResult<Self> {
        self.0.compose(&perm_arg(other)?).map(PyPermutation).map_err(err)
    }

    fn lex_rank(&self) -> u64 {
        self.0.lex_rank()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __getitem__(&self, k: usize) -> PyResult<usize> {
        if k == 0 || k > self.0.len() {
            return Err(pyo3::exceptions::PyIndexError::new_err("positions are 1-based"));
        }
        Ok(self.0.at(k))
    }

    fn __repr__(&self) -> String {
        format!("Permutation({:?})", self.0.as_slice())
    }
}

fn perm_arg(obj: &Bound<'_, PyAny>) -> PyResult<core::Permutation> {
    if let Ok(p) = obj.cast::<PyPermutation>() {
        return Ok(p.get().0.clone());
    }
    core::Permutation::new(obj.extract::<Vec<usize>>()?).map_err(err)
}

#[pyclass(name = "Profile", module = "housing", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq, Eq)]
pub struct PyProfile(core::PreferenceProfile);

#[pymethods]
impl PyProfile {
    /// `rows[k-1]` is trader k's list of goods, best first.
    #[new]
    fn new(rows: Vec<Vec<usize>>) -> PyResult<Self> {
        core::validate_profile(rows).map(PyProfile).map_err(err)
    }

    /// Parse the text format: `n`, then n rows of n integers.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        core::PreferenceProfile::parse(text).map(PyProfile).map_err(err)
    }

    #[staticmethod]
    fn random(n: usize, seed: u64) -> PyResult<Self> {
        experiments::random_profile(n, &mut experiments::block_rng(seed, 0))
            .map(PyProfile)
            .map_err(err)
    }

    #[staticmethod]
    fn cyclic(n: usize) -> PyResult<Self> {
        experiments::cyclic_girls(n).map(PyProfile).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn rows(&self) -> Vec<Vec<usize>> {
        self.0.to_vecs()
    }

    fn rank_of(&self, trader: usize, good: usize) -> PyResult<usize> {
        if trader == 0 || trader > self.0.n() || good == 0 || good > self.0.n() {
            return Err(HousingError::new_err("trader and good must lie in 1..=n"));
        }
        Ok(self.0.rank_of(trader, good))
    }

    fn to_text(&self) -> String {
        self.0.to_text()
    }

    /// Trader `sigma(k)` receives list k.
    fn shuffle(&self, sigma: &Bound<'_, PyAny>) -> PyResult<Self> {
        core::shuffle_profile(&self.0, &perm_arg(sigma)?).map(PyProfile).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Profile({:?})", self.0.to_vecs())
    }
}

#[pyclass(name = "Allocation", module = "housing", frozen, get_all)]
pub struct PyAllocation {
    /// `goods[k-1]` is trader k's good.
    goods: Vec<usize>,
    /// `ranks[k-1]` is the position of that good in trader k's list.
    ranks: Vec<usize>,
}

#[pymethods]
impl PyAllocation {
    #[getter]
    fn rank_sum(&self) -> usize {
        self.ranks.iter().sum()
    }

    fn __repr__(&self) -> String {
        format!("Allocation(goods={:?}, ranks={:?})", self.goods, self.ranks)
    }
}

impl From<core::AllocationResult> for PyAllocation {
    fn from(a: core::AllocationResult) -> Self {
        PyAllocation {
            goods: a.goods.into_vec(),
            ranks: a.ranks,
        }
    }
}

fn fraction<'py>(py: Python<'py>, x: &ExactRational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((format_rational(x),))
}

#[pyfunction]
fn stable_allocation(p: &PyProfile) -> PyAllocation {
    core::stable_allocation(&p.0).into()
}

#[pyfunction]
fn uniform_hash_allocation(p: &PyProfile, priority: &Bound<'_, PyAny>) -> PyResult<PyAllocation> {
    Ok(core::uniform_hash_allocation(&p.0, &perm_arg(priority)?).map_err(err)?.into())
}

#[pyfunction]
fn is_core_allocation(p: &PyProfile, goods: &Bound<'_, PyAny>) -> PyResult<bool> {
    core::is_core_allocation(&p.0, &perm_arg(goods)?).map_err(err)
}

#[pyfunction]
fn is_locally_optimal(p: &PyProfile, goods: &Bound<'_, PyAny>) -> PyResult<bool> {
    core::is_locally_optimal(&p.0, &perm_arg(goods)?).map_err(err)
}

/// A priority whose first-come first-served allocation is `goods`.
#[pyfunction]
fn priority_reconstruction(p: &PyProfile, goods: &Bound<'_, PyAny>) -> PyResult<PyPermutation> {
    core::priority_reconstruction(&p.0, &perm_arg(goods)?)
        .map(PyPermutation)
        .map_err(err)
}

#[pyfunction]
fn pi_to_sigma(p: &PyProfile, pi: &Bound<'_, PyAny>) -> PyResult<PyPermutation> {
    core::pi_to_sigma(&p.0, &perm_arg(pi)?).map(PyPermutation).map_err(err)
}

#[pyfunction]
fn sigma_to_pi(p: &PyProfile, sigma: &Bound<'_, PyAny>) -> PyResult<PyPermutation> {
    core::sigma_to_pi(&p.0, &perm_arg(sigma)?).map(PyPermutation).map_err(err)
}

#[pyfunction]
fn is_consistent(p: &PyProfile, pi: &Bound<'_, PyAny>, sigma: &Bound<'_, PyAny>) -> PyResult<bool> {
    core::is_consistent(&p.0, &perm_arg(pi)?, &perm_arg(sigma)?).map_err(err)
}

#[pyfunction]
fn expected_rank_sum(py: Python<'_>, n: usize) -> PyResult<Bound<'_, PyAny>> {
    fraction(py, &exact_stats::expected_rank_sum(n).map_err(err)?)
}

#[pyfunction]
fn expected_square_sum(py: Python<'_>, n: usize) -> PyResult<Bound<'_, PyAny>> {
    fraction(py, &exact_stats::expected_square_sum(n).map_err(err)?)
}

#[pyfunction]
fn rank_sum_variance(py: Python<'_>, n: usize) -> PyResult<Bound<'_, PyAny>> {
    fraction(py, &exact_stats::rank_sum_variance(n).map_err(err)?)
}

/// Coefficients of E ∏(z + r_k), lowest power first.
#[pyfunction]
fn expected_rank_poly(py: Python<'_>, n: usize) -> PyResult<Vec<Bound<'_, PyAny>>> {
    let poly = exact_stats::expected_rank_poly(n).map_err(err)?;
    poly.coefficients().iter().map(|c| fraction(py, c)).collect()
}

#[pyfunction]
fn max_rank_at_most(py: Python<'_>, n: usize, m: usize) -> PyResult<Bound<'_, PyAny>> {
    fraction(py, &exact_stats::max_rank_at_most(n, m).map_err(err)?)
}

#[pyfunction]
fn stirling_cycle(n: usize, k: usize) -> PyResult<String> {
    Ok(exact_stats::stirling_cycle(n, k).map_err(err)?.to_string())
}

#[pyfunction]
#[pyo3(signature = (n, order = 1))]
fn harmonic(py: Python<'_>, n: usize, order: u32) -> PyResult<Bound<'_, PyAny>> {
    fraction(py, &exact_stats::harmonic(n, order).map_err(err)?)
}

fn convention(name: &str) -> PyResult<RankConvention> {
    match name {
        "zero-based" => Ok(RankConvention::ZeroBased),
        "one-based" => Ok(RankConvention::OneBased),
        other => Err(HousingError::new_err(format!("unknown convention {other:?}"))),
    }
}

/// Rank total of the boy-optimal matching over all boys' matrices.
#[pyfunction]
#[pyo3(signature = (girls, convention = "zero-based", long_run = false))]
fn total_marriage_rank_sum(py: Python<'_>, girls: &PyProfile, convention: &str, long_run: bool) -> PyResult<u128> {
    let conv = self::convention(convention)?;
    let total = py
        .detach(|| experiments::total_marriage_rank_sum(&girls.0, conv, long_run))
        .map_err(err)?;
    Ok(total.try_into().expect("totals fit in 128 bits"))
}

#[pyfunction]
fn girls_canonical_form(girls: &PyProfile) -> PyResult<PyProfile> {
    experiments::girls_canonical_form(&girls.0).map(PyProfile).map_err(err)
}

/// Seeded Monte-Carlo summary as a dict. `method` is `"stable"`, `"hash"`
/// (with `priority`), `"marriage-fixed-girls"` (with `girls`) or
/// `"marriage-random-girls"`.
#[pyfunction]
#[pyo3(signature = (n, samples, seed, method = "stable", priority = None, girls = None))]
fn monte_carlo_summary<'py>(
    py: Python<'py>,
    n: usize,
    samples: u64,
    seed: u64,
    method: &str,
    priority: Option<&Bound<'py, PyAny>>,
    girls: Option<&PyProfile>,
) -> PyResult<Bound<'py, PyAny>> {
    let method = match method {
        "stable" => SimulationMethod::Stable,
        "hash" => SimulationMethod::Hash(match priority {
            Some(p) => perm_arg(p)?,
            None => core::Permutation::identity(n),
        }),
        "marriage-fixed-girls" => SimulationMethod::MarriageFixedGirls(
            girls
                .ok_or_else(|| HousingError::new_err("girls is required"))?
                .0
                .clone(),
        ),
        "marriage-random-girls" => SimulationMethod::MarriageRandomGirls,
        other => return Err(HousingError::new_err(format!("unknown method {other:?}"))),
    };
    let summary = py
        .detach(|| experiments::monte_carlo_summary(n, samples, seed, &method))
        .map_err(err)?;
    let text = serde_json::to_string(&summary).map_err(|e| HousingError::new_err(e.to_string()))?;
    py.import("json")?.getattr("loads")?.call1((text,))
}

#[pymodule]
fn housing(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("HousingError", m.py().get_type::<HousingError>())?;
    m.add_class::<PyPermutation>()?;
    m.add_class::<PyProfile>()?;
    m.add_class::<PyAllocation>()?;
    m.add_function(wrap_pyfunction!(stable_allocation, m)?)?;
    m.add_function(wrap_pyfunction!(uniform_hash_allocation, m)?)?;
    m.add_function(wrap_pyfunction!(is_core_allocation, m)?)?;
    m.add_function(wrap_pyfunction!(is_locally_optimal, m)?)?;
    m.add_function(wrap_pyfunction!(priority_reconstruction, m)?)?;
    m.add_function(wrap_pyfunction!(pi_to_sigma, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_to_pi, m)?)?;
    m.add_function(wrap_pyfunction!(is_consistent, m)?)?;
    m.add_function(wrap_pyfunction!(expected_rank_sum, m)?)?;
    m.add_function(wrap_pyfunction!(expected_square_sum, m)?)?;
    m.add_function(wrap_pyfunction!(rank_sum_variance, m)?)?;
    m.add_function(wrap_pyfunction!(expected_rank_poly, m)?)?;
    m.add_function(wrap_pyfunction!(max_rank_at_most, m)?)?;
    m.add_function(wrap_pyfunction!(stirling_cycle, m)?)?;
    m.add_function(wrap_pyfunction!(harmonic, m)?)?;
    m.add_function(wrap_pyfunction!(total_marriage_rank_sum, m)?)?;
    m.add_function(wrap_pyfunction!(girls_canonical_form, m)?)?;
    m.add_function(wrap_pyfunction!(monte_carlo_summary, m)?)?;
    Ok(())
}
