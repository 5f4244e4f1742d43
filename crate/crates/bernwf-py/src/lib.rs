//! Python bindings for the operator, chain, and diffusion toolkit.
//!
//! The module exposes the float route of the core library: a
//! `GridFunction` class carrying values on the grid {0, 1/n, ..., 1}
//! with operator application and iteration, plus module-level
//! functions for the absorption probabilities, their decay bound, the
//! closed-form diffusion moments, the two Monte Carlo drivers, and
//! the full verification suite. Exact rational internals stay in
//! Rust; `beta_str` renders them as `p/q` strings where the exactness
//! itself is the point.
//!
//! Every fallible call raises `ValueError` carrying the library's
//! parameter-naming error message.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use bernwf::bernstein::{
    apply_bernstein, bernstein_first_derivative, bernstein_second_derivative, iterate_eval,
    iterate_grid, kelisky_rivlin_limit,
};
use bernwf::rates::binomial_fourth_moment;
use bernwf::wf_chain::RandomStream;
use bernwf::{acceptance, bernstein, rates, wf_chain, wf_diffusion};

fn err(e: bernwf::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A function given by its values on the uniform grid {0, 1/n, ..., 1}.
#[pyclass]
struct GridFunction {
    inner: bernstein::GridFunction<f64>,
}

#[pymethods]
impl GridFunction {
    /// Builds a grid function from n+1 values; the grid size is
    /// inferred from the length.
    #[new]
    fn new(values: Vec<f64>) -> PyResult<Self> {
        Ok(GridFunction {
            inner: bernstein::GridFunction::new(values).map_err(err)?,
        })
    }

    /// x^r sampled on an n-interval grid.
    #[staticmethod]
    fn monomial(n: usize, r: u64) -> PyResult<Self> {
        check_grid_n(n)?;
        Ok(GridFunction {
            inner: bernstein::GridFunction::monomial_values(n, r),
        })
    }

    /// |x - 1/2| sampled on an n-interval grid.
    #[staticmethod]
    fn abs_half(n: usize) -> PyResult<Self> {
        check_grid_n(n)?;
        Ok(GridFunction {
            inner: bernstein::GridFunction::abs_half(n),
        })
    }

    /// a x + b sampled on an n-interval grid.
    #[staticmethod]
    fn affine(n: usize, a: f64, b: f64) -> PyResult<Self> {
        check_grid_n(n)?;
        Ok(GridFunction {
            inner: bernstein::GridFunction::affine(n, &a, &b),
        })
    }

    /// Number of grid intervals.
    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    fn sup_norm(&self) -> f64 {
        self.inner.sup_norm()
    }

    /// B_n f at x.
    fn apply(&self, x: f64) -> PyResult<f64> {
        apply_bernstein(&self.inner, &x).map_err(err)
    }

    /// Grid values of B_n^k f (k = 0 returns a copy of f).
    fn iterate(&self, k: usize) -> Self {
        GridFunction {
            inner: iterate_grid(&self.inner, k),
        }
    }

    /// B_n^k f at x, for k >= 1.
    fn iterate_eval(&self, k: usize, x: f64) -> PyResult<f64> {
        iterate_eval(&self.inner, k, &x).map_err(err)
    }

    /// Coefficients (c0, c1) of the straight line c0 + c1 x that the
    /// iterates converge to: f(0) + (f(1) - f(0)) x.
    fn kr_limit(&self) -> (f64, f64) {
        let p = kelisky_rivlin_limit(&self.inner);
        (p.coeff(0), p.coeff(1))
    }

    /// (B_n f)'(x), exact for the grid data.
    fn derivative(&self, x: f64) -> PyResult<f64> {
        bernstein_first_derivative(&self.inner, &x).map_err(err)
    }

    /// (B_n f)''(x); nonnegative everywhere when f is convex.
    fn second_derivative(&self, x: f64) -> PyResult<f64> {
        bernstein_second_derivative(&self.inner, &x).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "GridFunction(n={}, values={:?})",
            self.inner.n(),
            self.inner.values()
        )
    }
}

fn check_grid_n(n: usize) -> PyResult<()> {
    if n < 1 {
        return Err(PyValueError::new_err(
            "parameter `n` out of domain: need n >= 1",
        ));
    }
    Ok(())
}

/// Probability of not being absorbed after k steps, started on the
/// grid: one float per start point j/n.
#[pyfunction]
fn beta(n: usize, k: usize) -> PyResult<Vec<f64>> {
    Ok(wf_chain::beta_exact(n, k)
        .map_err(err)?
        .values()
        .iter()
        .map(bernwf::Scalar::to_f64)
        .collect())
}

/// Same probabilities as exact `p/q` strings.
#[pyfunction]
fn beta_str(n: usize, k: usize) -> PyResult<Vec<String>> {
    Ok(wf_chain::beta_exact(n, k)
        .map_err(err)?
        .values()
        .iter()
        .map(|v| v.to_string())
        .collect())
}

/// Closed-form decay bound n (1 - 1/n)^(k-1) x (1 - x).
#[pyfunction]
fn beta_upper_bound(n: usize, k: usize, x: f64) -> PyResult<f64> {
    wf_chain::beta_upper_bound(n, k, &x).map_err(err)
}

/// Iterate-error bound 2 sup|f| n (1 - 1/n)^(k-1) x (1 - x).
#[pyfunction]
fn kr_error_bound(f_sup: f64, n: usize, k: usize, x: f64) -> PyResult<f64> {
    wf_chain::kr_error_bound(&f_sup, n, k, &x).map_err(err)
}

/// Closed-form diffusion moment E[X_t^r | X_0 = x].
#[pyfunction]
fn moment_eval(r: usize, t: f64, x: f64) -> PyResult<f64> {
    wf_diffusion::moment_eval(r, t, x).map_err(err)
}

/// Exact comparison of the two moment-coefficient routes for all
/// orders up to r_max; returns (triples checked, failures).
#[pyfunction]
fn coefficient_identity_check(r_max: usize) -> PyResult<(usize, usize)> {
    let report = wf_diffusion::coefficient_identity_check(r_max).map_err(err)?;
    Ok((report.triples, report.failures.len()))
}

/// E (S_n - n x)^4 for S_n binomial(n, x).
#[pyfunction]
fn fourth_moment(n: usize, x: f64) -> PyResult<f64> {
    binomial_fourth_moment(n, &x).map_err(err)
}

/// Monte Carlo estimate of the absorption-at-1 probability. Returns
/// (estimate, std_error, absorbed, censored).
#[pyfunction]
#[pyo3(signature = (n, x0, replicas, max_steps=10_000, seed=bernwf::DEFAULT_SEED))]
fn absorption_prob_mc(
    n: usize,
    x0: f64,
    replicas: u64,
    max_steps: usize,
    seed: u64,
) -> PyResult<(f64, f64, u64, u64)> {
    let stream = RandomStream::new(seed);
    let est = wf_chain::absorption_prob_mc(n, x0, replicas, max_steps, &stream).map_err(err)?;
    Ok((est.estimate, est.std_error, est.absorbed, est.censored))
}

/// One Euler-Maruyama path of the diffusion, recorded at every step;
/// index m corresponds to time m*dt.
#[pyfunction]
#[pyo3(signature = (x0, t_end, dt, seed=bernwf::DEFAULT_SEED))]
fn euler_maruyama(x0: f64, t_end: f64, dt: f64, seed: u64) -> PyResult<Vec<f64>> {
    let stream = RandomStream::new(seed);
    Ok(wf_diffusion::euler_maruyama(x0, t_end, dt, &stream)
        .map_err(err)?
        .values)
}

/// Exact tail probability P(|S_n/n - y| > eps) for S_n binomial(n, y),
/// with eps and y given as exact fractions (num, den).
#[pyfunction]
fn tail_probability(n: usize, eps: (i64, i64), y: (i64, i64)) -> PyResult<f64> {
    let to_rat = |(p, q): (i64, i64), name: &str| -> PyResult<bernwf::Rational> {
        if q == 0 {
            return Err(PyValueError::new_err(format!(
                "parameter `{name}` out of domain: zero denominator"
            )));
        }
        Ok(<bernwf::Rational as bernwf::Scalar>::from_ratio(p, q))
    };
    let eps = to_rat(eps, "eps")?;
    let y = to_rat(y, "y")?;
    let tail = rates::empirical_tail_probability(n, &eps, &y).map_err(err)?;
    Ok(bernwf::Scalar::to_f64(&tail))
}

/// Runs the full verification suite; returns one
/// (id, name, passed, details) tuple per criterion.
#[pyfunction]
#[pyo3(signature = (seed=bernwf::DEFAULT_SEED))]
fn run_acceptance(seed: u64) -> Vec<(usize, String, bool, String)> {
    acceptance::run_all(seed)
        .into_iter()
        .map(|r| (r.id, r.name.to_string(), r.passed, r.details))
        .collect()
}

#[pymodule]
fn bernwf_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("DEFAULT_SEED", bernwf::DEFAULT_SEED)?;
    m.add_class::<GridFunction>()?;
    m.add_function(wrap_pyfunction!(beta, m)?)?;
    m.add_function(wrap_pyfunction!(beta_str, m)?)?;
    m.add_function(wrap_pyfunction!(beta_upper_bound, m)?)?;
    m.add_function(wrap_pyfunction!(kr_error_bound, m)?)?;
    m.add_function(wrap_pyfunction!(moment_eval, m)?)?;
    m.add_function(wrap_pyfunction!(coefficient_identity_check, m)?)?;
    m.add_function(wrap_pyfunction!(fourth_moment, m)?)?;
    m.add_function(wrap_pyfunction!(absorption_prob_mc, m)?)?;
    m.add_function(wrap_pyfunction!(euler_maruyama, m)?)?;
    m.add_function(wrap_pyfunction!(tail_probability, m)?)?;
    m.add_function(wrap_pyfunction!(run_acceptance, m)?)?;
    Ok(())
}
