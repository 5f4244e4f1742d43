//! The Bernstein operator on grid functions and its iterates.
//!
//! A function enters the operator only through its values on the grid
//! `{0, 1/n, ..., 1}`, so the natural domain type is [`GridFunction`]:
//! `n + 1` values, nothing else. The operator itself is
//!
//! ```text
//! B_n f(x) = sum_{j=0}^{n} C(n,j) x^j (1-x)^(n-j) f(j/n),
//! ```
//!
//! the expectation of `f(S/n)` for `S` binomial with parameters `(n, x)`.
//! Restricted to the grid, `B_n` is the `(n+1) x (n+1)` row-stochastic
//! matrix `p(i/n, j/n) = C(n,j) (i/n)^j (1-i/n)^(n-j)` ([`TransitionMatrix`]),
//! which is exactly the one-step law of the Wright-Fisher sampling chain.
//! Iterating the matrix therefore iterates the operator, and as `k -> oo`
//! the iterates collapse to the affine interpolant
//! `B_1 f(x) = f(0) + (f(1) - f(0)) x` ([`kelisky_rivlin_limit`]).
//!
//! Iterates are always computed by repeated matrix-vector products, never
//! by forming a dense matrix power: the matrix is applied `k` times to a
//! single vector, which is both faster and, in exact arithmetic, keeps
//! intermediate denominators as small as they can be.

use crate::error::{Error, Result};
use crate::numerics::DensePolynomial;
use crate::scalar::Scalar;

/// Values of a function on the uniform grid `{0, 1/n, ..., 1}`.
///
/// Invariants: `values.len() == n + 1` with `n >= 1`, and every value is
/// finite in float mode.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction<S: Scalar> {
    n: usize,
    values: Vec<S>,
}

impl<S: Scalar> GridFunction<S> {
    pub fn new(values: Vec<S>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::domain(
                "values",
                format!("need at least 2 grid values, got {}", values.len()),
            ));
        }
        if !S::EXACT {
            for v in &values {
                if !v.to_f64().is_finite() {
                    return Err(Error::domain("values", "grid values must be finite"));
                }
            }
        }
        Ok(GridFunction {
            n: values.len() - 1,
            values,
        })
    }

    pub(crate) fn from_values_unchecked(values: Vec<S>) -> Self {
        GridFunction {
            n: values.len() - 1,
            values,
        }
    }

    /// Samples `f` at the grid points `j/n`.
    pub fn from_fn(n: usize, f: impl Fn(&S) -> S) -> Self {
        assert!(n >= 1, "grid needs n >= 1");
        let values = (0..=n)
            .map(|j| f(&S::from_ratio(j as i64, n as i64)))
            .collect();
        GridFunction { n, values }
    }

    /// Values of `x^r` on the grid.
    pub fn monomial_values(n: usize, r: u64) -> Self {
        Self::from_fn(n, |x| x.powu(r))
    }

    /// Values of `a x + b` on the grid.
    pub fn affine(n: usize, a: &S, b: &S) -> Self {
        Self::from_fn(n, |x| a.clone() * x.clone() + b.clone())
    }

    /// Values of `|x - 1/2|` on the grid.
    pub fn abs_half(n: usize) -> Self {
        Self::from_fn(n, |x| (x.clone() - S::from_ratio(1, 2)).abs())
    }

    /// Indicator of the interior: 0 at both endpoints, 1 elsewhere.
    pub fn interior_indicator(n: usize) -> Self {
        assert!(n >= 1);
        let mut values = vec![S::one(); n + 1];
        values[0] = S::zero();
        values[n] = S::zero();
        GridFunction { n, values }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn value(&self, j: usize) -> &S {
        &self.values[j]
    }

    /// The grid point `j/n`.
    pub fn grid_point(&self, j: usize) -> S {
        S::from_ratio(j as i64, self.n as i64)
    }

    /// Largest absolute grid value. For the functions used in this crate
    /// (power functions, `|x - 1/2|`, indicators) this equals the sup
    /// norm over all of `[0, 1]`.
    pub fn sup_norm(&self) -> S {
        let mut best = S::zero();
        for v in &self.values {
            let a = v.abs();
            if a > best {
                best = a;
            }
        }
        best
    }

    pub fn to_f64_grid(&self) -> GridFunction<f64> {
        GridFunction {
            n: self.n,
            values: self.values.iter().map(|v| v.to_f64()).collect(),
        }
    }
}

impl GridFunction<f64> {
    /// Piecewise-linear interpolation between grid values. For a convex
    /// grid function this is the convex function the grid represents.
    pub fn interp(&self, x: f64) -> f64 {
        let t = (x * self.n as f64).clamp(0.0, self.n as f64);
        let j = (t.floor() as usize).min(self.n - 1);
        let frac = t - j as f64;
        self.values[j] + frac * (self.values[j + 1] - self.values[j])
    }
}

/// The weight vector `w_j = C(n,j) x^j (1-x)^(n-j)`, `j = 0..=n`.
///
/// Built by the multiplicative recurrence
/// `w_(j+1) = w_j * ((n-j)/(j+1)) * (x/(1-x))` anchored at whichever
/// endpoint weight is larger, so the recurrence only ever multiplies by
/// the ratio in its stable direction. In float mode, when even the
/// anchor weight underflows (large `n` with `x` away from the ends),
/// the whole vector is accumulated in log space instead; weights that
/// genuinely underflow come out as zero.
pub fn bernstein_weights<S: Scalar>(n: usize, x: &S) -> Result<Vec<S>> {
    if *x < S::zero() || *x > S::one() || (!S::EXACT && !x.to_f64().is_finite()) {
        return Err(Error::domain("x", format!("{x} is not in [0, 1]")));
    }
    if x.is_zero() {
        let mut w = vec![S::zero(); n + 1];
        w[0] = S::one();
        return Ok(w);
    }
    if *x == S::one() {
        let mut w = vec![S::zero(); n + 1];
        w[n] = S::one();
        return Ok(w);
    }
    if !S::EXACT {
        let xf = x.to_f64();
        let anchor_log = (n as f64) * xf.max(1.0 - xf).ln();
        if anchor_log < -700.0 {
            return Ok(log_space_weights(n, xf)
                .into_iter()
                .map(S::from_f64_lossy)
                .collect());
        }
    }
    let one_minus = S::one() - x.clone();
    let mut w = vec![S::zero(); n + 1];
    if *x <= S::from_ratio(1, 2) {
        let ratio = x.clone() / one_minus.clone();
        w[0] = one_minus.powu(n as u64);
        for j in 0..n {
            w[j + 1] = w[j].clone() * S::from_ratio((n - j) as i64, (j + 1) as i64) * ratio.clone();
        }
    } else {
        let ratio = one_minus / x.clone();
        w[n] = x.powu(n as u64);
        for j in (1..=n).rev() {
            w[j - 1] = w[j].clone() * S::from_ratio(j as i64, (n - j + 1) as i64) * ratio.clone();
        }
    }
    Ok(w)
}

/// Log-space fallback: `ln w_j = ln C(n,j) + j ln x + (n-j) ln(1-x)`,
/// with the log-binomial built by its own recurrence so no factorial is
/// ever materialized.
fn log_space_weights(n: usize, x: f64) -> Vec<f64> {
    let (lx, l1x) = (x.ln(), (1.0 - x).ln());
    let mut w = Vec::with_capacity(n + 1);
    let mut log_binom = 0.0;
    for j in 0..=n {
        if j > 0 {
            log_binom += ((n - j + 1) as f64).ln() - (j as f64).ln();
        }
        w.push((log_binom + j as f64 * lx + (n - j) as f64 * l1x).exp());
    }
    w
}

/// `B_n f(x)` for a grid function `f` with `n` inferred from the grid.
pub fn apply_bernstein<S: Scalar>(f: &GridFunction<S>, x: &S) -> Result<S> {
    let w = bernstein_weights(f.n(), x)?;
    let mut acc = S::zero();
    for (wj, fj) in w.iter().zip(f.values()) {
        if !wj.is_zero() {
            acc = acc + wj.clone() * fj.clone();
        }
    }
    Ok(acc)
}

/// One-step transition matrix of the Wright-Fisher sampling chain on the
/// grid: row `i` holds the binomial law with success probability `i/n`.
///
/// Rows 0 and `n` are unit vectors (the absorbing states) and every row
/// sums to one exactly in rational mode.
#[derive(Debug, Clone)]
pub struct TransitionMatrix<S: Scalar> {
    n: usize,
    rows: Vec<Vec<S>>,
}

impl<S: Scalar> TransitionMatrix<S> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.rows[i]
    }

    pub fn entry(&self, i: usize, j: usize) -> &S {
        &self.rows[i][j]
    }

    /// Matrix-vector product `(Pv)_i = sum_j p(i,j) v_j`, one operator
    /// application on grid values.
    pub fn apply(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.n + 1, "vector length must match grid");
        self.rows
            .iter()
            .map(|row| {
                let mut acc = S::zero();
                for (p, vj) in row.iter().zip(v) {
                    if !p.is_zero() {
                        acc = acc + p.clone() * vj.clone();
                    }
                }
                acc
            })
            .collect()
    }
}

/// Builds the transition matrix for grid size `n >= 1`.
pub fn transition_matrix<S: Scalar>(n: usize) -> Result<TransitionMatrix<S>> {
    if n < 1 {
        return Err(Error::domain("n", "need n >= 1"));
    }
    let rows = (0..=n)
        .map(|i| bernstein_weights(n, &S::from_ratio(i as i64, n as i64)))
        .collect::<Result<Vec<_>>>()?;
    Ok(TransitionMatrix { n, rows })
}

/// Grid values of `B_n^k f`, by `k` matrix-vector products. `k = 0`
/// returns the input unchanged.
pub fn iterate_grid<S: Scalar>(f: &GridFunction<S>, k: usize) -> GridFunction<S> {
    if k == 0 {
        return f.clone();
    }
    let p = transition_matrix::<S>(f.n()).expect("grid function has n >= 1");
    let mut v = f.values().to_vec();
    for _ in 0..k {
        v = p.apply(&v);
    }
    GridFunction::from_values_unchecked(v)
}

/// `B_n^k f(x)` at arbitrary `x in [0, 1]`, for `k >= 1`: the first
/// `k - 1` applications stay on the grid, the last one evaluates off
/// the grid through the weight vector at `x`.
pub fn iterate_eval<S: Scalar>(f: &GridFunction<S>, k: usize, x: &S) -> Result<S> {
    if k < 1 {
        return Err(Error::domain("k", "need k >= 1"));
    }
    let g = iterate_grid(f, k - 1);
    apply_bernstein(&g, x)
}

/// The `k -> oo` limit of the iterates: the affine interpolant between
/// the endpoint values, `f(0) + (f(1) - f(0)) x`.
pub fn kelisky_rivlin_limit<S: Scalar>(f: &GridFunction<S>) -> DensePolynomial<S> {
    let f0 = f.value(0).clone();
    let f1 = f.value(f.n()).clone();
    DensePolynomial::new(vec![f0.clone(), f1 - f0])
}

/// Exact first derivative of `B_n f` at `x`:
///
/// ```text
/// (B_n f)'(x) = n * sum_j C(n-1,j) x^j (1-x)^(n-1-j) [f((j+1)/n) - f(j/n)],
/// ```
///
/// the expectation of the scaled forward difference along a binomial
/// with one fewer trial.
pub fn bernstein_first_derivative<S: Scalar>(f: &GridFunction<S>, x: &S) -> Result<S> {
    let n = f.n();
    let w = bernstein_weights(n - 1, x)?;
    let mut acc = S::zero();
    for (j, wj) in w.iter().enumerate() {
        if !wj.is_zero() {
            acc = acc + wj.clone() * (f.value(j + 1).clone() - f.value(j).clone());
        }
    }
    Ok(S::from_int(n as i64) * acc)
}

/// Exact second derivative of `B_n f` at `x`:
///
/// ```text
/// (B_n f)''(x) = n(n-1) * E[ f((S+2)/n) - 2 f((S+1)/n) + f(S/n) ],
/// ```
///
/// with `S` binomial on `n - 2` trials. Nonnegative second differences
/// of `f` therefore give a convex image. For `n = 1` the image is affine
/// and the result is zero.
pub fn bernstein_second_derivative<S: Scalar>(f: &GridFunction<S>, x: &S) -> Result<S> {
    let n = f.n();
    if n < 2 {
        bernstein_weights(0, x)?; // still validate x
        return Ok(S::zero());
    }
    let w = bernstein_weights(n - 2, x)?;
    let mut acc = S::zero();
    for (j, wj) in w.iter().enumerate() {
        if !wj.is_zero() {
            let second = f.value(j + 2).clone() - S::from_int(2) * f.value(j + 1).clone()
                + f.value(j).clone();
            acc = acc + wj.clone() * second;
        }
    }
    Ok(S::from_int((n * (n - 1)) as i64) * acc)
}
