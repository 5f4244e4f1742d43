//! The acceptance gate: eleven end-to-end checks, each tying one load
//! bearing claim of the library to an independent oracle.
//!
//! The checks, in order:
//!
//!  1. The two moment-coefficient formulas agree term by term in exact
//!     rationals through degree 10 (220 triples).
//!  2. Iterates of the operator reproduce the closed form
//!     `B_n^k(x^2) = (1-1/n)^k x^2 + (1-(1-1/n)^k) x`, in float to
//!     1e-12 and exactly in rationals, with the error to the affine
//!     limit shrinking by exactly `(n-1)/n` per step.
//!  3. The exact non-absorption probability `beta(k, x)` stays below
//!     `n(1-1/n)^(k-1) x(1-x)` at every grid point, and the iterate
//!     error stays below `2*||f||*beta(k, x)`, all in rationals.
//!  4. Voronovskaya: the residual `|n(B_n p - p) - Lp|` vanishes
//!     identically for quadratics, obeys its `n^(-1/2)` bound for
//!     `x^4`, and `n*||B_n x^3 - x^3|| -> ||L x^3||` (saturation).
//!  5. The iterate at `k = [nt]` matches the diffusion moments with
//!     `O(1/n)` error: below 5e-4 at `n = 100`, halving per doubling,
//!     monotone for r = 3, 4.
//!  6. Monte Carlo absorption frequency matches `P(absorb at 1) = x`
//!     within 3 sigma with no censored paths.
//!  7. Euler-Maruyama endpoint moments match the closed-form moments
//!     within 3 sigma plus the O(dt) bias allowance.
//!  8. Exact binomial tails respect `2*exp(-eps^2 n/2)` on the full
//!     `(n, eps, y)` lattice up to n = 50.
//!  9. Chain step moments scale exactly: zero drift and
//!     `n*Var = y(1-y)`, in rationals, for n up to 20.
//! 10. Random convex piecewise-linear functions keep a convex image
//!     with `B_n f >= f`.
//! 11. The Poisson step count obeys `E|Phi(nt) - nt| <= sqrt(nt) + 1`,
//!     confirmed by an exact oracle and Monte Carlo.
//!
//! Randomized criteria draw from stream `id << 32` of the caller's
//! seed, so no criterion's replica budget can shift another's
//! randomness. [`run_all_corrupted`] is a harness self-test: it
//! collapses one tolerance by 1e6, which must flip that criterion to
//! failing.

use crate::bernstein::{
    apply_bernstein, bernstein_second_derivative, iterate_grid, transition_matrix, GridFunction,
};
use crate::error::{Error, Result};
use crate::numerics::{DensePolynomial, Rational};
use crate::rates::{
    hoeffding_check, joint_limit_experiment, saturation_ratio, step_moment_check,
    voronovskaya_bound, voronovskaya_residual, SUP_GRID_POINTS,
};
use crate::scalar::Scalar;
use crate::wf_chain::{absorption_prob_mc, RandomStream};
use crate::wf_diffusion::{coefficient_identity_check, em_final, moment_eval};
use num_traits::{One, Zero};
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use std::time::Instant;

/// Outcome of one acceptance criterion.
#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    /// One-line summary with the measured numbers.
    pub details: String,
    /// Wall-clock runtime. Reported by the test harness but kept out
    /// of the CLI tables so identical runs stay byte-identical.
    pub seconds: f64,
}

/// Tolerance for the absorption-frequency criterion: three binomial
/// standard errors of 10^5 replicas at p = 0.3.
pub const ABSORPTION_TOLERANCE: f64 = 0.0043;

fn finish(
    id: usize,
    name: &'static str,
    start: Instant,
    outcome: Result<(bool, String)>,
) -> CriterionResult {
    let seconds = start.elapsed().as_secs_f64();
    match outcome {
        Ok((passed, details)) => CriterionResult {
            id,
            name,
            passed,
            details,
            seconds,
        },
        Err(e) => CriterionResult {
            id,
            name,
            passed: false,
            details: format!("error: {e}"),
            seconds,
        },
    }
}

fn criterion_stream(seed: u64, id: u64) -> RandomStream {
    RandomStream::with_stream(seed, id << 32)
}

/// Criterion 1: the partial-fraction and binomial-coefficient moment
/// expansions agree exactly for every degree r <= 10.
pub fn criterion_1() -> CriterionResult {
    let start = Instant::now();
    finish(
        1,
        "moment expansion identity",
        start,
        (|| {
            let report = coefficient_identity_check(10)?;
            let passed = report.triples == 220 && report.failures.is_empty();
            Ok((
                passed,
                format!(
                    "{} triples, {} failures",
                    report.triples,
                    report.failures.len()
                ),
            ))
        })(),
    )
}

/// Criterion 2: iterates reproduce the quadratic closed form, float to
/// 1e-12 and rationally exact, with exact per-step ratio (n-1)/n.
pub fn criterion_2() -> CriterionResult {
    let start = Instant::now();
    finish(
        2,
        "iterated-operator closed form",
        start,
        (|| {
            let mut worst = 0.0f64;
            let mut exact_ok = true;
            let mut ratio_ok = true;
            for n in 2..=10usize {
                // Float route.
                let matrix = transition_matrix::<f64>(n)?;
                let f = GridFunction::<f64>::monomial_values(n, 2);
                let mut cur = f.values().to_vec();
                let q = 1.0 - 1.0 / n as f64;
                for k in 1..=100 {
                    cur = matrix.apply(&cur);
                    let a = q.powi(k);
                    for (j, c) in cur.iter().enumerate() {
                        let x = j as f64 / n as f64;
                        worst = worst.max((c - (a * x * x + (1.0 - a) * x)).abs());
                    }
                }
                if iterate_grid(&f, 100).values() != cur.as_slice() {
                    exact_ok = false;
                }

                // Rational route: exact closed form and exact decay ratio.
                let matrix = transition_matrix::<Rational>(n)?;
                let grid: Vec<Rational> = (0..=n)
                    .map(|j| Rational::from_ratio(j as i64, n as i64))
                    .collect();
                let f = GridFunction::<Rational>::monomial_values(n, 2);
                let mut cur = f.values().to_vec();
                let q = Rational::from_ratio(n as i64 - 1, n as i64);
                let n_rat = Rational::from_int(n as i64);
                let n_minus = Rational::from_int(n as i64 - 1);
                let mut a = Rational::one();
                let mut prev_err: Vec<Rational> = grid.iter().map(|x| x * x - x).collect();
                for _k in 1..=100 {
                    cur = matrix.apply(&cur);
                    a *= &q;
                    for j in 0..=n {
                        let x = &grid[j];
                        let closed = &a * &(x * x) + (Rational::one() - &a) * x;
                        if cur[j] != closed {
                            exact_ok = false;
                        }
                        let err = cur[j].clone() - x;
                        if &err * &n_rat != &prev_err[j] * &n_minus {
                            ratio_ok = false;
                        }
                        prev_err[j] = err;
                    }
                }
                if iterate_grid(&f, 100).values() != cur.as_slice() {
                    exact_ok = false;
                }
            }
            let passed = worst <= 1e-12 && exact_ok && ratio_ok;
            Ok((
                passed,
                format!(
            "float deviation {worst:.2e}; exact closed form {}, ratio (n-1)/n {} (n<=10, k<=100)",
            if exact_ok { "holds" } else { "BROKEN" },
            if ratio_ok { "holds" } else { "BROKEN" },
        ),
            ))
        })(),
    )
}

/// Criterion 3: exact dominance `beta(k,x) <= n(1-1/n)^(k-1) x(1-x)`
/// and the iterate error bound `2*||f||*beta(k,x)` for f in
/// {x^2, |x - 1/2|}, all in rationals, n <= 10, k <= 100.
pub fn criterion_3() -> CriterionResult {
    let start = Instant::now();
    finish(
        3,
        "absorption bound dominance",
        start,
        (|| {
            let mut dominance_ok = true;
            let mut kr_ok = true;
            for n in 1..=10usize {
                let matrix = transition_matrix::<Rational>(n)?;
                let fs = [
                    GridFunction::<Rational>::monomial_values(n, 2),
                    GridFunction::<Rational>::abs_half(n),
                ];
                let sups: Vec<Rational> = fs.iter().map(|f| f.sup_norm()).collect();
                let limits: Vec<Vec<Rational>> = fs
                    .iter()
                    .map(|f| {
                        let f0 = f.value(0).clone();
                        let f1 = f.value(n).clone();
                        (0..=n)
                            .map(|j| {
                                &f0 + &(&(&f1 - &f0) * &Rational::from_ratio(j as i64, n as i64))
                            })
                            .collect()
                    })
                    .collect();
                let mut beta = GridFunction::<Rational>::interior_indicator(n)
                    .values()
                    .to_vec();
                let mut curs: Vec<Vec<Rational>> = fs.iter().map(|f| f.values().to_vec()).collect();
                let q = Rational::from_ratio(n as i64 - 1, n as i64);
                let n_rat = Rational::from_int(n as i64);
                let two = Rational::from_int(2);
                let mut qpow = Rational::one();
                for _k in 1..=100 {
                    beta = matrix.apply(&beta);
                    for cur in curs.iter_mut() {
                        *cur = matrix.apply(cur);
                    }
                    for j in 0..=n {
                        let x = Rational::from_ratio(j as i64, n as i64);
                        let bound = &n_rat * &qpow * &x * &(Rational::one() - &x);
                        if beta[j] > bound {
                            dominance_ok = false;
                        }
                        for (i, cur) in curs.iter().enumerate() {
                            let err = (cur[j].clone() - &limits[i][j]).abs();
                            if err > &two * &sups[i] * &beta[j] {
                                kr_ok = false;
                            }
                        }
                    }
                    qpow *= &q;
                }
            }
            let passed = dominance_ok && kr_ok;
            Ok((
                passed,
                format!(
                    "beta bound {}, iterate error bound {} (exact, n<=10, k<=100)",
                    if dominance_ok {
                        "dominates"
                    } else {
                        "VIOLATED"
                    },
                    if kr_ok { "dominates" } else { "VIOLATED" },
                ),
            ))
        })(),
    )
}

/// Criterion 4: Voronovskaya residual exactly zero for x^2 (n <= 100),
/// within its n^(-1/2) bound for x^4, and the x^3 saturation ratio
/// within 2% of 1 at n = 512.
pub fn criterion_4() -> CriterionResult {
    let start = Instant::now();
    finish(
        4,
        "voronovskaya residual and saturation",
        start,
        (|| {
            let quad = DensePolynomial::<Rational>::monomial(2);
            let mut zero_ok = true;
            for n in 1..=100 {
                if !voronovskaya_residual(&quad, n, SUP_GRID_POINTS)?.is_zero() {
                    zero_ok = false;
                }
            }
            let quart = DensePolynomial::<Rational>::monomial(4);
            let mut bound_ok = true;
            let mut worst_margin = f64::INFINITY;
            for n in [4usize, 16, 64, 256] {
                let observed = voronovskaya_residual(&quart, n, SUP_GRID_POINTS)?.to_f64();
                let bound = voronovskaya_bound(24.0, n)?;
                worst_margin = worst_margin.min(bound - observed);
                if observed > bound {
                    bound_ok = false;
                }
            }
            let ratio = saturation_ratio(
                &DensePolynomial::<Rational>::monomial(3),
                512,
                SUP_GRID_POINTS,
            )?;
            let saturation_ok = (ratio - 1.0).abs() <= 0.02;
            let passed = zero_ok && bound_ok && saturation_ok;
            Ok((
                passed,
                format!(
            "x^2 residual zero {}; x^4 margin {worst_margin:.2e}; saturation ratio {ratio:.4}",
            if zero_ok { "(n<=100)" } else { "BROKEN" },
        ),
            ))
        })(),
    )
}

/// Criterion 5: the k = [nt] iterate tracks the diffusion moments:
/// r = 2 error below 5e-4 at n = 100 halving (within 20%) per
/// doubling, r = 3, 4 errors monotone in n.
pub fn criterion_5() -> CriterionResult {
    let start = Instant::now();
    finish(
        5,
        "joint limit k = [nt]",
        start,
        (|| {
            let report = joint_limit_experiment(2, 1.0, &[100, 200, 400])?;
            let errs: Vec<f64> = report.rows.iter().map(|r| r.observed).collect();
            let mut passed = errs[0] <= 5e-4;
            let mut ratios = Vec::new();
            for pair in errs.windows(2) {
                let ratio = pair[1] / pair[0];
                ratios.push(ratio);
                if !(0.4..=0.6).contains(&ratio) {
                    passed = false;
                }
            }
            let mut monotone_ok = true;
            for r in [3usize, 4] {
                let report = joint_limit_experiment(r, 1.0, &[50, 100, 200, 400])?;
                let errs: Vec<f64> = report.rows.iter().map(|row| row.observed).collect();
                for pair in errs.windows(2) {
                    if pair[1] > pair[0] + 1e-12 {
                        monotone_ok = false;
                    }
                }
            }
            passed = passed && monotone_ok;
            Ok((
                passed,
                format!(
                    "r=2 error at n=100: {:.3e}; doubling ratios {:.3}, {:.3}; r=3,4 monotone: {}",
                    errs[0], ratios[0], ratios[1], monotone_ok,
                ),
            ))
        })(),
    )
}

fn criterion_6_with_tolerance(seed: u64, tolerance: f64) -> CriterionResult {
    let start = Instant::now();
    finish(
        6,
        "chain absorption frequency",
        start,
        (|| {
            let stream = criterion_stream(seed, 6);
            let estimate = absorption_prob_mc(10, 0.3, 100_000, 10_000, &stream)?;
            let deviation = (estimate.estimate - 0.3).abs();
            let passed = estimate.censored == 0 && deviation <= tolerance;
            Ok((passed, format!(
            "p_hat = {:.5}, |p_hat - 0.3| = {deviation:.2e} (tolerance {tolerance:.2e}), censored = {}",
            estimate.estimate, estimate.censored,
        )))
        })(),
    )
}

/// Criterion 6: 10^5 chains from x = 0.3 all absorb within 10^4 steps
/// and hit 1 with frequency 0.3 within three standard errors.
pub fn criterion_6(seed: u64) -> CriterionResult {
    criterion_6_with_tolerance(seed, ABSORPTION_TOLERANCE)
}

/// Criterion 7: Euler-Maruyama second and third endpoint moments match
/// the closed forms within 3 sigma plus a 2*dt bias allowance.
pub fn criterion_7(seed: u64) -> CriterionResult {
    let start = Instant::now();
    finish(
        7,
        "diffusion simulator moments",
        start,
        (|| {
            let (x0, t, dt, replicas) = (0.5f64, 0.5f64, 1e-3f64, 100_000u64);
            let stream = criterion_stream(seed, 7);
            let (mut sum2, mut sq2, mut sum3, mut sq3) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
            for i in 0..replicas {
                let v = em_final(x0, t, dt, &stream.substream(i));
                let v2 = v * v;
                let v3 = v2 * v;
                sum2 += v2;
                sq2 += v2 * v2;
                sum3 += v3;
                sq3 += v3 * v3;
            }
            let nf = replicas as f64;
            let mut passed = true;
            let mut parts = Vec::new();
            for (r, sum, sq) in [(2usize, sum2, sq2), (3, sum3, sq3)] {
                let mean = sum / nf;
                let sd = ((sq / nf - mean * mean).max(0.0)).sqrt();
                let target = moment_eval(r, t, x0)?;
                let tolerance = 3.0 * sd / nf.sqrt() + 2.0 * dt;
                let deviation = (mean - target).abs();
                if deviation > tolerance {
                    passed = false;
                }
                parts.push(format!(
                    "m{r}: |{mean:.5} - {target:.5}| = {deviation:.2e} <= {tolerance:.2e}"
                ));
            }
            Ok((passed, parts.join("; ")))
        })(),
    )
}

/// Criterion 8: exact binomial tails below `2*exp(-eps^2 n/2)` on the
/// whole lattice n <= 50, eps in {0.05, ..., 0.95}, 21-point y grid.
pub fn criterion_8() -> CriterionResult {
    let start = Instant::now();
    finish(
        8,
        "empirical tail bound",
        start,
        (|| {
            let y_grid: Vec<Rational> = (0..=20).map(|j| Rational::from_ratio(j, 20)).collect();
            let mut cells = 0usize;
            let mut passed = true;
            for n in 1..=50 {
                for e in 1..=19 {
                    let eps = Rational::from_ratio(e, 20);
                    let report = hoeffding_check(n, &eps, &y_grid)?;
                    cells += report.rows.len();
                    if !report.all_pass() {
                        passed = false;
                    }
                }
            }
            Ok((
                passed,
                format!("{cells} (n, eps, y) cells, all tails below bound: {passed}"),
            ))
        })(),
    )
}

/// Criterion 9: exact step moments, zero drift and n*Var = y(1-y), for
/// every n in 2..=20.
pub fn criterion_9() -> CriterionResult {
    let start = Instant::now();
    finish(
        9,
        "step-moment scaling",
        start,
        (|| {
            let mut passed = true;
            for n in 2..=20 {
                if !step_moment_check(n)?.all_pass() {
                    passed = false;
                }
            }
            Ok((
                passed,
                format!("exact drift/variance identities for n in 2..=20: {passed}"),
            ))
        })(),
    )
}

/// Criterion 10: 100 random convex piecewise-linear grid functions
/// keep a convex image and lie below it.
pub fn criterion_10(seed: u64) -> CriterionResult {
    let start = Instant::now();
    finish(
        10,
        "convexity preservation",
        start,
        (|| {
            let mut rng = criterion_stream(seed, 10).rng();
            let mut min_d2 = f64::INFINITY;
            let mut min_gap = f64::INFINITY;
            for _ in 0..100 {
                let n = rng.random_range(3usize..=12);
                let mut slope: f64 = rng.random_range(-2.0..0.0);
                let mut values = vec![rng.random_range(-1.0..1.0)];
                for _ in 0..n {
                    values.push(values.last().unwrap() + slope / n as f64);
                    slope += rng.random_range(0.0..1.0); // convex: slopes increase
                }
                let f = GridFunction::new(values)?;
                for i in 0..SUP_GRID_POINTS {
                    let x = i as f64 / (SUP_GRID_POINTS - 1) as f64;
                    min_d2 = min_d2.min(bernstein_second_derivative(&f, &x)?);
                    min_gap = min_gap.min(apply_bernstein(&f, &x)? - f.interp(x));
                }
            }
            let passed = min_d2 >= -1e-12 && min_gap >= -1e-12;
            Ok((passed, format!(
            "min second derivative {min_d2:.2e}, min B_n f - f gap {min_gap:.2e} over 100 functions",
        )))
        })(),
    )
}

/// Exact `E|X - lambda|` for `X ~ Poisson(lambda)` with integer
/// `lambda`, by direct summation of the law around its mode. Terms are
/// tracked relative to the modal weight, so nothing underflows.
fn poisson_mean_abs_deviation(lambda: f64) -> f64 {
    let k0 = lambda as i64;
    let mut total = 1.0f64;
    let mut weighted = (k0 as f64 - lambda).abs();
    let mut p = 1.0f64;
    let mut k = k0;
    while k > 0 {
        p *= k as f64 / lambda;
        k -= 1;
        if p < 1e-18 {
            break;
        }
        total += p;
        weighted += p * (k as f64 - lambda).abs();
    }
    p = 1.0;
    k = k0;
    loop {
        p *= lambda / (k + 1) as f64;
        k += 1;
        if p < 1e-18 {
            break;
        }
        total += p;
        weighted += p * (k as f64 - lambda).abs();
    }
    weighted / total
}

/// Criterion 11: the Poissonized step count stays within
/// `sqrt(nt) + 1` of `nt` in mean absolute value, checked against the
/// exact law and by Monte Carlo.
pub fn criterion_11(seed: u64) -> CriterionResult {
    let start = Instant::now();
    finish(
        11,
        "poissonized step count",
        start,
        (|| {
            let stream = criterion_stream(seed, 11);
            let replicas = 100_000u64;
            let mut passed = true;
            let mut parts = Vec::new();
            for (i, lambda) in [10.0f64, 100.0, 1000.0].into_iter().enumerate() {
                let exact = poisson_mean_abs_deviation(lambda);
                if exact > lambda.sqrt() + 1.0 {
                    passed = false;
                }
                let law = Poisson::new(lambda)
                    .map_err(|e| Error::domain("t", format!("poisson rate rejected: {e}")))?;
                let mut rng = stream.substream(i as u64).rng();
                let (mut sum, mut sq) = (0.0f64, 0.0f64);
                for _ in 0..replicas {
                    let d = (law.sample(&mut rng) - lambda).abs();
                    sum += d;
                    sq += d * d;
                }
                let mean = sum / replicas as f64;
                let sd = ((sq / replicas as f64 - mean * mean).max(0.0)).sqrt();
                if (mean - exact).abs() > 3.0 * sd / (replicas as f64).sqrt() {
                    passed = false;
                }
                parts.push(format!(
                    "nt={lambda}: exact {exact:.4} (cap {:.4}), mc {mean:.4}",
                    lambda.sqrt() + 1.0
                ));
            }
            Ok((passed, parts.join("; ")))
        })(),
    )
}

fn run_suite(seed: u64, corrupt: bool) -> Vec<CriterionResult> {
    let tolerance = if corrupt {
        ABSORPTION_TOLERANCE / 1e6
    } else {
        ABSORPTION_TOLERANCE
    };
    vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6_with_tolerance(seed, tolerance),
        criterion_7(seed),
        criterion_8(),
        criterion_9(),
        criterion_10(seed),
        criterion_11(seed),
    ]
}

/// Run all eleven criteria with the given seed.
pub fn run_all(seed: u64) -> Vec<CriterionResult> {
    run_suite(seed, false)
}

/// Harness self-test: identical to [`run_all`] except the absorption
/// tolerance is collapsed by a factor of 10^6, so criterion 6 must
/// come back failing. A verifier that still reports success here is
/// broken.
pub fn run_all_corrupted(seed: u64) -> Vec<CriterionResult> {
    run_suite(seed, true)
}
