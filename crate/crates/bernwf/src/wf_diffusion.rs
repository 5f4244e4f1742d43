//! The Wright-Fisher diffusion `dX = sqrt(X(1-X)) dW` on `[0, 1]` and
//! its moment semigroup in closed form.
//!
//! The diffusion is the scaling limit of the sampling chain: `n` chain
//! steps per unit of diffusion time. Its generator is
//! `L f = x(1-x) f''/2`, which acts on monomials as
//! `L x^j = alpha_j (x^(j-1) - x^j)` with `alpha_j = j(j-1)/2`, so the
//! moments `m_j(t, x) = E[X_t^j | X_0 = x]` solve the closed triangular
//! system `dm_j/dt = alpha_j (m_(j-1) - m_j)`. Diagonalizing it gives
//!
//! ```text
//! E[X_t^r] = sum_{i=1}^{r} b_(i,r)(t) x^i,
//! b_(i,r)(t) = sum_{j=i}^{r} (A_(i,r) / B_(i,j,r)) e^(-alpha_j t),
//! ```
//!
//! with `A_(i,r) = prod_{k=i+1}^{r} alpha_k` and
//! `B_(i,j,r) = prod_{k=i, k!=j}^{r} (alpha_k - alpha_j)` (empty
//! products are one). [`moment_expansion`] builds these coefficients
//! exactly. [`moment_expansion_kr`] builds the same function from an
//! independent binomial-coefficient form,
//!
//! ```text
//! b_(i,r)(t) = (i/r) C(r,i)^2 sum_{j=i}^{r} (-1)^(i+j) C(r-i, j-i)^2
//!              / ( C(2j-2, j-i) C(j+r-1, r-j) ) e^(-j(j-1)t/2),
//! ```
//!
//! and [`coefficient_identity_check`] confirms the two agree term by
//! term in exact arithmetic, one equality per `(r, i, j)` triple.
//!
//! Since the coefficients are available for every monomial, the full
//! polynomial semigroup `P_t p(x) = E p(X_t)` is available in closed
//! form ([`semigroup_poly`]), and both evolution equations
//! `d/dt P_t p = P_t L p = L P_t p` can be checked numerically
//! ([`forward_equation_residual`]). Sample paths come from an
//! Euler-Maruyama scheme that clamps to `[0, 1]` and sticks exactly at
//! the absorbing endpoints ([`euler_maruyama`]).

use crate::error::{check_unit_interval, Error, Result};
use crate::numerics::{binomial, generator_apply, DensePolynomial, Rational};
use crate::scalar::Scalar;
use crate::wf_chain::RandomStream;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand_distr::{Distribution, StandardNormal};

/// Decay rate `alpha_j = j(j-1)/2` of the j-th eigenmode.
pub fn alpha(j: u64) -> Rational {
    Rational::from_bigint(&(BigInt::from(j) * BigInt::from(j.saturating_sub(1))))
        / Rational::from_int(2)
}

/// Largest exponent the expansion code accepts. The coefficients are
/// exact rationals, so nothing breaks beyond this; it is a guard
/// against accidental huge-degree requests, not a numerical limit.
pub const MAX_MOMENT_DEGREE: usize = 64;

/// One term `coefficient * e^(-alpha_j t) * x^i` of a moment expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTerm {
    pub i: usize,
    pub j: usize,
    pub coefficient: Rational,
}

/// The moment `E[X_t^r]` as an exact finite sum of exponentials with
/// polynomial space dependence.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentExpansion {
    r: usize,
    terms: Vec<MomentTerm>,
}

impl MomentExpansion {
    pub fn r(&self) -> usize {
        self.r
    }

    pub fn terms(&self) -> &[MomentTerm] {
        &self.terms
    }

    /// Coefficient of `e^(-alpha_j t) x^i`, zero when absent.
    pub fn coefficient(&self, i: usize, j: usize) -> Rational {
        self.terms
            .iter()
            .find(|term| term.i == i && term.j == j)
            .map(|term| term.coefficient.clone())
            .unwrap_or_else(Rational::zero)
    }

    /// The space coefficients `b_(i,r)(t)` as floats, index `i`.
    pub fn coefficient_values_at(&self, t: f64) -> Vec<f64> {
        let mut b = vec![0.0; self.r + 1];
        for term in &self.terms {
            b[term.i] += Scalar::to_f64(&term.coefficient) * decay_factor(term.j, t);
        }
        b
    }

    /// Time derivative of the space coefficients at `t`.
    pub fn coefficient_derivatives_at(&self, t: f64) -> Vec<f64> {
        let mut b = vec![0.0; self.r + 1];
        for term in &self.terms {
            let rate = Scalar::to_f64(&alpha(term.j as u64));
            b[term.i] -= rate * Scalar::to_f64(&term.coefficient) * decay_factor(term.j, t);
        }
        b
    }

    /// `E[X_t^r | X_0 = x]`.
    pub fn eval(&self, t: f64, x: f64) -> f64 {
        let b = self.coefficient_values_at(t);
        let mut acc = 0.0;
        for c in b.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }
}

fn decay_factor(j: usize, t: f64) -> f64 {
    let rate = (j * (j - 1)) as f64 / 2.0;
    (-rate * t).exp()
}

fn check_degree(r: usize) -> Result<()> {
    if !(1..=MAX_MOMENT_DEGREE).contains(&r) {
        return Err(Error::domain(
            "r",
            format!("need 1 <= r <= {MAX_MOMENT_DEGREE}, got {r}"),
        ));
    }
    Ok(())
}

/// Moment expansion from the eigen-decomposition of the closed
/// triangular ODE system (partial fractions in the rates).
pub fn moment_expansion(r: usize) -> Result<MomentExpansion> {
    check_degree(r)?;
    let rates: Vec<Rational> = (0..=r as u64).map(alpha).collect();
    let mut terms = Vec::with_capacity(r * (r + 1) / 2);
    for i in 1..=r {
        // A_(i,r) = prod_{k=i+1..r} alpha_k.
        let mut a = Rational::one();
        for rate in &rates[(i + 1)..=r] {
            a *= rate.clone();
        }
        for j in i..=r {
            // B_(i,j,r) = prod_{k=i..r, k != j} (alpha_k - alpha_j).
            let mut b = Rational::one();
            for k in i..=r {
                if k != j {
                    b *= rates[k].clone() - rates[j].clone();
                }
            }
            terms.push(MomentTerm {
                i,
                j,
                coefficient: a.clone() / b,
            });
        }
    }
    Ok(MomentExpansion { r, terms })
}

/// The same moment expansion from the independent binomial-coefficient
/// closed form; used to cross-check [`moment_expansion`] term by term.
pub fn moment_expansion_kr(r: usize) -> Result<MomentExpansion> {
    check_degree(r)?;
    let rb = r as u64;
    let mut terms = Vec::with_capacity(r * (r + 1) / 2);
    for i in 1..=r {
        let ib = i as u64;
        let front = Rational::from_ratio(i as i64, r as i64)
            * Rational::from_bigint(&binomial(rb, i as i64)).powu(2);
        for j in i..=r {
            let jb = j as u64;
            let sign = if (i + j) % 2 == 0 {
                Rational::one()
            } else {
                -Rational::one()
            };
            let numer = Rational::from_bigint(&binomial(rb - ib, (j - i) as i64)).powu(2);
            let denom = Rational::from_bigint(&binomial(2 * jb - 2, (j - i) as i64))
                * Rational::from_bigint(&binomial(jb + rb - 1, (r - j) as i64));
            terms.push(MomentTerm {
                i,
                j,
                coefficient: front.clone() * sign * numer / denom,
            });
        }
    }
    Ok(MomentExpansion { r, terms })
}

/// Outcome of comparing the two coefficient routes over all
/// `(r, i, j)` triples with `r <= r_max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityReport {
    pub r_max: usize,
    /// Number of triples compared: `sum_r r(r+1)/2`.
    pub triples: usize,
    /// Triples where the two routes disagreed; empty means the identity
    /// holds exactly everywhere.
    pub failures: Vec<(usize, usize, usize)>,
}

/// Exact term-by-term comparison of [`moment_expansion`] and
/// [`moment_expansion_kr`] for all degrees up to `r_max`.
pub fn coefficient_identity_check(r_max: usize) -> Result<IdentityReport> {
    check_degree(r_max)?;
    let mut triples = 0;
    let mut failures = Vec::new();
    for r in 1..=r_max {
        let main = moment_expansion(r)?;
        let kr = moment_expansion_kr(r)?;
        for i in 1..=r {
            for j in i..=r {
                triples += 1;
                if main.coefficient(i, j) != kr.coefficient(i, j) {
                    failures.push((r, i, j));
                }
            }
        }
    }
    Ok(IdentityReport {
        r_max,
        triples,
        failures,
    })
}

/// `E[X_t^r | X_0 = x]` for `r >= 1`, `t >= 0`, `x in [0, 1]`.
pub fn moment_eval(r: usize, t: f64, x: f64) -> Result<f64> {
    check_degree(r)?;
    if !t.is_finite() || t < 0.0 {
        return Err(Error::domain("t", format!("{t} is not a time in [0, oo)")));
    }
    check_unit_interval("x", x)?;
    Ok(moment_expansion(r)?.eval(t, x))
}

/// The polynomial `P_t p(x) = E p(X_t) | X_0 = x`, exact in the moment
/// coefficients. Degree never increases; constants and `x` are fixed.
pub fn semigroup_poly(p: &DensePolynomial<f64>, t: f64) -> Result<DensePolynomial<f64>> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::domain("t", format!("{t} is not a time in [0, oo)")));
    }
    if p.degree() > MAX_MOMENT_DEGREE {
        return Err(Error::domain(
            "p",
            format!("degree {} exceeds {MAX_MOMENT_DEGREE}", p.degree()),
        ));
    }
    let mut coeffs = vec![0.0; p.degree() + 1];
    if !p.is_zero() {
        coeffs[0] = p.coeff(0);
    }
    for r in 1..=p.degree() {
        let c = p.coeff(r);
        if c == 0.0 {
            continue;
        }
        let b = moment_expansion(r)?.coefficient_values_at(t);
        for (i, bi) in b.iter().enumerate() {
            coeffs[i] += c * bi;
        }
    }
    Ok(DensePolynomial::new(coeffs))
}

/// `d/dt P_t p` as a polynomial in `x`, from the exact expansion.
fn semigroup_time_derivative(p: &DensePolynomial<f64>, t: f64) -> Result<DensePolynomial<f64>> {
    let mut coeffs = vec![0.0; p.degree() + 1];
    for r in 1..=p.degree() {
        let c = p.coeff(r);
        if c == 0.0 {
            continue;
        }
        let b = moment_expansion(r)?.coefficient_derivatives_at(t);
        for (i, bi) in b.iter().enumerate() {
            coeffs[i] += c * bi;
        }
    }
    Ok(DensePolynomial::new(coeffs))
}

/// Largest violation, over an equispaced grid of `grid_size` points in
/// `[0, 1]`, of the two evolution equations
///
/// ```text
/// d/dt P_t p = P_t (L p)      (forward)
/// d/dt P_t p = L (P_t p)      (backward)
/// ```
///
/// Both hold identically, so the residual measures only floating-point
/// error in the coefficient evaluation.
pub fn forward_equation_residual(
    p: &DensePolynomial<f64>,
    t: f64,
    grid_size: usize,
) -> Result<f64> {
    if grid_size < 2 {
        return Err(Error::domain("grid_size", "need at least 2 points"));
    }
    let ddt = semigroup_time_derivative(p, t)?;
    let forward = semigroup_poly(&generator_apply(p), t)?;
    let backward = generator_apply(&semigroup_poly(p, t)?);
    let mut worst: f64 = 0.0;
    for idx in 0..grid_size {
        let x = idx as f64 / (grid_size - 1) as f64;
        let d = ddt.eval(&x);
        worst = worst
            .max((d - forward.eval(&x)).abs())
            .max((d - backward.eval(&x)).abs());
    }
    Ok(worst)
}

/// One Euler-Maruyama path.
///
/// `values[m]` is the state after `m` steps of size `dt` (a final
/// shorter step covers any remainder of `t_end`). Once a value hits an
/// endpoint exactly the path stays there; `absorbed` records whether
/// that happened.
#[derive(Debug, Clone)]
pub struct DiffusionPath {
    pub x0: f64,
    pub dt: f64,
    pub t_end: f64,
    pub values: Vec<f64>,
    pub absorbed: bool,
}

impl DiffusionPath {
    /// Time of the m-th recorded value.
    pub fn time(&self, m: usize) -> f64 {
        (self.dt * m as f64).min(self.t_end)
    }

    pub fn final_state(&self) -> f64 {
        *self.values.last().unwrap()
    }
}

fn check_em_params(x0: f64, t_end: f64, dt: f64) -> Result<()> {
    check_unit_interval("x0", x0)?;
    if !t_end.is_finite() || t_end <= 0.0 {
        return Err(Error::domain("t_end", format!("{t_end} is not positive")));
    }
    if !dt.is_finite() || dt <= 0.0 || dt > t_end {
        return Err(Error::domain(
            "dt",
            format!("need 0 < dt <= t_end, got dt = {dt}, t_end = {t_end}"),
        ));
    }
    Ok(())
}

/// One Euler step: martingale diffusion, clamped to `[0, 1]`.
fn em_step(x: f64, h: f64, z: f64) -> f64 {
    if x == 0.0 || x == 1.0 {
        return x;
    }
    (x + (x * (1.0 - x)).sqrt() * h.sqrt() * z).clamp(0.0, 1.0)
}

/// Step count and final short-step size for horizon `t_end`.
fn em_schedule(t_end: f64, dt: f64) -> (usize, f64) {
    let full = (t_end / dt + 1e-9).floor() as usize;
    let rem = t_end - full as f64 * dt;
    if rem > 1e-12 * dt.max(1.0) {
        (full, rem)
    } else {
        (full, 0.0)
    }
}

/// Simulates `dX = sqrt(X(1-X)) dW` from `x0` to `t_end` with step
/// `dt`, recording every step.
pub fn euler_maruyama(
    x0: f64,
    t_end: f64,
    dt: f64,
    stream: &RandomStream,
) -> Result<DiffusionPath> {
    check_em_params(x0, t_end, dt)?;
    let mut rng = stream.rng();
    let (full, rem) = em_schedule(t_end, dt);
    let mut values = Vec::with_capacity(full + 2);
    values.push(x0);
    let mut x = x0;
    for _ in 0..full {
        let z: f64 = StandardNormal.sample(&mut rng);
        x = em_step(x, dt, z);
        values.push(x);
    }
    if rem > 0.0 {
        let z: f64 = StandardNormal.sample(&mut rng);
        x = em_step(x, rem, z);
        values.push(x);
    }
    Ok(DiffusionPath {
        x0,
        dt,
        t_end,
        values,
        absorbed: x == 0.0 || x == 1.0,
    })
}

/// Endpoint of one path without storing the trajectory.
pub(crate) fn em_final(x0: f64, t_end: f64, dt: f64, stream: &RandomStream) -> f64 {
    let mut rng = stream.rng();
    let (full, rem) = em_schedule(t_end, dt);
    let mut x = x0;
    for _ in 0..full {
        if x == 0.0 || x == 1.0 {
            return x;
        }
        let z: f64 = StandardNormal.sample(&mut rng);
        x = em_step(x, dt, z);
    }
    if rem > 0.0 && x != 0.0 && x != 1.0 {
        let z: f64 = StandardNormal.sample(&mut rng);
        x = em_step(x, rem, z);
    }
    x
}

/// Monte Carlo estimate of `E[exp(-theta X_t)]` with one Euler path per
/// replica (streams `stream_id + i`). Returns the estimate and its
/// standard error. `t = 0` needs no paths and is exact.
pub fn exp_functional_mc(
    theta: f64,
    t: f64,
    x: f64,
    replicas: u64,
    dt: f64,
    stream: &RandomStream,
) -> Result<(f64, f64)> {
    if !theta.is_finite() || theta < 0.0 {
        return Err(Error::domain("theta", format!("{theta} is not in [0, oo)")));
    }
    check_unit_interval("x", x)?;
    if replicas == 0 {
        return Err(Error::domain("replicas", "need at least one replica"));
    }
    if !t.is_finite() || t < 0.0 {
        return Err(Error::domain("t", format!("{t} is not a time in [0, oo)")));
    }
    if t == 0.0 {
        return Ok(((-theta * x).exp(), 0.0));
    }
    check_em_params(x, t, dt)?;
    let mut sum = 0.0;
    let mut sq = 0.0;
    for i in 0..replicas {
        let v = (-theta * em_final(x, t, dt, &stream.substream(i))).exp();
        sum += v;
        sq += v * v;
    }
    let mean = sum / replicas as f64;
    let var = (sq / replicas as f64 - mean * mean).max(0.0);
    Ok((mean, (var / replicas as f64).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(num: i64, den: i64) -> Rational {
        Rational::from_ratio(num, den)
    }

    #[test]
    fn alpha_values() {
        assert_eq!(alpha(0), Rational::zero());
        assert_eq!(alpha(1), Rational::zero());
        assert_eq!(alpha(2), Rational::one());
        assert_eq!(alpha(3), rat(3, 1));
        assert_eq!(alpha(5), rat(10, 1));
    }

    #[test]
    fn degree_one_is_the_identity() {
        let e = moment_expansion(1).unwrap();
        assert_eq!(e.terms().len(), 1);
        assert_eq!(e.coefficient(1, 1), Rational::one());
        for &(t, x) in &[(0.0, 0.3), (2.5, 0.8), (40.0, 0.1)] {
            assert_eq!(e.eval(t, x), x);
        }
    }

    #[test]
    fn degree_two_matches_the_scalar_ode_solution() {
        // dm/dt = m_1 - m_2 with m_1 = x solves to x + (x^2 - x) e^(-t).
        let e = moment_expansion(2).unwrap();
        assert_eq!(e.coefficient(1, 1), Rational::one());
        assert_eq!(e.coefficient(1, 2), -Rational::one());
        assert_eq!(e.coefficient(2, 2), Rational::one());
        for &t in &[0.0f64, 0.3, 1.0, 7.0] {
            for &x in &[0.0f64, 0.25, 0.5, 1.0] {
                let expect = x + (x * x - x) * (-t).exp();
                assert!((e.eval(t, x) - expect).abs() < 1e-15);
            }
        }
    }

    /// Independent oracle: integrate the closed ODE system
    /// dm_j/dt = alpha_j (m_(j-1) - m_j) with RK4.
    fn moments_by_rk4(r: usize, t: f64, x: f64, steps: usize) -> f64 {
        let rates: Vec<f64> = (0..=r)
            .map(|j| (j * j.saturating_sub(1)) as f64 / 2.0)
            .collect();
        let deriv = |m: &Vec<f64>| -> Vec<f64> {
            (0..r)
                .map(|idx| {
                    let j = idx + 1;
                    // m_0 = 1; its alpha_1 = 0 makes the j = 1 row inert.
                    let prev = if idx == 0 { 1.0 } else { m[idx - 1] };
                    rates[j] * (prev - m[idx])
                })
                .collect()
        };
        let h = t / steps as f64;
        let mut m: Vec<f64> = (1..=r).map(|j| x.powi(j as i32)).collect();
        for _ in 0..steps {
            let k1 = deriv(&m);
            let m2: Vec<f64> = m.iter().zip(&k1).map(|(a, k)| a + 0.5 * h * k).collect();
            let k2 = deriv(&m2);
            let m3: Vec<f64> = m.iter().zip(&k2).map(|(a, k)| a + 0.5 * h * k).collect();
            let k3 = deriv(&m3);
            let m4: Vec<f64> = m.iter().zip(&k3).map(|(a, k)| a + h * k).collect();
            let k4 = deriv(&m4);
            for idx in 0..r {
                m[idx] += h / 6.0 * (k1[idx] + 2.0 * k2[idx] + 2.0 * k3[idx] + k4[idx]);
            }
        }
        m[r - 1]
    }

    #[test]
    fn expansion_matches_ode_integration() {
        for r in 1..=6usize {
            let e = moment_expansion(r).unwrap();
            for &t in &[0.3, 1.0] {
                for &x in &[0.15, 0.37, 0.9] {
                    let series = e.eval(t, x);
                    let ode = moments_by_rk4(r, t, x, 20_000);
                    assert!(
                        (series - ode).abs() < 1e-10,
                        "r={r} t={t} x={x}: {series} vs {ode}"
                    );
                }
            }
        }
    }

    #[test]
    fn coefficients_sum_to_kronecker_delta_at_time_zero() {
        // At t = 0 the expansion must reduce to x^r.
        for r in 1..=12usize {
            let e = moment_expansion(r).unwrap();
            for i in 1..=r {
                let sum: Rational = (i..=r)
                    .map(|j| e.coefficient(i, j))
                    .fold(Rational::zero(), |a, b| a + b);
                let expect = if i == r {
                    Rational::one()
                } else {
                    Rational::zero()
                };
                assert_eq!(sum, expect, "r = {r}, i = {i}");
            }
        }
    }

    #[test]
    fn stationary_part_is_the_martingale_mean() {
        // Only the j = 1 mode survives as t -> oo and it must be x.
        for r in 1..=12usize {
            let e = moment_expansion(r).unwrap();
            assert_eq!(e.coefficient(1, 1), Rational::one(), "r = {r}");
            let v = e.eval(60.0, 0.42);
            assert!((v - 0.42).abs() < 1e-14, "r = {r}");
        }
    }

    #[test]
    fn long_time_deviation_bound() {
        // |m_r(t, x) - x| <= 2 r^2 e^(-t) for t >= 2.
        for r in 1..=10usize {
            for &t in &[2.0, 5.0, 10.0] {
                for idx in 0..=20 {
                    let x = idx as f64 / 20.0;
                    let v = moment_eval(r, t, x).unwrap();
                    let bound = 2.0 * (r * r) as f64 * (-t).exp();
                    assert!((v - x).abs() <= bound + 1e-14, "r={r} t={t} x={x}");
                }
            }
        }
    }

    #[test]
    fn kr_route_spot_values() {
        let e = moment_expansion_kr(2).unwrap();
        assert_eq!(e.coefficient(1, 1), Rational::one());
        assert_eq!(e.coefficient(1, 2), -Rational::one());
        assert_eq!(e.coefficient(2, 2), Rational::one());
        let e3 = moment_expansion_kr(3).unwrap();
        // b_(3,3): i = j = r = 3: front (3/3) C(3,3)^2 = 1; numer C(0,0)^2;
        // denom C(4,0) C(5,0) = 1.
        assert_eq!(e3.coefficient(3, 3), Rational::one());
    }

    #[test]
    fn identity_check_small_degrees() {
        let report = coefficient_identity_check(6).unwrap();
        assert_eq!(
            report.triples,
            (1..=6).map(|r| r * (r + 1) / 2).sum::<usize>()
        );
        assert!(report.failures.is_empty());
    }

    #[test]
    fn moment_eval_known_values() {
        // r = 2, t = 1, x = 1/2: 1/2 - (1/4) e^(-1).
        let v = moment_eval(2, 1.0, 0.5).unwrap();
        assert!((v - (0.5 - 0.25 * (-1.0f64).exp())).abs() < 1e-16);
        // t = 0 reduces to powers.
        assert!((moment_eval(3, 0.0, 0.7).unwrap() - 0.343).abs() < 1e-15);
        // Domain errors.
        assert!(moment_eval(0, 1.0, 0.5).is_err());
        assert!(moment_eval(65, 1.0, 0.5).is_err());
        assert!(moment_eval(2, -0.1, 0.5).is_err());
        assert!(moment_eval(2, 1.0, 1.5).is_err());
    }

    #[test]
    fn moments_decrease_in_degree_and_stay_in_unit_interval() {
        // The eigenbasis coefficients alternate and grow with r, so the
        // float evaluation carries ~1e-11 cancellation noise by r = 10;
        // exactness at t = 0 is covered by the rational-arithmetic tests.
        for &t in &[0.0, 0.2, 1.0, 4.0] {
            for idx in 0..=10 {
                let x = idx as f64 / 10.0;
                let mut prev = 1.0;
                for r in 1..=10 {
                    let v = moment_eval(r, t, x).unwrap();
                    assert!((-1e-10..=1.0 + 1e-10).contains(&v), "r={r} t={t} x={x}");
                    assert!(v <= prev + 1e-10, "r={r} t={t} x={x}");
                    prev = v;
                }
            }
        }
    }

    #[test]
    fn semigroup_fixes_harmonic_polynomials() {
        // Constants and x are invariant under P_t.
        let c = DensePolynomial::constant(0.7f64);
        assert_eq!(semigroup_poly(&c, 3.0).unwrap(), c);
        let x = DensePolynomial::<f64>::monomial(1);
        let px = semigroup_poly(&x, 3.0).unwrap();
        assert!((px.coeff(1) - 1.0).abs() < 1e-15 && px.coeff(0).abs() < 1e-15);
    }

    #[test]
    fn semigroup_square_closed_form() {
        let p = DensePolynomial::<f64>::monomial(2);
        for &t in &[0.0, 0.5, 2.0] {
            let pt = semigroup_poly(&p, t).unwrap();
            let e = (-t).exp();
            assert!((pt.coeff(2) - e).abs() < 1e-15);
            assert!((pt.coeff(1) - (1.0 - e)).abs() < 1e-15);
            assert!(pt.coeff(0).abs() < 1e-15);
        }
    }

    #[test]
    fn semigroup_property_composes() {
        // P_s P_t = P_(s+t), coefficient-wise.
        let polys = [
            DensePolynomial::<f64>::monomial(4),
            DensePolynomial::new(vec![0.2, -1.0, 0.0, 3.0, 0.0, 0.5, -0.7]),
        ];
        for p in &polys {
            for &(s, t) in &[(0.3, 0.9), (1.5, 0.2)] {
                let two_step = semigroup_poly(&semigroup_poly(p, t).unwrap(), s).unwrap();
                let one_step = semigroup_poly(p, s + t).unwrap();
                for i in 0..=p.degree() {
                    assert!(
                        (two_step.coeff(i) - one_step.coeff(i)).abs() < 1e-10,
                        "deg {} coeff {i}",
                        p.degree()
                    );
                }
            }
        }
    }

    #[test]
    fn time_derivative_at_zero_is_the_generator_exactly() {
        // sum_j coeff(i,j) (-alpha_j) must reproduce L x^r in exact
        // arithmetic: alpha_r at i = r-1, -alpha_r at i = r.
        for r in 2..=10usize {
            let e = moment_expansion(r).unwrap();
            for i in 1..=r {
                let sum: Rational = (i.max(1)..=r)
                    .map(|j| -(e.coefficient(i, j) * alpha(j as u64)))
                    .fold(Rational::zero(), |a, b| a + b);
                let expect = if i == r - 1 {
                    alpha(r as u64)
                } else if i == r {
                    -alpha(r as u64)
                } else {
                    Rational::zero()
                };
                assert_eq!(sum, expect, "r = {r}, i = {i}");
            }
        }
    }

    #[test]
    fn evolution_equation_residuals_are_tiny() {
        assert_eq!(
            forward_equation_residual(&DensePolynomial::monomial(1), 1.0, 201).unwrap(),
            0.0
        );
        let sq = DensePolynomial::<f64>::monomial(2);
        assert!(forward_equation_residual(&sq, 0.5, 201).unwrap() < 1e-10);
        let quart = DensePolynomial::<f64>::monomial(4);
        assert!(forward_equation_residual(&quart, 1.0, 201).unwrap() < 1e-9);
        let mixed = DensePolynomial::new(vec![0.0, 0.3, -2.0, 0.0, 1.5, 0.0, 0.25]);
        assert!(forward_equation_residual(&mixed, 0.7, 101).unwrap() < 1e-8);
    }

    #[test]
    fn em_paths_from_endpoints_never_move() {
        for x0 in [0.0, 1.0] {
            let path = euler_maruyama(x0, 1.0, 0.01, &RandomStream::new(7)).unwrap();
            assert!(path.values.iter().all(|&v| v == x0));
            assert!(path.absorbed);
        }
    }

    #[test]
    fn em_sticks_after_first_boundary_hit() {
        // Large steps force boundary hits quickly.
        let mut hits = 0;
        for seed in 0..50u64 {
            let path = euler_maruyama(0.5, 30.0, 1.0, &RandomStream::new(seed)).unwrap();
            if let Some(first) = path.values.iter().position(|&v| v == 0.0 || v == 1.0) {
                hits += 1;
                let stuck = path.values[first];
                assert!(path.values[first..].iter().all(|&v| v == stuck));
                assert!(path.absorbed);
            }
        }
        assert!(hits > 0, "no path hit the boundary; test is vacuous");
    }

    #[test]
    fn em_parameter_validation() {
        let s = RandomStream::new(0);
        assert!(euler_maruyama(1.5, 1.0, 0.1, &s).is_err());
        assert!(euler_maruyama(0.5, 0.0, 0.1, &s).is_err());
        assert!(euler_maruyama(0.5, 1.0, 0.0, &s).is_err());
        assert!(euler_maruyama(0.5, 1.0, 2.0, &s).is_err());
    }

    #[test]
    fn em_schedule_covers_remainders() {
        let path = euler_maruyama(0.5, 0.25, 0.1, &RandomStream::new(3)).unwrap();
        // Steps at 0.1, 0.2, then a 0.05 remainder.
        assert_eq!(path.values.len(), 4);
        assert!((path.time(3) - 0.25).abs() < 1e-15);
        let exact = euler_maruyama(0.5, 0.3, 0.1, &RandomStream::new(3)).unwrap();
        assert_eq!(exact.values.len(), 4);
    }

    #[test]
    fn em_mean_is_a_martingale() {
        let (reps, x0) = (10_000u64, 0.5f64);
        let base = RandomStream::with_stream(51, 0);
        let mut sum = 0.0;
        let mut sq = 0.0;
        for i in 0..reps {
            let v = em_final(x0, 0.25, 0.005, &base.substream(i));
            sum += v;
            sq += v * v;
        }
        let mean = sum / reps as f64;
        let var = sq / reps as f64 - mean * mean;
        assert!((mean - x0).abs() <= 3.0 * (var / reps as f64).sqrt());
    }

    #[test]
    fn em_second_moment_tracks_the_closed_form() {
        let (reps, x0, t, dt) = (20_000u64, 0.5f64, 0.25f64, 0.005f64);
        let base = RandomStream::with_stream(53, 0);
        let mut sum = 0.0;
        let mut sq = 0.0;
        for i in 0..reps {
            let v = em_final(x0, t, dt, &base.substream(i));
            let v2 = v * v;
            sum += v2;
            sq += v2 * v2;
        }
        let mean = sum / reps as f64;
        let var = sq / reps as f64 - mean * mean;
        let exact = moment_eval(2, t, x0).unwrap();
        let slack = 3.0 * (var / reps as f64).sqrt() + 2.0 * dt;
        assert!(
            (mean - exact).abs() <= slack,
            "{mean} vs {exact} (slack {slack})"
        );
    }

    #[test]
    fn exp_functional_exact_cases() {
        let s = RandomStream::new(9);
        assert_eq!(
            exp_functional_mc(0.0, 1.0, 0.3, 10, 0.1, &s).unwrap(),
            (1.0, 0.0)
        );
        let (v, se) = exp_functional_mc(2.0, 0.0, 0.3, 10, 0.1, &s).unwrap();
        assert_eq!(v, (-0.6f64).exp());
        assert_eq!(se, 0.0);
        assert!(exp_functional_mc(-1.0, 1.0, 0.3, 10, 0.1, &s).is_err());
    }

    #[test]
    fn exp_functional_matches_moment_series() {
        // E exp(-theta X_t) = 1 + sum_r (-theta)^r m_r / r!, truncated
        // far past convergence.
        let (theta, t, x) = (1.0f64, 1.0f64, 0.5f64);
        let mut series = 1.0;
        let mut factorial = 1.0;
        for r in 1..=25usize {
            factorial *= r as f64;
            series += (-theta).powi(r as i32) * moment_eval(r, t, x).unwrap() / factorial;
        }
        let (mc, se) = exp_functional_mc(
            theta,
            t,
            x,
            20_000,
            0.002,
            &RandomStream::with_stream(55, 0),
        )
        .unwrap();
        let slack = 3.0 * se + 2.0 * 0.002;
        assert!(
            (mc - series).abs() <= slack,
            "{mc} vs {series} (slack {slack})"
        );
    }
}
