//! Exact rationals, dense polynomials, binomial coefficients, and the
//! diffusion generator.
//!
//! The generator here is `L f(x) = x(1-x) f''(x) / 2`, the second-order
//! operator whose polynomial eigenstructure drives both the operator
//! iterates and the diffusion moments. On monomials it acts as
//! `L x^r = (r(r-1)/2) (x^(r-1) - x^r)`, so it maps degree-r polynomials
//! to degree-r polynomials and annihilates constants and `x`.

use crate::bernstein::GridFunction;
use crate::scalar::Scalar;
use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Exact rational scalar. Always stored in lowest terms with a positive
/// denominator; equality is value equality.
pub type Rational = num_rational::BigRational;

/// Binomial coefficient `C(n, j)` as an arbitrary-precision integer.
/// Returns zero when `j < 0` or `j > n`.
pub fn binomial(n: u64, j: i64) -> BigInt {
    if j < 0 || (j as u64) > n {
        return BigInt::zero();
    }
    let j = (j as u64).min(n - j as u64);
    // c stays integral at every step: after multiplying by (n - j + i)
    // it is i! * C(n - j + i, i) / (i-1)! ... kept exact by dividing last.
    let mut c = BigInt::one();
    for i in 1..=j {
        c = c * BigInt::from(n - j + i) / BigInt::from(i);
    }
    c
}

/// Polynomial in the monomial basis, `coeffs[i]` multiplying `x^i`.
///
/// Invariant: the last coefficient is nonzero; the zero polynomial is the
/// empty coefficient vector and reports degree 0.
#[derive(Debug, Clone, PartialEq)]
pub struct DensePolynomial<S: Scalar> {
    coeffs: Vec<S>,
}

impl<S: Scalar> DensePolynomial<S> {
    pub fn new(mut coeffs: Vec<S>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        DensePolynomial { coeffs }
    }

    pub fn zero() -> Self {
        DensePolynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: S) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `x^r`.
    pub fn monomial(r: usize) -> Self {
        let mut coeffs = vec![S::zero(); r + 1];
        coeffs[r] = S::one();
        DensePolynomial { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Coefficient of `x^i`, zero beyond the stored degree.
    pub fn coeff(&self, i: usize) -> S {
        self.coeffs.get(i).cloned().unwrap_or_else(S::zero)
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &S) -> S {
        let mut acc = S::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| S::from_int(i as i64) * c.clone())
            .collect();
        Self::new(coeffs)
    }

    pub fn second_derivative(&self) -> Self {
        self.derivative().derivative()
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len).map(|i| self.coeff(i) + other.coeff(i)).collect();
        Self::new(coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len).map(|i| self.coeff(i) - other.coeff(i)).collect();
        Self::new(coeffs)
    }

    pub fn scale(&self, factor: &S) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .map(|c| c.clone() * factor.clone())
                .collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![S::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(coeffs)
    }

    /// Coefficient-wise conversion to floats.
    pub fn to_f64_poly(&self) -> DensePolynomial<f64> {
        DensePolynomial::new(self.coeffs.iter().map(|c| c.to_f64()).collect())
    }
}

/// The generator `L p = x(1-x) p''/2` applied to a polynomial.
///
/// The image vanishes at both endpoints and never raises the degree;
/// constants and the identity map to zero.
pub fn generator_apply<S: Scalar>(p: &DensePolynomial<S>) -> DensePolynomial<S> {
    let q = p.second_derivative();
    // x(1-x) q / 2 = (x q - x^2 q) / 2, i.e. shift by one and two.
    let x_q = DensePolynomial::new(
        std::iter::once(S::zero())
            .chain(q.coeffs().iter().cloned())
            .collect(),
    );
    let x2_q = DensePolynomial::new(
        std::iter::repeat_n(S::zero(), 2)
            .chain(q.coeffs().iter().cloned())
            .collect(),
    );
    x_q.sub(&x2_q).scale(&S::from_ratio(1, 2))
}

/// Monomial coefficients of the Bernstein image of grid values `g`.
///
/// Uses the forward-difference expansion: with `D^k g(0)` the k-th
/// forward difference of the value sequence at the left end,
///
/// ```text
/// B_n g(x) = sum_{k=0}^{n} C(n,k) (D^k g)(0) x^k .
/// ```
///
/// Exact when `S` is rational; for floats the binomials are exact up to
/// n of a few hundred, which covers every float-mode use in this crate.
pub fn bernstein_to_monomial<S: Scalar>(g: &GridFunction<S>) -> DensePolynomial<S> {
    let n = g.n();
    let mut diffs: Vec<S> = g.values().to_vec();
    let mut coeffs = Vec::with_capacity(n + 1);
    coeffs.push(diffs[0].clone());
    for k in 1..=n {
        for i in 0..=(n - k) {
            diffs[i] = diffs[i + 1].clone() - diffs[i].clone();
        }
        coeffs.push(S::from_bigint(&binomial(n as u64, k as i64)) * diffs[0].clone());
    }
    DensePolynomial::new(coeffs)
}
