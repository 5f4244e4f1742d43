//! The discrete Wright-Fisher sampling chain whose k-step expectations
//! are exactly the Bernstein iterates.
//!
//! One step of the chain from state `y` on the grid `{0, 1/n, ..., 1}`
//! draws `n` independent uniform variables and counts how many fall
//! below `y`; equivalently it samples `Binomial(n, y)/n`. The random
//! function `G_n(x) = #{U_i <= x}/n` ([`EmpiricalMap`]) couples all
//! starting points through one batch of uniforms and is monotone in `x`.
//! Composing `k` independent maps gives `H^k(x)`, and
//!
//! ```text
//! E f(H^k(x)) = B_n^k f(x),
//! ```
//!
//! with function application order reversed relative to map composition:
//! the outermost map corresponds to the innermost operator application.
//!
//! States 0 and 1 are absorbing, and the chain is absorbed eventually
//! with probability one. The exact non-absorption probability
//!
//! ```text
//! beta(k, x) = P(H^k(x) in (0,1)) = (P^k phi)(x),    phi = 1 - 1_{0,1},
//! ```
//!
//! computed here in exact rational arithmetic ([`beta_exact`]), controls
//! the iterate error through `|B_n^k f - B_1 f| <= 2 ||f|| beta(k, x)`,
//! and is itself dominated by the closed-form decay bound
//! `n (1 - 1/n)^(k-1) x (1 - x)` ([`beta_upper_bound`]). The product
//! moment `E[H^k (1 - H^k)] = (1 - 1/n)^k x(1-x)` ([`gamma_sequence`])
//! is exact, not just a bound.
//!
//! All simulation is reproducible: every operation takes a
//! [`RandomStream`], a (seed, stream) pair naming one ChaCha8 stream.
//! Ensembles give replica `i` the stream `stream_id + i`, so results do
//! not depend on scheduling or iteration order.

use crate::bernstein::{iterate_grid, GridFunction};
use crate::error::{check_unit_interval, Error, Result};
use crate::numerics::Rational;
use crate::scalar::Scalar;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Poisson};

/// Name of one reproducible ChaCha8 random stream.
///
/// The generator state is fully determined by `(seed, stream_id)`.
/// Ensemble operations documented as using `replicas` streams consume
/// ids `stream_id .. stream_id + replicas`; callers running several
/// ensembles off one seed should space their base ids accordingly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomStream {
    seed: u64,
    stream_id: u64,
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        RandomStream { seed, stream_id: 0 }
    }

    pub fn with_stream(seed: u64, stream_id: u64) -> Self {
        RandomStream { seed, stream_id }
    }

    /// The stream `offset` slots after this one, same seed.
    pub fn substream(&self, offset: u64) -> Self {
        RandomStream {
            seed: self.seed,
            stream_id: self.stream_id.wrapping_add(offset),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// A fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// One sampled map `G_n(x) = #{U_i <= x}/n`: a random step function
/// holding its `n` sorted uniforms, monotone in `x`, with `G_n(0) = 0`
/// and `G_n(1) = 1` almost surely.
#[derive(Debug, Clone)]
pub struct EmpiricalMap {
    n: usize,
    points: Vec<f64>,
}

impl EmpiricalMap {
    pub fn n(&self) -> usize {
        self.n
    }

    /// The sorted uniform sample underlying the map.
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// `#{U_i <= x}/n`, a grid value in `{0, 1/n, ..., 1}`.
    pub fn eval(&self, x: f64) -> f64 {
        let count = self.points.partition_point(|&u| u <= x);
        count as f64 / self.n as f64
    }
}

fn draw_empirical_map(n: usize, rng: &mut ChaCha8Rng) -> EmpiricalMap {
    let mut points: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    points.sort_by(|a, b| a.partial_cmp(b).unwrap());
    EmpiricalMap { n, points }
}

/// Draws one empirical map from the start of the given stream.
pub fn sample_empirical_map(n: usize, stream: &RandomStream) -> Result<EmpiricalMap> {
    if n < 1 {
        return Err(Error::domain("n", "need n >= 1"));
    }
    Ok(draw_empirical_map(n, &mut stream.rng()))
}

/// One simulated path of the chain.
///
/// `states[k]` is the state after `k` steps, starting at `states[0] =
/// start_x`. Recording stops at absorption, so the vector never extends
/// past the first visit to an absorbing state; [`Trajectory::state_at`]
/// continues the path constantly from there. `censored` marks paths
/// that exhausted their step budget without absorbing.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub n: usize,
    /// Starting state after snapping to the grid.
    pub start_x: f64,
    /// True when the requested start was off the grid and got snapped.
    pub snapped: bool,
    pub states: Vec<f64>,
    /// First index whose state the dynamics can never leave.
    pub absorbed_at: Option<usize>,
    pub censored: bool,
}

impl Trajectory {
    /// State after `k` steps; constant after absorption.
    pub fn state_at(&self, k: usize) -> f64 {
        let idx = k.min(self.states.len() - 1);
        self.states[idx]
    }

    pub fn final_state(&self) -> f64 {
        *self.states.last().unwrap()
    }
}

/// Snaps `x0` to the nearest grid index, reporting whether it moved.
fn snap_to_grid(n: usize, x0: f64) -> (usize, bool) {
    let j = (x0 * n as f64).round() as usize;
    let j = j.min(n);
    let snapped = (x0 - j as f64 / n as f64).abs() > 1e-12;
    (j, snapped)
}

fn binomial_step(n: usize, p: f64, rng: &mut ChaCha8Rng) -> usize {
    Binomial::new(n as u64, p)
        .expect("validated probability")
        .sample(rng) as usize
}

/// Shared path loop: steps the integer count with `step`, stopping at
/// states `fixed` reports as absorbing.
fn run_path(
    n: usize,
    j0: usize,
    snapped: bool,
    steps: usize,
    fixed: impl Fn(usize) -> bool,
    mut step: impl FnMut(usize) -> usize,
) -> Trajectory {
    let to_x = |j: usize| j as f64 / n as f64;
    let mut states = Vec::with_capacity(steps.min(1 << 20) + 1);
    states.push(to_x(j0));
    let mut j = j0;
    let mut absorbed_at = None;
    if fixed(j) {
        absorbed_at = Some(0);
    } else {
        for k in 1..=steps {
            j = step(j);
            states.push(to_x(j));
            if fixed(j) {
                absorbed_at = Some(k);
                break;
            }
        }
    }
    Trajectory {
        n,
        start_x: to_x(j0),
        snapped,
        states,
        absorbed_at,
        censored: absorbed_at.is_none(),
    }
}

/// Simulates `steps` steps of the sampling chain from `x0`, snapping
/// `x0` to the grid first. Each step draws `Binomial(n, state)` directly
/// rather than materializing the empirical map, which has the same law
/// at a fraction of the cost; use [`simulate_chain_empirical`] when the
/// coupling across starting points matters.
pub fn simulate_chain(
    n: usize,
    x0: f64,
    steps: usize,
    stream: &RandomStream,
) -> Result<Trajectory> {
    if n < 1 {
        return Err(Error::domain("n", "need n >= 1"));
    }
    check_unit_interval("x0", x0)?;
    let (j0, snapped) = snap_to_grid(n, x0);
    let mut rng = stream.rng();
    Ok(run_path(
        n,
        j0,
        snapped,
        steps,
        |j| j == 0 || j == n,
        |j| binomial_step(n, j as f64 / n as f64, &mut rng),
    ))
}

/// Same law as [`simulate_chain`], but every step materializes the full
/// empirical map and applies it to the current state, which is the
/// coupled construction behind map composition.
pub fn simulate_chain_empirical(
    n: usize,
    x0: f64,
    steps: usize,
    stream: &RandomStream,
) -> Result<Trajectory> {
    if n < 1 {
        return Err(Error::domain("n", "need n >= 1"));
    }
    check_unit_interval("x0", x0)?;
    let (j0, snapped) = snap_to_grid(n, x0);
    let mut rng = stream.rng();
    Ok(run_path(
        n,
        j0,
        snapped,
        steps,
        |j| j == 0 || j == n,
        |j| {
            let map = draw_empirical_map(n, &mut rng);
            (map.eval(j as f64 / n as f64) * n as f64).round() as usize
        },
    ))
}

/// Monte Carlo estimate of the absorption probabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbsorptionEstimate {
    /// Fraction of absorbed replicas that ended at 1.
    pub estimate: f64,
    /// Binomial standard error over the absorbed replicas.
    pub std_error: f64,
    /// Replicas that hit the step budget without absorbing. These are
    /// reported here and excluded from the estimate, never mixed in.
    pub censored: u64,
    pub absorbed: u64,
}

/// Runs `replicas` independent chains (streams `stream_id + i`) for at
/// most `max_steps` steps each and estimates `P(absorb at 1)`, which
/// for the sampling chain equals the starting point.
pub fn absorption_prob_mc(
    n: usize,
    x0: f64,
    replicas: u64,
    max_steps: usize,
    stream: &RandomStream,
) -> Result<AbsorptionEstimate> {
    if n < 1 {
        return Err(Error::domain("n", "need n >= 1"));
    }
    if replicas == 0 {
        return Err(Error::domain("replicas", "need at least one replica"));
    }
    check_unit_interval("x0", x0)?;
    let (j0, _) = snap_to_grid(n, x0);
    let mut at_one = 0u64;
    let mut censored = 0u64;
    for i in 0..replicas {
        let mut rng = stream.substream(i).rng();
        let mut j = j0;
        let mut absorbed = j == 0 || j == n;
        let mut left = max_steps;
        while !absorbed && left > 0 {
            j = binomial_step(n, j as f64 / n as f64, &mut rng);
            absorbed = j == 0 || j == n;
            left -= 1;
        }
        if absorbed {
            if j == n {
                at_one += 1;
            }
        } else {
            censored += 1;
        }
    }
    let absorbed = replicas - censored;
    let (estimate, std_error) = if absorbed > 0 {
        let p = at_one as f64 / absorbed as f64;
        (p, (p * (1.0 - p) / absorbed as f64).sqrt())
    } else {
        (0.0, 0.0)
    };
    Ok(AbsorptionEstimate {
        estimate,
        std_error,
        censored,
        absorbed,
    })
}

/// Exact non-absorption probabilities `beta(k, x) = (P^k phi)(x)` on the
/// grid, `phi` the interior indicator, in rational arithmetic.
pub fn beta_exact(n: usize, k: usize) -> Result<GridFunction<Rational>> {
    if n < 1 {
        return Err(Error::domain("n", "need n >= 1"));
    }
    Ok(iterate_grid(&GridFunction::interior_indicator(n), k))
}

/// The closed-form decay bound `n (1 - 1/n)^(k-1) x (1 - x)` that
/// dominates `beta(k, x)` for every `k >= 1`.
pub fn beta_upper_bound<S: Scalar>(n: usize, k: usize, x: &S) -> Result<S> {
    if n < 1 {
        return Err(Error::domain("n", "need n >= 1"));
    }
    if k < 1 {
        return Err(Error::domain("k", "need k >= 1"));
    }
    if *x < S::zero() || *x > S::one() {
        return Err(Error::domain("x", format!("{x} is not in [0, 1]")));
    }
    let decay = S::from_ratio(n as i64 - 1, n as i64).powu(k as u64 - 1);
    Ok(S::from_int(n as i64) * decay * x.clone() * (S::one() - x.clone()))
}

/// The exact product moment `E[H^k(x) (1 - H^k(x))] = (1 - 1/n)^k x(1-x)`.
pub fn gamma_sequence<S: Scalar>(n: usize, k: usize, x: &S) -> Result<S> {
    if n < 1 {
        return Err(Error::domain("n", "need n >= 1"));
    }
    if *x < S::zero() || *x > S::one() {
        return Err(Error::domain("x", format!("{x} is not in [0, 1]")));
    }
    let decay = S::from_ratio(n as i64 - 1, n as i64).powu(k as u64);
    Ok(decay * x.clone() * (S::one() - x.clone()))
}

/// Iterate error bound `|B_n^k f - B_1 f|(x) <= 2 ||f|| n (1-1/n)^(k-1) x(1-x)`
/// for `||f|| = f_sup`, valid for every bounded `f` and `k >= 1`.
pub fn kr_error_bound<S: Scalar>(f_sup: &S, n: usize, k: usize, x: &S) -> Result<S> {
    if *f_sup < S::zero() {
        return Err(Error::domain("f_sup", "sup norm must be nonnegative"));
    }
    Ok(S::from_int(2) * f_sup.clone() * beta_upper_bound(n, k, x)?)
}

/// Chain run for a Poisson-distributed number of steps with mean `n*t`,
/// the discrete-time slice matching diffusion time `t`. The Poisson
/// count and the chain share the stream, in that order.
pub fn poissonized_simulate(
    n: usize,
    x0: f64,
    t: f64,
    stream: &RandomStream,
) -> Result<Trajectory> {
    if n < 1 {
        return Err(Error::domain("n", "need n >= 1"));
    }
    check_unit_interval("x0", x0)?;
    if !t.is_finite() || t < 0.0 {
        return Err(Error::domain("t", format!("{t} is not a time in [0, oo)")));
    }
    let (j0, snapped) = snap_to_grid(n, x0);
    let mut rng = stream.rng();
    let lambda = n as f64 * t;
    let steps = if lambda > 0.0 {
        Poisson::new(lambda)
            .expect("positive finite mean")
            .sample(&mut rng) as usize
    } else {
        0
    };
    Ok(run_path(
        n,
        j0,
        snapped,
        steps,
        |j| j == 0 || j == n,
        |j| binomial_step(n, j as f64 / n as f64, &mut rng),
    ))
}

/// Chain with a mutation map: each step resamples from
/// `Binomial(n, h(state))` instead of `Binomial(n, state)`.
///
/// `h` is validated on the grid only; it must send every grid point
/// into `[0, 1]`. A state `y` counts as absorbing only when `y` is an
/// endpoint fixed by `h`, since an endpoint with `h(y) != y` re-enters
/// the dynamics.
pub fn mutation_chain_simulate(
    n: usize,
    x0: f64,
    steps: usize,
    h: impl Fn(f64) -> f64,
    stream: &RandomStream,
) -> Result<Trajectory> {
    if n < 1 {
        return Err(Error::domain("n", "need n >= 1"));
    }
    check_unit_interval("x0", x0)?;
    let h_grid: Vec<f64> = (0..=n).map(|j| h(j as f64 / n as f64)).collect();
    for (j, &v) in h_grid.iter().enumerate() {
        if !v.is_finite() || !(0.0..=1.0).contains(&v) {
            return Err(Error::domain(
                "h",
                format!("h({j}/{n}) = {v} is not in [0, 1]"),
            ));
        }
    }
    let (j0, snapped) = snap_to_grid(n, x0);
    let mut rng = stream.rng();
    let fixed = |j: usize| (j == 0 || j == n) && h_grid[j] == j as f64 / n as f64;
    Ok(run_path(n, j0, snapped, steps, fixed, |j| {
        binomial_step(n, h_grid[j], &mut rng)
    }))
}
