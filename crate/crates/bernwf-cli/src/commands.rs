//! Subcommand implementations.
//!
//! Each command builds a [`Table`], a list of stderr notes, and the
//! indices of rows that violated a bound check. The binary maps a
//! nonempty violation list to exit code 1 and prints the offending
//! rows, so scripted runs can gate on rate bounds directly.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use bernwf::acceptance;
use bernwf::bernstein::{iterate_grid, kelisky_rivlin_limit, GridFunction};
use bernwf::rates::{self, RateReport};
use bernwf::wf_chain::{absorption_prob_mc, RandomStream};
use bernwf::wf_diffusion::{coefficient_identity_check, euler_maruyama, moment_eval};
use bernwf::{Error, Rational, Scalar};

use crate::table::{Cell, Table};

/// Result of one subcommand: the table to emit, human-oriented notes
/// for stderr, and the indices of rows whose bound check failed.
pub struct Outcome {
    pub table: Table,
    pub notes: Vec<String>,
    pub violations: Vec<usize>,
}

impl Outcome {
    fn clean(table: Table) -> Outcome {
        Outcome {
            table,
            notes: Vec::new(),
            violations: Vec::new(),
        }
    }
}

fn rat(p: i64, q: i64) -> Rational {
    <Rational as Scalar>::from_ratio(p, q)
}

/// Parses an exact rational from `p/q`, a decimal such as `0.05`, or a
/// bare integer. Decimals convert exactly: `0.05` becomes `1/20`.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p
            .trim()
            .parse()
            .map_err(|_| format!("bad numerator in `{s}`"))?;
        let q: i64 = q
            .trim()
            .parse()
            .map_err(|_| format!("bad denominator in `{s}`"))?;
        if q == 0 {
            return Err(format!("zero denominator in `{s}`"));
        }
        return Ok(rat(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let int = int.trim_start_matches(['-', '+']);
        let digits_ok =
            int.chars().all(|c| c.is_ascii_digit()) && frac.chars().all(|c| c.is_ascii_digit());
        if !digits_ok || (int.is_empty() && frac.is_empty()) {
            return Err(format!("`{s}` is not a decimal"));
        }
        let p: i64 = format!("{int}{frac}")
            .parse()
            .map_err(|_| format!("`{s}` has too many digits"))?;
        let q = 10i64
            .checked_pow(frac.len() as u32)
            .ok_or_else(|| format!("`{s}` has too many fractional digits"))?;
        return Ok(rat(if neg { -p } else { p }, q));
    }
    match s.parse::<i64>() {
        Ok(p) => Ok(rat(p, 1)),
        Err(_) => Err(format!(
            "`{s}` is not a rational; use p/q, a decimal, or an integer"
        )),
    }
}

/// A grid function named on the command line.
///
/// The built-in names cover the test functions used throughout the
/// crate; `expneg:THETA` gives exp(-THETA x) and `grid:FILE` loads an
/// arbitrary grid from a plain-text file.
#[derive(Debug, Clone)]
pub enum FnSpec {
    Xsq,
    Xcube,
    X4,
    Linear,
    Abs,
    ExpNeg(f64),
    GridFile(PathBuf),
}

impl FnSpec {
    pub fn parse(s: &str) -> Result<FnSpec, String> {
        match s {
            "xsq" => return Ok(FnSpec::Xsq),
            "xcube" => return Ok(FnSpec::Xcube),
            "x4" => return Ok(FnSpec::X4),
            "linear" => return Ok(FnSpec::Linear),
            "abs" => return Ok(FnSpec::Abs),
            _ => {}
        }
        if let Some(theta) = s.strip_prefix("expneg:") {
            let theta: f64 = theta
                .parse()
                .map_err(|_| format!("bad rate in `{s}`; expected expneg:THETA"))?;
            if !theta.is_finite() {
                return Err(format!("rate in `{s}` must be finite"));
            }
            return Ok(FnSpec::ExpNeg(theta));
        }
        if let Some(path) = s.strip_prefix("grid:") {
            if path.is_empty() {
                return Err("empty path in `grid:FILE`".to_string());
            }
            return Ok(FnSpec::GridFile(PathBuf::from(path)));
        }
        Err(format!(
            "unknown function `{s}`; expected xsq, xcube, x4, linear, abs, expneg:THETA, or grid:FILE"
        ))
    }

    /// Resolves the spec to a float grid function. Built-in names need
    /// `--n`; a grid file carries its own size, and `--n`, if given,
    /// must agree with it.
    pub fn load_f64(&self, n_flag: Option<usize>) -> anyhow::Result<GridFunction<f64>> {
        if let FnSpec::GridFile(path) = self {
            let f = read_grid_file(path)?;
            if let Some(n) = n_flag {
                if n != f.n() {
                    return Err(Error::domain(
                        "n",
                        format!(
                            "--n {n} does not match the {} intervals in {}",
                            f.n(),
                            path.display()
                        ),
                    )
                    .into());
                }
            }
            return Ok(f);
        }
        let n = require_n(n_flag)?;
        Ok(match self {
            FnSpec::Xsq => GridFunction::monomial_values(n, 2),
            FnSpec::Xcube => GridFunction::monomial_values(n, 3),
            FnSpec::X4 => GridFunction::monomial_values(n, 4),
            FnSpec::Linear => GridFunction::affine(n, &1.0, &0.0),
            FnSpec::Abs => GridFunction::abs_half(n),
            FnSpec::ExpNeg(theta) => {
                let theta = *theta;
                GridFunction::from_fn(n, |x| (-theta * x).exp())
            }
            FnSpec::GridFile(_) => unreachable!("handled above"),
        })
    }

    /// Resolves the spec in exact arithmetic. Only the built-in
    /// rational-valued functions support this.
    pub fn load_rational(&self, n_flag: Option<usize>) -> anyhow::Result<GridFunction<Rational>> {
        let n = require_n(n_flag)?;
        Ok(match self {
            FnSpec::Xsq => GridFunction::monomial_values(n, 2),
            FnSpec::Xcube => GridFunction::monomial_values(n, 3),
            FnSpec::X4 => GridFunction::monomial_values(n, 4),
            FnSpec::Linear => GridFunction::affine(n, &rat(1, 1), &rat(0, 1)),
            FnSpec::Abs => GridFunction::abs_half(n),
            FnSpec::ExpNeg(_) | FnSpec::GridFile(_) => {
                return Err(Error::domain(
                    "fn",
                    "--exact supports only xsq, xcube, x4, linear, and abs",
                )
                .into())
            }
        })
    }
}

fn require_n(n_flag: Option<usize>) -> anyhow::Result<usize> {
    match n_flag {
        None => Err(Error::domain("n", "--n is required for built-in functions").into()),
        Some(0) => Err(Error::domain("n", "need n >= 1").into()),
        Some(n) => Ok(n),
    }
}

fn read_grid_file(path: &Path) -> anyhow::Result<GridFunction<f64>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read grid file {}", path.display()))?;
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines
        .next()
        .ok_or_else(|| anyhow!("grid file {} is empty", path.display()))?;
    let n: usize = header.parse().with_context(|| {
        format!(
            "grid file {}: first line must be the interval count, got `{header}`",
            path.display()
        )
    })?;
    if n < 1 {
        bail!("grid file {}: interval count must be >= 1", path.display());
    }
    let mut values = Vec::with_capacity(n + 1);
    for line in lines {
        if values.len() == n + 1 {
            bail!(
                "grid file {}: more than {} values after the header",
                path.display(),
                n + 1
            );
        }
        let v: f64 = line
            .parse()
            .with_context(|| format!("grid file {}: `{line}` is not a number", path.display()))?;
        if !v.is_finite() {
            bail!("grid file {}: values must be finite", path.display());
        }
        values.push(v);
    }
    if values.len() != n + 1 {
        bail!(
            "grid file {}: got {} values, expected {}",
            path.display(),
            values.len(),
            n + 1
        );
    }
    Ok(GridFunction::new(values)?)
}

/// `approx`: one application of the operator, compared with f itself at
/// every grid point j/n.
pub fn approx(n: Option<usize>, func: &FnSpec, exact: bool) -> anyhow::Result<Outcome> {
    let mut table = Table::new(vec!["x", "f(x)", "B_n f(x)", "abs_error"]);
    if exact {
        let f = func.load_rational(n)?;
        let bf = iterate_grid(&f, 1);
        for j in 0..=f.n() {
            let err = (bf.value(j).clone() - f.value(j).clone()).abs();
            table.push(vec![
                Cell::Rat(f.grid_point(j)),
                Cell::Rat(f.value(j).clone()),
                Cell::Rat(bf.value(j).clone()),
                Cell::Rat(err),
            ]);
        }
    } else {
        let f = func.load_f64(n)?;
        let bf = iterate_grid(&f, 1);
        for j in 0..=f.n() {
            table.push(vec![
                Cell::Float(f.grid_point(j)),
                Cell::Float(*f.value(j)),
                Cell::Float(*bf.value(j)),
                Cell::Float((bf.value(j) - f.value(j)).abs()),
            ]);
        }
    }
    Ok(Outcome::clean(table))
}

/// `iterate`: k applications of the operator against the straight-line
/// limit [`kelisky_rivlin_limit`] it converges to.
pub fn iterate(n: Option<usize>, k: usize, func: &FnSpec, exact: bool) -> anyhow::Result<Outcome> {
    let mut table = Table::new(vec!["x", "B_n^k f(x)", "B_1 f(x)", "abs_error"]);
    if exact {
        let f = func.load_rational(n)?;
        let cur = iterate_grid(&f, k);
        let limit = kelisky_rivlin_limit(&f);
        for j in 0..=f.n() {
            let x = f.grid_point(j);
            let lim = limit.eval(&x);
            let err = (cur.value(j).clone() - lim.clone()).abs();
            table.push(vec![
                Cell::Rat(x),
                Cell::Rat(cur.value(j).clone()),
                Cell::Rat(lim),
                Cell::Rat(err),
            ]);
        }
    } else {
        let f = func.load_f64(n)?;
        let cur = iterate_grid(&f, k);
        let limit = kelisky_rivlin_limit(&f);
        for j in 0..=f.n() {
            let x = f.grid_point(j);
            let lim = limit.eval(&x);
            table.push(vec![
                Cell::Float(x),
                Cell::Float(*cur.value(j)),
                Cell::Float(lim),
                Cell::Float((cur.value(j) - lim).abs()),
            ]);
        }
    }
    Ok(Outcome::clean(table))
}

/// `chain-sim`: Monte Carlo estimate of the absorption-at-1
/// probability, which the martingale argument pins to the start point.
pub fn chain_sim(
    n: usize,
    x0: f64,
    replicas: u64,
    max_steps: usize,
    seed: u64,
) -> anyhow::Result<Outcome> {
    let stream = RandomStream::new(seed);
    let est = absorption_prob_mc(n, x0, replicas, max_steps, &stream)?;
    let abs_dev = (est.estimate - x0).abs();
    let three_sigma = 3.0 * est.std_error;
    let pass = est.censored == 0 && abs_dev <= three_sigma;
    let mut table = Table::new(vec![
        "n",
        "x0",
        "replicas",
        "max_steps",
        "absorbed",
        "censored",
        "estimate",
        "std_error",
        "abs_dev",
        "three_sigma",
        "pass",
    ]);
    table.push(vec![
        Cell::Int(n as u64),
        Cell::Float(x0),
        Cell::Int(replicas),
        Cell::Int(max_steps as u64),
        Cell::Int(est.absorbed),
        Cell::Int(est.censored),
        Cell::Float(est.estimate),
        Cell::Float(est.std_error),
        Cell::Float(abs_dev),
        Cell::Float(three_sigma),
        Cell::Bool(pass),
    ]);
    Ok(Outcome {
        table,
        notes: vec![format!(
            "absorption-at-1 estimate {:.6} (target {x0}, {} censored)",
            est.estimate, est.censored
        )],
        violations: if pass { Vec::new() } else { vec![0] },
    })
}

/// `diffusion-sim`: Euler-Maruyama endpoint moments against the
/// closed-form moments, replica substreams fixed by the seed.
pub fn diffusion_sim(
    x0: f64,
    t: f64,
    dt: f64,
    replicas: u64,
    seed: u64,
) -> anyhow::Result<Outcome> {
    if replicas < 1 {
        return Err(Error::domain("replicas", "need replicas >= 1").into());
    }
    let stream = RandomStream::new(seed);
    let mut sums = [0.0f64; 3];
    let mut sums_sq = [0.0f64; 3];
    for i in 0..replicas {
        let path = euler_maruyama(x0, t, dt, &stream.substream(i))?;
        let xf = *path.values.last().expect("path has at least the start");
        let mut p = 1.0;
        for r in 0..3 {
            p *= xf;
            sums[r] += p;
            sums_sq[r] += p * p;
        }
    }
    let mut table = Table::new(vec![
        "r",
        "x0",
        "t",
        "dt",
        "replicas",
        "mc_moment",
        "closed_form",
        "abs_dev",
        "tolerance",
        "pass",
    ]);
    let mut violations = Vec::new();
    let rf = replicas as f64;
    for r in 1..=3usize {
        let mean = sums[r - 1] / rf;
        let var = (sums_sq[r - 1] / rf - mean * mean).max(0.0);
        // 3 sigma of the replica mean plus the O(dt) discretization slack.
        let tolerance = 3.0 * (var / rf).sqrt() + 2.0 * dt;
        let closed = moment_eval(r, t, x0)?;
        let abs_dev = (mean - closed).abs();
        let pass = abs_dev <= tolerance;
        if !pass {
            violations.push(table.rows.len());
        }
        table.push(vec![
            Cell::Int(r as u64),
            Cell::Float(x0),
            Cell::Float(t),
            Cell::Float(dt),
            Cell::Int(replicas),
            Cell::Float(mean),
            Cell::Float(closed),
            Cell::Float(abs_dev),
            Cell::Float(tolerance),
            Cell::Bool(pass),
        ]);
    }
    Ok(Outcome {
        table,
        notes: Vec::new(),
        violations,
    })
}

/// `moments`: closed-form E[X_t^r | X_0 = x], at one x or on a
/// 21-point grid.
pub fn moments(r: usize, t: f64, x: Option<f64>) -> anyhow::Result<Outcome> {
    let xs: Vec<f64> = match x {
        Some(x) => vec![x],
        None => (0..=20).map(|j| f64::from(j) / 20.0).collect(),
    };
    let mut table = Table::new(vec!["r", "t", "x", "moment"]);
    for x in xs {
        table.push(vec![
            Cell::Int(r as u64),
            Cell::Float(t),
            Cell::Float(x),
            Cell::Float(moment_eval(r, t, x)?),
        ]);
    }
    Ok(Outcome::clean(table))
}

/// `identity-check`: exact term-by-term comparison of the two moment
/// coefficient constructions.
pub fn identity_check(rmax: usize) -> anyhow::Result<Outcome> {
    let report = coefficient_identity_check(rmax)?;
    let pass = report.failures.is_empty();
    let mut table = Table::new(vec!["r_max", "triples", "failures", "pass"]);
    table.push(vec![
        Cell::Int(report.r_max as u64),
        Cell::Int(report.triples as u64),
        Cell::Int(report.failures.len() as u64),
        Cell::Bool(pass),
    ]);
    Ok(Outcome {
        table,
        notes: vec![format!(
            "{} triples, {} failures",
            report.triples,
            report.failures.len()
        )],
        violations: if pass { Vec::new() } else { vec![0] },
    })
}

/// `voronovskaya`: residual and bound rows plus cubic saturation.
pub fn voronovskaya(ns: &[usize]) -> anyhow::Result<Outcome> {
    let ns: Vec<usize> = if ns.is_empty() {
        vec![4, 16, 64, 256]
    } else {
        ns.to_vec()
    };
    Ok(rate_outcome(rates::voronovskaya_experiment(&ns)?))
}

/// `hoeffding`: exact binomial tails against the sub-Gaussian bound on
/// the standard 21-point grid of centers.
pub fn hoeffding(n: usize, eps: &Rational) -> anyhow::Result<Outcome> {
    let y_grid: Vec<Rational> = (0..=20).map(|j| rat(j, 20)).collect();
    Ok(rate_outcome(rates::hoeffding_check(n, eps, &y_grid)?))
}

/// `joint-limit`: sup-grid error of the iterate at k = [nt] against
/// the diffusion moment.
pub fn joint_limit(r: usize, t: f64, ns: &[usize]) -> anyhow::Result<Outcome> {
    let ns: Vec<usize> = if ns.is_empty() {
        vec![50, 100, 200, 400]
    } else {
        ns.to_vec()
    };
    Ok(rate_outcome(rates::joint_limit_experiment(r, t, &ns)?))
}

/// `kr-curve`: iterate error against the absorption bound and its
/// closed-form envelope for k = 1..k_max.
pub fn kr_curve(n: Option<usize>, k_max: usize, func: &FnSpec) -> anyhow::Result<Outcome> {
    let f = func.load_f64(n)?;
    Ok(rate_outcome(rates::kr_convergence_curve(&f, k_max)?))
}

/// `verify-all`: the full acceptance suite, one row per criterion.
/// Timing is deliberately left out of the table so that repeated runs
/// with one seed emit identical bytes.
pub fn verify_all(seed: u64, corrupt_bound: bool) -> anyhow::Result<Outcome> {
    let results = if corrupt_bound {
        acceptance::run_all_corrupted(seed)
    } else {
        acceptance::run_all(seed)
    };
    let mut table = Table::new(vec!["id", "criterion", "pass", "details"]);
    let mut notes = Vec::new();
    let mut violations = Vec::new();
    for (i, r) in results.iter().enumerate() {
        if !r.passed {
            violations.push(i);
        }
        notes.push(format!(
            "criterion {:2} [{}] {}",
            r.id,
            if r.passed { "PASS" } else { "FAIL" },
            r.name
        ));
        table.push(vec![
            Cell::Int(r.id as u64),
            Cell::Str(r.name.to_string()),
            Cell::Bool(r.passed),
            Cell::Str(r.details.clone()),
        ]);
    }
    let passed = results.iter().filter(|r| r.passed).count();
    notes.push(format!("{passed}/{} criteria passed", results.len()));
    Ok(Outcome {
        table,
        notes,
        violations,
    })
}

/// Shared mapping from a rate report to the uniform experiment table.
fn rate_outcome(report: RateReport) -> Outcome {
    let mut table = Table::new(vec![
        "n", "k", "t", "x", "eps", "observed", "bound", "formula", "pass",
    ]);
    let mut violations = Vec::new();
    for (i, row) in report.rows.iter().enumerate() {
        if row.pass == Some(false) {
            violations.push(i);
        }
        table.push(vec![
            Cell::opt_int(row.n),
            Cell::opt_int(row.k),
            Cell::opt_float(row.t),
            Cell::opt_float(row.x),
            Cell::opt_float(row.eps),
            Cell::Float(row.observed),
            Cell::opt_float(row.bound),
            Cell::Str(row.formula.clone()),
            Cell::opt_bool(row.pass),
        ]);
    }
    let mut note = report.experiment.clone();
    if !report.parameters.is_empty() {
        let params: Vec<String> = report
            .parameters
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        note.push_str(": ");
        note.push_str(&params.join(", "));
    }
    Outcome {
        table,
        notes: vec![note],
        violations,
    }
}
