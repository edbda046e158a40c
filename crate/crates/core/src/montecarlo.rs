//! Random orthogonal polynomials `sum c_j p_j` with i.i.d. coefficients:
//! real-zero counts by sign changes on a grid, all zeros from the comrade
//! matrix, and empirical scaled-zero measures compared with `mu_alpha`.
//!
//! Every trial draws from its own ChaCha8 stream `(seed, trial)`, so results
//! do not depend on how trials are scheduled across threads.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Complex, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::orthopoly::{eval_poly, ldexp, RecurrenceTable, RESCALE_BITS};
use crate::scaling::{equilibrium_density, solve_mrs, ullman_cdf, ScalingInfo, CONSTANT_TOL};
use crate::weights::WeightSpec;

/// Coefficient law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoeffDist {
    /// Centered normal with the given standard deviation.
    Gaussian(f64),
    Rademacher,
    /// Uniform on `(-1, 1)`.
    Uniform,
}

impl fmt::Display for CoeffDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoeffDist::Gaussian(s) => write!(f, "gaussian:{s}"),
            CoeffDist::Rademacher => f.write_str("rademacher"),
            CoeffDist::Uniform => f.write_str("uniform"),
        }
    }
}

impl FromStr for CoeffDist {
    type Err = Error;

    /// `gaussian`, `gaussian:<sigma>`, `rademacher` or `uniform`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: &str| Error::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        match s.split_once(':') {
            None if s == "gaussian" => Ok(CoeffDist::Gaussian(1.0)),
            None if s == "rademacher" => Ok(CoeffDist::Rademacher),
            None if s == "uniform" => Ok(CoeffDist::Uniform),
            Some(("gaussian", sigma)) => {
                let v: f64 = sigma.parse().map_err(|_| bad("sigma is not a number"))?;
                if v > 0.0 && v.is_finite() {
                    Ok(CoeffDist::Gaussian(v))
                } else {
                    Err(bad("sigma must be positive"))
                }
            }
            _ => Err(bad("expected gaussian[:sigma], rademacher or uniform")),
        }
    }
}

/// Coefficients `c_0 .. c_n` of one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSample {
    pub dist: CoeffDist,
    pub seed: u64,
    pub trial: u64,
    pub coeffs: Vec<f64>,
}

impl CoefficientSample {
    /// Wraps explicit coefficients, e.g. for deterministic test polynomials.
    pub fn from_coeffs(coeffs: Vec<f64>) -> Self {
        Self {
            dist: CoeffDist::Gaussian(1.0),
            seed: 0,
            trial: 0,
            coeffs,
        }
    }

    /// Index of the last nonzero coefficient.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|&c| c != 0.0)
    }
}

pub fn sample_coeffs(dist: CoeffDist, seed: u64, trial: u64, n: usize) -> Result<CoefficientSample> {
    if n == 0 {
        return Err(Error::invalid("degree must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let coeffs = (0..=n)
        .map(|_| match dist {
            CoeffDist::Gaussian(s) => s * rng.sample::<f64, _>(StandardNormal),
            CoeffDist::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            CoeffDist::Uniform => rng.random_range(-1.0..1.0),
        })
        .collect();
    Ok(CoefficientSample {
        dist,
        seed,
        trial,
        coeffs,
    })
}

/// Grid and refinement settings for sign-change counting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountConfig {
    /// Local grid step inside `Delta_{n+1}` is `step / sigma_{n+1}(x)`.
    pub step: f64,
    /// The fine grid extends to `pad a_{n+1}`.
    pub pad: f64,
    /// Growth factor of the geometric grid outside `Delta_{n+1}`.
    pub growth: f64,
    /// The geometric grid stops at `reach * pad * a_{n+1}`; signs at infinity come
    /// from the leading coefficient.
    pub reach: f64,
    /// Refine every bracket by bisection to width `1e-12 a_n`.
    pub refine: bool,
    pub max_grid: usize,
}

impl Default for CountConfig {
    fn default() -> Self {
        Self {
            step: 0.1,
            pad: 1.5,
            growth: 1.1,
            reach: 1e12,
            refine: true,
            max_grid: 2_000_000,
        }
    }
}

/// Grids with more entries than this evaluate the polynomial on the fly
/// instead of storing `p_j(x_i)` and `p_j'(x_i)`.
const PRECOMPUTE_LIMIT: usize = 4_000_000;

/// Counting grid, symmetric about 0, optionally with `p_j(x_i)` and
/// `p_j'(x_i)` stored under a per-point scale.
#[derive(Debug, Clone)]
pub struct CountingGrid {
    pub n: usize,
    pub points: Vec<f64>,
    values: Vec<f64>,
    derivs: Vec<f64>,
    exps: Vec<i64>,
    /// `a_n`, for the refinement width.
    pub a_n: f64,
    pub info_next: ScalingInfo,
}

impl CountingGrid {
    pub fn new(spec: &WeightSpec, table: &RecurrenceTable, n: usize, cfg: &CountConfig) -> Result<Self> {
        if n == 0 || n > table.n_max {
            return Err(Error::Index {
                requested: n,
                n_max: table.n_max,
            });
        }
        if !(cfg.step > 0.0 && cfg.step <= 0.2) {
            return Err(Error::invalid("grid step must lie in (0, 0.2]"));
        }
        let info = solve_mrs(spec, n + 1, CONSTANT_TOL)?;
        let a = info.a_n;
        let a_n = solve_mrs(spec, n, CONSTANT_TOL)?.a_n;
        let sigma = |x: f64| equilibrium_density(spec, &info, x, 1e-6);
        // Below the edge layer of width a (n+1)^{-2/3} the step stops shrinking.
        let floor_at = a * (1.0 - ((n + 1) as f64).powf(-2.0 / 3.0));
        let floor = sigma(floor_at)?;
        let mut half = vec![0.0];
        let mut x = 0.0;
        loop {
            let s = if x < floor_at { sigma(x)?.max(floor) } else { floor };
            x += cfg.step / s;
            if x >= a {
                break;
            }
            half.push(x);
            if half.len() > cfg.max_grid {
                return Err(grid_budget(cfg));
            }
        }
        let mut h = cfg.step / floor;
        x = a;
        let fine_end = cfg.pad * a;
        let far_end = cfg.reach * fine_end;
        while x < far_end {
            half.push(x);
            if x >= fine_end {
                h *= cfg.growth;
            } else {
                h = (h * cfg.growth).min(0.5 * a / n as f64 + h);
            }
            x += h;
            if half.len() > cfg.max_grid {
                return Err(grid_budget(cfg));
            }
        }
        half.push(far_end);
        let mut points: Vec<f64> = half.iter().skip(1).rev().map(|x| -x).collect();
        points.extend(&half);
        let mut grid = Self {
            n,
            values: Vec::new(),
            derivs: Vec::new(),
            exps: Vec::new(),
            points,
            a_n,
            info_next: info,
        };
        if grid.points.len() * (n + 1) <= PRECOMPUTE_LIMIT {
            for &x in &grid.points {
                let pv = eval_poly(table, x, n)?;
                grid.values.extend(pv.values);
                grid.derivs.extend(pv.derivs);
                grid.exps.push(pv.exponent);
            }
        }
        Ok(grid)
    }

    // (P, P', exponent) at point i.
    fn eval(&self, table: &RecurrenceTable, coeffs: &[f64], i: usize) -> (f64, f64, i64) {
        if self.exps.is_empty() {
            return eval_sum(table, coeffs, self.points[i]);
        }
        let r = i * (self.n + 1)..(i + 1) * (self.n + 1);
        let v = self.values[r.clone()].iter().zip(coeffs).map(|(p, c)| p * c).sum();
        let d = self.derivs[r].iter().zip(coeffs).map(|(p, c)| p * c).sum();
        (v, d, self.exps[i])
    }
}

fn grid_budget(cfg: &CountConfig) -> Error {
    Error::BudgetExceeded {
        what: "counting grid",
        detail: format!("more than {} points", cfg.max_grid),
    }
}

/// Real zeros found by sign changes.
#[derive(Debug, Clone, PartialEq)]
pub struct RealZeroCount {
    pub count: usize,
    /// Zero locations, ascending; a change between the outermost grid point
    /// and infinity is reported as `+-inf`.
    pub zeros: Vec<f64>,
}

fn sign_of(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

// sum c_j p_j(x) and its derivative, both times 2^-exponent.
fn eval_sum(table: &RecurrenceTable, coeffs: &[f64], x: f64) -> (f64, f64, i64) {
    let down = ldexp(1.0, -RESCALE_BITS);
    let (mut p_prev, mut p) = (0.0, table.gamma0());
    let (mut d_prev, mut d) = (0.0, 0.0);
    let mut v = coeffs[0] * p;
    let mut dv = 0.0;
    let mut e = 0;
    for k in 0..coeffs.len() - 1 {
        let b_k = if k == 0 { 0.0 } else { table.off_diag[k - 1] };
        let shift = x - table.diag[k];
        let p_next = (shift * p - b_k * p_prev) / table.off_diag[k];
        let d_next = (p + shift * d - b_k * d_prev) / table.off_diag[k];
        p_prev = p;
        d_prev = d;
        p = p_next;
        d = d_next;
        v += coeffs[k + 1] * p;
        dv += coeffs[k + 1] * d;
        if p.abs().max(d.abs()) > 1e77 {
            for q in [&mut p, &mut p_prev, &mut d, &mut d_prev, &mut v, &mut dv] {
                *q *= down;
            }
            e += RESCALE_BITS;
        }
    }
    (v, dv, e)
}

// Smallest value of sign * H over the interior critical points of the cubic
// Hermite interpolant H on [0, 1]; infinity when there are none.
fn hermite_dip(p0: f64, m0: f64, p1: f64, m1: f64, sign: f64) -> f64 {
    // H(t) = c0 + c1 t + c2 t^2 + c3 t^3
    let c1 = m0;
    let c2 = 3.0 * (p1 - p0) - 2.0 * m0 - m1;
    let c3 = 2.0 * (p0 - p1) + m0 + m1;
    let h = |t: f64| p0 + t * (c1 + t * (c2 + t * c3));
    // H'(t) = c1 + 2 c2 t + 3 c3 t^2
    let (qa, qb, qc) = (3.0 * c3, 2.0 * c2, c1);
    let mut roots = Vec::with_capacity(2);
    if qa.abs() <= 1e-14 * (qb.abs() + qc.abs()) {
        if qb != 0.0 {
            roots.push(-qc / qb);
        }
    } else {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc >= 0.0 {
            let q = -0.5 * (qb + qb.signum() * disc.sqrt());
            roots.push(q / qa);
            if q != 0.0 {
                roots.push(qc / q);
            }
        }
    }
    roots
        .into_iter()
        .filter(|t| *t > 0.0 && *t < 1.0)
        .map(|t| sign * h(t))
        .fold(f64::INFINITY, f64::min)
}

/// Counts real zeros of `sum c_j p_j`: sign changes between grid points
/// (an exact zero at a grid point counts once), changes toward `+-inf`, and
/// close pairs inside a single cell.
///
/// A cell whose ends share a sign is examined when the cubic Hermite
/// interpolant of `(P, P')` dips to a quarter of the smaller end value; the
/// critical point is then located by bisection on `P'` and its sign decides
/// whether the cell holds two zeros.
pub fn count_real_zeros(
    table: &RecurrenceTable,
    grid: &CountingGrid,
    sample: &CoefficientSample,
    cfg: &CountConfig,
) -> Result<RealZeroCount> {
    let n = grid.n;
    if sample.coeffs.len() != n + 1 {
        return Err(Error::invalid(format!(
            "sample has {} coefficients, grid is for degree {n}",
            sample.coeffs.len()
        )));
    }
    let Some(m) = sample.degree() else {
        return Err(Error::DegenerateSample);
    };
    let coeffs = &sample.coeffs;
    let lead = sign_of(coeffs[m]);
    let minus_inf = if m % 2 == 0 { lead } else { -lead };
    let width = 1e-12 * grid.a_n;
    let value_sign = |x: f64| sign_of(eval_sum(table, coeffs, x).0);
    let deriv_sign = |x: f64| sign_of(eval_sum(table, coeffs, x).1);
    // Bisection on a sign function; returns the midpoint of the last bracket.
    let bisect = |lo: f64, hi: f64, sign_lo: i8, f: &dyn Fn(f64) -> i8| -> f64 {
        let (mut lo, mut hi) = (lo, hi);
        while hi - lo > width {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let s = f(mid);
            if s == 0 {
                return mid;
            }
            if s == sign_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let locate = |lo: f64, hi: f64, sign_lo: i8| -> f64 {
        if lo.is_infinite() {
            lo
        } else if hi.is_infinite() {
            hi
        } else if cfg.refine {
            bisect(lo, hi, sign_lo, &value_sign)
        } else {
            0.5 * (lo + hi)
        }
    };
    let evals: Vec<(f64, f64, i64)> = (0..grid.points.len()).map(|i| grid.eval(table, coeffs, i)).collect();
    let mut zeros = Vec::new();
    let mut prev_sign = minus_inf;
    let mut prev: Option<usize> = None;
    let mut after_zero = false;
    for (i, &x) in grid.points.iter().enumerate() {
        let (v, d, e) = evals[i];
        let s = sign_of(v);
        if s == 0 {
            if !after_zero {
                zeros.push(x);
            }
            after_zero = true;
            continue;
        }
        match prev {
            Some(j) if j + 1 == i && s == prev_sign && !after_zero => {
                let (v0, d0, e0) = evals[j];
                let x0 = grid.points[j];
                let common = e0.max(e);
                let h = x - x0;
                let (p0, m0) = (ldexp(v0, e0 - common), ldexp(d0, e0 - common) * h);
                let (p1, m1) = (ldexp(v, e - common), ldexp(d, e - common) * h);
                let sg = s as f64;
                let d0s = sign_of(d0);
                if d0s != sign_of(d) && d0s != 0 && hermite_dip(p0, m0, p1, m1, sg) < 0.25 * (sg * p0).min(sg * p1) {
                    let c = bisect(x0, x, d0s, &deriv_sign);
                    match value_sign(c) {
                        0 => zeros.push(c),
                        sc if sc != s => {
                            zeros.push(locate(x0, c, s));
                            zeros.push(locate(c, x, sc));
                        }
                        _ => {}
                    }
                }
            }
            _ => {
                if s != prev_sign && !after_zero {
                    let lo = prev.map_or(f64::NEG_INFINITY, |j| grid.points[j]);
                    zeros.push(locate(lo, x, prev_sign));
                }
            }
        }
        after_zero = false;
        prev_sign = s;
        prev = Some(i);
    }
    if lead != prev_sign && !after_zero {
        zeros.push(f64::INFINITY);
    }
    Ok(RealZeroCount {
        count: zeros.len(),
        zeros,
    })
}

// Parlett-Reinsch balancing with radix 2.
fn balance(a: &mut DMatrix<f64>) {
    let n = a.nrows();
    loop {
        let mut done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let (mut c2, r2) = (c, r / 2.0);
            while c2 < r2 {
                c2 *= 4.0;
                f *= 2.0;
            }
            let r2 = r * 2.0;
            while c2 >= r2 {
                c2 /= 4.0;
                f /= 2.0;
            }
            let c_scaled = c * f;
            let r_scaled = r / f;
            if (c_scaled + r_scaled) < 0.95 * s && f != 1.0 {
                done = false;
                for j in 0..n {
                    a[(i, j)] /= f;
                    a[(j, i)] *= f;
                }
            }
        }
        if done {
            break;
        }
    }
}

/// The comrade matrix of `sum_{j<=m} c_j p_j`, `m` the last nonzero index.
pub fn comrade_matrix(table: &RecurrenceTable, sample: &CoefficientSample) -> Result<DMatrix<f64>> {
    let m = sample.degree().ok_or(Error::DegenerateSample)?;
    if m > table.n_max {
        return Err(Error::Index {
            requested: m,
            n_max: table.n_max,
        });
    }
    let mut a = DMatrix::zeros(m, m);
    for k in 0..m {
        a[(k, k)] = table.diag[k];
        if k + 1 < m {
            a[(k, k + 1)] = table.off_diag[k];
            a[(k + 1, k)] = table.off_diag[k];
        }
    }
    if m > 0 {
        let f = table.off_diag[m - 1] / sample.coeffs[m];
        for j in 0..m {
            a[(m - 1, j)] -= f * sample.coeffs[j];
        }
    }
    Ok(a)
}

/// All complex zeros, after dropping trailing zero coefficients.
pub fn all_zeros(table: &RecurrenceTable, sample: &CoefficientSample) -> Result<Vec<Complex<f64>>> {
    let a = comrade_matrix(table, sample)?;
    let m = a.nrows();
    if m == 0 {
        return Ok(Vec::new());
    }
    if m == 1 {
        return Ok(vec![Complex::new(a[(0, 0)], 0.0)]);
    }
    // The QR iteration occasionally stalls on one similarity form of the
    // matrix and converges on another, so a few are tried in a fixed order.
    let mut balanced = a.clone();
    balance(&mut balanced);
    let attempts = [
        (balanced, f64::EPSILON),
        (a.clone(), f64::EPSILON),
        (a.transpose(), f64::EPSILON),
        (a, 4.0 * f64::EPSILON),
    ];
    let schur = attempts
        .into_iter()
        .find_map(|(mat, eps)| nalgebra::linalg::Schur::try_new(mat, eps, 100 * m))
        .ok_or_else(|| Error::BudgetExceeded {
            what: "Schur iteration",
            detail: format!("no convergence for degree {m}"),
        })?;
    let mut z: Vec<Complex<f64>> = schur.complex_eigenvalues().iter().copied().collect();
    z.sort_by(|p, q| p.re.total_cmp(&q.re).then(p.im.total_cmp(&q.im)));
    Ok(z)
}

/// Sorted real parts of the zeros divided by `a_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    pub scaled_points: Vec<f64>,
    pub total: usize,
    /// Zeros with `|im| > imag_tol`.
    pub complex_count: usize,
}

impl EmpiricalMeasure {
    /// Fraction of points with `|s| > r`.
    pub fn fraction_outside(&self, r: f64) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        self.scaled_points.iter().filter(|s| s.abs() > r).count() as f64 / self.total as f64
    }

    /// Number of points in `[lo, hi)`.
    pub fn count_in(&self, lo: f64, hi: f64) -> usize {
        self.scaled_points.partition_point(|&s| s < hi) - self.scaled_points.partition_point(|&s| s < lo)
    }
}

pub fn empirical_measure(zeros: &[Complex<f64>], info: &ScalingInfo, imag_tol: f64) -> EmpiricalMeasure {
    let mut scaled_points: Vec<f64> = zeros.iter().map(|z| info.contract(z.re)).collect();
    scaled_points.sort_by(f64::total_cmp);
    EmpiricalMeasure {
        scaled_points,
        total: zeros.len(),
        complex_count: zeros.iter().filter(|z| z.im.abs() > imag_tol).count(),
    }
}

/// `sup_x |F_emp(x) - F_alpha(x)|`, attained at the jump points.
pub fn ks_to_ullman(measure: &EmpiricalMeasure, alpha: f64, tol: f64) -> Result<f64> {
    let n = measure.scaled_points.len();
    if n == 0 {
        return Err(Error::invalid("empty measure"));
    }
    let nf = n as f64;
    let mut d = 0.0f64;
    for (i, &x) in measure.scaled_points.iter().enumerate() {
        let f = ullman_cdf(alpha, x, tol)?;
        d = d.max(f - i as f64 / nf).max((i + 1) as f64 / nf - f);
    }
    Ok(d.clamp(0.0, 1.0))
}

/// One Monte Carlo trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: u64,
    pub count: usize,
    /// Zeros per bin of the scaled partition, when one was given.
    pub bins: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McSummary {
    pub n: usize,
    pub mean: f64,
    pub stderr: f64,
    /// Mean zeros per bin divided by `n`.
    pub bin_means: Vec<f64>,
    pub trials: Vec<TrialRecord>,
}

/// Sample mean and standard error (`n - 1` divisor).
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Monte Carlo estimate of `E[N_n(R)]`, optionally with zero counts per bin
/// of a partition of `[-1, 1]` given by its sorted scaled edges.
#[allow(clippy::too_many_arguments)]
pub fn mc_expected_zeros(
    spec: &WeightSpec,
    table: &RecurrenceTable,
    n: usize,
    trials: usize,
    dist: CoeffDist,
    seed: u64,
    partition: &[f64],
    cfg: &CountConfig,
) -> Result<McSummary> {
    if trials < 2 {
        return Err(Error::invalid("need at least two trials"));
    }
    if partition.windows(2).any(|w| !(w[0] < w[1])) || partition.iter().any(|e| e.abs() > 1.0) {
        return Err(Error::invalid("partition edges must increase within [-1, 1]"));
    }
    let grid = CountingGrid::new(spec, table, n, cfg)?;
    let info = solve_mrs(spec, n, CONSTANT_TOL)?;
    let records = (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let sample = sample_coeffs(dist, seed, trial, n)?;
            let c = count_real_zeros(table, &grid, &sample, cfg)?;
            let scaled: Vec<f64> = c.zeros.iter().map(|&z| info.contract(z)).collect();
            let bins = partition
                .windows(2)
                .map(|w| scaled.iter().filter(|&&s| s >= w[0] && s < w[1]).count())
                .collect();
            Ok(TrialRecord {
                trial,
                count: c.count,
                bins,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let counts: Vec<f64> = records.iter().map(|r| r.count as f64).collect();
    let (mean, stderr) = mean_stderr(&counts);
    let bin_means = (0..partition.len().saturating_sub(1))
        .map(|b| records.iter().map(|r| r.bins[b] as f64).sum::<f64>() / (trials as f64 * n as f64))
        .collect();
    Ok(McSummary {
        n,
        mean,
        stderr,
        bin_means,
        trials: records,
    })
}

/// Averages of the weak-convergence statistics over trials.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakConvergence {
    pub n: usize,
    pub ks: Vec<f64>,
    pub mean_ks: f64,
    /// Mean fraction of scaled zeros outside `[-1.05, 1.05]`.
    pub mean_outside: f64,
    /// Fraction of all zeros with `|im| > imag_tol`.
    pub complex_fraction: f64,
    /// Fraction of all zeros with `|im| > OFF_AXIS a_n`.
    pub off_axis_fraction: f64,
}

/// Relative distance from the real axis counted by [`WeakConvergence::off_axis_fraction`].
pub const OFF_AXIS: f64 = 0.05;

/// KS distance of the scaled-zero measure to `mu_alpha`, per trial.
pub fn weak_convergence(
    spec: &WeightSpec,
    table: &RecurrenceTable,
    n: usize,
    trials: usize,
    dist: CoeffDist,
    seed: u64,
    imag_tol_rel: f64,
) -> Result<WeakConvergence> {
    if trials == 0 {
        return Err(Error::invalid("need at least one trial"));
    }
    let info = solve_mrs(spec, n, CONSTANT_TOL)?;
    let alpha = spec.alpha();
    let per = (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let sample = sample_coeffs(dist, seed, trial, n)?;
            let z = all_zeros(table, &sample)?;
            let m = empirical_measure(&z, &info, imag_tol_rel * info.a_n);
            let ks = ks_to_ullman(&m, alpha, 1e-10)?;
            let total = m.total.max(1) as f64;
            let off_axis = z.iter().filter(|z| z.im.abs() > OFF_AXIS * info.a_n).count() as f64 / total;
            Ok((ks, m.fraction_outside(1.05), m.complex_count as f64 / total, off_axis))
        })
        .collect::<Result<Vec<_>>>()?;
    let t = trials as f64;
    Ok(WeakConvergence {
        n,
        ks: per.iter().map(|p| p.0).collect(),
        mean_ks: per.iter().map(|p| p.0).sum::<f64>() / t,
        mean_outside: per.iter().map(|p| p.1).sum::<f64>() / t,
        complex_fraction: per.iter().map(|p| p.2).sum::<f64>() / t,
        off_axis_fraction: per.iter().map(|p| p.3).sum::<f64>() / t,
    })
}
