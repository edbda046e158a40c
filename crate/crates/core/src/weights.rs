//! Exponential weights `W = exp(-Q)` and an empirical check of the
//! smoothness/growth class the limit theorems are stated for.
//!
//! A [`WeightSpec`] carries `Q`, `Q'` and `Q''` as callables, an evenness flag,
//! and the declared limit `alpha` of `T(t) = t Q'(t) / Q(t)` at infinity
//! (`f64::INFINITY` is allowed). Freud weights `Q(x) = c |x|^lambda` are built
//! with [`WeightSpec::freud`]; anything else goes through
//! [`WeightSpec::custom`].

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    Freud { c: f64, lambda: f64 },
    Custom,
}

/// The weight `W = exp(-Q)` together with `Q'`, `Q''` and the limit of `T`.
#[derive(Clone)]
pub struct WeightSpec {
    label: String,
    q: ScalarFn,
    q1: ScalarFn,
    q2: ScalarFn,
    even: bool,
    alpha: f64,
    kind: Kind,
}

impl fmt::Debug for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightSpec")
            .field("label", &self.label)
            .field("even", &self.even)
            .field("alpha", &self.alpha)
            .finish_non_exhaustive()
    }
}

impl WeightSpec {
    /// Freud weight `W(x) = exp(-c |x|^lambda)`.
    pub fn freud(c: f64, lambda: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::invalid(format!("Freud scale c must be positive, got {c}")));
        }
        if !(lambda > 1.0 && lambda.is_finite()) {
            return Err(Error::invalid(format!(
                "Freud exponent must satisfy lambda > 1, got {lambda}"
            )));
        }
        Ok(Self {
            label: format!("freud:{c}:{lambda}"),
            q: Arc::new(move |x: f64| c * x.abs().powf(lambda)),
            q1: Arc::new(move |x: f64| c * lambda * x.abs().powf(lambda - 1.0) * x.signum()),
            q2: Arc::new(move |x: f64| c * lambda * (lambda - 1.0) * x.abs().powf(lambda - 2.0)),
            even: true,
            alpha: lambda,
            kind: Kind::Freud { c, lambda },
        })
    }

    /// A user-supplied weight. Derivatives are trusted here and cross-checked by
    /// [`validate_class`].
    pub fn custom<Q, Q1, Q2>(
        label: impl Into<String>,
        q: Q,
        q1: Q1,
        q2: Q2,
        even: bool,
        alpha: f64,
    ) -> Self
    where
        Q: Fn(f64) -> f64 + Send + Sync + 'static,
        Q1: Fn(f64) -> f64 + Send + Sync + 'static,
        Q2: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            label: label.into(),
            q: Arc::new(q),
            q1: Arc::new(q1),
            q2: Arc::new(q2),
            even,
            alpha,
            kind: Kind::Custom,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn even(&self) -> bool {
        self.even
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `(c, lambda)` when this is a Freud weight.
    pub fn freud_params(&self) -> Option<(f64, f64)> {
        match self.kind {
            Kind::Freud { c, lambda } => Some((c, lambda)),
            Kind::Custom => None,
        }
    }

    #[inline]
    pub fn q(&self, x: f64) -> f64 {
        (self.q)(x)
    }

    #[inline]
    pub fn q1(&self, x: f64) -> f64 {
        (self.q1)(x)
    }

    /// `Q''(x)`; callers never pass `x = 0`.
    #[inline]
    pub fn q2(&self, x: f64) -> f64 {
        debug_assert!(x != 0.0, "Q'' is not defined at the origin");
        (self.q2)(x)
    }

    /// `W(x) = exp(-Q(x))`.
    pub fn w(&self, x: f64) -> f64 {
        (-self.q(x)).exp()
    }

    /// `T(t) = t Q'(t) / Q(t)`.
    pub fn eval_t(&self, t: f64) -> Result<f64> {
        if t == 0.0 {
            return Err(Error::DegenerateInput("T is undefined at t = 0".into()));
        }
        let q = self.q(t);
        if q == 0.0 {
            return Err(Error::DegenerateInput(format!("Q({t}) = 0, T undefined")));
        }
        Ok(t * self.q1(t) / q)
    }
}

impl FromStr for WeightSpec {
    type Err = Error;

    /// Registry keys: `freud:<c>:<lambda>` and the alias `hermite`
    /// (`freud:0.5:2`, i.e. `W^2 = exp(-x^2)`).
    fn from_str(key: &str) -> Result<Self> {
        let parse_err = |reason: &str| Error::Parse {
            input: key.to_string(),
            reason: reason.to_string(),
        };
        let key = key.trim();
        if key == "hermite" {
            return WeightSpec::freud(0.5, 2.0);
        }
        let mut parts = key.split(':');
        match parts.next() {
            Some("freud") => {
                let c: f64 = parts
                    .next()
                    .ok_or_else(|| parse_err("missing c"))?
                    .parse()
                    .map_err(|_| parse_err("c is not a number"))?;
                let lambda: f64 = parts
                    .next()
                    .ok_or_else(|| parse_err("missing lambda"))?
                    .parse()
                    .map_err(|_| parse_err("lambda is not a number"))?;
                if parts.next().is_some() {
                    return Err(parse_err("expected freud:<c>:<lambda>"));
                }
                WeightSpec::freud(c, lambda)
            }
            _ => Err(parse_err("unknown weight; expected freud:<c>:<lambda> or hermite")),
        }
    }
}

/// Shorthand for [`WeightSpec::freud`].
pub fn make_freud(c: f64, lambda: f64) -> Result<WeightSpec> {
    WeightSpec::freud(c, lambda)
}

/// Class conditions checked by [`validate_class`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    /// `Q(0) = 0`.
    OriginValue,
    /// `Q'` continuous and consistent with `Q` (finite-difference check).
    Derivative,
    /// `Q'` non-decreasing.
    Monotone,
    /// `Q -> infinity`.
    Growth,
    /// `T` quasi-increasing.
    QuasiIncreasing,
    /// `T >= Lambda > 1`.
    LowerBound,
    /// `Q'' / |Q'| <= C2 |Q'| / Q`.
    Curvature,
    /// Evenness flag matches the callables.
    Evenness,
    /// Declared `alpha` lies in `(1, infinity]`.
    DeclaredAlpha,
    /// `Q >= 0`.
    Sign,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Condition::OriginValue => "a:Q(0)=0",
            Condition::Derivative => "a:Q'-consistency",
            Condition::Monotone => "b:Q'-nondecreasing",
            Condition::Growth => "c:Q-unbounded",
            Condition::QuasiIncreasing => "d:T-quasi-increasing",
            Condition::LowerBound => "d:T>=Lambda>1",
            Condition::Curvature => "e:curvature",
            Condition::Evenness => "evenness",
            Condition::DeclaredAlpha => "alpha-range",
            Condition::Sign => "Q>=0",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub condition: Condition,
    pub t: f64,
    pub detail: String,
}

/// Witnesses collected by [`validate_class`].
#[derive(Debug, Clone, PartialEq)]
pub struct ClassReport {
    pub t_samples: Vec<(f64, f64)>,
    /// Smallest `C1` with `T(x) <= C1 T(y)` for all grid pairs `x < y`.
    pub quasi_increase_constant: f64,
    /// `min T` over the grid.
    pub lambda_lower: f64,
    /// Smallest `C2` satisfying the curvature condition on the grid.
    pub growth_constant: f64,
    pub passed: bool,
    pub violations: Vec<Violation>,
}

const DERIVATIVE_RTOL: f64 = 1e-6;

/// Checks the class conditions on a finite grid of positive abscissae.
///
/// Violations are returned as data. For even weights the negative half-line
/// is covered by symmetry; the same `C1` is used on both sides.
pub fn validate_class(spec: &WeightSpec, grid: &[f64]) -> Result<ClassReport> {
    if grid.is_empty() {
        return Err(Error::invalid("validation grid is empty"));
    }
    if grid.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
        return Err(Error::invalid("validation grid must contain positive finite values"));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("validation grid must be strictly increasing"));
    }

    let mut violations = Vec::new();
    let mut push = |condition, t, detail: String| {
        violations.push(Violation {
            condition,
            t,
            detail,
        })
    };

    if !(spec.alpha > 1.0) {
        push(
            Condition::DeclaredAlpha,
            f64::NAN,
            format!("declared alpha = {} is not in (1, inf]", spec.alpha),
        );
    }

    let q0 = spec.q(0.0);
    if q0.abs() > 1e-14 {
        push(Condition::OriginValue, 0.0, format!("Q(0) = {q0:e}"));
    }

    let mut t_samples = Vec::with_capacity(grid.len());
    let mut prev_q1 = spec.q1(0.0);
    for &t in grid {
        let q = spec.q(t);
        let q1 = spec.q1(t);
        if q < 0.0 {
            push(Condition::Sign, t, format!("Q = {q:e} < 0"));
        }
        if q1 < prev_q1 - 1e-12 * prev_q1.abs() {
            push(
                Condition::Monotone,
                t,
                format!("Q' decreased from {prev_q1:e} to {q1:e}"),
            );
        }
        prev_q1 = q1;

        let h = 1e-5 * t;
        let fd = (spec.q(t + h) - spec.q(t - h)) / (2.0 * h);
        if (fd - q1).abs() > DERIVATIVE_RTOL * q1.abs().max(fd.abs()).max(1e-300) {
            push(
                Condition::Derivative,
                t,
                format!("Q' = {q1:e} but finite difference gives {fd:e}"),
            );
        }

        if spec.even {
            let qm = spec.q(-t);
            let q1m = spec.q1(-t);
            if (qm - q).abs() > 1e-12 * q.abs().max(1e-300)
                || (q1m + q1).abs() > 1e-12 * q1.abs().max(1e-300)
            {
                push(
                    Condition::Evenness,
                    t,
                    format!("Q(-t) = {qm:e}, Q(t) = {q:e}, Q'(-t) = {q1m:e}, Q'(t) = {q1:e}"),
                );
            }
        }

        match spec.eval_t(t) {
            Ok(tv) => t_samples.push((t, tv)),
            Err(e) => push(Condition::LowerBound, t, e.to_string()),
        }
    }

    let first_q = spec.q(grid[0]);
    let last_q = spec.q(grid[grid.len() - 1]);
    if !(last_q > first_q) {
        push(
            Condition::Growth,
            grid[grid.len() - 1],
            format!("Q does not increase across the grid ({first_q:e} -> {last_q:e})"),
        );
    }

    // C1: max over i < j of T_i / T_j, via suffix minima.
    let mut quasi = if t_samples.len() > 1 { 0.0f64 } else { 1.0 };
    let mut suffix_min = f64::INFINITY;
    for &(_, tv) in t_samples.iter().rev() {
        if suffix_min.is_finite() && suffix_min > 0.0 {
            quasi = quasi.max(tv / suffix_min);
        }
        suffix_min = suffix_min.min(tv);
    }
    if !quasi.is_finite() {
        push(
            Condition::QuasiIncreasing,
            f64::NAN,
            "T is not bounded away from zero".into(),
        );
    }

    let (lambda_lower, lambda_at) = t_samples
        .iter()
        .fold((f64::INFINITY, f64::NAN), |(m, at), &(t, tv)| {
            if tv < m {
                (tv, t)
            } else {
                (m, at)
            }
        });
    if !(lambda_lower > 1.0 + 1e-12) {
        push(
            Condition::LowerBound,
            lambda_at,
            format!("min T = {lambda_lower} is not > 1"),
        );
    }

    let mut growth_constant = 0.0f64;
    for &t in grid {
        let q = spec.q(t);
        let q1 = spec.q1(t);
        let q2 = spec.q2(t);
        if q1 == 0.0 || q == 0.0 {
            continue;
        }
        let ratio = q2 * q / (q1 * q1);
        if !ratio.is_finite() {
            push(Condition::Curvature, t, format!("Q''Q/Q'^2 = {ratio}"));
            continue;
        }
        growth_constant = growth_constant.max(ratio);
    }

    let passed = violations.is_empty();
    Ok(ClassReport {
        t_samples,
        quasi_increase_constant: quasi,
        lambda_lower,
        growth_constant,
        passed,
        violations,
    })
}

/// `count` log-spaced points in `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && count >= 2);
    let (l0, l1) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (l0 + (l1 - l0) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn freud_direct_substitution() {
        let w = make_freud(1.0, 2.0).unwrap();
        assert_eq!(w.q(1.0), 1.0);
        assert_eq!(w.q1(1.0), 2.0);
        assert_eq!(w.alpha(), 2.0);
        let w = make_freud(0.5, 4.0).unwrap();
        assert_eq!(w.q(2.0), 8.0);
        assert_eq!(w.q1(2.0), 16.0);
        assert_eq!(w.eval_t(2.0).unwrap(), 4.0);
    }

    #[test]
    fn freud_t_is_constant() {
        let w = make_freud(1.0, 2.0).unwrap();
        for t in [-7.5, -0.1, 0.3, 3.0, 1e3] {
            assert!((w.eval_t(t).unwrap() - 2.0).abs() < 1e-14);
        }
        let w = make_freud(1.0, 8.0).unwrap();
        assert!((w.eval_t(0.1).unwrap() - 8.0).abs() < 1e-13);
    }

    #[test]
    fn freud_rejects_small_exponent() {
        assert!(make_freud(1.0, 1.0).is_err());
        assert!(make_freud(1.0, 0.5).is_err());
        assert!(make_freud(0.0, 2.0).is_err());
    }

    #[test]
    fn t_of_quartic_plus_quadratic() {
        let w = WeightSpec::custom(
            "x2+x4",
            |x| x * x + x.powi(4),
            |x| 2.0 * x + 4.0 * x.powi(3),
            |x| 2.0 + 12.0 * x * x,
            true,
            4.0,
        );
        assert!((w.eval_t(1.0).unwrap() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn t_undefined_at_zero() {
        let w = make_freud(1.0, 2.0).unwrap();
        assert!(matches!(w.eval_t(0.0), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn gaussian_weight_passes() {
        let w = make_freud(1.0, 2.0).unwrap();
        let grid: Vec<f64> = (1..=100).map(|k| 0.1 * k as f64).collect();
        let r = validate_class(&w, &grid).unwrap();
        assert!(r.passed, "{:?}", r.violations);
        assert!((r.lambda_lower - 2.0).abs() < 1e-12);
    }

    #[test]
    fn absolute_value_fails_lower_bound() {
        let w = WeightSpec::custom("abs", f64::abs, f64::signum, |_| 0.0, true, 1.5);
        let r = validate_class(&w, &log_grid(0.01, 10.0, 20)).unwrap();
        assert!(!r.passed);
        assert!(r
            .violations
            .iter()
            .any(|v| v.condition == Condition::LowerBound));
    }

    #[test]
    fn cubic_freud_curvature_constant() {
        // Q = 2|x|^3: Q''Q/Q'^2 = (lambda - 1)/lambda = 2/3 exactly.
        let w = make_freud(2.0, 3.0).unwrap();
        let r = validate_class(&w, &log_grid(0.01, 100.0, 50)).unwrap();
        assert!(r.passed, "{:?}", r.violations);
        assert!((r.growth_constant - 2.0 / 3.0).abs() < 0.1 * 2.0 / 3.0);
    }

    #[test]
    fn inconsistent_derivative_is_reported() {
        let w = WeightSpec::custom(
            "bad",
            |x| x * x,
            |x| 3.0 * x,
            |_| 3.0,
            true,
            2.0,
        );
        let r = validate_class(&w, &log_grid(0.1, 10.0, 10)).unwrap();
        assert!(r
            .violations
            .iter()
            .any(|v| v.condition == Condition::Derivative));
    }

    #[test]
    fn registry_keys() {
        let w: WeightSpec = "freud:0.5:4".parse().unwrap();
        assert_eq!(w.freud_params(), Some((0.5, 4.0)));
        let h: WeightSpec = "hermite".parse().unwrap();
        assert_eq!(h.freud_params(), Some((0.5, 2.0)));
        assert!("freud:1".parse::<WeightSpec>().is_err());
        assert!("laguerre:1:2".parse::<WeightSpec>().is_err());
        assert!("freud:1:0.9".parse::<WeightSpec>().is_err());
    }
}
