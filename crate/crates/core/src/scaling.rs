//! Mhaskar–Rakhmanov–Saff numbers, the contraction to `[-1, 1]`, the
//! equilibrium densities `sigma_n` / `sigma_n*`, and the Ullman/arcsine limits.
//!
//! Every integral with a `1/sqrt(1 - t^2)` factor is taken in the angle
//! variable `t = cos(theta)`, where the weight becomes `d theta` and the
//! integrand is bounded. The angle form also gives `rho_n(x) = delta_n sin(phi)`
//! without cancellation near the endpoints of `Delta_n`.

use std::f64::consts::{FRAC_PI_2, PI};

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::quad::{adaptive, Integral, Tolerance};
use crate::weights::WeightSpec;

/// Default tolerance for constants and the MRS equation.
pub const CONSTANT_TOL: f64 = 1e-10;
/// Default tolerance for pointwise densities.
pub const DENSITY_TOL: f64 = 1e-8;

/// Scaling data for one degree `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingInfo {
    pub n: usize,
    /// MRS number `a_n`.
    pub a_n: f64,
    /// Half-length of `Delta_n`; equals `a_n` for even weights.
    pub delta_n: f64,
    /// Center of `Delta_n`; zero for even weights.
    pub beta_n: f64,
    /// MRS equation defect at the returned `a_n`.
    pub residual: f64,
}

impl ScalingInfo {
    /// `L_n(x) = (x - beta_n) / delta_n`.
    pub fn contract(&self, x: f64) -> f64 {
        (x - self.beta_n) / self.delta_n
    }

    /// `L_n^{-1}(s) = beta_n + delta_n s`.
    pub fn expand(&self, s: f64) -> f64 {
        self.beta_n + self.delta_n * s
    }

    /// `Delta_n = [a_{-n}, a_n]`.
    pub fn interval(&self) -> (f64, f64) {
        (self.beta_n - self.delta_n, self.beta_n + self.delta_n)
    }

    /// `rho_n(x) = sqrt((x - a_{-n})(a_n - x))`, zero outside `Delta_n`.
    pub fn rho(&self, x: f64) -> f64 {
        let (lo, hi) = self.interval();
        ((x - lo) * (hi - x)).max(0.0).sqrt()
    }

    /// `J_n(eps) = L_n^{-1}[-1 + eps, 1 - eps]`.
    pub fn j_interval(&self, eps: f64) -> (f64, f64) {
        (self.expand(-1.0 + eps), self.expand(1.0 - eps))
    }
}

fn angle_tol(abs: f64) -> Tolerance {
    Tolerance::new(abs, 1e-14).with_max_panels(20_000)
}

/// `(2/pi) int_0^1 a t Q'(a t) / sqrt(1 - t^2) dt`.
pub fn mrs_objective(spec: &WeightSpec, a: f64, tol: f64) -> Result<f64> {
    let r = adaptive(
        |theta| {
            let t = theta.cos();
            a * t * spec.q1(a * t)
        },
        0.0,
        FRAC_PI_2,
        &[],
        angle_tol(tol * FRAC_PI_2 / 4.0),
    )?;
    Ok(r.value * 2.0 / PI)
}

fn mrs_objective_derivative(spec: &WeightSpec, a: f64, tol: f64) -> Result<f64> {
    let r = adaptive(
        |theta| {
            let t = theta.cos();
            let at = a * t;
            t * spec.q1(at) + if at == 0.0 { 0.0 } else { a * t * t * spec.q2(at) }
        },
        0.0,
        FRAC_PI_2,
        &[],
        angle_tol(tol),
    )?;
    Ok(r.value * 2.0 / PI)
}

/// Bracket `[lo, hi]` with `F(lo) <= n <= F(hi)`, found by doubling/halving from `a = 1`.
pub fn mrs_bracket(spec: &WeightSpec, n: usize, tol: f64) -> Result<(f64, f64)> {
    let target = n as f64;
    let qtol = tol * 1e-2;
    let mut lo;
    let mut hi;
    if mrs_objective(spec, 1.0, qtol)? < target {
        lo = 1.0;
        hi = 2.0;
        let mut steps = 0;
        while mrs_objective(spec, hi, qtol)? < target {
            lo = hi;
            hi *= 2.0;
            steps += 1;
            if steps > 1100 || !hi.is_finite() {
                return Err(Error::NoBracket { n, last_a: hi });
            }
        }
    } else {
        hi = 1.0;
        lo = 0.5;
        let mut steps = 0;
        while mrs_objective(spec, lo, qtol)? > target {
            hi = lo;
            lo *= 0.5;
            steps += 1;
            if steps > 1100 || lo == 0.0 {
                return Err(Error::NoBracket { n, last_a: lo });
            }
        }
    }
    Ok((lo, hi))
}

/// Solves the even-weight MRS equation for `a_n`.
///
/// Doubling bracket, bisection to relative width `1e-13`, then one Newton
/// step on the differentiated integrand. The result satisfies
/// `|F(a_n) - n| <= tol`.
pub fn solve_mrs(spec: &WeightSpec, n: usize, tol: f64) -> Result<ScalingInfo> {
    if !spec.even() {
        return Err(Error::NonEvenWeight(spec.label().to_string()));
    }
    if n == 0 {
        return Err(Error::invalid("MRS numbers are defined for n >= 1"));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let target = n as f64;
    let qtol = tol * 1e-2;
    let (mut lo, mut hi) = mrs_bracket(spec, n, tol)?;
    while hi - lo > 1e-13 * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if mrs_objective(spec, mid, qtol)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut a = 0.5 * (lo + hi);
    let mut residual = mrs_objective(spec, a, qtol)? - target;
    let slope = mrs_objective_derivative(spec, a, qtol)?;
    if slope > 0.0 {
        let polished = a - residual / slope;
        if polished.is_finite() && polished > 0.0 {
            let r = mrs_objective(spec, polished, qtol)? - target;
            if r.abs() < residual.abs() {
                a = polished;
                residual = r;
            }
        }
    }
    if residual.abs() > tol {
        return Err(Error::BudgetExceeded {
            what: "MRS solver",
            detail: format!("residual {residual:e} exceeds tolerance {tol:e}"),
        });
    }
    Ok(ScalingInfo {
        n,
        a_n: a,
        delta_n: a,
        beta_n: 0.0,
        residual,
    })
}

// sigma_n at x, with rho_n(x) supplied by the caller.
fn sigma_core(spec: &WeightSpec, info: &ScalingInfo, x: f64, rho_x: f64, tol: f64) -> Result<f64> {
    let (beta, delta) = (info.beta_n, info.delta_n);
    let q1x = spec.q1(x);
    let near = 1e-6 * delta;
    let divided = |theta: f64| {
        let s = beta + delta * theta.cos();
        let d = s - x;
        if d.abs() < near {
            let m = 0.5 * (s + x);
            if m == 0.0 {
                spec.q2(f64::MIN_POSITIVE)
            } else {
                spec.q2(m)
            }
        } else {
            (spec.q1(s) - q1x) / d
        }
    };
    let mut breaks = vec![((x - beta) / delta).clamp(-1.0, 1.0).acos()];
    let zero = (-beta / delta).clamp(-1.0, 1.0).acos();
    breaks.push(zero);
    let itol = if rho_x > 0.0 { tol * PI * PI / rho_x } else { tol };
    let r = adaptive(divided, 0.0, PI, &breaks, angle_tol(itol))?;
    Ok((rho_x * r.value / (PI * PI)).max(0.0))
}

/// Equilibrium density `sigma_n(x)` for `x` strictly inside `Delta_n`.
pub fn equilibrium_density(spec: &WeightSpec, info: &ScalingInfo, x: f64, tol: f64) -> Result<f64> {
    let (lo, hi) = info.interval();
    if !(x > lo && x < hi) {
        return Err(Error::Domain {
            what: "x",
            value: x,
            domain: "(a_{-n}, a_n)",
        });
    }
    sigma_core(spec, info, x, info.rho(x), tol)
}

/// `sigma_n` at `x = beta_n + delta_n cos(phi)`.
fn sigma_at_angle(spec: &WeightSpec, info: &ScalingInfo, phi: f64, tol: f64) -> Result<f64> {
    let x = info.expand(phi.cos());
    sigma_core(spec, info, x, info.delta_n * phi.sin(), tol)
}

/// `sigma_n*(s) = (delta_n / n) sigma_n(L_n^{-1}(s))` for `|s| < 1`.
pub fn normalized_density(spec: &WeightSpec, info: &ScalingInfo, s: f64, tol: f64) -> Result<f64> {
    if !(s.abs() < 1.0) {
        return Err(Error::Domain {
            what: "s",
            value: s,
            domain: "(-1, 1)",
        });
    }
    let scale = info.delta_n / info.n as f64;
    let x = info.expand(s);
    let rho = info.delta_n * ((1.0 - s) * (1.0 + s)).sqrt();
    Ok(scale * sigma_core(spec, info, x, rho, tol / scale)?)
}

/// `int sigma_n` over `Delta_n`; should equal `n`.
pub fn equilibrium_mass(spec: &WeightSpec, info: &ScalingInfo, tol: f64) -> Result<Integral> {
    let delta = info.delta_n;
    let inner = tol / (8.0 * delta);
    let mut failure = None;
    let r = adaptive(
        |phi| match sigma_at_angle(spec, info, phi, inner) {
            Ok(v) => v * delta * phi.sin(),
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        0.0,
        PI,
        &[FRAC_PI_2],
        Tolerance::new(tol / 2.0, 1e-14),
    );
    if let Some(e) = failure {
        return Err(e);
    }
    r
}

/// `int sigma_n*` over `[-1, 1]`; should equal 1.
pub fn normalized_mass(spec: &WeightSpec, info: &ScalingInfo, tol: f64) -> Result<Integral> {
    let m = equilibrium_mass(spec, info, tol * info.n as f64)?;
    let n = info.n as f64;
    Ok(Integral {
        value: m.value / n,
        error: m.error / n,
        panels: m.panels,
    })
}

/// `gamma_alpha` and `B_alpha` of the standard Freud weight with index `alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreudConstants {
    /// `int_0^1 t^(alpha-1) / sqrt(1 - t^2) dt`
    pub gamma: f64,
    /// `(2/pi) int_0^1 t^alpha / sqrt(1 - t^2) dt`
    pub b: f64,
}

/// Computes the constants by quadrature in the angle variable.
pub fn freud_constants(alpha: f64) -> Result<FreudConstants> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::invalid(format!("alpha must be positive and finite, got {alpha}")));
    }
    let tol = Tolerance::new(1e-16, 1e-15).with_max_panels(20_000);
    // Near theta = pi/2 write phi = pi/2 - theta = w^(1/alpha), which turns
    // sin(phi)^(alpha-1) d phi into (sin(phi)/phi)^(alpha-1) dw / alpha.
    let quarter = FRAC_PI_2 / 2.0;
    let inner = adaptive(|th| th.cos().powf(alpha - 1.0), 0.0, quarter, &[], tol)?.value;
    let edge = adaptive(
        |w: f64| {
            let phi = w.powf(1.0 / alpha);
            let sinc = if phi == 0.0 { 1.0 } else { phi.sin() / phi };
            sinc.powf(alpha - 1.0) / alpha
        },
        0.0,
        quarter.powf(alpha),
        &[],
        tol,
    )?
    .value;
    let gamma = inner + edge;
    let b = adaptive(|th| th.cos().powf(alpha), 0.0, FRAC_PI_2, &[], tol)?.value * 2.0 / PI;
    Ok(FreudConstants { gamma, b })
}

/// The same constants from the Gamma function.
pub fn freud_constants_gamma_formula(alpha: f64) -> FreudConstants {
    let half_ln_pi = 0.5 * PI.ln();
    let gamma = 0.5 * (ln_gamma(alpha / 2.0) + half_ln_pi - ln_gamma(alpha / 2.0 + 0.5)).exp();
    // B_alpha = (2/pi) * gamma_{alpha + 1}
    let g1 = 0.5 * (ln_gamma((alpha + 1.0) / 2.0) + half_ln_pi - ln_gamma(alpha / 2.0 + 1.0)).exp();
    FreudConstants {
        gamma,
        b: 2.0 * g1 / PI,
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "alpha",
            value: alpha,
            domain: "(1, inf]",
        })
    }
}

/// Ullman density `mu'_alpha(x)`; `alpha = inf` is the arcsine density.
///
/// For finite `alpha` the substitution `t^2 = x^2 + (1 - x^2) u^2` turns the
/// defining integral into `sqrt(1 - x^2) int_0^1 t^(alpha-2) du`. When
/// `alpha < 2` the remaining `u^(alpha-2)` behaviour at `x = 0` is flattened by
/// `u = v^(1/(alpha-1))`.
pub fn ullman_density(alpha: f64, x: f64, tol: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if alpha.is_infinite() {
        if x.abs() >= 1.0 {
            return Err(Error::Singularity(x));
        }
        return Ok(1.0 / (PI * ((1.0 - x) * (1.0 + x)).sqrt()));
    }
    if x.abs() > 1.0 {
        return Err(Error::Domain {
            what: "x",
            value: x,
            domain: "[-1, 1]",
        });
    }
    let ax = x.abs();
    let s = (1.0 - ax) * (1.0 + ax);
    if s == 0.0 {
        return Ok(0.0);
    }
    let x2 = ax * ax;
    let scale = alpha / PI * s.sqrt();
    let itol = Tolerance::new(tol / scale, 1e-14).with_max_panels(20_000);
    let integral = if alpha < 2.0 {
        let p = 1.0 / (alpha - 1.0);
        adaptive(
            |v: f64| {
                let u = v.powf(p);
                let t = (x2 + s * u * u).sqrt();
                p * v.powf(p - 1.0) * t.powf(alpha - 2.0)
            },
            0.0,
            1.0,
            &[],
            itol,
        )?
    } else {
        adaptive(
            |u: f64| (x2 + s * u * u).sqrt().powf(alpha - 2.0),
            0.0,
            1.0,
            &[],
            itol,
        )?
    };
    Ok(scale * integral.value)
}

// (t^alpha - x^alpha) / (t^2 - x^2) for t, x >= 0 without cancellation.
fn power_divided_difference(alpha: f64, t: f64, x: f64) -> f64 {
    if x == 0.0 {
        return t.powf(alpha - 2.0);
    }
    let h = t / x - 1.0;
    let g = if h == 0.0 {
        alpha
    } else {
        (alpha * h.ln_1p()).exp_m1() / h
    };
    x.powf(alpha - 1.0) * g / (t + x)
}

/// Ullman density through the equilibrium-density representation
/// `(2 sqrt(1-x^2) / (pi^2 B_alpha)) int_0^1 (t^a - x^a)/(t^2 - x^2) dt / sqrt(1-t^2)`.
pub fn ullman_density_alt(alpha: f64, x: f64, tol: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if alpha.is_infinite() {
        return Err(Error::invalid("the alternative formula needs finite alpha"));
    }
    if !(x.abs() < 1.0) {
        return Err(Error::Domain {
            what: "x",
            value: x,
            domain: "(-1, 1)",
        });
    }
    let ax = x.abs();
    let b = freud_constants(alpha)?.b;
    let scale = 2.0 * ((1.0 - ax) * (1.0 + ax)).sqrt() / (PI * PI * b);
    let r = adaptive(
        |theta: f64| power_divided_difference(alpha, theta.cos(), ax),
        0.0,
        FRAC_PI_2,
        &[ax.acos()],
        Tolerance::new(tol / scale, 1e-14).with_max_panels(20_000),
    )?;
    Ok(scale * r.value)
}

/// `mu_alpha((-inf, x])`.
///
/// Finite `alpha` uses
/// `F(x) = 1/2 + sign(x) [ |x|^alpha / 2 + (alpha/pi) int_|x|^1 t^(alpha-1) asin(|x|/t) dt ]`,
/// obtained by exchanging the order of integration in the density.
pub fn ullman_cdf(alpha: f64, x: f64, tol: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if x <= -1.0 {
        return Ok(0.0);
    }
    if x >= 1.0 {
        return Ok(1.0);
    }
    if alpha.is_infinite() {
        return Ok((x.asin() + FRAC_PI_2) / PI);
    }
    let ax = x.abs();
    if ax == 0.0 {
        return Ok(0.5);
    }
    let r = adaptive(
        |t: f64| t.powf(alpha - 1.0) * (ax / t).min(1.0).asin(),
        ax,
        1.0,
        &[],
        Tolerance::new(tol * PI / alpha, 1e-14).with_max_panels(20_000),
    )?;
    let half_mass = 0.5 * ax.powf(alpha) + alpha / PI * r.value;
    Ok((0.5 + x.signum() * half_mass).clamp(0.0, 1.0))
}

/// Which density a [`DensityCurve`] samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurveKind {
    /// `sigma_n`, mass `n`.
    Equilibrium { n: usize },
    /// `sigma_n*`, mass 1.
    Normalized { n: usize },
    /// `mu'_alpha`, mass 1.
    Ullman { alpha: f64 },
}

/// A sampled density with its quadrature mass.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityCurve {
    pub kind: CurveKind,
    pub points: Vec<(f64, f64)>,
    pub mass: f64,
    pub target_mass: f64,
    pub err_estimate: f64,
}

impl DensityCurve {
    pub fn mass_within_estimate(&self) -> bool {
        (self.mass - self.target_mass).abs() <= self.err_estimate
    }
}

// Chebyshev abscissae of the first kind on (-1, 1), ascending.
fn chebyshev_points(count: usize) -> Vec<f64> {
    (0..count)
        .rev()
        .map(|k| (PI * (k as f64 + 0.5) / count as f64).cos())
        .collect()
}

pub fn equilibrium_curve(spec: &WeightSpec, info: &ScalingInfo, count: usize, tol: f64) -> Result<DensityCurve> {
    let points = chebyshev_points(count)
        .into_iter()
        .map(|s| {
            let x = info.expand(s);
            let rho = info.delta_n * ((1.0 - s) * (1.0 + s)).sqrt();
            sigma_core(spec, info, x, rho, tol).map(|v| (x, v))
        })
        .collect::<Result<Vec<_>>>()?;
    let target = info.n as f64;
    let m = equilibrium_mass(spec, info, tol * target)?;
    Ok(DensityCurve {
        kind: CurveKind::Equilibrium { n: info.n },
        points,
        mass: m.value,
        target_mass: target,
        err_estimate: m.error + tol * target + 1e-13 * target,
    })
}

pub fn normalized_curve(spec: &WeightSpec, info: &ScalingInfo, count: usize, tol: f64) -> Result<DensityCurve> {
    let points = chebyshev_points(count)
        .into_iter()
        .map(|s| normalized_density(spec, info, s, tol).map(|v| (s, v)))
        .collect::<Result<Vec<_>>>()?;
    let m = normalized_mass(spec, info, tol)?;
    Ok(DensityCurve {
        kind: CurveKind::Normalized { n: info.n },
        points,
        mass: m.value,
        target_mass: 1.0,
        err_estimate: m.error + tol + 1e-13,
    })
}

pub fn ullman_curve(alpha: f64, count: usize, tol: f64) -> Result<DensityCurve> {
    check_alpha(alpha)?;
    let points = chebyshev_points(count)
        .into_iter()
        .map(|x| ullman_density(alpha, x, tol).map(|v| (x, v)))
        .collect::<Result<Vec<_>>>()?;
    let m = if alpha.is_infinite() {
        // mu_inf(cos phi) sin phi = 1/pi
        Integral {
            value: 1.0,
            error: 0.0,
            panels: 0,
        }
    } else {
        let mut failure = None;
        let r = adaptive(
            |phi: f64| match ullman_density(alpha, phi.cos(), tol * 1e-2) {
                Ok(v) => v * phi.sin(),
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            },
            0.0,
            PI,
            &[FRAC_PI_2],
            Tolerance::new(tol / 2.0, 1e-14),
        );
        if let Some(e) = failure {
            return Err(e);
        }
        r?
    };
    Ok(DensityCurve {
        kind: CurveKind::Ullman { alpha },
        points,
        mass: m.value,
        target_mass: 1.0,
        err_estimate: m.error + tol + 1e-13,
    })
}

/// `max_s sigma_n*(s) sqrt(1 - s^2)` over the grid: the empirical constant of
/// the edge bound `sigma_n*(s) <= C / sqrt(1 - s^2)`.
pub fn edge_constant(spec: &WeightSpec, info: &ScalingInfo, grid: &[f64], tol: f64) -> Result<f64> {
    grid.iter().try_fold(0.0f64, |acc, &s| {
        let v = normalized_density(spec, info, s, tol)?;
        Ok(acc.max(v * ((1.0 - s) * (1.0 + s)).sqrt()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::make_freud;

    fn hermite() -> WeightSpec {
        make_freud(0.5, 2.0).unwrap()
    }

    #[test]
    fn mrs_gaussian_closed_forms() {
        // Q = x^2: (2/pi) int a t 2 a t / sqrt(1-t^2) = a^2, so a_8 = sqrt(8).
        let info = solve_mrs(&make_freud(1.0, 2.0).unwrap(), 8, CONSTANT_TOL).unwrap();
        assert!((info.a_n - 8f64.sqrt()).abs() < 1e-10 * 8f64.sqrt());
        for n in [1, 7, 50, 333] {
            let info = solve_mrs(&hermite(), n, CONSTANT_TOL).unwrap();
            let exact = (2.0 * n as f64).sqrt();
            assert!((info.a_n - exact).abs() < 1e-11 * exact, "n={n}");
            assert!(info.residual.abs() <= CONSTANT_TOL);
        }
    }

    #[test]
    fn mrs_rejects_odd_weights() {
        let w = WeightSpec::custom("skew", |x| x * x, |x| 2.0 * x, |_| 2.0, false, 2.0);
        assert!(matches!(solve_mrs(&w, 4, 1e-10), Err(Error::NonEvenWeight(_))));
    }

    #[test]
    fn mrs_bracket_straddles() {
        let w = make_freud(1.0, 4.0).unwrap();
        for n in [1, 3, 40, 900] {
            let (lo, hi) = mrs_bracket(&w, n, 1e-10).unwrap();
            assert!(mrs_objective(&w, lo, 1e-12).unwrap() <= n as f64);
            assert!(mrs_objective(&w, hi, 1e-12).unwrap() >= n as f64);
        }
        // Tiny target forces the halving branch.
        let w = make_freud(100.0, 2.0).unwrap();
        let info = solve_mrs(&w, 1, 1e-10).unwrap();
        assert!((info.a_n - 0.1).abs() < 1e-12);
    }

    #[test]
    fn contraction_round_trip() {
        let info = solve_mrs(&hermite(), 50, CONSTANT_TOL).unwrap();
        assert!((info.contract(5.0) - 0.5).abs() < 1e-12);
        for x in [-info.a_n, 0.0, info.a_n] {
            assert!((info.expand(info.contract(x)) - x).abs() < 1e-13);
        }
        assert_eq!(info.contract(info.a_n), 1.0);
        assert_eq!(info.contract(-info.a_n), -1.0);
    }

    #[test]
    fn quadratic_equilibrium_density_is_semicircle() {
        let w = hermite();
        let info = solve_mrs(&w, 30, CONSTANT_TOL).unwrap();
        let a = info.a_n;
        for x in [0.0, 0.3 * a, -0.77 * a, 0.999 * a] {
            let v = equilibrium_density(&w, &info, x, DENSITY_TOL).unwrap();
            let exact = (a * a - x * x).sqrt() / PI;
            assert!((v - exact).abs() < 1e-9, "x={x}: {v} vs {exact}");
        }
        assert!(equilibrium_density(&w, &info, a, DENSITY_TOL).is_err());
    }

    #[test]
    fn equilibrium_density_is_even() {
        let w = make_freud(1.0, 4.0).unwrap();
        let info = solve_mrs(&w, 20, CONSTANT_TOL).unwrap();
        for s in [0.1, 0.45, 0.9] {
            let x = s * info.a_n;
            let p = equilibrium_density(&w, &info, x, DENSITY_TOL).unwrap();
            let m = equilibrium_density(&w, &info, -x, DENSITY_TOL).unwrap();
            assert!((p - m).abs() < 1e-9);
        }
    }

    #[test]
    fn masses() {
        let w = make_freud(1.0, 2.0).unwrap();
        for n in [10, 50] {
            let info = solve_mrs(&w, n, CONSTANT_TOL).unwrap();
            let m = equilibrium_mass(&w, &info, 1e-8 * n as f64).unwrap();
            assert!((m.value - n as f64).abs() < 1e-8 * n as f64, "{m:?}");
        }
        let w = make_freud(1.0, 1.5).unwrap();
        let info = solve_mrs(&w, 12, CONSTANT_TOL).unwrap();
        let m = normalized_mass(&w, &info, 1e-8).unwrap();
        assert!((m.value - 1.0).abs() < 1e-8, "{m:?}");
    }

    #[test]
    fn normalized_quadratic_is_semicircle() {
        let w = hermite();
        for n in [3, 64] {
            let info = solve_mrs(&w, n, CONSTANT_TOL).unwrap();
            for s in [-0.95, -0.2, 0.0, 0.6] {
                let v = normalized_density(&w, &info, s, DENSITY_TOL).unwrap();
                let exact = 2.0 / PI * (1.0 - s * s).sqrt();
                assert!((v - exact).abs() < 1e-9);
            }
            assert!(normalized_density(&w, &info, 1.0, DENSITY_TOL).is_err());
        }
    }

    #[test]
    fn ullman_special_values() {
        assert!((ullman_density(f64::INFINITY, 0.0, 1e-12).unwrap() - 1.0 / PI).abs() < 1e-15);
        assert!((ullman_density(3.0, 0.0, 1e-12).unwrap() - 3.0 / (2.0 * PI)).abs() < 1e-11);
        assert!((ullman_density(1.5, 0.0, 1e-12).unwrap() - 1.5 / PI / 0.5).abs() < 1e-10);
        assert!(matches!(
            ullman_density(f64::INFINITY, 1.0, 1e-12),
            Err(Error::Singularity(_))
        ));
        assert_eq!(ullman_density(4.0, 1.0, 1e-12).unwrap(), 0.0);
        assert!(ullman_density(4.0, 1.2, 1e-12).is_err());
        assert!(ullman_density(1.0, 0.2, 1e-12).is_err());
    }

    #[test]
    fn ullman_alt_special_values() {
        let v = ullman_density_alt(2.0, 0.5, 1e-12).unwrap();
        assert!((v - 2.0 / PI * 0.75f64.sqrt()).abs() < 1e-10);
        let z = 4.0 / (3.0 * PI);
        assert!((ullman_density_alt(4.0, 0.0, 1e-12).unwrap() - z).abs() < 1e-10);
        assert!((ullman_density(4.0, 0.0, 1e-12).unwrap() - z).abs() < 1e-10);
        assert!(ullman_density_alt(4.0, 1.0, 1e-12).is_err());
    }

    #[test]
    fn ullman_cdf_values() {
        for alpha in [1.5, 2.0, 7.0, f64::INFINITY] {
            assert_eq!(ullman_cdf(alpha, 0.0, 1e-12).unwrap(), 0.5);
            assert_eq!(ullman_cdf(alpha, -1.0, 1e-12).unwrap(), 0.0);
            assert_eq!(ullman_cdf(alpha, 1.0, 1e-12).unwrap(), 1.0);
        }
        assert!((ullman_cdf(f64::INFINITY, 0.5, 1e-12).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        let semicircle = 0.5 + (0.5 * 0.75f64.sqrt() + 0.5f64.asin()) / PI;
        assert!((ullman_cdf(2.0, 0.5, 1e-12).unwrap() - semicircle).abs() < 1e-11);
        assert!((semicircle - 0.80450).abs() < 1e-5);
    }

    #[test]
    fn freud_constant_identities() {
        let c = freud_constants(2.0).unwrap();
        assert!((c.gamma - 1.0).abs() < 1e-14);
        assert!((c.b - 0.5).abs() < 1e-14);
        for alpha in [0.5, 1.5, 3.0, 8.0] {
            let q = freud_constants(alpha).unwrap();
            let g = freud_constants_gamma_formula(alpha);
            assert!((q.gamma - g.gamma).abs() < 1e-12 * g.gamma, "alpha={alpha}");
            assert!((q.b - g.b).abs() < 1e-12 * g.b);
        }
    }

    #[test]
    fn density_curves_carry_their_mass() {
        let w = make_freud(1.0, 4.0).unwrap();
        let info = solve_mrs(&w, 16, CONSTANT_TOL).unwrap();
        let eq = equilibrium_curve(&w, &info, 9, DENSITY_TOL).unwrap();
        assert!(eq.mass_within_estimate(), "{} vs {}", eq.mass, eq.target_mass);
        assert!(eq.points.iter().all(|p| p.1 >= 0.0));
        let nc = normalized_curve(&w, &info, 9, DENSITY_TOL).unwrap();
        assert!(nc.mass_within_estimate());
        for alpha in [1.5, 4.0, f64::INFINITY] {
            let uc = ullman_curve(alpha, 9, DENSITY_TOL).unwrap();
            assert!(uc.mass_within_estimate(), "alpha={alpha}: {}", uc.mass);
        }
    }
}
