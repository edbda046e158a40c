//! Expected number of real zeros of `sum c_j p_j` with i.i.d. standard
//! Gaussian `c_j`, by quadrature of the Kac density
//! `(1/pi) sqrt(A C - B^2) / A`, for the orthonormal and the monomial basis.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::orthopoly::{kernel_triple, KernelTriple, RecurrenceTable};
use crate::quad::{adaptive, Bisection, Tolerance};
use crate::scaling::{solve_mrs, CONSTANT_TOL};
use crate::weights::WeightSpec;

const GAUSS_ORDER: usize = 10;
const MAX_PANELS: usize = 200_000;

/// A Kac-density integral together with the sampled integrand.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroDensityProfile {
    pub n: usize,
    /// `(x, density)` at the quadrature nodes of the accepted panels, ascending.
    pub samples: Vec<(f64, f64)>,
    pub expected_count: f64,
    pub interval: (f64, f64),
    pub quadrature_error: f64,
    /// Part of `expected_count` coming from outside the finite core interval.
    pub tail_count: f64,
    /// Nodes where the discriminant `C/A - (B/A)^2` was negative before clamping.
    pub clamped_nodes: usize,
    /// Smallest `(AC - B^2) / (AC)` seen at a clamped node, 0 when none.
    pub worst_clamp: f64,
}

/// Kac density from a kernel triple; the shared exponent cancels in
/// `sqrt(C/A - (B/A)^2)`.
pub fn kac_density(triple: &KernelTriple) -> f64 {
    kac_density_detail(triple).0
}

// Density and the relative discriminant (AC - B^2) / (AC).
fn kac_density_detail(t: &KernelTriple) -> (f64, f64) {
    if !(t.a_val > 0.0) {
        return (0.0, 0.0);
    }
    let r = t.b_val / t.a_val;
    let q = t.c_val / t.a_val;
    let disc = q - r * r;
    let relative = if q > 0.0 { disc / q } else { 0.0 };
    (disc.max(0.0).sqrt() / PI, relative)
}

#[derive(Default)]
struct ClampStats {
    count: usize,
    worst: f64,
}

impl ClampStats {
    fn record(&mut self, relative: f64) {
        if relative < 0.0 {
            self.count += 1;
            self.worst = self.worst.min(relative);
        }
    }
}

// Breakpoints: the interval ends, a uniform split, and geometric refinement
// toward +-edge where the density drops off.
fn initial_breaks(lo: f64, hi: f64, edge: f64) -> Vec<f64> {
    let mut b: Vec<f64> = (0..=16).map(|k| lo + (hi - lo) * k as f64 / 16.0).collect();
    if edge > 0.0 {
        for k in 1..=8 {
            let d = edge * 0.5f64.powi(k + 1);
            b.extend([edge - d, edge + d, -edge - d, -edge + d]);
        }
        b.extend([edge, -edge]);
    }
    b.retain(|x| *x >= lo && *x <= hi);
    b.sort_by(f64::total_cmp);
    b.dedup();
    b
}

fn check_interval(lo: f64, hi: f64) -> Result<()> {
    if lo.is_finite() && hi.is_finite() && lo < hi {
        Ok(())
    } else {
        Err(Error::invalid(format!("need a finite interval with lo < hi, got ({lo}, {hi})")))
    }
}

/// `E[N_n(lo, hi)]` for the orthonormal basis, to absolute error `tol`.
pub fn expected_zeros(table: &RecurrenceTable, n: usize, interval: (f64, f64), tol: f64) -> Result<ZeroDensityProfile> {
    let (lo, hi) = interval;
    check_interval(lo, hi)?;
    if n > table.n_max {
        return Err(Error::Index {
            requested: n,
            n_max: table.n_max,
        });
    }
    // For Freud-type weights b_n ~ a_n / 2, which is all the pre-split needs.
    let edge = if n == 0 { 0.0 } else { 2.0 * table.b(n) };
    let mut failure = None;
    let mut clamp = ClampStats::default();
    let r = Bisection::new(GAUSS_ORDER, MAX_PANELS).with_min_width(1e-12 * (hi - lo)).integrate(
        |x| match kernel_triple(table, x, n) {
            Ok(t) => {
                let (d, rel) = kac_density_detail(&t);
                clamp.record(rel);
                d
            }
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        &initial_breaks(lo, hi, edge),
        tol,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let r = r?;
    Ok(ZeroDensityProfile {
        n,
        samples: r.samples,
        expected_count: r.value,
        interval,
        quadrature_error: r.error,
        tail_count: 0.0,
        clamped_nodes: clamp.count,
        worst_clamp: clamp.worst,
    })
}

/// `E[N_n(R)]`: quadrature over `[-R, R]` with `R = pad a_{n+1}`, plus both
/// tails through `x = R / u`.
///
/// Outside the support the density decays only like `x^{-2}`, so the tails
/// carry an O(1) share of the count and are integrated, not bounded.
pub fn expected_zeros_full_line(spec: &WeightSpec, table: &RecurrenceTable, n: usize, tol: f64) -> Result<ZeroDensityProfile> {
    let info = solve_mrs(spec, n + 1, CONSTANT_TOL)?;
    let radius = table.pad * info.a_n;
    let mut core = expected_zeros(table, n, (-radius, radius), 0.5 * tol)?;
    let mut failure = None;
    let mut clamp = ClampStats::default();
    let tail = adaptive(
        |u: f64| {
            let x = radius / u;
            match kernel_triple(table, x, n) {
                Ok(t) => {
                    let (d, rel) = kac_density_detail(&t);
                    clamp.record(rel);
                    d * radius / (u * u)
                }
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            }
        },
        0.0,
        1.0,
        &[],
        Tolerance::new(0.25 * tol, 1e-12),
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let tail = tail?;
    // Even weight: the left tail mirrors the right one.
    core.tail_count = 2.0 * tail.value;
    core.expected_count += core.tail_count;
    core.quadrature_error += 2.0 * tail.error;
    core.clamped_nodes += clamp.count;
    core.worst_clamp = core.worst_clamp.min(clamp.worst);
    core.interval = (f64::NEG_INFINITY, f64::INFINITY);
    if core.expected_count > n as f64 + tol {
        return Err(Error::BudgetExceeded {
            what: "full-line Kac integral",
            detail: format!("count {} exceeds the degree {n}", core.expected_count),
        });
    }
    Ok(core)
}

/// `(1/n) E[N_n(L_n^{-1}[a, b])]` for `-1 < a < b < 1`; `tol` applies to the scaled value.
pub fn scaled_expected_zeros(spec: &WeightSpec, table: &RecurrenceTable, n: usize, interval: (f64, f64), tol: f64) -> Result<f64> {
    let (a, b) = interval;
    if !(a > -1.0 && b < 1.0 && a < b) {
        return Err(Error::Domain {
            what: "interval endpoint",
            value: if a > -1.0 { b } else { a },
            domain: "-1 < a < b < 1",
        });
    }
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    let info = solve_mrs(spec, n, CONSTANT_TOL)?;
    let nf = n as f64;
    let p = expected_zeros(table, n, (info.expand(a), info.expand(b)), tol * nf)?;
    Ok(p.expected_count / nf)
}

/// Kac density of `sum_{j<=n} c_j x^j` with standard Gaussian `c_j`.
pub fn monomial_density(n: usize, x: f64) -> f64 {
    let ax = x.abs();
    if ax > 1.0 {
        let y = 1.0 / ax;
        return monomial_density_inner(n, y) * y * y;
    }
    monomial_density_inner(n, ax)
}

// |x| <= 1.
fn monomial_density_inner(n: usize, x: f64) -> f64 {
    let y = x * x;
    let nf = n as f64;
    // The closed form subtracts two terms of size 1/(y-1)^2 whose difference
    // is about n^2/12, so the sums take over while (n+1)|y-1| < 1.
    let d = (x - 1.0) * (x + 1.0);
    let v = if d.abs() < 1e-4 || (nf + 1.0) * d.abs() < 1.0 {
        // Direct sums A = sum y^j, B/x = sum j y^{j-1}, C = sum j^2 y^{j-1}.
        let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
        let mut pw = 1.0; // y^{j-1}
        a += 1.0;
        for j in 1..=n {
            let jf = j as f64;
            a += pw * y;
            b += jf * pw;
            c += jf * jf * pw;
            pw *= y;
        }
        let r = b / a;
        c / a - y * r * r
    } else {
        let ln_y = d.ln_1p();
        let yn = (nf * ln_y).exp();
        let e = ((nf + 1.0) * ln_y).exp_m1();
        1.0 / (d * d) - (nf + 1.0) * (nf + 1.0) * yn / (e * e)
    };
    v.max(0.0).sqrt() / PI
}

fn monomial_breaks(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    let levels = (n.max(2) as f64).log2().ceil() as i32 + 4;
    let mut b: Vec<f64> = (0..=8).map(|k| lo + (hi - lo) * k as f64 / 8.0).collect();
    for k in 1..=levels {
        let d = 0.5f64.powi(k);
        b.extend([1.0 - d, 1.0 + d, -1.0 + d, -1.0 - d]);
    }
    b.extend([1.0, -1.0]);
    b.retain(|x| *x >= lo && *x <= hi);
    b.sort_by(f64::total_cmp);
    b.dedup();
    b
}

/// `E[N_n(lo, hi)]` for the monomial basis.
pub fn expected_zeros_monomial(n: usize, interval: (f64, f64), tol: f64) -> Result<ZeroDensityProfile> {
    let (lo, hi) = interval;
    check_interval(lo, hi)?;
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    let r = Bisection::new(GAUSS_ORDER, MAX_PANELS)
        .with_min_width(1e-14)
        .integrate(|x| monomial_density(n, x), &monomial_breaks(n, lo, hi), tol)?;
    Ok(ZeroDensityProfile {
        n,
        samples: r.samples,
        expected_count: r.value,
        interval,
        quadrature_error: r.error,
        tail_count: 0.0,
        clamped_nodes: 0,
        worst_clamp: 0.0,
    })
}

/// `E[N_n(R)]` for the monomial basis. The density is even and
/// `rho(1/x) / x^2 = rho(x)`, so the line folds onto `4 int_0^1 rho`.
pub fn expected_zeros_monomial_full_line(n: usize, tol: f64) -> Result<ZeroDensityProfile> {
    let mut p = expected_zeros_monomial(n, (0.0, 1.0), 0.25 * tol)?;
    p.expected_count *= 4.0;
    p.quadrature_error *= 4.0;
    p.tail_count = 0.5 * p.expected_count;
    p.interval = (f64::NEG_INFINITY, f64::INFINITY);
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orthopoly::build_recurrence;
    use crate::weights::make_freud;

    fn hermite(n_max: usize) -> (WeightSpec, RecurrenceTable) {
        let w = make_freud(0.5, 2.0).unwrap();
        let t = build_recurrence(&w, n_max, 1.5).unwrap();
        (w, t)
    }

    #[test]
    fn constant_has_no_zeros() {
        let t = KernelTriple {
            a_val: 0.75,
            b_val: 0.0,
            c_val: 0.0,
            exponent: 0,
        };
        assert_eq!(kac_density(&t), 0.0);
    }

    #[test]
    fn density_ignores_the_shared_exponent() {
        let (_, t) = hermite(30);
        let k = kernel_triple(&t, 1.3, 30).unwrap();
        let shifted = KernelTriple {
            exponent: k.exponent + 900,
            ..k
        };
        assert_eq!(kac_density(&k), kac_density(&shifted));
    }

    #[test]
    fn symmetric_and_additive() {
        let (_, t) = hermite(40);
        let tol = 1e-9;
        let left = expected_zeros(&t, 40, (-6.0, 0.0), tol).unwrap();
        let right = expected_zeros(&t, 40, (0.0, 6.0), tol).unwrap();
        let whole = expected_zeros(&t, 40, (-6.0, 6.0), tol).unwrap();
        assert!((left.expected_count - right.expected_count).abs() <= 2.0 * tol);
        assert!((left.expected_count + right.expected_count - whole.expected_count).abs() <= 2.0 * tol);
        assert!(whole.samples.windows(2).all(|w| w[0].0 < w[1].0));
        assert!(whole.samples.iter().all(|s| s.1 >= 0.0));
    }

    #[test]
    fn linear_polynomial_has_one_zero() {
        let p = expected_zeros_monomial_full_line(1, 1e-10).unwrap();
        assert!((p.expected_count - 1.0).abs() < 1e-9, "{}", p.expected_count);
        let (w, t) = hermite(4);
        let p = expected_zeros_full_line(&w, &t, 1, 1e-9).unwrap();
        assert!((p.expected_count - 1.0).abs() < 1e-8, "{}", p.expected_count);
    }

    #[test]
    fn monomial_series_matches_closed_form() {
        for n in [3, 50, 400] {
            // Either side of the switch between sums and closed form.
            let d = 1.0 / (n as f64 + 1.0);
            let closed = monomial_density(n, (1.0 - 1.0001 * d).sqrt());
            let sums = monomial_density(n, (1.0 - 0.9999 * d).sqrt());
            assert!((closed - sums).abs() < 1e-3 * sums, "n={n}: {closed} {sums}");
        }
        let n = 10.0f64;
        let at_one = (n * (n + 2.0) / 12.0).sqrt() / PI;
        assert!((monomial_density(10, 1.0) - at_one).abs() < 1e-13);
    }

    #[test]
    fn monomial_inversion_symmetry() {
        for x in [0.3, 0.9, 0.999] {
            let a = monomial_density(25, x);
            let b = monomial_density(25, 1.0 / x) / (x * x);
            assert!((a - b).abs() < 1e-12 * a);
        }
    }

    #[test]
    fn scaled_domain_is_checked() {
        let (w, t) = hermite(10);
        assert!(matches!(
            scaled_expected_zeros(&w, &t, 10, (-1.0, 0.5), 1e-8),
            Err(Error::Domain { .. })
        ));
        assert!(scaled_expected_zeros(&w, &t, 10, (-0.5, 0.5), 1e-8).is_ok());
    }
}
