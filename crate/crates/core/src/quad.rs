//! Quadrature building blocks shared by every module.
//!
//! Two integrators live here:
//!
//! * [`adaptive`] is a globally adaptive Gauss–Kronrod (7/15) scheme. Panels are
//!   bisected in order of decreasing error estimate, and the final sum is taken
//!   left to right so the result does not depend on the refinement order.
//! * [`bisection`] is the panel-disagreement scheme used for zero densities: a
//!   fixed-order Gauss–Legendre rule on a panel is compared with the same rule
//!   on its two halves, and the panel is split until they agree.
//!
//! [`gauss_legendre`] computes nodes and weights on `[-1, 1]` by Newton
//! iteration on the Legendre three-term recurrence.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss 7-point weights, paired with XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

/// Stopping rule for [`adaptive`].
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_panels: usize,
}

impl Tolerance {
    pub fn abs(abs: f64) -> Self {
        Self {
            abs,
            rel: 0.0,
            max_panels: 4000,
        }
    }

    pub fn new(abs: f64, rel: f64) -> Self {
        Self {
            abs,
            rel,
            max_panels: 4000,
        }
    }

    pub fn with_max_panels(mut self, max_panels: usize) -> Self {
        self.max_panels = max_panels;
        self
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.lo.total_cmp(&self.lo))
    }
}

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, lo: f64, hi: f64) -> (f64, f64) {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    for (j, (&x, &wk)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        resk += wk * pair;
        if j % 2 == 1 {
            resg += WG[j / 2] * pair;
        }
    }
    (resk * half, ((resk - resg) * half).abs())
}

/// Integrates `f` over `[lo, hi]` split at the given interior breakpoints.
///
/// Breakpoints outside `(lo, hi)` are ignored. Nodes are always interior to a
/// panel, so `f` is never evaluated at a breakpoint or at an endpoint.
pub fn adaptive<F>(mut f: F, lo: f64, hi: f64, breaks: &[f64], tol: Tolerance) -> Result<Integral>
where
    F: FnMut(f64) -> f64,
{
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::invalid("integration limits must be finite"));
    }
    if lo == hi {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
            panels: 0,
        });
    }
    let (a, b, sign) = if lo < hi { (lo, hi, 1.0) } else { (hi, lo, -1.0) };
    let mut cuts: Vec<f64> = std::iter::once(a)
        .chain(breaks.iter().copied().filter(|&x| x > a && x < b))
        .chain(std::iter::once(b))
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    for w in cuts.windows(2) {
        let (value, error) = kronrod15(&mut f, w[0], w[1]);
        total += value;
        total_err += error;
        heap.push(Panel {
            lo: w[0],
            hi: w[1],
            value,
            error,
        });
    }

    loop {
        if !total.is_finite() {
            return Err(Error::NonFinite("integrand"));
        }
        let target = tol.abs.max(tol.rel * total.abs());
        if total_err <= target {
            break;
        }
        if heap.len() >= tol.max_panels {
            return Err(Error::BudgetExceeded {
                what: "adaptive quadrature",
                detail: format!(
                    "{} panels, error estimate {:.3e} > {:.3e}",
                    heap.len(),
                    total_err,
                    target
                ),
            });
        }
        let worst = heap.pop().expect("at least one panel");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // Panel cannot be split further in floating point.
            heap.push(Panel {
                error: 0.0,
                ..worst
            });
            total_err -= worst.error;
            continue;
        }
        let (v1, e1) = kronrod15(&mut f, worst.lo, mid);
        let (v2, e2) = kronrod15(&mut f, mid, worst.hi);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Panel {
            lo: worst.lo,
            hi: mid,
            value: v1,
            error: e1,
        });
        heap.push(Panel {
            lo: mid,
            hi: worst.hi,
            value: v2,
            error: e2,
        });
    }

    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| p.lo.total_cmp(&q.lo));
    let value: f64 = panels.iter().map(|p| p.value).sum();
    let error: f64 = panels.iter().map(|p| p.error).sum();
    Ok(Integral {
        value: sign * value,
        error,
        panels: panels.len(),
    })
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1, "Gauss-Legendre order must be positive");
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Output of [`bisection`].
#[derive(Debug, Clone, Default)]
pub struct BisectionResult {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
    /// `(x, f(x))` at the nodes of the accepted half panels, ascending in `x`.
    pub samples: Vec<(f64, f64)>,
}

/// Panel-disagreement integrator.
///
/// Each panel carries a share of `tol` proportional to its width. A panel is
/// accepted when the Gauss rule on the whole panel agrees with the sum over
/// its halves to within that share; otherwise both halves are refined.
pub struct Bisection {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    max_panels: usize,
    min_width: f64,
}

impl Bisection {
    pub fn new(order: usize, max_panels: usize) -> Self {
        let (nodes, weights) = gauss_legendre(order);
        Self {
            nodes,
            weights,
            max_panels,
            min_width: 0.0,
        }
    }

    /// Panels narrower than this are accepted regardless of disagreement.
    pub fn with_min_width(mut self, min_width: f64) -> Self {
        self.min_width = min_width;
        self
    }

    fn rule<F: FnMut(f64) -> f64>(
        &self,
        f: &mut F,
        lo: f64,
        hi: f64,
        out: &mut Vec<(f64, f64)>,
    ) -> f64 {
        let c = 0.5 * (lo + hi);
        let h = 0.5 * (hi - lo);
        out.clear();
        let mut sum = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            let t = c + h * x;
            let v = f(t);
            out.push((t, v));
            sum += w * v;
        }
        sum * h
    }

    pub fn integrate<F>(&self, mut f: F, breaks: &[f64], tol: f64) -> Result<BisectionResult>
    where
        F: FnMut(f64) -> f64,
    {
        if breaks.len() < 2 {
            return Err(Error::invalid("bisection needs at least two breakpoints"));
        }
        let span = breaks[breaks.len() - 1] - breaks[0];
        if !(span > 0.0) {
            return Err(Error::invalid("breakpoints must be increasing"));
        }
        let mut result = BisectionResult::default();
        let mut buf = Vec::new();
        for w in breaks.windows(2) {
            if w[1] <= w[0] {
                continue;
            }
            let whole = self.rule(&mut f, w[0], w[1], &mut buf);
            self.refine(&mut f, w[0], w[1], whole, tol / span, &mut result, 0)?;
        }
        if !result.value.is_finite() {
            return Err(Error::NonFinite("integrand"));
        }
        Ok(result)
    }

    #[allow(clippy::too_many_arguments)]
    fn refine<F: FnMut(f64) -> f64>(
        &self,
        f: &mut F,
        lo: f64,
        hi: f64,
        whole: f64,
        density: f64,
        acc: &mut BisectionResult,
        depth: usize,
    ) -> Result<()> {
        let mid = 0.5 * (lo + hi);
        let mut left_samples = Vec::with_capacity(self.nodes.len());
        let mut right_samples = Vec::with_capacity(self.nodes.len());
        let left = self.rule(f, lo, mid, &mut left_samples);
        let right = self.rule(f, mid, hi, &mut right_samples);
        let disagreement = (whole - (left + right)).abs();
        let allowed = density * (hi - lo);
        if disagreement <= allowed || hi - lo <= self.min_width || depth >= 60 {
            acc.value += left + right;
            acc.error += disagreement;
            acc.panels += 2;
            acc.samples.extend(left_samples);
            acc.samples.extend(right_samples);
            return Ok(());
        }
        if acc.panels >= self.max_panels {
            return Err(Error::BudgetExceeded {
                what: "bisection quadrature",
                detail: format!("more than {} panels", self.max_panels),
            });
        }
        self.refine(f, lo, mid, left, density, acc, depth + 1)?;
        self.refine(f, mid, hi, right, density, acc, depth + 1)
    }
}
