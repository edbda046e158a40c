//! The ten acceptance checks, shared by the `verify` subcommand and the
//! `acceptance` test target. Tolerances are fixed constants below.

use std::collections::BTreeMap;
use std::f64::consts::{E, PI};
use std::fmt;

use crate::error::{Error, Result};
use crate::kac::{expected_zeros_full_line, expected_zeros_monomial_full_line, scaled_expected_zeros};
use crate::montecarlo::{mc_expected_zeros, weak_convergence, CoeffDist, CountConfig, WeakConvergence};
use crate::orthopoly::{build_recurrence, universality_ratios, RecurrenceTable};
use crate::scaling::{
    equilibrium_mass, freud_constants, freud_constants_gamma_formula, normalized_mass, solve_mrs,
    ullman_density, ullman_density_alt, CONSTANT_TOL,
};
use crate::weights::{make_freud, WeightSpec};

pub const GLOBAL_LIMIT_REL: f64 = 0.05;
pub const MC_SIGMAS: f64 = 3.0;
pub const LOCAL_LIMIT_REL: f64 = 0.05;
pub const WEAK_KS_MAX: f64 = 0.05;
pub const OUTSIDE_MAX: f64 = 0.02;
pub const MONOMIAL_SLOPE_REL: f64 = 0.05;
pub const GAMMA_B_TOL: f64 = 1e-12;
pub const SEMICIRCLE_TOL: f64 = 1e-10;
pub const ALT_FORMULA_TOL: f64 = 1e-8;
pub const MRS_REL_TOL: f64 = 1e-10;
pub const MASS_TOL: f64 = 1e-8;
pub const HERMITE_B_TOL: f64 = 1e-10;
pub const ORTHO_RESIDUAL_MAX: f64 = 1e-8;
pub const LEADING_LIMIT_REL: f64 = 0.02;
pub const R00_TOL: f64 = 0.05;
pub const R11_REL: f64 = 0.15;

/// Kac-integral tolerance used by the criteria.
const KAC_TOL: f64 = 1e-6;
const MC_SEED: u64 = 0;
const WEAK_TRIALS: usize = 50;

pub const CRITERIA: [(u8, &str); 10] = [
    (1, "global limit of E[N_n]/n"),
    (2, "Monte Carlo against Kac"),
    (3, "local limit on [-0.5, 0.5]"),
    (4, "weak convergence to mu_alpha"),
    (5, "scaled zeros outside [-1.05, 1.05]"),
    (6, "monomial log slope"),
    (7, "Freud and Ullman constants"),
    (8, "MRS closed form and masses"),
    (9, "recurrence oracles"),
    (10, "universality diagnostics"),
];

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "criterion {:>2} {verdict} [{}] {}", self.id, self.name, self.detail)
    }
}

/// Holds the tables and Monte Carlo runs that several criteria share.
#[derive(Default)]
pub struct Suite {
    tables: BTreeMap<String, (WeightSpec, RecurrenceTable)>,
    weak: BTreeMap<String, (WeakConvergence, WeakConvergence)>,
}

fn hermite() -> WeightSpec {
    make_freud(0.5, 2.0).expect("valid Freud parameters")
}

impl Suite {
    pub fn new() -> Self {
        Self::default()
    }

    fn table(&mut self, spec: &WeightSpec, n_max: usize) -> Result<&RecurrenceTable> {
        let key = format!("{}#{n_max}", spec.label());
        if !self.tables.contains_key(&key) {
            let t = build_recurrence(spec, n_max, 1.5)?;
            self.tables.insert(key.clone(), (spec.clone(), t));
        }
        Ok(&self.tables[&key].1)
    }

    fn weak(&mut self, c: f64, lambda: f64) -> Result<(WeakConvergence, WeakConvergence)> {
        let spec = make_freud(c, lambda)?;
        let key = spec.label().to_string();
        if !self.weak.contains_key(&key) {
            let table = self.table(&spec, 500)?.clone();
            let g = CoeffDist::Gaussian(1.0);
            let small = weak_convergence(&spec, &table, 100, WEAK_TRIALS, g, MC_SEED, 1e-8)?;
            let large = weak_convergence(&spec, &table, 500, WEAK_TRIALS, g, MC_SEED, 1e-8)?;
            self.weak.insert(key.clone(), (small, large));
        }
        Ok(self.weak[&key].clone())
    }

    /// Runs one criterion; numerical failures become a failed result.
    pub fn run(&mut self, id: u8) -> CriterionResult {
        let name = CRITERIA
            .iter()
            .find(|c| c.0 == id)
            .map(|c| c.1)
            .unwrap_or("unknown criterion");
        let outcome = match id {
            1 => self.global_limit(),
            2 => self.monte_carlo(),
            3 => self.local_limit(),
            4 => self.weak_convergence(),
            5 => self.outside_fraction(),
            6 => monomial_slope(),
            7 => constants(),
            8 => mrs_oracle(),
            9 => self.recurrence_oracle(),
            10 => self.universality(),
            _ => Err(Error::invalid(format!("no criterion {id}"))),
        };
        match outcome {
            Ok((passed, detail)) => CriterionResult {
                id,
                name,
                passed,
                detail,
            },
            Err(e) => CriterionResult {
                id,
                name,
                passed: false,
                detail: format!("error: {e}"),
            },
        }
    }

    fn global_limit(&mut self) -> Result<(bool, String)> {
        let spec = hermite();
        let table = self.table(&spec, 1000)?;
        let target = 1.0 / 3f64.sqrt();
        let dev = |n: usize| -> Result<f64> {
            let p = expected_zeros_full_line(&spec, table, n, KAC_TOL)?;
            Ok((p.expected_count / n as f64 - target).abs() / target)
        };
        let (d500, d1000) = (dev(500)?, dev(1000)?);
        Ok((
            d500 <= GLOBAL_LIMIT_REL && d1000 <= d500,
            format!("rel. deviation from 1/sqrt(3): n=500 {d500:.3e}, n=1000 {d1000:.3e}"),
        ))
    }

    fn monte_carlo(&mut self) -> Result<(bool, String)> {
        let spec = hermite();
        let table = self.table(&spec, 1000)?;
        let cfg = CountConfig {
            refine: false,
            ..CountConfig::default()
        };
        let mc = mc_expected_zeros(&spec, table, 200, 1000, CoeffDist::Gaussian(1.0), MC_SEED, &[], &cfg)?;
        let kac = expected_zeros_full_line(&spec, table, 200, KAC_TOL)?.expected_count;
        let z = (mc.mean - kac) / mc.stderr;
        Ok((
            z.abs() <= MC_SIGMAS,
            format!("n=200, 1000 trials: MC {:.4} +- {:.4}, Kac {kac:.4}, z = {z:.2}", mc.mean, mc.stderr),
        ))
    }

    fn local_limit(&mut self) -> Result<(bool, String)> {
        let spec = hermite();
        let table = self.table(&spec, 1000)?;
        let v = scaled_expected_zeros(&spec, table, 500, (-0.5, 0.5), 1e-8)?;
        // Semicircle mass of [-1/2, 1/2].
        let mass = 2.0 * (0.5f64.asin() + 0.5 * 0.75f64.sqrt()) / PI;
        let target = mass / 3f64.sqrt();
        let rel = (v - target).abs() / target;
        Ok((
            rel <= LOCAL_LIMIT_REL,
            format!("n=500: {v:.5} vs {target:.5}, rel. deviation {rel:.3e}"),
        ))
    }

    fn weak_convergence(&mut self) -> Result<(bool, String)> {
        let mut ok = true;
        let mut parts = Vec::new();
        for lambda in [2.0, 4.0] {
            let (small, large) = self.weak(1.0, lambda)?;
            ok &= large.mean_ks <= WEAK_KS_MAX && large.mean_ks < small.mean_ks;
            parts.push(format!(
                "Freud(1,{lambda}): KS n=100 {:.4}, n=500 {:.4}",
                small.mean_ks, large.mean_ks
            ));
        }
        Ok((ok, parts.join("; ")))
    }

    fn outside_fraction(&mut self) -> Result<(bool, String)> {
        let mut ok = true;
        let mut parts = Vec::new();
        for lambda in [2.0, 4.0] {
            let (_, large) = self.weak(1.0, lambda)?;
            ok &= large.mean_outside <= OUTSIDE_MAX;
            parts.push(format!("Freud(1,{lambda}) n=500: {:.5}", large.mean_outside));
        }
        Ok((ok, parts.join("; ")))
    }

    fn recurrence_oracle(&mut self) -> Result<(bool, String)> {
        let spec = hermite();
        let table = self.table(&spec, 1000)?;
        let b_err = (1..=60)
            .map(|k| (table.b(k) - (k as f64 / 2.0).sqrt()).abs())
            .fold(0.0f64, f64::max);
        let a200 = solve_mrs(&spec, 200, CONSTANT_TOL)?.a_n;
        let lead = (table.log_leading[200] / 200.0).exp() * a200;
        let limit = 2.0 * E.sqrt();
        let lead_rel = (lead - limit).abs() / limit;
        let quartic = make_freud(1.0, 4.0)?;
        let residual = self.table(&quartic, 200)?.ortho_residual;
        Ok((
            b_err <= HERMITE_B_TOL && residual <= ORTHO_RESIDUAL_MAX && lead_rel <= LEADING_LIMIT_REL,
            format!(
                "max |b_k - sqrt(k/2)| {b_err:.2e}; Freud(1,4) residual {residual:.2e}; gamma_200^(1/200) a_200 off 2 sqrt(e) by {lead_rel:.3e}"
            ),
        ))
    }

    fn universality(&mut self) -> Result<(bool, String)> {
        let spec = hermite();
        let table = self.table(&spec, 1000)?;
        let n = 200;
        let a_n = solve_mrs(&spec, n, CONSTANT_TOL)?.a_n;
        let next = solve_mrs(&spec, n + 1, CONSTANT_TOL)?;
        let target = PI * PI / 3.0;
        let mut ok = true;
        let mut parts = Vec::new();
        for x in [0.0, 0.4 * a_n, -0.4 * a_n] {
            let r = universality_ratios(&spec, table, &next, x, 0.1)?;
            ok &= (r.r00 - 1.0).abs() <= R00_TOL && (r.r11 - target).abs() <= R11_REL * target;
            parts.push(format!("x={x:.3}: r00 {:.4}, r11 {:.4}", r.r00, r.r11));
        }
        Ok((ok, parts.join("; ")))
    }
}

fn monomial_slope() -> Result<(bool, String)> {
    let ns = [100usize, 300, 1000, 3000];
    let mut pts = Vec::new();
    for n in ns {
        let e = expected_zeros_monomial_full_line(n, 1e-9)?.expected_count;
        pts.push(((n as f64).ln(), e));
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let slope = sxy / sxx;
    let target = 2.0 / PI;
    let rel = (slope - target).abs() / target;
    Ok((
        rel <= MONOMIAL_SLOPE_REL,
        format!("slope {slope:.5} vs 2/pi = {target:.5}, rel. deviation {rel:.3e}"),
    ))
}

fn constants() -> Result<(bool, String)> {
    let mut gb_err = 0.0f64;
    for alpha in [1.5, 2.0, 3.0, 4.0, 8.0] {
        let c = freud_constants(alpha)?;
        gb_err = gb_err.max((c.gamma * c.b - 1.0 / alpha).abs());
    }
    let mut semi_err = 0.0f64;
    for k in 0..=100 {
        let x = -1.0 + 2.0 * k as f64 / 100.0;
        let exact = 2.0 / PI * ((1.0 - x) * (1.0 + x)).max(0.0).sqrt();
        semi_err = semi_err.max((ullman_density(2.0, x, 1e-13)? - exact).abs());
    }
    let mut alt_err = 0.0f64;
    for alpha in [1.5, 2.0, 3.0, 4.0, 8.0] {
        for k in 1..100 {
            let x = -1.0 + 2.0 * k as f64 / 100.0;
            let a = ullman_density(alpha, x, 1e-12)?;
            let b = ullman_density_alt(alpha, x, 1e-12)?;
            alt_err = alt_err.max((a - b).abs());
        }
    }
    Ok((
        gb_err <= GAMMA_B_TOL && semi_err <= SEMICIRCLE_TOL && alt_err <= ALT_FORMULA_TOL,
        format!("max |gamma B - 1/alpha| {gb_err:.2e}; semicircle {semi_err:.2e}; alternative formula {alt_err:.2e}"),
    ))
}

fn mrs_oracle() -> Result<(bool, String)> {
    let mut a_err = 0.0f64;
    let mut mass_err = 0.0f64;
    let mut star_err = 0.0f64;
    for c in [1.0, 0.5] {
        for lambda in [2.0, 4.0] {
            let spec = make_freud(c, lambda)?;
            let g = freud_constants_gamma_formula(lambda).gamma;
            for n in [10usize, 100, 1000] {
                let info = solve_mrs(&spec, n, CONSTANT_TOL)?;
                let exact = (g * n as f64 / c).powf(1.0 / lambda);
                a_err = a_err.max((info.a_n - exact).abs() / exact);
                let m = equilibrium_mass(&spec, &info, 0.1 * MASS_TOL * n as f64)?;
                mass_err = mass_err.max((m.value - n as f64).abs() / n as f64);
                let s = normalized_mass(&spec, &info, 0.1 * MASS_TOL)?;
                star_err = star_err.max((s.value - 1.0).abs());
            }
        }
    }
    Ok((
        a_err <= MRS_REL_TOL && mass_err <= MASS_TOL && star_err <= MASS_TOL,
        format!("max rel. a_n error {a_err:.2e}; max rel. mass error {mass_err:.2e}; normalized mass error {star_err:.2e}"),
    ))
}

/// Runs the given criteria in order on one shared [`Suite`].
pub fn run_criteria(ids: &[u8]) -> Vec<CriterionResult> {
    let mut suite = Suite::new();
    ids.iter().map(|&id| suite.run(id)).collect()
}

pub fn run_all() -> Vec<CriterionResult> {
    let ids: Vec<u8> = CRITERIA.iter().map(|c| c.0).collect();
    run_criteria(&ids)
}
