//! Command-line front end. `run` returns the process exit code:
//! 0 on success, 1 on a numerical budget failure or a failed `verify`,
//! 2 on invalid input.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::str::FromStr;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::kac::{expected_zeros, expected_zeros_full_line, expected_zeros_monomial, expected_zeros_monomial_full_line};
use crate::montecarlo::{mc_expected_zeros, weak_convergence, CoeffDist, CountConfig};
use crate::orthopoly::{build_recurrence_with, load_or_build, BuildOptions, RecurrenceTable};
use crate::scaling::{
    equilibrium_density, equilibrium_mass, normalized_density, normalized_mass, solve_mrs, ullman_density,
    ScalingInfo, CONSTANT_TOL,
};
use crate::verify::{run_criteria, CRITERIA};
use crate::weights::WeightSpec;

#[derive(Debug, Parser)]
#[command(name = "orthozeros", version, about = "Real zeros of random orthogonal polynomials")]
#[command(args_override_self = true, allow_negative_numbers = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mhaskar-Rakhmanov-Saff numbers a_n.
    Mrs(MrsArgs),
    /// Equilibrium density, its normalized form and the Ullman density.
    Density(DensityArgs),
    /// Three-term recurrence coefficients.
    Recurrence(RecurrenceArgs),
    /// Expected number of real zeros from the Kac-Rice formula.
    Kac(KacArgs),
    /// Monte Carlo real-zero counts and zero statistics.
    Simulate(SimulateArgs),
    /// Run the acceptance checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct WeightArg {
    /// `freud:<c>:<lambda>` or `hermite`.
    #[arg(long, default_value = "hermite", value_parser = parse_weight)]
    pub weight: WeightSpec,
}

#[derive(Debug, Args)]
#[command(args_override_self = true, allow_negative_numbers = true)]
pub struct MrsArgs {
    #[command(flatten)]
    pub weight: WeightArg,
    /// Degrees, comma separated.
    #[arg(long, value_delimiter = ',', required = true, action = ArgAction::Set)]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = CONSTANT_TOL)]
    pub tol: f64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(args_override_self = true, allow_negative_numbers = true)]
pub struct DensityArgs {
    #[command(flatten)]
    pub weight: WeightArg,
    #[arg(long)]
    pub n: usize,
    /// Number of Chebyshev points in (-1, 1).
    #[arg(long, default_value_t = 101)]
    pub points: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// Mesh radius in units of a_{2 n_max}.
    #[arg(long, default_value_t = 1.5)]
    pub pad: f64,
    /// Binary table cache; built and written when missing.
    #[arg(long)]
    pub cache: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(args_override_self = true, allow_negative_numbers = true)]
pub struct RecurrenceArgs {
    #[command(flatten)]
    pub weight: WeightArg,
    #[arg(long)]
    pub n_max: usize,
    #[command(flatten)]
    pub table: TableArgs,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Basis {
    Orthonormal,
    Monomial,
}

#[derive(Debug, Args)]
#[command(args_override_self = true, allow_negative_numbers = true)]
pub struct KacArgs {
    #[command(flatten)]
    pub weight: WeightArg,
    #[arg(long)]
    pub n: usize,
    #[arg(long, required_unless_present = "full_line")]
    pub lo: Option<f64>,
    #[arg(long, required_unless_present = "full_line")]
    pub hi: Option<f64>,
    #[arg(long, conflicts_with_all = ["lo", "hi"])]
    pub full_line: bool,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Basis::Orthonormal)]
    pub basis: Basis,
    /// Read `lo`/`hi` in units of a_n.
    #[arg(long)]
    pub scaled: bool,
    #[command(flatten)]
    pub table: TableArgs,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(args_override_self = true, allow_negative_numbers = true)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub weight: WeightArg,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// `gaussian[:sigma]`, `rademacher` or `uniform`.
    #[arg(long, default_value = "gaussian:1", value_parser = parse_dist)]
    pub dist: CoeffDist,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Scaled bin edges in [-1, 1], comma separated.
    #[arg(long, value_delimiter = ',', action = ArgAction::Set, allow_hyphen_values = true)]
    pub partition: Vec<f64>,
    /// Imaginary-part threshold, relative to a_n, for a zero to count as complex.
    #[arg(long, default_value_t = 1e-8)]
    pub imag_tol: f64,
    /// Trials that also compute all zeros (KS and complex fraction); 0 skips them.
    #[arg(long, default_value_t = 10)]
    pub eigen_trials: usize,
    #[command(flatten)]
    pub table: TableArgs,
    /// Per-trial CSV destination.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(args_override_self = true, allow_negative_numbers = true)]
pub struct VerifyArgs {
    /// Criteria to run, comma separated; all when absent.
    #[arg(long, value_delimiter = ',', action = ArgAction::Set)]
    pub only: Vec<u8>,
}

fn parse_weight(s: &str) -> std::result::Result<WeightSpec, String> {
    WeightSpec::from_str(s).map_err(|e| e.to_string())
}

fn parse_dist(s: &str) -> std::result::Result<CoeffDist, String> {
    CoeffDist::from_str(s).map_err(|e| e.to_string())
}

/// A `key = value` experiment file. Keys are long flag names; the optional
/// `command` key names the subcommand.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub command: Option<String>,
    pub params: BTreeMap<String, String>,
}

fn valid_key(k: &str) -> bool {
    !k.is_empty()
        && k.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '-')
        && !k.starts_with('-')
}

impl ExperimentConfig {
    /// Parses `key = value` lines; `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |reason: &str| Error::Parse {
                input: raw.to_string(),
                reason: format!("line {}: {reason}", i + 1),
            };
            let (k, v) = line.split_once('=').ok_or_else(|| bad("expected key = value"))?;
            let (k, v) = (k.trim().replace('_', "-"), v.trim().to_string());
            if !valid_key(&k) {
                return Err(bad("bad key"));
            }
            if v.is_empty() {
                return Err(bad("empty value"));
            }
            if k == "command" {
                cfg.command = Some(v);
            } else if cfg.params.insert(k, v).is_some() {
                return Err(bad("duplicate key"));
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Tolerances must be positive numbers.
    pub fn validate(&self) -> Result<()> {
        for (k, v) in &self.params {
            if k == "tol" || k.ends_with("-tol") {
                match v.parse::<f64>() {
                    Ok(t) if t > 0.0 && t.is_finite() => {}
                    _ => {
                        return Err(Error::Parse {
                            input: format!("{k} = {v}"),
                            reason: "tolerances must be positive".into(),
                        })
                    }
                }
            }
        }
        Ok(())
    }

    /// Sorted `key = value` text; `parse` inverts it exactly.
    pub fn to_canonical(&self) -> String {
        let mut s = String::new();
        if let Some(c) = &self.command {
            s.push_str(&format!("command = {c}\n"));
        }
        for (k, v) in &self.params {
            s.push_str(&format!("{k} = {v}\n"));
        }
        s
    }

    /// Flags for the parser. `true`/`false` values toggle switches.
    pub fn to_args(&self) -> Vec<String> {
        self.params
            .iter()
            .filter(|(_, v)| v.as_str() != "false")
            .map(|(k, v)| {
                if v == "true" {
                    format!("--{k}")
                } else {
                    format!("--{k}={v}")
                }
            })
            .collect()
    }
}

/// Expands `--config FILE` so that explicit flags override file values.
fn expand_config(args: Vec<String>) -> Result<Vec<String>> {
    let mut rest = Vec::with_capacity(args.len());
    let mut config = None;
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            let path = it.next().ok_or_else(|| Error::invalid("--config needs a file"))?;
            config = Some(path);
        } else if let Some(path) = a.strip_prefix("--config=") {
            config = Some(path.to_string());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = config else {
        return Ok(rest);
    };
    let cfg = ExperimentConfig::parse(&std::fs::read_to_string(&path)?)?;
    let sub = rest.iter().skip(1).position(|a| !a.starts_with('-')).map(|p| p + 1);
    let at = match sub {
        Some(p) => p + 1,
        None => {
            let c = cfg.command.clone().ok_or_else(|| Error::invalid("no subcommand given"))?;
            rest.push(c);
            rest.len()
        }
    };
    rest.splice(at..at, cfg.to_args());
    Ok(rest)
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn sink<'a>(path: &Option<PathBuf>, out: &'a mut dyn Write) -> Result<Box<dyn Write + 'a>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(out),
    })
}

fn table_for(spec: &WeightSpec, n_max: usize, t: &TableArgs) -> Result<RecurrenceTable> {
    let opts = BuildOptions {
        pad: t.pad,
        ..BuildOptions::default()
    };
    match &t.cache {
        Some(p) => load_or_build(spec, n_max, &opts, p),
        None => build_recurrence_with(spec, n_max, &opts),
    }
}

fn cmd_mrs(a: &MrsArgs, out: &mut dyn Write) -> Result<()> {
    let mut w = sink(&a.output, out)?;
    writeln!(w, "n,a_n,delta_n,beta_n,residual")?;
    for &n in &a.n {
        let i = solve_mrs(&a.weight.weight, n, a.tol)?;
        writeln!(w, "{n},{},{},{},{}", num(i.a_n), num(i.delta_n), num(i.beta_n), num(i.residual))?;
    }
    Ok(w.flush()?)
}

fn cmd_density(a: &DensityArgs, out: &mut dyn Write) -> Result<()> {
    if a.points == 0 {
        return Err(Error::invalid("points must be positive"));
    }
    let spec = &a.weight.weight;
    let info = solve_mrs(spec, a.n, CONSTANT_TOL)?;
    let alpha = spec.alpha();
    let mut w = sink(&a.output, out)?;
    writeln!(w, "s,x,sigma_n,sigma_star,ullman")?;
    for k in (0..a.points).rev() {
        let s = (std::f64::consts::PI * (k as f64 + 0.5) / a.points as f64).cos();
        let x = info.expand(s);
        let sigma = equilibrium_density(spec, &info, x, a.tol)?;
        let star = normalized_density(spec, &info, s, a.tol)?;
        let ull = if alpha > 1.0 {
            num(ullman_density(alpha, s, a.tol)?)
        } else {
            String::new()
        };
        writeln!(w, "{},{},{},{},{ull}", num(s), num(x), num(sigma), num(star))?;
    }
    let m = equilibrium_mass(spec, &info, a.tol * a.n as f64)?;
    let ms = normalized_mass(spec, &info, a.tol)?;
    writeln!(w, "\nmass,target,error,normalized_mass,normalized_error")?;
    writeln!(w, "{},{},{},{},{}", num(m.value), a.n, num(m.error), num(ms.value), num(ms.error))?;
    Ok(w.flush()?)
}

fn cmd_recurrence(a: &RecurrenceArgs, out: &mut dyn Write) -> Result<()> {
    let t = table_for(&a.weight.weight, a.n_max, &a.table)?;
    let mut w = sink(&a.output, out)?;
    writeln!(w, "k,a_k,b_k,gamma_k,log_gamma_k")?;
    for k in 0..=t.n_max {
        let ak = if k < t.diag.len() { num(t.diag[k]) } else { String::new() };
        let bk = if k >= 1 { num(t.b(k)) } else { String::new() };
        let lg = t.log_leading[k];
        writeln!(w, "{k},{ak},{bk},{},{}", num(lg.exp()), num(lg))?;
    }
    writeln!(w, "\northo_residual,nodes")?;
    writeln!(w, "{},{}", num(t.ortho_residual), t.mesh.len())?;
    Ok(w.flush()?)
}

fn cmd_kac(a: &KacArgs, out: &mut dyn Write) -> Result<()> {
    let spec = &a.weight.weight;
    let info: Option<ScalingInfo> = if a.scaled {
        if a.basis == Basis::Monomial {
            return Err(Error::invalid("--scaled applies to the orthonormal basis only"));
        }
        Some(solve_mrs(spec, a.n, CONSTANT_TOL)?)
    } else {
        None
    };
    let interval = match (a.lo, a.hi) {
        (Some(lo), Some(hi)) => {
            let (lo, hi) = match &info {
                Some(i) => (i.expand(lo), i.expand(hi)),
                None => (lo, hi),
            };
            Some((lo, hi))
        }
        _ => None,
    };
    let p = match (a.basis, interval) {
        (Basis::Monomial, Some(iv)) => expected_zeros_monomial(a.n, iv, a.tol)?,
        (Basis::Monomial, None) => expected_zeros_monomial_full_line(a.n, a.tol)?,
        (Basis::Orthonormal, iv) => {
            let table = table_for(spec, a.n, &a.table)?;
            match iv {
                Some(iv) => expected_zeros(&table, a.n, iv, a.tol)?,
                None => expected_zeros_full_line(spec, &table, a.n, a.tol)?,
            }
        }
    };
    let mut w = sink(&a.output, out)?;
    writeln!(w, "x,density")?;
    for &(x, d) in &p.samples {
        writeln!(w, "{},{}", num(x), num(d))?;
    }
    writeln!(w, "\nexpected_count,error,per_n,tail_count,clamped_nodes")?;
    writeln!(
        w,
        "{},{},{},{},{}",
        num(p.expected_count),
        num(p.quadrature_error),
        num(p.expected_count / a.n as f64),
        num(p.tail_count),
        p.clamped_nodes
    )?;
    Ok(w.flush()?)
}

fn cmd_simulate(a: &SimulateArgs, out: &mut dyn Write) -> Result<()> {
    if !(a.imag_tol > 0.0) {
        return Err(Error::invalid("imag-tol must be positive"));
    }
    let spec = &a.weight.weight;
    let table = table_for(spec, a.n, &a.table)?;
    let cfg = CountConfig {
        pad: a.table.pad,
        ..CountConfig::default()
    };
    let mc = mc_expected_zeros(spec, &table, a.n, a.trials, a.dist, a.seed, &a.partition, &cfg)?;
    if a.output.is_some() {
        let mut w = sink(&a.output, out)?;
        let bins = (1..a.partition.len()).map(|b| format!(",bin_{b}")).collect::<String>();
        writeln!(w, "trial,count{bins}")?;
        for r in &mc.trials {
            let bins: String = r.bins.iter().map(|b| format!(",{b}")).collect();
            writeln!(w, "{},{}{bins}", r.trial, r.count)?;
        }
        w.flush()?;
    }
    let kac = expected_zeros_full_line(spec, &table, a.n, 1e-6)?.expected_count;
    let mut summary = json!({
        "weight": spec.label(),
        "n": a.n,
        "trials": a.trials,
        "dist": a.dist.to_string(),
        "seed": a.seed,
        "mean": mc.mean,
        "stderr": mc.stderr,
        "kac_expected": kac,
        "bin_means": mc.bin_means,
        "eigen_trials": a.eigen_trials.min(a.trials),
    });
    let eig = a.eigen_trials.min(a.trials);
    let (ks, outside, complex, off) = if eig > 0 {
        let wc = weak_convergence(spec, &table, a.n, eig, a.dist, a.seed, a.imag_tol)?;
        (
            json!(wc.mean_ks),
            json!(wc.mean_outside),
            json!(wc.complex_fraction),
            json!(wc.off_axis_fraction),
        )
    } else {
        (Value::Null, Value::Null, Value::Null, Value::Null)
    };
    let m = summary.as_object_mut().expect("object");
    m.insert("ks".into(), ks);
    m.insert("outside_fraction".into(), outside);
    m.insert("complex_fraction".into(), complex);
    m.insert("off_axis_fraction".into(), off);
    writeln!(out, "{}", serde_json::to_string_pretty(&summary).map_err(|e| Error::invalid(e.to_string()))?)?;
    Ok(())
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<bool> {
    let ids: Vec<u8> = if a.only.is_empty() {
        CRITERIA.iter().map(|c| c.0).collect()
    } else {
        a.only.clone()
    };
    if let Some(bad) = ids.iter().find(|id| !CRITERIA.iter().any(|c| c.0 == **id)) {
        return Err(Error::invalid(format!("no criterion {bad}")));
    }
    let results = run_criteria(&ids);
    for r in &results {
        writeln!(out, "{r}")?;
    }
    Ok(results.iter().all(|r| r.passed))
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<bool> {
    match &cli.command {
        Command::Mrs(a) => cmd_mrs(a, out).map(|_| true),
        Command::Density(a) => cmd_density(a, out).map(|_| true),
        Command::Recurrence(a) => cmd_recurrence(a, out).map(|_| true),
        Command::Kac(a) => cmd_kac(a, out).map(|_| true),
        Command::Simulate(a) => cmd_simulate(a, out).map(|_| true),
        Command::Verify(a) => cmd_verify(a, out),
    }
}

/// Runs the command line `args` (program name first) against the given streams.
pub fn run_with<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args = match expand_config(args.into_iter().map(Into::into).collect()) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind::*;
            return match e.kind() {
                DisplayHelp | DisplayVersion | DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = write!(out, "{}", e.render());
                    if e.kind() == DisplayHelpOnMissingArgumentOrSubcommand { 2 } else { 0 }
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    2
                }
            };
        }
    };
    match dispatch(&cli, out) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_budget_failure() {
                1
            } else {
                2
            }
        }
    }
}

pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}
