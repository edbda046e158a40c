//! Orthonormal polynomials for `W^2 dx`: recurrence coefficients from a
//! discretized Stieltjes procedure, evaluation with a shared power-of-two
//! scale, and the diagonal kernels `K_{n+1}`, `K^{(0,1)}_{n+1}`, `K^{(1,1)}_{n+1}`.
//!
//! Only even weights are supported, so the measure is folded onto `[0, R]`
//! with doubled quadrature weights and every diagonal coefficient is zero.
//! Along the Stieltjes sweep each node keeps its own binary exponent: the
//! discretized `p_k(x) W(x)` spans far more than the double range across
//! `k` at nodes beyond `a_k`.

use std::f64::consts::LN_2;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::quad::gauss_legendre;
use crate::scaling::{equilibrium_density, solve_mrs, ScalingInfo, CONSTANT_TOL, DENSITY_TOL};
use crate::weights::WeightSpec;

/// Running magnitudes above `2^RESCALE_BITS` trigger a rescale.
pub const RESCALE_BITS: i64 = 256;
const RESCALE_UP: f64 = 1.157_920_892_373_162e77; // 2^256
const RESCALE_DOWN: f64 = 8.636_168_555_094_445e-78; // 2^-256

/// Evaluation points beyond this magnitude are rejected.
pub const MAX_ABS_X: f64 = 1e150;

/// `x * 2^e` without intermediate overflow or underflow of the scale factor.
pub fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= f64::from_bits(((1000 + 1023) as u64) << 52);
        e -= 1000;
    }
    while e < -1000 {
        x *= f64::from_bits(((-1000 + 1023) as u64) << 52);
        e += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * f64::from_bits(((e + 1023) as u64) << 52)
}

// m * 2^(e + f) for a float exponent offset f.
fn scaled(m: f64, e: i64, f: f64) -> f64 {
    let total = e as f64 + f;
    let k = total.floor();
    ldexp(m * (total - k).exp2(), k as i64)
}

/// Parameters that identify a quadrature mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MeshSignature {
    pub order: u32,
    pub panels: u32,
    pub origin_levels: u32,
    pub edge_levels: u32,
    /// Bit pattern of the radius.
    pub radius_bits: u64,
}

impl MeshSignature {
    pub fn radius(&self) -> f64 {
        f64::from_bits(self.radius_bits)
    }
}

/// Composite Gauss–Legendre rule on `[0, R]` with doubled weights, so that
/// `sum w_i f(x_i)` approximates `int_{-R}^{R} f` for even `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub signature: MeshSignature,
}

impl Mesh {
    /// `panels` uniform panels, the first split geometrically toward 0 over
    /// `origin_levels` levels and the last toward `R` over `edge_levels`.
    pub fn half_line(radius: f64, panels: usize, order: usize, origin_levels: usize, edge_levels: usize) -> Mesh {
        assert!(panels >= 2 && order >= 2);
        let h = radius / panels as f64;
        let mut breaks = vec![0.0];
        for l in (1..=origin_levels).rev() {
            breaks.push(h * 0.5f64.powi(l as i32));
        }
        for k in 1..panels {
            breaks.push(h * k as f64);
        }
        for l in 1..=edge_levels {
            breaks.push(radius - h * 0.5f64.powi(l as i32));
        }
        breaks.push(radius);
        let (gx, gw) = gauss_legendre(order);
        let mut nodes = Vec::with_capacity(breaks.len() * order);
        let mut weights = Vec::with_capacity(breaks.len() * order);
        for w in breaks.windows(2) {
            let c = 0.5 * (w[0] + w[1]);
            let r = 0.5 * (w[1] - w[0]);
            for (x, wt) in gx.iter().zip(&gw) {
                nodes.push(c + r * x);
                weights.push(2.0 * r * wt);
            }
        }
        Mesh {
            nodes,
            weights,
            signature: MeshSignature {
                order: order as u32,
                panels: panels as u32,
                origin_levels: origin_levels as u32,
                edge_levels: edge_levels as u32,
                radius_bits: radius.to_bits(),
            },
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    // log2 of sqrt(w_i) W(x_i).
    fn log2_root_measure(&self, spec: &WeightSpec) -> Vec<f64> {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| 0.5 * w.log2() - spec.q(x) / LN_2)
            .collect()
    }
}

/// Three-term recurrence `b_{k+1} p_{k+1} = (x - a_k) p_k - b_k p_{k-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceTable {
    pub label: String,
    pub n_max: usize,
    /// `a_0 .. a_{n_max-1}`.
    pub diag: Vec<f64>,
    /// `b_1 .. b_{n_max}`.
    pub off_diag: Vec<f64>,
    /// `ln gamma_0 .. ln gamma_{n_max}`; the leading coefficients themselves
    /// leave the double range for moderate `n`.
    pub log_leading: Vec<f64>,
    pub pad: f64,
    pub mesh: Mesh,
    pub ortho_residual: f64,
}

impl RecurrenceTable {
    /// `b_k` for `1 <= k <= n_max`.
    pub fn b(&self, k: usize) -> f64 {
        self.off_diag[k - 1]
    }

    pub fn gamma0(&self) -> f64 {
        self.log_leading[0].exp()
    }

    /// `gamma_k`, possibly under- or overflowing; see [`Self::log_leading`].
    pub fn leading(&self, k: usize) -> f64 {
        self.log_leading[k].exp()
    }

    fn check_degree(&self, n: usize) -> Result<()> {
        if n > self.n_max {
            Err(Error::Index {
                requested: n,
                n_max: self.n_max,
            })
        } else {
            Ok(())
        }
    }
}

/// Knobs of [`build_recurrence_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildOptions {
    pub pad: f64,
    pub order: usize,
    pub origin_levels: usize,
    pub edge_levels: usize,
    /// Starting panel count; `None` picks `n_max / 2 + 16`.
    pub initial_panels: Option<usize>,
    pub max_nodes: usize,
    /// Relative change of every `b_k` under panel doubling that counts as stable.
    pub stable_rel: f64,
    pub residual_tol: f64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            pad: 1.5,
            order: 20,
            origin_levels: 40,
            edge_levels: 6,
            initial_panels: None,
            max_nodes: 200_000,
            stable_rel: 1e-11,
            residual_tol: 1e-8,
        }
    }
}

struct Sweep {
    off_diag: Vec<f64>,
    log_gamma0: f64,
}

// Lanczos form of the Stieltjes procedure on the folded mesh.
fn stieltjes(spec: &WeightSpec, mesh: &Mesh, n_max: usize) -> Result<Sweep> {
    let logs = mesh.log2_root_measure(spec);
    let mut exps: Vec<i64> = logs.iter().map(|l| l.floor() as i64).collect();
    let mut cur: Vec<f64> = logs.iter().zip(&exps).map(|(l, &e)| (l - e as f64).exp2()).collect();
    let mut prev = vec![0.0; mesh.len()];
    let norm2 = |v: &[f64], exps: &[i64]| -> f64 {
        v.iter().zip(exps).map(|(&u, &e)| ldexp(u * u, 2 * e)).sum()
    };
    let mu0 = norm2(&cur, &exps);
    if !(mu0 > 0.0 && mu0.is_finite()) {
        return Err(Error::NonFinite("zeroth moment"));
    }
    let root = mu0.sqrt();
    cur.iter_mut().for_each(|u| *u /= root);
    let mut off_diag = Vec::with_capacity(n_max);
    let mut b_k = 0.0;
    let mut next = vec![0.0; mesh.len()];
    for _ in 0..n_max {
        for i in 0..mesh.len() {
            next[i] = mesh.nodes[i] * cur[i] - b_k * prev[i];
        }
        let b_next = norm2(&next, &exps).sqrt();
        if !(b_next > 0.0 && b_next.is_finite()) {
            return Err(Error::NonFinite("Stieltjes recurrence"));
        }
        for i in 0..mesh.len() {
            let u = next[i] / b_next;
            prev[i] = cur[i];
            cur[i] = u;
            if u.abs() > RESCALE_UP {
                cur[i] *= RESCALE_DOWN;
                prev[i] *= RESCALE_DOWN;
                exps[i] += RESCALE_BITS;
            }
        }
        off_diag.push(b_next);
        b_k = b_next;
    }
    Ok(Sweep {
        off_diag,
        log_gamma0: -0.5 * mu0.ln(),
    })
}

fn assemble(spec: &WeightSpec, n_max: usize, pad: f64, mesh: Mesh, sweep: Sweep) -> RecurrenceTable {
    let mut log_leading = Vec::with_capacity(n_max + 1);
    let mut acc = sweep.log_gamma0;
    log_leading.push(acc);
    for b in &sweep.off_diag {
        acc -= b.ln();
        log_leading.push(acc);
    }
    RecurrenceTable {
        label: spec.label().to_string(),
        n_max,
        diag: vec![0.0; n_max],
        off_diag: sweep.off_diag,
        log_leading,
        pad,
        mesh,
        ortho_residual: f64::NAN,
    }
}

/// [`build_recurrence_with`] using default options and the given pad.
pub fn build_recurrence(spec: &WeightSpec, n_max: usize, pad: f64) -> Result<RecurrenceTable> {
    build_recurrence_with(
        spec,
        n_max,
        &BuildOptions {
            pad,
            ..BuildOptions::default()
        },
    )
}

/// Builds `a_k`, `b_k`, `gamma_k` for `k <= n_max` on `[-pad a_{2 n_max}, pad a_{2 n_max}]`.
///
/// The panel count doubles until every `b_k` is stable to `stable_rel` and
/// the Gram residual on an independent mesh is at most `residual_tol`.
pub fn build_recurrence_with(spec: &WeightSpec, n_max: usize, opts: &BuildOptions) -> Result<RecurrenceTable> {
    if n_max == 0 {
        return Err(Error::invalid("n_max must be at least 1"));
    }
    if !(opts.pad >= 1.1) {
        return Err(Error::invalid(format!("pad must be at least 1.1, got {}", opts.pad)));
    }
    if !spec.even() {
        return Err(Error::NonEvenWeight(spec.label().to_string()));
    }
    let radius = opts.pad * solve_mrs(spec, 2 * n_max, CONSTANT_TOL)?.a_n;
    let mut panels = opts.initial_panels.unwrap_or(n_max / 2 + 16).max(2);
    let mut previous: Option<Vec<f64>> = None;
    let mut last_residual = f64::INFINITY;
    let mut last_nodes = 0;
    loop {
        let mesh = Mesh::half_line(radius, panels, opts.order, opts.origin_levels, opts.edge_levels);
        if mesh.len() > opts.max_nodes {
            return Err(Error::DiscretizationTooCoarse {
                residual: last_residual,
                nodes: last_nodes,
            });
        }
        last_nodes = mesh.len();
        let sweep = stieltjes(spec, &mesh, n_max)?;
        let stable = previous.as_ref().is_some_and(|old| {
            old.iter()
                .zip(&sweep.off_diag)
                .all(|(a, b)| (a - b).abs() <= opts.stable_rel * b)
        });
        previous = Some(sweep.off_diag.clone());
        if stable {
            let mut table = assemble(spec, n_max, opts.pad, mesh, sweep);
            table.ortho_residual = orthogonality_residual(spec, &table)?;
            last_residual = table.ortho_residual;
            if table.ortho_residual <= opts.residual_tol {
                return Ok(table);
            }
        }
        panels *= 2;
    }
}

/// Degrees entering the Gram check: all of `0..=40`, about two dozen spread
/// over the rest, and the top two.
pub fn check_indices(n_max: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..=n_max.min(40)).collect();
    if n_max > 40 {
        let span = (n_max - 40) as f64;
        for k in 1..=24 {
            idx.push(40 + (span * k as f64 / 25.0).round() as usize);
        }
        idx.push(n_max - 1);
        idx.push(n_max);
    }
    idx.sort_unstable();
    idx.dedup();
    idx
}

/// `max |int p_i p_j W^2 - delta_ij|` over [`check_indices`], on a mesh with a
/// different order, panel count and grading than the one that built the table.
pub fn orthogonality_residual(spec: &WeightSpec, table: &RecurrenceTable) -> Result<f64> {
    let sig = table.mesh.signature;
    let panels = (sig.panels as usize * 137).div_ceil(100) + 7;
    let mesh = Mesh::half_line(sig.radius(), panels, 24, 30, 4);
    gram_residual(spec, table, &mesh, &check_indices(table.n_max))
}

/// Gram residual over `indices` with the given folded mesh.
pub fn gram_residual(spec: &WeightSpec, table: &RecurrenceTable, mesh: &Mesh, indices: &[usize]) -> Result<f64> {
    let top = *indices.iter().max().unwrap_or(&0);
    table.check_degree(top)?;
    let logs = mesh.log2_root_measure(spec);
    let m = indices.len();
    let mut gram = vec![0.0; m * m];
    let mut row = vec![0.0; m];
    for (i, &x) in mesh.nodes.iter().enumerate() {
        let pv = eval_poly(table, x, top)?;
        for (slot, &j) in indices.iter().enumerate() {
            row[slot] = scaled(pv.values[j], pv.exponent, logs[i]);
        }
        for a in 0..m {
            if row[a] == 0.0 {
                continue;
            }
            for b in a..m {
                if (indices[a] + indices[b]).is_multiple_of(2) {
                    gram[a * m + b] += row[a] * row[b];
                }
            }
        }
    }
    let mut worst = 0.0f64;
    for a in 0..m {
        for b in a..m {
            let target = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((gram[a * m + b] - target).abs());
        }
    }
    if !worst.is_finite() {
        return Err(Error::NonFinite("Gram check"));
    }
    Ok(worst)
}

/// `p_0(x) .. p_n(x)` and derivatives, all equal to the stored mantissas times `2^exponent`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyValues {
    pub values: Vec<f64>,
    pub derivs: Vec<f64>,
    pub exponent: i64,
}

impl PolyValues {
    /// `p_j(x)` unscaled; overflows to infinity when the true value does.
    pub fn value(&self, j: usize) -> f64 {
        ldexp(self.values[j], self.exponent)
    }

    pub fn deriv(&self, j: usize) -> f64 {
        ldexp(self.derivs[j], self.exponent)
    }
}

fn check_x(x: f64) -> Result<()> {
    if x.is_finite() && x.abs() <= MAX_ABS_X {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "x",
            value: x,
            domain: "|x| <= 1e150",
        })
    }
}

/// Values and derivatives of `p_0 .. p_n` at `x`.
pub fn eval_poly(table: &RecurrenceTable, x: f64, n: usize) -> Result<PolyValues> {
    table.check_degree(n)?;
    check_x(x)?;
    let mut values = Vec::with_capacity(n + 1);
    let mut derivs = Vec::with_capacity(n + 1);
    let mut exponent = 0i64;
    let (mut p_prev, mut d_prev) = (0.0, 0.0);
    let (mut p, mut d) = (table.gamma0(), 0.0);
    values.push(p);
    derivs.push(d);
    for k in 0..n {
        let b_k = if k == 0 { 0.0 } else { table.off_diag[k - 1] };
        let b_next = table.off_diag[k];
        let shift = x - table.diag[k];
        let p_next = (shift * p - b_k * p_prev) / b_next;
        let d_next = (p + shift * d - b_k * d_prev) / b_next;
        p_prev = p;
        d_prev = d;
        p = p_next;
        d = d_next;
        values.push(p);
        derivs.push(d);
        if p.abs().max(d.abs()) > RESCALE_UP {
            p *= RESCALE_DOWN;
            d *= RESCALE_DOWN;
            p_prev *= RESCALE_DOWN;
            d_prev *= RESCALE_DOWN;
            values.iter_mut().for_each(|v| *v *= RESCALE_DOWN);
            derivs.iter_mut().for_each(|v| *v *= RESCALE_DOWN);
            exponent += RESCALE_BITS;
        }
    }
    Ok(PolyValues {
        values,
        derivs,
        exponent,
    })
}

/// Diagonal kernels `A = sum p_j^2`, `B = sum p_j p_j'`, `C = sum p_j'^2`
/// over `j <= n`, each equal to its mantissa times `2^exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelTriple {
    pub a_val: f64,
    pub b_val: f64,
    pub c_val: f64,
    pub exponent: i64,
}

impl KernelTriple {
    pub fn a(&self) -> f64 {
        ldexp(self.a_val, self.exponent)
    }

    pub fn b(&self) -> f64 {
        ldexp(self.b_val, self.exponent)
    }

    pub fn c(&self) -> f64 {
        ldexp(self.c_val, self.exponent)
    }
}

pub fn kernel_triple(table: &RecurrenceTable, x: f64, n: usize) -> Result<KernelTriple> {
    kernel_triple_shifted(table, x, n, None)
}

/// [`kernel_triple`] with an extra `2^-64` rescale forced after step `shift_at`.
#[doc(hidden)]
pub fn kernel_triple_shifted(table: &RecurrenceTable, x: f64, n: usize, shift_at: Option<usize>) -> Result<KernelTriple> {
    table.check_degree(n)?;
    check_x(x)?;
    let (mut p_prev, mut d_prev) = (0.0, 0.0);
    let (mut p, mut d) = (table.gamma0(), 0.0);
    let (mut sa, mut sb, mut sc) = (p * p, 0.0, 0.0);
    let mut exponent = 0i64;
    let mut rescale = |bits: i64, p: &mut f64, d: &mut f64, pp: &mut f64, dp: &mut f64, sums: [&mut f64; 3]| {
        let f = ldexp(1.0, -bits);
        *p *= f;
        *d *= f;
        *pp *= f;
        *dp *= f;
        let f2 = f * f;
        for s in sums {
            *s *= f2;
        }
        exponent += 2 * bits;
    };
    for k in 0..n {
        let b_k = if k == 0 { 0.0 } else { table.off_diag[k - 1] };
        let b_next = table.off_diag[k];
        let shift = x - table.diag[k];
        let p_next = (shift * p - b_k * p_prev) / b_next;
        let d_next = (p + shift * d - b_k * d_prev) / b_next;
        p_prev = p;
        d_prev = d;
        p = p_next;
        d = d_next;
        sa += p * p;
        sb += p * d;
        sc += d * d;
        if p.abs().max(d.abs()) > RESCALE_UP {
            rescale(RESCALE_BITS, &mut p, &mut d, &mut p_prev, &mut d_prev, [&mut sa, &mut sb, &mut sc]);
        }
        if shift_at == Some(k) {
            rescale(64, &mut p, &mut d, &mut p_prev, &mut d_prev, [&mut sa, &mut sb, &mut sc]);
        }
    }
    Ok(KernelTriple {
        a_val: sa,
        b_val: sb,
        c_val: sc,
        exponent,
    })
}

/// The three diagnostics that tend to `1`, `0` and `pi^2/3` inside the bulk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniversalityRatios {
    /// `W^2 K_{n+1} / sigma_{n+1}`
    pub r00: f64,
    /// `W^2 K^{(0,1)}_{n+1} / sigma^2 - Q' / sigma`
    pub r01: f64,
    /// `W^2 K^{(1,1)}_{n+1} / sigma^3 - (Q' / sigma)^2`
    pub r11: f64,
}

/// Universality diagnostics at `x` in `J_{n+1}(eps)`; `info` is for degree `n + 1`.
pub fn universality_ratios(
    spec: &WeightSpec,
    table: &RecurrenceTable,
    info: &ScalingInfo,
    x: f64,
    eps: f64,
) -> Result<UniversalityRatios> {
    if info.n == 0 {
        return Err(Error::invalid("scaling info must be for degree n + 1 >= 1"));
    }
    let (lo, hi) = info.j_interval(eps);
    if !(x >= lo && x <= hi) {
        return Err(Error::Domain {
            what: "x",
            value: x,
            domain: "J_{n+1}(eps)",
        });
    }
    let t = kernel_triple(table, x, info.n - 1)?;
    let sigma = equilibrium_density(spec, info, x, DENSITY_TOL)?;
    let log_scale = t.exponent as f64 * LN_2 - 2.0 * spec.q(x);
    let weighted = |m: f64| m.signum() * (m.abs().ln() + log_scale).exp();
    let slope = spec.q1(x) / sigma;
    Ok(UniversalityRatios {
        r00: weighted(t.a_val) / sigma,
        r01: weighted(t.b_val) / (sigma * sigma) - slope,
        r11: weighted(t.c_val) / (sigma * sigma * sigma) - slope * slope,
    })
}

const CACHE_MAGIC: &[u8; 8] = b"OZRTAB\0\0";
const CACHE_VERSION: u32 = 1;

fn put_f64s(out: &mut Vec<u8>, v: &[f64]) {
    out.extend_from_slice(&(v.len() as u64).to_le_bytes());
    for x in v {
        out.extend_from_slice(&x.to_le_bytes());
    }
}

/// Writes the table to a versioned little-endian binary file.
pub fn write_cache(path: &Path, table: &RecurrenceTable) -> Result<()> {
    let mut out = Vec::new();
    out.extend_from_slice(CACHE_MAGIC);
    out.extend_from_slice(&CACHE_VERSION.to_le_bytes());
    let label = table.label.as_bytes();
    out.extend_from_slice(&(label.len() as u32).to_le_bytes());
    out.extend_from_slice(label);
    out.extend_from_slice(&(table.n_max as u64).to_le_bytes());
    out.extend_from_slice(&table.pad.to_le_bytes());
    let s = table.mesh.signature;
    for v in [s.order, s.panels, s.origin_levels, s.edge_levels] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out.extend_from_slice(&s.radius_bits.to_le_bytes());
    out.extend_from_slice(&table.ortho_residual.to_le_bytes());
    put_f64s(&mut out, &table.diag);
    put_f64s(&mut out, &table.off_diag);
    put_f64s(&mut out, &table.log_leading);
    put_f64s(&mut out, &table.mesh.nodes);
    put_f64s(&mut out, &table.mesh.weights);
    let mut f = fs::File::create(path)?;
    f.write_all(&out)?;
    Ok(())
}

struct Reader<'a> {
    buf: &'a [u8],
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8]> {
        if self.buf.len() < n {
            return Err(Error::Cache("truncated file".into()));
        }
        let (head, tail) = self.buf.split_at(n);
        self.buf = tail;
        Ok(head)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_bits(self.u64()?))
    }

    fn f64s(&mut self) -> Result<Vec<f64>> {
        let n = self.u64()? as usize;
        if n > self.buf.len() / 8 {
            return Err(Error::Cache("array length exceeds file size".into()));
        }
        (0..n).map(|_| self.f64()).collect()
    }
}

/// Reads a table written by [`write_cache`].
pub fn read_cache(path: &Path) -> Result<RecurrenceTable> {
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    let mut r = Reader { buf: &bytes };
    if r.take(8)? != CACHE_MAGIC {
        return Err(Error::Cache("not a recurrence table file".into()));
    }
    let version = r.u32()?;
    if version != CACHE_VERSION {
        return Err(Error::Cache(format!("unsupported version {version}")));
    }
    let len = r.u32()? as usize;
    let label = String::from_utf8(r.take(len)?.to_vec()).map_err(|_| Error::Cache("label is not UTF-8".into()))?;
    let n_max = r.u64()? as usize;
    let pad = r.f64()?;
    let signature = MeshSignature {
        order: r.u32()?,
        panels: r.u32()?,
        origin_levels: r.u32()?,
        edge_levels: r.u32()?,
        radius_bits: r.u64()?,
    };
    let ortho_residual = r.f64()?;
    let diag = r.f64s()?;
    let off_diag = r.f64s()?;
    let log_leading = r.f64s()?;
    let nodes = r.f64s()?;
    let weights = r.f64s()?;
    if diag.len() != n_max || off_diag.len() != n_max || log_leading.len() != n_max + 1 || nodes.len() != weights.len() {
        return Err(Error::Cache("inconsistent array lengths".into()));
    }
    if !r.buf.is_empty() {
        return Err(Error::Cache("trailing bytes".into()));
    }
    Ok(RecurrenceTable {
        label,
        n_max,
        diag,
        off_diag,
        log_leading,
        pad,
        mesh: Mesh {
            nodes,
            weights,
            signature,
        },
        ortho_residual,
    })
}

/// Loads the cached table when its label, `n_max` and pad match, otherwise
/// builds one and writes it to `path`.
pub fn load_or_build(spec: &WeightSpec, n_max: usize, opts: &BuildOptions, path: &Path) -> Result<RecurrenceTable> {
    if path.exists() {
        if let Ok(table) = read_cache(path) {
            if table.label == spec.label() && table.n_max == n_max && table.pad == opts.pad {
                return Ok(table);
            }
        }
    }
    let table = build_recurrence_with(spec, n_max, opts)?;
    write_cache(path, &table)?;
    Ok(table)
}
