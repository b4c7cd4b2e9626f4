//! Post-FEC BER/FER from DTP tables, threshold search and the concatenated RS/BCH evaluator.

use std::borrow::Cow;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::joint_ue_distribution;
use crate::channel::{
    anchor_probs_eae, quantize, sigma_from_ebn0, ChannelError, JointDistribution, DEFAULT_ETA,
};
use crate::code::{CodeSpec, WeightEnumerator};
use crate::dtp::{
    bdd_a_dtp, bdd_dtp, eaed_a_dtp, eaed_dtp, AnchorWeights, BddDtp, CorrectDecodeCheck, DtpCell,
    DtpError, EaedDtp, EaedParams,
};
use crate::numerics::{log_binomial, NeumaierSum};
use crate::par::Exec;
use crate::sim::DecoderKind;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error(transparent)]
    Dtp(#[from] DtpError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error("uncovered probability mass {uncovered:e} exceeds tolerance {tol:e}")]
    Coverage { uncovered: f64, tol: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
}

/// A table that answers P(outcome, r | u, e) in floating point.
pub trait CellSource: Sync {
    fn cell_at(&self, u: usize, e: usize) -> Option<Cow<'_, DtpCell<f64>>>;
}

impl CellSource for BddDtp<f64> {
    fn cell_at(&self, u: usize, e: usize) -> Option<Cow<'_, DtpCell<f64>>> {
        if e != 0 {
            return None;
        }
        self.cells.get(u).map(Cow::Borrowed)
    }
}

impl CellSource for EaedDtp<f64> {
    fn cell_at(&self, u: usize, e: usize) -> Option<Cow<'_, DtpCell<f64>>> {
        self.lookup(u, e)
    }
}

/// Restricts the evaluation to u <= u_max and residuals r <= r_max.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub u_max: usize,
    pub r_max: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BerFer {
    pub ber: f64,
    pub fer: f64,
    pub mc_ber: f64,
    /// Joint mass not covered by the table, including the truncated tail.
    pub uncovered: f64,
}

/// Averages the cell statistics over the joint (U, E) distribution.
///
/// BER is E[R]/n with failures at their half-integer residual; FER is P(R > 0);
/// mc_ber keeps only the miscorrection part of E[R].
pub fn ber_fer_from_dtp(
    dtp: &dyn CellSource,
    joint: &JointDistribution,
    n: usize,
    window: Option<Window>,
    tol: f64,
) -> Result<BerFer, MetricsError> {
    let (mut ber, mut fer, mut mc) = (NeumaierSum::new(), NeumaierSum::new(), NeumaierSum::new());
    let mut uncovered = NeumaierSum::new();
    uncovered.add(joint.dropped_mass);
    for jc in &joint.cells {
        if window.is_some_and(|w| jc.u > w.u_max) {
            continue;
        }
        let Some(cell) = dtp.cell_at(jc.u, jc.e) else {
            uncovered.add(jc.p);
            continue;
        };
        let cell = match window {
            Some(w) => Cow::Owned(clip(&cell, w.r_max)),
            None => cell,
        };
        ber.add(jc.p * cell.expected_residual());
        fer.add(jc.p * cell.frame_error());
        mc.add(jc.p * cell.mc_residual());
    }
    let uncovered = uncovered.value();
    if uncovered > tol {
        return Err(MetricsError::Coverage { uncovered, tol });
    }
    let n = n as f64;
    Ok(BerFer {
        ber: ber.value() / n,
        fer: fer.value(),
        mc_ber: mc.value() / n,
        uncovered,
    })
}

fn clip(c: &DtpCell<f64>, r_max: usize) -> DtpCell<f64> {
    let mut out = c.clone();
    if out.fail_residual.value() > r_max as f64 {
        out.fail = 0.0;
    }
    out.mc.retain(|r, _| *r <= r_max);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub ebn0_db: f64,
    pub ber: f64,
    pub fer: f64,
    pub mc_ber: f64,
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "T_a")]
    pub t_a: Option<f64>,
}

/// Decoder variant, thresholds and evaluation settings of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub decoder: DecoderKind,
    /// Erasure threshold; forced to 0 for the BDD variants.
    pub t: f64,
    pub t_a: Option<f64>,
    /// Joint-distribution truncation.
    pub eta: f64,
    pub erasure_cap: Option<usize>,
    pub check: CorrectDecodeCheck,
    pub window: Option<Window>,
    /// Largest uncovered mass accepted.
    pub tol: f64,
    #[serde(skip, default)]
    pub exec: Exec,
}

impl SweepSpec {
    pub fn new(decoder: DecoderKind, t: f64, t_a: Option<f64>) -> Self {
        SweepSpec {
            decoder,
            t,
            t_a,
            eta: DEFAULT_ETA,
            erasure_cap: None,
            check: CorrectDecodeCheck::default(),
            window: None,
            tol: 1e-12,
            exec: Exec::default(),
        }
    }

    pub fn with_window(mut self, w: Window) -> Self {
        self.window = Some(w);
        self
    }

    fn effective_t(&self) -> f64 {
        if self.decoder.uses_erasures() {
            self.t
        } else {
            0.0
        }
    }

    fn validate(&self) -> Result<(), MetricsError> {
        if self.decoder.uses_anchors() && self.t_a.is_none() {
            return Err(MetricsError::Config(format!(
                "decoder {} needs T_a",
                self.decoder
            )));
        }
        if let Some(ta) = self.t_a {
            if self.decoder.uses_anchors() && ta <= self.effective_t() {
                return Err(MetricsError::Config(format!(
                    "T_a = {ta} must exceed T = {}",
                    self.effective_t()
                )));
            }
        }
        Ok(())
    }
}

/// A built table of either shape.
#[derive(Debug, Clone)]
pub enum Table {
    Bdd(BddDtp<f64>),
    Eaed(EaedDtp<f64>),
}

impl Table {
    pub fn source(&self) -> &dyn CellSource {
        match self {
            Table::Bdd(t) => t,
            Table::Eaed(t) => t,
        }
    }
}

/// Anchored tables keyed by the exact bits of (sigma, T, T_a).
#[derive(Debug, Default, Clone)]
pub struct TableCache {
    inner: Arc<Mutex<HashMap<(u64, u64, u64, usize, usize), Arc<Table>>>>,
}

impl TableCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.inner.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn get_or_build(
        &self,
        key: (u64, u64, u64, usize, usize),
        build: impl FnOnce() -> Result<Table, MetricsError>,
    ) -> Result<Arc<Table>, MetricsError> {
        if let Some(t) = self.inner.lock().expect("cache lock").get(&key) {
            return Ok(t.clone());
        }
        let t = Arc::new(build()?);
        Ok(self
            .inner
            .lock()
            .expect("cache lock")
            .entry(key)
            .or_insert(t)
            .clone())
    }
}

fn build_table(
    spec: &CodeSpec,
    a: &WeightEnumerator,
    s: &SweepSpec,
    anchors: &AnchorWeights<f64>,
    u_max: usize,
    e_max: usize,
) -> Result<Table, MetricsError> {
    let u_max = u_max.min(spec.n);
    let e_max = e_max.min(spec.n - u_max);
    let params = EaedParams {
        u_max,
        e_max,
        erasure_cap: s.erasure_cap,
        check: s.check,
        exec: s.exec,
    };
    Ok(match s.decoder {
        DecoderKind::Bdd => Table::Bdd(bdd_dtp(spec, a, u_max)?),
        DecoderKind::BddA => Table::Bdd(bdd_a_dtp(spec, a, anchors, u_max, s.check)?),
        DecoderKind::Eaed => Table::Eaed(eaed_dtp(spec, a, &params)?),
        DecoderKind::EaedA => Table::Eaed(eaed_a_dtp(spec, a, anchors, &params)?),
    })
}

/// Everything needed to evaluate one operating point.
#[derive(Debug, Clone)]
pub struct OperatingPoint {
    pub ebn0_db: f64,
    pub sigma: f64,
    pub joint: JointDistribution,
    pub anchors: AnchorWeights<f64>,
}

/// Channel statistics at `ebn0_db` for the code rate of `spec`.
pub fn operating_point(
    spec: &CodeSpec,
    s: &SweepSpec,
    ebn0_db: f64,
    rate: f64,
) -> Result<OperatingPoint, MetricsError> {
    let sigma = sigma_from_ebn0(ebn0_db, rate);
    let t = s.effective_t();
    let ch = quantize(sigma, t)?;
    let joint = joint_ue_distribution(spec.n, &ch, s.eta);
    let anchors = match (s.decoder.uses_anchors(), s.t_a) {
        (true, Some(ta)) => AnchorWeights::from_probs(&anchor_probs_eae(sigma, t, ta)?),
        _ => AnchorWeights::none(),
    };
    Ok(OperatingPoint {
        ebn0_db,
        sigma,
        joint,
        anchors,
    })
}

/// Table for one point, shared through `cache` when anchors depend on sigma.
pub fn table_for(
    spec: &CodeSpec,
    a: &WeightEnumerator,
    s: &SweepSpec,
    op: &OperatingPoint,
    cache: &TableCache,
) -> Result<Arc<Table>, MetricsError> {
    let (u_max, e_max) = (op.joint.u_max(), op.joint.e_max());
    let key = (
        op.sigma.to_bits(),
        s.effective_t().to_bits(),
        s.t_a.unwrap_or(-1.0).to_bits(),
        u_max,
        e_max,
    );
    cache.get_or_build(key, || build_table(spec, a, s, &op.anchors, u_max, e_max))
}

/// Analytic BER/FER over a grid of Eb/N0 values.
///
/// Un-anchored variants build one table covering every point; anchored variants
/// build (or fetch) a table per point.
pub fn sweep(
    spec: &CodeSpec,
    a: &WeightEnumerator,
    s: &SweepSpec,
    grid: &[f64],
) -> Result<Vec<SweepPoint>, MetricsError> {
    sweep_with_rate(spec, a, s, grid, spec.rate(), &TableCache::new())
}

/// As [`sweep`], with an explicit rate for Eb/N0 (e.g. of a concatenated scheme) and a shared cache.
pub fn sweep_with_rate(
    spec: &CodeSpec,
    a: &WeightEnumerator,
    s: &SweepSpec,
    grid: &[f64],
    rate: f64,
    cache: &TableCache,
) -> Result<Vec<SweepPoint>, MetricsError> {
    if grid.is_empty() {
        return Err(MetricsError::Config("empty Eb/N0 grid".into()));
    }
    s.validate()?;
    let ops: Vec<OperatingPoint> = grid
        .iter()
        .map(|&db| operating_point(spec, s, db, rate))
        .collect::<Result<_, _>>()?;
    let shared = if s.decoder.uses_anchors() {
        None
    } else {
        let u = ops.iter().map(|o| o.joint.u_max()).max().unwrap_or(0);
        let e = ops.iter().map(|o| o.joint.e_max()).max().unwrap_or(0);
        Some(build_table(spec, a, s, &AnchorWeights::none(), u, e)?)
    };
    let results = s
        .exec
        .map(ops.len(), |i| -> Result<SweepPoint, MetricsError> {
            let op = &ops[i];
            let owned;
            let table = match &shared {
                Some(t) => t,
                None => {
                    owned = table_for(spec, a, s, op, cache)?;
                    owned.as_ref()
                }
            };
            let r = ber_fer_from_dtp(table.source(), &op.joint, spec.n, s.window, s.tol)?;
            Ok(SweepPoint {
                ebn0_db: op.ebn0_db,
                ber: r.ber,
                fer: r.fer,
                mc_ber: r.mc_ber,
                t: s.effective_t(),
                t_a: if s.decoder.uses_anchors() {
                    s.t_a
                } else {
                    None
                },
            })
        });
    results.into_iter().collect()
}

/// Grid-search minimizer; ties go to the smaller T, then the smaller T_a.
pub fn argmin_thresholds(
    t_grid: &[f64],
    ta_grid: Option<&[f64]>,
    exec: Exec,
    objective: impl Fn(f64, Option<f64>) -> Result<f64, MetricsError> + Sync + Send,
) -> Result<(f64, Option<f64>, f64), MetricsError> {
    if t_grid.is_empty() || ta_grid.is_some_and(|g| g.is_empty()) {
        return Err(MetricsError::Config("empty threshold grid".into()));
    }
    let mut pairs: Vec<(f64, Option<f64>)> = Vec::new();
    for &t in t_grid {
        match ta_grid {
            Some(g) => pairs.extend(g.iter().filter(|&&ta| ta > t).map(|&ta| (t, Some(ta)))),
            None => pairs.push((t, None)),
        }
    }
    pairs.sort_by(|x, y| {
        x.0.total_cmp(&y.0)
            .then(x.1.unwrap_or(0.0).total_cmp(&y.1.unwrap_or(0.0)))
    });
    if pairs.is_empty() {
        return Err(MetricsError::Config(
            "no threshold pair with T_a > T".into(),
        ));
    }
    let vals = exec.map(pairs.len(), |i| objective(pairs[i].0, pairs[i].1));
    let mut best: Option<(f64, Option<f64>, f64)> = None;
    for (p, v) in pairs.iter().zip(vals) {
        let v = v?;
        if best.is_none_or(|b| v < b.2) {
            best = Some((p.0, p.1, v));
        }
    }
    Ok(best.expect("non-empty"))
}

/// Which quantity the threshold search minimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Ber,
    Fer,
}

/// (T*, T_a*) minimizing BER (or FER) at `ebn0_ref`.
pub fn optimize_thresholds(
    spec: &CodeSpec,
    a: &WeightEnumerator,
    base: &SweepSpec,
    ebn0_ref: f64,
    t_grid: &[f64],
    ta_grid: Option<&[f64]>,
    objective: Objective,
) -> Result<(f64, Option<f64>), MetricsError> {
    let ta_grid = if base.decoder.uses_anchors() {
        ta_grid
    } else {
        None
    };
    if base.decoder.uses_anchors() && ta_grid.is_none() {
        return Err(MetricsError::Config(
            "anchored variants need a T_a grid".into(),
        ));
    }
    let inner = SweepSpec {
        exec: Exec::Sequential,
        ..*base
    };
    let (t, ta, _) = argmin_thresholds(t_grid, ta_grid, base.exec, |t, ta| {
        let s = SweepSpec {
            t,
            t_a: ta,
            ..inner
        };
        let p = sweep(spec, a, &s, &[ebn0_ref])?[0];
        Ok(match objective {
            Objective::Ber => p.ber,
            Objective::Fer => p.fer,
        })
    })?;
    Ok((t, ta))
}

/// (T*, T_a*) minimizing the concatenated-scheme FER at `ebn0_ref`.
pub fn optimize_concat_thresholds(
    cfg: &ConcatConfig,
    a: &WeightEnumerator,
    base: &SweepSpec,
    ebn0_ref: f64,
    t_grid: &[f64],
    ta_grid: Option<&[f64]>,
) -> Result<(f64, Option<f64>), MetricsError> {
    let ta_grid = if base.decoder.uses_anchors() {
        ta_grid
    } else {
        None
    };
    if base.decoder.uses_anchors() && ta_grid.is_none() {
        return Err(MetricsError::Config(
            "anchored variants need a T_a grid".into(),
        ));
    }
    let inner = SweepSpec {
        exec: Exec::Sequential,
        ..*base
    };
    let (t, ta, _) = argmin_thresholds(t_grid, ta_grid, base.exec, |t, ta| {
        let s = SweepSpec {
            t,
            t_a: ta,
            ..inner
        };
        Ok(concat_sweep(cfg, a, &s, &[ebn0_ref], &TableCache::new())?[0].fer)
    })?;
    Ok((t, ta))
}

/// Outer Reed-Solomon code parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RsParams {
    pub n_rs: usize,
    pub k_rs: usize,
    pub symbol_bits: usize,
}

impl RsParams {
    pub fn t_rs(&self) -> usize {
        (self.n_rs - self.k_rs) / 2
    }

    pub fn rate(&self) -> f64 {
        self.k_rs as f64 / self.n_rs as f64
    }
}

/// How residual inner-block bit errors map to RS symbol errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymbolMapping {
    /// Every residual information-bit error strikes an independent, uniformly chosen
    /// symbol of its block.
    #[default]
    UniformSpread,
    /// All residual errors of a block fall into one symbol.
    SameSymbol,
    /// Each RS word is made of whole inner blocks, so a block's symbol errors all land
    /// in the same RS word; symbols hit within a block follow exact occupancy counts.
    BlockAligned,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcatConfig {
    pub outer: RsParams,
    /// Shortened inner BCH code.
    pub inner: CodeSpec,
    pub num_outer: usize,
    pub num_inner: usize,
    #[serde(default)]
    pub mapping: SymbolMapping,
}

impl ConcatConfig {
    /// Eight interleaved RS[544,514] words over 10-bit symbols with 64 BCH[700,680] inner blocks.
    pub fn reference() -> Self {
        let inner = CodeSpec::new(1023, 1003, 5)
            .and_then(|p| p.shorten(323))
            .expect("valid code");
        ConcatConfig {
            outer: RsParams {
                n_rs: 544,
                k_rs: 514,
                symbol_bits: 10,
            },
            inner,
            num_outer: 8,
            num_inner: 64,
            mapping: SymbolMapping::UniformSpread,
        }
    }

    pub fn validate(&self) -> Result<(), MetricsError> {
        let o = &self.outer;
        if o.k_rs > o.n_rs || o.k_rs == 0 || (o.n_rs - o.k_rs) % 2 != 0 || o.symbol_bits == 0 {
            return Err(MetricsError::Config(format!(
                "invalid RS[{}, {}] parameters",
                o.n_rs, o.k_rs
            )));
        }
        let outer_bits = self.num_outer * o.n_rs * o.symbol_bits;
        let inner_bits = self.num_inner * self.inner.k;
        if outer_bits != inner_bits {
            return Err(MetricsError::Config(format!(
                "{outer_bits} outer code bits do not fill {inner_bits} inner information bits"
            )));
        }
        if self.mapping == SymbolMapping::BlockAligned && self.num_inner % self.num_outer != 0 {
            return Err(MetricsError::Config(
                "block-aligned mapping needs whole blocks per RS word".into(),
            ));
        }
        if self.inner.k % o.symbol_bits != 0 {
            return Err(MetricsError::Config(
                "inner information length is not a whole number of symbols".into(),
            ));
        }
        Ok(())
    }

    pub fn rate(&self) -> f64 {
        self.outer.rate() * self.inner.rate()
    }

    fn symbols_per_block(&self) -> usize {
        self.inner.k / self.outer.symbol_bits
    }
}

/// E[x^R] of a cell, with a failure resolving each erasure by a fair coin.
fn residual_pgf(c: &DtpCell<f64>, u: usize, e: usize, x: f64) -> f64 {
    let mut s = NeumaierSum::new();
    s.add(c.succ);
    for (r, p) in &c.mc {
        s.add(p * x.powi(*r as i32));
    }
    s.add(c.fail * x.powi(u as i32) * ((1.0 + x) / 2.0).powi(e as i32));
    s.value()
}

/// Probability that a given RS symbol is hit by the inner block's residual errors.
pub fn symbol_error_probability(
    cfg: &ConcatConfig,
    inner: &dyn CellSource,
    joint: &JointDistribution,
) -> Result<f64, MetricsError> {
    let spec = &cfg.inner;
    let frac_info = spec.k as f64 / spec.n as f64;
    let s = cfg.symbols_per_block() as f64;
    // A residual bit is an information bit hitting a fixed symbol with probability k/(n s).
    let x = match cfg.mapping {
        SymbolMapping::UniformSpread | SymbolMapping::BlockAligned => 1.0 - frac_info / s,
        SymbolMapping::SameSymbol => 1.0 - frac_info,
    };
    let mut no_hit = NeumaierSum::new();
    let mut covered = NeumaierSum::new();
    for jc in &joint.cells {
        let Some(c) = inner.cell_at(jc.u, jc.e) else {
            continue;
        };
        covered.add(jc.p);
        no_hit.add(jc.p * residual_pgf(&c, jc.u, jc.e, x));
    }
    let hit = (covered.value() - no_hit.value()).max(0.0) + (1.0 - covered.value()).max(0.0);
    Ok(match cfg.mapping {
        SymbolMapping::UniformSpread | SymbolMapping::BlockAligned => hit,
        SymbolMapping::SameSymbol => hit / s,
    }
    .clamp(0.0, 1.0))
}

/// Distribution of the integer residual R of a cell (failures resolve erasures by fair coins).
fn residual_distribution(c: &DtpCell<f64>, u: usize, e: usize, out: &mut Vec<f64>, w: f64) {
    let mut put = |r: usize, p: f64| {
        if out.len() <= r {
            out.resize(r + 1, 0.0);
        }
        out[r] += w * p;
    };
    put(0, c.succ);
    for (r, p) in &c.mc {
        put(*r, *p);
    }
    if c.fail > 0.0 {
        let half = 0.5f64.powi(e as i32);
        for j in 0..=e {
            let b = (log_binomial(e as i64, j as i64).expect("in range").ln()).exp();
            put(u + j, c.fail * b * half);
        }
    }
}

/// P(s symbols hit | i bit errors placed uniformly among `symbols` symbols of `bits` bits).
fn occupancy(symbols: usize, bits: usize, i: usize) -> Vec<f64> {
    // f[s] = ways to pick i bits from s given symbols with each of them hit
    let cb: Vec<f64> = (0..=bits).map(|m| binom_f(bits, m)).collect();
    let mut f = vec![vec![0.0; i + 1]; symbols.min(i) + 1];
    f[0][0] = 1.0;
    for s in 1..f.len() {
        for tot in s..=i {
            let mut acc = 0.0;
            for m in 1..=bits.min(tot) {
                acc += cb[m] * f[s - 1][tot - m];
            }
            f[s][tot] = acc;
        }
    }
    let all = binom_f(symbols * bits, i);
    (0..f.len())
        .map(|s| binom_f(symbols, s) * f[s][i] / all)
        .collect()
}

fn binom_f(n: usize, k: usize) -> f64 {
    crate::numerics::binomial_f64(n as i64, k as i64)
}

/// Distribution of the number of RS symbols of one inner block hit by residual errors.
pub fn block_symbol_distribution(
    cfg: &ConcatConfig,
    inner: &dyn CellSource,
    joint: &JointDistribution,
) -> Vec<f64> {
    let spec = &cfg.inner;
    let mut rdist = Vec::new();
    let mut covered = NeumaierSum::new();
    for jc in &joint.cells {
        if let Some(c) = inner.cell_at(jc.u, jc.e) {
            covered.add(jc.p);
            residual_distribution(&c, jc.u, jc.e, &mut rdist, jc.p);
        }
    }
    let (n, k, sb) = (spec.n, spec.k, cfg.outer.symbol_bits);
    let syms = cfg.symbols_per_block();
    let mut out = vec![0.0; syms + 1];
    for (r, &pr) in rdist.iter().enumerate() {
        if pr == 0.0 {
            continue;
        }
        // info-bit errors among the r residual positions: hypergeometric
        for i in r.saturating_sub(n - k)..=r.min(k) {
            let ph = binom_f(k, i) * binom_f(n - k, r - i) / binom_f(n, r);
            if ph == 0.0 {
                continue;
            }
            for (s, q) in occupancy(syms, sb, i).into_iter().enumerate() {
                out[s] += pr * ph * q;
            }
        }
    }
    // uncovered mass is charged as a fully failed block
    out[syms] += (1.0 - covered.value()).max(0.0);
    out
}

fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// P(more than t_rs symbol errors) in an RS word made of `blocks` independent blocks.
pub fn block_aligned_word_failure(block: &[f64], blocks: usize, t_rs: usize) -> f64 {
    let mut acc = vec![1.0];
    for _ in 0..blocks {
        acc = convolve(&acc, block);
    }
    let tail: NeumaierSum = acc.iter().skip(t_rs + 1).copied().collect();
    tail.value().clamp(0.0, 1.0)
}

/// P(Bin(n, p) > t).
pub fn binomial_tail_above(n: usize, p: f64, t: usize) -> f64 {
    if p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return if n > t { 1.0 } else { 0.0 };
    }
    let (lp, lq) = (p.ln(), (-p).ln_1p());
    let term = |i: usize| {
        (log_binomial(n as i64, i as i64).expect("in range").ln()
            + i as f64 * lp
            + (n - i) as f64 * lq)
            .exp()
    };
    // Sum the smaller side to keep relative accuracy in the tail.
    if (t as f64) >= n as f64 * p {
        (t + 1..=n)
            .map(term)
            .collect::<NeumaierSum>()
            .value()
            .min(1.0)
    } else {
        (1.0 - (0..=t).map(term).collect::<NeumaierSum>().value()).max(0.0)
    }
}

/// Scheme FER: per RS word P(symbol errors > t_rs), combined over the interleaved words.
pub fn concat_fer_from_symbol_prob(cfg: &ConcatConfig, p_sym: f64) -> f64 {
    let per_word = binomial_tail_above(cfg.outer.n_rs, p_sym, cfg.outer.t_rs());
    // 1 - (1 - q)^m without cancellation
    -(cfg.num_outer as f64 * (-per_word).ln_1p()).exp_m1()
}

pub fn concat_fer(
    cfg: &ConcatConfig,
    inner: &dyn CellSource,
    joint: &JointDistribution,
) -> Result<f64, MetricsError> {
    cfg.validate()?;
    if cfg.mapping == SymbolMapping::BlockAligned {
        let block = block_symbol_distribution(cfg, inner, joint);
        let q = block_aligned_word_failure(&block, cfg.num_inner / cfg.num_outer, cfg.outer.t_rs());
        return Ok(-(cfg.num_outer as f64 * (-q).ln_1p()).exp_m1());
    }
    let p = symbol_error_probability(cfg, inner, joint)?;
    Ok(concat_fer_from_symbol_prob(cfg, p))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcatPoint {
    pub ebn0_db: f64,
    pub symbol_error: f64,
    pub fer: f64,
    pub inner_ber: f64,
    pub inner_fer: f64,
}

/// Scheme FER over an Eb/N0 grid, with Eb/N0 referred to the overall rate.
pub fn concat_sweep(
    cfg: &ConcatConfig,
    a: &WeightEnumerator,
    s: &SweepSpec,
    grid: &[f64],
    cache: &TableCache,
) -> Result<Vec<ConcatPoint>, MetricsError> {
    cfg.validate()?;
    s.validate()?;
    if grid.is_empty() {
        return Err(MetricsError::Config("empty Eb/N0 grid".into()));
    }
    let spec = cfg.inner;
    let rate = cfg.rate();
    let out = s
        .exec
        .map(grid.len(), |i| -> Result<ConcatPoint, MetricsError> {
            let op = operating_point(&spec, s, grid[i], rate)?;
            let table = table_for(&spec, a, s, &op, cache)?;
            let p = symbol_error_probability(cfg, table.source(), &op.joint)?;
            let inner = ber_fer_from_dtp(table.source(), &op.joint, spec.n, None, f64::INFINITY)?;
            Ok(ConcatPoint {
                ebn0_db: grid[i],
                symbol_error: p,
                fer: concat_fer(cfg, table.source(), &op.joint)?,
                inner_ber: inner.ber,
                inner_fer: inner.fer,
            })
        });
    out.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::EaeChannel;
    use crate::dtp::HalfInt;

    fn spec() -> CodeSpec {
        CodeSpec::new(255, 239, 5).unwrap()
    }

    #[test]
    fn perfect_channel_is_error_free() {
        let s = spec();
        let a = WeightEnumerator::bundled(255, 239).unwrap();
        let t: EaedDtp<f64> = eaed_dtp(&s, &a, &EaedParams::new(0, 0)).unwrap();
        let ch = EaeChannel::new(0.0, 0.0).unwrap();
        let joint = joint_ue_distribution(255, &ch, DEFAULT_ETA);
        let r = ber_fer_from_dtp(&t, &joint, 255, None, 1e-12).unwrap();
        assert_eq!((r.ber, r.fer, r.mc_ber), (0.0, 0.0, 0.0));
    }

    #[test]
    fn coverage_is_enforced() {
        let s = spec();
        let a = WeightEnumerator::bundled(255, 239).unwrap();
        let t: BddDtp<f64> = bdd_dtp(&s, &a, 2).unwrap();
        let ch = EaeChannel::bsc(1e-2).unwrap();
        let joint = joint_ue_distribution(255, &ch, DEFAULT_ETA);
        assert!(matches!(
            ber_fer_from_dtp(&t, &joint, 255, None, 1e-9),
            Err(MetricsError::Coverage { .. })
        ));
    }

    #[test]
    fn pgf_of_failure() {
        let mut c = DtpCell::empty(HalfInt::failure(1, 2));
        c.fail = 1.0;
        // x^1 ((1+x)/2)^2 at x = 0.5
        assert!((residual_pgf(&c, 1, 2, 0.5) - 0.5 * 0.5625).abs() < 1e-15);
    }

    #[test]
    fn binomial_tail_small() {
        // P(Bin(10, 0.5) > 8) = 11/1024
        assert!((binomial_tail_above(10, 0.5, 8) - 11.0 / 1024.0).abs() < 1e-15);
        assert_eq!(binomial_tail_above(10, 0.0, 0), 0.0);
        assert!((binomial_tail_above(544, 1e-3, 0) - (1.0 - 0.999f64.powi(544))).abs() < 1e-12);
    }

    #[test]
    fn degenerate_outer_code() {
        let cfg = ConcatConfig::reference();
        assert_eq!(cfg.outer.t_rs(), 15);
        assert!(cfg.validate().is_ok());
        assert!((cfg.rate() - 0.9179).abs() < 1e-4);
        let mut bare = cfg;
        bare.outer.k_rs = bare.outer.n_rs;
        assert_eq!(bare.outer.t_rs(), 0);
        let p = 1e-4f64;
        let any = 1.0 - (1.0 - p).powi((544 * 8) as i32);
        assert!((concat_fer_from_symbol_prob(&bare, p) / any - 1.0).abs() < 1e-10);
        bare.outer.k_rs = 545;
        assert!(bare.validate().is_err());
    }

    #[test]
    fn argmin_ties_go_to_smaller_t() {
        let (t, _, v) =
            argmin_thresholds(&[0.3, 0.1, 0.2], None, Exec::Sequential, |_, _| Ok(1.0)).unwrap();
        assert_eq!((t, v), (0.1, 1.0));
        let (t, ta, _) =
            argmin_thresholds(&[0.1], Some(&[0.05, 0.5, 0.7]), Exec::Parallel, |_, ta| {
                Ok(ta.unwrap())
            })
            .unwrap();
        assert_eq!((t, ta), (0.1, Some(0.5)));
    }
}
