//! Error-and-erasure decoding with two complementary test patterns.
//!
//! For each weight e1 of the first filling pattern, one pattern may be guaranteed to
//! decode to the transmitted word (region L, or its mirror R) and is handled by exact
//! counting; otherwise (region M) the two BDD runs are treated as independent.

use std::borrow::Cow;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::bdd::{bdd_cell, CorrectDecodeCheck};
use super::{AnchorWeights, DtpCell, DtpError, FormulaCtx, HalfInt, WeightValue};
use crate::code::{CodeSpec, EnumeratorMode, WeightEnumerator};
use crate::numerics::Prob;
use crate::par::Exec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    L,
    M,
    R,
}

/// How a table cell was obtained.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum CellKind {
    /// e = 0: plain BDD.
    Bdd,
    /// 2u + e < d_min: both test patterns land within reach of the transmitted word.
    Shortcut,
    /// Mixture over e1 with the region used for each e1.
    Regions(Vec<Region>),
    /// Erasure count above the decoder cap; declared failure.
    Capped,
}

impl CellKind {
    /// Compact label, e.g. `L2M3R2`.
    pub fn label(&self) -> String {
        match self {
            CellKind::Bdd => "bdd".into(),
            CellKind::Shortcut => "shortcut".into(),
            CellKind::Capped => "capped".into(),
            CellKind::Regions(rs) => {
                let count = |x: Region| rs.iter().filter(|&&r| r == x).count();
                format!(
                    "L{}M{}R{}",
                    count(Region::L),
                    count(Region::M),
                    count(Region::R)
                )
            }
        }
    }

    /// True when every e1 term is exact counting (no independence approximation).
    pub fn is_exact(&self) -> bool {
        match self {
            CellKind::Regions(rs) => rs.iter().all(|r| *r != Region::M),
            _ => true,
        }
    }
}

/// Table extents and decoder cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EaedParams {
    pub u_max: usize,
    pub e_max: usize,
    /// Erasure counts above this are declared failures by the decoder.
    pub erasure_cap: Option<usize>,
    pub check: CorrectDecodeCheck,
    #[serde(skip, default)]
    pub exec: Exec,
}

impl EaedParams {
    pub fn new(u_max: usize, e_max: usize) -> Self {
        EaedParams {
            u_max,
            e_max,
            erasure_cap: None,
            check: CorrectDecodeCheck::default(),
            exec: Exec::default(),
        }
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.erasure_cap = Some(cap);
        self
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn with_check(mut self, check: CorrectDecodeCheck) -> Self {
        self.check = check;
        self
    }
}

/// Outcome distribution per (u, e), for u = 0..=u_max and e = 0..=e_max.
#[derive(Debug, Clone)]
pub struct EaedDtp<P> {
    pub spec: CodeSpec,
    pub mode: EnumeratorMode,
    pub params: EaedParams,
    /// (1 - P_ca, 1 - P_wa) as f64 when anchors were applied (after folding shortening).
    pub anchors: Option<(f64, f64)>,
    pub cells: Vec<Vec<DtpCell<P>>>,
    pub kinds: Vec<Vec<CellKind>>,
}

impl<P: WeightValue> EaedDtp<P> {
    pub fn cell(&self, u: usize, e: usize) -> Option<&DtpCell<P>> {
        self.cells.get(u).and_then(|row| row.get(e))
    }

    pub fn kind(&self, u: usize, e: usize) -> Option<&CellKind> {
        self.kinds.get(u).and_then(|row| row.get(e))
    }

    /// Cell lookup that also answers beyond the table when the erasure cap decides the outcome.
    pub fn lookup(&self, u: usize, e: usize) -> Option<Cow<'_, DtpCell<P>>> {
        if let Some(c) = self.cell(u, e) {
            return Some(Cow::Borrowed(c));
        }
        match self.params.erasure_cap {
            Some(cap) if e > cap => Some(Cow::Owned(DtpCell::failure(HalfInt::failure(u, e)))),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> EaedDtp<f64> {
        EaedDtp {
            spec: self.spec,
            mode: self.mode,
            params: self.params,
            anchors: self.anchors,
            cells: self
                .cells
                .iter()
                .map(|row| row.iter().map(|c| c.to_f64()).collect())
                .collect(),
            kinds: self.kinds.clone(),
        }
    }
}

/// P(E1 = e1) = C(e, e1) / 2^e.
pub fn e1_distribution<P: Prob>(e: usize) -> Vec<P> {
    let denom = P::from_u64(2).powu(e as u32);
    (0..=e)
        .map(|e1| P::binom(e as i64, e1 as i64) / denom.clone())
        .collect()
}

pub fn classify_region(u: usize, e: usize, e1: usize, t: usize) -> Region {
    let (u, e, e1, t) = (u as i64, e as i64, e1 as i64, t as i64);
    if u > t {
        Region::M
    } else if e1 <= t - u {
        Region::L
    } else if e1 >= u + e - t {
        Region::R
    } else {
        Region::M
    }
}

/// Region-L counts of elementary events; exact integers when A is exact.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionCounts<P> {
    /// Candidate strictly closer than the transmitted word on non-erased positions.
    pub l11: BTreeMap<usize, P>,
    /// Candidate strictly farther.
    pub l12: BTreeMap<usize, P>,
    /// Tie.
    pub l13: BTreeMap<usize, P>,
    /// Second pattern decodes to nothing.
    pub l2: P,
    pub theta: P,
}

/// V = A_r C(r,a) C(n-r,b) C(n-r-b,lambda) C(b,gamma) C(r-a, e-e1-gamma) C(a, e1-lambda).
#[allow(clippy::too_many_arguments)]
pub fn v_count<P: WeightValue>(
    spec: &CodeSpec,
    a_w: &WeightEnumerator,
    r: i64,
    e: i64,
    e1: i64,
    a: i64,
    b: i64,
    lambda: i64,
    gamma: i64,
) -> P {
    let n = spec.parent_n() as i64;
    v_raw(n, P::weight(a_w, r), r, e, e1, a, b, lambda, gamma)
}

#[allow(clippy::too_many_arguments)]
#[inline]
pub(crate) fn v_raw<P: Prob>(
    n: i64,
    a_r: P,
    r: i64,
    e: i64,
    e1: i64,
    a: i64,
    b: i64,
    lambda: i64,
    gamma: i64,
) -> P {
    let e2 = e - e1;
    a_r * P::binom(r, a)
        * P::binom(n - r, b)
        * P::binom(n - r - b, lambda)
        * P::binom(b, gamma)
        * P::binom(r - a, e2 - gamma)
        * P::binom(a, e1 - lambda)
}

/// Visits every nonzero V of region L for (u, e, e1) with its comparison class.
///
/// The callback receives (r, a, b, lambda, gamma, V, ordering of lambda - gamma vs u + e1 - a - b).
pub(crate) fn for_each_v<P: WeightValue>(
    ctx: &FormulaCtx<'_>,
    u: i64,
    e: i64,
    e1: i64,
    mut f: impl FnMut(i64, i64, i64, i64, i64, P, std::cmp::Ordering),
) {
    let (n, t) = (ctx.n, ctx.t);
    let e2 = e - e1;
    for a in 0..=t {
        for b in 0..=t - a {
            let r = u + e2 + a - b;
            if r <= 0 || r > n || ctx.a.is_zero_at(r) {
                continue;
            }
            let a_r: P = ctx.weight(r);
            for lambda in 0..=e1 {
                for gamma in 0..=b {
                    let v = v_raw(n, a_r.clone(), r, e, e1, a, b, lambda, gamma);
                    if v.is_zero() {
                        continue;
                    }
                    let ord = (lambda - gamma).cmp(&(u + e1 - a - b));
                    f(r, a, b, lambda, gamma, v, ord);
                }
            }
        }
    }
}

pub(crate) fn theta<P: Prob>(n: i64, u: i64, e: i64, e1: i64) -> P {
    P::binom(n, u) * P::binom(n - u, e) * P::binom(e, e1)
}

/// Region-L counts for a filling weight e1 <= t - u (the first pattern decodes to 0).
pub fn region_l_counts<P: WeightValue>(
    spec: &CodeSpec,
    a: &WeightEnumerator,
    u: usize,
    e: usize,
    e1: usize,
) -> Result<RegionCounts<P>, DtpError> {
    let ctx = FormulaCtx::new(spec, a)?;
    Ok(region_l_counts_ctx(&ctx, u as i64, e as i64, e1 as i64))
}

pub(crate) fn region_l_counts_ctx<P: WeightValue>(
    ctx: &FormulaCtx<'_>,
    u: i64,
    e: i64,
    e1: i64,
) -> RegionCounts<P> {
    let mut l11: BTreeMap<usize, P> = BTreeMap::new();
    let mut l12: BTreeMap<usize, P> = BTreeMap::new();
    let mut l13: BTreeMap<usize, P> = BTreeMap::new();
    let mut total = P::zero();
    for_each_v(ctx, u, e, e1, |r, _, _, _, _, v: P, ord| {
        let target = match ord {
            std::cmp::Ordering::Less => &mut l11,
            std::cmp::Ordering::Greater => &mut l12,
            std::cmp::Ordering::Equal => &mut l13,
        };
        let slot = target.entry(r as usize).or_insert_with(P::zero);
        *slot = slot.clone() + v.clone();
        total = total.clone() + v;
    });
    let theta: P = theta(ctx.n, u, e, e1);
    RegionCounts {
        l11,
        l12,
        l13,
        l2: theta.clone() - total,
        theta,
    }
}

/// Region-L partial DTP: ties go half to each side; no failures.
pub fn region_l_dtp<P: Prob>(counts: &RegionCounts<P>, u: usize, e: usize) -> DtpCell<P> {
    let mut c = DtpCell::empty(HalfInt::failure(u, e));
    let th = counts.theta.clone();
    let sum = |m: &BTreeMap<usize, P>| m.values().fold(P::zero(), |acc, v| acc + v.clone());
    for (r, v) in &counts.l11 {
        c.add_mc(*r, v.clone() / th.clone());
    }
    for (r, v) in &counts.l13 {
        c.add_mc(*r, v.half() / th.clone());
    }
    c.succ = (counts.l2.clone() + sum(&counts.l12) + sum(&counts.l13).half()) / th;
    c
}

/// Region-M partial DTP from the single-pattern cells of the two test patterns.
///
/// Both runs are treated as independent; when both miscorrect, each candidate wins with 1/2.
pub(crate) fn region_m_combine<P: Prob>(
    c1: &DtpCell<P>,
    c2: &DtpCell<P>,
    u: usize,
    e: usize,
) -> DtpCell<P> {
    let mut c = DtpCell::empty(HalfInt::failure(u, e));
    let (m1, m2) = (c1.mc_total(), c2.mc_total());
    for (r, v) in &c1.mc {
        c.add_mc(*r, v.clone() * c2.fail.clone() + v.clone() * m2.half());
    }
    for (r, v) in &c2.mc {
        c.add_mc(*r, v.clone() * c1.fail.clone() + v.clone() * m1.half());
    }
    c.fail = c1.fail.clone() * c2.fail.clone();
    c
}

/// Region-M partial DTP using the BDD cells at u + e1 and u + e - e1.
pub fn region_m_dtp<P: WeightValue>(
    spec: &CodeSpec,
    a: &WeightEnumerator,
    u: usize,
    e: usize,
    e1: usize,
) -> Result<DtpCell<P>, DtpError> {
    let ctx = FormulaCtx::new(spec, a)?;
    let none = AnchorWeights::none();
    let c1 = bdd_cell(&ctx, (u + e1) as i64, &none, CorrectDecodeCheck::Strict);
    let c2 = bdd_cell(&ctx, (u + e - e1) as i64, &none, CorrectDecodeCheck::Strict);
    Ok(region_m_combine(&c1, &c2, u, e))
}

fn eaed_cell<P: WeightValue>(
    ctx: &FormulaCtx<'_>,
    bdd: &[DtpCell<P>],
    u: usize,
    e: usize,
    params: &EaedParams,
) -> (DtpCell<P>, CellKind) {
    let t = ctx.t as usize;
    if e == 0 {
        return (bdd[u].clone(), CellKind::Bdd);
    }
    if params.erasure_cap.is_some_and(|cap| e > cap) {
        return (DtpCell::failure(HalfInt::failure(u, e)), CellKind::Capped);
    }
    if ((2 * u + e) as i64) < ctx.d_min {
        return (DtpCell::success(HalfInt::failure(u, e)), CellKind::Shortcut);
    }
    let weights: Vec<P> = e1_distribution(e);
    let mut l_cache: BTreeMap<usize, DtpCell<P>> = BTreeMap::new();
    let mut cell = DtpCell::empty(HalfInt::failure(u, e));
    let mut regions = Vec::with_capacity(e + 1);
    for e1 in 0..=e {
        let region = classify_region(u, e, e1, t);
        regions.push(region);
        let part = match region {
            Region::L | Region::R => {
                let idx = if region == Region::L { e1 } else { e - e1 };
                l_cache
                    .entry(idx)
                    .or_insert_with(|| {
                        let counts = region_l_counts_ctx(ctx, u as i64, e as i64, idx as i64);
                        region_l_dtp(&counts, u, e)
                    })
                    .clone()
            }
            Region::M => region_m_combine(&bdd[u + e1], &bdd[u + e - e1], u, e),
        };
        cell.accumulate(&weights[e1], &part);
    }
    (cell, CellKind::Regions(regions))
}

/// Assembles a table from a per-cell function, in parallel over cells.
pub(crate) fn assemble<P: WeightValue>(
    spec: &CodeSpec,
    a: &WeightEnumerator,
    params: &EaedParams,
    anchors: Option<(f64, f64)>,
    f: impl Fn(usize, usize) -> (DtpCell<P>, CellKind) + Sync + Send,
) -> Result<EaedDtp<P>, DtpError> {
    let cols = params.e_max + 1;
    let flat = params
        .exec
        .map((params.u_max + 1) * cols, |i| f(i / cols, i % cols));
    let mut cells = vec![Vec::with_capacity(cols); params.u_max + 1];
    let mut kinds = vec![Vec::with_capacity(cols); params.u_max + 1];
    for (i, (c, k)) in flat.into_iter().enumerate() {
        if !c.to_f64().is_finite() {
            return Err(DtpError::NonFinite {
                u: i / cols,
                e: i % cols,
            });
        }
        cells[i / cols].push(c);
        kinds[i / cols].push(k);
    }
    Ok(EaedDtp {
        spec: *spec,
        mode: a.mode(),
        params: *params,
        anchors,
        cells,
        kinds,
    })
}

pub(crate) fn check_extent(spec: &CodeSpec, params: &EaedParams) -> Result<(), DtpError> {
    if params.u_max + params.e_max > spec.n {
        return Err(DtpError::Range(format!(
            "u_max + e_max = {} exceeds n = {}",
            params.u_max + params.e_max,
            spec.n
        )));
    }
    Ok(())
}

/// EaED transition probabilities over the (u, e) grid of `params`.
///
/// Shortened codes are evaluated through the anchored variant with the shortened
/// positions as correct anchors.
pub fn eaed_dtp<P: WeightValue>(
    spec: &CodeSpec,
    a: &WeightEnumerator,
    params: &EaedParams,
) -> Result<EaedDtp<P>, DtpError> {
    if spec.is_shortened() {
        return super::eaed_a::eaed_a_dtp(spec, a, &AnchorWeights::none(), params);
    }
    let ctx = FormulaCtx::new(spec, a)?;
    check_extent(spec, params)?;
    let none = AnchorWeights::none();
    let top = params.u_max + params.e_max;
    let bdd: Vec<DtpCell<P>> = params
        .exec
        .map(top + 1, |u| bdd_cell(&ctx, u as i64, &none, params.check));
    assemble(spec, a, params, None, |u, e| {
        eaed_cell(&ctx, &bdd, u, e, params)
    })
}
