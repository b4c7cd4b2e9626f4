//! Bounded-distance decoding, with and without anchor-based miscorrection detection.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{AnchorWeights, DtpCell, DtpError, FormulaCtx, HalfInt, WeightValue};
use crate::code::{CodeSpec, EnumeratorMode, WeightEnumerator};
use crate::par::Exec;

/// Whether a correct decoding can itself be vetoed by anchors.
///
/// A correct decoding flips the u erroneous bits; each is a (wrong) anchor with
/// probability P_wa, so it survives with probability (1 - P_wa)^u.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorrectDecodeCheck {
    #[default]
    AnchorChecked,
    /// Correct decodings always pass the anchor check.
    Strict,
}

/// Per-u outcome distribution of BDD (or BDD^a).
#[derive(Debug, Clone)]
pub struct BddDtp<P> {
    pub spec: CodeSpec,
    pub mode: EnumeratorMode,
    pub u_max: usize,
    pub anchored: bool,
    pub check: CorrectDecodeCheck,
    pub cells: Vec<DtpCell<P>>,
}

impl<P: WeightValue> BddDtp<P> {
    pub fn cell(&self, u: usize) -> Option<&DtpCell<P>> {
        self.cells.get(u)
    }

    /// P(R = r | u) with the outcomes merged.
    pub fn combined(&self, u: usize) -> Option<BTreeMap<HalfInt, P>> {
        self.cell(u).map(|c| c.combined())
    }

    pub fn to_f64(&self) -> BddDtp<f64> {
        BddDtp {
            spec: self.spec,
            mode: self.mode,
            u_max: self.u_max,
            anchored: self.anchored,
            check: self.check,
            cells: self.cells.iter().map(|c| c.to_f64()).collect(),
        }
    }
}

/// Cell of BDD^a at input weight u (plain BDD when the weights are all one).
pub(crate) fn bdd_cell<P: WeightValue>(
    ctx: &FormulaCtx<'_>,
    u: i64,
    w: &AnchorWeights<P>,
    check: CorrectDecodeCheck,
) -> DtpCell<P> {
    let fail_residual = HalfInt::from_int(u as usize);
    if u <= ctx.t {
        let p0 = match check {
            CorrectDecodeCheck::AnchorChecked => w.keep_wrong.powu(u as u32),
            CorrectDecodeCheck::Strict => P::one(),
        };
        let mut c = DtpCell::empty(fail_residual);
        c.fail = P::one() - p0.clone();
        c.succ = p0;
        return c;
    }
    let mut c = DtpCell::empty(fail_residual);
    let denom = P::binom(ctx.n, u);
    let (n, t) = (ctx.n, ctx.t);
    for a in 0..=t {
        for b in 0..=t - a {
            let r = u + a - b;
            if r <= 0 || r > n || ctx.a.is_zero_at(r) {
                continue;
            }
            let count = ctx.weight::<P>(r) * P::binom(r, a) * P::binom(n - r, b);
            if count.is_zero() {
                continue;
            }
            c.add_mc(
                r as usize,
                count * w.keep(a as u32, b as u32) / denom.clone(),
            );
        }
    }
    c.fail = P::one() - c.mc_total();
    c
}

fn build<P: WeightValue>(
    spec: &CodeSpec,
    a: &WeightEnumerator,
    w: AnchorWeights<P>,
    u_max: usize,
    check: CorrectDecodeCheck,
    anchored: bool,
) -> Result<BddDtp<P>, DtpError> {
    let ctx = FormulaCtx::new(spec, a)?;
    if u_max > spec.n {
        return Err(DtpError::Range(format!(
            "u_max = {u_max} exceeds n = {}",
            spec.n
        )));
    }
    let w = w.fold_shortening(spec);
    let cells = Exec::default().map(u_max + 1, |u| bdd_cell(&ctx, u as i64, &w, check));
    Ok(BddDtp {
        spec: *spec,
        mode: a.mode(),
        u_max,
        anchored: anchored || spec.is_shortened(),
        check,
        cells,
    })
}

/// BDD transition probabilities for u = 0..=u_max.
///
/// Shortened positions of a shortened code act as correct anchors.
pub fn bdd_dtp<P: WeightValue>(
    spec: &CodeSpec,
    a: &WeightEnumerator,
    u_max: usize,
) -> Result<BddDtp<P>, DtpError> {
    build(
        spec,
        a,
        AnchorWeights::none(),
        u_max,
        CorrectDecodeCheck::AnchorChecked,
        false,
    )
}

/// BDD^a: miscorrections touching anchors are turned into failures.
pub fn bdd_a_dtp<P: WeightValue>(
    spec: &CodeSpec,
    a: &WeightEnumerator,
    anchors: &AnchorWeights<P>,
    u_max: usize,
    check: CorrectDecodeCheck,
) -> Result<BddDtp<P>, DtpError> {
    build(spec, a, anchors.clone(), u_max, check, true)
}
