//! EaED with anchor-based miscorrection detection.
//!
//! Every candidate produced by a BDD run is vetoed when it flips an anchor bit.
//! A candidate flipping a correct and b erroneous non-erased bits survives with
//! (1 - P_ca)^a (1 - P_wa)^b; the transmitted word survives with P_0 = (1 - P_wa)^u.

use std::collections::BTreeMap;

use super::bdd::bdd_cell;
use super::eaed::{
    assemble, check_extent, classify_region, e1_distribution, for_each_v, region_m_combine, theta,
    CellKind, EaedDtp, EaedParams, Region,
};
use super::{AnchorWeights, DtpCell, DtpError, FormulaCtx, HalfInt, WeightValue};
use crate::code::{CodeSpec, WeightEnumerator};

/// Outcome of decoding the single test pattern that has e1 of the e erasures filled with ones.
///
/// Success is never credited here; the caller combines it with the other pattern.
pub fn single_pattern_anchored_dtp<P: WeightValue>(
    spec: &CodeSpec,
    a: &WeightEnumerator,
    u: usize,
    e: usize,
    e1: usize,
    anchors: &AnchorWeights<P>,
) -> Result<DtpCell<P>, DtpError> {
    let ctx = FormulaCtx::new(spec, a)?;
    Ok(single_pattern_ctx(
        &ctx, u as i64, e as i64, e1 as i64, anchors,
    ))
}

pub(crate) fn single_pattern_ctx<P: WeightValue>(
    ctx: &FormulaCtx<'_>,
    u: i64,
    e: i64,
    e1: i64,
    w: &AnchorWeights<P>,
) -> DtpCell<P> {
    let (n, t) = (ctx.n, ctx.t);
    let mut c = DtpCell::empty(HalfInt::failure(u as usize, e as usize));
    let th: P = theta(n, u, e, e1);
    for a in 0..=t {
        for b in 0..=t - a {
            let r = u + e1 + a - b;
            if r <= 0 || r > n || ctx.a.is_zero_at(r) {
                continue;
            }
            let base = ctx.weight::<P>(r) * P::binom(r, a) * P::binom(n - r, b);
            let mut s = P::zero();
            // n_ca of the a cleared ones and n_wa of the b set zeros sit on non-erased positions.
            for n_ca in 0..=a {
                for n_wa in 0..=b {
                    let cc = e1 - (b - n_wa);
                    let d = e - e1 - (a - n_ca);
                    let v = P::binom(b, n_wa)
                        * P::binom(a, n_ca)
                        * P::binom(r - a, cc)
                        * P::binom(n - r - b, d);
                    if v.is_zero() {
                        continue;
                    }
                    s = s + v * w.keep(n_ca as u32, n_wa as u32);
                }
            }
            if !s.is_zero() {
                c.add_mc(r as usize, base * s / th.clone());
            }
        }
    }
    c.fail = P::one() - c.mc_total();
    c
}

/// Region-L partial DTP with anchors: pattern 1 decodes to 0, accepted with P_0;
/// pattern 2's candidate is accepted with P_c.
pub fn region_l_anchored_dtp<P: WeightValue>(
    spec: &CodeSpec,
    a: &WeightEnumerator,
    u: usize,
    e: usize,
    e1: usize,
    anchors: &AnchorWeights<P>,
) -> Result<DtpCell<P>, DtpError> {
    let ctx = FormulaCtx::new(spec, a)?;
    Ok(region_l_anchored_ctx(
        &ctx, u as i64, e as i64, e1 as i64, anchors,
    ))
}

pub(crate) fn region_l_anchored_ctx<P: WeightValue>(
    ctx: &FormulaCtx<'_>,
    u: i64,
    e: i64,
    e1: i64,
    w: &AnchorWeights<P>,
) -> DtpCell<P> {
    use std::cmp::Ordering::*;
    let p0 = w.keep_wrong.powu(u as u32);
    let q0 = P::one() - p0.clone();
    let mut l11: BTreeMap<usize, P> = BTreeMap::new();
    let mut l13: BTreeMap<usize, P> = BTreeMap::new();
    let mut l12 = P::zero();
    let mut l_fail = P::zero();
    let mut total = P::zero();
    for_each_v(ctx, u, e, e1, |r, a, b, lambda, gamma, v: P, ord| {
        let pc = w.keep((a - (e1 - lambda)) as u32, (b - gamma) as u32);
        let qc = P::one() - pc.clone();
        let (mc, succ, tie) = match ord {
            Less => (
                v.clone() * pc.clone(),
                v.clone() * p0.clone() * qc.clone(),
                P::zero(),
            ),
            Greater => (
                v.clone() * q0.clone() * pc.clone(),
                v.clone() * p0.clone(),
                P::zero(),
            ),
            Equal => (
                v.clone() * q0.clone() * pc.clone(),
                v.clone() * p0.clone() * qc.clone(),
                v.clone() * p0.clone() * pc.clone(),
            ),
        };
        let slot = l11.entry(r as usize).or_insert_with(P::zero);
        *slot = slot.clone() + mc;
        if !tie.is_zero() {
            let slot = l13.entry(r as usize).or_insert_with(P::zero);
            *slot = slot.clone() + tie;
        }
        l12 = l12.clone() + succ;
        l_fail = l_fail.clone() + v.clone() * qc * q0.clone();
        total = total.clone() + v;
    });
    let th: P = theta(ctx.n, u, e, e1);
    let l2 = th.clone() - total;
    let mut c = DtpCell::empty(HalfInt::failure(u as usize, e as usize));
    for (r, v) in &l11 {
        c.add_mc(*r, v.clone() / th.clone());
    }
    let mut tie_total = P::zero();
    for (r, v) in &l13 {
        c.add_mc(*r, v.half() / th.clone());
        tie_total = tie_total + v.clone();
    }
    c.succ = (l2.clone() * p0 + l12 + tie_total.half()) / th.clone();
    c.fail = (l_fail + l2 * q0) / th;
    c
}

fn eaed_a_cell<P: WeightValue>(
    ctx: &FormulaCtx<'_>,
    u: usize,
    e: usize,
    w: &AnchorWeights<P>,
    params: &EaedParams,
) -> (DtpCell<P>, CellKind) {
    let (t, d_min) = (ctx.t as usize, ctx.d_min as usize);
    let residual = HalfInt::failure(u, e);
    if e == 0 {
        return (bdd_cell(ctx, u as i64, w, params.check), CellKind::Bdd);
    }
    if params.erasure_cap.is_some_and(|cap| e > cap) {
        return (DtpCell::failure(residual), CellKind::Capped);
    }
    let p0 = w.keep_wrong.powu(u as u32);
    let weights: Vec<P> = e1_distribution(e);
    let mut cell = DtpCell::empty(residual);
    let shortcut = 2 * u + e < d_min;
    let mut regions = Vec::with_capacity(e + 1);
    let mut l_cache: BTreeMap<usize, DtpCell<P>> = BTreeMap::new();
    for e1 in 0..=e {
        let e2 = e - e1;
        let part = if shortcut {
            let reach = d_min - t;
            if (u + e1 <= t && u + e2 < reach) || (u + e1 < reach && u + e2 <= t) {
                // Both patterns decode to the transmitted word.
                let mut c = DtpCell::empty(residual);
                c.succ = p0.clone();
                c.fail = P::one() - p0.clone();
                c
            } else {
                // One pattern decodes to 0; the other may miscorrect if 0 is vetoed.
                let other = if u + e1 <= t { e2 } else { e1 };
                let s = single_pattern_ctx(ctx, u as i64, e as i64, other as i64, w);
                let q0 = P::one() - p0.clone();
                let mut c = DtpCell::empty(residual);
                for (r, v) in &s.mc {
                    c.add_mc(*r, q0.clone() * v.clone());
                }
                c.succ = p0.clone();
                c.fail = q0 - c.mc_total();
                c
            }
        } else {
            let region = classify_region(u, e, e1, t);
            regions.push(region);
            match region {
                Region::L | Region::R => {
                    let idx = if region == Region::L { e1 } else { e2 };
                    l_cache
                        .entry(idx)
                        .or_insert_with(|| {
                            region_l_anchored_ctx(ctx, u as i64, e as i64, idx as i64, w)
                        })
                        .clone()
                }
                Region::M => {
                    let c1 = single_pattern_ctx(ctx, u as i64, e as i64, e1 as i64, w);
                    let c2 = single_pattern_ctx(ctx, u as i64, e as i64, e2 as i64, w);
                    region_m_combine(&c1, &c2, u, e)
                }
            }
        };
        cell.accumulate(&weights[e1], &part);
    }
    let kind = if shortcut {
        CellKind::Shortcut
    } else {
        CellKind::Regions(regions)
    };
    (cell, kind)
}

/// EaED^a transition probabilities; shortened positions are folded in as correct anchors.
pub fn eaed_a_dtp<P: WeightValue>(
    spec: &CodeSpec,
    a: &WeightEnumerator,
    anchors: &AnchorWeights<P>,
    params: &EaedParams,
) -> Result<EaedDtp<P>, DtpError> {
    let ctx = FormulaCtx::new(spec, a)?;
    check_extent(spec, params)?;
    let w = anchors.clone().fold_shortening(spec);
    let tag = Some((w.keep_correct.to_f64(), w.keep_wrong.to_f64()));
    assemble(spec, a, params, tag, |u, e| {
        eaed_a_cell(&ctx, u, e, &w, params)
    })
}

#[cfg(test)]
mod tests {
    use super::super::eaed::eaed_dtp;
    use super::*;
    use num_rational::BigRational;
    use num_traits::One;

    fn code(n: usize, k: usize, d: usize) -> (CodeSpec, WeightEnumerator) {
        (
            CodeSpec::new(n, k, d).unwrap(),
            WeightEnumerator::bundled(n, k).unwrap(),
        )
    }

    #[test]
    fn no_anchors_equals_eaed_exactly() {
        let (s, a) = code(15, 7, 5);
        let p = EaedParams::new(5, 6);
        let x: EaedDtp<BigRational> = eaed_a_dtp(&s, &a, &AnchorWeights::none(), &p).unwrap();
        let y: EaedDtp<BigRational> = eaed_dtp(&s, &a, &p).unwrap();
        assert_eq!(x.cells, y.cells);
    }

    #[test]
    fn single_pattern_without_anchors_is_bdd() {
        let (s, a) = code(15, 7, 5);
        let ctx = FormulaCtx::new(&s, &a).unwrap();
        let none = AnchorWeights::<BigRational>::none();
        for (u, e, e1) in [(2, 2, 1), (1, 4, 3), (3, 1, 0), (0, 6, 4)] {
            let sp = single_pattern_ctx(&ctx, u, e, e1, &none);
            let b = bdd_cell(
                &ctx,
                u + e1,
                &none,
                super::super::CorrectDecodeCheck::Strict,
            );
            assert_eq!(sp.mc, b.mc, "{u} {e} {e1}");
        }
    }

    #[test]
    fn full_veto_removes_miscorrections() {
        let (s, a) = code(15, 7, 5);
        let all = AnchorWeights {
            keep_correct: 0.0,
            keep_wrong: 0.0,
        };
        let ctx = FormulaCtx::new(&s, &a).unwrap();
        // Only candidates whose flips all fall on filled erasures survive.
        let sp = single_pattern_ctx(&ctx, 2, 2, 1, &all);
        let total = sp.mc_total();
        assert!(total > 0.0 || sp.mc.is_empty());
        let x: EaedDtp<f64> = eaed_a_dtp(&s, &a, &all, &EaedParams::new(4, 0)).unwrap();
        for u in 0..=4 {
            assert_eq!(x.cell(u, 0).unwrap().mc_total(), 0.0);
        }
    }

    #[test]
    fn case_211_success_is_p0() {
        let (s, a) = code(255, 239, 5);
        let w = AnchorWeights {
            keep_correct: 0.3,
            keep_wrong: 0.9,
        };
        let x: EaedDtp<f64> = eaed_a_dtp(&s, &a, &w, &EaedParams::new(2, 2)).unwrap();
        // u=1, e=1: both patterns decode back to the transmitted word
        let c = x.cell(1, 1).unwrap();
        assert!((c.succ - 0.9).abs() < 1e-15);
        assert!((c.fail - 0.1).abs() < 1e-15);
        let m = x.cell(1, 2).unwrap();
        assert!(m.mc_total() > 0.0);
        assert_eq!(c.mc_total(), 0.0);
    }

    #[test]
    fn anchored_cells_normalized() {
        let (s, a) = code(15, 7, 5);
        let half = BigRational::new(1.into(), 2.into());
        let w = AnchorWeights::from_rationals(&BigRational::new(3.into(), 10.into()), &half);
        let x: EaedDtp<BigRational> = eaed_a_dtp(&s, &a, &w, &EaedParams::new(5, 6)).unwrap();
        for row in &x.cells {
            for c in row {
                assert!(c.total().is_one());
            }
        }
    }
}
