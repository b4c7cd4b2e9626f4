//! Exhaustive decoding oracle for short codes.
//!
//! Every error placement, erasure placement and filling is decoded with the
//! deterministic core of the executable decoder. Both candidates are kept, so
//! ties contribute 1/2 to each side and anchor vetoes enter as exact weights.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::bch::BchCode;
use super::SimError;
use crate::code::EnumeratorMode;
use crate::dtp::{classify_region, AnchorWeights, CellKind, DtpCell, EaedDtp, EaedParams, HalfInt};
use crate::numerics::Prob;
use crate::par::Exec;

/// Largest C(n,u) C(n-u,e) 2^e enumerated per cell.
pub const ORACLE_CAP: u128 = 100_000_000;

/// How anchor vetoes of the two candidates relate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnchorModel {
    /// Each candidate is vetoed independently, as in the closed-form tables.
    #[default]
    IndependentCandidates,
    /// Anchors are per position, so candidates flipping the same bit share the veto.
    SharedPositions,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Cand {
    r: u32,
    /// Flipped correct, non-erased bits.
    a: u32,
    /// Flipped erroneous, non-erased bits.
    b: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Key {
    e1: u32,
    c1: Option<Cand>,
    c2: Option<Cand>,
    ord: Ordering,
    a12: u32,
    b12: u32,
}

/// Exact cell plus its per-filling-weight conditionals.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleCell<P> {
    pub u: usize,
    pub e: usize,
    pub total: DtpCell<P>,
    /// P(outcome, r | u, e, E1 = e1).
    pub by_e1: Vec<DtpCell<P>>,
}

#[derive(Debug, Clone)]
pub struct BruteForceDtp {
    pub dtp: EaedDtp<BigRational>,
    pub by_e1: Vec<Vec<Vec<DtpCell<BigRational>>>>,
}

fn binom_u128(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Calls `f` for every k-subset of the set bits of `free`.
fn for_each_subset(free: u64, k: usize, mut f: impl FnMut(u64)) {
    let pos: Vec<u32> = (0..64).filter(|i| free >> i & 1 == 1).collect();
    let m = pos.len();
    if k > m {
        return;
    }
    if k == 0 {
        f(0);
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(idx.iter().fold(0u64, |acc, &i| acc | 1 << pos[i]));
        let mut j = k;
        while j > 0 && idx[j - 1] == m - k + j - 1 {
            j -= 1;
        }
        if j == 0 {
            return;
        }
        idx[j - 1] += 1;
        for i in j..k {
            idx[i] = idx[i - 1] + 1;
        }
    }
}

fn count_patterns(code: &BchCode, u: usize, e: usize, exec: Exec) -> BTreeMap<Key, u64> {
    let n = code.n();
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut errs = Vec::new();
    for_each_subset(full, u, |m| errs.push(m));
    let partial = exec.map(errs.len(), |i| {
        let err = errs[i];
        let mut local: HashMap<Key, u64> = HashMap::new();
        for_each_subset(full & !err, e, |x| {
            let mut fill = x;
            loop {
                let y1 = err | fill;
                let y2 = err | (x & !fill);
                let cand = |w: Option<u64>| {
                    w.map(|c| {
                        let d = (c ^ err) & !x;
                        (
                            Cand {
                                r: c.count_ones(),
                                a: (d & !err).count_ones(),
                                b: (d & err).count_ones(),
                            },
                            d,
                        )
                    })
                };
                let k1 = cand(code.bdd_mask(y1));
                let k2 = cand(code.bdd_mask(y2));
                let (ord, a12, b12) = match (&k1, &k2) {
                    (Some((c1, d1)), Some((c2, d2))) => {
                        let both = d1 & d2;
                        (
                            (c1.a + c1.b).cmp(&(c2.a + c2.b)),
                            (both & !err).count_ones(),
                            (both & err).count_ones(),
                        )
                    }
                    _ => (Ordering::Equal, 0, 0),
                };
                let key = Key {
                    e1: fill.count_ones(),
                    c1: k1.map(|k| k.0),
                    c2: k2.map(|k| k.0),
                    ord,
                    a12,
                    b12,
                };
                *local.entry(key).or_insert(0) += 1;
                if fill == 0 {
                    break;
                }
                fill = (fill - 1) & x;
            }
        });
        local
    });
    let mut out = BTreeMap::new();
    for m in partial {
        for (k, v) in m {
            *out.entry(k).or_insert(0) += v;
        }
    }
    out
}

fn place<P: Prob>(cell: &mut DtpCell<P>, c: &Cand, p: P) {
    if p.is_zero() {
        return;
    }
    if c.r == 0 {
        cell.succ = cell.succ.clone() + p;
    } else {
        cell.add_mc(c.r as usize, p);
    }
}

/// Exact (u, e) cell by exhaustive enumeration; `anchors` adds the veto step.
pub fn brute_force_cell<P: Prob>(
    code: &BchCode,
    u: usize,
    e: usize,
    anchors: Option<(&AnchorWeights<P>, AnchorModel)>,
) -> Result<OracleCell<P>, SimError> {
    let n = code.n();
    if code.spec.is_shortened() || n > 64 {
        return Err(SimError::Config(
            "the oracle needs an unshortened code with n <= 64".into(),
        ));
    }
    if u + e > n {
        return Err(SimError::Config(format!(
            "u + e = {} exceeds n = {n}",
            u + e
        )));
    }
    let size = binom_u128(n, u) * binom_u128(n - u, e) << e;
    if size > ORACLE_CAP {
        return Err(SimError::OracleCap { u, e, size });
    }
    let counts = count_patterns(code, u, e, Exec::default());
    let residual = HalfInt::failure(u, e);
    let mut by_e1: Vec<DtpCell<P>> = (0..=e).map(|_| DtpCell::empty(residual)).collect();
    let keep = |c: &Cand| match anchors {
        Some((w, _)) => w.keep(c.a, c.b),
        None => P::one(),
    };
    for (k, &cnt) in &counts {
        let cnt = P::from_u64(cnt);
        let cell = &mut by_e1[k.e1 as usize];
        let acc1 = k.c1.as_ref().map_or(P::zero(), keep);
        let acc2 = k.c2.as_ref().map_or(P::zero(), keep);
        let both = match (&k.c1, &k.c2, anchors) {
            (Some(c1), Some(c2), Some((w, AnchorModel::SharedPositions))) => {
                w.keep(c1.a + c2.a - k.a12, c1.b + c2.b - k.b12)
            }
            (Some(_), Some(_), _) => acc1.clone() * acc2.clone(),
            _ => P::zero(),
        };
        let only1 = acc1.clone() - both.clone();
        let only2 = acc2.clone() - both.clone();
        let none = P::one() - acc1 - acc2 + both.clone();
        if let Some(c1) = &k.c1 {
            place(cell, c1, cnt.clone() * only1);
        }
        if let Some(c2) = &k.c2 {
            place(cell, c2, cnt.clone() * only2);
        }
        if let (Some(c1), Some(c2)) = (&k.c1, &k.c2) {
            let both = cnt.clone() * both;
            match k.ord {
                Ordering::Less => place(cell, c1, both),
                Ordering::Greater => place(cell, c2, both),
                Ordering::Equal => {
                    place(cell, c1, both.half());
                    place(cell, c2, both.half());
                }
            }
        }
        cell.fail = cell.fail.clone() + cnt * none;
    }
    let base = P::binom(n as i64, u as i64) * P::binom((n - u) as i64, e as i64);
    let mut total = DtpCell::empty(residual);
    let two_e = P::from_u64(2).powu(e as u32);
    for (e1, c) in by_e1.iter_mut().enumerate() {
        let raw = std::mem::replace(c, DtpCell::empty(residual));
        total.accumulate(&(P::one() / two_e.clone() / base.clone()), &raw);
        let w = P::one() / (base.clone() * P::binom(e as i64, e1 as i64));
        c.accumulate(&w, &raw);
    }
    Ok(OracleCell { u, e, total, by_e1 })
}

/// Exact table for u = 0..=u_max, e = 0..=e_max.
pub fn brute_force_dtp(
    code: &BchCode,
    u_max: usize,
    e_max: usize,
    anchors: Option<(&AnchorWeights<BigRational>, AnchorModel)>,
) -> Result<BruteForceDtp, SimError> {
    let (t, d_min) = (code.spec.t, code.spec.d_min);
    let mut cells = Vec::new();
    let mut kinds = Vec::new();
    let mut by_e1 = Vec::new();
    for u in 0..=u_max {
        let (mut row, mut krow, mut brow) = (Vec::new(), Vec::new(), Vec::new());
        for e in 0..=e_max {
            let c = brute_force_cell(code, u, e, anchors)?;
            row.push(c.total);
            brow.push(c.by_e1);
            krow.push(if e == 0 {
                CellKind::Bdd
            } else if 2 * u + e < d_min {
                CellKind::Shortcut
            } else {
                CellKind::Regions((0..=e).map(|e1| classify_region(u, e, e1, t)).collect())
            });
        }
        cells.push(row);
        kinds.push(krow);
        by_e1.push(brow);
    }
    let dtp = EaedDtp {
        spec: code.spec,
        mode: EnumeratorMode::Exact,
        params: EaedParams::new(u_max, e_max),
        anchors: anchors.map(|(w, _)| (w.keep_correct.to_f64(), w.keep_wrong.to_f64())),
        cells,
        kinds,
    };
    Ok(BruteForceDtp { dtp, by_e1 })
}

/// Sphere-decoding reference: the codeword within distance t of y, if any.
pub fn nearest_in_sphere(codewords: &[u64], y: u64, t: usize) -> Option<u64> {
    codewords
        .iter()
        .copied()
        .find(|c| ((c ^ y).count_ones() as usize) <= t)
}
