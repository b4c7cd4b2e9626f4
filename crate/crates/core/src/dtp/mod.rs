//! Decoding transition probabilities: P(outcome, R = r | U = u, E = e).

mod bdd;
mod eaed;
mod eaed_a;

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::AnchorProbs;
use crate::code::{CodeError, CodeSpec, WeightEnumerator};
use crate::numerics::{NeumaierSum, Prob};

pub use bdd::{bdd_a_dtp, bdd_dtp, BddDtp, CorrectDecodeCheck};
pub use eaed::{
    classify_region, e1_distribution, eaed_dtp, region_l_counts, region_l_dtp, region_m_dtp,
    v_count, CellKind, EaedDtp, EaedParams, Region, RegionCounts,
};
pub use eaed_a::{eaed_a_dtp, region_l_anchored_dtp, single_pattern_anchored_dtp};

#[derive(Debug, Error)]
pub enum DtpError {
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error("table parameter out of range: {0}")]
    Range(String),
    #[error("non-finite probability in cell (u={u}, e={e})")]
    NonFinite { u: usize, e: usize },
}

/// Residual error count in units of half a bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HalfInt(pub u32);

impl HalfInt {
    pub fn from_int(r: usize) -> Self {
        HalfInt(2 * r as u32)
    }

    /// u + e/2, the residual of an unresolved failure.
    pub fn failure(u: usize, e: usize) -> Self {
        HalfInt((2 * u + e) as u32)
    }

    pub fn twice(self) -> u32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}.5", self.0 / 2)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Succ,
    Fail,
    Mc,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Succ => "succ",
            Outcome::Fail => "fail",
            Outcome::Mc => "mc",
        })
    }
}

/// Outcome distribution of one (u, e) cell.
///
/// Success has residual 0, failure has `fail_residual`, and each miscorrection
/// to a codeword of weight r leaves r residual errors.
#[derive(Debug, Clone, PartialEq)]
pub struct DtpCell<P> {
    pub succ: P,
    pub fail: P,
    pub fail_residual: HalfInt,
    pub mc: BTreeMap<usize, P>,
}

impl<P: Prob> DtpCell<P> {
    pub fn empty(fail_residual: HalfInt) -> Self {
        DtpCell {
            succ: P::zero(),
            fail: P::zero(),
            fail_residual,
            mc: BTreeMap::new(),
        }
    }

    pub fn success(fail_residual: HalfInt) -> Self {
        DtpCell {
            succ: P::one(),
            ..Self::empty(fail_residual)
        }
    }

    pub fn failure(fail_residual: HalfInt) -> Self {
        DtpCell {
            fail: P::one(),
            ..Self::empty(fail_residual)
        }
    }

    pub fn mc_total(&self) -> P {
        self.mc.values().fold(P::zero(), |acc, v| acc + v.clone())
    }

    pub fn total(&self) -> P {
        self.succ.clone() + self.fail.clone() + self.mc_total()
    }

    pub fn add_mc(&mut self, r: usize, p: P) {
        if p.is_zero() {
            return;
        }
        let slot = self.mc.entry(r).or_insert_with(P::zero);
        *slot = slot.clone() + p;
    }

    /// self += w * other, in ascending r order.
    pub fn accumulate(&mut self, w: &P, other: &DtpCell<P>) {
        self.succ = self.succ.clone() + w.clone() * other.succ.clone();
        self.fail = self.fail.clone() + w.clone() * other.fail.clone();
        for (r, p) in &other.mc {
            self.add_mc(*r, w.clone() * p.clone());
        }
    }

    /// Rows (outcome, residual, probability) in a fixed order, zero entries dropped.
    pub fn entries(&self) -> Vec<(Outcome, HalfInt, P)> {
        let mut out = Vec::new();
        if !self.succ.is_zero() {
            out.push((Outcome::Succ, HalfInt(0), self.succ.clone()));
        }
        if !self.fail.is_zero() {
            out.push((Outcome::Fail, self.fail_residual, self.fail.clone()));
        }
        for (r, p) in &self.mc {
            if !p.is_zero() {
                out.push((Outcome::Mc, HalfInt::from_int(*r), p.clone()));
            }
        }
        out
    }

    /// Residual distribution with outcomes merged, as in a single P(r | u, e).
    pub fn combined(&self) -> BTreeMap<HalfInt, P> {
        let mut m: BTreeMap<HalfInt, P> = BTreeMap::new();
        for (_, r, p) in self.entries() {
            let slot = m.entry(r).or_insert_with(P::zero);
            *slot = slot.clone() + p;
        }
        m
    }

    pub fn to_f64(&self) -> DtpCell<f64> {
        DtpCell {
            succ: self.succ.to_f64(),
            fail: self.fail.to_f64(),
            fail_residual: self.fail_residual,
            mc: self.mc.iter().map(|(r, p)| (*r, p.to_f64())).collect(),
        }
    }
}

impl DtpCell<f64> {
    /// E[R] with failures at their half-integer residual.
    pub fn expected_residual(&self) -> f64 {
        let mut s = NeumaierSum::new();
        s.add(self.fail * self.fail_residual.value());
        for (r, p) in &self.mc {
            s.add(*r as f64 * p);
        }
        s.value()
    }

    /// E[R; outcome = mc].
    pub fn mc_residual(&self) -> f64 {
        let mut s = NeumaierSum::new();
        for (r, p) in &self.mc {
            s.add(*r as f64 * p);
        }
        s.value()
    }

    /// P(R > 0).
    pub fn frame_error(&self) -> f64 {
        let mut s = NeumaierSum::new();
        if self.fail_residual.0 > 0 {
            s.add(self.fail);
        }
        for (r, p) in &self.mc {
            if *r > 0 {
                s.add(*p);
            }
        }
        s.value()
    }

    pub fn is_finite(&self) -> bool {
        self.succ.is_finite() && self.fail.is_finite() && self.mc.values().all(|p| p.is_finite())
    }
}

/// Rejection-free probabilities (1 - P_ca, 1 - P_wa) in the arithmetic of the table.
#[derive(Debug, Clone, PartialEq)]
pub struct AnchorWeights<P> {
    /// Probability that a flip of a correct bit is not vetoed by an anchor.
    pub keep_correct: P,
    /// Probability that a flip of an erroneous bit is not vetoed by an anchor.
    pub keep_wrong: P,
}

impl<P: Prob> AnchorWeights<P> {
    pub fn none() -> Self {
        AnchorWeights {
            keep_correct: P::one(),
            keep_wrong: P::one(),
        }
    }

    /// (1-P_ca)^a (1-P_wa)^b for a candidate flipping a correct and b erroneous bits.
    pub fn keep(&self, a: u32, b: u32) -> P {
        self.keep_correct.powu(a) * self.keep_wrong.powu(b)
    }

    pub fn is_none(&self) -> bool {
        self.keep_correct.is_one() && self.keep_wrong.is_one()
    }

    /// Folds the shortened positions of `spec` in as always-correct anchors.
    pub fn fold_shortening(self, spec: &CodeSpec) -> Self {
        if spec.n_short == 0 {
            return self;
        }
        let frac = P::from_u64(spec.n as u64) / P::from_u64(spec.parent_n() as u64);
        AnchorWeights {
            keep_correct: self.keep_correct * frac,
            keep_wrong: self.keep_wrong,
        }
    }
}

impl AnchorWeights<f64> {
    pub fn from_probs(a: &AnchorProbs) -> Self {
        AnchorWeights {
            keep_correct: 1.0 - a.p_ca,
            keep_wrong: 1.0 - a.p_wa,
        }
    }
}

impl AnchorWeights<BigRational> {
    pub fn from_rationals(p_ca: &BigRational, p_wa: &BigRational) -> Self {
        let one = BigRational::from_integer(1.into());
        AnchorWeights {
            keep_correct: &one - p_ca,
            keep_wrong: &one - p_wa,
        }
    }
}

/// Parent length, t and d_min used by the formulas, with the enumerator checked against the code.
pub(crate) struct FormulaCtx<'a> {
    pub n: i64,
    pub t: i64,
    pub d_min: i64,
    pub a: &'a WeightEnumerator,
}

impl<'a> FormulaCtx<'a> {
    pub fn new(spec: &CodeSpec, a: &'a WeightEnumerator) -> Result<Self, DtpError> {
        a.check_matches(spec)?;
        Ok(FormulaCtx {
            n: spec.parent_n() as i64,
            t: spec.t as i64,
            d_min: spec.d_min as i64,
            a,
        })
    }

    pub fn weight<P: WeightValue>(&self, w: i64) -> P {
        P::weight(self.a, w)
    }
}

/// Reads A_w in the table's arithmetic, using the cached float for `f64`.
pub trait WeightValue: Prob {
    fn weight(a: &WeightEnumerator, w: i64) -> Self;
}

impl WeightValue for f64 {
    fn weight(a: &WeightEnumerator, w: i64) -> f64 {
        a.a_f64(w)
    }
}

impl WeightValue for BigRational {
    fn weight(a: &WeightEnumerator, w: i64) -> BigRational {
        a.a(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halfint_display_and_value() {
        assert_eq!(HalfInt::failure(2, 3).to_string(), "3.5");
        assert_eq!(HalfInt::from_int(4).to_string(), "4");
        assert_eq!(HalfInt::failure(1, 1).value(), 1.5);
    }

    #[test]
    fn cell_accounting() {
        let mut c: DtpCell<f64> = DtpCell::empty(HalfInt::failure(3, 1));
        c.fail = 0.5;
        c.add_mc(5, 0.25);
        c.add_mc(5, 0.125);
        c.succ = 0.125;
        assert!((c.total() - 1.0).abs() < 1e-15);
        assert!((c.expected_residual() - (0.5 * 3.5 + 0.375 * 5.0)).abs() < 1e-15);
        assert!((c.frame_error() - 0.875).abs() < 1e-15);
        assert_eq!(c.entries().len(), 3);
        assert_eq!(c.combined().len(), 3);
    }

    #[test]
    fn anchor_keep_powers() {
        let w = AnchorWeights {
            keep_correct: 0.5,
            keep_wrong: 0.25,
        };
        assert_eq!(w.keep(2, 1), 0.0625);
        assert!(AnchorWeights::<f64>::none().is_none());
    }
}
