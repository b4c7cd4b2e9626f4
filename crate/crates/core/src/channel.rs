//! BSC / error-and-erasure channels obtained by thresholding BI-AWGN outputs, and anchor reliabilities.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{log_binomial, log_q_function, q_function, stable_sum, LogValue};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("invalid channel parameters: delta = {delta}, epsilon = {epsilon}")]
    Params { delta: f64, epsilon: f64 },
    #[error("sigma must be positive and finite, got {0}")]
    Sigma(f64),
    #[error("erasure threshold must be >= 0, got {0}")]
    Threshold(f64),
    #[error("anchor threshold {ta} must exceed the erasure threshold {t}")]
    AnchorThreshold { t: f64, ta: f64 },
}

/// Ternary-output channel: flip with probability delta, erase with probability epsilon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EaeChannel {
    pub delta: f64,
    pub epsilon: f64,
    #[serde(skip)]
    ln_delta: f64,
    #[serde(skip)]
    ln_epsilon: f64,
}

impl EaeChannel {
    pub fn new(delta: f64, epsilon: f64) -> Result<Self, ChannelError> {
        if !(delta >= 0.0 && epsilon >= 0.0 && delta + epsilon <= 1.0 + 1e-15) {
            return Err(ChannelError::Params { delta, epsilon });
        }
        Ok(EaeChannel {
            delta,
            epsilon,
            ln_delta: delta.ln(),
            ln_epsilon: epsilon.ln(),
        })
    }

    pub fn bsc(delta: f64) -> Result<Self, ChannelError> {
        Self::new(delta, 0.0)
    }

    pub fn correct(&self) -> f64 {
        (1.0 - self.delta - self.epsilon).max(0.0)
    }

    pub fn ln_delta(&self) -> f64 {
        self.ln_delta
    }

    pub fn ln_epsilon(&self) -> f64 {
        self.ln_epsilon
    }
}

/// sigma of the BI-AWGN channel for a given Eb/N0 (dB) and code rate.
pub fn sigma_from_ebn0(ebn0_db: f64, rate: f64) -> f64 {
    let ebn0 = 10f64.powf(ebn0_db / 10.0);
    (1.0 / (2.0 * rate * ebn0)).sqrt()
}

/// Hard-decision error probability of uncoded BPSK at the same sigma.
pub fn uncoded_ber(ebn0_db: f64, rate: f64) -> f64 {
    q_function(1.0 / sigma_from_ebn0(ebn0_db, rate))
}

/// Quantizes BI-AWGN outputs: |y| <= T is an erasure, otherwise the sign decides.
pub fn quantize(sigma: f64, t: f64) -> Result<EaeChannel, ChannelError> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(ChannelError::Sigma(sigma));
    }
    if !(t >= 0.0) {
        return Err(ChannelError::Threshold(t));
    }
    let delta = q_function((t + 1.0) / sigma);
    // P(-T <= y <= T) as a difference of tails avoids 1 - (1 - tiny).
    let epsilon = q_function((1.0 - t) / sigma) - delta;
    if epsilon < 0.0 {
        return Err(ChannelError::Params { delta, epsilon });
    }
    let ln_delta = log_q_function((t + 1.0) / sigma);
    let ln_epsilon = if t == 0.0 {
        f64::NEG_INFINITY
    } else {
        let a = log_q_function((1.0 - t) / sigma);
        let b = log_q_function((1.0 + t) / sigma);
        a + (-(b - a).exp()).ln_1p()
    };
    Ok(EaeChannel {
        delta,
        epsilon,
        ln_delta,
        ln_epsilon,
    })
}

/// Probabilities that a correct / an erroneous hard decision is also an anchor bit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnchorProbs {
    pub p_ca: f64,
    pub p_wa: f64,
}

impl AnchorProbs {
    pub const NONE: AnchorProbs = AnchorProbs {
        p_ca: 0.0,
        p_wa: 0.0,
    };

    pub fn new(p_ca: f64, p_wa: f64) -> Self {
        AnchorProbs { p_ca, p_wa }
    }

    /// Shortened positions are always correct anchors; a flip lands on one with probability `fraction`.
    pub fn fold_shortening(self, fraction: f64) -> Self {
        AnchorProbs {
            p_ca: fraction + (1.0 - fraction) * self.p_ca,
            p_wa: self.p_wa,
        }
    }

    pub fn is_none(&self) -> bool {
        self.p_ca == 0.0 && self.p_wa == 0.0
    }
}

/// Anchors on a plain BSC (no erasures): anchor if |y| > Ta.
pub fn anchor_probs_bsc(sigma: f64, ta: f64) -> Result<AnchorProbs, ChannelError> {
    anchor_probs_eae(sigma, 0.0, ta)
}

/// Anchors on top of the erasure threshold T; requires Ta > T.
///
/// P_wa is P(y < -Ta | y < -T), i.e. Q((Ta+1)/sigma) / delta.
pub fn anchor_probs_eae(sigma: f64, t: f64, ta: f64) -> Result<AnchorProbs, ChannelError> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(ChannelError::Sigma(sigma));
    }
    if !(ta > t) {
        return Err(ChannelError::AnchorThreshold { t, ta });
    }
    let p_ca = (log_q_function((ta - 1.0) / sigma) - log_q_function((t - 1.0) / sigma)).exp();
    let p_wa = (log_q_function((ta + 1.0) / sigma) - log_q_function((t + 1.0) / sigma)).exp();
    Ok(AnchorProbs {
        p_ca: p_ca.min(1.0),
        p_wa: p_wa.min(1.0),
    })
}

/// Thresholded BI-AWGN receiver at a given operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AwgnQuantizer {
    pub ebn0_db: f64,
    pub code_rate: f64,
    pub sigma: f64,
    pub t: f64,
    pub t_a: Option<f64>,
}

impl AwgnQuantizer {
    pub fn new(
        ebn0_db: f64,
        code_rate: f64,
        t: f64,
        t_a: Option<f64>,
    ) -> Result<Self, ChannelError> {
        if !(t >= 0.0) {
            return Err(ChannelError::Threshold(t));
        }
        if let Some(ta) = t_a {
            if !(ta > t) {
                return Err(ChannelError::AnchorThreshold { t, ta });
            }
        }
        let sigma = sigma_from_ebn0(ebn0_db, code_rate);
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(ChannelError::Sigma(sigma));
        }
        Ok(AwgnQuantizer {
            ebn0_db,
            code_rate,
            sigma,
            t,
            t_a,
        })
    }

    pub fn channel(&self) -> EaeChannel {
        quantize(self.sigma, self.t).expect("validated at construction")
    }

    pub fn anchors(&self) -> Option<AnchorProbs> {
        self.t_a
            .map(|ta| anchor_probs_eae(self.sigma, self.t, ta).expect("validated at construction"))
    }
}

/// Default truncation of the joint (U, E) distribution.
pub const DEFAULT_ETA: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointCell {
    pub u: usize,
    pub e: usize,
    pub p: f64,
}

/// Truncated joint distribution of error and erasure counts over n positions.
#[derive(Debug, Clone)]
pub struct JointDistribution {
    pub n: usize,
    pub cells: Vec<JointCell>,
    pub dropped_mass: f64,
}

impl JointDistribution {
    pub fn u_max(&self) -> usize {
        self.cells.iter().map(|c| c.u).max().unwrap_or(0)
    }

    pub fn e_max(&self) -> usize {
        self.cells.iter().map(|c| c.e).max().unwrap_or(0)
    }

    pub fn kept_mass(&self) -> f64 {
        stable_sum(self.cells.iter().map(|c| c.p))
    }

    pub fn get(&self, u: usize, e: usize) -> f64 {
        self.cells
            .iter()
            .find(|c| c.u == u && c.e == e)
            .map_or(0.0, |c| c.p)
    }
}

/// Binomial pmf over 0..=n in linear scale from a log-probability pair.
fn binomial_pmf(n: usize, ln_p: f64, ln_q: f64) -> Vec<f64> {
    (0..=n)
        .map(|i| {
            let mut l = log_binomial(n as i64, i as i64).expect("in range").ln();
            if i > 0 {
                l += i as f64 * ln_p;
            }
            if n > i {
                l += (n - i) as f64 * ln_q;
            }
            l.exp()
        })
        .collect()
}

/// Smallest cut c with sum_{i > c} pmf_i <= tol, and that tail.
fn tail_cut(pmf: &[f64], tol: f64) -> (usize, f64) {
    // Tail sums are accumulated from the far end, smallest terms first.
    let mut tails = vec![0.0; pmf.len()];
    let mut acc = crate::numerics::NeumaierSum::new();
    for i in (0..pmf.len()).rev() {
        tails[i] = acc.value();
        acc.add(pmf[i]);
    }
    let cut = (0..pmf.len())
        .find(|&i| tails[i] <= tol)
        .unwrap_or(pmf.len() - 1);
    (cut, tails[cut])
}

/// P(U=u, E=e) = C(n,u) C(n-u,e) delta^u eps^e (1-delta-eps)^(n-u-e), truncated so that
/// at most `eta` of the mass is dropped.
pub fn joint_ue_distribution(n: usize, ch: &EaeChannel, eta: f64) -> JointDistribution {
    let ln_c = (-(ch.delta + ch.epsilon)).ln_1p();
    // U ~ Bin(n, delta); E | U=u ~ Bin(n-u, eps / (1-delta)).
    let pu = binomial_pmf(n, ch.ln_delta(), (-ch.delta).ln_1p());
    let (u_hi, u_tail) = tail_cut(&pu, eta / 2.0);
    let ln_eps_c = ch.ln_epsilon() - (-ch.delta).ln_1p();
    let ln_corr_c = ln_c - (-ch.delta).ln_1p();
    let mut cells = Vec::new();
    let mut dropped = crate::numerics::NeumaierSum::new();
    dropped.add(u_tail);
    for u in 0..=u_hi {
        let m = n - u;
        let pe = binomial_pmf(m, ln_eps_c, ln_corr_c);
        let (e_hi, e_tail) = tail_cut(&pe, eta / 2.0);
        dropped.add(pu[u] * e_tail);
        let ln_cu = LogValue::from_ln(log_binomial(n as i64, u as i64).expect("in range").ln());
        for e in 0..=e_hi {
            // Direct evaluation of the joint term keeps full relative accuracy.
            let mut l = ln_cu.ln() + log_binomial(m as i64, e as i64).expect("in range").ln();
            if u > 0 {
                l += u as f64 * ch.ln_delta();
            }
            if e > 0 {
                l += e as f64 * ch.ln_epsilon();
            }
            if m > e {
                l += (m - e) as f64 * ln_c;
            }
            cells.push(JointCell { u, e, p: l.exp() });
        }
    }
    JointDistribution {
        n,
        cells,
        dropped_mass: dropped.value(),
    }
}

/// Smallest e with P(E >= e) < eta for E ~ Bin(n, epsilon).
pub fn default_erasure_cap(n: usize, ch: &EaeChannel, eta: f64) -> usize {
    if ch.epsilon == 0.0 {
        return 0;
    }
    let pe = binomial_pmf(n, ch.ln_epsilon(), (-ch.epsilon).ln_1p());
    let (cut, _) = tail_cut(&pe, eta);
    // tail beyond `cut` is below eta, so P(E >= cut + 1) < eta.
    (cut + 1).min(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bsc_reduction() {
        let ch = quantize(0.7, 0.0).unwrap();
        assert_eq!(ch.epsilon, 0.0);
        assert_eq!(ch.delta, q_function(1.0 / 0.7));
    }

    #[test]
    fn quantize_reference_point() {
        let ch = quantize(1.0, 0.16).unwrap();
        let delta = q_function(1.16);
        let eps = 1.0 - q_function(-0.84) - delta;
        assert!((ch.delta - delta).abs() < 1e-16);
        assert!((ch.epsilon - eps).abs() < 1e-15);
        assert!((ch.ln_delta() - delta.ln()).abs() < 1e-13);
        assert!((ch.ln_epsilon() - eps.ln()).abs() < 1e-13);
    }

    #[test]
    fn noiseless_limit() {
        let ch = quantize(1e-3, 0.5).unwrap();
        assert_eq!(ch.delta, 0.0);
        assert_eq!(ch.epsilon, 0.0);
        assert!(ch.ln_delta() < -1e5);
    }

    #[test]
    fn invalid_inputs() {
        assert!(quantize(0.0, 0.1).is_err());
        assert!(quantize(1.0, -0.1).is_err());
        assert!(anchor_probs_eae(0.6, 0.3, 0.3).is_err());
        assert!(AwgnQuantizer::new(7.0, 0.9, 0.2, Some(0.1)).is_err());
        assert!(EaeChannel::new(0.6, 0.5).is_err());
    }

    #[test]
    fn anchor_limits() {
        let a = anchor_probs_bsc(0.5, 200.0).unwrap();
        assert!(a.p_ca < 1e-300 && a.p_wa < 1e-300);
        let a = anchor_probs_bsc(0.5, 1e-12).unwrap();
        assert!((a.p_ca - 1.0).abs() < 1e-10 && (a.p_wa - 1.0).abs() < 1e-10);
    }

    #[test]
    fn anchor_closed_form() {
        let (s, t, ta) = (0.6, 0.13, 0.75);
        let a = anchor_probs_eae(s, t, ta).unwrap();
        let ch = quantize(s, t).unwrap();
        let p_ca = q_function((ta - 1.0) / s) / (1.0 - ch.delta - ch.epsilon);
        let p_wa = q_function((ta + 1.0) / s) / ch.delta;
        assert!((a.p_ca / p_ca - 1.0).abs() < 1e-12);
        assert!((a.p_wa / p_wa - 1.0).abs() < 1e-12);
        assert!(a.p_wa <= a.p_ca);
    }

    #[test]
    fn anchors_eae_with_zero_threshold_is_bsc() {
        assert_eq!(
            anchor_probs_eae(0.5, 0.0, 0.75).unwrap(),
            anchor_probs_bsc(0.5, 0.75).unwrap()
        );
    }

    #[test]
    fn uncoded_reference() {
        let v = uncoded_ber(7.0, 239.0 / 255.0);
        assert!((v / 1.088e-3 - 1.0).abs() < 1e-3, "{v}");
    }

    #[test]
    fn joint_n1() {
        let ch = EaeChannel::new(0.1, 0.2).unwrap();
        let j = joint_ue_distribution(1, &ch, 0.0);
        assert!((j.get(1, 0) - 0.1).abs() < 1e-15);
        assert!((j.get(0, 1) - 0.2).abs() < 1e-15);
        assert!((j.get(0, 0) - 0.7).abs() < 1e-15);
    }

    #[test]
    fn joint_normalized_255() {
        let ch = quantize(sigma_from_ebn0(5.0, 239.0 / 255.0), 0.16).unwrap();
        let j = joint_ue_distribution(255, &ch, 0.0);
        assert!((j.kept_mass() - 1.0).abs() < 1e-12);
        let jt = joint_ue_distribution(255, &ch, 1e-15);
        assert!(jt.dropped_mass <= 1e-15);
        assert!((jt.kept_mass() + jt.dropped_mass - 1.0).abs() < 1e-12);
        assert!(jt.cells.len() < j.cells.len());
    }

    #[test]
    fn joint_bsc_marginal() {
        let ch = EaeChannel::bsc(0.01).unwrap();
        let j = joint_ue_distribution(100, &ch, 0.0);
        for u in 0..5 {
            let expect = crate::numerics::binomial_f64(100, u as i64)
                * 0.01f64.powi(u as i32)
                * 0.99f64.powi(100 - u as i32);
            assert!((j.get(u, 0) / expect - 1.0).abs() < 1e-12);
        }
        assert_eq!(j.e_max(), 0);
    }

    #[test]
    fn erasure_cap_default() {
        let ch = quantize(sigma_from_ebn0(7.0, 239.0 / 255.0), 0.16).unwrap();
        let cap = default_erasure_cap(255, &ch, 1e-15);
        assert!(cap > 5 && cap < 60, "{cap}");
        assert_eq!(
            default_erasure_cap(255, &EaeChannel::bsc(0.01).unwrap(), 1e-15),
            0
        );
    }
}
