//! Algebraic bounded-distance decoding of binary narrow-sense BCH codes.

use std::collections::HashMap;

use super::word::BinaryWord;
use super::SimError;
use crate::code::{bch_generator_polynomial, CodeSpec};
use crate::dtp::{HalfInt, Outcome};
use crate::field::FieldContext;

/// Decoder output under the all-zero transmission convention.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeOutcome {
    pub kind: Outcome,
    pub estimate: BinaryWord,
    /// Twice the residual error count; realized decodings are always whole bits.
    pub residual_twice: HalfInt,
}

impl DecodeOutcome {
    pub fn from_estimate(estimate: BinaryWord, decoded: bool) -> Self {
        let w = estimate.weight();
        let kind = match (decoded, w) {
            (true, 0) => Outcome::Succ,
            (true, _) => Outcome::Mc,
            (false, _) => Outcome::Fail,
        };
        DecodeOutcome {
            kind,
            estimate,
            residual_twice: HalfInt::from_int(w),
        }
    }

    pub fn residual(&self) -> usize {
        (self.residual_twice.twice() / 2) as usize
    }
}

/// Syndromes S_1..S_2t of the word (positions beyond its length are zero).
pub fn syndromes(field: &FieldContext, t: usize, y: &BinaryWord) -> Vec<u16> {
    let mut s = vec![0u16; 2 * t];
    for i in y.ones() {
        for (j, sj) in s.iter_mut().enumerate() {
            *sj ^= field.alpha_pow((i * (j + 1)) as i64);
        }
    }
    s
}

/// Shortest LFSR generating `s`; returns (connection polynomial, length).
pub fn berlekamp_massey(field: &FieldContext, s: &[u16]) -> (Vec<u16>, usize) {
    let mut c = vec![1u16];
    let mut b = vec![1u16];
    let mut l = 0usize;
    let mut m = 1usize;
    let mut bd = 1u16;
    for k in 0..s.len() {
        let mut d = s[k];
        for i in 1..=l.min(c.len() - 1) {
            d ^= field.mul(c[i], s[k - i]);
        }
        if d == 0 {
            m += 1;
            continue;
        }
        let coef = field.div(d, bd);
        let mut next = c.clone();
        if next.len() < b.len() + m {
            next.resize(b.len() + m, 0);
        }
        for (i, &bi) in b.iter().enumerate() {
            next[i + m] ^= field.mul(coef, bi);
        }
        if 2 * l <= k {
            b = std::mem::replace(&mut c, next);
            l = k + 1 - l;
            bd = d;
            m = 1;
        } else {
            c = next;
            m += 1;
        }
    }
    while c.len() > 1 && *c.last().unwrap() == 0 {
        c.pop();
    }
    (c, l)
}

/// Positions i < n with Lambda(alpha^-i) = 0.
pub fn chien_search(field: &FieldContext, lambda: &[u16], n: usize) -> Vec<usize> {
    (0..n)
        .filter(|&i| {
            let mut acc = 0u16;
            for (j, &lj) in lambda.iter().enumerate() {
                acc ^= field.mul(lj, field.alpha_pow(-((i * j) as i64)));
            }
            acc == 0
        })
        .collect()
}

/// Decodes y (length n of the possibly shortened code) to the codeword within distance t.
///
/// A locator is accepted only when its degree equals its number of distinct roots in
/// range; corrections touching shortened positions count as failures.
pub fn bdd_codeword(y: &BinaryWord, spec: &CodeSpec, field: &FieldContext) -> Option<BinaryWord> {
    let s = syndromes(field, spec.t, y);
    if s.iter().all(|x| *x == 0) {
        return Some(y.clone());
    }
    let (lambda, l) = berlekamp_massey(field, &s);
    if l > spec.t || lambda.len() != l + 1 {
        return None;
    }
    let roots = chien_search(field, &lambda, y.len());
    if roots.len() != l {
        return None;
    }
    let mut c = y.clone();
    for i in roots {
        c.flip(i);
    }
    debug_assert!(
        syndromes(field, spec.t, &c).iter().all(|x| *x == 0),
        "corrected word is not a codeword"
    );
    debug_assert!(c.xor(y).weight() <= spec.t);
    Some(c)
}

pub fn bdd_decode(y: &BinaryWord, spec: &CodeSpec, field: &FieldContext) -> DecodeOutcome {
    match bdd_codeword(y, spec, field) {
        Some(c) => DecodeOutcome::from_estimate(c, true),
        None => DecodeOutcome::from_estimate(y.clone(), false),
    }
}

/// BCH code bundle: parameters, field, and for short codes a syndrome lookup table.
#[derive(Debug, Clone)]
pub struct BchCode {
    pub spec: CodeSpec,
    pub field: FieldContext,
    table: Option<SyndromeTable>,
}

impl BchCode {
    pub fn new(spec: CodeSpec) -> Result<Self, SimError> {
        let b = spec.b;
        let field = FieldContext::new(b).map_err(|e| SimError::Config(e.to_string()))?;
        let g = bch_generator_polynomial(&field, spec.t);
        if g.len() - 1 != spec.parent_n() - spec.parent_k() {
            return Err(SimError::Config(format!(
                "generator degree {} does not match n - k = {}",
                g.len() - 1,
                spec.parent_n() - spec.parent_k()
            )));
        }
        Ok(BchCode {
            spec,
            field,
            table: None,
        })
    }

    /// Adds a syndrome table (n <= 64 only); decoding results are unchanged.
    pub fn with_table(mut self) -> Result<Self, SimError> {
        self.table = Some(SyndromeTable::build(&self.spec, &self.field)?);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn bdd(&self, y: &BinaryWord) -> Option<BinaryWord> {
        match &self.table {
            Some(tab) => tab
                .decode(y.low_mask())
                .map(|c| BinaryWord::from_mask(y.len(), c)),
            None => bdd_codeword(y, &self.spec, &self.field),
        }
    }

    /// Mask-based BDD for n <= 64; panics without a table.
    pub fn bdd_mask(&self, y: u64) -> Option<u64> {
        self.table
            .as_ref()
            .expect("syndrome table required")
            .decode(y)
    }

    pub fn decode(&self, y: &BinaryWord) -> DecodeOutcome {
        match self.bdd(y) {
            Some(c) => DecodeOutcome::from_estimate(c, true),
            None => DecodeOutcome::from_estimate(y.clone(), false),
        }
    }

    /// All codewords as masks (n <= 64, k <= 24).
    pub fn codewords(&self) -> Result<Vec<u64>, SimError> {
        let (n, k) = (self.spec.n, self.spec.k);
        if n > 64 || k > 24 {
            return Err(SimError::Config(
                "codeword list needs n <= 64 and k <= 24".into(),
            ));
        }
        let g = bch_generator_polynomial(&self.field, self.spec.t);
        let g_mask = g
            .iter()
            .enumerate()
            .fold(0u64, |m, (i, &c)| m | ((c as u64) << i));
        Ok((0u64..1 << k).map(|msg| clmul(msg, g_mask)).collect())
    }
}

fn clmul(a: u64, b: u64) -> u64 {
    let mut out = 0u64;
    let mut a = a;
    let mut sh = 0;
    while a != 0 {
        if a & 1 == 1 {
            out ^= b << sh;
        }
        a >>= 1;
        sh += 1;
    }
    out
}

/// Coset-leader table over the packed odd syndromes, for n <= 64.
#[derive(Debug, Clone)]
struct SyndromeTable {
    columns: Vec<u64>,
    leaders: HashMap<u64, u64>,
}

impl SyndromeTable {
    fn build(spec: &CodeSpec, field: &FieldContext) -> Result<Self, SimError> {
        let (n, t, b) = (spec.n, spec.t, spec.b as usize);
        if n > 64 || b * t > 64 {
            return Err(SimError::Config(format!(
                "syndrome table needs n <= 64 and b*t <= 64, got n={n}"
            )));
        }
        let columns: Vec<u64> = (0..n)
            .map(|i| {
                (0..t).fold(0u64, |acc, j| {
                    acc | (field.alpha_pow((i * (2 * j + 1)) as i64) as u64) << (b * j)
                })
            })
            .collect();
        let mut tab = SyndromeTable {
            columns,
            leaders: HashMap::new(),
        };
        let mut stack = vec![(0u64, 0usize, 0usize)];
        while let Some((mask, start, w)) = stack.pop() {
            let s = tab.syndrome(mask);
            if tab.leaders.insert(s, mask).is_some() {
                return Err(SimError::Config(
                    "syndrome collision inside the decoding spheres".into(),
                ));
            }
            if w < t {
                for i in start..n {
                    stack.push((mask | 1 << i, i + 1, w + 1));
                }
            }
        }
        Ok(tab)
    }

    fn syndrome(&self, mut y: u64) -> u64 {
        let mut s = 0;
        while y != 0 {
            s ^= self.columns[y.trailing_zeros() as usize];
            y &= y - 1;
        }
        s
    }

    fn decode(&self, y: u64) -> Option<u64> {
        self.leaders.get(&self.syndrome(y)).map(|e| y ^ e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(n: usize, k: usize, d: usize) -> BchCode {
        BchCode::new(CodeSpec::new(n, k, d).unwrap()).unwrap()
    }

    #[test]
    fn corrects_up_to_t() {
        let c = code(255, 239, 5);
        let y = BinaryWord::from_positions(255, [3, 200]);
        let out = c.decode(&y);
        assert_eq!(out.kind, Outcome::Succ);
        assert_eq!(out.residual(), 0);
        let y = BinaryWord::from_positions(255, [254]);
        assert_eq!(c.decode(&y).kind, Outcome::Succ);
    }

    #[test]
    fn codewords_have_zero_syndrome() {
        let c = code(15, 7, 5);
        let words = c.codewords().unwrap();
        assert_eq!(words.len(), 128);
        for w in words {
            let y = BinaryWord::from_mask(15, w);
            assert!(syndromes(&c.field, 2, &y).iter().all(|s| *s == 0));
        }
    }

    #[test]
    fn table_matches_algebraic_everywhere() {
        for (n, k, d) in [(7, 4, 3), (15, 11, 3), (15, 7, 5)] {
            let alg = code(n, k, d);
            let tab = code(n, k, d).with_table().unwrap();
            for m in 0u64..1 << n {
                let y = BinaryWord::from_mask(n, m);
                assert_eq!(alg.bdd(&y), tab.bdd(&y), "{n}: {m:#x}");
            }
        }
    }

    #[test]
    fn shortened_rejects_out_of_range_roots() {
        let s = CodeSpec::new(15, 7, 5).unwrap().shorten(5).unwrap();
        let c = BchCode::new(s).unwrap();
        let y = BinaryWord::from_positions(10, [0, 1, 2]);
        // Whatever the decision, it never touches positions beyond the shortened length.
        if let Some(w) = c.bdd(&y) {
            assert_eq!(w.len(), 10);
        }
    }
}
