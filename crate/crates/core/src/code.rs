//! Binary primitive BCH code parameters, weight enumerators and shortening.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{FieldContext, FieldError};
use crate::numerics::{binomial, rational_to_f64};

#[derive(Debug, Error)]
pub enum CodeError {
    #[error("invalid code parameters: {0}")]
    InvalidSpec(String),
    #[error("shortening by {n_short} is outside 0..{k}")]
    ShortenRange { n_short: usize, k: usize },
    #[error("binomial approximation is not defined for shortened codes")]
    ShortenedApprox,
    #[error("enumeration of 2^{k} codewords exceeds the cap 2^{cap}")]
    DimensionTooLarge { k: usize, cap: usize },
    #[error("weight enumerator parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("weight enumerator invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// Parameters of a (possibly shortened) primitive narrow-sense binary BCH code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CodeSpec {
    pub n: usize,
    pub k: usize,
    pub d_des: usize,
    pub t: usize,
    /// Field degree; the parent length is 2^b - 1.
    pub b: u32,
    pub n_short: usize,
    /// Minimum distance used by the EaED shortcut; defaults to d_des.
    pub d_min: usize,
}

impl CodeSpec {
    /// Unshortened primitive BCH code of length n = 2^b - 1.
    pub fn new(n: usize, k: usize, d_des: usize) -> Result<Self, CodeError> {
        if n < 3 || !(n + 1).is_power_of_two() {
            return Err(CodeError::InvalidSpec(format!("n = {n} is not 2^b - 1")));
        }
        if d_des % 2 == 0 || d_des < 3 {
            return Err(CodeError::InvalidSpec(format!(
                "designed distance {d_des} must be odd and >= 3"
            )));
        }
        if k == 0 || k >= n {
            return Err(CodeError::InvalidSpec(format!(
                "dimension {k} outside 1..{n}"
            )));
        }
        let b = (n + 1).trailing_zeros();
        let t = (d_des - 1) / 2;
        if k + b as usize * t < n {
            return Err(CodeError::InvalidSpec(format!(
                "k = {k} < n - b t = {}",
                n - b as usize * t
            )));
        }
        if d_des > n - k + 1 {
            return Err(CodeError::InvalidSpec(format!(
                "d_des = {d_des} violates the Singleton bound"
            )));
        }
        Ok(CodeSpec {
            n,
            k,
            d_des,
            t,
            b,
            n_short: 0,
            d_min: d_des,
        })
    }

    /// The narrow-sense BCH code of length 2^b - 1 correcting t errors.
    pub fn bch(b: u32, t: usize) -> Result<Self, CodeError> {
        let field = FieldContext::new(b)?;
        let g = bch_generator_polynomial(&field, t);
        let n = field.order();
        let k = n - (g.len() - 1);
        Self::new(n, k, 2 * t + 1)
    }

    pub fn with_d_min(mut self, d_min: usize) -> Result<Self, CodeError> {
        if d_min < self.d_des {
            return Err(CodeError::InvalidSpec(format!(
                "d_min {d_min} below designed distance {}",
                self.d_des
            )));
        }
        self.d_min = d_min;
        Ok(self)
    }

    /// Removes n_short information positions; parent parameters are kept.
    pub fn shorten(&self, n_short: usize) -> Result<Self, CodeError> {
        if n_short >= self.k {
            return Err(CodeError::ShortenRange { n_short, k: self.k });
        }
        Ok(CodeSpec {
            n: self.n - n_short,
            k: self.k - n_short,
            n_short: self.n_short + n_short,
            ..*self
        })
    }

    pub fn parent_n(&self) -> usize {
        self.n + self.n_short
    }

    pub fn parent_k(&self) -> usize {
        self.k + self.n_short
    }

    pub fn is_shortened(&self) -> bool {
        self.n_short > 0
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    /// Fraction of parent positions that are shortened (always-correct anchors).
    pub fn shortened_fraction(&self) -> f64 {
        self.n_short as f64 / self.parent_n() as f64
    }

    pub fn parent(&self) -> CodeSpec {
        CodeSpec {
            n: self.parent_n(),
            k: self.parent_k(),
            n_short: 0,
            ..*self
        }
    }
}

impl fmt::Display for CodeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{}]", self.n, self.k, self.d_des)?;
        if self.n_short > 0 {
            write!(
                f,
                " shortened from [{},{}]",
                self.parent_n(),
                self.parent_k()
            )?;
        }
        Ok(())
    }
}

impl FromStr for CodeSpec {
    type Err = CodeError;

    /// Parses `n,k,d` with optional brackets.
    fn from_str(s: &str) -> Result<Self, CodeError> {
        let parts: Vec<&str> = s
            .trim()
            .trim_start_matches('[')
            .trim_end_matches(']')
            .split(',')
            .collect();
        let nums: Result<Vec<usize>, _> = parts.iter().map(|p| p.trim().parse::<usize>()).collect();
        match nums {
            Ok(v) if v.len() == 3 => CodeSpec::new(v[0], v[1], v[2]),
            _ => Err(CodeError::InvalidSpec(format!(
                "expected n,k,d but got {s:?}"
            ))),
        }
    }
}

/// Generator polynomial (coefficient vector, lowest degree first) of the t-error-correcting
/// narrow-sense BCH code over `field`.
pub fn bch_generator_polynomial(field: &FieldContext, t: usize) -> Vec<u8> {
    let mut seen = vec![false; field.order()];
    let mut g = vec![1u8];
    for i in 1..=2 * t {
        let i = i % field.order();
        if seen[i] {
            continue;
        }
        for j in field.cyclotomic_coset(i) {
            seen[j] = true;
        }
        let m = field.minimal_polynomial(i);
        let m: Vec<u8> = (0..64)
            .take_while(|d| m >> d != 0)
            .map(|d| ((m >> d) & 1) as u8)
            .collect();
        g = gf2_poly_mul(&g, &m);
    }
    g
}

pub fn gf2_poly_mul(a: &[u8], b: &[u8]) -> Vec<u8> {
    let mut out = vec![0u8; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] ^= y;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnumeratorMode {
    Exact,
    BinomialApprox,
}

impl fmt::Display for EnumeratorMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EnumeratorMode::Exact => "exact",
            EnumeratorMode::BinomialApprox => "binomial-approx",
        })
    }
}

impl FromStr for EnumeratorMode {
    type Err = CodeError;
    fn from_str(s: &str) -> Result<Self, CodeError> {
        match s {
            "exact" => Ok(EnumeratorMode::Exact),
            "binomial-approx" | "approx" => Ok(EnumeratorMode::BinomialApprox),
            _ => Err(CodeError::Parse {
                line: 0,
                msg: format!("unknown mode {s:?}"),
            }),
        }
    }
}

/// Weight distribution A_w, w = 0..=n, kept as exact rationals with an f64 mirror.
#[derive(Debug, Clone)]
pub struct WeightEnumerator {
    n: usize,
    k: usize,
    d_des: usize,
    mode: EnumeratorMode,
    weights: Vec<BigRational>,
    weights_f64: Vec<f64>,
}

impl WeightEnumerator {
    /// A_w = 2^{-bt} C(n,w) away from the distance gaps, A_0 = A_n = 1.
    pub fn approx(spec: &CodeSpec) -> Result<Self, CodeError> {
        if spec.is_shortened() {
            return Err(CodeError::ShortenedApprox);
        }
        let n = spec.n;
        let scale = BigUint::one() << (spec.b as usize * spec.t);
        let weights = (0..=n)
            .map(|w| {
                if w == 0 || w == n {
                    BigRational::one()
                } else if w < spec.d_des || w > n - spec.d_des {
                    BigRational::zero()
                } else {
                    BigRational::new(binomial(n as i64, w as i64).into(), scale.clone().into())
                }
            })
            .collect();
        Self::from_parts(
            n,
            spec.k,
            spec.d_des,
            EnumeratorMode::BinomialApprox,
            weights,
        )
    }

    /// Full codeword enumeration; only feasible for small dimensions.
    pub fn by_enumeration(g: &GeneratorMatrix, d_des: usize) -> Result<Self, CodeError> {
        let counts = g.weight_counts()?;
        let weights = counts
            .into_iter()
            .map(|c| BigRational::from_integer(BigInt::from(c)))
            .collect();
        Self::from_parts(g.n(), g.k(), d_des, EnumeratorMode::Exact, weights)
    }

    /// Exact enumerator of a tiny BCH code by enumeration.
    pub fn exact_for(spec: &CodeSpec) -> Result<Self, CodeError> {
        let field = FieldContext::new(spec.b)?;
        let g = bch_generator_polynomial(&field, spec.t);
        let gm = GeneratorMatrix::from_polynomial(spec.parent_n(), &g);
        Self::by_enumeration(&gm, spec.d_des)
    }

    pub fn from_parts(
        n: usize,
        k: usize,
        d_des: usize,
        mode: EnumeratorMode,
        weights: Vec<BigRational>,
    ) -> Result<Self, CodeError> {
        if weights.len() != n + 1 {
            return Err(CodeError::Invariant(format!(
                "{} weights for length {n}",
                weights.len()
            )));
        }
        let weights_f64 = weights.iter().map(rational_to_f64).collect();
        let we = WeightEnumerator {
            n,
            k,
            d_des,
            mode,
            weights,
            weights_f64,
        };
        we.validate()?;
        Ok(we)
    }

    fn validate(&self) -> Result<(), CodeError> {
        let inv = |m: String| Err(CodeError::Invariant(m));
        if !self.weights[0].is_one() {
            return inv(format!("A_0 = {} instead of 1", self.weights[0]));
        }
        for (w, a) in self.weights.iter().enumerate() {
            if a.is_negative() {
                return inv(format!("A_{w} is negative"));
            }
            if w > 0 && w < self.d_des && !a.is_zero() {
                return inv(format!(
                    "A_{w} = {a} is nonzero below the designed distance {}",
                    self.d_des
                ));
            }
        }
        match self.mode {
            EnumeratorMode::Exact => {
                if let Some((w, _)) = self
                    .weights
                    .iter()
                    .enumerate()
                    .find(|(_, a)| !a.is_integer())
                {
                    return inv(format!("A_{w} is not an integer in exact mode"));
                }
                let total: BigRational = self.weights.iter().cloned().sum();
                let expect = BigRational::from_integer(BigInt::one() << self.k);
                if total != expect {
                    return inv(format!("sum of A_w is {total}, expected 2^{}", self.k));
                }
            }
            EnumeratorMode::BinomialApprox => {
                if !self.weights[self.n].is_one() {
                    return inv("A_n must be 1".into());
                }
                for w in self.n.saturating_sub(self.d_des) + 1..self.n {
                    if !self.weights[w].is_zero() {
                        return inv(format!("A_{w} nonzero inside the upper gap"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d_des(&self) -> usize {
        self.d_des
    }

    pub fn mode(&self) -> EnumeratorMode {
        self.mode
    }

    /// A_w, zero outside 0..=n.
    pub fn a(&self, w: i64) -> BigRational {
        if w < 0 || w as usize > self.n {
            BigRational::zero()
        } else {
            self.weights[w as usize].clone()
        }
    }

    pub fn a_f64(&self, w: i64) -> f64 {
        if w < 0 || w as usize > self.n {
            0.0
        } else {
            self.weights_f64[w as usize]
        }
    }

    pub fn is_zero_at(&self, w: i64) -> bool {
        self.a_f64(w) == 0.0 && self.a(w).is_zero()
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.weights
    }

    /// Checks that the enumerator belongs to the (parent) code of `spec`.
    pub fn check_matches(&self, spec: &CodeSpec) -> Result<(), CodeError> {
        if self.n != spec.parent_n() || self.k != spec.parent_k() {
            return Err(CodeError::Invariant(format!(
                "enumerator is for [{},{}] but the code is {}",
                self.n, self.k, spec
            )));
        }
        Ok(())
    }

    /// Text serialization: header lines `key=value`, then `w,A_w` for nonzero A_w.
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "n={}\nk={}\nd_des={}\nmode={}\n",
            self.n, self.k, self.d_des, self.mode
        );
        for (w, a) in self.weights.iter().enumerate() {
            if !a.is_zero() {
                if a.is_integer() {
                    s.push_str(&format!("{w},{}\n", a.numer()));
                } else {
                    s.push_str(&format!("{w},{}/{}\n", a.numer(), a.denom()));
                }
            }
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self, CodeError> {
        let perr = |line: usize, msg: String| CodeError::Parse { line, msg };
        let (mut n, mut k, mut d_des, mut mode) = (None, None, None, None);
        let mut entries: Vec<(usize, usize, BigRational)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some((key, val)) = line.split_once('=') {
                let val = val.trim();
                let num = || {
                    val.parse::<usize>()
                        .map_err(|e| perr(line_no, format!("{key}: {e}")))
                };
                match key.trim() {
                    "n" => n = Some(num()?),
                    "k" => k = Some(num()?),
                    "d_des" => d_des = Some(num()?),
                    "mode" => {
                        mode = Some(
                            val.parse::<EnumeratorMode>()
                                .map_err(|_| perr(line_no, format!("mode {val:?}")))?,
                        )
                    }
                    other => return Err(perr(line_no, format!("unknown header key {other:?}"))),
                }
                continue;
            }
            let (w, a) = line
                .split_once(',')
                .ok_or_else(|| perr(line_no, "expected w,A_w".into()))?;
            let w: usize = w
                .trim()
                .parse()
                .map_err(|e| perr(line_no, format!("weight: {e}")))?;
            let a = parse_rational(a.trim())
                .ok_or_else(|| perr(line_no, format!("bad value {a:?}")))?;
            entries.push((line_no, w, a));
        }
        let missing = |what: &str| perr(0, format!("missing header {what}"));
        let n = n.ok_or_else(|| missing("n"))?;
        let k = k.ok_or_else(|| missing("k"))?;
        let d_des = d_des.ok_or_else(|| missing("d_des"))?;
        let mode = mode.ok_or_else(|| missing("mode"))?;
        let mut weights = vec![BigRational::zero(); n + 1];
        for (line, w, a) in entries {
            if w > n {
                return Err(perr(line, format!("weight {w} exceeds n = {n}")));
            }
            weights[w] = a;
        }
        Self::from_parts(n, k, d_des, mode, weights)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, CodeError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| CodeError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Enumerators shipped with the crate, keyed by (n, k).
    pub fn bundled(n: usize, k: usize) -> Option<Self> {
        let text = match (n, k) {
            (7, 4) => include_str!("../data/bch_7_4_3.txt"),
            (15, 11) => include_str!("../data/bch_15_11_3.txt"),
            (15, 7) => include_str!("../data/bch_15_7_5.txt"),
            (255, 239) => include_str!("../data/bch_255_239_5.txt"),
            _ => return None,
        };
        Some(Self::parse(text).expect("bundled enumerator is valid"))
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                None
            } else {
                Some(BigRational::new(p, q))
            }
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

/// Binary generator matrix stored as packed rows.
#[derive(Debug, Clone)]
pub struct GeneratorMatrix {
    n: usize,
    rows: Vec<Vec<u64>>,
}

/// Largest dimension accepted by [`GeneratorMatrix::weight_counts`].
pub const ENUMERATION_CAP: usize = 24;

impl GeneratorMatrix {
    pub fn from_rows(n: usize, rows: Vec<Vec<u8>>) -> Self {
        let rows = rows.into_iter().map(|r| pack_bits(n, &r)).collect();
        GeneratorMatrix { n, rows }
    }

    /// Rows are the n - deg(g) cyclic shifts of g(x).
    pub fn from_polynomial(n: usize, g: &[u8]) -> Self {
        let deg = g.len() - 1;
        let rows = (0..n - deg)
            .map(|s| {
                let mut r = vec![0u8; n];
                r[s..s + g.len()].copy_from_slice(g);
                r
            })
            .collect();
        Self::from_rows(n, rows)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.rows.len()
    }

    /// Codeword count per weight, by Gray-code walk over all 2^k messages.
    pub fn weight_counts(&self) -> Result<Vec<u64>, CodeError> {
        let k = self.k();
        if k > ENUMERATION_CAP {
            return Err(CodeError::DimensionTooLarge {
                k,
                cap: ENUMERATION_CAP,
            });
        }
        let mut counts = vec![0u64; self.n + 1];
        let mut word = vec![0u64; self.n.div_ceil(64)];
        counts[0] = 1;
        for i in 1u64..(1u64 << k) {
            let row = &self.rows[i.trailing_zeros() as usize];
            for (w, r) in word.iter_mut().zip(row) {
                *w ^= r;
            }
            let wt: u32 = word.iter().map(|x| x.count_ones()).sum();
            counts[wt as usize] += 1;
        }
        Ok(counts)
    }
}

fn pack_bits(n: usize, bits: &[u8]) -> Vec<u64> {
    let mut out = vec![0u64; n.div_ceil(64)];
    for (i, &b) in bits.iter().enumerate().take(n) {
        if b & 1 == 1 {
            out[i / 64] |= 1 << (i % 64);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(v: u64) -> BigRational {
        BigRational::from_integer(v.into())
    }

    #[test]
    fn spec_from_str() {
        let s: CodeSpec = "255,239,5".parse().unwrap();
        assert_eq!((s.n, s.k, s.t, s.b, s.d_min), (255, 239, 2, 8, 5));
        assert!("255,239".parse::<CodeSpec>().is_err());
        assert!("255,239,4".parse::<CodeSpec>().is_err());
        assert!("256,239,5".parse::<CodeSpec>().is_err());
        // k too small for b t redundancy bound
        assert!("15,5,5".parse::<CodeSpec>().is_err());
    }

    #[test]
    fn bch_constructor_dimensions() {
        assert_eq!(CodeSpec::bch(8, 2).unwrap().k, 239);
        assert_eq!(CodeSpec::bch(4, 2).unwrap().k, 7);
        assert_eq!(CodeSpec::bch(3, 1).unwrap().k, 4);
        assert_eq!(CodeSpec::bch(10, 2).unwrap().k, 1003);
        assert_eq!(CodeSpec::bch(4, 3).unwrap().k, 5);
    }

    #[test]
    fn shorten_inner_code() {
        let s = CodeSpec::new(1023, 1003, 5).unwrap().shorten(323).unwrap();
        assert_eq!((s.n, s.k, s.parent_n(), s.t), (700, 680, 1023, 2));
        assert!((s.shortened_fraction() - 323.0 / 1023.0).abs() < 1e-15);
        let p = CodeSpec::new(15, 7, 5).unwrap();
        assert_eq!(p.shorten(0).unwrap(), p);
        assert!(p.shorten(7).is_err());
    }

    #[test]
    fn approx_255() {
        let spec = CodeSpec::new(255, 239, 5).unwrap();
        let a = WeightEnumerator::approx(&spec).unwrap();
        assert!(a.a(4).is_zero());
        assert!(a.a(0).is_one());
        assert!(a.a(255).is_one());
        assert!(a.a(252).is_zero());
        // C(255,5) / 2^16 exactly
        assert_eq!(
            a.a(5),
            BigRational::new(8_637_487_551u64.into(), 65536u64.into())
        );
        assert!((a.a_f64(5) - 131_797.600_570_678_7).abs() < 1e-9);
        assert!(WeightEnumerator::approx(&spec.shorten(10).unwrap()).is_err());
    }

    #[test]
    fn hamming_enumeration() {
        let a = WeightEnumerator::exact_for(&CodeSpec::new(7, 4, 3).unwrap()).unwrap();
        let expect = [1, 0, 0, 7, 7, 0, 0, 1];
        for (w, e) in expect.iter().enumerate() {
            assert_eq!(a.a(w as i64), int(*e));
        }
    }

    #[test]
    fn bch_15_7_enumeration_size() {
        let a = WeightEnumerator::exact_for(&CodeSpec::new(15, 7, 5).unwrap()).unwrap();
        let total: BigRational = a.weights().iter().cloned().sum();
        assert_eq!(total, int(128));
        assert_eq!(a.a(5), int(18));
    }

    #[test]
    fn dimension_cap() {
        let g = GeneratorMatrix::from_rows(
            30,
            (0..25)
                .map(|i| {
                    let mut r = vec![0u8; 30];
                    r[i] = 1;
                    r
                })
                .collect(),
        );
        assert!(matches!(
            g.weight_counts(),
            Err(CodeError::DimensionTooLarge { .. })
        ));
    }

    #[test]
    fn text_round_trip() {
        let spec = CodeSpec::new(15, 7, 5).unwrap();
        for a in [
            WeightEnumerator::exact_for(&spec).unwrap(),
            WeightEnumerator::approx(&spec).unwrap(),
        ] {
            let b = WeightEnumerator::parse(&a.to_text()).unwrap();
            assert_eq!(a.weights(), b.weights());
            assert_eq!(a.mode(), b.mode());
        }
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            WeightEnumerator::parse(""),
            Err(CodeError::Parse { .. })
        ));
        let bad = "n=7\nk=4\nd_des=3\nmode=exact\n0,1\n1,1\n3,6\n4,7\n7,1\n";
        assert!(matches!(
            WeightEnumerator::parse(bad),
            Err(CodeError::Invariant(_))
        ));
        let wrong_sum = "n=7\nk=4\nd_des=3\nmode=exact\n0,1\n3,7\n4,7\n";
        assert!(matches!(
            WeightEnumerator::parse(wrong_sum),
            Err(CodeError::Invariant(_))
        ));
        assert!(WeightEnumerator::parse("n=7\nk=4\nd_des=3\nmode=exact\n0,1\n9,1\n").is_err());
        assert!(WeightEnumerator::parse("n=7\nk=4\nd_des=3\nmode=exact\n0,1\n3,x\n").is_err());
    }

    #[test]
    fn bundled_match_enumeration() {
        for (n, k, d) in [(7, 4, 3), (15, 11, 3), (15, 7, 5)] {
            let spec = CodeSpec::new(n, k, d).unwrap();
            let bundled = WeightEnumerator::bundled(n, k).unwrap();
            assert_eq!(
                bundled.weights(),
                WeightEnumerator::exact_for(&spec).unwrap().weights()
            );
        }
        let a = WeightEnumerator::bundled(255, 239).unwrap();
        assert_eq!(a.mode(), EnumeratorMode::Exact);
        assert_eq!(a.a(5), int(134_946));
        assert_eq!(a.a(6), int(5_622_750));
    }
}
