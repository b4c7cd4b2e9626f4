//! Packed binary words and received words over {0, 1, ?}.

use std::fmt;

/// Binary word of fixed length, bit i at word i / 64.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryWord {
    n: usize,
    bits: Vec<u64>,
}

impl BinaryWord {
    pub fn zeros(n: usize) -> Self {
        BinaryWord {
            n,
            bits: vec![0; n.div_ceil(64)],
        }
    }

    pub fn from_positions(n: usize, positions: impl IntoIterator<Item = usize>) -> Self {
        let mut w = Self::zeros(n);
        for i in positions {
            w.set(i, true);
        }
        w
    }

    /// Low `n` bits of `mask`; n <= 64.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        assert!(n <= 64);
        let mut w = Self::zeros(n);
        if n > 0 {
            w.bits[0] = mask;
            w.trim();
        }
        w
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.n);
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, v: bool) {
        assert!(i < self.n, "bit {i} out of range for length {}", self.n);
        let m = 1u64 << (i % 64);
        if v {
            self.bits[i / 64] |= m;
        } else {
            self.bits[i / 64] &= !m;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.n);
        self.bits[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn weight(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of ones in positions lo..hi.
    pub fn weight_in(&self, lo: usize, hi: usize) -> usize {
        (lo..hi.min(self.n)).filter(|&i| self.get(i)).count()
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let i = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * 64 + i)
            })
        })
    }

    pub fn xor(&self, other: &BinaryWord) -> BinaryWord {
        assert_eq!(self.n, other.n);
        BinaryWord {
            n: self.n,
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(a, b)| a ^ b)
                .collect(),
        }
    }

    pub fn xor_assign(&mut self, other: &BinaryWord) {
        assert_eq!(self.n, other.n);
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a ^= b;
        }
    }

    /// Weight of (self xor other) restricted to positions where `mask` is zero.
    pub fn distance_outside(&self, other: &BinaryWord, mask: &BinaryWord) -> usize {
        self.bits
            .iter()
            .zip(&other.bits)
            .zip(&mask.bits)
            .map(|((a, b), m)| ((a ^ b) & !m).count_ones() as usize)
            .sum()
    }

    /// Whether self and other differ anywhere inside `mask`.
    pub fn differs_within(&self, other: &BinaryWord, mask: &BinaryWord) -> bool {
        self.bits
            .iter()
            .zip(&other.bits)
            .zip(&mask.bits)
            .any(|((a, b), m)| (a ^ b) & m != 0)
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|w| *w == 0)
    }

    /// Low 64 bits.
    pub fn low_mask(&self) -> u64 {
        self.bits.first().copied().unwrap_or(0)
    }

    fn trim(&mut self) {
        let r = self.n % 64;
        if r != 0 {
            if let Some(last) = self.bits.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }
}

impl fmt::Debug for BinaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "BinaryWord(n={}, ones={:?})",
            self.n,
            self.ones().collect::<Vec<_>>()
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symbol {
    Zero,
    One,
    Erased,
}

/// Received word: hard decisions, erasure flags and an optional anchor set.
///
/// Erased positions carry a zero in `hard`. Anchors are never erased.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TernaryWord {
    hard: BinaryWord,
    erased: BinaryWord,
    erasures: Vec<usize>,
    anchors: Option<BinaryWord>,
}

impl TernaryWord {
    pub fn new(
        hard: BinaryWord,
        erased: BinaryWord,
        anchors: Option<BinaryWord>,
    ) -> Result<Self, String> {
        let n = hard.len();
        if erased.len() != n || anchors.as_ref().is_some_and(|a| a.len() != n) {
            return Err("length mismatch".into());
        }
        let mut hard = hard;
        let erasures: Vec<usize> = erased.ones().collect();
        for &i in &erasures {
            hard.set(i, false);
        }
        if let Some(a) = &anchors {
            if a.ones().any(|i| erased.get(i)) {
                return Err("anchor on an erased position".into());
            }
        }
        Ok(TernaryWord {
            hard,
            erased,
            erasures,
            anchors,
        })
    }

    pub fn from_symbols(symbols: &[Symbol]) -> Self {
        let n = symbols.len();
        let hard = BinaryWord::from_positions(n, (0..n).filter(|&i| symbols[i] == Symbol::One));
        let erased =
            BinaryWord::from_positions(n, (0..n).filter(|&i| symbols[i] == Symbol::Erased));
        Self::new(hard, erased, None).expect("consistent by construction")
    }

    pub fn with_anchors(self, anchors: BinaryWord) -> Result<Self, String> {
        Self::new(self.hard, self.erased, Some(anchors))
    }

    pub fn len(&self) -> usize {
        self.hard.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hard.is_empty()
    }

    pub fn hard(&self) -> &BinaryWord {
        &self.hard
    }

    pub fn erased(&self) -> &BinaryWord {
        &self.erased
    }

    pub fn erasures(&self) -> &[usize] {
        &self.erasures
    }

    pub fn num_erasures(&self) -> usize {
        self.erasures.len()
    }

    pub fn anchors(&self) -> Option<&BinaryWord> {
        self.anchors.as_ref()
    }

    pub fn symbol(&self, i: usize) -> Symbol {
        if self.erased.get(i) {
            Symbol::Erased
        } else if self.hard.get(i) {
            Symbol::One
        } else {
            Symbol::Zero
        }
    }

    /// The hard word with erasure j set to bit j of `fill`.
    pub fn filled(&self, fill: &[bool]) -> BinaryWord {
        assert_eq!(fill.len(), self.erasures.len());
        let mut w = self.hard.clone();
        for (&i, &b) in self.erasures.iter().zip(fill) {
            if b {
                w.set(i, true);
            }
        }
        w
    }

    /// Distance to `c` over the non-erased positions.
    pub fn distance(&self, c: &BinaryWord) -> usize {
        self.hard.distance_outside(c, &self.erased)
    }

    /// Whether `c` disagrees with the received word on an anchor.
    pub fn conflicts_with_anchor(&self, c: &BinaryWord) -> bool {
        self.anchors
            .as_ref()
            .is_some_and(|a| self.hard.differs_within(c, a))
    }
}
