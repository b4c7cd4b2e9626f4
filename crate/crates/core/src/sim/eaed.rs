//! Error-and-erasure decoding with two complementary test patterns.

use rand::Rng;

use super::bch::{BchCode, DecodeOutcome};
use super::word::{BinaryWord, TernaryWord};

/// Which candidate the selection rule keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    Fail,
    First,
    Second,
    /// Equal distances: either one with probability 1/2.
    Tie,
}

/// Selection among the surviving candidates by distance over non-erased positions.
pub fn select(y: &TernaryWord, w1: Option<&BinaryWord>, w2: Option<&BinaryWord>) -> Selection {
    match (w1, w2) {
        (None, None) => Selection::Fail,
        (Some(_), None) => Selection::First,
        (None, Some(_)) => Selection::Second,
        (Some(a), Some(b)) => match y.distance(a).cmp(&y.distance(b)) {
            std::cmp::Ordering::Less => Selection::First,
            std::cmp::Ordering::Greater => Selection::Second,
            std::cmp::Ordering::Equal => Selection::Tie,
        },
    }
}

/// The two test patterns for filling `fill` and its complement.
pub fn test_patterns(y: &TernaryWord, fill: &[bool]) -> (BinaryWord, BinaryWord) {
    let comp: Vec<bool> = fill.iter().map(|b| !b).collect();
    (y.filled(fill), y.filled(&comp))
}

/// BDD on both test patterns; with `md`, candidates touching an anchor are dropped.
pub fn candidates(
    code: &BchCode,
    y: &TernaryWord,
    fill: &[bool],
    md: bool,
) -> [Option<BinaryWord>; 2] {
    let (y1, y2) = test_patterns(y, fill);
    let keep = |w: Option<BinaryWord>| w.filter(|c| !(md && y.conflicts_with_anchor(c)));
    [keep(code.bdd(&y1)), keep(code.bdd(&y2))]
}

/// Decoder switches shared by the executable decoders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DecoderOptions {
    /// Anchor-based miscorrection detection.
    pub md: bool,
    /// More erasures than this is a failure without decoding.
    pub erasure_cap: Option<usize>,
}

/// Failure: keep y and resolve every erasure by a fair coin.
pub fn resolve_failure<R: Rng + ?Sized>(y: &TernaryWord, rng: &mut R) -> DecodeOutcome {
    let fill: Vec<bool> = (0..y.num_erasures()).map(|_| rng.random()).collect();
    DecodeOutcome::from_estimate(y.filled(&fill), false)
}

pub fn decode_with<R: Rng + ?Sized>(
    y: &TernaryWord,
    code: &BchCode,
    opts: DecoderOptions,
    rng: &mut R,
) -> DecodeOutcome {
    let e = y.num_erasures();
    if opts.erasure_cap.is_some_and(|cap| e > cap) {
        return resolve_failure(y, rng);
    }
    if e == 0 {
        let c = code
            .bdd(y.hard())
            .filter(|c| !(opts.md && y.conflicts_with_anchor(c)));
        return match c {
            Some(c) => DecodeOutcome::from_estimate(c, true),
            None => DecodeOutcome::from_estimate(y.hard().clone(), false),
        };
    }
    let fill: Vec<bool> = (0..e).map(|_| rng.random()).collect();
    let [w1, w2] = candidates(code, y, &fill, opts.md);
    let pick = match select(y, w1.as_ref(), w2.as_ref()) {
        Selection::Fail => return resolve_failure(y, rng),
        Selection::First => w1,
        Selection::Second => w2,
        Selection::Tie => {
            if rng.random::<bool>() {
                w1
            } else {
                w2
            }
        }
    };
    DecodeOutcome::from_estimate(pick.expect("selected candidate exists"), true)
}

pub fn eaed_decode<R: Rng + ?Sized>(y: &TernaryWord, code: &BchCode, rng: &mut R) -> DecodeOutcome {
    decode_with(y, code, DecoderOptions::default(), rng)
}

pub fn eaed_a_decode<R: Rng + ?Sized>(
    y: &TernaryWord,
    code: &BchCode,
    rng: &mut R,
) -> DecodeOutcome {
    decode_with(
        y,
        code,
        DecoderOptions {
            md: true,
            erasure_cap: None,
        },
        rng,
    )
}
