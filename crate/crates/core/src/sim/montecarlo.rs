//! Seeded Monte-Carlo frame simulation over the quantized AWGN channel.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::bch::BchCode;
use super::eaed::{decode_with, DecoderOptions};
use super::word::{BinaryWord, TernaryWord};
use super::SimError;
use crate::channel::sigma_from_ebn0;
use crate::code::CodeSpec;
use crate::dtp::Outcome;
use crate::par::Exec;

/// Decoder variants shared by the simulator and the analytic sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecoderKind {
    Bdd,
    BddA,
    Eaed,
    EaedA,
}

impl DecoderKind {
    pub const ALL: [DecoderKind; 4] = [
        DecoderKind::Bdd,
        DecoderKind::BddA,
        DecoderKind::Eaed,
        DecoderKind::EaedA,
    ];

    pub fn uses_erasures(self) -> bool {
        matches!(self, DecoderKind::Eaed | DecoderKind::EaedA)
    }

    pub fn uses_anchors(self) -> bool {
        matches!(self, DecoderKind::BddA | DecoderKind::EaedA)
    }
}

impl fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecoderKind::Bdd => "bdd",
            DecoderKind::BddA => "bdd-a",
            DecoderKind::Eaed => "eaed",
            DecoderKind::EaedA => "eaed-a",
        })
    }
}

impl FromStr for DecoderKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "bdd" => Ok(DecoderKind::Bdd),
            "bdd-a" | "bdda" => Ok(DecoderKind::BddA),
            "eaed" => Ok(DecoderKind::Eaed),
            "eaed-a" | "eaeda" => Ok(DecoderKind::EaedA),
            other => Err(format!(
                "unknown decoder '{other}' (bdd, bdd-a, eaed, eaed-a)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub spec: CodeSpec,
    pub ebn0_db: f64,
    /// Erasure threshold; ignored by the BDD variants.
    pub t: f64,
    /// Anchor threshold for the anchored variants.
    pub t_a: Option<f64>,
    pub decoder: DecoderKind,
    pub frames: u64,
    pub seed: u64,
    pub erasure_cap: Option<usize>,
    #[serde(skip, default)]
    pub exec: Exec,
}

impl SimConfig {
    pub fn new(spec: CodeSpec, decoder: DecoderKind, ebn0_db: f64, frames: u64, seed: u64) -> Self {
        SimConfig {
            spec,
            ebn0_db,
            t: 0.0,
            t_a: None,
            decoder,
            frames,
            seed,
            erasure_cap: None,
            exec: Exec::default(),
        }
    }

    pub fn thresholds(mut self, t: f64, t_a: Option<f64>) -> Self {
        self.t = t;
        self.t_a = t_a;
        self
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.frames == 0 {
            return Err(SimError::Config("frames must be at least 1".into()));
        }
        if !self.ebn0_db.is_finite() {
            return Err(SimError::Config("Eb/N0 must be finite".into()));
        }
        if self.decoder.uses_erasures() && !(self.t >= 0.0 && self.t < 1.0) {
            return Err(SimError::Config(format!(
                "erasure threshold T = {} outside [0, 1)",
                self.t
            )));
        }
        if self.decoder.uses_anchors() {
            let floor = if self.decoder.uses_erasures() {
                self.t
            } else {
                0.0
            };
            match self.t_a {
                Some(ta) if ta > floor => {}
                Some(ta) => {
                    return Err(SimError::Config(format!(
                        "anchor threshold {ta} must exceed T = {floor}"
                    )))
                }
                None => {
                    return Err(SimError::Config(format!(
                        "decoder {} needs an anchor threshold",
                        self.decoder
                    )))
                }
            }
        }
        Ok(())
    }
}

/// Integer tallies; merging is exact, so any reduction order gives the same result.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub frames: u64,
    pub bit_errors: u64,
    pub bit_errors_sq: u64,
    pub info_bit_errors: u64,
    pub info_bit_errors_sq: u64,
    pub frame_errors: u64,
    pub mc_frames: u64,
    pub mc_bit_errors: u64,
    pub fail_frames: u64,
    pub channel_errors: u64,
    pub erasures: u64,
}

impl Tally {
    pub fn merge(self, o: Tally) -> Tally {
        Tally {
            frames: self.frames + o.frames,
            bit_errors: self.bit_errors + o.bit_errors,
            bit_errors_sq: self.bit_errors_sq + o.bit_errors_sq,
            info_bit_errors: self.info_bit_errors + o.info_bit_errors,
            info_bit_errors_sq: self.info_bit_errors_sq + o.info_bit_errors_sq,
            frame_errors: self.frame_errors + o.frame_errors,
            mc_frames: self.mc_frames + o.mc_frames,
            mc_bit_errors: self.mc_bit_errors + o.mc_bit_errors,
            fail_frames: self.fail_frames + o.fail_frames,
            channel_errors: self.channel_errors + o.channel_errors,
            erasures: self.erasures + o.erasures,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub config: SimConfig,
    pub tally: Tally,
    /// Per codeword bit.
    pub ber: f64,
    /// Per information bit (the last k positions of the systematic word).
    pub ber_info: f64,
    pub fer: f64,
    pub mc_ber: f64,
    pub ber_se: f64,
    pub ber_info_se: f64,
    pub fer_se: f64,
}

fn mean_se(sum: u64, sum_sq: u64, frames: u64, scale: f64) -> (f64, f64) {
    let f = frames as f64;
    let m = sum as f64 / f;
    let var = if frames > 1 {
        ((sum_sq as f64 / f - m * m) * f / (f - 1.0)).max(0.0)
    } else {
        0.0
    };
    (m / scale, (var / f).sqrt() / scale)
}

impl SimResult {
    fn from_tally(config: SimConfig, tally: Tally) -> Self {
        let n = config.spec.n as f64;
        let k = config.spec.k as f64;
        let (ber, ber_se) = mean_se(tally.bit_errors, tally.bit_errors_sq, tally.frames, n);
        let (ber_info, ber_info_se) = mean_se(
            tally.info_bit_errors,
            tally.info_bit_errors_sq,
            tally.frames,
            k,
        );
        let f = tally.frames as f64;
        let fer = tally.frame_errors as f64 / f;
        SimResult {
            config,
            tally,
            ber,
            ber_info,
            fer,
            mc_ber: tally.mc_bit_errors as f64 / (f * n),
            ber_se,
            ber_info_se,
            fer_se: (fer * (1.0 - fer) / f).sqrt(),
        }
    }
}

/// Channel output for one frame of the all-zero codeword (BPSK +1).
pub fn receive(
    rng: &mut ChaCha8Rng,
    n: usize,
    sigma: f64,
    t: Option<f64>,
    t_a: Option<f64>,
) -> TernaryWord {
    let mut hard = BinaryWord::zeros(n);
    let mut erased = BinaryWord::zeros(n);
    let mut anchors = t_a.map(|_| BinaryWord::zeros(n));
    for i in 0..n {
        let z: f64 = StandardNormal.sample(rng);
        let y = 1.0 + sigma * z;
        let mag = y.abs();
        if t.is_some_and(|t| mag <= t) {
            erased.set(i, true);
            continue;
        }
        if y < 0.0 {
            hard.set(i, true);
        }
        if let (Some(a), Some(ta)) = (anchors.as_mut(), t_a) {
            if mag > ta {
                a.set(i, true);
            }
        }
    }
    TernaryWord::new(hard, erased, anchors).expect("anchors are never erased when T_a > T")
}

/// Frame `index` of a run: its generator is ChaCha8 seeded from `seed` on stream `index`,
/// so noise and fillings depend only on (seed, index, draw order).
pub fn simulate_frame(cfg: &SimConfig, code: &BchCode, sigma: f64, index: u64) -> Tally {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index);
    let n = cfg.spec.n;
    let t = cfg.decoder.uses_erasures().then_some(cfg.t);
    let t_a = if cfg.decoder.uses_anchors() {
        cfg.t_a
    } else {
        None
    };
    let y = receive(&mut rng, n, sigma, t, t_a);
    let opts = DecoderOptions {
        md: cfg.decoder.uses_anchors(),
        erasure_cap: cfg.erasure_cap,
    };
    let out = decode_with(&y, code, opts, &mut rng);
    let bits = out.residual() as u64;
    let info = out.estimate.weight_in(n - cfg.spec.k, n) as u64;
    let mut tally = Tally {
        frames: 1,
        bit_errors: bits,
        bit_errors_sq: bits * bits,
        info_bit_errors: info,
        info_bit_errors_sq: info * info,
        frame_errors: (bits > 0) as u64,
        channel_errors: y.hard().weight() as u64,
        erasures: y.num_erasures() as u64,
        ..Tally::default()
    };
    match out.kind {
        Outcome::Mc => {
            tally.mc_frames = 1;
            tally.mc_bit_errors = bits;
        }
        Outcome::Fail => tally.fail_frames = 1,
        Outcome::Succ => {}
    }
    tally
}

const CHUNK: usize = 1024;

pub fn simulate_frames(cfg: &SimConfig) -> Result<SimResult, SimError> {
    cfg.validate()?;
    let code = BchCode::new(cfg.spec)?;
    let sigma = sigma_from_ebn0(cfg.ebn0_db, cfg.spec.rate());
    let tally = cfg.exec.map_reduce(
        cfg.frames as usize,
        CHUNK,
        Tally::default(),
        |i| simulate_frame(cfg, &code, sigma, i as u64),
        Tally::merge,
    );
    Ok(SimResult::from_tally(*cfg, tally))
}
