//! Executable decoders, Monte-Carlo simulation and the exhaustive oracle.

mod bch;
mod eaed;
mod montecarlo;
mod oracle;
mod word;

use thiserror::Error;

pub use bch::{
    bdd_codeword, bdd_decode, berlekamp_massey, chien_search, syndromes, BchCode, DecodeOutcome,
};
pub use eaed::{
    candidates, decode_with, eaed_a_decode, eaed_decode, resolve_failure, select, test_patterns,
    DecoderOptions, Selection,
};
pub use montecarlo::{
    receive, simulate_frame, simulate_frames, DecoderKind, SimConfig, SimResult, Tally,
};
pub use oracle::{
    brute_force_cell, brute_force_dtp, nearest_in_sphere, AnchorModel, BruteForceDtp, OracleCell,
    ORACLE_CAP,
};
pub use word::{BinaryWord, Symbol, TernaryWord};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("oracle cell (u={u}, e={e}) needs {size} patterns, above the cap")]
    OracleCap { u: usize, e: usize, size: u128 },
}
