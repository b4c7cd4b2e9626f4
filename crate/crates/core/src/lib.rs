//! Closed-form decoding transition probabilities (DTPs) of binary BCH codes under
//! bounded-distance decoding, error-and-erasure decoding and their anchor-bit variants,
//! together with executable decoders, Monte-Carlo and exhaustive oracles, and
//! post-FEC BER/FER evaluation.

pub mod channel;
pub mod code;
pub mod dtp;
pub mod field;
pub mod metrics;
pub mod numerics;
pub mod par;
pub mod sim;
