//! Difference distribution tables, differential characteristics and the
//! counting attack on the last round.

mod attack;
mod characteristic;
mod ddt;

pub use attack::{
    count_right_pairs, differential_attack, empirical_characteristic_probability, generate_chosen_pairs,
    pairs_for_rule, prefilter_pairs, ChosenPair, DiffAttackConfig, KeyCount,
};
pub use characteristic::{
    feistel32_characteristic, feistel32_path, propagate_characteristic, spn_characteristic, spn_path, ActiveSbox,
    CipherStructure, DifferentialCharacteristic, PathStep,
};
pub use ddt::{build_ddt, DifferenceDistributionTable};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiffError {
    #[error("round {round} box {sbox}: pair {in_diff:X} -> {out_diff:X} has probability zero")]
    ZeroProbability { round: usize, sbox: usize, in_diff: u8, out_diff: u8 },
    #[error("round {round} box {sbox}: path expects input difference {expected:X}, propagation gives {actual:X}")]
    PathMismatch { round: usize, sbox: usize, expected: u8, actual: u8 },
    #[error("round {round} box {sbox} is active with input difference {in_diff:X} but has no assigned output")]
    UnassignedActiveBox { round: usize, sbox: usize, in_diff: u8 },
    #[error("path step refers to round {round} box {sbox}, outside the {rounds}-round structure")]
    StepOutOfRange { round: usize, sbox: usize, rounds: usize },
    #[error("pair {index} has input difference {actual:#x}, expected {expected:#x}")]
    WrongInputDifference { index: usize, expected: u64, actual: u64 },
    #[error("at least 1000 samples are required, got {0}")]
    TooFewSamples(usize),
}
