use num_rational::Ratio;

use super::ddt::build_ddt;
use super::DiffError;
use crate::toyciphers::{permute16, SPN_SBOXES};

/// Where the 4-bit S-layer sits in the cipher.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CipherStructure {
    /// The 16-bit SPN: the whole block passes through each S-layer.
    Spn { rounds: usize },
    /// The 32-bit Feistel whose round function is one SPN round.
    Feistel32 { rounds: usize },
}

impl CipherStructure {
    pub fn rounds(self) -> usize {
        match self {
            CipherStructure::Spn { rounds } | CipherStructure::Feistel32 { rounds } => rounds,
        }
    }
}

/// A chosen difference pair for one S-box. `round` and `sbox` are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathStep {
    pub round: usize,
    pub sbox: usize,
    pub in_diff: u8,
    pub out_diff: u8,
}

impl PathStep {
    pub const fn new(round: usize, sbox: usize, in_diff: u8, out_diff: u8) -> PathStep {
        PathStep { round, sbox, in_diff, out_diff }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActiveSbox {
    pub round: usize,
    pub sbox: usize,
    pub in_diff: u8,
    pub out_diff: u8,
    pub probability: Ratio<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DifferentialCharacteristic {
    pub input_difference: u64,
    /// `round_differences[i]` is `ΔU_{i+1}`; the last entry is the
    /// difference expected entering the final round.
    pub round_differences: Vec<u64>,
    pub active_sboxes: Vec<ActiveSbox>,
    pub probability: Ratio<u64>,
}

impl DifferentialCharacteristic {
    pub fn target_difference(&self) -> u64 {
        *self.round_differences.last().expect("characteristic has at least one round")
    }

    pub fn probability_f64(&self) -> f64 {
        *self.probability.numer() as f64 / *self.probability.denom() as f64
    }
}

fn s_layer(round: usize, input: u16, path: &[PathStep], active: &mut Vec<ActiveSbox>) -> Result<u16, DiffError> {
    let mut out = 0u16;
    for j in 1..=4usize {
        let shift = 16 - 4 * j;
        let dx = ((input >> shift) & 0xF) as u8;
        let step = path.iter().find(|s| s.round == round && s.sbox == j);
        match (dx, step) {
            (0, None) => {}
            (0, Some(s)) => return Err(DiffError::PathMismatch { round, sbox: j, expected: s.in_diff, actual: 0 }),
            (dx, None) => return Err(DiffError::UnassignedActiveBox { round, sbox: j, in_diff: dx }),
            (dx, Some(s)) => {
                if s.in_diff != dx {
                    return Err(DiffError::PathMismatch { round, sbox: j, expected: s.in_diff, actual: dx });
                }
                let table = build_ddt("", &SPN_SBOXES[4 * ((round - 1) % 4) + (j - 1)]);
                if table.count(dx, s.out_diff) == 0 {
                    return Err(DiffError::ZeroProbability { round, sbox: j, in_diff: dx, out_diff: s.out_diff });
                }
                active.push(ActiveSbox {
                    round,
                    sbox: j,
                    in_diff: dx,
                    out_diff: s.out_diff,
                    probability: table.probability(dx, s.out_diff),
                });
                out |= (s.out_diff as u16 & 0xF) << shift;
            }
        }
    }
    Ok(out)
}

/// Pushes `input_difference` through rounds `1..R-1` using the chosen
/// S-box pairs. Key mixing leaves differences unchanged and the
/// permutation acts on them exactly; every active S-box must have a path
/// step and every step must match the propagated input.
pub fn propagate_characteristic(
    structure: CipherStructure,
    input_difference: u64,
    path: &[PathStep],
) -> Result<DifferentialCharacteristic, DiffError> {
    let rounds = structure.rounds();
    if let Some(s) = path.iter().find(|s| s.round == 0 || s.round >= rounds || !(1..=4).contains(&s.sbox)) {
        return Err(DiffError::StepOutOfRange { round: s.round, sbox: s.sbox, rounds });
    }
    let mut active = Vec::new();
    let mut diffs = vec![input_difference];
    let mut state = input_difference;
    for r in 1..rounds {
        state = match structure {
            CipherStructure::Spn { .. } => permute16(s_layer(r, state as u16, path, &mut active)?) as u64,
            CipherStructure::Feistel32 { .. } => {
                let (l, rr) = ((state >> 16) as u16, state as u16);
                let f = permute16(s_layer(r, rr, path, &mut active)?);
                ((rr as u64) << 16) | (f ^ l) as u64
            }
        };
        diffs.push(state);
    }
    let probability = active.iter().fold(Ratio::from_integer(1), |acc, a| acc * a.probability);
    Ok(DifferentialCharacteristic { input_difference, round_differences: diffs, active_sboxes: active, probability })
}

/// Three-round path for the SPN from `ΔX = 00F0` to `ΔU_4 = 2157`.
pub fn spn_path() -> Vec<PathStep> {
    vec![
        PathStep::new(1, 3, 0xF, 0x4),
        PathStep::new(2, 2, 0x2, 0x7),
        PathStep::new(3, 2, 0x4, 0x3),
        PathStep::new(3, 3, 0x4, 0x9),
        PathStep::new(3, 4, 0x4, 0x7),
    ]
}

pub fn spn_characteristic() -> DifferentialCharacteristic {
    propagate_characteristic(CipherStructure::Spn { rounds: 4 }, 0x00F0, &spn_path())
        .expect("built-in SPN path is valid")
}

/// Three-round path for the Feistel cipher from `000000F0` to `04B40357`.
pub fn feistel32_path() -> Vec<PathStep> {
    vec![
        PathStep::new(1, 3, 0xF, 0x4),
        PathStep::new(2, 2, 0x2, 0x7),
        PathStep::new(3, 2, 0x4, 0x3),
        PathStep::new(3, 3, 0xB, 0x1),
        PathStep::new(3, 4, 0x4, 0x7),
    ]
}

pub fn feistel32_characteristic() -> DifferentialCharacteristic {
    propagate_characteristic(CipherStructure::Feistel32 { rounds: 4 }, 0x0000_00F0, &feistel32_path())
        .expect("built-in Feistel path is valid")
}
