use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::characteristic::DifferentialCharacteristic;
use super::DiffError;
use crate::toyciphers::{BlockCipher, LastRoundTarget};

/// A chosen-plaintext pair and its two ciphertexts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChosenPair {
    pub p1: u64,
    pub p2: u64,
    pub c1: u64,
    pub c2: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffAttackConfig {
    pub characteristic: DifferentialCharacteristic,
    pub pair_count: usize,
    pub rule_constant: u64,
    /// Subkey bits the characteristic can actually distinguish.
    pub target_subkey_mask: u64,
}

impl DiffAttackConfig {
    pub const DEFAULT_RULE_CONSTANT: u64 = 15;

    /// Sizes the pair count by `N_D = c / P_D`, rounded up.
    pub fn from_rule(characteristic: DifferentialCharacteristic, c: u64, mask: u64) -> Self {
        let pair_count = pairs_for_rule(c, characteristic.probability);
        DiffAttackConfig { characteristic, pair_count, rule_constant: c, target_subkey_mask: mask }
    }
}

/// `ceil(c / P_D)`.
pub fn pairs_for_rule(c: u64, p: Ratio<u64>) -> usize {
    (Ratio::from_integer(c) / p).ceil().to_integer() as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KeyCount {
    pub key: u64,
    pub count: usize,
}

/// Encrypts `n` random plaintext pairs `(p, p ^ dx)`.
pub fn generate_chosen_pairs<C: BlockCipher + ?Sized>(
    cipher: &C,
    dx: u64,
    n: usize,
    rng: &mut impl Rng,
) -> Vec<ChosenPair> {
    let mask = cipher.block_mask();
    (0..n)
        .map(|_| {
            let p1 = rng.gen::<u64>() & mask;
            let p2 = p1 ^ dx;
            ChosenPair { p1, p2, c1: cipher.encrypt_block(p1), c2: cipher.encrypt_block(p2) }
        })
        .collect()
}

/// Keeps only the ciphertext pairs that some guess could turn into a
/// right pair. Dropping the rest leaves every count unchanged.
pub fn prefilter_pairs<C: LastRoundTarget + ?Sized>(cipher: &C, pairs: &[ChosenPair], target: u64) -> Vec<(u64, u64)> {
    pairs.iter().filter(|p| cipher.could_match(p.c1, p.c2, target)).map(|p| (p.c1, p.c2)).collect()
}

/// Number of ciphertext pairs whose partial decryption under `guess`
/// differs by exactly `target`.
pub fn count_right_pairs<C: LastRoundTarget + ?Sized>(
    cipher: &C,
    ciphertexts: &[(u64, u64)],
    target: u64,
    guess: u64,
) -> usize {
    ciphertexts
        .iter()
        .filter(|&&(c1, c2)| {
            cipher.partial_decrypt_last_round(c1, guess) ^ cipher.partial_decrypt_last_round(c2, guess) == target
        })
        .count()
}

fn check_pairs(pairs: &[ChosenPair], dx: u64) -> Result<(), DiffError> {
    match pairs.iter().position(|p| p.p1 ^ p.p2 != dx) {
        Some(index) => {
            Err(DiffError::WrongInputDifference { index, expected: dx, actual: pairs[index].p1 ^ pairs[index].p2 })
        }
        None => Ok(()),
    }
}

/// Counts right pairs for every last-round subkey and ranks the keys by
/// count descending, then key ascending.
pub fn differential_attack<C: LastRoundTarget + ?Sized>(
    cipher: &C,
    config: &DiffAttackConfig,
    pairs: &[ChosenPair],
) -> Result<Vec<KeyCount>, DiffError> {
    let ch = &config.characteristic;
    check_pairs(pairs, ch.input_difference)?;
    let target = ch.target_difference();
    let filtered = prefilter_pairs(cipher, pairs, target);
    let space = 1u64 << cipher.last_round_key_bits();
    let mut table: Vec<KeyCount> = (0..space)
        .into_par_iter()
        .map(|key| KeyCount { key, count: count_right_pairs(cipher, &filtered, target, key) })
        .collect();
    table.sort_by(|a, b| b.count.cmp(&a.count).then(a.key.cmp(&b.key)));
    Ok(table)
}

/// Fraction of random pairs with input difference `ΔX` whose state
/// entering the last round differs by the characteristic's target.
pub fn empirical_characteristic_probability<C: LastRoundTarget + ?Sized>(
    cipher: &C,
    characteristic: &DifferentialCharacteristic,
    samples: usize,
    seed: u64,
) -> Result<Ratio<u64>, DiffError> {
    if samples < 1000 {
        return Err(DiffError::TooFewSamples(samples));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mask = cipher.block_mask();
    let dx = characteristic.input_difference;
    let target = characteristic.target_difference();
    let hits = (0..samples)
        .filter(|_| {
            let p = rng.gen::<u64>() & mask;
            cipher.pre_last_round_state(p) ^ cipher.pre_last_round_state(p ^ dx) == target
        })
        .count();
    Ok(Ratio::new(hits as u64, samples as u64))
}
