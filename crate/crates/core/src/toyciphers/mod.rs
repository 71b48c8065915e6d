//! Keyed block permutations used as attack targets.
//!
//! Blocks are carried in a `u64` regardless of width; bit 1 of a block is
//! its most significant bit.

mod feistel;
mod spn;

pub use feistel::{
    CubeCipher, CubeCore, Feistel32, FeistelNetwork, FeistelTrace, HypCipher, RijndaelCore, RoundFunction,
    SpnRoundFunction,
};
pub use spn::{
    permute16, s_layer_can_map, substitute16, substitute16_inverse, BasicSpn, SpnTrace, PERMUTATION, SPN_SBOXES,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CipherError {
    #[error("expected {expected} subkeys, got {got}")]
    WrongKeyCount { expected: usize, got: usize },
    #[error("unsupported round count {rounds} (allowed: {allowed})")]
    UnsupportedRounds { rounds: usize, allowed: &'static str },
    #[error("subkey {index} = {value:#x} exceeds {bits} bits")]
    KeyOutOfRange { index: usize, value: u64, bits: u32 },
}

/// A keyed, invertible permutation on `block_bits`-bit words.
pub trait BlockCipher: Send + Sync {
    fn block_bits(&self) -> u32;
    fn rounds(&self) -> usize;
    fn encrypt_block(&self, p: u64) -> u64;
    fn decrypt_block(&self, c: u64) -> u64;

    fn block_mask(&self) -> u64 {
        mask(self.block_bits())
    }
}

/// Hooks needed by last-round key-recovery attacks.
pub trait LastRoundTarget: BlockCipher {
    /// Width of the subkey guessed in the last round.
    fn last_round_key_bits(&self) -> u32;

    /// The state entering the last round, recovered from a ciphertext with
    /// a guessed last-round subkey.
    ///
    /// For an SPN this is the input of the final S-layer. For a Feistel
    /// cipher it packs `L_{R-1} = R_c ^ F(L_c, k)` high and `R_{R-1} = L_c`
    /// low.
    fn partial_decrypt_last_round(&self, c: u64, guess: u64) -> u64;

    /// The same state computed from the plaintext by a forward trace.
    fn pre_last_round_state(&self, p: u64) -> u64;

    /// Returns false only if no guess can make the pair `(c1, c2)` reach
    /// `target` as its pre-last-round difference.
    fn could_match(&self, _c1: u64, _c2: u64, _target: u64) -> bool {
        true
    }

    /// True if guesses `a` and `b` give the same right-pair count on every
    /// possible set of pairs for this target difference.
    fn guesses_indistinguishable(&self, a: u64, b: u64, _target: u64) -> bool {
        a == b
    }
}

pub(crate) fn mask(bits: u32) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

pub(crate) fn check_keys(keys: &[u64], expected: usize, bits: u32) -> Result<(), CipherError> {
    if keys.len() != expected {
        return Err(CipherError::WrongKeyCount { expected, got: keys.len() });
    }
    for (index, &value) in keys.iter().enumerate() {
        if value & !mask(bits) != 0 {
            return Err(CipherError::KeyOutOfRange { index, value, bits });
        }
    }
    Ok(())
}

impl<T: BlockCipher + ?Sized> BlockCipher for &T {
    fn block_bits(&self) -> u32 {
        (**self).block_bits()
    }
    fn rounds(&self) -> usize {
        (**self).rounds()
    }
    fn encrypt_block(&self, p: u64) -> u64 {
        (**self).encrypt_block(p)
    }
    fn decrypt_block(&self, c: u64) -> u64 {
        (**self).decrypt_block(c)
    }
}

impl<T: LastRoundTarget + ?Sized> LastRoundTarget for &T {
    fn last_round_key_bits(&self) -> u32 {
        (**self).last_round_key_bits()
    }
    fn partial_decrypt_last_round(&self, c: u64, guess: u64) -> u64 {
        (**self).partial_decrypt_last_round(c, guess)
    }
    fn pre_last_round_state(&self, p: u64) -> u64 {
        (**self).pre_last_round_state(p)
    }
    fn could_match(&self, c1: u64, c2: u64, target: u64) -> bool {
        (**self).could_match(c1, c2, target)
    }
    fn guesses_indistinguishable(&self, a: u64, b: u64, target: u64) -> bool {
        (**self).guesses_indistinguishable(a, b, target)
    }
}

/// Nibble-wise key equivalence: a nibble whose S-box sees input difference
/// 0 is unobservable, and where `key_before_sbox` holds, `k` and `k ^ dx`
/// give identical output differences.
pub fn nibble_keys_equivalent(a: u64, b: u64, dx: u64, nibbles: u32, key_before_sbox: bool) -> bool {
    (0..nibbles).all(|j| {
        let d = (a ^ b) >> (4 * j) & 0xF;
        let x = dx >> (4 * j) & 0xF;
        x == 0 || d == 0 || (key_before_sbox && d == x)
    })
}
