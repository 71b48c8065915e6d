use super::spn::{permute16, substitute16};
use super::{check_keys, mask, nibble_keys_equivalent, BlockCipher, CipherError, LastRoundTarget};
use crate::finite_math::{gf_mul, rijndael_sbox, FieldPolynomial, Gf256};

/// The keyed function `F_i` applied to the right half.
pub trait RoundFunction: Send + Sync {
    fn half_bits(&self) -> u32;
    fn key_bits(&self) -> u32;
    /// `round` is zero-based.
    fn apply(&self, round: usize, x: u64, key: u64) -> u64;

    /// True if keys `a` and `b` yield the same output difference for every
    /// input pair with difference `dx`.
    fn keys_equivalent(&self, a: u64, b: u64, _dx: u64) -> bool {
        a == b
    }
}

/// `F_r(x, K) = Permute(Substitute_r(x ^ K))`, the SPN round on 16 bits.
#[derive(Debug, Clone, Copy, Default)]
pub struct SpnRoundFunction;

impl RoundFunction for SpnRoundFunction {
    fn half_bits(&self) -> u32 {
        16
    }
    fn key_bits(&self) -> u32 {
        16
    }
    fn apply(&self, round: usize, x: u64, key: u64) -> u64 {
        permute16(substitute16(round % 4 + 1, (x ^ key) as u16)) as u64
    }

    fn keys_equivalent(&self, a: u64, b: u64, dx: u64) -> bool {
        nibble_keys_equivalent(a, b, dx, 4, true)
    }
}

/// `F(x, k) = S(x ^ k)` with the Rijndael S-box.
#[derive(Debug, Clone, Copy, Default)]
pub struct RijndaelCore;

impl RoundFunction for RijndaelCore {
    fn half_bits(&self) -> u32 {
        8
    }
    fn key_bits(&self) -> u32 {
        8
    }
    fn apply(&self, _round: usize, x: u64, key: u64) -> u64 {
        rijndael_sbox().forward[((x ^ key) & 0xFF) as usize] as u64
    }

    fn keys_equivalent(&self, a: u64, b: u64, dx: u64) -> bool {
        byte_keys_equivalent(a, b, dx)
    }
}

fn byte_keys_equivalent(a: u64, b: u64, dx: u64) -> bool {
    let d = (a ^ b) & 0xFF;
    let dx = dx & 0xFF;
    dx == 0 || d == 0 || d == dx
}

/// `F(x, k) = (x ^ k)^3` in GF(2^8). Not a bijection, which a Feistel
/// network does not need.
#[derive(Debug, Clone)]
pub struct CubeCore {
    cubes: [u8; 256],
}

impl CubeCore {
    pub fn new() -> CubeCore {
        let mut cubes = [0u8; 256];
        for (x, slot) in cubes.iter_mut().enumerate() {
            let g = Gf256(x as u8);
            let m = FieldPolynomial::RIJNDAEL;
            *slot = gf_mul(gf_mul(g, g, m), g, m).0;
        }
        CubeCore { cubes }
    }

    pub fn cube(&self, x: u8) -> u8 {
        self.cubes[x as usize]
    }
}

impl Default for CubeCore {
    fn default() -> Self {
        Self::new()
    }
}

impl RoundFunction for CubeCore {
    fn half_bits(&self) -> u32 {
        8
    }
    fn key_bits(&self) -> u32 {
        8
    }
    fn apply(&self, _round: usize, x: u64, key: u64) -> u64 {
        self.cubes[((x ^ key) & 0xFF) as usize] as u64
    }

    fn keys_equivalent(&self, a: u64, b: u64, dx: u64) -> bool {
        byte_keys_equivalent(a, b, dx)
    }
}

/// A balanced Feistel network: `L_i = R_{i-1}`, `R_i = F_i(R_{i-1}, K_i) ^ L_{i-1}`,
/// with ciphertext `(L_R, R_R)`.
#[derive(Debug, Clone)]
pub struct FeistelNetwork<F> {
    f: F,
    keys: Vec<u64>,
}

/// Half-block states `(L_i, R_i)` for `i = 0..=R`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeistelTrace {
    pub states: Vec<(u64, u64)>,
}

pub type Feistel32 = FeistelNetwork<SpnRoundFunction>;
pub type HypCipher = FeistelNetwork<RijndaelCore>;
pub type CubeCipher = FeistelNetwork<CubeCore>;

impl<F: RoundFunction> FeistelNetwork<F> {
    pub fn with_round_function(f: F, keys: Vec<u64>) -> Result<Self, CipherError> {
        check_keys(&keys, keys.len(), f.key_bits())?;
        if keys.is_empty() {
            return Err(CipherError::UnsupportedRounds { rounds: 0, allowed: "at least 1" });
        }
        Ok(FeistelNetwork { f, keys })
    }

    pub fn round_function(&self) -> &F {
        &self.f
    }

    pub fn keys(&self) -> &[u64] {
        &self.keys
    }

    fn half(&self) -> u32 {
        self.f.half_bits()
    }

    pub fn split(&self, block: u64) -> (u64, u64) {
        let h = self.half();
        (block >> h & mask(h), block & mask(h))
    }

    pub fn join(&self, l: u64, r: u64) -> u64 {
        (l << self.half()) | r
    }

    pub fn trace(&self, p: u64) -> FeistelTrace {
        let (mut l, mut r) = self.split(p);
        let mut states = Vec::with_capacity(self.keys.len() + 1);
        states.push((l, r));
        for (i, &k) in self.keys.iter().enumerate() {
            (l, r) = (r, self.f.apply(i, r, k) ^ l);
            states.push((l, r));
        }
        FeistelTrace { states }
    }
}

impl Feistel32 {
    pub fn new(keys: [u16; 4]) -> Feistel32 {
        FeistelNetwork { f: SpnRoundFunction, keys: keys.iter().map(|&k| k as u64).collect() }
    }
}

impl HypCipher {
    /// One 8-bit subkey per round, 2 to 4 rounds.
    pub fn new(keys: &[u8]) -> Result<HypCipher, CipherError> {
        if !(2..=4).contains(&keys.len()) {
            return Err(CipherError::UnsupportedRounds { rounds: keys.len(), allowed: "2..=4" });
        }
        Self::with_round_function(RijndaelCore, keys.iter().map(|&k| k as u64).collect())
    }
}

impl CubeCipher {
    /// One 8-bit subkey per round, 2 or 3 rounds.
    pub fn new(keys: &[u8]) -> Result<CubeCipher, CipherError> {
        if !(2..=3).contains(&keys.len()) {
            return Err(CipherError::UnsupportedRounds { rounds: keys.len(), allowed: "2..=3" });
        }
        Self::with_round_function(CubeCore::new(), keys.iter().map(|&k| k as u64).collect())
    }
}

impl<F: RoundFunction> BlockCipher for FeistelNetwork<F> {
    fn block_bits(&self) -> u32 {
        2 * self.half()
    }

    fn rounds(&self) -> usize {
        self.keys.len()
    }

    fn encrypt_block(&self, p: u64) -> u64 {
        let (mut l, mut r) = self.split(p);
        for (i, &k) in self.keys.iter().enumerate() {
            (l, r) = (r, self.f.apply(i, r, k) ^ l);
        }
        self.join(l, r)
    }

    fn decrypt_block(&self, c: u64) -> u64 {
        let (mut l, mut r) = self.split(c);
        for (i, &k) in self.keys.iter().enumerate().rev() {
            (l, r) = (r ^ self.f.apply(i, l, k), l);
        }
        self.join(l, r)
    }
}

impl<F: RoundFunction> LastRoundTarget for FeistelNetwork<F> {
    fn last_round_key_bits(&self) -> u32 {
        self.f.key_bits()
    }

    fn partial_decrypt_last_round(&self, c: u64, guess: u64) -> u64 {
        let (lc, rc) = self.split(c);
        let last = self.keys.len() - 1;
        self.join(rc ^ self.f.apply(last, lc, guess), lc)
    }

    fn pre_last_round_state(&self, p: u64) -> u64 {
        let t = self.trace(p);
        let (l, r) = t.states[self.keys.len() - 1];
        self.join(l, r)
    }

    fn could_match(&self, c1: u64, c2: u64, target: u64) -> bool {
        let h = self.half();
        ((c1 ^ c2) >> h) & mask(h) == target & mask(h)
    }

    fn guesses_indistinguishable(&self, a: u64, b: u64, target: u64) -> bool {
        // the last round function sees the key-free half difference
        self.f.keys_equivalent(a, b, target & mask(self.half()))
    }
}
