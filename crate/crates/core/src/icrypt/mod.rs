//! I-CRYPT: a Feistel cipher whose round function is a single layer of
//! hard-limiter neurons with fixed random integer weights.
//!
//! Words are MSB-first: input bit 0 is the most significant bit of the
//! half-block, and neuron `j` writes output bit `j`. Bits enter the network
//! in bipolar form (0 -> -1, 1 -> +1). A neuron fires iff its net input is
//! strictly positive.

mod quality;
mod schedule;

pub use quality::{quality_harness, AvalancheReport, QualityConfig};
pub use schedule::{icrypt_key_schedule, KeySchedule};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::toyciphers::BlockCipher;

/// Seed for the published core weights.
pub const DEFAULT_DESIGN_SEED: u64 = 0x4943_5259_5054_3634;
pub const DEFAULT_ROUNDS: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IcryptError {
    #[error("rounds must be even and positive, got {0}")]
    OddRounds(usize),
    #[error("half-block of {0} bits unsupported (multiple of 8, at most 128)")]
    HalfSize(u32),
    #[error("the XNOR path needs +-1 weights")]
    NotSimplified,
    #[error("quality estimates need at least {min} samples, got {got}")]
    TooFewSamples { min: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KeyInjection {
    /// Round key bit `j` drives the bias link of neuron `j`.
    BiasInjected,
    /// Round key bits are extra network inputs with their own weights.
    InputInjected,
}

impl std::str::FromStr for KeyInjection {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "bias" | "bias_injected" => Ok(KeyInjection::BiasInjected),
            "input" | "input_injected" => Ok(KeyInjection::InputInjected),
            other => Err(format!("unknown key injection {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorePath {
    DirectSum,
    ByteTable,
    /// XNOR against the weight signs, summed with [`bipolar_byte_sum`].
    Xnor,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IcryptParams {
    pub variant: KeyInjection,
    pub half_bits: u32,
    /// `half_bits x inputs` row-major, `inputs` = half (bias) or 2 half.
    pub weights: Vec<i8>,
    pub bias_weights: Vec<i8>,
    pub rounds: usize,
    pub design_seed: u64,
    pub simplified: bool,
}

impl IcryptParams {
    /// Draws weights from `design_seed`: uniform over `[-128, 127]`, or
    /// `{-1, +1}` when `simplified`.
    pub fn generate(
        variant: KeyInjection,
        half_bits: u32,
        rounds: usize,
        simplified: bool,
        design_seed: u64,
    ) -> Result<IcryptParams, IcryptError> {
        if half_bits == 0 || half_bits % 8 != 0 || half_bits > 128 {
            return Err(IcryptError::HalfSize(half_bits));
        }
        if rounds == 0 || rounds % 2 != 0 {
            return Err(IcryptError::OddRounds(rounds));
        }
        let inputs = inputs_for(variant, half_bits);
        let mut rng = ChaCha8Rng::seed_from_u64(design_seed);
        let mut draw = |_| {
            if simplified {
                if rng.gen::<bool>() {
                    1
                } else {
                    -1
                }
            } else {
                rng.gen::<i8>()
            }
        };
        let weights = (0..half_bits as usize * inputs).map(&mut draw).collect();
        let bias_weights = (0..half_bits as usize).map(&mut draw).collect();
        Ok(IcryptParams { variant, half_bits, weights, bias_weights, rounds, design_seed, simplified })
    }

    /// The 64-bit cipher with 10 rounds.
    pub fn icrypt64(variant: KeyInjection, simplified: bool) -> IcryptParams {
        Self::generate(variant, 32, DEFAULT_ROUNDS, simplified, DEFAULT_DESIGN_SEED).unwrap()
    }

    pub fn inputs(&self) -> usize {
        inputs_for(self.variant, self.half_bits)
    }

    fn weight(&self, j: usize, i: usize) -> i32 {
        self.weights[j * self.inputs() + i] as i32
    }

    pub fn with_rounds(&self, rounds: usize) -> Result<IcryptParams, IcryptError> {
        if rounds == 0 || rounds % 2 != 0 {
            return Err(IcryptError::OddRounds(rounds));
        }
        Ok(IcryptParams { rounds, ..self.clone() })
    }
}

fn inputs_for(variant: KeyInjection, half_bits: u32) -> usize {
    match variant {
        KeyInjection::BiasInjected => half_bits as usize,
        KeyInjection::InputInjected => 2 * half_bits as usize,
    }
}

pub(crate) fn word_mask(bits: u32) -> u128 {
    if bits == 128 {
        u128::MAX
    } else {
        (1u128 << bits) - 1
    }
}

fn bit(word: u128, i: usize, width: u32) -> bool {
    word >> (width as usize - 1 - i) & 1 == 1
}

fn bipolar(b: bool) -> i32 {
    if b {
        1
    } else {
        -1
    }
}

/// `2 popcount(b) - 8`: the sum of a byte's bits read as -1 / +1.
pub fn bipolar_byte_sum(b: u8) -> i32 {
    2 * b.count_ones() as i32 - 8
}

const BIPOLAR_BYTE: [i8; 256] = {
    let mut t = [0i8; 256];
    let mut i = 0;
    while i < 256 {
        t[i] = 2 * (i as u8).count_ones() as i8 - 8;
        i += 1;
    }
    t
};

/// Byte `p` (most significant first) of the concatenated network input.
fn input_byte(data: u128, key: u128, half_bits: u32, p: usize) -> u8 {
    let per_word = half_bits as usize / 8;
    let (word, q) = if p < per_word { (data, p) } else { (key, p - per_word) };
    (word >> (half_bits as usize - 8 * (q + 1)) & 0xFF) as u8
}

/// Net inputs `v_j` by the plain weighted sum.
pub fn net_inputs_direct(data: u128, key: u128, params: &IcryptParams) -> Vec<i32> {
    let h = params.half_bits;
    (0..h as usize)
        .map(|j| {
            let mut v = 0i32;
            for i in 0..h as usize {
                v += params.weight(j, i) * bipolar(bit(data, i, h));
            }
            match params.variant {
                KeyInjection::BiasInjected => v += params.bias_weights[j] as i32 * bipolar(bit(key, j, h)),
                KeyInjection::InputInjected => {
                    for i in 0..h as usize {
                        v += params.weight(j, h as usize + i) * bipolar(bit(key, i, h));
                    }
                }
            }
            v
        })
        .collect()
}

/// Net inputs via XNOR with the weight signs; needs `simplified` weights.
pub fn net_inputs_xnor(data: u128, key: u128, params: &IcryptParams) -> Result<Vec<i32>, IcryptError> {
    if !params.simplified {
        return Err(IcryptError::NotSimplified);
    }
    let h = params.half_bits;
    let n = params.inputs();
    let bytes = n / 8;
    Ok((0..h as usize)
        .map(|j| {
            // sign word of row j, packed like the input
            let signs =
                |p: usize| -> u8 { (0..8).fold(0u8, |acc, b| (acc << 1) | (params.weight(j, 8 * p + b) > 0) as u8) };
            let mut v: i32 =
                (0..bytes).map(|p| BIPOLAR_BYTE[!(input_byte(data, key, h, p) ^ signs(p)) as usize] as i32).sum();
            if params.variant == KeyInjection::BiasInjected {
                v += params.bias_weights[j] as i32 * bipolar(bit(key, j, h));
            }
            v
        })
        .collect())
}

fn fire(v: &[i32], half_bits: u32) -> u128 {
    v.iter().fold(0u128, |acc, &x| (acc << 1) | (x > 0) as u128) & word_mask(half_bits)
}

/// Core `F(data; key)` by the chosen path.
pub fn icrypt_core_path(data: u128, key: u128, params: &IcryptParams, path: CorePath) -> Result<u128, IcryptError> {
    let m = word_mask(params.half_bits);
    let (data, key) = (data & m, key & m);
    Ok(match path {
        CorePath::DirectSum => fire(&net_inputs_direct(data, key, params), params.half_bits),
        CorePath::Xnor => fire(&net_inputs_xnor(data, key, params)?, params.half_bits),
        CorePath::ByteTable => CoreTables::new(params).core(data, key),
    })
}

pub fn icrypt_core(data: u128, key: u128, params: &IcryptParams) -> u128 {
    icrypt_core_path(data, key, params, CorePath::DirectSum).unwrap()
}

/// Per-neuron partial sums for every input byte value.
#[derive(Debug, Clone)]
pub struct CoreTables {
    half_bits: u32,
    variant: KeyInjection,
    bytes: usize,
    /// `[neuron][byte position][byte value]`
    sums: Vec<i32>,
    bias: Vec<i32>,
}

impl CoreTables {
    pub fn new(params: &IcryptParams) -> CoreTables {
        let h = params.half_bits as usize;
        let bytes = params.inputs() / 8;
        let mut sums = vec![0i32; h * bytes * 256];
        for j in 0..h {
            for p in 0..bytes {
                for v in 0..256usize {
                    sums[(j * bytes + p) * 256 + v] =
                        (0..8).map(|b| params.weight(j, 8 * p + b) * bipolar(v >> (7 - b) & 1 == 1)).sum();
                }
            }
        }
        CoreTables {
            half_bits: params.half_bits,
            variant: params.variant,
            bytes,
            sums,
            bias: params.bias_weights.iter().map(|&b| b as i32).collect(),
        }
    }

    pub fn core(&self, data: u128, key: u128) -> u128 {
        let h = self.half_bits;
        let input: Vec<u8> = (0..self.bytes).map(|p| input_byte(data, key, h, p)).collect();
        let mut out = 0u128;
        for j in 0..h as usize {
            let rows = &self.sums[j * self.bytes * 256..(j + 1) * self.bytes * 256];
            let mut v: i32 = input.iter().enumerate().map(|(p, &b)| rows[p * 256 + b as usize]).sum();
            if self.variant == KeyInjection::BiasInjected {
                v += self.bias[j] * bipolar(bit(key, j, h));
            }
            out = (out << 1) | (v > 0) as u128;
        }
        out
    }
}

/// A keyed I-CRYPT instance. Rounds apply `L_i = R_{i-1}`,
/// `R_i = F(R_{i-1} ^ K_i; K_i) ^ L_{i-1}`; the ciphertext is `(L_R, R_R)`.
#[derive(Debug, Clone)]
pub struct Icrypt {
    params: IcryptParams,
    tables: CoreTables,
    round_keys: Vec<u128>,
}

impl Icrypt {
    /// Runs the key schedule on `user_key` (two half-blocks).
    pub fn new(params: &IcryptParams, user_key: (u128, u128)) -> Icrypt {
        let schedule = icrypt_key_schedule(user_key, params);
        Self::with_round_keys(params, schedule.round_keys)
    }

    /// Uses `round_keys` directly; their count sets the number of rounds.
    pub fn with_round_keys(params: &IcryptParams, round_keys: Vec<u128>) -> Icrypt {
        let m = word_mask(params.half_bits);
        Icrypt {
            params: params.clone(),
            tables: CoreTables::new(params),
            round_keys: round_keys.into_iter().map(|k| k & m).collect(),
        }
    }

    /// 64-bit key convenience for the 64-bit cipher.
    pub fn new64(params: &IcryptParams, key: u64) -> Icrypt {
        Self::new(params, split64(key))
    }

    pub fn params(&self) -> &IcryptParams {
        &self.params
    }

    pub fn round_keys(&self) -> &[u128] {
        &self.round_keys
    }

    pub fn round_function(&self, r: u128, k: u128) -> u128 {
        self.tables.core(r ^ k, k)
    }

    pub fn encrypt_halves(&self, (mut l, mut r): (u128, u128)) -> (u128, u128) {
        for &k in &self.round_keys {
            (l, r) = (r, self.round_function(r, k) ^ l);
        }
        (l, r)
    }

    pub fn decrypt_halves(&self, (mut l, mut r): (u128, u128)) -> (u128, u128) {
        for &k in self.round_keys.iter().rev() {
            (l, r) = (r ^ self.round_function(l, k), l);
        }
        (l, r)
    }

    /// Whole-block form for blocks of at most 128 bits.
    pub fn encrypt(&self, block: u128) -> u128 {
        let h = self.params.half_bits;
        assert!(h <= 64, "blocks over 128 bits need encrypt_halves");
        let (l, r) = self.encrypt_halves(split_block(block, h));
        join_block(l, r, h)
    }

    pub fn decrypt(&self, block: u128) -> u128 {
        let h = self.params.half_bits;
        assert!(h <= 64, "blocks over 128 bits need decrypt_halves");
        let (l, r) = self.decrypt_halves(split_block(block, h));
        join_block(l, r, h)
    }
}

pub fn split_block(block: u128, half_bits: u32) -> (u128, u128) {
    (block >> half_bits & word_mask(half_bits), block & word_mask(half_bits))
}

pub fn join_block(l: u128, r: u128, half_bits: u32) -> u128 {
    (l << half_bits) | r
}

fn split64(key: u64) -> (u128, u128) {
    ((key >> 32) as u128, (key as u32) as u128)
}

pub fn icrypt_encrypt(block: u64, user_key: u64, params: &IcryptParams) -> u64 {
    Icrypt::new64(params, user_key).encrypt(block as u128) as u64
}

pub fn icrypt_decrypt(block: u64, user_key: u64, params: &IcryptParams) -> u64 {
    Icrypt::new64(params, user_key).decrypt(block as u128) as u64
}

impl BlockCipher for Icrypt {
    fn block_bits(&self) -> u32 {
        assert!(self.params.half_bits <= 32, "BlockCipher covers blocks up to 64 bits");
        2 * self.params.half_bits
    }

    fn rounds(&self) -> usize {
        self.round_keys.len()
    }

    fn encrypt_block(&self, p: u64) -> u64 {
        self.encrypt(p as u128) as u64
    }

    fn decrypt_block(&self, c: u64) -> u64 {
        self.decrypt(c as u128) as u64
    }
}
