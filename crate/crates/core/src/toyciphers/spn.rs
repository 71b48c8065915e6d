use super::{check_keys, nibble_keys_equivalent, BlockCipher, CipherError, LastRoundTarget};

/// S-boxes `S_{rj}` for round `r` and nibble `j`, stored at index
/// `4 * (r - 1) + (j - 1)`. Nibble 1 is the most significant.
pub const SPN_SBOXES: [[u8; 16]; 16] = [
    [0xE, 0x4, 0xD, 0x1, 0x2, 0xF, 0xB, 0x8, 0x3, 0xA, 0x6, 0xC, 0x5, 0x9, 0x0, 0x7],
    [0x0, 0xF, 0x7, 0x4, 0xE, 0x2, 0xD, 0x1, 0xA, 0x6, 0xC, 0xB, 0x9, 0x5, 0x3, 0x8],
    [0x4, 0x1, 0xE, 0x8, 0xD, 0x6, 0x2, 0xB, 0xF, 0xC, 0x9, 0x7, 0x3, 0xA, 0x5, 0x0],
    [0xF, 0xC, 0x8, 0x2, 0x4, 0x9, 0x1, 0x7, 0x5, 0xB, 0x3, 0xE, 0xA, 0x0, 0x6, 0xD],
    [0xF, 0x1, 0x8, 0xE, 0x6, 0xB, 0x3, 0x4, 0x9, 0x7, 0x2, 0xD, 0xC, 0x0, 0x5, 0xA],
    [0x3, 0xD, 0x4, 0x7, 0xF, 0x2, 0x8, 0xE, 0xC, 0x0, 0x1, 0xA, 0x6, 0x9, 0xB, 0x5],
    [0x0, 0xE, 0x7, 0xB, 0xA, 0x4, 0xD, 0x1, 0x5, 0x8, 0xC, 0x6, 0x9, 0x3, 0x2, 0xF],
    [0xD, 0x8, 0xA, 0x1, 0x3, 0xF, 0x4, 0x2, 0xB, 0x6, 0x7, 0xC, 0x0, 0x5, 0xE, 0x9],
    [0xA, 0x0, 0x9, 0xE, 0x6, 0x3, 0xF, 0x5, 0x1, 0xD, 0xC, 0x7, 0xB, 0x4, 0x2, 0x8],
    [0xD, 0x7, 0x0, 0x9, 0x3, 0x4, 0x6, 0xA, 0x2, 0x8, 0x5, 0xE, 0xC, 0xB, 0xF, 0x1],
    [0xD, 0x6, 0x4, 0x9, 0x8, 0xF, 0x3, 0x0, 0xB, 0x1, 0x2, 0xC, 0x5, 0xA, 0xE, 0x7],
    [0x1, 0xA, 0xD, 0x0, 0x6, 0x9, 0x8, 0x7, 0x4, 0xF, 0xE, 0x3, 0xB, 0x5, 0x2, 0xC],
    [0x7, 0xD, 0xE, 0x3, 0x0, 0x6, 0x9, 0xA, 0x1, 0x2, 0x8, 0x5, 0xB, 0xC, 0x4, 0xF],
    [0xD, 0x8, 0xB, 0x5, 0x6, 0xF, 0x0, 0x3, 0x4, 0x7, 0x2, 0xC, 0x1, 0xA, 0xE, 0x9],
    [0xA, 0x6, 0x9, 0x0, 0xC, 0xB, 0x7, 0xD, 0xF, 0x1, 0x3, 0xE, 0x5, 0x2, 0x8, 0x4],
    [0x3, 0xF, 0x0, 0x6, 0xA, 0x1, 0xD, 0x8, 0x9, 0x4, 0x5, 0xB, 0xC, 0x7, 0x2, 0xE],
];

/// Bit `i` (1 = MSB) moves to position `PERMUTATION[i - 1]`.
pub const PERMUTATION: [u8; 16] = [1, 5, 9, 13, 2, 6, 10, 14, 3, 7, 11, 15, 4, 8, 12, 16];

const fn invert_sboxes() -> [[u8; 16]; 16] {
    let mut inv = [[0u8; 16]; 16];
    let mut b = 0;
    while b < 16 {
        let mut x = 0;
        while x < 16 {
            inv[b][SPN_SBOXES[b][x] as usize] = x as u8;
            x += 1;
        }
        b += 1;
    }
    inv
}

const INVERSE_SBOXES: [[u8; 16]; 16] = invert_sboxes();

const fn permute_slow(x: u16) -> u16 {
    let mut out = 0u16;
    let mut i = 0;
    while i < 16 {
        if x & (0x8000 >> i) != 0 {
            out |= 0x8000 >> (PERMUTATION[i] - 1);
        }
        i += 1;
    }
    out
}

// split by byte so the permutation is two lookups
const fn permute_tables() -> [[u16; 256]; 2] {
    let mut t = [[0u16; 256]; 2];
    let mut b = 0;
    while b < 256 {
        t[0][b] = permute_slow((b as u16) << 8);
        t[1][b] = permute_slow(b as u16);
        b += 1;
    }
    t
}

const PERMUTE_TABLES: [[u16; 256]; 2] = permute_tables();

/// The bit permutation; an involution.
pub fn permute16(x: u16) -> u16 {
    PERMUTE_TABLES[0][(x >> 8) as usize] | PERMUTE_TABLES[1][(x & 0xFF) as usize]
}

/// Applies the four round-`round` S-boxes (`round` in 1..=4).
pub fn substitute16(round: usize, x: u16) -> u16 {
    let base = 4 * (round - 1);
    let mut out = 0u16;
    for j in 0..4 {
        let shift = 12 - 4 * j;
        let nib = (x >> shift) & 0xF;
        out |= (SPN_SBOXES[base + j][nib as usize] as u16) << shift;
    }
    out
}

pub fn substitute16_inverse(round: usize, x: u16) -> u16 {
    let base = 4 * (round - 1);
    let mut out = 0u16;
    for j in 0..4 {
        let shift = 12 - 4 * j;
        let nib = (x >> shift) & 0xF;
        out |= (INVERSE_SBOXES[base + j][nib as usize] as u16) << shift;
    }
    out
}

/// The 16-bit, 4-round substitution-permutation network with five
/// independent subkeys.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasicSpn {
    keys: [u16; 5],
}

/// Intermediate states of one encryption.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpnTrace {
    /// `round_inputs[r]` is the state entering round `r + 1`, before key mixing.
    pub round_inputs: [u16; 4],
    /// `sbox_inputs[r]` is the input of the round-`r + 1` S-layer.
    pub sbox_inputs: [u16; 4],
    pub ciphertext: u16,
}

impl BasicSpn {
    pub const ROUNDS: usize = 4;

    pub fn new(keys: [u16; 5]) -> BasicSpn {
        BasicSpn { keys }
    }

    pub fn from_subkeys(keys: &[u64]) -> Result<BasicSpn, CipherError> {
        check_keys(keys, 5, 16)?;
        let mut k = [0u16; 5];
        for (dst, &src) in k.iter_mut().zip(keys) {
            *dst = src as u16;
        }
        Ok(BasicSpn { keys: k })
    }

    pub fn keys(&self) -> [u16; 5] {
        self.keys
    }

    pub fn trace(&self, p: u16) -> SpnTrace {
        let mut round_inputs = [0u16; 4];
        let mut sbox_inputs = [0u16; 4];
        let mut w = p;
        for r in 0..3 {
            round_inputs[r] = w;
            let u = w ^ self.keys[r];
            sbox_inputs[r] = u;
            w = permute16(substitute16(r + 1, u));
        }
        round_inputs[3] = w;
        let u = w ^ self.keys[3];
        sbox_inputs[3] = u;
        let ciphertext = substitute16(4, u) ^ self.keys[4];
        SpnTrace { round_inputs, sbox_inputs, ciphertext }
    }

    pub fn encrypt(&self, p: u16) -> u16 {
        let mut w = p;
        for r in 0..3 {
            w = permute16(substitute16(r + 1, w ^ self.keys[r]));
        }
        substitute16(4, w ^ self.keys[3]) ^ self.keys[4]
    }

    pub fn decrypt(&self, c: u16) -> u16 {
        let mut w = substitute16_inverse(4, c ^ self.keys[4]) ^ self.keys[3];
        for r in (0..3).rev() {
            w = substitute16_inverse(r + 1, permute16(w)) ^ self.keys[r];
        }
        w
    }
}

impl BlockCipher for BasicSpn {
    fn block_bits(&self) -> u32 {
        16
    }
    fn rounds(&self) -> usize {
        Self::ROUNDS
    }
    fn encrypt_block(&self, p: u64) -> u64 {
        self.encrypt(p as u16) as u64
    }
    fn decrypt_block(&self, c: u64) -> u64 {
        self.decrypt(c as u16) as u64
    }
}

// REACH[box][dx] is a bitmask over dy of the possible output differences
const fn reachability() -> [[u16; 16]; 16] {
    let mut out = [[0u16; 16]; 16];
    let mut b = 0;
    while b < 16 {
        let s = &SPN_SBOXES[b];
        let mut dx = 0;
        while dx < 16 {
            let mut x = 0;
            while x < 16 {
                let dy = s[x] ^ s[x ^ dx];
                out[b][dx] |= 1 << dy;
                x += 1;
            }
            dx += 1;
        }
        b += 1;
    }
    out
}

const REACH: [[u16; 16]; 16] = reachability();

/// True if some pair of S-layer inputs with difference `dx` in round
/// `round` (1..=4) can produce output difference `dy`: a nonzero entry in
/// every box's difference table.
pub fn s_layer_can_map(round: usize, dx: u16, dy: u16) -> bool {
    let base = 4 * (round - 1);
    (0..4).all(|j| {
        let shift = 12 - 4 * j;
        let a = (dx >> shift) & 0xF;
        let b = (dy >> shift) & 0xF;
        REACH[base + j][a as usize] & (1 << b) != 0
    })
}

impl LastRoundTarget for BasicSpn {
    fn last_round_key_bits(&self) -> u32 {
        16
    }

    fn partial_decrypt_last_round(&self, c: u64, guess: u64) -> u64 {
        substitute16_inverse(4, (c ^ guess) as u16) as u64
    }

    fn pre_last_round_state(&self, p: u64) -> u64 {
        self.trace(p as u16).sbox_inputs[3] as u64
    }

    fn could_match(&self, c1: u64, c2: u64, target: u64) -> bool {
        s_layer_can_map(4, target as u16, (c1 ^ c2) as u16)
    }

    fn guesses_indistinguishable(&self, a: u64, b: u64, target: u64) -> bool {
        nibble_keys_equivalent(a, b, target & 0xFFFF, 4, false)
    }
}
