//! ECB, CBC, CFB, OFB and CTR over any [`BlockCipher`] of up to 64 bits.
//!
//! Streams are bit strings read MSB-first; `left_r` of a block is its `r`
//! most significant bits. No padding is applied.

use thiserror::Error;

use crate::toyciphers::BlockCipher;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModeError {
    #[error("{0:?} mode requires an IV")]
    MissingIv(Mode),
    #[error("ECB mode takes no IV")]
    UnexpectedIv,
    #[error("stream of {len} bits is not a multiple of {unit}")]
    Misaligned { len: usize, unit: u32 },
    #[error("segment size {r} outside 1..={n}")]
    SegmentOutOfRange { r: u32, n: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Ecb,
    Cbc,
    Cfb,
    Ofb,
    Ctr,
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Mode, String> {
        match s.to_ascii_lowercase().as_str() {
            "ecb" => Ok(Mode::Ecb),
            "cbc" => Ok(Mode::Cbc),
            "cfb" => Ok(Mode::Cfb),
            "ofb" => Ok(Mode::Ofb),
            "ctr" => Ok(Mode::Ctr),
            other => Err(format!("unknown mode {other:?}")),
        }
    }
}

/// A growable MSB-first bit string.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BitStream {
    bytes: Vec<u8>,
    len: usize,
}

impl BitStream {
    pub fn new() -> BitStream {
        BitStream::default()
    }

    pub fn from_bytes(bytes: &[u8]) -> BitStream {
        BitStream { bytes: bytes.to_vec(), len: bytes.len() * 8 }
    }

    pub fn from_bits(bits: &[bool]) -> BitStream {
        let mut s = BitStream::new();
        for &b in bits {
            s.push_bits(b as u64, 1);
        }
        s
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len);
        self.bytes[i / 8] & (0x80 >> (i % 8)) != 0
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len);
        self.bytes[i / 8] ^= 0x80 >> (i % 8);
    }

    /// Appends the low `n` bits of `value`, most significant first.
    pub fn push_bits(&mut self, value: u64, n: u32) {
        for k in (0..n).rev() {
            if self.len % 8 == 0 {
                self.bytes.push(0);
            }
            if value >> k & 1 == 1 {
                self.bytes[self.len / 8] |= 0x80 >> (self.len % 8);
            }
            self.len += 1;
        }
    }

    /// Reads `n <= 64` bits starting at bit `start`.
    pub fn read_bits(&self, start: usize, n: u32) -> u64 {
        (0..n as usize).fold(0u64, |acc, k| (acc << 1) | self.get(start + k) as u64)
    }

    /// Whole bytes; a trailing partial byte is zero-padded.
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeState {
    pub mode: Mode,
    pub iv: Option<u64>,
    /// `r` for CFB, OFB and CTR; ignored by ECB and CBC.
    pub segment_bits: u32,
}

impl ModeState {
    pub fn new(mode: Mode, iv: Option<u64>, segment_bits: u32) -> ModeState {
        ModeState { mode, iv, segment_bits }
    }

    fn unit(&self, n: u32) -> u32 {
        match self.mode {
            Mode::Ecb | Mode::Cbc => n,
            _ => self.segment_bits,
        }
    }

    fn validate(&self, n: u32, len: usize) -> Result<(), ModeError> {
        match (self.mode, self.iv) {
            (Mode::Ecb, Some(_)) => return Err(ModeError::UnexpectedIv),
            (Mode::Ecb, None) => {}
            (m, None) => return Err(ModeError::MissingIv(m)),
            _ => {}
        }
        if !matches!(self.mode, Mode::Ecb | Mode::Cbc) && !(1..=n).contains(&self.segment_bits) {
            return Err(ModeError::SegmentOutOfRange { r: self.segment_bits, n });
        }
        let unit = self.unit(n);
        if len % unit as usize != 0 {
            return Err(ModeError::Misaligned { len, unit });
        }
        Ok(())
    }
}

fn mask(n: u32) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn left(x: u64, r: u32, n: u32) -> u64 {
    (x >> (n - r)) & mask(r)
}

/// `(i + 1) mod 2^n`.
pub fn next_counter(i: u64, n: u32) -> u64 {
    i.wrapping_add(1) & mask(n)
}

fn run<C: BlockCipher + ?Sized>(
    state: &ModeState,
    cipher: &C,
    input: &BitStream,
    encrypting: bool,
) -> Result<BitStream, ModeError> {
    let n = cipher.block_bits();
    state.validate(n, input.len())?;
    let unit = state.unit(n);
    let r = unit;
    let mut out = BitStream::new();
    let mut reg = state.iv.unwrap_or(0) & mask(n);
    for start in (0..input.len()).step_by(unit as usize) {
        let x = input.read_bits(start, unit);
        let y = match state.mode {
            Mode::Ecb => {
                if encrypting {
                    cipher.encrypt_block(x)
                } else {
                    cipher.decrypt_block(x)
                }
            }
            Mode::Cbc => {
                if encrypting {
                    reg = cipher.encrypt_block(x ^ reg);
                    reg
                } else {
                    let p = cipher.decrypt_block(x) ^ reg;
                    reg = x;
                    p
                }
            }
            Mode::Cfb => {
                let y = x ^ left(cipher.encrypt_block(reg), r, n);
                let c = if encrypting { y } else { x };
                reg = ((reg << r) | c) & mask(n);
                y
            }
            Mode::Ofb => {
                reg = cipher.encrypt_block(reg);
                x ^ left(reg, r, n)
            }
            Mode::Ctr => {
                let y = x ^ left(cipher.encrypt_block(reg), r, n);
                reg = next_counter(reg, n);
                y
            }
        };
        out.push_bits(y, unit);
    }
    Ok(out)
}

pub fn mode_encrypt<C: BlockCipher + ?Sized>(
    state: &ModeState,
    cipher: &C,
    plaintext: &BitStream,
) -> Result<BitStream, ModeError> {
    run(state, cipher, plaintext, true)
}

/// CFB, OFB and CTR use only the cipher's encryption direction.
pub fn mode_decrypt<C: BlockCipher + ?Sized>(
    state: &ModeState,
    cipher: &C,
    ciphertext: &BitStream,
) -> Result<BitStream, ModeError> {
    run(state, cipher, ciphertext, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toyciphers::BasicSpn;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn spn() -> BasicSpn {
        BasicSpn::new([0x1A2B, 0x3C4D, 0x5E6F, 0x7081, 0x92A3])
    }

    #[test]
    fn bitstream_roundtrip() {
        let mut s = BitStream::new();
        s.push_bits(0b101, 3);
        s.push_bits(0xABCD, 16);
        assert_eq!(s.len(), 19);
        assert_eq!(s.read_bits(0, 3), 0b101);
        assert_eq!(s.read_bits(3, 16), 0xABCD);
        assert_eq!(BitStream::from_bytes(&[0x80]).read_bits(0, 1), 1);
    }

    #[test]
    fn ecb_equal_blocks_equal_ciphertext() {
        let p = BitStream::from_bytes(&[0x12, 0x34, 0x12, 0x34]);
        let c = mode_encrypt(&ModeState::new(Mode::Ecb, None, 16), &spn(), &p).unwrap();
        assert_eq!(c.read_bits(0, 16), c.read_bits(16, 16));
    }

    #[test]
    fn cbc_first_block() {
        let p = BitStream::from_bytes(&[0x12, 0x34]);
        let c = mode_encrypt(&ModeState::new(Mode::Cbc, Some(0xBEEF), 16), &spn(), &p).unwrap();
        assert_eq!(c.read_bits(0, 16), spn().encrypt_block(0x1234 ^ 0xBEEF));
    }

    #[test]
    fn counter_wraps() {
        assert_eq!(next_counter(0xFFFF, 16), 0);
        assert_eq!(next_counter(5, 16), 6);
        assert_eq!(next_counter(u64::MAX, 64), 0);
    }

    #[test]
    fn iv_rules_and_alignment() {
        let p = BitStream::from_bytes(&[1, 2, 3]);
        let c = spn();
        assert_eq!(mode_encrypt(&ModeState::new(Mode::Ecb, Some(1), 16), &c, &p), Err(ModeError::UnexpectedIv));
        assert_eq!(mode_encrypt(&ModeState::new(Mode::Cbc, None, 16), &c, &p), Err(ModeError::MissingIv(Mode::Cbc)));
        assert_eq!(
            mode_encrypt(&ModeState::new(Mode::Cbc, Some(0), 16), &c, &p),
            Err(ModeError::Misaligned { len: 24, unit: 16 })
        );
        assert_eq!(
            mode_encrypt(&ModeState::new(Mode::Cfb, Some(0), 17), &c, &p),
            Err(ModeError::SegmentOutOfRange { r: 17, n: 16 })
        );
        assert!(mode_encrypt(&ModeState::new(Mode::Cfb, Some(0), 8), &c, &p).is_ok());
    }

    #[test]
    fn roundtrip_all_modes() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let c = spn();
        for mode in [Mode::Ecb, Mode::Cbc, Mode::Cfb, Mode::Ofb, Mode::Ctr] {
            for r in [1u32, 4, 8, 16] {
                let iv = (mode != Mode::Ecb).then(|| rng.gen::<u16>() as u64);
                let st = ModeState::new(mode, iv, r);
                let bytes: Vec<u8> = (0..64).map(|_| rng.gen()).collect();
                let p = BitStream::from_bytes(&bytes);
                let ct = mode_encrypt(&st, &c, &p).unwrap();
                assert_eq!(mode_decrypt(&st, &c, &ct).unwrap(), p, "{mode:?} r={r}");
            }
        }
    }
}
