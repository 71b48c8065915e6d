//! Modular integer arithmetic, the extended Euclidean algorithm and
//! GF(2^8) polynomial arithmetic, including generation of the Rijndael
//! S-box and its inverse.
//!
//! Bytes are read as polynomials over Z_2 with bit `k` holding the
//! coefficient of `x^k`, so `0x0F` is `x^3 + x^2 + x + 1`.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FiniteMathError {
    #[error("modulus must be positive, got {0}")]
    InvalidModulus(i64),
    #[error("gcd(0, 0) is undefined")]
    UndefinedGcd,
    #[error("{value} has no inverse modulo {modulus} (gcd = {gcd})")]
    NoInverse { value: i64, modulus: i64, gcd: i64 },
    #[error("zero has no multiplicative inverse in GF(2^8)")]
    ZeroHasNoInverse,
}

pub type Result<T> = std::result::Result<T, FiniteMathError>;

fn reduce(v: i128, n: i64) -> i64 {
    v.rem_euclid(n as i128) as i64
}

/// `(a + b) mod n`, always in `[0, n)`.
pub fn mod_add(a: i64, b: i64, n: i64) -> Result<i64> {
    if n < 1 {
        return Err(FiniteMathError::InvalidModulus(n));
    }
    Ok(reduce(a as i128 + b as i128, n))
}

/// `(a * b) mod n`, always in `[0, n)`.
pub fn mod_mul(a: i64, b: i64, n: i64) -> Result<i64> {
    if n < 1 {
        return Err(FiniteMathError::InvalidModulus(n));
    }
    Ok(reduce(a as i128 * b as i128, n))
}

/// Euclid's algorithm, `GCD(a, b) = GCD(b, a mod b)`.
pub fn gcd(a: u64, b: u64) -> Result<u64> {
    if a == 0 && b == 0 {
        return Err(FiniteMathError::UndefinedGcd);
    }
    let (mut a, mut b) = (a, b);
    while b > 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    Ok(a)
}

/// Inverse of `a` modulo `n` via the tabular extended Euclid recurrence
/// on `(A1, A2, A3)` / `(B1, B2, B3)`.
///
/// When `gcd(a, n) != 1` the result is [`FiniteMathError::NoInverse`]
/// carrying the gcd.
pub fn mod_inverse(a: i64, n: i64) -> Result<i64> {
    if n < 2 {
        return Err(FiniteMathError::InvalidModulus(n));
    }
    let a_red = a.rem_euclid(n);
    let (mut a1, mut a2, mut a3) = (1i64, 0i64, n);
    let (mut b1, mut b2, mut b3) = (0i64, 1i64, a_red);
    while b3 != 0 && b3 != 1 {
        let q = a3 / b3;
        let t = (a1 - q * b1, a2 - q * b2, a3 - q * b3);
        (a1, a2, a3) = (b1, b2, b3);
        (b1, b2, b3) = t;
    }
    let _ = (a1, a2);
    if b3 == 0 {
        return Err(FiniteMathError::NoInverse { value: a, modulus: n, gcd: a3 });
    }
    Ok(b2.rem_euclid(n))
}

/// A field modulus for GF(2^8): a degree-8 polynomial stored in 9 bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldPolynomial(u16);

impl FieldPolynomial {
    /// `x^8 + x^4 + x^3 + x + 1`
    pub const RIJNDAEL: FieldPolynomial = FieldPolynomial(0x11B);

    /// Irreducibility is not checked.
    pub fn new(bits: u16) -> Option<FieldPolynomial> {
        (bits >> 8 == 1).then_some(FieldPolynomial(bits))
    }

    pub fn bits(self) -> u16 {
        self.0
    }
}

impl Default for FieldPolynomial {
    fn default() -> Self {
        Self::RIJNDAEL
    }
}

/// An element of GF(2^8) under the Rijndael modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Gf256(pub u8);

impl Gf256 {
    pub const ZERO: Gf256 = Gf256(0);
    pub const ONE: Gf256 = Gf256(1);

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn inverse(self) -> Result<Gf256> {
        gf_inverse(self, FieldPolynomial::RIJNDAEL)
    }

    pub fn pow(self, mut e: u32) -> Gf256 {
        let mut base = self;
        let mut acc = Gf256::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }
}

impl fmt::Display for Gf256 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{:02X}}}", self.0)
    }
}

impl std::ops::Add for Gf256 {
    type Output = Gf256;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, rhs: Gf256) -> Gf256 {
        Gf256(self.0 ^ rhs.0)
    }
}

impl std::ops::Mul for Gf256 {
    type Output = Gf256;
    fn mul(self, rhs: Gf256) -> Gf256 {
        gf_mul(self, rhs, FieldPolynomial::RIJNDAEL)
    }
}

/// Shift-and-add multiplication, reducing whenever the running multiple
/// of `a` reaches degree 8.
pub fn gf_mul(a: Gf256, b: Gf256, modulus: FieldPolynomial) -> Gf256 {
    let low = (modulus.0 & 0xFF) as u8;
    let (mut a, mut b) = (a.0, b.0);
    let mut acc = 0u8;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        let carry = a & 0x80 != 0;
        a <<= 1;
        if carry {
            a ^= low;
        }
        b >>= 1;
    }
    Gf256(acc)
}

/// Degree of a GF(2) polynomial; `None` for the zero polynomial.
fn poly_degree(p: u32) -> Option<u32> {
    (p != 0).then(|| 31 - p.leading_zeros())
}

/// Long division of binary polynomials: returns `(quotient, remainder)`.
pub fn poly_divmod(dividend: u32, divisor: u32) -> (u32, u32) {
    let dd = poly_degree(divisor).expect("division by the zero polynomial");
    let mut q = 0u32;
    let mut r = dividend;
    while let Some(rd) = poly_degree(r) {
        if rd < dd {
            break;
        }
        let shift = rd - dd;
        q |= 1 << shift;
        r ^= divisor << shift;
    }
    (q, r)
}

/// Carry-less product of two binary polynomials.
pub fn poly_mul(a: u32, b: u32) -> u32 {
    let mut acc = 0u32;
    let mut b = b;
    let mut shift = 0;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a << shift;
        }
        b >>= 1;
        shift += 1;
    }
    acc
}

/// Multiplicative inverse by the extended Euclidean algorithm over
/// GF(2)[x], run against the field modulus.
pub fn gf_inverse(a: Gf256, modulus: FieldPolynomial) -> Result<Gf256> {
    if a.0 == 0 {
        return Err(FiniteMathError::ZeroHasNoInverse);
    }
    let (mut a2, mut a3) = (0u32, modulus.0 as u32);
    let (mut b2, mut b3) = (1u32, a.0 as u32);
    while b3 != 0 && b3 != 1 {
        let (q, r) = poly_divmod(a3, b3);
        let t2 = a2 ^ poly_mul(q, b2);
        (a2, a3) = (b2, b3);
        (b2, b3) = (t2, r);
    }
    debug_assert_eq!(b3, 1, "modulus is not irreducible");
    Ok(Gf256(poly_divmod(b2, modulus.0 as u32).1 as u8))
}

/// Parameters of the Rijndael-style S-box construction: field inverse
/// followed by `b(x) = constant + a(x) * multiplier mod (x^8 + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SboxSpec {
    pub field_polynomial: FieldPolynomial,
    pub affine_multiplier: u8,
    pub affine_constant: u8,
}

impl Default for SboxSpec {
    fn default() -> Self {
        SboxSpec { field_polynomial: FieldPolynomial::RIJNDAEL, affine_multiplier: 0x1F, affine_constant: 0x63 }
    }
}

/// `a * m mod (x^8 + 1)`: a cyclic convolution of the two bit vectors.
pub fn ring_mul_mod_x8_plus_1(a: u8, m: u8) -> u8 {
    let product = poly_mul(a as u32, m as u32);
    ((product & 0xFF) ^ (product >> 8)) as u8
}

impl SboxSpec {
    pub fn affine(&self, a: u8) -> u8 {
        ring_mul_mod_x8_plus_1(a, self.affine_multiplier) ^ self.affine_constant
    }
}

/// Forward and inverse substitution tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SboxTables {
    pub forward: [u8; 256],
    pub inverse: [u8; 256],
}

/// Builds `forward[i] = affine(inverse_or_zero(i))` and its inverse table.
pub fn generate_rijndael_sbox(spec: &SboxSpec) -> SboxTables {
    let mut forward = [0u8; 256];
    let mut inverse = [0u8; 256];
    for i in 0..=255u8 {
        let inv = gf_inverse(Gf256(i), spec.field_polynomial).map_or(0, Gf256::value);
        forward[i as usize] = spec.affine(inv);
    }
    for (i, &s) in forward.iter().enumerate() {
        inverse[s as usize] = i as u8;
    }
    SboxTables { forward, inverse }
}

/// The default Rijndael tables, generated once.
pub fn rijndael_sbox() -> &'static SboxTables {
    static TABLES: std::sync::OnceLock<SboxTables> = std::sync::OnceLock::new();
    TABLES.get_or_init(|| generate_rijndael_sbox(&SboxSpec::default()))
}
