//! Lagrange and Newton interpolation over a field, Horner-style
//! evaluation of Newton polynomials, and the interpolation attack on the
//! last round of a small Feistel cipher.

use rayon::prelude::*;
use thiserror::Error;

use crate::finite_math::Gf256;
use crate::toyciphers::LastRoundTarget;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InterpolationError {
    #[error("duplicate abscissa at points {0} and {1}")]
    DuplicateX(usize, usize),
    #[error("no interpolation points")]
    Empty,
    #[error("need at least {needed} pairs, got {got}")]
    InsufficientData { needed: usize, got: usize },
}

/// The operations interpolation needs from a field.
pub trait Field: Copy + PartialEq + std::fmt::Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(self, rhs: Self) -> Self;
    fn neg(self) -> Self;
    fn mul(self, rhs: Self) -> Self;
    /// Undefined for zero; callers never divide by zero on distinct points.
    fn inverse(self) -> Self;

    fn sub(self, rhs: Self) -> Self {
        self.add(rhs.neg())
    }
    fn div(self, rhs: Self) -> Self {
        self.mul(rhs.inverse())
    }
}

impl Field for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn add(self, rhs: Self) -> Self {
        self + rhs
    }
    fn neg(self) -> Self {
        -self
    }
    fn mul(self, rhs: Self) -> Self {
        self * rhs
    }
    fn inverse(self) -> Self {
        1.0 / self
    }
}

impl Field for Gf256 {
    fn zero() -> Self {
        Gf256::ZERO
    }
    fn one() -> Self {
        Gf256::ONE
    }
    fn add(self, rhs: Self) -> Self {
        self + rhs
    }
    fn neg(self) -> Self {
        self
    }
    fn mul(self, rhs: Self) -> Self {
        self * rhs
    }
    fn inverse(self) -> Self {
        Gf256::inverse(self).expect("inverse of zero")
    }
}

fn check_distinct<F: Field>(points: &[(F, F)]) -> Result<(), InterpolationError> {
    if points.is_empty() {
        return Err(InterpolationError::Empty);
    }
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if points[i].0 == points[j].0 {
                return Err(InterpolationError::DuplicateX(i, j));
            }
        }
    }
    Ok(())
}

/// Value at `x` of the unique polynomial of degree `< n` through the `n`
/// points, by the Lagrange basis.
pub fn lagrange_interpolate<F: Field>(points: &[(F, F)], x: F) -> Result<F, InterpolationError> {
    check_distinct(points)?;
    let mut acc = F::zero();
    for (i, &(xi, yi)) in points.iter().enumerate() {
        let mut num = F::one();
        let mut den = F::one();
        for (j, &(xj, _)) in points.iter().enumerate() {
            if i != j {
                num = num.mul(x.sub(xj));
                den = den.mul(xi.sub(xj));
            }
        }
        acc = acc.add(yi.mul(num.div(den)));
    }
    Ok(acc)
}

/// `p(x) = b_0 + b_1 (x - x_0) + ... + b_n (x - x_0) ... (x - x_{n-1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonPolynomial<F> {
    pub anchors: Vec<F>,
    pub coefficients: Vec<F>,
}

/// Divided-difference coefficients `b_k = f[x_k, ..., x_0]`.
pub fn newton_coefficients<F: Field>(points: &[(F, F)]) -> Result<NewtonPolynomial<F>, InterpolationError> {
    check_distinct(points)?;
    let xs: Vec<F> = points.iter().map(|p| p.0).collect();
    let mut table: Vec<F> = points.iter().map(|p| p.1).collect();
    let n = xs.len();
    let mut coefficients = Vec::with_capacity(n);
    coefficients.push(table[0]);
    for k in 1..n {
        // table[i] holds f[x_i, ..., x_{i+k-1}]; fold in x_{i+k}
        for i in 0..n - k {
            table[i] = table[i + 1].sub(table[i]).div(xs[i + k].sub(xs[i]));
        }
        coefficients.push(table[0]);
    }
    Ok(NewtonPolynomial { anchors: xs, coefficients })
}

/// Nested evaluation `b_0 + (x - x_0)(b_1 + (x - x_1)(b_2 + ...))`.
pub fn horner_eval<F: Field>(poly: &NewtonPolynomial<F>, x: F) -> F {
    let n = poly.coefficients.len();
    let mut s = match poly.coefficients.last() {
        Some(&b) => b,
        None => return F::zero(),
    };
    for k in (0..n - 1).rev() {
        s = poly.coefficients[k].add(x.sub(poly.anchors[k]).mul(s));
    }
    s
}

/// Term-by-term expansion of the Newton form, used to check Horner.
pub fn expanded_eval<F: Field>(poly: &NewtonPolynomial<F>, x: F) -> F {
    let mut acc = F::zero();
    let mut basis = F::one();
    for (k, &b) in poly.coefficients.iter().enumerate() {
        acc = acc.add(b.mul(basis));
        if k < poly.anchors.len() {
            basis = basis.mul(x.sub(poly.anchors[k]));
        }
    }
    acc
}

/// Smallest degree `d` such that the polynomial through the first `d + 1`
/// points reproduces every point. At most `n - 1` for `n` distinct points.
pub fn probe_degree<F: Field>(points: &[(F, F)]) -> Result<usize, InterpolationError> {
    check_distinct(points)?;
    let full = newton_coefficients(points)?;
    // Newton coefficients past the true degree vanish
    let d = full.coefficients.iter().rposition(|&b| b != F::zero()).unwrap_or(0);
    Ok(d)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterpAttackConfig {
    pub degree_bound: usize,
    pub extra_checks: usize,
}

impl InterpAttackConfig {
    pub fn new(degree_bound: usize) -> Self {
        InterpAttackConfig { degree_bound, extra_checks: 1 }
    }

    pub fn pairs_needed(&self) -> usize {
        self.degree_bound + 1 + self.extra_checks.max(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Survivor {
    pub key: u64,
    pub survived: bool,
    pub checked_pairs: usize,
}

/// Chosen plaintexts for the attack: the left half is fixed and the right
/// half takes `n` distinct values.
pub fn chosen_plaintexts(fixed_left: u8, n: usize) -> Vec<u64> {
    (0..n.min(256)).map(|r| ((fixed_left as u64) << 8) | r as u64).collect()
}

/// For each last-round key guess, partially decrypts every pair, fits a
/// Newton polynomial in the varied right half through the first `d + 1`
/// targets and keeps the guess if the fit predicts the check pairs.
///
/// Pairs are `(plaintext, ciphertext)` of a cipher with 8-bit halves. The
/// result lists every key in ascending order.
pub fn interpolation_attack<C: LastRoundTarget + ?Sized>(
    cipher: &C,
    config: &InterpAttackConfig,
    pairs: &[(u64, u64)],
) -> Result<Vec<Survivor>, InterpolationError> {
    let needed = config.pairs_needed();
    if pairs.len() < needed {
        return Err(InterpolationError::InsufficientData { needed, got: pairs.len() });
    }
    let d = config.degree_bound;
    let checks = &pairs[d + 1..needed];
    let space = 1u64 << cipher.last_round_key_bits();
    let out = (0..space)
        .into_par_iter()
        .map(|key| {
            let target = |&(p, c): &(u64, u64)| {
                let x = Gf256((p & 0xFF) as u8);
                let y = Gf256((cipher.partial_decrypt_last_round(c, key) >> 8) as u8);
                (x, y)
            };
            let basis: Vec<(Gf256, Gf256)> = pairs[..=d].iter().map(target).collect();
            let survived = match newton_coefficients(&basis) {
                Ok(poly) => checks.iter().map(target).all(|(x, y)| horner_eval(&poly, x) == y),
                Err(_) => false,
            };
            Survivor { key, survived, checked_pairs: checks.len() }
        })
        .collect();
    Ok(out)
}
