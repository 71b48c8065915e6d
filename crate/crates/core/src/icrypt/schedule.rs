use super::{icrypt_core, word_mask, Icrypt, IcryptParams};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeySchedule {
    pub round_keys: Vec<u128>,
    /// Times a zero half forced a two-round re-encryption.
    pub reencryptions: usize,
}

/// Expands a user key (two half-block words) into `params.rounds` round keys.
///
/// Each step maps the current key `(A, B)` to
/// `(F(A; B) ^ A, F(B; A) ^ B)` and emits both halves. While either half
/// is zero the whole key is encrypted by a two-round I-CRYPT keyed with the
/// halves of the original user key.
pub fn icrypt_key_schedule(user_key: (u128, u128), params: &IcryptParams) -> KeySchedule {
    let m = word_mask(params.half_bits);
    let user = (user_key.0 & m, user_key.1 & m);
    let mut fixer: Option<Icrypt> = None;
    let mut current = user;
    let mut round_keys = Vec::with_capacity(params.rounds);
    let mut reencryptions = 0;
    while round_keys.len() < params.rounds {
        let (a, b) = current;
        let mut next = (icrypt_core(a, b, params) ^ a, icrypt_core(b, a, params) ^ b);
        while next.0 == 0 || next.1 == 0 {
            let f = fixer.get_or_insert_with(|| Icrypt::with_round_keys(params, vec![user.0, user.1]));
            next = f.encrypt_halves(next);
            reencryptions += 1;
        }
        round_keys.push(next.0);
        if round_keys.len() < params.rounds {
            round_keys.push(next.1);
        }
        current = next;
    }
    KeySchedule { round_keys, reencryptions }
}
