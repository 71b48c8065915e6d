//! Last-round key ranking with neural networks.
//!
//! For every guess of the last 8-bit round key the ciphertexts are peeled
//! one round, a fresh network is trained to map plaintext bits to the
//! resulting `L_{R-1}` bits, and the guess is scored by the network's error
//! on held-out examples. The correct guess leaves a mapping of `R - 1`
//! rounds, which is learnable; a wrong guess adds a spurious S-box layer.

use std::fmt::Write as _;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::neuralnet::{
    bits_to_vector, threshold_outputs, Activation, BitDecision, Example, FeedforwardNetwork, NetError, TrainingConfig,
};
use crate::toyciphers::{BlockCipher, LastRoundTarget};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NnAttackError {
    #[error("rounds must be 2, 3 or 4, got {0}")]
    Rounds(usize),
    #[error("{rounds} rounds need two hidden layers")]
    NeedsSecondHiddenLayer { rounds: usize },
    #[error("hidden_layers must be 1 or 2, got {0}")]
    HiddenLayers(usize),
    #[error("no held-out examples (c = 0)")]
    NoEvaluationData,
    #[error("need {needed} plaintext/ciphertext pairs, got {got}")]
    TooFewPairs { needed: usize, got: usize },
    #[error("cipher must have a 16-bit block and 8-bit last round key")]
    WrongCipherShape,
    #[error(transparent)]
    Net(#[from] NetError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct NnAttackConfig {
    pub rounds: usize,
    /// Examples per round.
    pub k: usize,
    /// Held-out examples.
    pub c: usize,
    pub hidden_layers: usize,
    pub hidden_size: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub sort_training_set: bool,
}

pub const DEFAULT_K: usize = 12;
pub const DEFAULT_C: usize = 5;
pub const DEFAULT_HIDDEN: usize = 12;
pub const DEFAULT_EPOCHS: usize = 2000;

impl NnAttackConfig {
    /// Defaults for `rounds`: `M = 12 R + 5`, hidden size 12, a second
    /// hidden layer from three rounds on.
    pub fn new(rounds: usize, seed: u64) -> NnAttackConfig {
        NnAttackConfig {
            rounds,
            k: DEFAULT_K,
            c: DEFAULT_C,
            hidden_layers: if rounds >= 3 { 2 } else { 1 },
            hidden_size: DEFAULT_HIDDEN,
            epochs: DEFAULT_EPOCHS,
            learning_rate: 0.5,
            seed,
            sort_training_set: true,
        }
    }

    /// `M = k R + c`.
    pub fn example_count(&self) -> usize {
        self.k * self.rounds + self.c
    }

    pub fn validate(&self) -> Result<(), NnAttackError> {
        if !(2..=4).contains(&self.rounds) {
            return Err(NnAttackError::Rounds(self.rounds));
        }
        if !(1..=2).contains(&self.hidden_layers) {
            return Err(NnAttackError::HiddenLayers(self.hidden_layers));
        }
        if self.rounds >= 3 && self.hidden_layers < 2 {
            return Err(NnAttackError::NeedsSecondHiddenLayer { rounds: self.rounds });
        }
        if self.c == 0 {
            return Err(NnAttackError::NoEvaluationData);
        }
        Ok(())
    }

    fn layer_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![16];
        sizes.extend(std::iter::repeat(self.hidden_size).take(self.hidden_layers));
        sizes.push(8);
        sizes
    }
}

/// `m` known pairs under distinct random plaintexts.
pub fn collect_pairs<C: BlockCipher + ?Sized>(cipher: &C, m: usize, rng: &mut impl Rng) -> Vec<(u64, u64)> {
    let space = 1usize << cipher.block_bits();
    sample(rng, space, m.min(space)).into_iter().map(|p| (p as u64, cipher.encrypt_block(p as u64))).collect()
}

/// `(plaintext, L_{R-1})` for each pair, peeling the last round with `k_guess`.
pub fn build_training_targets<C: LastRoundTarget + ?Sized>(
    cipher: &C,
    pairs: &[(u64, u64)],
    k_guess: u64,
) -> Vec<(u64, u64)> {
    let half = cipher.block_bits() / 2;
    pairs.iter().map(|&(p, c)| (p, cipher.partial_decrypt_last_round(c, k_guess) >> half)).collect()
}

fn to_examples(items: &[(u64, u64)]) -> Vec<Example> {
    items.iter().map(|&(x, y)| (bits_to_vector(x, 16), bits_to_vector(y, 8))).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct KeyErrorTable {
    /// Held-out SSE per key guess.
    pub scores: Vec<f64>,
    /// SSE on the training examples after the last epoch.
    pub training_sse: Vec<f64>,
    /// Fraction of held-out output bits read correctly at the 0.8 / 0.2 thresholds.
    pub bit_accuracy: Vec<f64>,
    pub argmin: u64,
    /// Runner-up score minus the minimum.
    pub margin: f64,
}

impl KeyErrorTable {
    pub fn from_scores(scores: Vec<f64>, training_sse: Vec<f64>, bit_accuracy: Vec<f64>) -> KeyErrorTable {
        let mut order: Vec<usize> = (0..scores.len()).collect();
        order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b)));
        let margin = if order.len() > 1 { scores[order[1]] - scores[order[0]] } else { 0.0 };
        KeyErrorTable { argmin: order[0] as u64, margin, scores, training_sse, bit_accuracy }
    }

    /// Keys by ascending held-out score, ties by key.
    pub fn ranking(&self) -> Vec<u64> {
        let mut order: Vec<u64> = (0..self.scores.len() as u64).collect();
        order.sort_by(|&a, &b| self.scores[a as usize].total_cmp(&self.scores[b as usize]).then(a.cmp(&b)));
        order
    }

    pub fn median_training_sse_excluding(&self, key: u64) -> f64 {
        let mut v: Vec<f64> =
            self.training_sse.iter().enumerate().filter(|&(k, _)| k as u64 != key).map(|(_, &s)| s).collect();
        v.sort_by(f64::total_cmp);
        v[v.len() / 2]
    }
}

fn key_rng(seed: u64, key: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(key);
    rng
}

/// Scores one key guess: train on `train`, evaluate on `held_out`.
pub fn score_key<C: LastRoundTarget + ?Sized>(
    cipher: &C,
    config: &NnAttackConfig,
    train: &[(u64, u64)],
    held_out: &[(u64, u64)],
    key: u64,
) -> Result<(f64, f64, f64), NnAttackError> {
    let mut train_set = build_training_targets(cipher, train, key);
    if config.sort_training_set {
        train_set.sort_unstable();
    }
    let train_set = to_examples(&train_set);
    let eval_set = to_examples(&build_training_targets(cipher, held_out, key));

    let tc = TrainingConfig {
        learning_rate: config.learning_rate,
        epochs: config.epochs,
        target_sse: 0.0,
        seed: config.seed,
        weight_init_range: (-0.5, 0.5),
    };
    let mut rng = key_rng(config.seed, key);
    let mut net = FeedforwardNetwork::random(
        &config.layer_sizes(),
        Activation::Sigmoid { lambda: 1.0 },
        tc.weight_init_range,
        &mut rng,
    )?;
    net.train(&train_set, &tc)?;
    let train_sse = net.sse(&train_set)?;
    let held = net.sse(&eval_set)?;

    let mut right = 0usize;
    for (x, y) in &eval_set {
        let out = threshold_outputs(&net.forward(x)?, 0.8, 0.2);
        right += out
            .iter()
            .zip(y)
            .filter(|(d, &t)| matches!((d, t == 1.0), (BitDecision::One, true) | (BitDecision::Zero, false)))
            .count();
    }
    let accuracy = right as f64 / (eval_set.len() * 8) as f64;
    Ok((held, train_sse, accuracy))
}

/// Ranks all 256 last-round keys. The first `M - c` pairs train, the last
/// `c` evaluate.
pub fn nn_key_ranking_attack<C: LastRoundTarget + ?Sized>(
    cipher: &C,
    config: &NnAttackConfig,
    pairs: &[(u64, u64)],
) -> Result<KeyErrorTable, NnAttackError> {
    config.validate()?;
    if cipher.block_bits() != 16 || cipher.last_round_key_bits() != 8 {
        return Err(NnAttackError::WrongCipherShape);
    }
    let m = config.example_count();
    if pairs.len() < m {
        return Err(NnAttackError::TooFewPairs { needed: m, got: pairs.len() });
    }
    let (train, held_out) = pairs[..m].split_at(m - config.c);
    let rows = (0..256u64)
        .into_par_iter()
        .map(|key| score_key(cipher, config, train, held_out, key))
        .collect::<Result<Vec<_>, _>>()?;
    let (scores, rest): (Vec<f64>, Vec<(f64, f64)>) = rows.into_iter().map(|(a, b, c)| (a, (b, c))).unzip();
    let (training_sse, bit_accuracy) = rest.into_iter().unzip();
    Ok(KeyErrorTable::from_scores(scores, training_sse, bit_accuracy))
}

/// `key,sse` CSV with one row per key.
pub fn error_curve_export(table: &KeyErrorTable) -> String {
    let mut s = String::from("key,sse\n");
    for (k, v) in table.scores.iter().enumerate() {
        writeln!(s, "{k},{v}").unwrap();
    }
    s
}
