//! Genetic-algorithm search for the last-round subkey, scoring each
//! candidate by the fraction of chosen pairs that follow the differential
//! characteristic after partial decryption.

use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::diffcrypt::{
    count_right_pairs, generate_chosen_pairs, pairs_for_rule, prefilter_pairs, propagate_characteristic, spn_path,
    ChosenPair, CipherStructure, DiffError, DifferentialCharacteristic,
};
use crate::evolve::{run_ga, EvolveError, GaConfig};
use crate::toyciphers::{
    nibble_keys_equivalent, permute16, s_layer_can_map, substitute16, substitute16_inverse, BasicSpn, BlockCipher,
    LastRoundTarget,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GaAttackError {
    #[error("no chosen pairs supplied")]
    NoPairs,
    #[error(transparent)]
    Mismatch(#[from] DiffError),
    #[error(transparent)]
    Ga(#[from] EvolveError),
    #[error("alpha must lie in (0, 1), got {0}")]
    BadAlpha(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaAttackConfig {
    pub characteristic: DifferentialCharacteristic,
    pub ga: GaConfig,
    pub alpha: f64,
    pub plateau_generations: usize,
    /// Hard cap `S` on evaluated chromosomes.
    pub budget_cap: usize,
}

impl GaAttackConfig {
    /// Population 1024, 16 generations, `p_c = 0.25`, `p_m = 0.01`,
    /// `alpha = 0.8`, a plateau of 3 generations and `S = 2^(n-1)`.
    pub fn with_defaults(characteristic: DifferentialCharacteristic, key_bits: u32, seed: u64) -> Self {
        GaAttackConfig {
            characteristic,
            ga: GaConfig {
                population_size: 1024,
                chromosome_bits: key_bits,
                max_generations: 16,
                crossover_probability: 0.25,
                mutation_probability: 0.01,
                elitism: false,
                evaluation_budget: None,
                seed,
            },
            alpha: 0.8,
            plateau_generations: 3,
            budget_cap: 1 << (key_bits - 1),
        }
    }
}

/// `F = d / M` for one candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct FitnessRecord {
    pub right_pairs: usize,
    pub pair_total: usize,
    pub fitness: Ratio<u64>,
    pub percent_of_pd: f64,
}

impl FitnessRecord {
    pub fn new(right_pairs: usize, pair_total: usize, p_d: Ratio<u64>) -> FitnessRecord {
        let fitness =
            if pair_total == 0 { Ratio::from_integer(0) } else { Ratio::new(right_pairs as u64, pair_total as u64) };
        let pd = *p_d.numer() as f64 / *p_d.denom() as f64;
        let f = right_pairs as f64 / pair_total.max(1) as f64;
        FitnessRecord { right_pairs, pair_total, fitness, percent_of_pd: 100.0 * f / pd }
    }

    pub fn fitness_f64(&self) -> f64 {
        *self.fitness.numer() as f64 / *self.fitness.denom() as f64
    }
}

/// Scores one candidate subkey.
pub fn differential_fitness<C: LastRoundTarget + ?Sized>(
    cipher: &C,
    characteristic: &DifferentialCharacteristic,
    pairs: &[ChosenPair],
    candidate: u64,
) -> FitnessRecord {
    let target = characteristic.target_difference();
    let filtered = prefilter_pairs(cipher, pairs, target);
    let d = count_right_pairs(cipher, &filtered, target, candidate);
    FitnessRecord::new(d, pairs.len(), characteristic.probability)
}

/// True once the best fitness has reached `alpha * P_D` and has not
/// changed over the last `plateau` generations.
pub fn ga_stop_predicate(trace: &[FitnessRecord], alpha: f64, plateau: usize, p_d: Ratio<u64>) -> bool {
    if plateau == 0 || trace.len() < plateau {
        return false;
    }
    let tail = &trace[trace.len() - plateau..];
    let last = tail[tail.len() - 1].right_pairs;
    if tail.iter().any(|r| r.right_pairs != last) {
        return false;
    }
    let threshold = Ratio::new((alpha * 1e9).round() as u64, 1_000_000_000) * p_d;
    tail[tail.len() - 1].fitness >= threshold
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationRow {
    pub generation: usize,
    pub best_solution: u64,
    pub fitness: FitnessRecord,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaAttackResult {
    pub recovered: u64,
    pub recovered_fitness: FitnessRecord,
    pub rows: Vec<GenerationRow>,
    pub keys_evaluated: usize,
    pub stopped_early: bool,
}

impl GaAttackResult {
    /// True if the recovered key cannot be told apart from `true_key` by
    /// right-pair counting.
    pub fn matches<C: LastRoundTarget + ?Sized>(&self, cipher: &C, true_key: u64, target: u64) -> bool {
        cipher.guesses_indistinguishable(self.recovered, true_key, target)
    }
}

fn run_attack<C: LastRoundTarget + ?Sized>(
    cipher: &C,
    config: &GaAttackConfig,
    pairs: &[ChosenPair],
    use_stop: bool,
) -> Result<GaAttackResult, GaAttackError> {
    if pairs.is_empty() {
        return Err(GaAttackError::NoPairs);
    }
    if !(config.alpha > 0.0 && config.alpha < 1.0) {
        return Err(GaAttackError::BadAlpha(config.alpha));
    }
    let ch = &config.characteristic;
    if let Some(index) = pairs.iter().position(|p| p.p1 ^ p.p2 != ch.input_difference) {
        return Err(DiffError::WrongInputDifference {
            index,
            expected: ch.input_difference,
            actual: pairs[index].p1 ^ pairs[index].p2,
        }
        .into());
    }
    let target = ch.target_difference();
    let filtered = prefilter_pairs(cipher, pairs, target);
    let m = pairs.len();
    let fitness = |key: u64| count_right_pairs(cipher, &filtered, target, key) as f64 / m as f64;

    let mut ga = config.ga.clone();
    let cap = ga.evaluation_budget.map_or(config.budget_cap, |b| b.min(config.budget_cap));
    ga.evaluation_budget = Some(cap);

    let record = |f: f64| FitnessRecord::new((f * m as f64).round() as usize, m, ch.probability);
    let mut stopped = false;
    let run = run_ga(&ga, fitness, |trace| {
        if !use_stop {
            return false;
        }
        let recs: Vec<FitnessRecord> = trace.iter().map(|g| record(g.best.fitness)).collect();
        stopped = ga_stop_predicate(&recs, config.alpha, config.plateau_generations, ch.probability);
        stopped
    })?;
    let rows = run
        .trace
        .iter()
        .map(|g| GenerationRow {
            generation: g.generation,
            best_solution: g.best.bits,
            fitness: record(g.best.fitness),
        })
        .collect();
    Ok(GaAttackResult {
        recovered: run.best.bits,
        recovered_fitness: record(run.best.fitness),
        rows,
        keys_evaluated: run.evaluations,
        stopped_early: stopped,
    })
}

/// Evolves candidate last-round subkeys until the stop predicate fires or
/// the generation and budget limits are reached, and returns the best
/// candidate ever seen.
pub fn ga_differential_attack<C: LastRoundTarget + ?Sized>(
    cipher: &C,
    config: &GaAttackConfig,
    pairs: &[ChosenPair],
) -> Result<GaAttackResult, GaAttackError> {
    run_attack(cipher, config, pairs, true)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepEntry {
    pub c: u64,
    pub pairs: usize,
    pub result: GaAttackResult,
    pub converged: bool,
}

/// Reruns the attack with `ceil(c / P_D)` fresh pairs for each `c`, to the
/// generation cap, and reports whether the best key found is the true one.
pub fn pair_count_sweep<C: LastRoundTarget + ?Sized>(
    cipher: &C,
    true_key: u64,
    config: &GaAttackConfig,
    c_values: &[u64],
    pair_seed: u64,
) -> Result<Vec<SweepEntry>, GaAttackError> {
    let ch = &config.characteristic;
    c_values
        .iter()
        .map(|&c| {
            let n = pairs_for_rule(c, ch.probability);
            let mut rng = ChaCha8Rng::seed_from_u64(pair_seed ^ c.wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let pairs = generate_chosen_pairs(cipher, ch.input_difference, n, &mut rng);
            let result = run_attack(cipher, config, &pairs, false)?;
            let converged = result.matches(cipher, true_key, ch.target_difference());
            Ok(SweepEntry { c, pairs: n, result, converged })
        })
        .collect()
}

/// The SPN with its final round stripped under a recovered `K_5`.
///
/// Its "ciphertext" is `P(S4^-1(c ^ K5))`, which ends in the round-3
/// S-layer followed by whitening with `P(K_4)`. Experimental.
#[derive(Debug, Clone)]
pub struct PeeledSpn {
    oracle: BasicSpn,
    k5: u16,
}

impl PeeledSpn {
    pub fn new(oracle: BasicSpn, recovered_k5: u16) -> PeeledSpn {
        PeeledSpn { oracle, k5: recovered_k5 }
    }

    pub fn peel(&self, c: u64) -> u64 {
        permute16(substitute16_inverse(4, c as u16 ^ self.k5)) as u64
    }

    pub fn peel_pairs(&self, pairs: &[ChosenPair]) -> Vec<ChosenPair> {
        pairs.iter().map(|p| ChosenPair { c1: self.peel(p.c1), c2: self.peel(p.c2), ..*p }).collect()
    }

    /// The subkey this stage can recover: `P(K_4)`.
    pub fn target_key(&self) -> u64 {
        permute16(self.oracle.keys()[3]) as u64
    }

    /// Two-round characteristic `00F0 -> 0444` with probability 1/8.
    pub fn characteristic() -> DifferentialCharacteristic {
        let path: Vec<_> = spn_path().into_iter().filter(|s| s.round < 3).collect();
        propagate_characteristic(CipherStructure::Spn { rounds: 3 }, 0x00F0, &path).expect("valid sub-path")
    }
}

impl BlockCipher for PeeledSpn {
    fn block_bits(&self) -> u32 {
        16
    }
    fn rounds(&self) -> usize {
        3
    }
    fn encrypt_block(&self, p: u64) -> u64 {
        self.peel(self.oracle.encrypt(p as u16) as u64)
    }
    fn decrypt_block(&self, c: u64) -> u64 {
        let full = substitute16(4, permute16(c as u16)) ^ self.k5;
        self.oracle.decrypt(full) as u64
    }
}

impl LastRoundTarget for PeeledSpn {
    fn last_round_key_bits(&self) -> u32 {
        16
    }
    fn partial_decrypt_last_round(&self, c: u64, guess: u64) -> u64 {
        substitute16_inverse(3, (c ^ guess) as u16) as u64
    }
    fn pre_last_round_state(&self, p: u64) -> u64 {
        self.oracle.trace(p as u16).sbox_inputs[2] as u64
    }
    fn could_match(&self, c1: u64, c2: u64, target: u64) -> bool {
        s_layer_can_map(3, target as u16, (c1 ^ c2) as u16)
    }
    fn guesses_indistinguishable(&self, a: u64, b: u64, target: u64) -> bool {
        nibble_keys_equivalent(a, b, target & 0xFFFF, 4, false)
    }
}
