//! A binary genetic algorithm: roulette-wheel selection, one-point
//! crossover, bit-flip mutation and generational replacement.
//!
//! Chromosomes are at most 64 bits wide and stored MSB-first in a `u64`,
//! so gene 1 is bit `width - 1`.

pub mod benchmark;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvolveError {
    #[error("population size must be at least 2, got {0}")]
    PopulationTooSmall(usize),
    #[error("chromosome width must be in 2..=64, got {0}")]
    BadWidth(u32),
    #[error("{name} = {value} is not a probability")]
    BadProbability { name: &'static str, value: f64 },
    #[error("crossover point {point} outside 1..{width}")]
    PointOutOfRange { point: u32, width: u32 },
    #[error("fitness must be finite and non-negative, got {0}")]
    NegativeFitness(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chromosome {
    pub bits: u64,
    pub fitness: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaConfig {
    pub population_size: usize,
    pub chromosome_bits: u32,
    /// Generation 0 (the random population) counts as one generation.
    pub max_generations: usize,
    pub crossover_probability: f64,
    pub mutation_probability: f64,
    pub elitism: bool,
    /// Upper bound on fitness evaluations; a generation that would exceed
    /// it is not evaluated.
    pub evaluation_budget: Option<usize>,
    pub seed: u64,
}

impl GaConfig {
    pub fn validate(&self) -> Result<(), EvolveError> {
        if self.population_size < 2 {
            return Err(EvolveError::PopulationTooSmall(self.population_size));
        }
        if !(2..=64).contains(&self.chromosome_bits) {
            return Err(EvolveError::BadWidth(self.chromosome_bits));
        }
        for (name, value) in
            [("crossover_probability", self.crossover_probability), ("mutation_probability", self.mutation_probability)]
        {
            if !(0.0..=1.0).contains(&value) {
                return Err(EvolveError::BadProbability { name, value });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationRecord {
    pub generation: usize,
    /// Fittest member of this generation (lowest index on ties).
    pub best: Chromosome,
    pub best_ever: Chromosome,
    pub mean_fitness: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaRun {
    pub best: Chromosome,
    pub trace: Vec<GenerationRecord>,
    pub evaluations: usize,
}

fn width_mask(width: u32) -> u64 {
    if width == 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

/// Picks index `i` with probability `fitness[i] / sum`. If every fitness
/// is zero the pick is uniform.
pub fn roulette_select(fitness: &[f64], rng: &mut impl Rng) -> usize {
    let total: f64 = fitness.iter().sum();
    if total <= 0.0 {
        return rng.gen_range(0..fitness.len());
    }
    let spin = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    for (i, &f) in fitness.iter().enumerate() {
        acc += f;
        if spin < acc {
            return i;
        }
    }
    // rounding left spin at the very top of the wheel
    fitness.iter().rposition(|&f| f > 0.0).unwrap_or(fitness.len() - 1)
}

/// Swaps the first `point` genes: returns `(b[..point] ++ a[point..],
/// a[..point] ++ b[point..])`.
pub fn one_point_crossover(a: u64, b: u64, width: u32, point: u32) -> Result<(u64, u64), EvolveError> {
    if point < 1 || point >= width {
        return Err(EvolveError::PointOutOfRange { point, width });
    }
    let suffix = width_mask(width - point);
    let prefix = width_mask(width) & !suffix;
    Ok(((b & prefix) | (a & suffix), (a & prefix) | (b & suffix)))
}

/// Flips each of the `width` genes independently with probability `p_m`.
pub fn mutate(bits: u64, width: u32, p_m: f64, rng: &mut impl Rng) -> u64 {
    let mut out = bits;
    for i in 0..width {
        if rng.gen_bool(p_m) {
            out ^= 1 << i;
        }
    }
    out
}

fn best_of(pop: &[u64], fit: &[f64]) -> Chromosome {
    let mut idx = 0;
    for i in 1..pop.len() {
        if fit[i] > fit[idx] {
            idx = i;
        }
    }
    Chromosome { bits: pop[idx], fitness: fit[idx] }
}

/// Runs the generational loop until `stop` returns true, the generation
/// cap is reached or the evaluation budget is spent. The returned best
/// chromosome is the best ever seen, whether or not elitism kept it.
pub fn run_ga<F, S>(config: &GaConfig, fitness: F, mut stop: S) -> Result<GaRun, EvolveError>
where
    F: Fn(u64) -> f64 + Sync,
    S: FnMut(&[GenerationRecord]) -> bool,
{
    config.validate()?;
    let n = config.population_size;
    let width = config.chromosome_bits;
    let mask = width_mask(width);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut pop: Vec<u64> = (0..n).map(|_| rng.gen::<u64>() & mask).collect();
    let mut trace = Vec::new();
    let mut best_ever: Option<Chromosome> = None;
    let mut evaluations = 0usize;

    for generation in 0..config.max_generations {
        if config.evaluation_budget.is_some_and(|cap| evaluations + n > cap) {
            break;
        }
        let fit: Vec<f64> = pop.par_iter().map(|&c| fitness(c)).collect();
        if let Some(&bad) = fit.iter().find(|f| !f.is_finite() || **f < 0.0) {
            return Err(EvolveError::NegativeFitness(bad));
        }
        evaluations += n;
        let best = best_of(&pop, &fit);
        if best_ever.is_none_or(|b| best.fitness > b.fitness) {
            best_ever = Some(best);
        }
        trace.push(GenerationRecord {
            generation,
            best,
            best_ever: best_ever.unwrap(),
            mean_fitness: fit.iter().sum::<f64>() / n as f64,
        });
        if stop(&trace) || generation + 1 == config.max_generations {
            break;
        }

        let parents: Vec<u64> = (0..n).map(|_| pop[roulette_select(&fit, &mut rng)]).collect();
        let mut next = Vec::with_capacity(n);
        for pair in parents.chunks(2) {
            match *pair {
                [a, b] => {
                    let (x, y) = if rng.gen_bool(config.crossover_probability) {
                        let point = rng.gen_range(1..width);
                        one_point_crossover(a, b, width, point)?
                    } else {
                        (a, b)
                    };
                    next.push(x);
                    next.push(y);
                }
                [a] => next.push(a),
                _ => unreachable!(),
            }
        }
        for c in next.iter_mut() {
            *c = mutate(*c, width, config.mutation_probability, &mut rng);
        }
        if config.elitism {
            next[0] = best.bits;
        }
        pop = next;
    }

    let best = best_ever.unwrap_or(Chromosome { bits: 0, fitness: 0.0 });
    Ok(GaRun { best, trace, evaluations })
}
