//! The two-variable maximization problem
//! `f(x1, x2) = 21.5 + x1 sin(4 pi x1) + x2 sin(20 pi x2)` on
//! `[-3.0, 12.1] x [4.1, 5.8]`, encoded in 33 bits (18 for x1, 15 for x2).

use std::f64::consts::PI;

use super::{run_ga, EvolveError, GaConfig, GaRun};

pub const X1_BITS: u32 = 18;
pub const X2_BITS: u32 = 15;
pub const CHROMOSOME_BITS: u32 = X1_BITS + X2_BITS;
pub const X1_RANGE: (f64, f64) = (-3.0, 12.1);
pub const X2_RANGE: (f64, f64) = (4.1, 5.8);

pub fn objective(x1: f64, x2: f64) -> f64 {
    21.5 + x1 * (4.0 * PI * x1).sin() + x2 * (20.0 * PI * x2).sin()
}

pub fn decode(bits: u64) -> (f64, f64) {
    let d1 = (bits >> X2_BITS) & ((1 << X1_BITS) - 1);
    let d2 = bits & ((1 << X2_BITS) - 1);
    let x1 = X1_RANGE.0 + d1 as f64 * (X1_RANGE.1 - X1_RANGE.0) / ((1u64 << X1_BITS) - 1) as f64;
    let x2 = X2_RANGE.0 + d2 as f64 * (X2_RANGE.1 - X2_RANGE.0) / ((1u64 << X2_BITS) - 1) as f64;
    (x1, x2)
}

pub fn fitness(bits: u64) -> f64 {
    let (x1, x2) = decode(bits);
    objective(x1, x2)
}

/// Population 50, 200 generations, `p_c = 0.25`, `p_m = 0.1`.
pub fn demo_config(seed: u64) -> GaConfig {
    GaConfig {
        population_size: 50,
        chromosome_bits: CHROMOSOME_BITS,
        max_generations: 200,
        crossover_probability: 0.25,
        mutation_probability: 0.1,
        elitism: false,
        evaluation_budget: None,
        seed,
    }
}

pub fn run_benchmark(config: &GaConfig) -> Result<GaRun, EvolveError> {
    run_ga(config, fitness, |_| false)
}
