use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{word_mask, IcryptError};

pub const MIN_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QualityConfig {
    pub samples: usize,
    pub seed: u64,
    /// Leading samples that also feed the pairwise (BIC) counters.
    pub bic_samples: usize,
}

impl QualityConfig {
    pub fn new(samples: usize, seed: u64) -> QualityConfig {
        QualityConfig { samples, seed, bic_samples: samples.min(10_000) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AvalancheReport {
    pub in_bits: u32,
    pub out_bits: u32,
    pub samples: usize,
    /// Mean fraction of output bits flipped by a single input-bit flip.
    pub avalanche_fraction: f64,
    /// `sac_matrix[i][j]`: probability that flipping input bit `i` flips
    /// output bit `j`. Bits are numbered MSB-first.
    pub sac_matrix: Vec<Vec<f64>>,
    /// Largest `|corr|` between two output-bit flip indicators under the
    /// same input-bit flip.
    pub bic_max_correlation: f64,
    /// Fewest output bits flipped by any observed single-bit input flip.
    pub guaranteed_avalanche_order: u32,
}

impl AvalancheReport {
    pub fn sac_max_deviation(&self) -> f64 {
        self.sac_matrix.iter().flatten().map(|p| (p - 0.5).abs()).fold(0.0, f64::max)
    }

    /// One row per input bit, one column per output bit.
    pub fn sac_csv(&self) -> String {
        let mut s = String::from("input_bit");
        for j in 0..self.out_bits {
            s.push_str(&format!(",out{j}"));
        }
        s.push('\n');
        for (i, row) in self.sac_matrix.iter().enumerate() {
            s.push_str(&i.to_string());
            for p in row {
                s.push_str(&format!(",{p:.6}"));
            }
            s.push('\n');
        }
        s
    }

    pub fn summary_csv(&self) -> String {
        format!(
            "samples,avalanche_fraction,sac_max_deviation,bic_max_correlation,guaranteed_avalanche_order\n{},{:.6},{:.6},{:.6},{}\n",
            self.samples,
            self.avalanche_fraction,
            self.sac_max_deviation(),
            self.bic_max_correlation,
            self.guaranteed_avalanche_order
        )
    }
}

struct Tally {
    flips: Vec<u64>,
    bic_single: Vec<u64>,
    bic_pairs: Vec<u64>,
    bic_n: u64,
    total: u64,
    min_weight: u32,
}

impl Tally {
    fn new(n: usize, m: usize) -> Tally {
        Tally {
            flips: vec![0; n * m],
            bic_single: vec![0; n * m],
            bic_pairs: vec![0; n * m * m],
            bic_n: 0,
            total: 0,
            min_weight: u32::MAX,
        }
    }

    fn merge(mut self, o: Tally) -> Tally {
        for (a, b) in self.flips.iter_mut().zip(&o.flips) {
            *a += b;
        }
        for (a, b) in self.bic_single.iter_mut().zip(&o.bic_single) {
            *a += b;
        }
        for (a, b) in self.bic_pairs.iter_mut().zip(&o.bic_pairs) {
            *a += b;
        }
        self.bic_n += o.bic_n;
        self.total += o.total;
        self.min_weight = self.min_weight.min(o.min_weight);
        self
    }
}

const CHUNK: usize = 1000;

/// Monte-Carlo avalanche, SAC, BIC and guaranteed-avalanche estimates for
/// `f` over uniformly random inputs.
pub fn quality_harness<F>(
    f: F,
    in_bits: u32,
    out_bits: u32,
    config: &QualityConfig,
) -> Result<AvalancheReport, IcryptError>
where
    F: Fn(u128) -> u128 + Sync,
{
    if config.samples < MIN_SAMPLES {
        return Err(IcryptError::TooFewSamples { min: MIN_SAMPLES, got: config.samples });
    }
    let (n, m) = (in_bits as usize, out_bits as usize);
    let (in_mask, out_mask) = (word_mask(in_bits), word_mask(out_bits));
    let chunks = config.samples.div_ceil(CHUNK);
    let tally = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(c as u64);
            let mut t = Tally::new(n, m);
            let start = c * CHUNK;
            for s in start..(start + CHUNK).min(config.samples) {
                let bic = s < config.bic_samples;
                let x = rng.gen::<u128>() & in_mask;
                let y = f(x) & out_mask;
                for i in 0..n {
                    let d = (f(x ^ (1u128 << (n - 1 - i))) & out_mask) ^ y;
                    let w = d.count_ones();
                    t.total += w as u64;
                    t.min_weight = t.min_weight.min(w);
                    let set: Vec<usize> = (0..m).filter(|&j| d >> (m - 1 - j) & 1 == 1).collect();
                    for &j in &set {
                        t.flips[i * m + j] += 1;
                    }
                    if bic {
                        for (a, &j) in set.iter().enumerate() {
                            t.bic_single[i * m + j] += 1;
                            for &k in &set[a + 1..] {
                                t.bic_pairs[(i * m + j) * m + k] += 1;
                            }
                        }
                    }
                }
                t.bic_n += bic as u64;
            }
            t
        })
        .reduce(|| Tally::new(n, m), Tally::merge);

    let samples = config.samples as f64;
    let sac_matrix = (0..n).map(|i| (0..m).map(|j| tally.flips[i * m + j] as f64 / samples).collect()).collect();
    let mut bic = 0.0f64;
    if tally.bic_n > 0 {
        let bn = tally.bic_n as f64;
        for i in 0..n {
            for j in 0..m {
                let pj = tally.bic_single[i * m + j] as f64 / bn;
                let vj = pj * (1.0 - pj);
                if vj == 0.0 {
                    continue;
                }
                for k in j + 1..m {
                    let pk = tally.bic_single[i * m + k] as f64 / bn;
                    let vk = pk * (1.0 - pk);
                    if vk == 0.0 {
                        continue;
                    }
                    let pjk = tally.bic_pairs[(i * m + j) * m + k] as f64 / bn;
                    bic = bic.max(((pjk - pj * pk) / (vj * vk).sqrt()).abs());
                }
            }
        }
    }
    Ok(AvalancheReport {
        in_bits,
        out_bits,
        samples: config.samples,
        avalanche_fraction: tally.total as f64 / (samples * n as f64 * m as f64),
        sac_matrix,
        bic_max_correlation: bic,
        guaranteed_avalanche_order: tally.min_weight,
    })
}
