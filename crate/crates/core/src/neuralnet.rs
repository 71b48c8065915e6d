//! Fully connected feedforward networks trained by online
//! backpropagation.

use std::fmt::Write as _;

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetError {
    #[error("expected input of length {expected}, got {got}")]
    InputSize { expected: usize, got: usize },
    #[error("expected target of length {expected}, got {got}")]
    TargetSize { expected: usize, got: usize },
    #[error("learning rate must lie in (0, 1), got {0}")]
    LearningRate(f64),
    #[error("hard-limiter networks cannot be trained by gradient descent")]
    NotTrainable,
    #[error("a network needs at least two layers of nonzero size")]
    BadShape,
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Activation {
    /// `1 / (1 + exp(-lambda * v))`
    Sigmoid { lambda: f64 },
    /// 1 for `v > 0`, else 0.
    HardLimiter,
}

impl Activation {
    pub fn apply(self, v: f64) -> f64 {
        match self {
            Activation::Sigmoid { lambda } => 1.0 / (1.0 + (-lambda * v).exp()),
            Activation::HardLimiter => (v > 0.0) as u8 as f64,
        }
    }

    /// Derivative expressed through the output `o = f(v)`.
    fn derivative_from_output(self, o: f64) -> f64 {
        match self {
            Activation::Sigmoid { lambda } => lambda * o * (1.0 - o),
            Activation::HardLimiter => 0.0,
        }
    }
}

/// One layer: `weights` is `outputs x inputs`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl Layer {
    fn weight(&self, j: usize, i: usize) -> f64 {
        self.weights[j * self.inputs + i]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeedforwardNetwork {
    pub layer_sizes: Vec<usize>,
    pub layers: Vec<Layer>,
    pub activation: Activation,
}

/// Per-sample weight and bias gradients of `E_p = 1/2 sum (y - o)^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    /// Training stops early once the epoch SSE falls below this.
    pub target_sse: f64,
    pub seed: u64,
    pub weight_init_range: (f64, f64),
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig { learning_rate: 0.5, epochs: 1000, target_sse: 0.0, seed: 0, weight_init_range: (-0.5, 0.5) }
    }
}

/// Three-valued reading of a sigmoid output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitDecision {
    Zero,
    One,
    Undecided,
}

pub fn threshold_outputs(raw: &[f64], hi: f64, lo: f64) -> Vec<BitDecision> {
    raw.iter()
        .map(|&v| {
            if v > hi {
                BitDecision::One
            } else if v < lo {
                BitDecision::Zero
            } else {
                BitDecision::Undecided
            }
        })
        .collect()
}

pub type Example = (Vec<f64>, Vec<f64>);

/// Reused per-layer buffers for training.
#[derive(Default)]
struct Scratch {
    acts: Vec<Vec<f64>>,
    deltas: Vec<Vec<f64>>,
}

impl FeedforwardNetwork {
    pub fn zeroed(layer_sizes: &[usize], activation: Activation) -> Result<Self, NetError> {
        if layer_sizes.len() < 2 || layer_sizes.contains(&0) {
            return Err(NetError::BadShape);
        }
        let layers = layer_sizes
            .windows(2)
            .map(|w| Layer { inputs: w[0], outputs: w[1], weights: vec![0.0; w[0] * w[1]], biases: vec![0.0; w[1]] })
            .collect();
        Ok(FeedforwardNetwork { layer_sizes: layer_sizes.to_vec(), layers, activation })
    }

    /// Weights and biases drawn uniformly from `range`.
    pub fn random(
        layer_sizes: &[usize],
        activation: Activation,
        range: (f64, f64),
        rng: &mut impl Rng,
    ) -> Result<Self, NetError> {
        let mut net = Self::zeroed(layer_sizes, activation)?;
        for layer in net.layers.iter_mut() {
            for w in layer.weights.iter_mut().chain(layer.biases.iter_mut()) {
                *w = rng.gen_range(range.0..range.1);
            }
        }
        Ok(net)
    }

    pub fn input_size(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn output_size(&self) -> usize {
        *self.layer_sizes.last().unwrap()
    }

    /// Activations of every layer, starting with the input itself.
    pub fn forward_trace(&self, input: &[f64]) -> Result<Vec<Vec<f64>>, NetError> {
        if input.len() != self.input_size() {
            return Err(NetError::InputSize { expected: self.input_size(), got: input.len() });
        }
        let mut acts = Vec::new();
        self.forward_into(input, &mut acts);
        Ok(acts)
    }

    fn forward_into(&self, input: &[f64], acts: &mut Vec<Vec<f64>>) {
        acts.resize(self.layers.len() + 1, Vec::new());
        acts[0].clear();
        acts[0].extend_from_slice(input);
        for (k, layer) in self.layers.iter().enumerate() {
            let (done, rest) = acts.split_at_mut(k + 1);
            let x = &done[k];
            let out = &mut rest[0];
            out.clear();
            out.extend((0..layer.outputs).map(|j| {
                let row = &layer.weights[j * layer.inputs..(j + 1) * layer.inputs];
                let net: f64 = row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + layer.biases[j];
                self.activation.apply(net)
            }));
        }
    }

    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>, NetError> {
        Ok(self.forward_trace(input)?.pop().unwrap())
    }

    fn check_target(&self, target: &[f64]) -> Result<(), NetError> {
        if target.len() != self.output_size() {
            return Err(NetError::TargetSize { expected: self.output_size(), got: target.len() });
        }
        Ok(())
    }

    /// Output deltas `f'(net)(y - o)`, then hidden deltas through the
    /// current (not yet updated) weights.
    fn deltas_into(&self, acts: &[Vec<f64>], target: &[f64], deltas: &mut Vec<Vec<f64>>) {
        let depth = self.layers.len();
        deltas.resize(depth, Vec::new());
        let last = &mut deltas[depth - 1];
        last.clear();
        last.extend(acts[depth].iter().zip(target).map(|(&o, &y)| self.activation.derivative_from_output(o) * (y - o)));
        for k in (0..depth - 1).rev() {
            let next = &self.layers[k + 1];
            let (head, tail) = deltas.split_at_mut(k + 1);
            let d_next = &tail[0];
            let d = &mut head[k];
            d.clear();
            d.extend(acts[k + 1].iter().enumerate().map(|(i, &o)| {
                let back: f64 = (0..next.outputs).map(|j| d_next[j] * next.weight(j, i)).sum();
                self.activation.derivative_from_output(o) * back
            }));
        }
    }

    fn deltas(&self, acts: &[Vec<f64>], target: &[f64]) -> Vec<Vec<f64>> {
        let mut d = Vec::new();
        self.deltas_into(acts, target, &mut d);
        d
    }

    pub fn example_error(&self, input: &[f64], target: &[f64]) -> Result<f64, NetError> {
        self.check_target(target)?;
        let o = self.forward(input)?;
        Ok(0.5 * o.iter().zip(target).map(|(o, y)| (y - o) * (y - o)).sum::<f64>())
    }

    /// `dE_p / dw` and `dE_p / dtheta` for one example.
    pub fn gradient(&self, input: &[f64], target: &[f64]) -> Result<Gradient, NetError> {
        self.check_target(target)?;
        let acts = self.forward_trace(input)?;
        let deltas = self.deltas(&acts, target);
        let mut weights = Vec::with_capacity(self.layers.len());
        let mut biases = Vec::with_capacity(self.layers.len());
        for (k, layer) in self.layers.iter().enumerate() {
            let mut gw = vec![0.0; layer.weights.len()];
            for j in 0..layer.outputs {
                for i in 0..layer.inputs {
                    gw[j * layer.inputs + i] = -deltas[k][j] * acts[k][i];
                }
            }
            weights.push(gw);
            biases.push(deltas[k].iter().map(|d| -d).collect());
        }
        Ok(Gradient { weights, biases })
    }

    /// One online update; returns `E_p` measured before the update.
    pub fn train_example(&mut self, input: &[f64], target: &[f64], eta: f64) -> Result<f64, NetError> {
        self.train_example_with(input, target, eta, &mut Scratch::default())
    }

    fn train_example_with(
        &mut self,
        input: &[f64],
        target: &[f64],
        eta: f64,
        scratch: &mut Scratch,
    ) -> Result<f64, NetError> {
        if matches!(self.activation, Activation::HardLimiter) {
            return Err(NetError::NotTrainable);
        }
        self.check_target(target)?;
        if input.len() != self.input_size() {
            return Err(NetError::InputSize { expected: self.input_size(), got: input.len() });
        }
        let Scratch { acts, deltas } = scratch;
        self.forward_into(input, acts);
        self.deltas_into(acts, target, deltas);
        let e = 0.5 * acts.last().unwrap().iter().zip(target).map(|(o, y)| (y - o) * (y - o)).sum::<f64>();
        for (k, layer) in self.layers.iter_mut().enumerate() {
            for j in 0..layer.outputs {
                let step = eta * deltas[k][j];
                if step == 0.0 {
                    continue;
                }
                let row = &mut layer.weights[j * layer.inputs..(j + 1) * layer.inputs];
                for (w, &x) in row.iter_mut().zip(&acts[k]) {
                    *w += step * x;
                }
                layer.biases[j] += step;
            }
        }
        Ok(e)
    }

    /// One pass over `examples` in order; returns `sum_p E_p`.
    pub fn train_epoch(&mut self, examples: &[Example], config: &TrainingConfig) -> Result<f64, NetError> {
        let eta = config.learning_rate;
        if !(eta > 0.0 && eta < 1.0) {
            return Err(NetError::LearningRate(eta));
        }
        let mut scratch = Scratch::default();
        let mut sse = 0.0;
        for (x, y) in examples {
            sse += self.train_example_with(x, y, eta, &mut scratch)?;
        }
        Ok(sse)
    }

    /// Trains for up to `config.epochs` epochs; returns the epochs run and
    /// the last epoch's SSE.
    pub fn train(&mut self, examples: &[Example], config: &TrainingConfig) -> Result<(usize, f64), NetError> {
        let mut sse = f64::INFINITY;
        for epoch in 0..config.epochs {
            sse = self.train_epoch(examples, config)?;
            if sse < config.target_sse {
                return Ok((epoch + 1, sse));
            }
        }
        Ok((config.epochs, sse))
    }

    /// `sum_p E_p` without changing the network.
    pub fn sse(&self, examples: &[Example]) -> Result<f64, NetError> {
        examples.iter().map(|(x, y)| self.example_error(x, y)).sum()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let sizes: Vec<String> = self.layer_sizes.iter().map(|n| n.to_string()).collect();
        writeln!(s, "layers: {}", sizes.join(" ")).unwrap();
        match self.activation {
            Activation::Sigmoid { lambda } => writeln!(s, "activation: sigmoid {lambda:?}").unwrap(),
            Activation::HardLimiter => writeln!(s, "activation: hardlimiter").unwrap(),
        }
        let row = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(" ");
        for layer in &self.layers {
            for j in 0..layer.outputs {
                writeln!(s, "{}", row(&layer.weights[j * layer.inputs..(j + 1) * layer.inputs])).unwrap();
            }
            writeln!(s, "{}", row(&layer.biases)).unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, NetError> {
        let err = |line: usize, message: &str| NetError::Parse { line, message: message.to_string() };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()).peekable();
        let (n0, header) = lines.next().ok_or_else(|| err(1, "empty input"))?;
        let sizes = header
            .strip_prefix("layers:")
            .ok_or_else(|| err(n0 + 1, "expected `layers:` header"))?
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|_| err(n0 + 1, "bad layer size")))
            .collect::<Result<Vec<_>, _>>()?;
        let mut activation = Activation::Sigmoid { lambda: 1.0 };
        if let Some((n, l)) = lines.peek().copied() {
            if let Some(rest) = l.strip_prefix("activation:") {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                activation = match parts.as_slice() {
                    ["hardlimiter"] => Activation::HardLimiter,
                    ["sigmoid", lam] => {
                        Activation::Sigmoid { lambda: lam.parse().map_err(|_| err(n + 1, "bad lambda"))? }
                    }
                    _ => return Err(err(n + 1, "unknown activation")),
                };
                lines.next();
            }
        }
        let mut net = Self::zeroed(&sizes, activation)?;
        let mut parse_row = |want: usize| -> Result<Vec<f64>, NetError> {
            let (n, l) = lines.next().ok_or_else(|| err(0, "unexpected end of input"))?;
            let row = l
                .split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|_| err(n + 1, "bad number")))
                .collect::<Result<Vec<_>, _>>()?;
            if row.len() != want {
                return Err(err(n + 1, "wrong row length"));
            }
            Ok(row)
        };
        for layer in net.layers.iter_mut() {
            for j in 0..layer.outputs {
                let row = parse_row(layer.inputs)?;
                layer.weights[j * layer.inputs..(j + 1) * layer.inputs].copy_from_slice(&row);
            }
            layer.biases = parse_row(layer.outputs)?;
        }
        Ok(net)
    }
}

/// Encodes the low `bits` bits of `value` MSB-first as 0.0 / 1.0.
pub fn bits_to_vector(value: u64, bits: u32) -> Vec<f64> {
    (0..bits).rev().map(|k| (value >> k & 1) as f64).collect()
}
