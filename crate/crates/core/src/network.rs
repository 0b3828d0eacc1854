//! Layered feedforward networks with logistic units.
//!
//! Parameters are stored flat in the portable weight-vector layout:
//! layer-major, then destination-neuron-major, with each neuron's bias
//! stored after its incoming weights. A particle position and a network are
//! therefore the same numbers viewed two ways.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::error::{Error, Result};

/// Layer sizes of a feedforward network: input, one or more hidden, output.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Topology {
    sizes: Vec<usize>,
}

impl Topology {
    pub fn new(input_count: usize, hidden_sizes: &[usize], output_count: usize) -> Result<Self> {
        if hidden_sizes.is_empty() {
            return Err(Error::InvalidTopology(
                "at least one hidden layer is required".into(),
            ));
        }
        let mut sizes = Vec::with_capacity(hidden_sizes.len() + 2);
        sizes.push(input_count);
        sizes.extend_from_slice(hidden_sizes);
        sizes.push(output_count);
        Self::from_sizes(sizes)
    }

    /// Builds a topology from the full list of layer sizes, input first.
    pub fn from_sizes(sizes: Vec<usize>) -> Result<Self> {
        if sizes.len() < 3 {
            return Err(Error::InvalidTopology(format!(
                "need input, hidden and output layers, got {} layer(s)",
                sizes.len()
            )));
        }
        if let Some(pos) = sizes.iter().position(|&n| n == 0) {
            return Err(Error::InvalidTopology(format!(
                "layer {pos} has zero neurons"
            )));
        }
        Ok(Self { sizes })
    }

    pub fn input_count(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_count(&self) -> usize {
        self.sizes[self.sizes.len() - 1]
    }

    pub fn hidden_sizes(&self) -> &[usize] {
        &self.sizes[1..self.sizes.len() - 1]
    }

    /// All layer sizes, input first.
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Number of weight layers (connections between consecutive layers).
    pub fn layer_count(&self) -> usize {
        self.sizes.len() - 1
    }

    /// Total number of weights and biases.
    pub fn flat_dimension(&self) -> usize {
        self.sizes.windows(2).map(|w| (w[0] + 1) * w[1]).sum()
    }

    /// Offset of weight layer `layer` inside the flat vector.
    pub fn layer_offset(&self, layer: usize) -> usize {
        self.sizes[..=layer]
            .windows(2)
            .map(|w| (w[0] + 1) * w[1])
            .sum()
    }

    /// Flat index of the weight from source `src` into neuron `dst` of weight
    /// layer `layer`. `src == sources` addresses the bias.
    pub fn param_index(&self, layer: usize, dst: usize, src: usize) -> usize {
        let sources = self.sizes[layer];
        debug_assert!(src <= sources && dst < self.sizes[layer + 1]);
        self.layer_offset(layer) + dst * (sources + 1) + src
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, n) in self.sizes.iter().enumerate() {
            if i > 0 {
                f.write_str("-")?;
            }
            write!(f, "{n}")?;
        }
        Ok(())
    }
}

/// Flat encoding of every weight and bias of a network.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(pub Vec<f64>);

impl WeightVector {
    pub fn zeros(dimension: usize) -> Self {
        Self(alloc::vec![0.0; dimension])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for WeightVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

/// The logistic sigmoid `1 / (1 + e^-x)`.
///
/// Evaluated so that large magnitudes saturate instead of overflowing.
pub fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + libm::exp(-x))
    } else {
        let e = libm::exp(x);
        e / (1.0 + e)
    }
}

/// One training or evaluation example.
#[derive(Debug, Clone, PartialEq)]
pub struct Pattern {
    pub inputs: Vec<f64>,
    pub targets: Vec<f64>,
}

impl Pattern {
    pub fn new(inputs: Vec<f64>, targets: Vec<f64>) -> Self {
        Self { inputs, targets }
    }
}

/// Outputs of every layer from one forward pass, input layer first.
#[derive(Debug, Clone, PartialEq)]
pub struct Activations {
    pub layers: Vec<Vec<f64>>,
}

impl Activations {
    pub fn output(&self) -> &[f64] {
        self.layers.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

/// A feedforward network with logistic units in every non-input layer.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    topology: Topology,
    params: Vec<f64>,
}

impl Network {
    /// A network with every weight and bias set to zero.
    pub fn zeros(topology: Topology) -> Self {
        let params = alloc::vec![0.0; topology.flat_dimension()];
        Self { topology, params }
    }

    /// Weights and biases drawn uniformly from `[low, high)`.
    pub fn random<R: Rng + ?Sized>(topology: Topology, low: f64, high: f64, rng: &mut R) -> Self {
        let params = (0..topology.flat_dimension())
            .map(|_| rng.gen_range(low..high))
            .collect();
        Self { topology, params }
    }

    /// Rebuilds a network from its flat weight vector.
    pub fn decode(topology: Topology, weights: &WeightVector) -> Result<Self> {
        Self::from_params(topology, weights.0.clone())
    }

    pub fn from_params(topology: Topology, params: Vec<f64>) -> Result<Self> {
        let expected = topology.flat_dimension();
        if params.len() != expected {
            return Err(Error::DimensionMismatch {
                what: "weight vector",
                expected,
                found: params.len(),
            });
        }
        Ok(Self { topology, params })
    }

    /// Flattens the network into the portable weight-vector layout.
    pub fn encode(&self) -> WeightVector {
        WeightVector(self.params.clone())
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn weight(&self, layer: usize, dst: usize, src: usize) -> f64 {
        self.params[self.topology.param_index(layer, dst, src)]
    }

    pub fn bias(&self, layer: usize, dst: usize) -> f64 {
        let sources = self.topology.sizes()[layer];
        self.params[self.topology.param_index(layer, dst, sources)]
    }

    fn check_inputs(&self, features: &[f64]) -> Result<()> {
        let expected = self.topology.input_count();
        if features.len() != expected {
            return Err(Error::DimensionMismatch {
                what: "network input",
                expected,
                found: features.len(),
            });
        }
        Ok(())
    }

    /// Output-layer values for one input vector.
    pub fn forward(&self, features: &[f64]) -> Result<Vec<f64>> {
        self.check_inputs(features)?;
        let mut current: Vec<f64> = features.to_vec();
        let mut offset = 0;
        for pair in self.topology.sizes().windows(2) {
            current = self.propagate_layer(&current, pair[1], offset);
            offset += (pair[0] + 1) * pair[1];
        }
        Ok(current)
    }

    /// Forward pass keeping every intermediate layer output.
    pub fn forward_trace(&self, features: &[f64]) -> Result<Activations> {
        self.check_inputs(features)?;
        let mut layers = Vec::with_capacity(self.topology.sizes().len());
        layers.push(features.to_vec());
        let mut offset = 0;
        for pair in self.topology.sizes().windows(2) {
            let next = self.propagate_layer(&layers[layers.len() - 1], pair[1], offset);
            layers.push(next);
            offset += (pair[0] + 1) * pair[1];
        }
        Ok(Activations { layers })
    }

    fn propagate_layer(&self, inputs: &[f64], outputs: usize, offset: usize) -> Vec<f64> {
        let stride = inputs.len() + 1;
        (0..outputs)
            .map(|j| {
                let row = &self.params[offset + j * stride..offset + (j + 1) * stride];
                let (weights, bias) = row.split_at(inputs.len());
                let net = weights
                    .iter()
                    .zip(inputs)
                    .fold(bias[0], |acc, (w, x)| acc + w * x);
                logistic(net)
            })
            .collect()
    }
}

/// Mean over patterns of the summed squared output error.
///
/// This is the swarm fitness and the backpropagation stopping criterion.
pub fn mean_squared_error(network: &Network, patterns: &[Pattern]) -> Result<f64> {
    if patterns.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut sum = 0.0;
    for p in patterns {
        let out = network.forward(&p.inputs)?;
        if out.len() != p.targets.len() {
            return Err(Error::DimensionMismatch {
                what: "pattern targets",
                expected: out.len(),
                found: p.targets.len(),
            });
        }
        sum += out
            .iter()
            .zip(&p.targets)
            .map(|(y, t)| (y - t) * (y - t))
            .sum::<f64>();
    }
    Ok(sum / patterns.len() as f64)
}
