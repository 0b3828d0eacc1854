//! Online gradient-descent training with optional momentum.

use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::network::{mean_squared_error, Activations, Network, Pattern};
use crate::rng;

#[derive(Debug, Clone, PartialEq)]
pub struct BpConfig {
    pub learning_rate: f64,
    pub momentum: f64,
    pub max_epochs: usize,
    /// Training stops once the epoch MSE is at or below this value.
    pub target_error: f64,
    pub seed: u64,
}

impl Default for BpConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.3,
            momentum: 0.9,
            max_epochs: 500,
            target_error: 1e-3,
            seed: 0,
        }
    }
}

impl BpConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) {
            return Err(Error::InvalidConfig(
                "learning rate must be positive".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::InvalidConfig("momentum must lie in [0, 1)".into()));
        }
        if self.max_epochs == 0 {
            return Err(Error::InvalidConfig("max_epochs must be at least 1".into()));
        }
        if !(self.target_error >= 0.0) {
            return Err(Error::InvalidConfig(
                "target error must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    MaxEpochs,
    TargetError,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainTrace {
    /// Training-set MSE after each epoch.
    pub epoch_errors: Vec<f64>,
    pub stop_reason: StopReason,
}

impl TrainTrace {
    pub fn epochs_run(&self) -> usize {
        self.epoch_errors.len()
    }
}

/// Error term of an output neuron: `y (1 - y) (d - y)`.
pub fn output_delta(output: f64, desired: f64) -> f64 {
    output * (1.0 - output) * (desired - output)
}

/// Error term of a hidden neuron with output `output`, given `(delta_k, w_jk)`
/// for every neuron `k` it feeds.
pub fn hidden_delta<I>(output: f64, downstream: I) -> f64
where
    I: IntoIterator<Item = (f64, f64)>,
{
    let sum: f64 = downstream.into_iter().map(|(d, w)| d * w).sum();
    output * (1.0 - output) * sum
}

/// Error terms of every non-input layer for one pattern, first hidden layer
/// first.
pub fn layer_deltas(
    network: &Network,
    activations: &Activations,
    targets: &[f64],
) -> Result<Vec<Vec<f64>>> {
    let topo = network.topology();
    if targets.len() != topo.output_count() {
        return Err(Error::DimensionMismatch {
            what: "pattern targets",
            expected: topo.output_count(),
            found: targets.len(),
        });
    }
    let layers = topo.layer_count();
    let mut deltas: Vec<Vec<f64>> = alloc::vec![Vec::new(); layers];
    deltas[layers - 1] = activations
        .output()
        .iter()
        .zip(targets)
        .map(|(&y, &d)| output_delta(y, d))
        .collect();
    for layer in (0..layers - 1).rev() {
        // neurons of activation layer `layer + 1` feed weight layer `layer + 1`
        let outputs = &activations.layers[layer + 1];
        let next = &deltas[layer + 1];
        let current = outputs
            .iter()
            .enumerate()
            .map(|(j, &x)| {
                hidden_delta(
                    x,
                    next.iter()
                        .enumerate()
                        .map(|(k, &dk)| (dk, network.weight(layer + 1, k, j))),
                )
            })
            .collect();
        deltas[layer] = current;
    }
    Ok(deltas)
}

/// Applies `w += lr * delta_j * x_i + momentum * previous_change` to every
/// weight (bias input `x = 1`) and records `w(t+1) - w(t)` in
/// `changes`, which must start zeroed.
///
/// With zero momentum the momentum term is skipped entirely, so the result is
/// bit-identical to the plain gradient step.
pub fn apply_update(
    network: &mut Network,
    deltas: &[Vec<f64>],
    activations: &Activations,
    learning_rate: f64,
    momentum: f64,
    changes: &mut [f64],
) {
    let layers = network.topology().layer_count();
    let params = network.params_mut();
    debug_assert_eq!(changes.len(), params.len());
    let mut idx = 0;
    for (inputs, layer_deltas) in activations.layers[..layers].iter().zip(deltas) {
        for &delta in layer_deltas {
            for x in inputs.iter().copied().chain(core::iter::once(1.0)) {
                let before = params[idx];
                let mut after = before + learning_rate * delta * x;
                if momentum != 0.0 {
                    after += momentum * changes[idx];
                }
                params[idx] = after;
                changes[idx] = after - before;
                idx += 1;
            }
        }
    }
}

fn check_patterns(network: &Network, patterns: &[Pattern]) -> Result<()> {
    if patterns.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let topo = network.topology();
    for p in patterns {
        if p.inputs.len() != topo.input_count() {
            return Err(Error::DimensionMismatch {
                what: "pattern inputs",
                expected: topo.input_count(),
                found: p.inputs.len(),
            });
        }
        if p.targets.len() != topo.output_count() {
            return Err(Error::DimensionMismatch {
                what: "pattern targets",
                expected: topo.output_count(),
                found: p.targets.len(),
            });
        }
    }
    Ok(())
}

/// One online update for a single pattern.
pub fn train_pattern(
    network: &mut Network,
    pattern: &Pattern,
    learning_rate: f64,
    momentum: f64,
    changes: &mut [f64],
) -> Result<()> {
    let acts = network.forward_trace(&pattern.inputs)?;
    let deltas = layer_deltas(network, &acts, &pattern.targets)?;
    apply_update(network, &deltas, &acts, learning_rate, momentum, changes);
    Ok(())
}

/// Trains with per-pattern updates, visiting patterns in a fresh seeded
/// shuffle each epoch, until `max_epochs` or until the epoch MSE reaches
/// `target_error`.
pub fn train_bp(
    network: Network,
    patterns: &[Pattern],
    config: &BpConfig,
) -> Result<(Network, TrainTrace)> {
    config.validate()?;
    check_patterns(&network, patterns)?;
    let mut network = network;
    let mut changes = alloc::vec![0.0; network.params().len()];
    let mut order: Vec<usize> = (0..patterns.len()).collect();
    let mut rng = rng::stream(config.seed, rng::stages::TRAIN);
    let mut epoch_errors = Vec::new();
    let mut stop_reason = StopReason::MaxEpochs;
    for _ in 0..config.max_epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            train_pattern(
                &mut network,
                &patterns[i],
                config.learning_rate,
                config.momentum,
                &mut changes,
            )?;
        }
        let mse = mean_squared_error(&network, patterns)?;
        epoch_errors.push(mse);
        if mse <= config.target_error {
            stop_reason = StopReason::TargetError;
            break;
        }
    }
    Ok((
        network,
        TrainTrace {
            epoch_errors,
            stop_reason,
        },
    ))
}
