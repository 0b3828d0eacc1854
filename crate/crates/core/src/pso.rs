//! Inertia-weight particle swarm optimization over flat weight vectors.
//!
//! Each epoch visits every particle once in a seeded random order. A visit
//! updates the particle's velocity and position, evaluates its fitness, and
//! immediately refreshes its personal best and the global best (strict `<`,
//! so equal fitness keeps the incumbent). Later particles in the same epoch
//! therefore already see an improved global best.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::network::{mean_squared_error, Network, Pattern, Topology, WeightVector};
use crate::rng::{self, StreamRng};

#[derive(Debug, Clone, PartialEq)]
pub struct PsoConfig {
    /// Inertia weight applied to the previous velocity.
    pub inertia: f64,
    /// Cognitive coefficient (pull toward the particle's own best).
    pub c1: f64,
    /// Social coefficient (pull toward the swarm's best).
    pub c2: f64,
    pub particle_count: usize,
    pub max_epochs: usize,
    /// The run stops as soon as the global best error drops below this.
    pub exit_error: f64,
    pub position_range: (f64, f64),
    pub velocity_range: (f64, f64),
    /// Per-dimension bound on `|velocity|`.
    pub velocity_clamp: f64,
    /// Draw one `r1`, `r2` pair per particle update instead of one per
    /// dimension.
    pub scalar_r: bool,
    pub seed: u64,
}

impl Default for PsoConfig {
    fn default() -> Self {
        Self {
            inertia: 0.729,
            c1: 1.4944,
            c2: 1.4944,
            particle_count: 24,
            max_epochs: 500,
            exit_error: 0.0,
            position_range: (-1.0, 1.0),
            velocity_range: (-0.5, 0.5),
            velocity_clamp: 1.0,
            scalar_r: false,
            seed: 0,
        }
    }
}

impl PsoConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.into()));
        if self.particle_count < 2 {
            return bad("particle_count must be at least 2");
        }
        if self.max_epochs == 0 {
            return bad("max_epochs must be at least 1");
        }
        if !(self.c1 >= 0.0) || !(self.c2 >= 0.0) {
            return bad("c1 and c2 must be non-negative");
        }
        if !self.inertia.is_finite() {
            return bad("inertia must be finite");
        }
        if !(self.position_range.0 < self.position_range.1) {
            return bad("position range must satisfy low < high");
        }
        if !(self.velocity_range.0 < self.velocity_range.1) {
            return bad("velocity range must satisfy low < high");
        }
        if !(self.velocity_clamp > 0.0) {
            return bad("velocity clamp must be positive");
        }
        if !(self.exit_error >= 0.0) {
            return bad("exit error must be non-negative");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub best_position: Vec<f64>,
    pub best_error: f64,
}

impl Particle {
    fn random<R: Rng>(dimension: usize, config: &PsoConfig, rng: &mut R) -> Self {
        let (pl, ph) = config.position_range;
        let (vl, vh) = config.velocity_range;
        let position: Vec<f64> = (0..dimension).map(|_| rng.gen_range(pl..ph)).collect();
        let velocity = (0..dimension).map(|_| rng.gen_range(vl..vh)).collect();
        Self {
            best_position: position.clone(),
            position,
            velocity,
            best_error: f64::INFINITY,
        }
    }

    fn record(&mut self, error: f64) -> bool {
        if error < self.best_error {
            self.best_error = error;
            self.best_position.clone_from(&self.position);
            true
        } else {
            false
        }
    }
}

/// `w v + c1 r1 (pbest - x) + c2 r2 (gbest - x)`, clamped to `[-clamp, clamp]`.
#[allow(clippy::too_many_arguments)]
pub fn velocity_component(
    velocity: f64,
    position: f64,
    personal_best: f64,
    global_best: f64,
    config: &PsoConfig,
    r1: f64,
    r2: f64,
) -> f64 {
    let v = config.inertia * velocity
        + config.c1 * r1 * (personal_best - position)
        + config.c2 * r2 * (global_best - position);
    v.clamp(-config.velocity_clamp, config.velocity_clamp)
}

/// Replaces the particle's velocity using the inertia-weight rule.
///
/// `draw` supplies uniform numbers in `[0, 1]`: two per dimension (`r1` then
/// `r2`), or just two in total when `config.scalar_r` is set.
pub fn update_velocity<F>(
    particle: &mut Particle,
    global_best: &[f64],
    config: &PsoConfig,
    mut draw: F,
) where
    F: FnMut() -> f64,
{
    let scalar = if config.scalar_r {
        Some((draw(), draw()))
    } else {
        None
    };
    let dims = particle
        .velocity
        .iter_mut()
        .zip(&particle.position)
        .zip(&particle.best_position)
        .zip(global_best);
    for (((v, &x), &pbest), &gbest) in dims {
        let (r1, r2) = match scalar {
            Some(pair) => pair,
            None => (draw(), draw()),
        };
        *v = velocity_component(*v, x, pbest, gbest, config, r1, r2);
    }
}

/// `x(t) = x(t-1) + v(t)` per dimension. Positions are not clamped.
pub fn update_position(position: &mut [f64], velocity: &[f64]) {
    debug_assert_eq!(position.len(), velocity.len());
    for (x, v) in position.iter_mut().zip(velocity) {
        *x += v;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwarmState {
    pub particles: Vec<Particle>,
    pub global_best_position: Vec<f64>,
    pub global_best_error: f64,
    /// Completed epochs.
    pub epoch: usize,
}

/// A swarm in progress. Each particle owns an independent random stream.
pub struct Swarm {
    config: PsoConfig,
    state: SwarmState,
    particle_rngs: Vec<StreamRng>,
    order_rng: StreamRng,
}

impl Swarm {
    /// Randomly places every particle and scores it.
    pub fn new<F>(dimension: usize, config: PsoConfig, mut fitness: F) -> Result<Self>
    where
        F: FnMut(&[f64]) -> f64,
    {
        config.validate()?;
        let mut particle_rngs: Vec<StreamRng> = (0..config.particle_count)
            .map(|i| rng::stream(config.seed, i as u64 + 1))
            .collect();
        let mut particles = Vec::with_capacity(config.particle_count);
        let mut global_best_position = Vec::new();
        let mut global_best_error = f64::INFINITY;
        for rng in particle_rngs.iter_mut() {
            let mut p = Particle::random(dimension, &config, rng);
            let error = fitness(&p.position);
            p.record(error);
            if error < global_best_error || global_best_position.is_empty() {
                global_best_error = error;
                global_best_position.clone_from(&p.position);
            }
            particles.push(p);
        }
        Ok(Self {
            order_rng: rng::stream(config.seed, 0),
            config,
            state: SwarmState {
                particles,
                global_best_position,
                global_best_error,
                epoch: 0,
            },
            particle_rngs,
        })
    }

    pub fn state(&self) -> &SwarmState {
        &self.state
    }

    pub fn config(&self) -> &PsoConfig {
        &self.config
    }

    /// Whether the loop guard would stop before another epoch.
    pub fn finished(&self) -> bool {
        self.state.epoch >= self.config.max_epochs
            || self.state.global_best_error < self.config.exit_error
    }

    /// Runs one epoch: every particle moves once, in a shuffled order.
    pub fn step<F>(&mut self, mut fitness: F)
    where
        F: FnMut(&[f64]) -> f64,
    {
        let mut order: Vec<usize> = (0..self.state.particles.len()).collect();
        order.shuffle(&mut self.order_rng);
        for i in order {
            let rng = &mut self.particle_rngs[i];
            let particle = &mut self.state.particles[i];
            update_velocity(
                particle,
                &self.state.global_best_position,
                &self.config,
                || rng.gen::<f64>(),
            );
            update_position(&mut particle.position, &particle.velocity);
            let error = fitness(&particle.position);
            particle.record(error);
            if error < self.state.global_best_error {
                self.state.global_best_error = error;
                self.state
                    .global_best_position
                    .clone_from(&particle.position);
            }
        }
        self.state.epoch += 1;
    }

    pub fn into_state(self) -> SwarmState {
        self.state
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsoOutcome {
    pub best_position: Vec<f64>,
    pub best_error: f64,
    /// Global best error after initialization (index 0) and after each
    /// completed epoch.
    pub trace: Vec<f64>,
}

impl PsoOutcome {
    pub fn epochs_run(&self) -> usize {
        self.trace.len().saturating_sub(1)
    }
}

/// Minimizes `fitness` over `R^dimension`.
pub fn optimize<F>(dimension: usize, config: &PsoConfig, mut fitness: F) -> Result<PsoOutcome>
where
    F: FnMut(&[f64]) -> f64,
{
    let mut swarm = Swarm::new(dimension, config.clone(), &mut fitness)?;
    let mut trace = alloc::vec![swarm.state().global_best_error];
    while !swarm.finished() {
        swarm.step(&mut fitness);
        trace.push(swarm.state().global_best_error);
    }
    let state = swarm.into_state();
    Ok(PsoOutcome {
        best_position: state.global_best_position,
        best_error: state.global_best_error,
        trace,
    })
}

/// Training-set MSE of the network whose weights are `position`.
pub fn mse_fitness(patterns: &[Pattern], topology: &Topology, position: &[f64]) -> Result<f64> {
    let network = Network::from_params(topology.clone(), position.to_vec())?;
    mean_squared_error(&network, patterns)
}

/// Searches the weight space of `topology` for the lowest training MSE.
pub fn pso_train(
    patterns: &[Pattern],
    topology: &Topology,
    config: &PsoConfig,
) -> Result<(WeightVector, PsoOutcome)> {
    if patterns.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let probe = Network::zeros(topology.clone());
    for p in patterns {
        // surfaces dimension errors once, up front
        mean_squared_error(&probe, core::slice::from_ref(p))?;
    }
    let dimension = topology.flat_dimension();
    let outcome = optimize(dimension, config, |position| {
        mse_fitness(patterns, topology, position).unwrap_or(f64::INFINITY)
    })?;
    Ok((WeightVector(outcome.best_position.clone()), outcome))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn sphere(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum()
    }

    fn particle(position: Vec<f64>, velocity: Vec<f64>, best: Vec<f64>) -> Particle {
        Particle {
            position,
            velocity,
            best_position: best,
            best_error: 1.0,
        }
    }

    #[test]
    fn velocity_example() {
        let cfg = PsoConfig::default();
        let mut p = particle(vec![0.0], vec![0.1], vec![0.2]);
        update_velocity(&mut p, &[0.4], &cfg, || 0.5);
        assert!((p.velocity[0] - 0.52122).abs() < 1e-12);
    }

    #[test]
    fn without_attraction_velocity_is_unchanged() {
        let cfg = PsoConfig {
            inertia: 1.0,
            c1: 0.0,
            c2: 0.0,
            ..PsoConfig::default()
        };
        let mut p = particle(vec![0.3, -0.1], vec![0.25, -0.75], vec![0.9, 0.9]);
        update_velocity(&mut p, &[-0.9, 0.4], &cfg, || 0.77);
        assert_eq!(p.velocity, vec![0.25, -0.75]);
    }

    #[test]
    fn at_both_bests_velocity_is_scaled_by_inertia() {
        let cfg = PsoConfig::default();
        let mut p = particle(vec![0.3, -0.1], vec![0.25, -0.75], vec![0.3, -0.1]);
        update_velocity(&mut p, &[0.3, -0.1], &cfg, || 0.9);
        assert_eq!(p.velocity, vec![0.729 * 0.25, 0.729 * -0.75]);
    }

    #[test]
    fn unit_inertia_is_the_plain_rule() {
        let cfg = PsoConfig {
            inertia: 1.0,
            velocity_clamp: 100.0,
            ..PsoConfig::default()
        };
        let (v, x, pb, gb, r1, r2) = (0.2, 0.5, 0.1, -0.4, 0.3, 0.6);
        let plain = v + cfg.c1 * r1 * (pb - x) + cfg.c2 * r2 * (gb - x);
        assert_eq!(velocity_component(v, x, pb, gb, &cfg, r1, r2), plain);
    }

    #[test]
    fn velocity_is_clamped() {
        let cfg = PsoConfig::default();
        assert_eq!(
            velocity_component(0.0, 0.0, 10.0, 10.0, &cfg, 1.0, 1.0),
            1.0
        );
        assert_eq!(
            velocity_component(0.0, 0.0, -10.0, -10.0, &cfg, 1.0, 1.0),
            -1.0
        );
    }

    #[test]
    fn scalar_r_draws_two_numbers_per_update() {
        let cfg = PsoConfig {
            scalar_r: true,
            ..PsoConfig::default()
        };
        let mut p = particle(vec![0.0; 5], vec![0.0; 5], vec![0.1; 5]);
        let mut calls = 0;
        update_velocity(&mut p, &[0.1; 5], &cfg, || {
            calls += 1;
            0.5
        });
        assert_eq!(calls, 2);
        let cfg = PsoConfig::default();
        let mut calls = 0;
        update_velocity(&mut p, &[0.1; 5], &cfg, || {
            calls += 1;
            0.5
        });
        assert_eq!(calls, 10);
    }

    #[test]
    fn position_examples() {
        let mut x = vec![0.1, -0.2];
        update_position(&mut x, &[0.0, 0.0]);
        assert_eq!(x, vec![0.1, -0.2]);
        update_position(&mut x, &[0.05, 0.05]);
        assert!((x[0] - 0.15).abs() < 1e-15 && (x[1] + 0.15).abs() < 1e-15);
        let mut y = vec![0.5, 0.25];
        update_position(&mut y, &[0.25, -0.5]);
        update_position(&mut y, &[-0.25, 0.5]);
        assert_eq!(y, vec![0.5, 0.25]);
    }

    #[test]
    fn huge_exit_error_returns_best_initial_particle() {
        let cfg = PsoConfig {
            exit_error: f64::MAX,
            seed: 3,
            ..PsoConfig::default()
        };
        let out = optimize(4, &cfg, sphere).unwrap();
        assert_eq!(out.epochs_run(), 0);
        let swarm = Swarm::new(4, cfg, sphere).unwrap();
        let best = swarm
            .state()
            .particles
            .iter()
            .map(|p| p.best_error)
            .fold(f64::INFINITY, f64::min);
        assert_eq!(out.best_error, best);
        assert_eq!(sphere(&out.best_position), out.best_error);
    }

    #[test]
    fn global_best_is_min_of_personal_bests_every_epoch() {
        let cfg = PsoConfig {
            position_range: (-5.0, 5.0),
            seed: 17,
            ..PsoConfig::default()
        };
        let mut swarm = Swarm::new(6, cfg, sphere).unwrap();
        let mut last = swarm.state().global_best_error;
        for _ in 0..60 {
            swarm.step(sphere);
            let s = swarm.state();
            let min = s
                .particles
                .iter()
                .map(|p| p.best_error)
                .fold(f64::INFINITY, f64::min);
            assert_eq!(s.global_best_error, min);
            assert!(s.global_best_error <= last);
            assert_eq!(sphere(&s.global_best_position), s.global_best_error);
            for p in &s.particles {
                assert_eq!(sphere(&p.best_position), p.best_error);
            }
            last = s.global_best_error;
        }
    }

    #[test]
    fn free_particles_move_in_straight_lines() {
        let cfg = PsoConfig {
            inertia: 1.0,
            c1: 0.0,
            c2: 0.0,
            seed: 2,
            ..PsoConfig::default()
        };
        let mut swarm = Swarm::new(3, cfg, sphere).unwrap();
        let start: Vec<(Vec<f64>, Vec<f64>)> = swarm
            .state()
            .particles
            .iter()
            .map(|p| (p.position.clone(), p.velocity.clone()))
            .collect();
        for t in 1..=20 {
            swarm.step(sphere);
            for (p, (x0, v0)) in swarm.state().particles.iter().zip(&start) {
                for d in 0..3 {
                    let expected = x0[d] + t as f64 * v0[d];
                    assert!((p.position[d] - expected).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn same_seed_same_outcome() {
        let cfg = PsoConfig {
            max_epochs: 40,
            seed: 99,
            ..PsoConfig::default()
        };
        assert_eq!(
            optimize(5, &cfg, sphere).unwrap(),
            optimize(5, &cfg, sphere).unwrap()
        );
        let other = PsoConfig {
            seed: 100,
            ..cfg.clone()
        };
        assert_ne!(
            optimize(5, &cfg, sphere).unwrap(),
            optimize(5, &other, sphere).unwrap()
        );
    }

    #[test]
    fn config_validation() {
        for cfg in [
            PsoConfig {
                particle_count: 1,
                ..PsoConfig::default()
            },
            PsoConfig {
                position_range: (1.0, 1.0),
                ..PsoConfig::default()
            },
            PsoConfig {
                velocity_range: (0.5, -0.5),
                ..PsoConfig::default()
            },
            PsoConfig {
                velocity_clamp: 0.0,
                ..PsoConfig::default()
            },
            PsoConfig {
                max_epochs: 0,
                ..PsoConfig::default()
            },
        ] {
            assert!(cfg.validate().is_err());
        }
    }

    #[test]
    fn mse_fitness_examples() {
        let t = Topology::new(1, &[1], 1).unwrap();
        let zeros = [0.0; 4];
        let one = [Pattern::new(vec![0.0], vec![0.3])];
        assert!((mse_fitness(&one, &t, &zeros).unwrap() - 0.04).abs() < 1e-15);
        let perfect = [
            Pattern::new(vec![1.0], vec![0.5]),
            Pattern::new(vec![2.0], vec![0.5]),
        ];
        assert_eq!(mse_fitness(&perfect, &t, &zeros).unwrap(), 0.0);
        // squared errors 0.01 and 0.03 -> mean 0.02
        let two = [
            Pattern::new(vec![0.0], vec![0.4]),
            Pattern::new(vec![0.0], vec![0.5 + libm::sqrt(0.03)]),
        ];
        assert!((mse_fitness(&two, &t, &zeros).unwrap() - 0.02).abs() < 1e-15);
        let a = mse_fitness(&two, &t, &[0.3, -0.2, 0.9, 0.1]).unwrap();
        let b = mse_fitness(&two, &t, &[0.3, -0.2, 0.9, 0.1]).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
        assert_eq!(mse_fitness(&[], &t, &zeros), Err(Error::EmptyDataset));
    }

    #[test]
    fn pso_train_rejects_empty_and_mismatched_sets() {
        let t = Topology::new(2, &[2], 1).unwrap();
        assert_eq!(
            pso_train(&[], &t, &PsoConfig::default()).unwrap_err(),
            Error::EmptyDataset
        );
        let bad = [Pattern::new(vec![0.0; 3], vec![0.5])];
        assert!(matches!(
            pso_train(&bad, &t, &PsoConfig::default()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn pso_train_reduces_error_on_a_small_problem() {
        let t = Topology::new(2, &[3], 1).unwrap();
        let patterns = [
            Pattern::new(vec![0.0, 0.0], vec![0.1]),
            Pattern::new(vec![1.0, 0.0], vec![0.3]),
            Pattern::new(vec![0.0, 1.0], vec![0.3]),
            Pattern::new(vec![1.0, 1.0], vec![0.5]),
        ];
        let cfg = PsoConfig {
            max_epochs: 200,
            seed: 4,
            ..PsoConfig::default()
        };
        let (w, out) = pso_train(&patterns, &t, &cfg).unwrap();
        assert_eq!(w.len(), t.flat_dimension());
        assert!(out.best_error < out.trace[0]);
        assert!(out.best_error < 1e-3, "{}", out.best_error);
        assert_eq!(
            mse_fitness(&patterns, &t, w.as_slice()).unwrap(),
            out.best_error
        );
    }
}
