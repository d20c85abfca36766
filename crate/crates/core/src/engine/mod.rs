//! Synchronized multiplicative-weights dynamics over housing sites.
//!
//! Every step runs in three phases. Agents sample actions and price every
//! site against the enacted profile in parallel. Ledgers, accumulators, and
//! equilibrium samples are then folded in agent order by a single writer.
//! Finally each strategy is updated independently. Randomness comes from
//! per-agent counter-based streams, so the output does not depend on the
//! number of worker threads.

mod accumulator;
mod cce;
mod ledger;
mod rng;
mod strategy;

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cost::{CostModel, ModelParams, Profile};
use crate::error::{Error, Result};

pub use accumulator::{EquilibriumAccumulator, FrozenAverages};
pub use cce::{CceEstimate, CceEstimator};
pub use ledger::{empirical_regret, RegretLedger};
pub use rng::{uniform_at, AgentStream, Purpose};
pub use strategy::{mwu_update, step_size, MixedStrategy, MAX_STEP_SIZE};

/// Magic string leading every saved engine state.
pub const STATE_MAGIC: &str = "NRD1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub params: ModelParams,
    pub horizon: u64,
    /// Steps after which prefix averages are frozen; strictly increasing.
    pub checkpoints: Vec<u64>,
    pub seed: u64,
    pub cce_samples_per_step: u32,
}

impl EngineConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.horizon == 0 {
            return Err(Error::InvalidConfig("horizon must be at least 1".into()));
        }
        if self.checkpoints.is_empty() {
            return Err(Error::InvalidConfig("no checkpoints".into()));
        }
        if self.checkpoints[0] == 0 {
            return Err(Error::InvalidConfig("checkpoint 0 has no average".into()));
        }
        if self.checkpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidConfig(
                "checkpoints must be strictly increasing".into(),
            ));
        }
        let last = *self.checkpoints.last().unwrap();
        if last > self.horizon {
            return Err(Error::InvalidConfig(format!(
                "checkpoint {last} beyond horizon {}",
                self.horizon
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Engine {
    model: CostModel,
    config: EngineConfig,
    epsilon: f64,
    log_decay: f64,
    strategies: Vec<MixedStrategy>,
    ledger: RegretLedger,
    accumulator: EquilibriumAccumulator,
    cce: Option<CceEstimator>,
    steps_done: u64,
    action_streams: Vec<AgentStream>,
    sample_streams: Vec<AgentStream>,
    costs: Vec<f64>,
    sample_costs: Vec<f64>,
    last_profile: Option<Profile>,
}

#[derive(Serialize, Deserialize)]
struct SavedState {
    magic: String,
    config: EngineConfig,
    n_sites: usize,
    n_residents: usize,
    steps_done: u64,
    strategies: Vec<MixedStrategy>,
    ledger: RegretLedger,
    accumulator: EquilibriumAccumulator,
    cce: Option<CceEstimator>,
}

impl Engine {
    /// Uniform strategies, zeroed ledgers, streams keyed by `(seed, agent)`.
    pub fn new(model: CostModel, config: EngineConfig) -> Result<Self> {
        config.validate()?;
        if model.params() != config.params {
            return Err(Error::InvalidConfig(
                "cost model and engine disagree on (rho, lambda)".into(),
            ));
        }
        let n_sites = model.n_sites();
        let n_agents = model.n_residents();
        let cce = (config.cce_samples_per_step > 0).then(|| CceEstimator::new(n_agents, n_sites));
        let mut engine = Self {
            epsilon: 0.0,
            log_decay: 0.0,
            strategies: vec![MixedStrategy::uniform(n_sites); n_agents],
            ledger: RegretLedger::new(n_agents, n_sites),
            accumulator: EquilibriumAccumulator::new(n_sites),
            cce,
            steps_done: 0,
            action_streams: Vec::new(),
            sample_streams: Vec::new(),
            costs: vec![0.0; n_agents * n_sites],
            sample_costs: Vec::new(),
            last_profile: None,
            model,
            config,
        };
        engine.prepare();
        Ok(engine)
    }

    fn prepare(&mut self) {
        let n_agents = self.model.n_residents();
        let seed = self.config.seed;
        let k = u64::from(self.config.cce_samples_per_step);
        self.epsilon = step_size(self.model.n_sites(), self.config.horizon);
        self.log_decay = (1.0 - self.epsilon).ln();
        self.action_streams = (0..n_agents)
            .map(|j| AgentStream::new(seed, j, Purpose::Action, 1))
            .collect();
        self.sample_streams = if k > 0 {
            (0..n_agents)
                .map(|j| AgentStream::new(seed, j, Purpose::Equilibrium, k))
                .collect()
        } else {
            Vec::new()
        };
        self.sample_costs = if k > 0 {
            vec![0.0; self.costs.len()]
        } else {
            Vec::new()
        };
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn model(&self) -> &CostModel {
        &self.model
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn steps_done(&self) -> u64 {
        self.steps_done
    }

    pub fn is_finished(&self) -> bool {
        self.steps_done >= self.config.horizon
    }

    pub fn strategies(&self) -> &[MixedStrategy] {
        &self.strategies
    }

    pub fn ledger(&self) -> &RegretLedger {
        &self.ledger
    }

    pub fn accumulator(&self) -> &EquilibriumAccumulator {
        &self.accumulator
    }

    /// Profile enacted in the most recent step.
    pub fn last_profile(&self) -> Option<&Profile> {
        self.last_profile.as_ref()
    }

    /// Full cost vectors revealed in the most recent step, agent-major.
    pub fn last_costs(&self) -> &[f64] {
        &self.costs
    }

    fn sample_profile(
        strategies: &[MixedStrategy],
        uniforms: impl IndexedParallelIterator<Item = f64>,
    ) -> Vec<usize> {
        strategies
            .par_iter()
            .zip(uniforms)
            .map(|(s, u)| s.sample(u))
            .collect()
    }

    /// Advances the dynamics by one synchronized round.
    pub fn step(&mut self) -> Result<()> {
        if self.is_finished() {
            return Err(Error::HorizonReached(self.config.horizon));
        }
        let t = self.steps_done;
        let n_sites = self.model.n_sites();

        let uniforms = self.action_streams.par_iter_mut().map(|s| {
            s.seek(t);
            s.next_uniform()
        });
        let placement = Self::sample_profile(&self.strategies, uniforms);
        let profile = self.model.profile(placement)?;
        let fields = self.model.fields(&profile)?;

        let model = &self.model;
        self.costs
            .par_chunks_mut(n_sites)
            .enumerate()
            .for_each(|(j, out)| model.cost_vector_into(j, &fields, out));

        let endowments = self.model.endowments();
        for (j, (costs, strategy)) in self
            .costs
            .chunks(n_sites)
            .zip(&self.strategies)
            .enumerate()
        {
            self.ledger.record(j, costs, profile.site_of(j));
            self.accumulator.add(strategy.probabilities(), endowments.get(j));
        }
        self.ledger.finish_step();
        self.accumulator.finish_step();

        if let Some(cce) = self.cce.as_mut() {
            let k = self.config.cce_samples_per_step as usize;
            let draws: Vec<Vec<f64>> = self
                .sample_streams
                .par_iter_mut()
                .map(|s| {
                    s.seek(t);
                    (0..k).map(|_| s.next_uniform()).collect()
                })
                .collect();
            for sample in 0..k {
                let uniforms = draws.par_iter().map(|d| d[sample]);
                let placement = Self::sample_profile(&self.strategies, uniforms);
                let sampled = model.profile(placement)?;
                let sampled_fields = model.fields(&sampled)?;
                self.sample_costs
                    .par_chunks_mut(n_sites)
                    .enumerate()
                    .for_each(|(j, out)| model.cost_vector_into(j, &sampled_fields, out));
                for (j, costs) in self.sample_costs.chunks(n_sites).enumerate() {
                    cce.record(j, costs, sampled.site_of(j));
                }
                cce.finish_sample();
            }
        }

        let log_decay = self.log_decay;
        self.strategies
            .par_iter_mut()
            .zip(self.costs.par_chunks(n_sites))
            .for_each(|(s, c)| s.apply_costs(c, log_decay));

        self.steps_done += 1;
        if self.config.checkpoints.binary_search(&self.steps_done).is_ok() {
            self.accumulator.freeze();
        }
        self.last_profile = Some(profile);
        Ok(())
    }

    /// Steps until `steps` rounds are done (capped at the horizon).
    pub fn run_to(&mut self, steps: u64) -> Result<()> {
        let target = steps.min(self.config.horizon);
        while self.steps_done < target {
            self.step()?;
        }
        Ok(())
    }

    pub fn run(&mut self) -> Result<()> {
        self.run_to(self.config.horizon)
    }

    pub fn empirical_regret(&self, agent: usize) -> f64 {
        self.ledger.empirical_regret(agent)
    }

    pub fn max_regret(&self) -> f64 {
        self.ledger.max_regret()
    }

    /// Worst estimated incentive to deviate under the time-averaged distribution.
    pub fn estimate_cce_gap(&self) -> Result<CceEstimate> {
        self.cce
            .as_ref()
            .and_then(CceEstimator::estimate)
            .ok_or(Error::NoCceSamples)
    }

    pub fn state_json(&self) -> Result<String> {
        let saved = SavedState {
            magic: STATE_MAGIC.to_string(),
            config: self.config.clone(),
            n_sites: self.model.n_sites(),
            n_residents: self.model.n_residents(),
            steps_done: self.steps_done,
            strategies: self.strategies.clone(),
            ledger: self.ledger.clone(),
            accumulator: self.accumulator.clone(),
            cce: self.cce.clone(),
        };
        Ok(serde_json::to_string(&saved)?)
    }

    pub fn save_state(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.state_json()?).map_err(|e| Error::io(path, e))
    }

    /// Rebuilds an engine from saved state; `model` must describe the same instance.
    pub fn from_state_json(model: CostModel, text: &str) -> Result<Self> {
        let saved: SavedState =
            serde_json::from_str(text).map_err(|e| Error::Checkpoint(e.to_string()))?;
        if saved.magic != STATE_MAGIC {
            return Err(Error::Checkpoint(format!("bad magic `{}`", saved.magic)));
        }
        if saved.n_sites != model.n_sites() || saved.n_residents != model.n_residents() {
            return Err(Error::Checkpoint(format!(
                "state is for {} residents on {} sites, model has {} on {}",
                saved.n_residents,
                saved.n_sites,
                model.n_residents(),
                model.n_sites()
            )));
        }
        let mut engine = Self::new(model, saved.config)?;
        engine.steps_done = saved.steps_done;
        engine.strategies = saved.strategies;
        engine.ledger = saved.ledger;
        engine.accumulator = saved.accumulator;
        engine.cce = saved.cce;
        Ok(engine)
    }

    pub fn resume(model: CostModel, path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_state_json(model, &text)
    }
}
