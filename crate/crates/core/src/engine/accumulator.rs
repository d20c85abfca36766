use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Time averages of the outcome distribution at one checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrozenAverages {
    pub steps: u64,
    /// Expected residents per site, `pop_acc / T'`.
    pub population: Vec<f64>,
    /// Expected total endowment per site, `wealth_acc / T'`.
    pub wealth: Vec<f64>,
}

/// Running sums of `p_j^t(h)` and `w_j p_j^t(h)` over agents and steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumAccumulator {
    pop_acc: Vec<f64>,
    wealth_acc: Vec<f64>,
    steps: u64,
    frozen: Vec<FrozenAverages>,
}

impl EquilibriumAccumulator {
    pub fn new(n_sites: usize) -> Self {
        Self {
            pop_acc: vec![0.0; n_sites],
            wealth_acc: vec![0.0; n_sites],
            steps: 0,
            frozen: Vec::new(),
        }
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn pop_acc(&self) -> &[f64] {
        &self.pop_acc
    }

    pub fn wealth_acc(&self) -> &[f64] {
        &self.wealth_acc
    }

    /// Adds one agent's strategy for the current step.
    pub fn add(&mut self, probs: &[f64], endowment: f64) {
        for ((pop, wealth), &p) in self.pop_acc.iter_mut().zip(&mut self.wealth_acc).zip(probs) {
            *pop += p;
            *wealth += endowment * p;
        }
    }

    pub(crate) fn finish_step(&mut self) {
        self.steps += 1;
    }

    /// Records the current prefix averages.
    pub fn freeze(&mut self) {
        let t = self.steps as f64;
        self.frozen.push(FrozenAverages {
            steps: self.steps,
            population: self.pop_acc.iter().map(|v| v / t).collect(),
            wealth: self.wealth_acc.iter().map(|v| v / t).collect(),
        });
    }

    pub fn checkpoints(&self) -> &[FrozenAverages] {
        &self.frozen
    }

    pub fn at(&self, steps: u64) -> Result<&FrozenAverages> {
        self.frozen
            .iter()
            .find(|f| f.steps == steps)
            .ok_or(Error::UnknownCheckpoint(steps))
    }
}
