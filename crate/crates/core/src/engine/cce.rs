//! Online Monte Carlo estimate of the coarse-correlated-equilibrium gap.
//!
//! Each recorded sample is a joint profile drawn from the product of the
//! agents' current strategies. For every agent we accumulate the cost of the
//! sampled action and of every fixed deviation, plus second moments so the
//! worst pair's standard error can be reported.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CceEstimate {
    /// `max_j max_h (mean realized cost - mean deviation cost)`, floored at 0.
    pub gap: f64,
    /// Unclamped maximizer value.
    pub raw_gap: f64,
    pub agent: usize,
    pub deviation: usize,
    /// Standard error of the maximizing pair's mean difference.
    pub std_err: f64,
    pub samples: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CceEstimator {
    n_actions: usize,
    samples: u64,
    realized: Vec<f64>,
    realized_sq: Vec<f64>,
    // agent-major n_agents x n_actions
    deviation: Vec<f64>,
    deviation_sq: Vec<f64>,
    cross: Vec<f64>,
}

impl CceEstimator {
    pub fn new(n_agents: usize, n_actions: usize) -> Self {
        Self {
            n_actions,
            samples: 0,
            realized: vec![0.0; n_agents],
            realized_sq: vec![0.0; n_agents],
            deviation: vec![0.0; n_agents * n_actions],
            deviation_sq: vec![0.0; n_agents * n_actions],
            cross: vec![0.0; n_agents * n_actions],
        }
    }

    pub fn samples(&self) -> u64 {
        self.samples
    }

    /// Adds one agent's costs under a sampled profile in which it played `played`.
    pub fn record(&mut self, agent: usize, costs: &[f64], played: usize) {
        let r = costs[played];
        self.realized[agent] += r;
        self.realized_sq[agent] += r * r;
        let span = agent * self.n_actions..(agent + 1) * self.n_actions;
        let rows = self.deviation[span.clone()]
            .iter_mut()
            .zip(&mut self.deviation_sq[span.clone()])
            .zip(&mut self.cross[span]);
        for (((dev, dev_sq), cross), &c) in rows.zip(costs) {
            *dev += c;
            *dev_sq += c * c;
            *cross += r * c;
        }
    }

    pub(crate) fn finish_sample(&mut self) {
        self.samples += 1;
    }

    /// `None` until at least one sample is recorded.
    pub fn estimate(&self) -> Option<CceEstimate> {
        if self.samples == 0 {
            return None;
        }
        let n = self.samples as f64;
        let mut best: Option<(f64, usize, usize)> = None;
        for j in 0..self.realized.len() {
            let row = &self.deviation[j * self.n_actions..(j + 1) * self.n_actions];
            for (h, &dev) in row.iter().enumerate() {
                let diff = (self.realized[j] - dev) / n;
                if best.is_none_or(|(b, _, _)| diff > b) {
                    best = Some((diff, j, h));
                }
            }
        }
        let (raw_gap, agent, deviation) = best?;
        let k = agent * self.n_actions + deviation;
        // E[(r - c)^2] = E[r^2] - 2 E[r c] + E[c^2]
        let second = (self.realized_sq[agent] - 2.0 * self.cross[k] + self.deviation_sq[k]) / n;
        let std_err = if self.samples > 1 {
            let var = ((second - raw_gap * raw_gap) * n / (n - 1.0)).max(0.0);
            (var / n).sqrt()
        } else {
            f64::INFINITY
        };
        Some(CceEstimate {
            gap: raw_gap.max(0.0),
            raw_gap,
            agent,
            deviation,
            std_err,
            samples: self.samples,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_costs_give_zero_gap() {
        let mut est = CceEstimator::new(2, 3);
        for _ in 0..10 {
            for j in 0..2 {
                est.record(j, &[0.4, 0.4, 0.4], 1);
            }
            est.finish_sample();
        }
        let e = est.estimate().unwrap();
        assert_eq!(e.gap, 0.0);
        assert_eq!(e.std_err, 0.0);
    }

    #[test]
    fn gap_and_standard_error_match_direct_formulae() {
        let mut est = CceEstimator::new(1, 2);
        let rounds = [([0.9, 0.1], 0), ([0.5, 0.4], 0), ([0.2, 0.6], 1), ([0.8, 0.3], 0)];
        for (costs, played) in rounds {
            est.record(0, &costs, played);
            est.finish_sample();
        }
        // differences against action 1: 0.8, 0.1, 0.0, 0.5
        let d = [0.8, 0.1, 0.0, 0.5];
        let mean = d.iter().sum::<f64>() / 4.0;
        let var = d.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / 3.0;
        let e = est.estimate().unwrap();
        assert_eq!((e.agent, e.deviation), (0, 1));
        assert!((e.gap - mean).abs() < 1e-15);
        assert!((e.std_err - (var / 4.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn empty_estimator() {
        assert!(CceEstimator::new(1, 1).estimate().is_none());
    }
}
