use serde::{Deserialize, Serialize};

/// Cumulative realized and per-action costs for every agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretLedger {
    n_actions: usize,
    realized_cum: Vec<f64>,
    // agent-major, n_agents x n_actions
    action_cum: Vec<f64>,
    steps: u64,
}

impl RegretLedger {
    pub fn new(n_agents: usize, n_actions: usize) -> Self {
        Self {
            n_actions,
            realized_cum: vec![0.0; n_agents],
            action_cum: vec![0.0; n_agents * n_actions],
            steps: 0,
        }
    }

    pub fn n_agents(&self) -> usize {
        self.realized_cum.len()
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn realized_cum(&self, agent: usize) -> f64 {
        self.realized_cum[agent]
    }

    pub fn action_cum(&self, agent: usize) -> &[f64] {
        &self.action_cum[agent * self.n_actions..(agent + 1) * self.n_actions]
    }

    /// Adds one round: `costs` is the agent's full cost vector and
    /// `played` the action they enacted.
    pub fn record(&mut self, agent: usize, costs: &[f64], played: usize) {
        self.realized_cum[agent] += costs[played];
        let row = &mut self.action_cum[agent * self.n_actions..(agent + 1) * self.n_actions];
        for (acc, c) in row.iter_mut().zip(costs) {
            *acc += c;
        }
    }

    pub(crate) fn finish_step(&mut self) {
        self.steps += 1;
    }

    pub fn best_fixed_action(&self, agent: usize) -> (usize, f64) {
        self.action_cum(agent)
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::INFINITY), |best, (h, c)| if c < best.1 { (h, c) } else { best })
    }

    /// Average regret of `agent` against the best fixed action in hindsight.
    pub fn empirical_regret(&self, agent: usize) -> f64 {
        assert!(self.steps > 0, "regret is undefined before the first step");
        let (_, best) = self.best_fixed_action(agent);
        (self.realized_cum[agent] - best) / self.steps as f64
    }

    pub fn regrets(&self) -> Vec<f64> {
        (0..self.n_agents()).map(|j| self.empirical_regret(j)).collect()
    }

    pub fn max_regret(&self) -> f64 {
        self.regrets().into_iter().fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn empirical_regret(ledger: &RegretLedger, agent: usize) -> f64 {
    ledger.empirical_regret(agent)
}
