use serde::{Deserialize, Serialize};

/// Multiplicative-weights mixed strategy over housing sites.
///
/// `log_weights` holds the cumulative log-weights `sum_t c^t(h) ln(1 - eps)`;
/// they only ever decrease. Probabilities are derived by subtracting the
/// maximum before exponentiating, so long horizons cannot underflow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "StoredStrategy", into = "StoredStrategy")]
pub struct MixedStrategy {
    log_weights: Vec<f64>,
    probs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct StoredStrategy {
    logw: Vec<f64>,
}

impl From<StoredStrategy> for MixedStrategy {
    fn from(s: StoredStrategy) -> Self {
        Self::from_log_weights(s.logw)
    }
}

impl From<MixedStrategy> for StoredStrategy {
    fn from(s: MixedStrategy) -> Self {
        StoredStrategy {
            logw: s.log_weights,
        }
    }
}

impl MixedStrategy {
    pub fn uniform(n_actions: usize) -> Self {
        Self::from_log_weights(vec![0.0; n_actions])
    }

    pub fn from_log_weights(log_weights: Vec<f64>) -> Self {
        let mut s = Self {
            probs: vec![0.0; log_weights.len()],
            log_weights,
        };
        s.normalize();
        s
    }

    pub fn len(&self) -> usize {
        self.log_weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_weights.is_empty()
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn entropy(&self) -> f64 {
        -self
            .probs
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|p| p * p.ln())
            .sum::<f64>()
    }

    /// Adds `cost(h) * log_decay` to every log-weight, where
    /// `log_decay = ln(1 - eps)`, then refreshes the probabilities.
    pub fn apply_costs(&mut self, costs: &[f64], log_decay: f64) {
        debug_assert_eq!(costs.len(), self.log_weights.len());
        for (lw, c) in self.log_weights.iter_mut().zip(costs) {
            *lw += c * log_decay;
        }
        self.normalize();
    }

    fn normalize(&mut self) {
        let max = self
            .log_weights
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let mut total = 0.0;
        for (p, lw) in self.probs.iter_mut().zip(&self.log_weights) {
            *p = (lw - max).exp();
            total += *p;
        }
        let inv = 1.0 / total;
        for p in &mut self.probs {
            *p *= inv;
        }
    }

    /// Inverse-CDF draw for a uniform `u` in `[0, 1)`.
    pub fn sample(&self, u: f64) -> usize {
        let mut acc = 0.0;
        let mut last_positive = 0;
        for (h, &p) in self.probs.iter().enumerate() {
            if p > 0.0 {
                acc += p;
                last_positive = h;
                if u < acc {
                    return h;
                }
            }
        }
        // only reachable through rounding when acc ends just below 1
        last_positive
    }
}

/// One multiplicative-weights round: weights scale by `(1 - eps)^cost`.
pub fn mwu_update(strategy: &MixedStrategy, costs: &[f64], eps: f64) -> MixedStrategy {
    assert!(
        (0.0..1.0).contains(&eps),
        "step size {eps} outside [0, 1)"
    );
    let mut next = strategy.clone();
    next.apply_costs(costs, (1.0 - eps).ln());
    next
}

/// Upper bound on the step size; the standard regret analysis assumes it.
pub const MAX_STEP_SIZE: f64 = 0.5;

/// `min(sqrt(ln |H| / T), 1/2)`.
pub fn step_size(n_actions: usize, horizon: u64) -> f64 {
    let eps = ((n_actions as f64).ln() / horizon as f64).sqrt();
    eps.min(MAX_STEP_SIZE)
}
