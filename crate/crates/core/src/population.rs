//! Resident endowments drawn from a Rasche-family Lorenz curve.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rasche curve exponent on the population share.
pub const RASCHE_ALPHA: f64 = 0.5;
/// Rasche curve exponent on the wealth share.
pub const RASCHE_BETA: f64 = 1.0;

/// Cumulative wealth share held by the poorest `x` of the population,
/// `y = 1 - (1 - x)^(1/2)`.
pub fn lorenz(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::LorenzDomain(x));
    }
    // With beta = 1 the general form (1 - (1-x)^alpha)^(1/beta) reduces to this.
    Ok(1.0 - (1.0 - x).sqrt())
}

/// Fixed resident endowments, strictly increasing in resident index.
///
/// Resident `j` is richer than resident `i` iff `j > i`, so resident order
/// doubles as wealth order everywhere else in the crate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct EndowmentProfile {
    values: Vec<f64>,
}

impl EndowmentProfile {
    /// Checks `0 < w_j < 1`, strict increase, and `sum < 1`.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::NoResidents);
        }
        if let Some(w) = values.iter().find(|w| !(**w > 0.0 && **w < 1.0)) {
            return Err(Error::InvalidEndowments(format!("{w} outside (0, 1)")));
        }
        if let Some(pair) = values.windows(2).find(|p| p[1] <= p[0]) {
            return Err(Error::InvalidEndowments(format!(
                "not strictly increasing at {} -> {}",
                pair[0], pair[1]
            )));
        }
        let total: f64 = values.iter().sum();
        if total >= 1.0 {
            return Err(Error::InvalidEndowments(format!("sum {total} >= 1")));
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn get(&self, resident: usize) -> f64 {
        self.values[resident]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }
}

impl TryFrom<Vec<f64>> for EndowmentProfile {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::from_values(values)
    }
}

impl From<EndowmentProfile> for Vec<f64> {
    fn from(p: EndowmentProfile) -> Self {
        p.values
    }
}

/// Lorenz sample points `x_i = i / (n + 2)` for `i = 1..=n+1`.
pub fn sample_points(n: usize) -> Vec<f64> {
    let denom = (n + 2) as f64;
    (1..=n + 1).map(|i| i as f64 / denom).collect()
}

/// Consecutive differences of the Lorenz curve over `n + 1` interior points.
pub fn generate_endowments(n: usize) -> Result<EndowmentProfile> {
    if n == 0 {
        return Err(Error::NoResidents);
    }
    let ys = sample_points(n)
        .into_iter()
        .map(lorenz)
        .collect::<Result<Vec<_>>>()?;
    let values = ys.windows(2).map(|p| p[1] - p[0]).collect();
    EndowmentProfile::from_values(values)
}
