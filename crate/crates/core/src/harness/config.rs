use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::grid::AmenitySpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphSource {
    File(PathBuf),
    Grid {
        rows: usize,
        cols: usize,
        #[serde(with = "spec_string")]
        amenities: AmenitySpec,
    },
}

mod spec_string {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::harness::grid::AmenitySpec;

    pub fn serialize<S: Serializer>(spec: &AmenitySpec, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(spec)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<AmenitySpec, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Full description of an experiment matrix over `(rho, lambda)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub source: GraphSource,
    /// Defaults to one resident per housing site.
    pub residents: Option<usize>,
    pub rhos: Vec<u32>,
    pub lambdas: Vec<f64>,
    pub horizon: u64,
    pub checkpoints: Vec<u64>,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub cce_samples_per_step: u32,
    pub render: bool,
    /// Run each checkpoint as its own horizon instead of a prefix of one run.
    pub independent_runs: bool,
    /// Write the final engine state of each run next to its manifest.
    pub save_state: bool,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.rhos.is_empty() {
            return bad("rho list is empty".into());
        }
        if self.lambdas.is_empty() {
            return bad("lambda list is empty".into());
        }
        if let Some(r) = self.rhos.iter().find(|&&r| r < 1) {
            return bad(format!("rho {r} < 1"));
        }
        if let Some(l) = self.lambdas.iter().find(|l| !(0.0..=1.0).contains(*l)) {
            return bad(format!("lambda {l} outside [0, 1]"));
        }
        if self.residents == Some(0) {
            return bad("resident count must be at least 1".into());
        }
        if self.horizon == 0 {
            return bad("horizon must be at least 1".into());
        }
        if self.checkpoints.is_empty() {
            return bad("checkpoint list is empty".into());
        }
        if self.checkpoints[0] == 0 || self.checkpoints.windows(2).any(|w| w[1] <= w[0]) {
            return bad("checkpoints must be positive and strictly increasing".into());
        }
        if *self.checkpoints.last().unwrap() > self.horizon {
            return bad("last checkpoint exceeds horizon".into());
        }
        if self.cce_samples_per_step == 0 {
            return bad("at least one equilibrium sample per step is required for the manifest".into());
        }
        if let GraphSource::Grid { rows, cols, .. } = self.source {
            if rows < 2 || cols < 2 {
                return bad(format!("grid {rows}x{cols} is smaller than 2x2"));
            }
        }
        Ok(())
    }

    pub fn cells(&self) -> Vec<(u32, f64)> {
        self.rhos
            .iter()
            .flat_map(|&r| self.lambdas.iter().map(move |&l| (r, l)))
            .collect()
    }
}

pub fn cell_dir_name(rho: u32, lambda: f64) -> String {
    format!("rho{rho}_lam{lambda}")
}

pub fn checkpoint_dir_name(steps: u64) -> String {
    format!("T{steps}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> RunConfig {
        RunConfig {
            source: GraphSource::Grid {
                rows: 3,
                cols: 3,
                amenities: AmenitySpec::Center,
            },
            residents: None,
            rhos: vec![1, 2],
            lambdas: vec![0.25],
            horizon: 10,
            checkpoints: vec![5, 10],
            seed: 1,
            out_dir: PathBuf::from("out"),
            cce_samples_per_step: 1,
            render: false,
            independent_runs: false,
            save_state: false,
        }
    }

    #[test]
    fn validation() {
        assert!(base().validate().is_ok());
        let mut c = base();
        c.rhos.clear();
        assert!(c.validate().is_err());
        let mut c = base();
        c.lambdas = vec![1.5];
        assert!(c.validate().is_err());
        let mut c = base();
        c.checkpoints = vec![10, 5];
        assert!(c.validate().is_err());
        let mut c = base();
        c.checkpoints = vec![11];
        assert!(c.validate().is_err());
        let mut c = base();
        c.cce_samples_per_step = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn directory_names() {
        assert_eq!(cell_dir_name(2, 0.25), "rho2_lam0.25");
        assert_eq!(cell_dir_name(8, 1.0), "rho8_lam1");
        assert_eq!(checkpoint_dir_name(5000), "T5000");
        assert_eq!(base().cells(), vec![(1, 0.25), (2, 0.25)]);
    }

    #[test]
    fn echoes_as_json() {
        let text = serde_json::to_string(&base()).unwrap();
        assert!(text.contains("\"amenities\":\"center\""));
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, base());
    }
}
