//! Orchestrates one engine run per `(rho, lambda)` cell and writes outputs:
//!
//! ```text
//! out_dir/
//!   graph.json                      (synthetic grids only)
//!   rho{rho}_lam{lambda}/
//!     manifest.json
//!     T{steps}/snapshot.csv
//!     T{steps}/snapshot.geojson
//!     T{steps}/map.svg              (with rendering enabled)
//! ```

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cost::{CostModel, ModelParams};
use crate::engine::{CceEstimate, Engine, EngineConfig};
use crate::error::{Error, Result};
use crate::graph::write_graph;
use crate::harness::config::{cell_dir_name, checkpoint_dir_name, GraphSource, RunConfig};
use crate::harness::grid::generate_grid;
use crate::harness::render::render_svg;
use crate::harness::snapshot::{snapshot, write_csv, write_geojson, SiteSnapshot};
use crate::instance::Instance;
use crate::metrics::{snapshot_metrics, SnapshotMetrics};

pub const MANIFEST_FORMAT: &str = "nrdyn-run/1";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const CSV_FILE: &str = "snapshot.csv";
pub const GEOJSON_FILE: &str = "snapshot.geojson";
pub const SVG_FILE: &str = "map.svg";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSummary {
    pub nodes: usize,
    pub amenities: usize,
    pub housing: usize,
    pub residents: usize,
    pub diameter_m: f64,
}

impl InstanceSummary {
    pub fn of(instance: &Instance) -> Self {
        Self {
            nodes: instance.graph().node_count(),
            amenities: instance.partition().amenities().len(),
            housing: instance.n_sites(),
            residents: instance.n_residents(),
            diameter_m: instance.distances().diameter_m(),
        }
    }
}

/// Statistics of one engine run (one per cell, or one per checkpoint when
/// runs are independent).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub horizon: u64,
    pub epsilon: f64,
    pub max_regret: f64,
    pub cce: CceEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointSummary {
    pub steps: u64,
    pub dir: String,
    pub total_population: f64,
    pub metrics: SnapshotMetrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: String,
    pub config: RunConfig,
    pub rho: u32,
    pub lambda: f64,
    pub mode: String,
    pub instance: InstanceSummary,
    pub endowments: Vec<f64>,
    pub runs: Vec<RunStats>,
    pub checkpoints: Vec<CheckpointSummary>,
    /// Regret of every agent in the longest run.
    pub per_agent_regret: Vec<f64>,
    pub max_regret: f64,
    /// `3 sqrt(ln |H| / T)` for the longest run.
    pub regret_reference: f64,
    pub cce: CceEstimate,
    pub wall_clock_s: f64,
}

#[derive(Debug, Clone)]
pub struct CheckpointOutput {
    pub steps: u64,
    pub rows: Vec<SiteSnapshot>,
    pub metrics: SnapshotMetrics,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub rho: u32,
    pub lambda: f64,
    pub dir: PathBuf,
    pub manifest: Manifest,
    pub checkpoints: Vec<CheckpointOutput>,
}

impl RunOutcome {
    pub fn at(&self, steps: u64) -> Option<&CheckpointOutput> {
        self.checkpoints.iter().find(|c| c.steps == steps)
    }
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

/// Loads or generates the study graph; generated grids are saved to `out_dir/graph.json`.
pub fn build_instance(config: &RunConfig) -> Result<Instance> {
    match &config.source {
        GraphSource::File(path) => Instance::from_file(path, config.residents),
        GraphSource::Grid {
            rows,
            cols,
            amenities,
        } => {
            let (graph, partition) = generate_grid(*rows, *cols, amenities)?;
            create_dir(&config.out_dir)?;
            write_graph(config.out_dir.join("graph.json"), &graph, &partition)?;
            Instance::build(&graph, &partition, config.residents)
        }
    }
}

/// Runs every `(rho, lambda)` cell with the shared seed.
pub fn run_matrix(config: &RunConfig) -> Result<Vec<RunOutcome>> {
    config.validate()?;
    create_dir(&config.out_dir)?;
    let instance = build_instance(config)?;
    run_matrix_on(config, &instance)
}

pub fn run_matrix_on(config: &RunConfig, instance: &Instance) -> Result<Vec<RunOutcome>> {
    config.validate()?;
    config
        .cells()
        .into_par_iter()
        .map(|(rho, lambda)| run_cell(config, instance, rho, lambda))
        .collect()
}

fn write_checkpoint(
    dir: &Path,
    rows: &[SiteSnapshot],
    instance: &Instance,
    render: bool,
) -> Result<()> {
    create_dir(dir)?;
    write_csv(dir.join(CSV_FILE), rows)?;
    write_geojson(dir.join(GEOJSON_FILE), rows)?;
    if render {
        let path = dir.join(SVG_FILE);
        fs::write(&path, render_svg(rows, instance.graph())).map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}

pub fn run_cell(
    config: &RunConfig,
    instance: &Instance,
    rho: u32,
    lambda: f64,
) -> Result<RunOutcome> {
    let started = Instant::now();
    let dir = config.out_dir.join(cell_dir_name(rho, lambda));
    create_dir(&dir)?;
    let params = ModelParams::new(rho, lambda)?;
    let model = CostModel::for_instance(instance, params)?;

    let plans: Vec<(u64, Vec<u64>)> = if config.independent_runs {
        config.checkpoints.iter().map(|&t| (t, vec![t])).collect()
    } else {
        vec![(config.horizon, config.checkpoints.clone())]
    };

    let mut runs = Vec::with_capacity(plans.len());
    let mut outputs = Vec::with_capacity(config.checkpoints.len());
    let mut summaries = Vec::with_capacity(config.checkpoints.len());
    let mut last_engine = None;
    for (horizon, checkpoints) in plans {
        let mut engine = Engine::new(
            model.clone(),
            EngineConfig {
                params,
                horizon,
                checkpoints,
                seed: config.seed,
                cce_samples_per_step: config.cce_samples_per_step,
            },
        )?;
        engine.run()?;
        runs.push(RunStats {
            horizon,
            epsilon: engine.epsilon(),
            max_regret: engine.max_regret(),
            cce: engine.estimate_cce_gap()?,
        });
        for frozen in engine.accumulator().checkpoints() {
            let rows = snapshot(frozen, instance);
            let name = checkpoint_dir_name(frozen.steps);
            write_checkpoint(&dir.join(&name), &rows, instance, config.render)?;
            let metrics = snapshot_metrics(&rows);
            summaries.push(CheckpointSummary {
                steps: frozen.steps,
                dir: name,
                total_population: rows.iter().map(|r| r.expected_population).sum(),
                metrics,
            });
            outputs.push(CheckpointOutput {
                steps: frozen.steps,
                rows,
                metrics,
            });
        }
        if config.save_state {
            engine.save_state(dir.join(format!("state_T{horizon}.nrd1.json")))?;
        }
        last_engine = Some(engine);
    }

    let engine = last_engine.expect("at least one checkpoint");
    let final_run = runs.last().expect("at least one run").clone();
    let manifest = Manifest {
        format: MANIFEST_FORMAT.into(),
        config: config.clone(),
        rho,
        lambda,
        mode: if config.independent_runs {
            "independent".into()
        } else {
            "prefix".into()
        },
        instance: InstanceSummary::of(instance),
        endowments: instance.endowments().values().to_vec(),
        per_agent_regret: engine.ledger().regrets(),
        max_regret: final_run.max_regret,
        regret_reference: 3.0
            * ((instance.n_sites() as f64).ln() / final_run.horizon as f64).sqrt(),
        cce: final_run.cce,
        runs,
        checkpoints: summaries,
        wall_clock_s: started.elapsed().as_secs_f64(),
    };
    let path = dir.join(MANIFEST_FILE);
    fs::write(&path, serde_json::to_string_pretty(&manifest)?).map_err(|e| Error::io(&path, e))?;
    verify_run_dir(&dir, &config.checkpoints, config.render)?;

    Ok(RunOutcome {
        rho,
        lambda,
        dir,
        manifest,
        checkpoints: outputs,
    })
}

/// Fails unless the manifest and every checkpoint's files are present.
pub fn verify_run_dir(dir: &Path, checkpoints: &[u64], render: bool) -> Result<()> {
    let missing = |what: String| Error::IncompleteRun {
        dir: dir.to_path_buf(),
        what,
    };
    let manifest_path = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&manifest_path).map_err(|_| missing(MANIFEST_FILE.into()))?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    for key in ["config", "endowments", "per_agent_regret", "max_regret", "cce"] {
        if value.get(key).is_none_or(|v| v.is_null()) {
            return Err(missing(format!("manifest field `{key}`")));
        }
    }
    for &t in checkpoints {
        let sub = dir.join(checkpoint_dir_name(t));
        let mut files = vec![CSV_FILE, GEOJSON_FILE];
        if render {
            files.push(SVG_FILE);
        }
        for f in files {
            if !sub.join(f).is_file() {
                return Err(missing(format!("{}/{f}", checkpoint_dir_name(t))));
            }
        }
    }
    Ok(())
}
