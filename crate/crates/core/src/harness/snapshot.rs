//! Per-site views of the time-averaged outcome distribution.

use std::fs::{self, File};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::engine::FrozenAverages;
use crate::error::{Error, Result};
use crate::graph::SiteKind;
use crate::instance::Instance;

/// Expected populations below this count as unpopulated.
pub const POPULATED_EPS: f64 = 1e-9;

/// One CSV row. Amenity nodes appear too, with zero population.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteSnapshot {
    pub site_id: String,
    pub lon: f64,
    pub lat: f64,
    pub kind: SiteKind,
    pub amenity_score: f64,
    #[serde(rename = "exp_pop")]
    pub expected_population: f64,
    #[serde(rename = "exp_total_endow")]
    pub expected_total_endowment: f64,
    #[serde(rename = "exp_mean_endow")]
    pub expected_mean_endowment: f64,
    #[serde(rename = "populated_flag")]
    pub populated: bool,
}

/// Builds rows for every node, sorted by node id.
pub fn snapshot(frozen: &FrozenAverages, instance: &Instance) -> Vec<SiteSnapshot> {
    let graph = instance.graph();
    let partition = instance.partition();
    let mut rows = Vec::with_capacity(graph.node_count());
    for &f in partition.amenities() {
        let node = &graph.nodes()[f];
        rows.push(SiteSnapshot {
            site_id: node.id.clone(),
            lon: node.lon,
            lat: node.lat,
            kind: SiteKind::Amenity,
            amenity_score: crate::distance::amenity_score(
                f,
                partition.amenities(),
                instance.distances(),
            ),
            expected_population: 0.0,
            expected_total_endowment: 0.0,
            expected_mean_endowment: 0.0,
            populated: false,
        });
    }
    for (action, &h) in partition.housing().iter().enumerate() {
        let node = &graph.nodes()[h];
        let pop = frozen.population[action];
        let wealth = frozen.wealth[action];
        let populated = pop >= POPULATED_EPS;
        rows.push(SiteSnapshot {
            site_id: node.id.clone(),
            lon: node.lon,
            lat: node.lat,
            kind: SiteKind::Housing,
            amenity_score: instance.amenity_scores()[action],
            expected_population: pop,
            expected_total_endowment: wealth,
            expected_mean_endowment: if populated {
                wealth / pop.max(POPULATED_EPS)
            } else {
                0.0
            },
            populated,
        });
    }
    rows.sort_by(|a, b| a.site_id.cmp(&b.site_id));
    rows
}

pub fn write_csv(path: impl AsRef<Path>, rows: &[SiteSnapshot]) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = csv::Writer::from_writer(file);
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<SiteSnapshot>> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path)?;
    reader
        .deserialize()
        .map(|row| row.map_err(Error::from))
        .collect()
}

pub fn to_geojson(rows: &[SiteSnapshot]) -> Value {
    let features: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "type": "Feature",
                "geometry": {"type": "Point", "coordinates": [r.lon, r.lat]},
                "properties": {
                    "site_id": r.site_id,
                    "lon": r.lon,
                    "lat": r.lat,
                    "kind": r.kind.as_str(),
                    "amenity_score": r.amenity_score,
                    "exp_pop": r.expected_population,
                    "exp_total_endow": r.expected_total_endowment,
                    "exp_mean_endow": r.expected_mean_endowment,
                    "populated_flag": r.populated,
                }
            })
        })
        .collect();
    json!({"type": "FeatureCollection", "features": features})
}

pub fn write_geojson(path: impl AsRef<Path>, rows: &[SiteSnapshot]) -> Result<()> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(&to_geojson(rows))?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
