//! A study region ready for simulation.

use std::path::Path;

use crate::distance::{amenity_scores, compute_normalized_distances, NormalizedDistances};
use crate::error::Result;
use crate::graph::{load_graph, restrict_to_largest_scc, RoadGraph, SitePartition};
use crate::population::{generate_endowments, EndowmentProfile};

#[derive(Debug, Clone)]
pub struct Instance {
    graph: RoadGraph,
    partition: SitePartition,
    distances: NormalizedDistances,
    amenity: Vec<f64>,
    endowments: EndowmentProfile,
}

impl Instance {
    /// Restricts to the largest SCC, computes distances, and generates
    /// `residents` endowments (default: one per housing site).
    pub fn build(
        graph: &RoadGraph,
        partition: &SitePartition,
        residents: Option<usize>,
    ) -> Result<Self> {
        let (graph, partition) = restrict_to_largest_scc(graph, partition)?;
        let distances = compute_normalized_distances(&graph)?;
        let amenity = amenity_scores(&partition, &distances);
        let endowments = generate_endowments(residents.unwrap_or(partition.housing().len()))?;
        Ok(Self {
            graph,
            partition,
            distances,
            amenity,
            endowments,
        })
    }

    pub fn from_file(path: impl AsRef<Path>, residents: Option<usize>) -> Result<Self> {
        let (graph, partition) = load_graph(path)?;
        Self::build(&graph, &partition, residents)
    }

    pub fn graph(&self) -> &RoadGraph {
        &self.graph
    }

    pub fn partition(&self) -> &SitePartition {
        &self.partition
    }

    pub fn distances(&self) -> &NormalizedDistances {
        &self.distances
    }

    /// Amenity score per housing site, by action index.
    pub fn amenity_scores(&self) -> &[f64] {
        &self.amenity
    }

    pub fn endowments(&self) -> &EndowmentProfile {
        &self.endowments
    }

    pub fn n_sites(&self) -> usize {
        self.partition.housing().len()
    }

    pub fn n_residents(&self) -> usize {
        self.endowments.len()
    }

    /// Row-major `|H| x |H|` normalized distances between housing sites.
    pub fn housing_distances(&self) -> Vec<f64> {
        let housing = self.partition.housing();
        let mut out = Vec::with_capacity(housing.len() * housing.len());
        for &a in housing {
            for &b in housing {
                out.push(self.distances.get(a, b));
            }
        }
        out
    }
}
