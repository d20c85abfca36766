//! Diameter-normalized shortest-path distances and amenity access scores.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{RoadGraph, SitePartition};

/// Dense row-major matrix of shortest-path distances divided by the
/// (directed) diameter. Entry `(u, v)` is the normalized length of the
/// shortest path from `u` to `v`; it need not equal `(v, u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedDistances {
    n: usize,
    values: Vec<f64>,
    diameter_m: f64,
}

impl NormalizedDistances {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, from: usize, to: usize) -> f64 {
        self.values[from * self.n + to]
    }

    pub fn row(&self, from: usize) -> &[f64] {
        &self.values[from * self.n..(from + 1) * self.n]
    }

    /// Longest shortest path, in the graph's length unit.
    pub fn diameter_m(&self) -> f64 {
        self.diameter_m
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

#[derive(Copy, Clone, PartialEq)]
struct QueueEntry {
    dist: f64,
    node: usize,
}

impl Eq for QueueEntry {}

impl Ord for QueueEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed for a min-heap
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn dijkstra(adj: &[Vec<(usize, f64)>], source: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; adj.len()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(QueueEntry {
        dist: 0.0,
        node: source,
    });
    while let Some(QueueEntry { dist: d, node }) = heap.pop() {
        if d > dist[node] {
            continue;
        }
        for &(next, len) in &adj[node] {
            let cand = d + len;
            if cand < dist[next] {
                dist[next] = cand;
                heap.push(QueueEntry {
                    dist: cand,
                    node: next,
                });
            }
        }
    }
    dist
}

/// All-pairs shortest paths (one Dijkstra per source) divided by the diameter.
///
/// The graph must be strongly connected; any unreachable pair is an error.
pub fn compute_normalized_distances(graph: &RoadGraph) -> Result<NormalizedDistances> {
    let n = graph.node_count();
    let adj = graph.adjacency();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|s| dijkstra(&adj, s))
        .collect();

    let mut diameter = 0.0_f64;
    for (u, row) in rows.iter().enumerate() {
        for (v, &d) in row.iter().enumerate() {
            if !d.is_finite() {
                return Err(Error::Unreachable {
                    from: graph.node_id(u).to_string(),
                    to: graph.node_id(v).to_string(),
                });
            }
            diameter = diameter.max(d);
        }
    }

    let mut values = Vec::with_capacity(n * n);
    for row in rows {
        if diameter > 0.0 {
            values.extend(row.into_iter().map(|d| d / diameter));
        } else {
            values.extend(row);
        }
    }
    Ok(NormalizedDistances {
        n,
        values,
        diameter_m: diameter,
    })
}

/// `1 - min_f dist(h, f)`: proximity of housing node `h` to its nearest amenity.
pub fn amenity_score(housing_node: usize, amenities: &[usize], dist: &NormalizedDistances) -> f64 {
    assert!(!amenities.is_empty(), "amenity set must be nonempty");
    let nearest = amenities
        .iter()
        .map(|&f| dist.get(housing_node, f))
        .fold(f64::INFINITY, f64::min);
    1.0 - nearest
}

/// Amenity score for every housing site, indexed by action.
pub fn amenity_scores(partition: &SitePartition, dist: &NormalizedDistances) -> Vec<f64> {
    partition
        .housing()
        .iter()
        .map(|&h| amenity_score(h, partition.amenities(), dist))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Node;

    fn node(id: &str) -> Node {
        Node {
            id: id.into(),
            lon: 0.0,
            lat: 0.0,
        }
    }

    #[test]
    fn single_node() {
        let g = RoadGraph::new(vec![node("a")], vec![]).unwrap();
        let d = compute_normalized_distances(&g).unwrap();
        assert_eq!(d.values(), &[0.0]);
    }

    #[test]
    fn two_node_cycle() {
        let g = RoadGraph::new(
            vec![node("a"), node("b")],
            vec![("a".into(), "b".into(), 100.0), ("b".into(), "a".into(), 300.0)],
        )
        .unwrap();
        let d = compute_normalized_distances(&g).unwrap();
        assert_eq!(d.diameter_m(), 300.0);
        assert_eq!(d.get(0, 0), 0.0);
        assert_eq!(d.get(0, 1), 100.0 / 300.0);
        assert_eq!(d.get(1, 0), 1.0);
        assert_eq!(d.get(1, 1), 0.0);
    }

    #[test]
    fn unreachable_is_an_error() {
        let g = RoadGraph::new(
            vec![node("a"), node("b")],
            vec![("a".into(), "b".into(), 1.0)],
        )
        .unwrap();
        assert!(matches!(
            compute_normalized_distances(&g),
            Err(Error::Unreachable { .. })
        ));
    }

    #[test]
    fn amenity_score_takes_nearest() {
        // h=0, amenities at 1 and 2 with distances 0.7 and 0.3 from h.
        let d = NormalizedDistances {
            n: 3,
            values: vec![0.0, 0.7, 0.3, 1.0, 0.0, 0.5, 1.0, 0.5, 0.0],
            diameter_m: 1.0,
        };
        assert_eq!(amenity_score(0, &[1, 2], &d), 0.7);
        assert_eq!(amenity_score(0, &[1], &d), 1.0 - 0.7);
        assert_eq!(amenity_score(1, &[1], &d), 1.0);
    }
}
