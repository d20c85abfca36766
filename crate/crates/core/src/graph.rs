//! Road graph and amenity/housing partition, plus the JSON graph file format.
//!
//! A graph file is a single JSON document:
//!
//! ```json
//! {
//!   "nodes": [{"id": "a", "lon": -73.94, "lat": 40.70, "kind": "amenity"}, ...],
//!   "arcs":  [{"tail": "a", "head": "b", "length_m": 112.5}, ...]
//! }
//! ```
//!
//! Node indices used throughout the crate are positions in [`RoadGraph::nodes`],
//! which follow file order.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SiteKind {
    Amenity,
    Housing,
}

impl SiteKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SiteKind::Amenity => "amenity",
            SiteKind::Housing => "housing",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: String,
    pub lon: f64,
    pub lat: f64,
}

/// Directed street segment between two node indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoadArc {
    pub tail: usize,
    pub head: usize,
    /// Meters, strictly positive.
    pub length: f64,
}

/// Directed weighted street graph.
#[derive(Debug, Clone, PartialEq)]
pub struct RoadGraph {
    nodes: Vec<Node>,
    arcs: Vec<RoadArc>,
}

impl RoadGraph {
    /// Validates ids and arc lengths.
    pub fn new(nodes: Vec<Node>, arcs: Vec<(String, String, f64)>) -> Result<Self> {
        let mut index = HashMap::with_capacity(nodes.len());
        for (i, node) in nodes.iter().enumerate() {
            if index.insert(node.id.clone(), i).is_some() {
                return Err(Error::DuplicateNode(node.id.clone()));
            }
        }
        let mut resolved = Vec::with_capacity(arcs.len());
        for (tail, head, length) in arcs {
            let lookup = |id: &String| {
                index.get(id).copied().ok_or_else(|| Error::UnknownNode {
                    tail: tail.clone(),
                    head: head.clone(),
                    missing: id.clone(),
                })
            };
            let t = lookup(&tail)?;
            let h = lookup(&head)?;
            if !(length > 0.0 && length.is_finite()) {
                return Err(Error::NonPositiveLength { tail, head, length });
            }
            resolved.push(RoadArc {
                tail: t,
                head: h,
                length,
            });
        }
        Ok(Self {
            nodes,
            arcs: resolved,
        })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn arcs(&self) -> &[RoadArc] {
        &self.arcs
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_id(&self, idx: usize) -> &str {
        &self.nodes[idx].id
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    /// Outgoing adjacency lists as `(head, length)` pairs, in arc order.
    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for arc in &self.arcs {
            adj[arc.tail].push((arc.head, arc.length));
        }
        adj
    }

    /// Copy with every arc length multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for arc in &mut out.arcs {
            arc.length *= factor;
        }
        out
    }
}

/// Split of graph nodes into amenity sites and housing sites.
///
/// Both lists hold node indices in ascending order. A housing site's
/// position in [`SitePartition::housing`] is its action index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SitePartition {
    kinds: Vec<SiteKind>,
    amenities: Vec<usize>,
    housing: Vec<usize>,
}

impl SitePartition {
    pub fn from_kinds(kinds: Vec<SiteKind>) -> Result<Self> {
        let amenities: Vec<usize> = (0..kinds.len())
            .filter(|&i| kinds[i] == SiteKind::Amenity)
            .collect();
        let housing: Vec<usize> = (0..kinds.len())
            .filter(|&i| kinds[i] == SiteKind::Housing)
            .collect();
        if amenities.is_empty() {
            return Err(Error::NoAmenities);
        }
        if housing.is_empty() {
            return Err(Error::NoHousing);
        }
        Ok(Self {
            kinds,
            amenities,
            housing,
        })
    }

    pub fn kind(&self, node: usize) -> SiteKind {
        self.kinds[node]
    }

    pub fn kinds(&self) -> &[SiteKind] {
        &self.kinds
    }

    pub fn amenities(&self) -> &[usize] {
        &self.amenities
    }

    pub fn housing(&self) -> &[usize] {
        &self.housing
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: String,
    pub lon: f64,
    pub lat: f64,
    pub kind: SiteKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcRecord {
    pub tail: String,
    pub head: String,
    pub length_m: f64,
}

/// On-disk graph document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub nodes: Vec<NodeRecord>,
    pub arcs: Vec<ArcRecord>,
}

impl GraphFile {
    pub fn into_graph(self) -> Result<(RoadGraph, SitePartition)> {
        let kinds = self.nodes.iter().map(|n| n.kind).collect();
        let nodes = self
            .nodes
            .into_iter()
            .map(|n| Node {
                id: n.id,
                lon: n.lon,
                lat: n.lat,
            })
            .collect();
        let arcs = self
            .arcs
            .into_iter()
            .map(|a| (a.tail, a.head, a.length_m))
            .collect();
        let graph = RoadGraph::new(nodes, arcs)?;
        let partition = SitePartition::from_kinds(kinds)?;
        Ok((graph, partition))
    }

    pub fn from_graph(graph: &RoadGraph, partition: &SitePartition) -> Self {
        let nodes = graph
            .nodes()
            .iter()
            .enumerate()
            .map(|(i, n)| NodeRecord {
                id: n.id.clone(),
                lon: n.lon,
                lat: n.lat,
                kind: partition.kind(i),
            })
            .collect();
        let arcs = graph
            .arcs()
            .iter()
            .map(|a| ArcRecord {
                tail: graph.node_id(a.tail).to_string(),
                head: graph.node_id(a.head).to_string(),
                length_m: a.length,
            })
            .collect();
        Self { nodes, arcs }
    }
}

pub fn parse_graph(text: &str) -> Result<(RoadGraph, SitePartition)> {
    let file: GraphFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.into_graph()
}

/// Reads and validates a graph file.
pub fn load_graph(path: impl AsRef<Path>) -> Result<(RoadGraph, SitePartition)> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_graph(&text)
}

pub fn write_graph(
    path: impl AsRef<Path>,
    graph: &RoadGraph,
    partition: &SitePartition,
) -> Result<()> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(&GraphFile::from_graph(graph, partition))?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Keeps only the largest strongly connected component.
///
/// Ties between equally large components go to the one holding the
/// lexicographically smallest node id. Surviving nodes keep their relative order.
pub fn restrict_to_largest_scc(
    graph: &RoadGraph,
    partition: &SitePartition,
) -> Result<(RoadGraph, SitePartition)> {
    let n = graph.node_count();
    if n == 0 {
        return Err(Error::NoHousing);
    }
    let mut pg = DiGraph::<(), ()>::with_capacity(n, graph.arcs().len());
    let ids: Vec<_> = (0..n).map(|_| pg.add_node(())).collect();
    for arc in graph.arcs() {
        pg.add_edge(ids[arc.tail], ids[arc.head], ());
    }
    let components = tarjan_scc(&pg);

    let smallest_id = |comp: &Vec<petgraph::graph::NodeIndex>| {
        comp.iter()
            .map(|ix| graph.node_id(ix.index()))
            .min()
            .unwrap_or("")
    };
    let best = components
        .iter()
        .max_by(|a, b| {
            a.len()
                .cmp(&b.len())
                .then_with(|| smallest_id(b).cmp(smallest_id(a)))
        })
        .expect("non-empty graph has at least one component");

    let keep: HashSet<usize> = best.iter().map(|ix| ix.index()).collect();
    if keep.len() == n {
        return Ok((graph.clone(), partition.clone()));
    }

    let mut remap = vec![usize::MAX; n];
    let mut nodes = Vec::with_capacity(keep.len());
    let mut kinds = Vec::with_capacity(keep.len());
    for i in 0..n {
        if keep.contains(&i) {
            remap[i] = nodes.len();
            nodes.push(graph.nodes()[i].clone());
            kinds.push(partition.kind(i));
        }
    }
    let arcs = graph
        .arcs()
        .iter()
        .filter(|a| keep.contains(&a.tail) && keep.contains(&a.head))
        .map(|a| RoadArc {
            tail: remap[a.tail],
            head: remap[a.head],
            length: a.length,
        })
        .collect();
    let partition = SitePartition::from_kinds(kinds)?;
    Ok((RoadGraph { nodes, arcs }, partition))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_file(len0: f64) -> String {
        format!(
            r#"{{
  "nodes": [
    {{"id": "a", "lon": 0.0, "lat": 0.0, "kind": "amenity"}},
    {{"id": "b", "lon": 1.0, "lat": 0.0, "kind": "housing"}},
    {{"id": "c", "lon": 0.0, "lat": 1.0, "kind": "housing"}},
    {{"id": "d", "lon": 1.0, "lat": 1.0, "kind": "housing"}}
  ],
  "arcs": [
    {{"tail": "a", "head": "b", "length_m": {len0}}},
    {{"tail": "b", "head": "a", "length_m": 1.0}},
    {{"tail": "a", "head": "c", "length_m": 1.0}},
    {{"tail": "c", "head": "a", "length_m": 1.0}},
    {{"tail": "b", "head": "d", "length_m": 1.0}},
    {{"tail": "d", "head": "b", "length_m": 1.0}},
    {{"tail": "c", "head": "d", "length_m": 1.0}},
    {{"tail": "d", "head": "c", "length_m": 1.0}}
  ]
}}"#
        )
    }

    fn node(id: &str) -> Node {
        Node {
            id: id.to_string(),
            lon: 0.0,
            lat: 0.0,
        }
    }

    fn arc(t: &str, h: &str) -> (String, String, f64) {
        (t.to_string(), h.to_string(), 1.0)
    }

    #[test]
    fn parses_four_node_grid() {
        let (g, p) = parse_graph(&grid_file(1.0)).unwrap();
        assert_eq!(g.node_count(), 4);
        assert_eq!(g.arcs().len(), 8);
        assert_eq!(p.amenities(), &[0]);
        assert_eq!(p.housing(), &[1, 2, 3]);
    }

    #[test]
    fn rejects_zero_length() {
        let err = parse_graph(&grid_file(0.0)).unwrap_err();
        assert!(matches!(err, Error::NonPositiveLength { .. }));
        assert!(err.to_string().contains("non-positive length"));
    }

    #[test]
    fn rejects_bad_references_and_duplicates() {
        let err = RoadGraph::new(vec![node("a"), node("a")], vec![]).unwrap_err();
        assert!(matches!(err, Error::DuplicateNode(_)));
        let err = RoadGraph::new(vec![node("a")], vec![arc("a", "zz")]).unwrap_err();
        assert!(matches!(err, Error::UnknownNode { ref missing, .. } if missing == "zz"));
        assert!(matches!(parse_graph("{\"nodes\": ["), Err(Error::Parse(_))));
    }

    #[test]
    fn rejects_missing_site_classes() {
        let all_housing = SitePartition::from_kinds(vec![SiteKind::Housing; 3]);
        assert!(matches!(all_housing, Err(Error::NoAmenities)));
        let all_amenity = SitePartition::from_kinds(vec![SiteKind::Amenity; 3]);
        assert!(matches!(all_amenity, Err(Error::NoHousing)));
    }

    #[test]
    fn scc_identity_on_connected_input() {
        let (g, p) = parse_graph(&grid_file(1.0)).unwrap();
        let (g2, p2) = restrict_to_largest_scc(&g, &p).unwrap();
        assert_eq!(g, g2);
        assert_eq!(p, p2);
    }

    #[test]
    fn scc_keeps_larger_component() {
        // 5-cycle a..e and 3-cycle x..z joined by a one-way bridge.
        let ids = ["a", "b", "c", "d", "e", "x", "y", "z"];
        let nodes = ids.iter().map(|s| node(s)).collect();
        let arcs = vec![
            arc("a", "b"),
            arc("b", "c"),
            arc("c", "d"),
            arc("d", "e"),
            arc("e", "a"),
            arc("x", "y"),
            arc("y", "z"),
            arc("z", "x"),
            arc("e", "x"),
        ];
        let g = RoadGraph::new(nodes, arcs).unwrap();
        let mut kinds = vec![SiteKind::Housing; 8];
        kinds[0] = SiteKind::Amenity;
        kinds[5] = SiteKind::Amenity;
        let p = SitePartition::from_kinds(kinds).unwrap();
        let (g2, p2) = restrict_to_largest_scc(&g, &p).unwrap();
        let kept: Vec<_> = g2.nodes().iter().map(|n| n.id.as_str()).collect();
        assert_eq!(kept, vec!["a", "b", "c", "d", "e"]);
        assert_eq!(g2.arcs().len(), 5);
        assert_eq!(p2.amenities(), &[0]);
    }

    #[test]
    fn scc_restriction_can_empty_a_site_class() {
        let nodes = vec![node("a"), node("b"), node("c"), node("x")];
        let arcs = vec![
            arc("a", "b"),
            arc("b", "c"),
            arc("c", "a"),
            arc("a", "x"),
        ];
        let g = RoadGraph::new(nodes, arcs).unwrap();
        let kinds = vec![
            SiteKind::Housing,
            SiteKind::Housing,
            SiteKind::Housing,
            SiteKind::Amenity,
        ];
        let p = SitePartition::from_kinds(kinds).unwrap();
        assert!(matches!(
            restrict_to_largest_scc(&g, &p),
            Err(Error::NoAmenities)
        ));
    }

    #[test]
    fn round_trips_through_file_format() {
        let (g, p) = parse_graph(&grid_file(2.5)).unwrap();
        let text = serde_json::to_string(&GraphFile::from_graph(&g, &p)).unwrap();
        let (g2, p2) = parse_graph(&text).unwrap();
        assert_eq!(g, g2);
        assert_eq!(p, p2);
    }
}
