//! Synthetic bidirectional unit grids for desk-scale experiments.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{Node, RoadGraph, SiteKind, SitePartition};

// coordinates in thousandths of a degree, so printed values stay short
const BASE_LON_MDEG: i64 = -73_950;
const BASE_LAT_MDEG: i64 = 40_710;

/// Which grid cells become amenities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AmenitySpec {
    /// The cell `(rows / 2, cols / 2)`: the middle, rounding half up.
    Center,
    /// Explicit `(row, col)` cells.
    Cells(Vec<(usize, usize)>),
}

impl FromStr for AmenitySpec {
    type Err = Error;

    /// `center`, or `row,col` pairs separated by `;`, e.g. `3,3;8,8`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("center") {
            return Ok(AmenitySpec::Center);
        }
        let cells = s
            .split(';')
            .filter(|part| !part.trim().is_empty())
            .map(|part| {
                let (r, c) = part
                    .split_once(',')
                    .ok_or_else(|| Error::Grid(format!("expected `row,col`, got `{part}`")))?;
                let parse = |v: &str| {
                    v.trim()
                        .parse::<usize>()
                        .map_err(|e| Error::Grid(format!("bad coordinate `{v}`: {e}")))
                };
                Ok((parse(r)?, parse(c)?))
            })
            .collect::<Result<Vec<_>>>()?;
        if cells.is_empty() {
            return Err(Error::Grid("empty amenity list".into()));
        }
        Ok(AmenitySpec::Cells(cells))
    }
}

impl fmt::Display for AmenitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AmenitySpec::Center => write!(f, "center"),
            AmenitySpec::Cells(cells) => {
                let parts: Vec<String> = cells.iter().map(|(r, c)| format!("{r},{c}")).collect();
                write!(f, "{}", parts.join(";"))
            }
        }
    }
}

impl TryFrom<String> for AmenitySpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<AmenitySpec> for String {
    fn from(spec: AmenitySpec) -> Self {
        spec.to_string()
    }
}

pub fn grid_node_id(row: usize, col: usize) -> String {
    format!("r{row:03}c{col:03}")
}

/// Parses `RxC` (e.g. `6x6`).
pub fn parse_dims(s: &str) -> Result<(usize, usize)> {
    let (r, c) = s
        .trim()
        .split_once(['x', 'X'])
        .ok_or_else(|| Error::Grid(format!("expected RxC, got `{s}`")))?;
    let parse = |v: &str| {
        v.trim()
            .parse::<usize>()
            .map_err(|e| Error::Grid(format!("bad grid dimension `{v}`: {e}")))
    };
    Ok((parse(r)?, parse(c)?))
}

/// Unit-length grid with arcs in both directions between 4-neighbors.
pub fn generate_grid(
    rows: usize,
    cols: usize,
    amenities: &AmenitySpec,
) -> Result<(RoadGraph, SitePartition)> {
    if rows < 2 || cols < 2 {
        return Err(Error::Grid(format!("grid {rows}x{cols} is smaller than 2x2")));
    }
    let cells = match amenities {
        AmenitySpec::Center => vec![(rows / 2, cols / 2)],
        AmenitySpec::Cells(cells) => cells.clone(),
    };
    let mut kinds = vec![SiteKind::Housing; rows * cols];
    for &(r, c) in &cells {
        if r >= rows || c >= cols {
            return Err(Error::Grid(format!(
                "amenity ({r},{c}) outside {rows}x{cols} grid"
            )));
        }
        kinds[r * cols + c] = SiteKind::Amenity;
    }
    if kinds.iter().all(|k| *k == SiteKind::Amenity) {
        return Err(Error::Grid("every grid cell is an amenity".into()));
    }

    let mut nodes = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            nodes.push(Node {
                id: grid_node_id(r, c),
                lon: (BASE_LON_MDEG + c as i64) as f64 / 1000.0,
                lat: (BASE_LAT_MDEG - r as i64) as f64 / 1000.0,
            });
        }
    }
    let mut arcs = Vec::new();
    let mut link = |a: (usize, usize), b: (usize, usize)| {
        arcs.push((grid_node_id(a.0, a.1), grid_node_id(b.0, b.1), 1.0));
        arcs.push((grid_node_id(b.0, b.1), grid_node_id(a.0, a.1), 1.0));
    };
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                link((r, c), (r, c + 1));
            }
            if r + 1 < rows {
                link((r, c), (r + 1, c));
            }
        }
    }
    let graph = RoadGraph::new(nodes, arcs)?;
    let partition = SitePartition::from_kinds(kinds)?;
    Ok((graph, partition))
}
