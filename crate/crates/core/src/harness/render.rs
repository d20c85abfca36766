//! Static SVG maps of an equilibrium snapshot.
//!
//! Streets are gray lines and amenities solid blue dots. Housing dots scale
//! with expected population and are colored yellow, orange, then red by
//! expected mean endowment, min-max normalized over populated sites.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::graph::{RoadGraph, SiteKind};
use crate::harness::snapshot::SiteSnapshot;

const WIDTH: f64 = 800.0;
const MARGIN: f64 = 20.0;
const MIN_RADIUS: f64 = 2.0;
const MAX_RADIUS: f64 = 10.0;
const AMENITY_RADIUS: f64 = 6.0;
pub const AMENITY_FILL: &str = "#0000ff";
pub const EDGE_STROKE: &str = "#9e9e9e";
pub const UNPOPULATED_FILL: &str = "#bdbdbd";

const YELLOW: (f64, f64, f64) = (255.0, 255.0, 0.0);
const ORANGE: (f64, f64, f64) = (255.0, 165.0, 0.0);
const RED: (f64, f64, f64) = (255.0, 0.0, 0.0);

/// Yellow at 0, orange at 0.5, red at 1.
pub fn ramp_color(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let lerp = |a: (f64, f64, f64), b: (f64, f64, f64), s: f64| {
        (a.0 + (b.0 - a.0) * s, a.1 + (b.1 - a.1) * s, a.2 + (b.2 - a.2) * s)
    };
    let (r, g, b) = if t <= 0.5 {
        lerp(YELLOW, ORANGE, t * 2.0)
    } else {
        lerp(ORANGE, RED, t * 2.0 - 1.0)
    };
    format!(
        "#{:02x}{:02x}{:02x}",
        r.round() as u8,
        g.round() as u8,
        b.round() as u8
    )
}

struct Projection {
    min_lon: f64,
    max_lat: f64,
    x_scale: f64,
    scale: f64,
    height: f64,
}

impl Projection {
    fn fit(graph: &RoadGraph) -> Self {
        let nodes = graph.nodes();
        let (mut min_lon, mut max_lon) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut min_lat, mut max_lat) = (f64::INFINITY, f64::NEG_INFINITY);
        for n in nodes {
            min_lon = min_lon.min(n.lon);
            max_lon = max_lon.max(n.lon);
            min_lat = min_lat.min(n.lat);
            max_lat = max_lat.max(n.lat);
        }
        // equirectangular: shrink longitudes by cos(latitude)
        let x_scale = ((min_lat + max_lat) * 0.5).to_radians().cos();
        let span_x = (max_lon - min_lon) * x_scale;
        let span_y = max_lat - min_lat;
        let span = span_x.max(span_y);
        let scale = if span > 0.0 {
            (WIDTH - 2.0 * MARGIN) / span
        } else {
            1.0
        };
        let height = span_y * scale + 2.0 * MARGIN;
        Self {
            min_lon,
            max_lat,
            x_scale,
            scale,
            height,
        }
    }

    fn project(&self, lon: f64, lat: f64) -> (f64, f64) {
        (
            MARGIN + (lon - self.min_lon) * self.x_scale * self.scale,
            MARGIN + (self.max_lat - lat) * self.scale,
        )
    }
}

pub fn render_svg(rows: &[SiteSnapshot], graph: &RoadGraph) -> String {
    let proj = Projection::fit(graph);
    let by_id: HashMap<&str, &SiteSnapshot> = rows.iter().map(|r| (r.site_id.as_str(), r)).collect();

    let housing: Vec<&SiteSnapshot> = rows.iter().filter(|r| r.kind == SiteKind::Housing).collect();
    let max_pop = housing
        .iter()
        .map(|r| r.expected_population)
        .fold(0.0, f64::max);
    let populated = housing.iter().filter(|r| r.populated);
    let (lo, hi) = populated.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
        (lo.min(r.expected_mean_endowment), hi.max(r.expected_mean_endowment))
    });

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0}" height="{:.0}" viewBox="0 0 {WIDTH:.0} {:.0}">"#,
        proj.height.ceil(),
        proj.height.ceil()
    );
    let _ = writeln!(svg, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    let _ = writeln!(svg, r#"<g stroke="{EDGE_STROKE}" stroke-width="1">"#);
    for arc in graph.arcs() {
        let a = &graph.nodes()[arc.tail];
        let b = &graph.nodes()[arc.head];
        let (x1, y1) = proj.project(a.lon, a.lat);
        let (x2, y2) = proj.project(b.lon, b.lat);
        let _ = writeln!(
            svg,
            r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}"/>"#
        );
    }
    let _ = writeln!(svg, "</g>");

    for node in graph.nodes() {
        let Some(row) = by_id.get(node.id.as_str()) else {
            continue;
        };
        if row.kind != SiteKind::Housing {
            continue;
        }
        let (x, y) = proj.project(node.lon, node.lat);
        let (radius, fill) = if row.populated {
            let r = if max_pop > 0.0 {
                MIN_RADIUS + (MAX_RADIUS - MIN_RADIUS) * row.expected_population / max_pop
            } else {
                MIN_RADIUS
            };
            let t = if hi - lo > 1e-15 {
                (row.expected_mean_endowment - lo) / (hi - lo)
            } else {
                0.5
            };
            (r, ramp_color(t))
        } else {
            (MIN_RADIUS, UNPOPULATED_FILL.to_string())
        };
        let _ = writeln!(
            svg,
            r#"<circle class="housing" cx="{x:.2}" cy="{y:.2}" r="{radius:.2}" fill="{fill}" fill-opacity="0.85"/>"#
        );
    }

    for node in graph.nodes() {
        if by_id.get(node.id.as_str()).map(|r| r.kind) != Some(SiteKind::Amenity) {
            continue;
        }
        let (x, y) = proj.project(node.lon, node.lat);
        let _ = writeln!(
            svg,
            r#"<circle class="amenity" cx="{x:.2}" cy="{y:.2}" r="{AMENITY_RADIUS:.2}" fill="{AMENITY_FILL}"/>"#
        );
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ramp_stops() {
        assert_eq!(ramp_color(0.0), "#ffff00");
        assert_eq!(ramp_color(0.5), "#ffa500");
        assert_eq!(ramp_color(1.0), "#ff0000");
        assert_eq!(ramp_color(7.0), "#ff0000");
    }
}
