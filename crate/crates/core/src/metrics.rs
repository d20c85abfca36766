//! Spatial summary statistics of equilibrium snapshots.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::graph::SiteKind;
use crate::harness::snapshot::SiteSnapshot;

/// Fraction used for decile statistics.
pub const DECILE: f64 = 0.1;

/// Ranks starting at 1; tied values share their average rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// Spearman rank correlation; NaN when either input is constant or shorter than 2.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    if x.len() < 2 {
        return f64::NAN;
    }
    pearson(&average_ranks(x), &average_ranks(y))
}

pub fn weighted_mean(values: &[f64], weights: &[f64]) -> f64 {
    let total: f64 = weights.iter().sum();
    values.iter().zip(weights).map(|(v, w)| v * w).sum::<f64>() / total
}

pub fn weighted_variance(values: &[f64], weights: &[f64]) -> f64 {
    let mean = weighted_mean(values, weights);
    let total: f64 = weights.iter().sum();
    values
        .iter()
        .zip(weights)
        .map(|(v, w)| w * (v - mean) * (v - mean))
        .sum::<f64>()
        / total
}

/// Population-weighted mean of `score` over the sites holding the first
/// `share` of total population, walking `sites` in order. The boundary site
/// contributes only the population needed to reach the share.
fn leading_share_mean(sites: &[&SiteSnapshot], share: f64, score: impl Fn(&SiteSnapshot) -> f64) -> f64 {
    let total: f64 = sites.iter().map(|s| s.expected_population).sum();
    let mut remaining = share * total;
    let (mut num, mut den) = (0.0, 0.0);
    for s in sites {
        if remaining <= 0.0 {
            break;
        }
        let w = s.expected_population.min(remaining);
        num += w * score(s);
        den += w;
        remaining -= w;
    }
    num / den
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnapshotMetrics {
    /// Population-weighted mean amenity score of housing sites.
    pub mean_amenity: f64,
    /// Population-weighted variance of expected mean endowment over populated sites.
    pub segregation_index: f64,
    /// Spearman correlation of amenity score and mean endowment over populated sites.
    pub amenity_endowment_spearman: f64,
    /// Mean amenity score of the richest tenth of the population, by site.
    pub top_endowment_decile_amenity: f64,
    /// Mean amenity score of the poorest tenth of the population, by site.
    pub bottom_endowment_decile_amenity: f64,
    /// Share of expected population on the tenth of housing sites closest to amenities.
    pub dense_core_share: f64,
}

pub fn snapshot_metrics(rows: &[SiteSnapshot]) -> SnapshotMetrics {
    let housing: Vec<&SiteSnapshot> = rows.iter().filter(|r| r.kind == SiteKind::Housing).collect();
    let populated: Vec<&SiteSnapshot> = housing.iter().copied().filter(|r| r.populated).collect();

    let pops: Vec<f64> = housing.iter().map(|r| r.expected_population).collect();
    let amen: Vec<f64> = housing.iter().map(|r| r.amenity_score).collect();
    let mean_amenity = weighted_mean(&amen, &pops);

    let p_pop: Vec<f64> = populated.iter().map(|r| r.expected_population).collect();
    let p_endow: Vec<f64> = populated.iter().map(|r| r.expected_mean_endowment).collect();
    let p_amen: Vec<f64> = populated.iter().map(|r| r.amenity_score).collect();
    let segregation_index = weighted_variance(&p_endow, &p_pop);
    let amenity_endowment_spearman = spearman(&p_amen, &p_endow);

    let mut by_endowment = populated.clone();
    by_endowment.sort_by(|a, b| {
        a.expected_mean_endowment
            .total_cmp(&b.expected_mean_endowment)
            .then_with(|| a.site_id.cmp(&b.site_id))
    });
    let bottom = leading_share_mean(&by_endowment, DECILE, |s| s.amenity_score);
    by_endowment.reverse();
    let top = leading_share_mean(&by_endowment, DECILE, |s| s.amenity_score);

    let mut by_amenity = housing.clone();
    by_amenity.sort_by(|a, b| match b.amenity_score.total_cmp(&a.amenity_score) {
        Ordering::Equal => a.site_id.cmp(&b.site_id),
        o => o,
    });
    let core = (DECILE * housing.len() as f64).ceil() as usize;
    let total: f64 = pops.iter().sum();
    let core_pop: f64 = by_amenity[..core].iter().map(|r| r.expected_population).sum();

    SnapshotMetrics {
        mean_amenity,
        segregation_index,
        amenity_endowment_spearman,
        top_endowment_decile_amenity: top,
        bottom_endowment_decile_amenity: bottom,
        dense_core_share: core_pop / total,
    }
}
