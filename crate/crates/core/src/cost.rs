//! Resident cost model: affordability, amenity access, community ties, upkeep.
//!
//! Sites are addressed by action index (position in the housing list) and
//! residents by their index in the [`EndowmentProfile`]. Every score is
//! evaluated against the full enacted profile: a resident scoring a
//! candidate site is still counted at the site they actually occupy.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::population::EndowmentProfile;

/// Community denominators below this are treated as degenerate geometry.
pub const COMMUNITY_EPS: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Zoning density: how many richer co-residents a site tolerates.
    pub rho: u32,
    /// Weight on amenity access; community ties get `1 - lambda`.
    pub lambda: f64,
}

impl ModelParams {
    pub fn new(rho: u32, lambda: f64) -> Result<Self> {
        let p = Self { rho, lambda };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rho < 1 {
            return Err(Error::InvalidParams(format!("rho = {} < 1", self.rho)));
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::InvalidParams(format!(
                "lambda = {} outside [0, 1]",
                self.lambda
            )));
        }
        Ok(())
    }
}

/// Enacted housing site (action index) of every resident.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Profile {
    placement: Vec<usize>,
}

impl Profile {
    pub fn new(placement: Vec<usize>, n_sites: usize) -> Result<Self> {
        if let Some((j, &h)) = placement.iter().enumerate().find(|(_, &h)| h >= n_sites) {
            return Err(Error::InvalidProfile(format!(
                "resident {j} placed at site {h}, only {n_sites} sites"
            )));
        }
        Ok(Self { placement })
    }

    pub fn len(&self) -> usize {
        self.placement.len()
    }

    pub fn is_empty(&self) -> bool {
        self.placement.is_empty()
    }

    #[inline]
    pub fn site_of(&self, resident: usize) -> usize {
        self.placement[resident]
    }

    pub fn placement(&self) -> &[usize] {
        &self.placement
    }

    pub(crate) fn set(&mut self, resident: usize, site: usize) {
        self.placement[resident] = site;
    }
}

/// Occupants of each housing site.
///
/// Occupant sets hold resident indices; because endowments increase with
/// index, iteration order is ascending endowment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccupancyIndex {
    occupants: Vec<BTreeSet<usize>>,
}

impl OccupancyIndex {
    pub fn build(profile: &Profile, n_sites: usize) -> Self {
        let mut occupants = vec![BTreeSet::new(); n_sites];
        for (j, &h) in profile.placement().iter().enumerate() {
            occupants[h].insert(j);
        }
        Self { occupants }
    }

    pub fn n_sites(&self) -> usize {
        self.occupants.len()
    }

    #[inline]
    pub fn count(&self, site: usize) -> usize {
        self.occupants[site].len()
    }

    pub fn occupants(&self, site: usize) -> impl Iterator<Item = usize> + '_ {
        self.occupants[site].iter().copied()
    }

    /// Occupant endowments at `site`, ascending.
    pub fn endowments(&self, site: usize, w: &EndowmentProfile) -> Vec<f64> {
        self.occupants(site).map(|j| w.get(j)).collect()
    }

    pub fn total(&self) -> usize {
        self.occupants.iter().map(BTreeSet::len).sum()
    }

    /// Relocates `resident` from `from` to `to`, keeping `profile` in sync.
    pub fn move_resident(
        &mut self,
        profile: &mut Profile,
        resident: usize,
        from: usize,
        to: usize,
    ) -> Result<()> {
        if profile.site_of(resident) != from || !self.occupants[from].remove(&resident) {
            return Err(Error::InvalidProfile(format!(
                "resident {resident} is not at site {from}"
            )));
        }
        self.occupants[to].insert(resident);
        profile.set(resident, to);
        Ok(())
    }
}

/// 1 iff strictly fewer than `rho` occupants of `site` are richer than `resident`.
pub fn affordability(
    resident: usize,
    site: usize,
    occ: &OccupancyIndex,
    w: &EndowmentProfile,
    rho: u32,
) -> bool {
    let mine = w.get(resident);
    let richer = occ.occupants(site).filter(|&o| w.get(o) > mine).count();
    richer < rho as usize
}

/// 1 iff anyone lives at `site`.
pub fn upkeep(site: usize, occ: &OccupancyIndex) -> bool {
    occ.count(site) > 0
}

/// Proximity-squared weighted mean endowment around each housing site.
#[derive(Debug, Clone, PartialEq)]
pub struct CommunityField {
    values: Vec<f64>,
}

impl CommunityField {
    #[inline]
    pub fn get(&self, site: usize) -> f64 {
        self.values[site]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// `1 - |w_j - m(h)|`.
pub fn community_score(resident: usize, site: usize, field: &CommunityField, w: &EndowmentProfile) -> f64 {
    1.0 - (w.get(resident) - field.get(site)).abs()
}

/// Per-step structures shared by every cost evaluation.
#[derive(Debug, Clone)]
pub struct StepFields {
    occupancy: OccupancyIndex,
    community: CommunityField,
    // smallest endowment for which the site is affordable; -inf if fewer than rho occupants
    afford_floor: Vec<f64>,
    // U(h) * exp(-lambda L(h) - (1 - lambda)); zero when abandoned
    base: Vec<f64>,
    // exp(-(1 - lambda) m(h)) and exp((1 - lambda) m(h))
    field_down: Vec<f64>,
    field_up: Vec<f64>,
}

impl StepFields {
    pub fn occupancy(&self) -> &OccupancyIndex {
        &self.occupancy
    }

    pub fn community(&self) -> &CommunityField {
        &self.community
    }
}

/// Everything needed to price actions for one `(rho, lambda)` setting.
#[derive(Debug, Clone)]
pub struct CostModel {
    params: ModelParams,
    endowments: EndowmentProfile,
    amenity: Vec<f64>,
    // (1 - dist(h, s))^2 between housing sites, row-major by h
    proximity_sq: Vec<f64>,
    n_sites: usize,
    // exp((1 - lambda) w_j) and exp(-(1 - lambda) w_j)
    resident_up: Vec<f64>,
    resident_down: Vec<f64>,
}

impl CostModel {
    /// `housing_dist` is the row-major `|H| x |H|` matrix of normalized
    /// distances between housing sites; `amenity` holds `L(h, F)` per site.
    pub fn new(
        amenity: Vec<f64>,
        housing_dist: &[f64],
        endowments: EndowmentProfile,
        params: ModelParams,
    ) -> Result<Self> {
        params.validate()?;
        let n_sites = amenity.len();
        if n_sites == 0 {
            return Err(Error::NoHousing);
        }
        if housing_dist.len() != n_sites * n_sites {
            return Err(Error::InvalidParams(format!(
                "distance matrix has {} entries, expected {}",
                housing_dist.len(),
                n_sites * n_sites
            )));
        }
        let proximity_sq = housing_dist
            .iter()
            .map(|d| {
                let s = 1.0 - d;
                s * s
            })
            .collect();
        let k = 1.0 - params.lambda;
        let resident_up = endowments.values().iter().map(|w| (k * w).exp()).collect();
        let resident_down = endowments.values().iter().map(|w| (-k * w).exp()).collect();
        Ok(Self {
            params,
            endowments,
            amenity,
            proximity_sq,
            n_sites,
            resident_up,
            resident_down,
        })
    }

    pub fn for_instance(instance: &Instance, params: ModelParams) -> Result<Self> {
        Self::new(
            instance.amenity_scores().to_vec(),
            &instance.housing_distances(),
            instance.endowments().clone(),
            params,
        )
    }

    pub fn params(&self) -> ModelParams {
        self.params
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn n_residents(&self) -> usize {
        self.endowments.len()
    }

    pub fn endowments(&self) -> &EndowmentProfile {
        &self.endowments
    }

    pub fn amenity(&self) -> &[f64] {
        &self.amenity
    }

    pub fn profile(&self, placement: Vec<usize>) -> Result<Profile> {
        if placement.len() != self.n_residents() {
            return Err(Error::InvalidProfile(format!(
                "{} placements for {} residents",
                placement.len(),
                self.n_residents()
            )));
        }
        Profile::new(placement, self.n_sites)
    }

    /// Neighborhood mean endowment at every site, summing over all residents.
    pub fn community_field(&self, profile: &Profile) -> Result<CommunityField> {
        let n = self.n_sites;
        let mut mass = vec![0.0; n];
        let mut heads = vec![0.0; n];
        for (j, &h) in profile.placement().iter().enumerate() {
            mass[h] += self.endowments.get(j);
            heads[h] += 1.0;
        }
        let occupied: Vec<usize> = (0..n).filter(|&s| heads[s] > 0.0).collect();
        let mut values = Vec::with_capacity(n);
        for h in 0..n {
            let row = &self.proximity_sq[h * n..(h + 1) * n];
            let mut num = 0.0;
            let mut den = 0.0;
            for &s in &occupied {
                num += mass[s] * row[s];
                den += heads[s] * row[s];
            }
            if den < COMMUNITY_EPS {
                return Err(Error::DegenerateCommunity { site: h });
            }
            values.push(num / den);
        }
        Ok(CommunityField { values })
    }

    /// Builds the occupancy index, community field, and fused lookup tables.
    pub fn fields(&self, profile: &Profile) -> Result<StepFields> {
        let occupancy = OccupancyIndex::build(profile, self.n_sites);
        let community = self.community_field(profile)?;
        let rho = self.params.rho as usize;
        let lambda = self.params.lambda;
        let k = 1.0 - lambda;

        let mut afford_floor = Vec::with_capacity(self.n_sites);
        let mut base = Vec::with_capacity(self.n_sites);
        let mut field_down = Vec::with_capacity(self.n_sites);
        let mut field_up = Vec::with_capacity(self.n_sites);
        for h in 0..self.n_sites {
            let count = occupancy.count(h);
            // the rho-th richest occupant bounds who can still afford h
            let floor = if count >= rho {
                let pivot = occupancy.occupants(h).nth(count - rho).expect("count >= rho");
                self.endowments.get(pivot)
            } else {
                f64::NEG_INFINITY
            };
            afford_floor.push(floor);
            base.push(if count > 0 {
                (-(lambda * self.amenity[h]) - k).exp()
            } else {
                0.0
            });
            let m = community.get(h);
            field_down.push((-k * m).exp());
            field_up.push((k * m).exp());
        }
        Ok(StepFields {
            occupancy,
            community,
            afford_floor,
            base,
            field_down,
            field_up,
        })
    }

    /// Reference evaluation of `1 - P U exp(-(lambda L + (1 - lambda) W))`.
    pub fn cost(&self, resident: usize, site: usize, fields: &StepFields) -> f64 {
        let occ = &fields.occupancy;
        let p = affordability(resident, site, occ, &self.endowments, self.params.rho);
        let u = upkeep(site, occ);
        if !(p && u) {
            return 1.0;
        }
        let l = self.amenity[site];
        let w = community_score(resident, site, &fields.community, &self.endowments);
        let lambda = self.params.lambda;
        1.0 - (-(lambda * l + (1.0 - lambda) * w)).exp()
    }

    /// Pointwise [`CostModel::cost`] over every site.
    pub fn cost_vector_reference(&self, resident: usize, fields: &StepFields) -> Vec<f64> {
        (0..self.n_sites)
            .map(|h| self.cost(resident, h, fields))
            .collect()
    }

    /// Fused cost vector: no per-entry exponentials or occupant scans.
    pub fn cost_vector_into(&self, resident: usize, fields: &StepFields, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.n_sites);
        let wj = self.endowments.get(resident);
        let up = self.resident_up[resident];
        let down = self.resident_down[resident];
        let sites = out
            .iter_mut()
            .zip(&fields.afford_floor)
            .zip(&fields.base)
            .zip(fields.community.values())
            .zip(fields.field_down.iter().zip(&fields.field_up));
        for ((((c, &floor), &base), &m), (&fd, &fu)) in sites {
            *c = if wj < floor {
                1.0
            } else {
                let tie = if wj >= m { up * fd } else { down * fu };
                1.0 - base * tie
            };
        }
    }

    pub fn cost_vector(&self, resident: usize, fields: &StepFields) -> Vec<f64> {
        let mut out = vec![0.0; self.n_sites];
        self.cost_vector_into(resident, fields, &mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(amenity: Vec<f64>, dist: Vec<f64>, w: Vec<f64>, rho: u32, lambda: f64) -> CostModel {
        CostModel::new(
            amenity,
            &dist,
            EndowmentProfile::from_values(w).unwrap(),
            ModelParams::new(rho, lambda).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(0, 0.5).is_err());
        assert!(ModelParams::new(1, 1.5).is_err());
        assert!(ModelParams::new(1, -0.1).is_err());
        assert!(ModelParams::new(8, 1.0).is_ok());
    }

    #[test]
    fn affordability_cases() {
        let w = EndowmentProfile::from_values(vec![0.1, 0.3, 0.5]).unwrap();
        // empty site
        let occ = OccupancyIndex::build(&Profile::new(vec![1, 1, 1], 2).unwrap(), 2);
        assert!(affordability(0, 0, &occ, &w, 1));
        // rho = 1, one richer occupant
        let occ = OccupancyIndex::build(&Profile::new(vec![1, 1, 0], 2).unwrap(), 2);
        assert!(!affordability(1, 0, &occ, &w, 1));
        // rho = 2, occupants {0.5, 0.1}, w_j = 0.3 -> one richer -> affordable
        let occ = OccupancyIndex::build(&Profile::new(vec![0, 1, 0], 2).unwrap(), 2);
        assert!(affordability(1, 0, &occ, &w, 2));
        assert!(!affordability(1, 0, &occ, &w, 1));
    }

    #[test]
    fn upkeep_cases() {
        let profile = Profile::new(vec![0, 0, 0, 2], 3).unwrap();
        let occ = OccupancyIndex::build(&profile, 3);
        assert!(upkeep(0, &occ));
        assert!(!upkeep(1, &occ));
        // only resident 3 lives at site 2; they still keep it up
        assert!(upkeep(2, &occ));
    }

    #[test]
    fn occupancy_moves_conserve_residents() {
        let mut profile = Profile::new(vec![0, 0, 1, 2], 3).unwrap();
        let mut occ = OccupancyIndex::build(&profile, 3);
        occ.move_resident(&mut profile, 1, 0, 2).unwrap();
        assert_eq!(occ.total(), 4);
        assert_eq!(profile.site_of(1), 2);
        assert_eq!(occ.occupants(2).collect::<Vec<_>>(), vec![1, 3]);
        assert_eq!(occ, OccupancyIndex::build(&profile, 3));
        assert!(occ.move_resident(&mut profile, 1, 0, 1).is_err());
    }

    #[test]
    fn community_field_single_resident() {
        let m = model(vec![0.5; 3], vec![0.0, 0.4, 0.9, 0.4, 0.0, 0.2, 0.9, 0.2, 0.0], vec![0.37], 1, 0.5);
        let field = m.community_field(&m.profile(vec![2]).unwrap()).unwrap();
        assert!(field.values().iter().all(|&v| (v - 0.37).abs() < 1e-15));
    }

    #[test]
    fn community_field_two_residents() {
        // resident 0 (w=0.2) at site 0 with proximity 1, resident 1 (w=0.6)
        // at site 1 with proximity 0.5 from site 0
        let m = model(vec![0.5, 0.5], vec![0.0, 0.5, 0.5, 0.0], vec![0.2, 0.6], 1, 0.5);
        let profile = m.profile(vec![0, 1]).unwrap();
        let field = m.community_field(&profile).unwrap();
        assert!((field.get(0) - 0.28).abs() < 1e-15);
        let score = community_score(0, 0, &field, m.endowments());
        assert!((score - 0.92).abs() < 1e-15);
    }

    #[test]
    fn community_field_colocated_is_mean() {
        let m = model(vec![0.5, 0.5], vec![0.0, 0.3, 0.6, 0.0], vec![0.1, 0.2, 0.3], 1, 0.5);
        let field = m.community_field(&m.profile(vec![1, 1, 1]).unwrap()).unwrap();
        assert!((field.get(1) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn community_field_degenerate_geometry() {
        let m = model(vec![0.5, 0.5], vec![0.0, 1.0, 1.0, 0.0], vec![0.1, 0.2], 1, 0.5);
        let err = m.community_field(&m.profile(vec![1, 1]).unwrap()).unwrap_err();
        assert!(matches!(err, Error::DegenerateCommunity { site: 0 }));
    }

    #[test]
    fn annihilators_give_exact_one() {
        let m = model(vec![1.0, 1.0], vec![0.0, 0.5, 0.5, 0.0], vec![0.1, 0.3], 1, 0.25);
        let fields = m.fields(&m.profile(vec![0, 0]).unwrap()).unwrap();
        // site 1 is abandoned
        assert_eq!(m.cost(0, 1, &fields), 1.0);
        assert_eq!(m.cost_vector(0, &fields)[1], 1.0);
        // resident 0 is priced out of site 0 by resident 1 at rho = 1
        assert_eq!(m.cost(0, 0, &fields), 1.0);
        assert_eq!(m.cost_vector(0, &fields)[0], 1.0);
    }

    #[test]
    fn full_scores_give_one_minus_inverse_e() {
        // lone resident: P = U = 1, W = 1, and L = 1 at site 0
        let m = model(vec![1.0, 0.2], vec![0.0, 0.5, 0.5, 0.0], vec![0.3], 1, 0.25);
        let fields = m.fields(&m.profile(vec![0]).unwrap()).unwrap();
        let expected = 1.0 - (-1.0_f64).exp();
        assert!((m.cost(0, 0, &fields) - expected).abs() < 1e-15);
        assert!((m.cost_vector(0, &fields)[0] - 0.632121).abs() < 1e-6);
    }

    #[test]
    fn single_site_vector() {
        let m = model(vec![0.4], vec![0.0], vec![0.3], 2, 0.5);
        let fields = m.fields(&m.profile(vec![0]).unwrap()).unwrap();
        assert_eq!(m.cost_vector(0, &fields).len(), 1);
    }
}
