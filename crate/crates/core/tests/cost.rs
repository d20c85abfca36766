use nrdyn::cost::{CostModel, ModelParams, OccupancyIndex};
use nrdyn::population::{generate_endowments, EndowmentProfile};
use proptest::prelude::*;
use proptest::strategy::ValueTree;

/// A random instance: amenity scores, an asymmetric distance matrix with a
/// zero diagonal, a placement, and model parameters.
#[derive(Debug, Clone)]
struct Case {
    amenity: Vec<f64>,
    dist: Vec<f64>,
    placement: Vec<usize>,
    rho: u32,
    lambda: f64,
}

impl Case {
    fn n_sites(&self) -> usize {
        self.amenity.len()
    }

    fn model(&self) -> CostModel {
        CostModel::new(
            self.amenity.clone(),
            &self.dist,
            generate_endowments(self.placement.len()).unwrap(),
            ModelParams::new(self.rho, self.lambda).unwrap(),
        )
        .unwrap()
    }
}

fn case(max_sites: usize, max_residents: usize) -> impl Strategy<Value = Case> {
    (1..=max_sites, 1..=max_residents).prop_flat_map(|(n, r)| {
        (
            prop::collection::vec(0.0f64..=1.0, n),
            prop::collection::vec(0.0f64..0.95, n * n),
            prop::collection::vec(0..n, r),
            1u32..=9,
            0.0f64..=1.0,
        )
            .prop_map(move |(amenity, mut dist, placement, rho, lambda)| {
                for i in 0..n {
                    dist[i * n + i] = 0.0;
                }
                Case {
                    amenity,
                    dist,
                    placement,
                    rho,
                    lambda,
                }
            })
    })
}

/// Naive evaluation of every term from the raw inputs.
struct Oracle<'a> {
    case: &'a Case,
    w: Vec<f64>,
}

impl<'a> Oracle<'a> {
    fn new(case: &'a Case) -> Self {
        let w = generate_endowments(case.placement.len()).unwrap().values().to_vec();
        Self { case, w }
    }

    fn affordable(&self, j: usize, h: usize) -> bool {
        let richer = (0..self.w.len())
            .filter(|&k| self.case.placement[k] == h && self.w[k] > self.w[j])
            .count();
        richer < self.case.rho as usize
    }

    fn occupied(&self, h: usize) -> bool {
        self.case.placement.contains(&h)
    }

    fn neighborhood_mean(&self, h: usize) -> f64 {
        let n = self.case.n_sites();
        let (mut num, mut den) = (0.0, 0.0);
        for (k, &s) in self.case.placement.iter().enumerate() {
            let prox = (1.0 - self.case.dist[h * n + s]).powi(2);
            num += self.w[k] * prox;
            den += prox;
        }
        num / den
    }

    fn community(&self, j: usize, h: usize) -> f64 {
        1.0 - (self.w[j] - self.neighborhood_mean(h)).abs()
    }

    fn cost_with(&self, j: usize, h: usize, lambda: f64) -> f64 {
        if !(self.affordable(j, h) && self.occupied(h)) {
            return 1.0;
        }
        let l = self.case.amenity[h];
        1.0 - (-(lambda * l + (1.0 - lambda) * self.community(j, h))).exp()
    }

    fn cost(&self, j: usize, h: usize) -> f64 {
        self.cost_with(j, h, self.case.lambda)
    }
}

fn assert_close(a: f64, b: f64, tol: f64) {
    assert!((a - b).abs() <= tol, "{a} vs {b}");
}

#[test]
fn hand_instance_two_sites() {
    // residents 0 < 1 < 2 in wealth; 0 and 2 share site 0, 1 lives at site 1
    let case = Case {
        amenity: vec![0.8, 0.3, 0.5],
        dist: vec![0.0, 0.5, 1.0, 0.5, 0.0, 0.5, 1.0, 0.5, 0.0],
        placement: vec![0, 1, 0],
        rho: 1,
        lambda: 0.5,
    };
    let model = case.model();
    let fields = model.fields(&model.profile(case.placement.clone()).unwrap()).unwrap();
    let c = model.cost_vector(0, &fields);
    // site 0 holds the richer resident 2, site 2 is empty
    assert_eq!(c[0], 1.0);
    assert_eq!(c[2], 1.0);
    let oracle = Oracle::new(&case);
    assert_close(c[1], oracle.cost(0, 1), 1e-15);
    let c2 = model.cost_vector(2, &fields);
    assert!(c2[0] < 1.0 && c2[1] < 1.0);
}

#[test]
fn fused_equals_naive_on_twenty_by_twenty_profiles() {
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    let strategy = (
        prop::collection::vec(0.0f64..=1.0, 20),
        prop::collection::vec(0.0f64..0.95, 400),
        prop::collection::vec(prop::collection::vec(0usize..20, 20), 100),
        1u32..=4,
        0.0f64..=1.0,
    );
    let (amenity, mut dist, profiles, rho, lambda) = strategy.new_tree(&mut runner).unwrap().current();
    for i in 0..20 {
        dist[i * 20 + i] = 0.0;
    }
    for placement in profiles {
        let case = Case {
            amenity: amenity.clone(),
            dist: dist.clone(),
            placement,
            rho,
            lambda,
        };
        let model = case.model();
        let oracle = Oracle::new(&case);
        let fields = model.fields(&model.profile(case.placement.clone()).unwrap()).unwrap();
        for j in 0..20 {
            for (h, &c) in model.cost_vector(j, &fields).iter().enumerate() {
                assert_close(c, oracle.cost(j, h), 1e-12);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn fused_equals_reference_and_naive(case in case(25, 25)) {
        let model = case.model();
        let oracle = Oracle::new(&case);
        let fields = model.fields(&model.profile(case.placement.clone()).unwrap()).unwrap();
        for j in 0..case.placement.len() {
            let fast = model.cost_vector(j, &fields);
            let slow = model.cost_vector_reference(j, &fields);
            for h in 0..case.n_sites() {
                prop_assert!((fast[h] - slow[h]).abs() <= 1e-12);
                prop_assert!((fast[h] - oracle.cost(j, h)).abs() <= 1e-12);
            }
        }
    }
}

proptest! {
    #[test]
    fn costs_stay_in_range(case in case(12, 12)) {
        let model = case.model();
        let oracle = Oracle::new(&case);
        let fields = model.fields(&model.profile(case.placement.clone()).unwrap()).unwrap();
        let ceiling = 1.0 - (-1.0f64).exp();
        for j in 0..case.placement.len() {
            for (h, &c) in model.cost_vector(j, &fields).iter().enumerate() {
                prop_assert!((0.0..=1.0).contains(&c));
                if oracle.affordable(j, h) && oracle.occupied(h) {
                    prop_assert!(c <= ceiling + 1e-15);
                } else {
                    prop_assert_eq!(c, 1.0);
                }
            }
        }
    }

    #[test]
    fn cost_rises_with_lambda_when_amenity_exceeds_community(case in case(8, 8), l1 in 0.0f64..=1.0, l2 in 0.0f64..=1.0) {
        let (lo, hi) = if l1 < l2 { (l1, l2) } else { (l2, l1) };
        prop_assume!(hi - lo > 1e-6);
        let oracle = Oracle::new(&case);
        let at = |lambda: f64| {
            let mut c = case.clone();
            c.lambda = lambda;
            let m = c.model();
            let f = m.fields(&m.profile(c.placement.clone()).unwrap()).unwrap();
            (0..c.placement.len()).map(|j| m.cost_vector(j, &f)).collect::<Vec<_>>()
        };
        let (a, b) = (at(lo), at(hi));
        for j in 0..case.placement.len() {
            for h in 0..case.n_sites() {
                if !(oracle.affordable(j, h) && oracle.occupied(h)) {
                    continue;
                }
                let gap = case.amenity[h] - oracle.community(j, h);
                // d/dlambda of 1 - exp(-x) is exp(-x) (L - W)
                if gap > 1e-9 {
                    prop_assert!(b[j][h] > a[j][h]);
                } else if gap < -1e-9 {
                    prop_assert!(b[j][h] < a[j][h]);
                } else if gap == 0.0 {
                    prop_assert!((b[j][h] - a[j][h]).abs() <= 1e-15);
                }
            }
        }
    }

    #[test]
    fn relabeling_sites_permutes_costs(case in case(10, 10), seed in any::<u64>()) {
        let n = case.n_sites();
        let mut perm: Vec<usize> = (0..n).collect();
        // deterministic shuffle from the seed
        let mut state = seed;
        for i in (1..n).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (state >> 33) as usize % (i + 1));
        }
        let mut moved = case.clone();
        for h in 0..n {
            moved.amenity[perm[h]] = case.amenity[h];
            for g in 0..n {
                moved.dist[perm[h] * n + perm[g]] = case.dist[h * n + g];
            }
        }
        moved.placement = case.placement.iter().map(|&h| perm[h]).collect();
        let (m0, m1) = (case.model(), moved.model());
        let f0 = m0.fields(&m0.profile(case.placement.clone()).unwrap()).unwrap();
        let f1 = m1.fields(&m1.profile(moved.placement.clone()).unwrap()).unwrap();
        for j in 0..case.placement.len() {
            let (c0, c1) = (m0.cost_vector(j, &f0), m1.cost_vector(j, &f1));
            for h in 0..n {
                prop_assert!((c0[h] - c1[perm[h]]).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn moves_conserve_occupancy(case in case(10, 15), moves in prop::collection::vec((any::<prop::sample::Index>(), any::<prop::sample::Index>()), 1..30)) {
        let n = case.n_sites();
        let r = case.placement.len();
        let model = case.model();
        let mut profile = model.profile(case.placement.clone()).unwrap();
        let mut occ = OccupancyIndex::build(&profile, n);
        for (who, to) in moves {
            let j = who.index(r);
            let from = profile.site_of(j);
            occ.move_resident(&mut profile, j, from, to.index(n)).unwrap();
            prop_assert_eq!(occ.total(), r);
            prop_assert_eq!(&occ, &OccupancyIndex::build(&profile, n));
        }
    }
}

#[test]
fn moving_a_resident_from_the_wrong_site_fails() {
    let w = EndowmentProfile::from_values(vec![0.1, 0.2]).unwrap();
    let model = CostModel::new(vec![0.5, 0.5], &[0.0, 1.0, 1.0, 0.0], w, ModelParams::new(1, 0.5).unwrap()).unwrap();
    let mut profile = model.profile(vec![0, 1]).unwrap();
    let mut occ = OccupancyIndex::build(&profile, 2);
    assert!(occ.move_resident(&mut profile, 0, 1, 0).is_err());
    assert!(model.profile(vec![0, 2]).is_err());
    assert!(model.profile(vec![0]).is_err());
}
