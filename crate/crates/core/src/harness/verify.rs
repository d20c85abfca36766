//! Quick self-check of core invariants on small instances (`run --verify`).

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cost::{affordability, upkeep, CostModel, ModelParams};
use crate::distance::compute_normalized_distances;
use crate::engine::{mwu_update, Engine, EngineConfig, MixedStrategy};
use crate::error::Result;
use crate::graph::{Node, RoadGraph};
use crate::harness::grid::{generate_grid, AmenitySpec};
use crate::instance::Instance;
use crate::population::generate_endowments;

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check {
        name,
        passed,
        detail,
    }
}

fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

fn below(rng: &mut ChaCha8Rng, n: usize) -> usize {
    (rng.next_u64() % n as u64) as usize
}

fn random_strong_graph(rng: &mut ChaCha8Rng, n: usize) -> RoadGraph {
    let nodes = (0..n)
        .map(|i| Node {
            id: format!("v{i:02}"),
            lon: 0.0,
            lat: 0.0,
        })
        .collect();
    let mut arcs = Vec::new();
    for i in 0..n {
        arcs.push((format!("v{i:02}"), format!("v{:02}", (i + 1) % n), 1.0 + 99.0 * unit(rng)));
    }
    for _ in 0..2 * n {
        let (a, b) = (below(rng, n), below(rng, n));
        arcs.push((format!("v{a:02}"), format!("v{b:02}"), 1.0 + 99.0 * unit(rng)));
    }
    RoadGraph::new(nodes, arcs).expect("valid random graph")
}

fn floyd_warshall(graph: &RoadGraph) -> Vec<f64> {
    let n = graph.node_count();
    let mut d = vec![f64::INFINITY; n * n];
    for i in 0..n {
        d[i * n + i] = 0.0;
    }
    for a in graph.arcs() {
        let k = a.tail * n + a.head;
        d[k] = d[k].min(a.length);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i * n + k] + d[k * n + j];
                if via < d[i * n + j] {
                    d[i * n + j] = via;
                }
            }
        }
    }
    d
}

fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

pub fn run_property_suite() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);

    let monotone = (1..=1000).all(|n| {
        generate_endowments(n)
            .map(|w| w.values().windows(2).all(|p| p[1] > p[0]))
            .unwrap_or(false)
    });
    checks.push(check("endowments strictly increasing", monotone, "n = 1..1000".into()));

    let mut worst = 0.0_f64;
    for _ in 0..50 {
        let n = 2 + below(&mut rng, 24);
        let g = random_strong_graph(&mut rng, n);
        let dist = compute_normalized_distances(&g)?;
        let raw = floyd_warshall(&g);
        let diam = raw.iter().copied().fold(0.0, f64::max);
        for (x, y) in dist.values().iter().zip(&raw) {
            worst = worst.max(relative_gap(*x, y / diam));
        }
    }
    checks.push(check(
        "shortest paths match Floyd-Warshall",
        worst <= 1e-12,
        format!("max relative error {worst:.2e}"),
    ));

    let (mut worst, mut annihilated) = (0.0_f64, true);
    for _ in 0..1000 {
        let n_sites = 1 + below(&mut rng, 25);
        let n_res = 1 + below(&mut rng, 25);
        let mut dist = vec![0.0; n_sites * n_sites];
        for a in 0..n_sites {
            for b in 0..n_sites {
                if a != b {
                    dist[a * n_sites + b] = 0.05 + 0.9 * unit(&mut rng);
                }
            }
        }
        let amenity = (0..n_sites).map(|_| unit(&mut rng)).collect();
        let rho = 1 + below(&mut rng, 4) as u32;
        let params = ModelParams::new(rho, unit(&mut rng))?;
        let w = generate_endowments(n_res)?;
        let model = CostModel::new(amenity, &dist, w.clone(), params)?;
        let placement = (0..n_res).map(|_| below(&mut rng, n_sites)).collect();
        let fields = model.fields(&model.profile(placement)?)?;
        let occ = fields.occupancy();
        for j in 0..n_res {
            let fast = model.cost_vector(j, &fields);
            let slow = model.cost_vector_reference(j, &fields);
            for (h, (a, b)) in fast.iter().zip(&slow).enumerate() {
                worst = worst.max((a - b).abs());
                if !(affordability(j, h, occ, &w, rho) && upkeep(h, occ)) {
                    annihilated &= *a == 1.0 && *b == 1.0;
                }
            }
        }
    }
    checks.push(check(
        "fused cost vector equals reference",
        worst <= 1e-12,
        format!("1000 instances, max abs error {worst:.2e}"),
    ));
    checks.push(check("unaffordable or empty sites cost exactly 1", annihilated, String::new()));

    let base = MixedStrategy::uniform(5);
    let costs = [0.1, 0.5, 0.9, 0.3, 0.0];
    let shifted: Vec<f64> = costs.iter().map(|c| c * 0.5 + 0.25).collect();
    let halved: Vec<f64> = costs.iter().map(|c| c * 0.5).collect();
    let a = mwu_update(&base, &shifted, 0.2);
    let b = mwu_update(&base, &halved, 0.2);
    let gap = a
        .probabilities()
        .iter()
        .zip(b.probabilities())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    checks.push(check("uniform cost shift leaves strategy unchanged", gap <= 1e-12, format!("max diff {gap:.2e}")));

    let (g, p) = generate_grid(6, 6, &AmenitySpec::Center)?;
    let instance = Instance::build(&g, &p, None)?;
    let config = EngineConfig {
        params: ModelParams::new(2, 0.5)?,
        horizon: 300,
        checkpoints: vec![100, 300],
        seed: 42,
        cce_samples_per_step: 1,
    };
    let mut engine = Engine::new(CostModel::for_instance(&instance, config.params)?, config.clone())?;
    let (mut norm_err, mut cost_ok) = (0.0_f64, true);
    while !engine.is_finished() {
        engine.step()?;
        for s in engine.strategies() {
            norm_err = norm_err.max((s.probabilities().iter().sum::<f64>() - 1.0).abs());
        }
        cost_ok &= engine.last_costs().iter().all(|c| (0.0..=1.0).contains(c));
    }
    checks.push(check("probabilities normalized", norm_err < 1e-9, format!("max |sum - 1| {norm_err:.2e}")));
    checks.push(check("costs within [0, 1]", cost_ok, String::new()));
    let residents = instance.n_residents() as f64;
    let conservation = engine
        .accumulator()
        .checkpoints()
        .iter()
        .map(|f| relative_gap(f.population.iter().sum::<f64>(), residents))
        .fold(0.0, f64::max);
    checks.push(check(
        "expected population conserved",
        conservation <= 1e-6,
        format!("max relative error {conservation:.2e}"),
    ));

    let rerun = |threads: usize| -> Result<Engine> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool");
        pool.install(|| {
            let mut e = Engine::new(CostModel::for_instance(&instance, config.params)?, config.clone())?;
            e.run()?;
            Ok(e)
        })
    };
    let one = rerun(1)?;
    let three = rerun(3)?;
    let same = one.ledger() == engine.ledger()
        && three.ledger() == engine.ledger()
        && three.accumulator() == engine.accumulator();
    checks.push(check("deterministic across runs and worker counts", same, String::new()));

    Ok(checks)
}
