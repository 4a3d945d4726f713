//! Self-contained oracle checks, runnable from tests and from the CLI.
//!
//! Each check pits a production code path against an independent reference
//! (brute-force scan, normal-equations solver, repeated evaluation) and
//! reports a structured pass/fail with a human-readable detail line.

use std::time::Instant;

use crate::analysis::{fit_growth, GrowthModel, SamplingMode};
use crate::core::{init_world, MultisetKey, Params, Particle, World};
use crate::engine::{run, Recorder, StepOutcome};
use crate::fitness::hash_multiset;
use crate::rng::{uniform01, uniform_int, RngStream};
use crate::spatial::{build_index, brute_force_neighbors, neighbors_within, GridIndex};

/// Outcome of one oracle check.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn pass(name: &'static str, detail: String) -> Self {
        CheckOutcome { name, passed: true, detail }
    }
    fn fail(name: &'static str, detail: String) -> Self {
        CheckOutcome { name, passed: false, detail }
    }
}

fn random_world(rng: &mut RngStream, max_particles: u64, radius: f64) -> World {
    let params =
        Params { init_pop: 0, neighbor_radius: radius, ..Params::default() };
    let mut world = init_world(params, 0).expect("valid test params");
    let n = uniform_int(rng, 0, max_particles);
    for i in 0..n {
        world.particles.push(Particle {
            id: i,
            ty: uniform_int(rng, 1, 1000) as u32,
            x: uniform01(rng),
            y: uniform01(rng),
        });
    }
    world
}

/// Grid query vs. brute-force scan on randomized worlds.
pub fn grid_oracle(cases: usize, seed: u64) -> CheckOutcome {
    grid_oracle_with(cases, seed, &neighbors_within)
}

/// Same check with a pluggable query, so tests can inject a faulty one and
/// confirm the oracle notices.
pub fn grid_oracle_with(
    cases: usize,
    seed: u64,
    query: &dyn Fn(&GridIndex, &World, (f64, f64), f64) -> Vec<u64>,
) -> CheckOutcome {
    let started = Instant::now();
    let mut rng = RngStream::from_seed(seed);
    let mut queries = 0usize;
    for case in 0..cases {
        let radius = [0.05, 0.03, 0.11][case % 3];
        let world = random_world(&mut rng, 500, radius);
        let index = build_index(&world);
        for q in 0..5 {
            let center = if q == 0 && !world.particles.is_empty() {
                (world.particles[0].x, world.particles[0].y)
            } else {
                (uniform01(&mut rng), uniform01(&mut rng))
            };
            let mut fast = query(&index, &world, center, radius);
            let mut slow = brute_force_neighbors(&world, center, radius);
            fast.sort_unstable();
            slow.sort_unstable();
            queries += 1;
            if fast != slow {
                return CheckOutcome::fail(
                    "grid-vs-brute-force",
                    format!(
                        "mismatch in case {case} at center {center:?} (radius {radius}): \
                         grid {} ids vs scan {} ids",
                        fast.len(),
                        slow.len()
                    ),
                );
            }
        }
    }
    CheckOutcome::pass(
        "grid-vs-brute-force",
        format!("{cases} worlds, {queries} queries agree in {:.2?}", started.elapsed()),
    )
}

/// Independent simple-regression reference: raw normal equations solved by
/// Cramer's rule, no mean-centering.
pub fn normal_equations_fit(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let det = n * sxx - sx * sx;
    let a = (n * sxy - sx * sy) / det;
    let b = (sxx * sy - sx * sxy) / det;
    (a, b)
}

/// OLS fitter vs. the normal-equations reference on noisy data.
pub fn ols_oracle(seed: u64) -> CheckOutcome {
    let mut rng = RngStream::from_seed(seed);
    for trial in 0..20 {
        let true_a = uniform01(&mut rng) * 10.0 - 5.0;
        let true_b = uniform01(&mut rng) * 6.0 - 3.0;
        let series: Vec<Option<f64>> = (1..=2000)
            .map(|t| {
                let x = f64::from(t).ln();
                Some(true_a * x + true_b + (uniform01(&mut rng) - 0.5) * 0.4)
            })
            .collect();
        let fit = match fit_growth(
            &series,
            100,
            2000,
            GrowthModel::Unbounded,
            SamplingMode::UniformTicks,
        ) {
            Ok(f) => f,
            Err(e) => return CheckOutcome::fail("ols-vs-normal-equations", e.to_string()),
        };
        let points: Vec<(f64, f64)> = (100..=2000u32)
            .map(|t| (f64::from(t).ln(), series[(t - 1) as usize].unwrap()))
            .collect();
        let (ref_a, ref_b) = normal_equations_fit(&points);
        if (fit.a - ref_a).abs() > 1e-8 || (fit.b - ref_b).abs() > 1e-8 {
            return CheckOutcome::fail(
                "ols-vs-normal-equations",
                format!(
                    "trial {trial}: fit (a={}, b={}) vs reference (a={ref_a}, b={ref_b})",
                    fit.a, fit.b
                ),
            );
        }
    }
    CheckOutcome::pass("ols-vs-normal-equations", "20 noisy fits agree within 1e-8".into())
}

/// Hash evaluator purity: permutation invariance and call-to-call
/// determinism over random multisets.
pub fn hash_oracle(samples: usize, seed: u64) -> CheckOutcome {
    let mut rng = RngStream::from_seed(seed);
    for _ in 0..samples {
        let len = uniform_int(&mut rng, 1, 16) as usize;
        let mut types: Vec<u32> =
            (0..len).map(|_| uniform_int(&mut rng, 1, 1000) as u32).collect();
        let key = MultisetKey::from_types(types.clone());
        let h1 = hash_multiset(&key);
        let h2 = hash_multiset(&key);
        crate::rng::shuffle(&mut rng, &mut types);
        let h3 = hash_multiset(&MultisetKey::from_types(types));
        if h1 != h2 || h1 != h3 {
            return CheckOutcome::fail(
                "hash-determinism",
                format!("key {:?}: {h1:#x} vs {h2:#x} vs {h3:#x}", key.types()),
            );
        }
    }
    CheckOutcome::pass("hash-determinism", format!("{samples} random multisets stable"))
}

struct ConservationCheck {
    population: i64,
    violations: usize,
    ticks: usize,
}

impl Recorder for ConservationCheck {
    fn on_init(&mut self, world: &World) {
        self.population = world.population() as i64;
    }
    fn on_step(&mut self, _world: &World, outcome: &StepOutcome) {
        self.population += outcome.replicated_individuals() as i64 - outcome.deaths as i64;
        self.ticks += 1;
        if self.population != outcome.population as i64 {
            self.violations += 1;
        }
    }
}

/// Population bookkeeping identity across full runs of every evaluator kind.
pub fn conservation_oracle(seed: u64, steps: u32) -> CheckOutcome {
    use crate::core::EvaluatorKind;
    let mut total_ticks = 0;
    for (offset, kind) in
        [EvaluatorKind::Hash, EvaluatorKind::Uniform, EvaluatorKind::BIASED_DEFAULT]
            .into_iter()
            .enumerate()
    {
        let params = Params { steps, evaluator: kind, ..Params::default() };
        let mut check = ConservationCheck { population: 0, violations: 0, ticks: 0 };
        if let Err(e) = run(&params, seed + offset as u64, &mut check) {
            return CheckOutcome::fail("conservation-identity", e.to_string());
        }
        if check.violations > 0 {
            return CheckOutcome::fail(
                "conservation-identity",
                format!("{} violations in {} ticks ({kind:?})", check.violations, check.ticks),
            );
        }
        total_ticks += check.ticks;
    }
    CheckOutcome::pass(
        "conservation-identity",
        format!("population delta = replications - deaths over {total_ticks} ticks"),
    )
}

/// Runs every oracle at its standard size.
pub fn run_all() -> Vec<CheckOutcome> {
    vec![
        grid_oracle(1000, 61_803),
        ols_oracle(27_182),
        hash_oracle(100_000, 31_415),
        conservation_oracle(14_142, 250),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_oracles_pass() {
        for outcome in run_all() {
            assert!(outcome.passed, "{}: {}", outcome.name, outcome.detail);
        }
    }

    #[test]
    fn grid_oracle_within_time_budget() {
        let started = Instant::now();
        let outcome = grid_oracle(1000, 1);
        assert!(outcome.passed, "{}", outcome.detail);
        assert!(started.elapsed().as_secs() < 10, "oracle too slow: {:?}", started.elapsed());
    }

    #[test]
    fn injected_grid_fault_is_reported() {
        // Negative control: a query that drops one id must be caught.
        let faulty = |index: &GridIndex, world: &World, center: (f64, f64), radius: f64| {
            let mut ids = neighbors_within(index, world, center, radius);
            ids.pop();
            ids
        };
        let outcome = grid_oracle_with(50, 2, &faulty);
        assert!(!outcome.passed, "fault went unnoticed");
    }

    #[test]
    fn normal_equations_reference_is_sane() {
        // y = 2x + 1 exactly
        let points: Vec<(f64, f64)> = (0..100).map(|i| {
            let x = f64::from(i) * 0.1;
            (x, 2.0 * x + 1.0)
        }).collect();
        let (a, b) = normal_equations_fit(&points);
        assert!((a - 2.0).abs() < 1e-12);
        assert!((b - 1.0).abs() < 1e-12);
    }
}
