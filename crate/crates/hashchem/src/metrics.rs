//! Per-tick statistics and cumulative novelty registries.
//!
//! The individual-type registry counts every type that has ever been
//! instantiated; the higher-order registry counts every multiset key that
//! has ever replicated successfully, including singletons.

use std::collections::HashSet;

use serde::Serialize;

use crate::core::{MultisetKey, TypeId, World};
use crate::engine::{Recorder, StepOutcome};

/// One CSV row worth of per-tick metrics. Event aggregates are absent on
/// ticks without any replication.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRecord {
    pub tick: u32,
    pub population: usize,
    /// Total individuals copied this tick (sum of event sizes).
    pub replicated_individuals: usize,
    pub max_event_fitness: Option<f64>,
    /// Mean fitness of the individuals replicated this tick; each carries
    /// the fitness of the event that copied it.
    pub mean_event_fitness: Option<f64>,
    pub max_event_size: Option<usize>,
    /// Mean group size per replication event.
    pub mean_event_size: Option<f64>,
    pub cum_unique_individual_types: usize,
    pub cum_unique_higher_order_types: usize,
}

/// Insert-only registries backing the cumulative novelty counters.
#[derive(Debug, Clone)]
pub struct NoveltyRegistry {
    seen_individual: Vec<bool>,
    individual_count: usize,
    num_types: usize,
    seen_higher_order: HashSet<MultisetKey>,
}

impl NoveltyRegistry {
    pub fn new(num_types: u32) -> Self {
        NoveltyRegistry {
            seen_individual: vec![false; num_types as usize + 1],
            individual_count: 0,
            num_types: num_types as usize,
            seen_higher_order: HashSet::new(),
        }
    }

    pub fn absorb_individual(&mut self, ty: TypeId) {
        let slot = &mut self.seen_individual[ty as usize];
        if !*slot {
            *slot = true;
            self.individual_count += 1;
        }
    }

    pub fn absorb_key(&mut self, key: &MultisetKey) {
        if !self.seen_higher_order.contains(key) {
            self.seen_higher_order.insert(key.clone());
        }
    }

    pub fn individual_types(&self) -> usize {
        self.individual_count
    }

    pub fn higher_order_types(&self) -> usize {
        self.seen_higher_order.len()
    }

    fn saturated(&self) -> bool {
        self.individual_count == self.num_types
    }
}

/// Folds one step outcome into the registries and emits the tick's record.
///
/// The individual registry absorbs every type currently alive (mutation is
/// the last type-changing phase, so an end-of-tick scan sees every type
/// that appeared during the tick); the higher-order registry absorbs the
/// key of every replication event.
pub fn record_step(
    registry: &mut NoveltyRegistry,
    outcome: &StepOutcome,
    world: &World,
) -> StepRecord {
    if !registry.saturated() {
        for p in &world.particles {
            registry.absorb_individual(p.ty);
        }
    }
    for event in &outcome.replication_events {
        registry.absorb_key(&event.key);
    }

    let events = &outcome.replication_events;
    let (max_f, mean_f, max_size, mean_size) = if events.is_empty() {
        (None, None, None, None)
    } else {
        let n = events.len() as f64;
        let total_size: usize = events.iter().map(|e| e.size).sum();
        let max_f = events.iter().map(|e| e.fitness).fold(f64::MIN, f64::max);
        // Fitness is averaged over replicated individuals, each carrying
        // its event's fitness; sizes are averaged per event.
        let mean_f = events.iter().map(|e| e.fitness * e.size as f64).sum::<f64>()
            / total_size as f64;
        let max_size = events.iter().map(|e| e.size).max().unwrap();
        let mean_size = total_size as f64 / n;
        (Some(max_f), Some(mean_f), Some(max_size), Some(mean_size))
    };

    StepRecord {
        tick: outcome.tick,
        population: outcome.population,
        replicated_individuals: outcome.replicated_individuals(),
        max_event_fitness: max_f,
        mean_event_fitness: mean_f,
        max_event_size: max_size,
        mean_event_size: mean_size,
        cum_unique_individual_types: registry.individual_types(),
        cum_unique_higher_order_types: registry.higher_order_types(),
    }
}

/// Recorder that accumulates a full per-tick record log for one run.
#[derive(Debug)]
pub struct StepLog {
    registry: NoveltyRegistry,
    pub records: Vec<StepRecord>,
}

impl StepLog {
    pub fn new(num_types: u32) -> Self {
        StepLog { registry: NoveltyRegistry::new(num_types), records: Vec::new() }
    }
}

impl Recorder for StepLog {
    fn on_init(&mut self, world: &World) {
        for p in &world.particles {
            self.registry.absorb_individual(p.ty);
        }
    }

    fn on_step(&mut self, world: &World, outcome: &StepOutcome) {
        let record = record_step(&mut self.registry, outcome, world);
        debug_assert_eq!(record.tick as usize, self.records.len() + 1);
        self.records.push(record);
    }
}

/// Per-tick maximum fitness among replication events; `None` on ticks
/// without events.
pub fn max_replicated_fitness(records: &[StepRecord]) -> Vec<Option<f64>> {
    records.iter().map(|r| r.max_event_fitness).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{init_world, Params};
    use crate::engine::ReplicationEvent;

    fn outcome_with_events(tick: u32, population: usize, events: Vec<(Vec<u32>, f64)>) -> StepOutcome {
        StepOutcome {
            tick,
            population,
            replication_events: events
                .into_iter()
                .map(|(types, fitness)| ReplicationEvent {
                    tick,
                    size: types.len(),
                    key: MultisetKey::from_types(types),
                    fitness,
                })
                .collect(),
            deaths: 0,
            mutations: 0,
        }
    }

    fn test_world(types: &[u32]) -> World {
        let params = Params { init_pop: 0, ..Params::default() };
        let mut world = init_world(params, 0).unwrap();
        for &ty in types {
            let id = world.fresh_id();
            world.particles.push(crate::core::Particle { id, ty, x: 0.5, y: 0.5 });
        }
        world
    }

    #[test]
    fn tick_without_events_has_absent_aggregates() {
        let mut registry = NoveltyRegistry::new(1000);
        let world = test_world(&[4, 4]);
        let record = record_step(&mut registry, &outcome_with_events(1, 2, vec![]), &world);
        assert_eq!(record.max_event_fitness, None);
        assert_eq!(record.mean_event_fitness, None);
        assert_eq!(record.max_event_size, None);
        assert_eq!(record.mean_event_size, None);
        assert_eq!(record.cum_unique_higher_order_types, 0);
        assert_eq!(record.cum_unique_individual_types, 1);
    }

    #[test]
    fn event_aggregates_arithmetic() {
        let mut registry = NoveltyRegistry::new(1000);
        let world = test_world(&[1]);
        let events = vec![(vec![1], 0.5), (vec![1, 2, 3], 0.9), (vec![2, 2], 0.7)];
        let record = record_step(&mut registry, &outcome_with_events(1, 7, events), &world);
        assert_eq!(record.replicated_individuals, 6);
        assert_eq!(record.max_event_size, Some(3));
        assert_eq!(record.mean_event_size, Some(2.0));
        assert_eq!(record.max_event_fitness, Some(0.9));
        // individual-weighted: (0.5*1 + 0.9*3 + 0.7*2) / 6
        assert!((record.mean_event_fitness.unwrap() - 4.6 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn singleton_and_pair_are_distinct_higher_order_types() {
        let mut registry = NoveltyRegistry::new(1000);
        let world = test_world(&[5]);
        let events = vec![(vec![5], 0.8), (vec![5, 5], 0.6)];
        let record = record_step(&mut registry, &outcome_with_events(1, 3, events), &world);
        assert_eq!(record.cum_unique_higher_order_types, 2);
        assert_eq!(record.cum_unique_individual_types, 1);
    }

    #[test]
    fn counters_monotone_and_saturating() {
        let params = Params { steps: 400, ..Params::default() };
        let mut log = StepLog::new(params.num_types);
        crate::engine::run(&params, 17, &mut log).unwrap();
        let mut prev_ind = 0;
        let mut prev_ho = 0;
        for record in &log.records {
            assert!(record.cum_unique_individual_types >= prev_ind);
            assert!(record.cum_unique_higher_order_types >= prev_ho);
            assert!(record.cum_unique_individual_types <= 1000);
            prev_ind = record.cum_unique_individual_types;
            prev_ho = record.cum_unique_higher_order_types;
        }
    }

    #[test]
    fn registry_counts_repeat_keys_once() {
        let mut registry = NoveltyRegistry::new(10);
        let key = MultisetKey::from_types(vec![1, 2]);
        registry.absorb_key(&key);
        registry.absorb_key(&key);
        registry.absorb_key(&MultisetKey::from_types(vec![2, 1]));
        assert_eq!(registry.higher_order_types(), 1);
    }

    #[test]
    fn max_replicated_fitness_series() {
        let mut registry = NoveltyRegistry::new(10);
        let world = test_world(&[1]);
        let r1 = record_step(&mut registry, &outcome_with_events(1, 1, vec![(vec![1], 0.9)]), &world);
        let r2 = record_step(&mut registry, &outcome_with_events(2, 1, vec![]), &world);
        let series = max_replicated_fitness(&[r1, r2]);
        assert_eq!(series, vec![Some(0.9), None]);
    }
}
