//! The per-tick update rule and the run loop.
//!
//! Each tick executes four phases in order:
//! 1. movement: every particle takes a half-normal random step, clamped to
//!    the unit square (cut-off boundaries);
//! 2. interaction: for each particle present at the start of the phase and
//!    still alive, sample a random group from its neighborhood and let the
//!    group die or replicate as a unit based on its fitness;
//! 3. mutation: each survivor resamples its type with a small probability;
//! 4. shuffle: randomize the particle presentation order.
//!
//! Groups deleted mid-phase stop acting as focal points; offspring created
//! mid-phase are not focal points this tick but are immediately visible to
//! later neighborhood queries.

use crate::core::{MultisetKey, Params, ParamsError, Particle, TypeId, World};
use crate::fitness::Evaluator;
use crate::rng::{half_normal_step, shuffle, uniform01, uniform_int, RngStream};
use crate::spatial::GridIndex;

/// One successful group replication.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationEvent {
    pub tick: u32,
    pub key: MultisetKey,
    /// Number of individuals copied (= key length).
    pub size: usize,
    pub fitness: f64,
}

/// What one tick did to the world.
#[derive(Debug, Clone, Default)]
pub struct StepOutcome {
    pub tick: u32,
    /// Population after the tick completed.
    pub population: usize,
    pub replication_events: Vec<ReplicationEvent>,
    /// Particles removed by group deaths.
    pub deaths: usize,
    /// Particles whose type was resampled.
    pub mutations: usize,
}

impl StepOutcome {
    /// Total individuals copied this tick.
    pub fn replicated_individuals(&self) -> usize {
        self.replication_events.iter().map(|e| e.size).sum()
    }
}

/// Reusable per-step buffers.
#[derive(Debug, Default)]
pub struct StepScratch {
    alive: Vec<bool>,
    neighbors: Vec<u32>,
    group_types: Vec<TypeId>,
}

/// Advances the world by one tick.
///
/// `index` must have cell size equal to `params.neighbor_radius`; it is
/// rebuilt from the post-movement positions and kept consistent through
/// the interaction phase. A step on an extinct world is a no-op.
pub fn step(
    world: &mut World,
    evaluator: &Evaluator,
    index: &mut GridIndex,
    scratch: &mut StepScratch,
) -> StepOutcome {
    let step_tick = world.tick + 1;
    if world.particles.is_empty() {
        world.tick = step_tick;
        return StepOutcome { tick: step_tick, ..StepOutcome::default() };
    }
    let params = world.params.clone();

    // Phase 1: movement with cut-off boundaries.
    for p in &mut world.particles {
        let (dx, dy) = half_normal_step(&mut world.rng, params.move_sigma);
        p.x = (p.x + dx).clamp(0.0, 1.0);
        p.y = (p.y + dy).clamp(0.0, 1.0);
    }
    index.rebuild(&world.particles);

    // Phase 2: group formation, death, replication.
    let phase_start = world.particles.len();
    scratch.alive.clear();
    scratch.alive.resize(phase_start, true);
    let mut events = Vec::new();
    let mut deaths = 0usize;
    let radius = params.neighbor_radius;
    for focal in 0..phase_start {
        if !scratch.alive[focal] {
            continue;
        }
        let center = (world.particles[focal].x, world.particles[focal].y);
        index.query_into(&world.particles, center, radius, &mut scratch.neighbors);
        let neighborhood = scratch.neighbors.len();
        debug_assert!(neighborhood >= 1, "focal particle is its own neighbor");

        // Uniform group size, then a uniform size-k subset by partial
        // Fisher-Yates over the neighbor list.
        let k = uniform_int(&mut world.rng, 1, neighborhood as u64) as usize;
        for i in 0..k {
            let j = uniform_int(&mut world.rng, i as u64, (neighborhood - 1) as u64) as usize;
            scratch.neighbors.swap(i, j);
        }

        // Evaluate with probability 1/|s|, standardizing the per-entity
        // update rate.
        if uniform01(&mut world.rng) >= 1.0 / k as f64 {
            continue;
        }

        let group = &scratch.neighbors[..k];
        scratch.group_types.clear();
        scratch.group_types.extend(group.iter().map(|&i| world.particles[i as usize].ty));
        let key = MultisetKey::from_types(scratch.group_types.clone());
        let fitness = evaluator.fitness_of(&key, &mut world.rng);

        if uniform01(&mut world.rng) < 1.0 - fitness {
            // Death: the whole group leaves the space.
            for &i in group {
                scratch.alive[i as usize] = false;
                let p = &world.particles[i as usize];
                index.remove(i, p.x, p.y);
            }
            deaths += k;
        } else {
            // Survived; replicate against the local density headroom.
            let headroom = 1.0 - neighborhood as f64 / f64::from(params.max_density);
            if uniform01(&mut world.rng) < headroom.clamp(0.0, 1.0) {
                for gi in 0..k {
                    let parent = world.particles[scratch.neighbors[gi] as usize];
                    let id = world.fresh_id();
                    let child_index = world.particles.len() as u32;
                    world.particles.push(Particle { id, ..parent });
                    scratch.alive.push(true);
                    index.insert(child_index, parent.x, parent.y);
                }
                events.push(ReplicationEvent { tick: step_tick, key, size: k, fitness });
            }
        }
    }

    // Drop deleted particles, preserving order.
    let mut cursor = 0;
    world.particles.retain(|_| {
        let keep = scratch.alive[cursor];
        cursor += 1;
        keep
    });

    // Phase 3: mutation. Resampling may pick the current type again.
    let mut mutations = 0usize;
    for p in &mut world.particles {
        if uniform01(&mut world.rng) < params.mutation_prob {
            p.ty = uniform_int(&mut world.rng, 1, u64::from(params.num_types)) as TypeId;
            mutations += 1;
        }
    }

    // Phase 4: randomize presentation order.
    shuffle(&mut world.rng, &mut world.particles);
    world.tick = step_tick;

    StepOutcome {
        tick: step_tick,
        population: world.particles.len(),
        replication_events: events,
        deaths,
        mutations,
    }
}

/// Observer of a run; receives the initial world and every step outcome.
pub trait Recorder {
    fn on_init(&mut self, _world: &World) {}
    fn on_step(&mut self, _world: &World, _outcome: &StepOutcome) {}
}

/// Recorder that ignores everything.
pub struct NullRecorder;
impl Recorder for NullRecorder {}

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunSummary {
    /// True iff the population was zero at the end of any tick (or at init).
    pub extinct: bool,
    pub extinction_tick: Option<u32>,
    /// Ticks actually executed.
    pub ticks_run: u32,
}

/// Runs a world seeded from `stream` for `params.steps` ticks or until
/// extinction, feeding every outcome to the recorder.
pub fn run_stream<R: Recorder>(
    params: &Params,
    stream: RngStream,
    recorder: &mut R,
) -> Result<RunSummary, ParamsError> {
    let mut world = World::init(params.clone(), stream)?;
    recorder.on_init(&world);
    if world.particles.is_empty() {
        return Ok(RunSummary { extinct: true, extinction_tick: Some(0), ticks_run: 0 });
    }
    let evaluator = Evaluator::from_params(params);
    let mut index = GridIndex::new(params.neighbor_radius);
    let mut scratch = StepScratch::default();
    let mut ticks_run = 0;
    while world.tick < params.steps {
        let before = world.particles.len();
        let outcome = step(&mut world, &evaluator, &mut index, &mut scratch);
        ticks_run += 1;
        debug_assert_eq!(
            outcome.population as i64,
            before as i64 + outcome.replicated_individuals() as i64 - outcome.deaths as i64,
            "population bookkeeping broke at tick {}",
            outcome.tick
        );
        let population = outcome.population;
        recorder.on_step(&world, &outcome);
        if population == 0 {
            return Ok(RunSummary {
                extinct: true,
                extinction_tick: Some(world.tick),
                ticks_run,
            });
        }
    }
    Ok(RunSummary { extinct: false, extinction_tick: None, ticks_run })
}

/// [`run_stream`] with the stream derived from a plain 64-bit seed.
pub fn run<R: Recorder>(
    params: &Params,
    seed: u64,
    recorder: &mut R,
) -> Result<RunSummary, ParamsError> {
    run_stream(params, RngStream::from_seed(seed), recorder)
}
