//! Domain types shared by every other module: type identifiers, particles,
//! multiset keys, the parameter set, and the mutable world state.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::{uniform01, uniform_int, RngStream};

/// Identifier of an individual entity type. Valid values are `1..=num_types`.
pub type TypeId = u32;

/// An individual entity: a typed point particle in the unit square.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Particle {
    /// Unique within a run; never reused, copies get fresh ids.
    pub id: u64,
    pub ty: TypeId,
    pub x: f64,
    pub y: f64,
}

/// Canonical name of a higher-order entity: the non-decreasing sequence of
/// its member types. Two groups are the same higher-order entity type iff
/// their sorted type sequences are equal, regardless of particle identities
/// or positions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultisetKey(Vec<TypeId>);

impl MultisetKey {
    /// Builds a key from member types in any order.
    pub fn from_types(mut types: Vec<TypeId>) -> Self {
        debug_assert!(!types.is_empty(), "multiset key must have at least one member");
        types.sort_unstable();
        MultisetKey(types)
    }

    pub fn types(&self) -> &[TypeId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Sorted multiset of the types of a particle group.
///
/// Errors on an empty group; a higher-order entity has at least one member.
pub fn multiset_key(particles: &[Particle]) -> Result<MultisetKey, EmptyGroupError> {
    if particles.is_empty() {
        return Err(EmptyGroupError);
    }
    Ok(MultisetKey::from_types(particles.iter().map(|p| p.ty).collect()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("cannot form a multiset key from an empty particle group")]
pub struct EmptyGroupError;

/// Which fitness evaluator a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EvaluatorKind {
    /// Deterministic FNV-1a hash of the multiset key, mapped to `[0,1)`.
    Hash,
    /// Fresh uniform draw from `[0,1)` on every evaluation (control 1).
    Uniform,
    /// Fresh uniform draw from `[lo,hi)` on every evaluation (control 2).
    Biased { lo: f64, hi: f64 },
}

impl EvaluatorKind {
    /// Control 2 draws from `[0.2, 1.0)`, mean fitness 0.6.
    pub const BIASED_DEFAULT: EvaluatorKind = EvaluatorKind::Biased { lo: 0.2, hi: 1.0 };
}

/// Full model parameter set. `Params::default()` is the reference
/// configuration used by the main experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Params {
    /// Size of the possibility set of individual types.
    pub num_types: u32,
    /// Scale of the half-normal step-length distribution.
    pub move_sigma: f64,
    /// Neighborhood radius (inclusive) for group formation.
    pub neighbor_radius: f64,
    /// Per-particle, per-tick probability of resampling the type.
    pub mutation_prob: f64,
    /// Maximum local density; replication shuts off as `|N|` approaches it.
    pub max_density: u32,
    /// Modulus mapping hash values to fitness: `f = (h mod m) / m`.
    pub fitness_modulus: u64,
    /// Number of particles placed at initialization.
    pub init_pop: u32,
    /// Scheduled number of ticks per run.
    pub steps: u32,
    pub evaluator: EvaluatorKind,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            num_types: 1000,
            move_sigma: 0.15,
            neighbor_radius: 0.05,
            mutation_prob: 0.01,
            max_density: 100,
            fitness_modulus: 100_000,
            init_pop: 10,
            steps: 2000,
            evaluator: EvaluatorKind::Hash,
        }
    }
}

/// Configuration error naming the offending field.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamsError {
    #[error("num_types must be >= 1 (got {0})")]
    NumTypes(u32),
    #[error("move_sigma must be > 0 and finite (got {0})")]
    MoveSigma(f64),
    #[error("neighbor_radius must be > 0 and finite (got {0})")]
    NeighborRadius(f64),
    #[error("mutation_prob must be in [0, 1] (got {0})")]
    MutationProb(f64),
    #[error("max_density must be >= 1 (got {0})")]
    MaxDensity(u32),
    #[error("fitness_modulus must be >= 2 (got {0})")]
    FitnessModulus(u64),
    #[error("biased evaluator bounds must satisfy 0 <= lo < hi <= 1 (got lo={lo}, hi={hi})")]
    BiasedBounds { lo: f64, hi: f64 },
}

impl Params {
    pub fn validate(&self) -> Result<(), ParamsError> {
        if self.num_types < 1 {
            return Err(ParamsError::NumTypes(self.num_types));
        }
        if !(self.move_sigma > 0.0 && self.move_sigma.is_finite()) {
            return Err(ParamsError::MoveSigma(self.move_sigma));
        }
        if !(self.neighbor_radius > 0.0 && self.neighbor_radius.is_finite()) {
            return Err(ParamsError::NeighborRadius(self.neighbor_radius));
        }
        if !(0.0..=1.0).contains(&self.mutation_prob) {
            return Err(ParamsError::MutationProb(self.mutation_prob));
        }
        if self.max_density < 1 {
            return Err(ParamsError::MaxDensity(self.max_density));
        }
        if self.fitness_modulus < 2 {
            return Err(ParamsError::FitnessModulus(self.fitness_modulus));
        }
        if let EvaluatorKind::Biased { lo, hi } = self.evaluator {
            if !(0.0 <= lo && lo < hi && hi <= 1.0) {
                return Err(ParamsError::BiasedBounds { lo, hi });
            }
        }
        Ok(())
    }
}

/// The full mutable state of one simulation run.
#[derive(Debug, Clone)]
pub struct World {
    pub particles: Vec<Particle>,
    pub params: Params,
    pub tick: u32,
    pub rng: RngStream,
    next_id: u64,
}

impl World {
    /// Places `init_pop` particles of uniformly random types at uniformly
    /// random positions; the draw order is type, x, y per particle.
    pub fn init(params: Params, mut rng: RngStream) -> Result<Self, ParamsError> {
        params.validate()?;
        let mut particles = Vec::with_capacity(params.init_pop as usize);
        let mut next_id = 0u64;
        for _ in 0..params.init_pop {
            let ty = uniform_int(&mut rng, 1, u64::from(params.num_types)) as TypeId;
            let x = uniform01(&mut rng);
            let y = uniform01(&mut rng);
            particles.push(Particle { id: next_id, ty, x, y });
            next_id += 1;
        }
        Ok(World { particles, params, tick: 0, rng, next_id })
    }

    pub fn population(&self) -> usize {
        self.particles.len()
    }

    /// Next never-before-used particle id.
    pub fn fresh_id(&mut self) -> u64 {
        let id = self.next_id;
        self.next_id += 1;
        id
    }
}

/// World deterministically seeded from a single 64-bit value.
pub fn init_world(params: Params, seed: u64) -> Result<World, ParamsError> {
    World::init(params, RngStream::from_seed(seed))
}
