//! Fixed-radius neighbor queries on the unit square.
//!
//! A uniform grid with cell size equal to the query radius, so any query
//! inspects at most a 3x3 block of cells. The index stores particle indices
//! into the world's particle vector and is rebuilt after each movement
//! phase, then patched incrementally as particles die or appear.

use crate::core::{Particle, World};

/// Uniform bucket grid over `[0,1]^2`.
#[derive(Debug, Clone)]
pub struct GridIndex {
    cell_size: f64,
    cells_per_axis: usize,
    buckets: Vec<Vec<u32>>,
}

impl GridIndex {
    pub fn new(cell_size: f64) -> Self {
        assert!(cell_size > 0.0 && cell_size.is_finite());
        let cells_per_axis = ((1.0 / cell_size).ceil() as usize).max(1);
        GridIndex {
            cell_size,
            cells_per_axis,
            buckets: vec![Vec::new(); cells_per_axis * cells_per_axis],
        }
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    /// Cell coordinate along one axis; positions exactly on the far
    /// boundary fold into the last cell.
    #[inline]
    fn axis_cell(&self, coord: f64) -> usize {
        ((coord / self.cell_size) as usize).min(self.cells_per_axis - 1)
    }

    #[inline]
    fn bucket_of(&self, x: f64, y: f64) -> usize {
        self.axis_cell(y) * self.cells_per_axis + self.axis_cell(x)
    }

    /// Grid cell coordinates of a position, as (col, row).
    pub fn cell_coords(&self, x: f64, y: f64) -> (usize, usize) {
        (self.axis_cell(x), self.axis_cell(y))
    }

    /// Drops all entries and re-inserts every particle in index order.
    pub fn rebuild(&mut self, particles: &[Particle]) {
        for bucket in &mut self.buckets {
            bucket.clear();
        }
        for (i, p) in particles.iter().enumerate() {
            let b = self.bucket_of(p.x, p.y);
            self.buckets[b].push(i as u32);
        }
    }

    pub fn insert(&mut self, index: u32, x: f64, y: f64) {
        let b = self.bucket_of(x, y);
        self.buckets[b].push(index);
    }

    /// Removes one particle; its position must be the one it was inserted at.
    pub fn remove(&mut self, index: u32, x: f64, y: f64) {
        let b = self.bucket_of(x, y);
        let bucket = &mut self.buckets[b];
        let pos = bucket
            .iter()
            .position(|&i| i == index)
            .expect("grid remove: particle not present in its bucket");
        bucket.swap_remove(pos);
    }

    /// Collects indices of all particles within `radius` (inclusive) of
    /// `center` into `out`, and returns the number of buckets inspected.
    ///
    /// `radius` must equal the grid's cell size or candidates outside the
    /// 3x3 block would be missed.
    pub fn query_into(
        &self,
        particles: &[Particle],
        center: (f64, f64),
        radius: f64,
        out: &mut Vec<u32>,
    ) -> usize {
        debug_assert!(radius <= self.cell_size);
        out.clear();
        let r2 = radius * radius;
        let (cx, cy) = (self.axis_cell(center.0), self.axis_cell(center.1));
        let x_range = cx.saturating_sub(1)..=(cx + 1).min(self.cells_per_axis - 1);
        let y_range = cy.saturating_sub(1)..=(cy + 1).min(self.cells_per_axis - 1);
        let mut inspected = 0;
        for gy in y_range {
            for gx in x_range.clone() {
                inspected += 1;
                for &i in &self.buckets[gy * self.cells_per_axis + gx] {
                    let p = &particles[i as usize];
                    let dx = p.x - center.0;
                    let dy = p.y - center.1;
                    if dx * dx + dy * dy <= r2 {
                        out.push(i);
                    }
                }
            }
        }
        inspected
    }
}

/// Grid index over the world's current particle positions, with cell size
/// equal to the world's neighborhood radius.
pub fn build_index(world: &World) -> GridIndex {
    let mut index = GridIndex::new(world.params.neighbor_radius);
    index.rebuild(&world.particles);
    index
}

/// Ids of all particles within `radius` (inclusive) of `center`.
///
/// A particle whose position equals `center` is its own neighbor.
pub fn neighbors_within(
    index: &GridIndex,
    world: &World,
    center: (f64, f64),
    radius: f64,
) -> Vec<u64> {
    let mut indices = Vec::new();
    index.query_into(&world.particles, center, radius, &mut indices);
    indices.iter().map(|&i| world.particles[i as usize].id).collect()
}

/// Reference oracle: full scan over every particle.
pub fn brute_force_neighbors(world: &World, center: (f64, f64), radius: f64) -> Vec<u64> {
    let r2 = radius * radius;
    world
        .particles
        .iter()
        .filter(|p| {
            let dx = p.x - center.0;
            let dy = p.y - center.1;
            dx * dx + dy * dy <= r2
        })
        .map(|p| p.id)
        .collect()
}
