//! Deterministic random streams.
//!
//! The generator core is ChaCha12 (`rand_chacha`), a counter-based stream
//! cipher RNG with published constants, so the same seed produces the same
//! bits on every platform. All distributions are implemented here directly
//! on top of the raw 64-bit output; nothing in the draw sequence depends on
//! another crate's sampling internals.

use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

/// A self-contained random stream owned by exactly one simulation run.
#[derive(Debug, Clone)]
pub struct RngStream(ChaCha12Rng);

impl RngStream {
    /// Stream deterministically derived from a 64-bit seed (stream index 0).
    pub fn from_seed(seed: u64) -> Self {
        derive_run_stream(seed, 0)
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }
}

/// Child stream for run `run_index` of a batch seeded with `master_seed`.
///
/// Distinct run indices select distinct ChaCha streams of the same keyed
/// cipher, so children never overlap and each is reproducible on its own.
pub fn derive_run_stream(master_seed: u64, run_index: u64) -> RngStream {
    let mut rng = ChaCha12Rng::seed_from_u64(master_seed);
    rng.set_stream(run_index);
    RngStream(rng)
}

/// Uniform draw in `[0,1)` with 53 bits of precision.
#[inline]
pub fn uniform01(rng: &mut RngStream) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform integer in the closed range `[lo, hi]`.
///
/// Panics if `lo > hi`. Always consumes at least one 64-bit draw, also for
/// degenerate single-value ranges, so the draw sequence is predictable.
#[inline]
pub fn uniform_int(rng: &mut RngStream, lo: u64, hi: u64) -> u64 {
    assert!(lo <= hi, "uniform_int: lo ({lo}) > hi ({hi})");
    if lo == 0 && hi == u64::MAX {
        return rng.next_u64();
    }
    lo + uniform_below(rng, hi - lo + 1)
}

/// Unbiased integer in `[0, n)` via Lemire's widening-multiply rejection.
#[inline]
fn uniform_below(rng: &mut RngStream, n: u64) -> u64 {
    debug_assert!(n >= 1);
    let mut m = u128::from(rng.next_u64()) * u128::from(n);
    let mut low = m as u64;
    if low < n {
        let threshold = n.wrapping_neg() % n;
        while low < threshold {
            m = u128::from(rng.next_u64()) * u128::from(n);
            low = m as u64;
        }
    }
    (m >> 64) as u64
}

/// Random displacement whose length follows a half-normal distribution.
///
/// Length is `|z| * sigma` with `z` standard normal from the Box-Muller
/// cosine branch; direction is uniform on the circle. Three uniform draws
/// per call.
#[inline]
pub fn half_normal_step(rng: &mut RngStream, sigma: f64) -> (f64, f64) {
    assert!(sigma > 0.0, "half_normal_step: sigma must be > 0");
    let u1 = 1.0 - uniform01(rng); // in (0,1], keeps the log finite
    let u2 = uniform01(rng);
    let z = (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
    let len = z.abs() * sigma;
    let theta = std::f64::consts::TAU * uniform01(rng);
    (len * theta.cos(), len * theta.sin())
}

/// Fisher-Yates shuffle driven by this stream.
pub fn shuffle<T>(rng: &mut RngStream, items: &mut [T]) {
    for i in (1..items.len()).rev() {
        let j = uniform_int(rng, 0, i as u64) as usize;
        items.swap(i, j);
    }
}
