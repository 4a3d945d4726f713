//! Universal fitness evaluation of multiset keys.
//!
//! The main model hashes the key with FNV-1a-64 over a fixed byte encoding
//! (each type id as 4 little-endian bytes, in sorted order, no delimiters)
//! and maps the hash to `[0,1)` as `(h mod m) / m`. The two control
//! evaluators replace the hash with a fresh random draw per call, so they
//! present no consistent landscape to adapt to.

use crate::core::{EvaluatorKind, MultisetKey, Params};
use crate::rng::{uniform01, RngStream};

pub const FNV_OFFSET_BASIS: u64 = 0xcbf2_9ce4_8422_2325;
pub const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// FNV-1a-64 of a multiset key. Pure: equal keys hash equal, bit for bit,
/// on every platform.
pub fn hash_multiset(key: &MultisetKey) -> u64 {
    debug_assert!(!key.is_empty(), "hash_multiset: empty key");
    debug_assert!(key.types().windows(2).all(|w| w[0] <= w[1]), "hash_multiset: unsorted key");
    let mut h = FNV_OFFSET_BASIS;
    for &ty in key.types() {
        for b in ty.to_le_bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(FNV_PRIME);
        }
    }
    h
}

/// A configured fitness evaluator.
///
/// The hash kind is stateless and never touches the RNG; the random kinds
/// consume one draw per evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Evaluator {
    Hash { modulus: u64 },
    Uniform,
    Biased { lo: f64, hi: f64 },
}

impl Evaluator {
    pub fn from_params(params: &Params) -> Self {
        match params.evaluator {
            EvaluatorKind::Hash => Evaluator::Hash { modulus: params.fitness_modulus },
            EvaluatorKind::Uniform => Evaluator::Uniform,
            EvaluatorKind::Biased { lo, hi } => Evaluator::Biased { lo, hi },
        }
    }

    /// Fitness of a key, in `[0,1)`.
    #[inline]
    pub fn fitness_of(&self, key: &MultisetKey, rng: &mut RngStream) -> f64 {
        match *self {
            Evaluator::Hash { modulus } => (hash_multiset(key) % modulus) as f64 / modulus as f64,
            Evaluator::Uniform => uniform01(rng),
            Evaluator::Biased { lo, hi } => lo + uniform01(rng) * (hi - lo),
        }
    }

}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{uniform_int, RngStream};

    fn key(types: &[u32]) -> MultisetKey {
        MultisetKey::from_types(types.to_vec())
    }

    // Golden values computed with an independent FNV-1a-64 reference
    // implementation over the little-endian 4-byte encoding.
    #[test]
    fn fnv_golden_values() {
        assert_eq!(hash_multiset(&key(&[1])), 0xad2a_ca77_4798_5764);
        assert_eq!(hash_multiset(&key(&[5])), 0x2d40_1a55_eec1_6520);
        assert_eq!(hash_multiset(&key(&[3, 7, 7])), 0xceaa_ad76_f03e_d976);
        assert_eq!(hash_multiset(&key(&[1, 2])), 0xc9c2_8939_c996_68c6);
        assert_eq!(hash_multiset(&key(&[1, 2, 2])), 0x5d24_633b_2bb5_4704);
        assert_eq!(hash_multiset(&key(&[1, 1, 8])), 0x7df4_5485_7edf_5a8d);
        assert_eq!(hash_multiset(&key(&[1000])), 0x2fa9_eaf8_2259_d71c);
    }

    #[test]
    fn hash_permutation_invariant() {
        assert_eq!(hash_multiset(&key(&[7, 3, 7])), hash_multiset(&key(&[3, 7, 7])));
        assert_eq!(hash_multiset(&key(&[2, 1])), hash_multiset(&key(&[1, 2])));
    }

    #[test]
    fn hash_distinguishes_multiplicity() {
        assert_ne!(hash_multiset(&key(&[1, 2])), hash_multiset(&key(&[1, 2, 2])));
    }

    #[test]
    fn random_key_pairs_no_collisions() {
        // 10^5 random distinct keys; no 64-bit collisions expected at this scale.
        let mut rng = RngStream::from_seed(77);
        let mut seen_keys = std::collections::HashSet::new();
        let mut seen_hashes = std::collections::HashSet::new();
        let mut distinct = 0;
        for _ in 0..100_000 {
            let len = uniform_int(&mut rng, 1, 12) as usize;
            let types: Vec<u32> =
                (0..len).map(|_| uniform_int(&mut rng, 1, 1000) as u32).collect();
            let k = MultisetKey::from_types(types);
            let h = hash_multiset(&k);
            if seen_keys.insert(k) {
                distinct += 1;
                assert!(seen_hashes.insert(h), "collision after {distinct} distinct keys");
            }
        }
        assert!(distinct > 90_000);
    }

    #[test]
    fn hash_fitness_modulus_mapping() {
        // f = (h mod m) / m, checked on the pinned golden hashes.
        let eval = Evaluator::Hash { modulus: 100_000 };
        let mut rng = RngStream::from_seed(0);
        // 0xad2aca7747985764 mod 100000 = 65636
        assert_eq!(eval.fitness_of(&key(&[1]), &mut rng), 0.65636);
        // h exactly divisible by m maps to 0.0
        let h = hash_multiset(&key(&[1]));
        assert_eq!((h % 100_000) as f64 / 100_000.0, 0.65636);
        assert_eq!((200_000u64 % 100_000) as f64 / 100_000.0, 0.0);
    }

    #[test]
    fn hash_fitness_deterministic_and_rng_free() {
        let eval = Evaluator::Hash { modulus: 100_000 };
        let mut rng = RngStream::from_seed(5);
        let mut probe = rng.clone();
        let k = key(&[4, 4, 9]);
        let f1 = eval.fitness_of(&k, &mut rng);
        let f2 = eval.fitness_of(&k, &mut rng);
        assert_eq!(f1.to_bits(), f2.to_bits());
        // the stream was never advanced
        assert_eq!(rng.next_u64(), probe.next_u64());
    }

    #[test]
    fn hash_fitness_uniform_per_decile() {
        let eval = Evaluator::Hash { modulus: 100_000 };
        let mut rng = RngStream::from_seed(31);
        let n = 100_000;
        let mut deciles = [0u64; 10];
        for _ in 0..n {
            let len = uniform_int(&mut rng, 1, 10) as usize;
            let types: Vec<u32> =
                (0..len).map(|_| uniform_int(&mut rng, 1, 1000) as u32).collect();
            let f = eval.fitness_of(&MultisetKey::from_types(types), &mut rng);
            assert!((0.0..1.0).contains(&f));
            deciles[(f * 10.0) as usize] += 1;
        }
        for d in deciles {
            let freq = d as f64 / n as f64;
            assert!((freq - 0.1).abs() < 0.01, "decile freq {freq}");
        }
    }

    #[test]
    fn uniform_evaluator_fresh_draws() {
        let eval = Evaluator::Uniform;
        let mut rng = RngStream::from_seed(3);
        let k = key(&[1]);
        let a = eval.fitness_of(&k, &mut rng);
        let b = eval.fitness_of(&k, &mut rng);
        assert_ne!(a, b, "random evaluator must not repeat for the same key");
    }

    #[test]
    fn biased_evaluator_range_and_mean() {
        let eval = Evaluator::Biased { lo: 0.2, hi: 1.0 };
        let mut rng = RngStream::from_seed(8);
        let n = 1_000_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let f = eval.fitness_of(&key(&[2]), &mut rng);
            assert!((0.2..1.0).contains(&f));
            sum += f;
        }
        let mean = sum / n as f64;
        assert!((mean - 0.6).abs() < 0.001, "mean {mean}");
    }
}
