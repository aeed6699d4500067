//! Deterministic seed derivation.
//!
//! A single master seed expands into independent per-component seeds so that
//! multi-seed experiments are exactly replicable from one number.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

/// Derives a component seed from a master seed and a label.
pub fn derive_seed(master: u64, label: &str) -> u64 {
    let mut h = 0xcbf29ce484222325u64; // FNV-1a
    for b in label.as_bytes() {
        h = (h ^ u64::from(*b)).wrapping_mul(0x100000001b3);
    }
    splitmix64(master ^ h)
}

/// Derives a seed for replicate `index` of a labeled component.
pub fn derive_seed_indexed(master: u64, label: &str, index: u64) -> u64 {
    splitmix64(derive_seed(master, label) ^ splitmix64(index))
}

/// Seeded, platform-stable RNG used everywhere randomness is needed.
pub fn rng_from_seed(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivation_is_stable_and_label_sensitive() {
        let a = derive_seed(7, "esn");
        let b = derive_seed(7, "esn");
        let c = derive_seed(7, "mlp");
        let d = derive_seed(8, "esn");
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
        assert_ne!(derive_seed_indexed(7, "rep", 0), derive_seed_indexed(7, "rep", 1));
    }
}
