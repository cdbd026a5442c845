//! Child-seed derivation.
//!
//! Every stochastic component receives its own seed computed from the master seed, a component
//! name and a list of indices, so that adding a component or reordering work never shifts the
//! random streams of the others.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stable 64-bit hash of `(master, component, indices)`.
pub fn derive_seed(master: u64, component: &str, indices: &[u64]) -> u64 {
    let mut h = splitmix64(master);
    for b in component.bytes() {
        h = splitmix64(h ^ u64::from(b));
    }
    // separator so that ("ab", []) and ("a", [b]) never collide structurally
    h = splitmix64(h ^ 0xFF);
    for &i in indices {
        h = splitmix64(h ^ i);
    }
    h
}
