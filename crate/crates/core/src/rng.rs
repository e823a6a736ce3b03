//! Counter-based deterministic randomness.
//!
//! Every random decision in the simulator is a pure function of a seed and a
//! position key, so results never depend on evaluation order.

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from `seed` and a stream/position key.
#[inline]
pub fn derive(seed: u64, key: u64) -> u64 {
    mix64(seed ^ mix64(key.wrapping_mul(0xD1B5_4A32_D192_ED03)))
}

/// Uniform sample in [0, 1) keyed by `(seed, key)`, 53-bit resolution.
#[inline]
pub fn unit(seed: u64, key: u64) -> f64 {
    (derive(seed, key) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform nonzero `width`-bit value keyed by `(seed, key)`.
pub fn nonzero_bits(seed: u64, key: u64, width: u32) -> u64 {
    let mask = if width >= 64 { u64::MAX } else { (1u64 << width) - 1 };
    let span = mask; // values 1..=mask
    1 + derive(seed, key) % span
}
