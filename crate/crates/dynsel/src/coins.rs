//! Deterministic per-element randomness.
//!
//! Every random draw an OCRS makes is keyed by `(seed, element id, stream)`
//! rather than by draw order. Replaying the same seed under a different
//! arrival order therefore reproduces the exact same sampling and subfamily
//! coins per element, which is what makes adversarial-reordering experiments
//! meaningful.

/// Stream tags for the coins an OCRS consumes.
pub const STREAM_SAMPLE: u64 = 0x53414d50; // element in R(x)?
pub const STREAM_SUBFAMILY: u64 = 0x53554246; // element in H(x)?

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// A uniform draw in [0, 1), fully determined by its key.
pub fn unit_draw(seed: u64, element: u64, stream: u64) -> f64 {
    let mixed = splitmix64(splitmix64(seed ^ splitmix64(stream)) ^ splitmix64(element));
    // take the top 53 bits for a double in [0,1)
    (mixed >> 11) as f64 / (1u64 << 53) as f64
}

/// A derived seed for nested structures (stage seeds, per-run seeds).
pub fn derive_seed(seed: u64, tag: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed ^ splitmix64(tag)) ^ index)
}
