/// Derives a child seed from a base seed and a sequence of indices
/// (splitmix64 finalizer after each step).
pub fn derive_seed(seed: u64, parts: impl IntoIterator<Item = u64>) -> u64 {
    let mut h = seed;
    for p in parts {
        h = h.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_add(p);
        let mut z = h;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        h = z ^ (z >> 31);
    }
    h
}
