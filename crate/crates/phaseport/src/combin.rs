//! Exact small-integer combinatorics shared by the evolution and oracle paths.
//!
//! Everything here stays in the regime where `u128` arithmetic is exact
//! (factorials up to 34!, binomials far beyond the photon caps used in this
//! crate), so the `f64` conversions below are correctly rounded.

/// n! as an `f64`, computed from exact integer arithmetic.
///
/// Panics if `n > 34` (beyond `u128` exactness, and far beyond any photon
/// count this crate accepts).
pub(crate) fn factorial(n: usize) -> f64 {
    assert!(n <= 34, "factorial({n}) exceeds the exact integer range");
    let mut acc: u128 = 1;
    for k in 2..=n as u128 {
        acc *= k;
    }
    acc as f64
}

/// Binomial coefficient C(n, k) as an `f64`, exact for the sizes used here.
pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as f64
}
