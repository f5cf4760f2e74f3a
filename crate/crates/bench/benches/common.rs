//! Shared fixtures for the benchmarks.

use teichlab_core::geodesics::{sigma_prescribed, BlendParams};
use teichlab_core::{sigma_segment, GeodesicSegment, Modulus};

pub fn modulus() -> Modulus {
    Modulus::new(0.5).expect("0.5 is a valid modulus")
}

/// A side from `[μ]` to `[μ1]` with nonzero end derivatives.
pub fn beta(k: Modulus) -> GeodesicSegment {
    let params = BlendParams { seed: 3, ..BlendParams::default() };
    let sigma = sigma_prescribed(0.4, 0.6, k, &params).expect("admissible derivatives");
    sigma_segment(&sigma, k).expect("valid sigma")
}
