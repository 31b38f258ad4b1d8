//! Fixtures shared by the benchmarks.

use csprk::{build_tableau, gauss_legendre, preset, CsprkScheme};

/// A preset scheme with a `k`-point Gauss rule.
pub fn scheme(name: &str, params: &[f64], k: usize) -> CsprkScheme {
    let tableau =
        build_tableau(&preset(name, params).expect("known preset")).expect("valid tableau");
    CsprkScheme::new(tableau, gauss_legendre(k).expect("node count in range"))
}
