//! Fixed inputs shared by the kernel benchmarks.

use congruence_lab::{QuaternionAlgebra, Rational};
use num_bigint::BigInt;

/// Traces with a spread of class numbers, small to moderately large.
pub const TRACES: [u64; 4] = [30, 97, 150, 200];

/// Levels used for the Gamma(N) enumeration benchmark.
pub const LEVELS: [u64; 3] = [5, 8, 12];

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// A mix of split and division algebras with small and large entries.
pub fn algebras() -> Vec<QuaternionAlgebra> {
    [(1, 1, 1, 1), (3, 1, -1, 1), (-1, 1, -1, 1), (7, 4, -5, 9), (-210, 1, 1001, 13), (2, 3, -3, 2)]
        .into_iter()
        .map(|(a, ad, b, bd)| QuaternionAlgebra::new(rat(a, ad), rat(b, bd)).expect("nonzero entries"))
        .collect()
}
