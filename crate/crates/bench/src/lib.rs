//! Workloads shared by the benchmarks.

use polydist_core::{CMatrix, Complex64, MatrixPolynomial, Problem, TargetSet, WeightSet};

/// Deterministic dense polynomial of size `n`, degree `m`, with `k` targets on a
/// small circle. Entries come from a fixed linear congruential sequence so the
/// workload does not depend on an RNG crate.
pub fn workload(n: usize, m: usize, k: usize) -> Problem {
    let mut state: u64 = 0x9e37_79b9_7f4a_7c15 ^ ((n * 131 + m * 17 + k) as u64);
    let mut next = move || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    };
    let coeffs: Vec<CMatrix> = (0..=m)
        .map(|j| {
            let mut a = CMatrix::from_fn(n, n, |_, _| Complex64::new(next(), next()));
            if j == m {
                for i in 0..n {
                    a[(i, i)] += Complex64::new(n as f64, 0.0);
                }
            }
            a
        })
        .collect();
    let p = MatrixPolynomial::new(coeffs).expect("diagonally dominant leading coefficient");
    let targets = TargetSet::new(
        (0..k)
            .map(|i| Complex64::from_polar(0.5, 2.0 * std::f64::consts::PI * i as f64 / k as f64 + 0.3))
            .collect(),
    )
    .expect("distinct targets");
    let w = WeightSet::coefficient_norms(&p).expect("nonzero constant coefficient");
    Problem::new(p, targets, w).expect("consistent workload")
}
