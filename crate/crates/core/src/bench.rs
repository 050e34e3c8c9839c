//! Empirical round counts for the min-imbalance balancing protocol.
//!
//! The protocol's worst case is quartic in the vertex count. The benchmark
//! measures actual round counts on seeded random strongly connected digraphs
//! and fits a growth exponent, so the quartic bound can be checked at desk
//! scale.

use crate::balance::{run_wbmda, BalancePolicy};
use crate::generate::{ring_with_chords, rng_from_seed};

#[derive(Clone, Debug, PartialEq)]
pub struct BenchmarkRow {
    pub n: usize,
    pub trials: usize,
    pub mean_rounds: f64,
    pub max_rounds: usize,
    /// The quartic reference bound `n^4`.
    pub bound: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchmarkReport {
    pub rows: Vec<BenchmarkRow>,
    /// Least-squares slope of `ln(mean rounds)` against `ln(n)`, when at
    /// least two sizes produced nonzero means.
    pub fitted_exponent: Option<f64>,
}

/// Runs `trials` seeded random graphs per size under the lowest-index
/// policy with unit initial weights and reports round statistics.
pub fn benchmark_rounds(sizes: &[usize], trials: usize, seed: u64) -> BenchmarkReport {
    let mut rows = Vec::new();
    for &n in sizes {
        let mut total = 0usize;
        let mut worst = 0usize;
        for trial in 0..trials {
            let trial_seed = seed
                .wrapping_mul(0x9e37_79b9_7f4a_7c15)
                .wrapping_add((n as u64) << 32)
                .wrapping_add(trial as u64);
            let mut rng = rng_from_seed(trial_seed);
            let g = ring_with_chords(n, n, &mut rng);
            let trace = run_wbmda(&g, &BalancePolicy::LowestIndex, None)
                .expect("generated graphs are strongly connected");
            assert!(trace.converged(), "benchmark run failed to converge");
            let rounds = trace.rounds();
            total += rounds;
            worst = worst.max(rounds);
        }
        rows.push(BenchmarkRow {
            n,
            trials,
            mean_rounds: total as f64 / trials.max(1) as f64,
            max_rounds: worst,
            bound: n.pow(4),
        });
    }
    let fitted_exponent = fit_exponent(&rows);
    BenchmarkReport {
        rows,
        fitted_exponent,
    }
}

fn fit_exponent(rows: &[BenchmarkRow]) -> Option<f64> {
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.mean_rounds > 0.0)
        .map(|r| ((r.n as f64).ln(), r.mean_rounds.ln()))
        .collect();
    if points.len() < 2 {
        return None;
    }
    let count = points.len() as f64;
    let sum_x: f64 = points.iter().map(|p| p.0).sum();
    let sum_y: f64 = points.iter().map(|p| p.1).sum();
    let sum_xx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sum_xy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let denominator = count * sum_xx - sum_x * sum_x;
    if denominator.abs() < 1e-12 {
        return None;
    }
    Some((count * sum_xy - sum_x * sum_y) / denominator)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn benchmark_is_deterministic_and_bounded() {
        let a = benchmark_rounds(&[4, 5, 6], 5, 0);
        let b = benchmark_rounds(&[4, 5, 6], 5, 0);
        assert_eq!(a, b);
        for row in &a.rows {
            assert!(row.max_rounds <= row.bound, "n={} exceeded n^4", row.n);
        }
    }
}
