#![allow(dead_code)]

use sdd1_core::generate::{generate_b1, generate_sdd1};
use sdd1_core::io::read_matrix_market;
use sdd1_core::DenseMatrix;

pub fn fixture(name: &str) -> DenseMatrix {
    let path = format!("{}/fixtures/{name}.mtx", env!("CARGO_MANIFEST_DIR"));
    read_matrix_market(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

/// `(n, seed, n1_fraction)` for instance `k` of a seeded ensemble.
pub fn ensemble_params(k: usize, base_seed: u64) -> (usize, u64, f64) {
    let n = 4 + k % 9;
    let fraction = 0.3 + 0.4 * ((k * 37) % 100) as f64 / 100.0;
    (n, base_seed + k as u64, fraction)
}

pub fn sdd1_ensemble(count: usize) -> Vec<DenseMatrix> {
    (0..count)
        .map(|k| {
            let (n, seed, f) = ensemble_params(k, 1_000);
            generate_sdd1(n, seed, f).expect("generator")
        })
        .collect()
}

pub fn b1_ensemble(count: usize) -> Vec<DenseMatrix> {
    (0..count)
        .map(|k| {
            let (n, seed, f) = ensemble_params(k, 50_000);
            generate_b1(n, seed, f).expect("generator")
        })
        .collect()
}

/// Every nonempty subset of `items` except (optionally) the full set.
pub fn subsets(items: &[usize], include_full: bool) -> Vec<Vec<usize>> {
    let k = items.len();
    (1u64..(1 << k))
        .filter(|&mask| include_full || mask != (1 << k) - 1)
        .map(|mask| (0..k).filter(|&b| mask >> b & 1 == 1).map(|b| items[b]).collect())
        .collect()
}
