//! Seeded matrix ensembles.
//!
//! Every draw comes from ChaCha8 seeded with `seed`, with the stream
//! selecting the attempt (generators) or sample index (experiments), so
//! results do not depend on evaluation order.

use rand::seq::SliceRandom;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classify::{is_b1, is_sdd, is_sdd1};
use crate::error::{Error, Result};
use crate::matrix::{partition, DenseMatrix};

/// Recorded in experiment artifacts next to the seed.
pub const GENERATOR: &str = "chacha8-stream/v1";

/// Draws allowed before a generator gives up.
pub const MAX_ATTEMPTS: usize = 100;

pub fn sample_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform on `[0, 1)` from the top 53 bits of one draw.
pub fn uniform01(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn uniform(rng: &mut impl RngCore, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * uniform01(rng)
}

fn coin(rng: &mut impl RngCore, p: f64) -> bool {
    uniform01(rng) < p
}

/// Off-diagonal entry: zero with probability 0.3, otherwise magnitude in
/// `[0.1, 1)`. Z-pattern entries are never positive.
fn off_diagonal(rng: &mut impl RngCore, z_pattern: bool) -> f64 {
    if coin(rng, 0.3) {
        return 0.0;
    }
    let v = uniform(rng, 0.1, 1.0);
    if z_pattern || coin(rng, 0.5) {
        -v
    } else {
        v
    }
}

fn check_order(n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(Error::InvalidParameter(format!("order must be at least {min}, got {n}")));
    }
    Ok(())
}

/// Random strictly diagonally dominant matrix.
pub fn generate_sdd(n: usize, seed: u64) -> Result<DenseMatrix> {
    check_order(n, 1)?;
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = sample_stream(seed, attempt as u64);
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            let mut r = 0.0;
            for j in (0..n).filter(|&j| j != i) {
                let v = off_diagonal(&mut rng, false);
                data[i * n + j] = v;
                r += v.abs();
            }
            let d = if r > 0.0 {
                r * (1.0 + uniform(&mut rng, 0.05, 1.0))
            } else {
                uniform(&mut rng, 0.5, 1.5)
            };
            data[i * n + i] = if coin(&mut rng, 0.2) { -d } else { d };
        }
        let a = DenseMatrix::new(n, data)?;
        if is_sdd(&a) {
            return Ok(a);
        }
    }
    Err(Error::GenerationFailed {
        attempts: MAX_ATTEMPTS,
        reason: "no draw was strictly diagonally dominant".into(),
    })
}

/// Random SDD1 matrix with about `n1_fraction * n` non-dominant rows
/// (at least one, at most `n - 1`).
pub fn generate_sdd1(n: usize, seed: u64, n1_fraction: f64) -> Result<DenseMatrix> {
    generate_sdd1_with(n, seed, n1_fraction, false)
}

fn generate_sdd1_with(n: usize, seed: u64, n1_fraction: f64, z_pattern: bool) -> Result<DenseMatrix> {
    check_order(n, 2)?;
    if !(n1_fraction > 0.0 && n1_fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "n1 fraction must lie in (0, 1), got {n1_fraction}"
        )));
    }
    let k1 = ((n1_fraction * n as f64).round() as usize).clamp(1, n - 1);
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = sample_stream(seed, attempt as u64);
        let a = draw_sdd1(&mut rng, n, k1, z_pattern)?;
        let p = partition(&a);
        if p.n1.len() == k1 && is_sdd1(&a) {
            return Ok(a);
        }
    }
    Err(Error::GenerationFailed {
        attempts: MAX_ATTEMPTS,
        reason: format!("could not place {k1} non-dominant rows in order {n}"),
    })
}

fn draw_sdd1(rng: &mut ChaCha8Rng, n: usize, k1: usize, z_pattern: bool) -> Result<DenseMatrix> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut in_n1 = vec![false; n];
    for &i in &order[..k1] {
        in_n1[i] = true;
    }
    let n2: Vec<usize> = (0..n).filter(|&j| !in_n1[j]).collect();

    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            data[i * n + j] = off_diagonal(rng, z_pattern);
        }
        // Non-dominant rows need mass on a dominant column to sit strictly
        // above P_i.
        if in_n1[i] && n2.iter().all(|&j| data[i * n + j] == 0.0) {
            let j = n2[(rng.next_u64() % n2.len() as u64) as usize];
            let v = uniform(rng, 0.1, 1.0);
            data[i * n + j] = if z_pattern || coin(rng, 0.5) { -v } else { v };
        }
    }
    let row_sum = |data: &[f64], i: usize| -> f64 {
        (0..n).filter(|&j| j != i).map(|j| data[i * n + j].abs()).sum()
    };

    let mut ratio = vec![0.0; n];
    for &i in &n2 {
        let r = row_sum(&data, i);
        let d = if r > 0.0 {
            r * (1.0 + uniform(rng, 0.05, 1.0))
        } else {
            uniform(rng, 0.5, 1.5)
        };
        ratio[i] = r / d;
        data[i * n + i] = d;
    }
    for i in (0..n).filter(|&i| in_n1[i]) {
        let r = row_sum(&data, i);
        let p: f64 = (0..n)
            .filter(|&j| j != i)
            .map(|j| {
                let v = data[i * n + j].abs();
                if in_n1[j] {
                    v
                } else {
                    v * ratio[j]
                }
            })
            .sum();
        data[i * n + i] = p + uniform(rng, 0.1, 0.9) * (r - p);
    }
    if !z_pattern {
        for i in 0..n {
            if coin(rng, 0.2) {
                data[i * n + i] = -data[i * n + i];
            }
        }
    }
    DenseMatrix::new(n, data)
}

/// Random B1 matrix `M = A + C`: `A` is an SDD1 Z-pattern matrix with a
/// positive diagonal and `C` adds a nonnegative constant to each row that
/// has a zero off-diagonal entry in `A`.
pub fn generate_b1(n: usize, seed: u64, n1_fraction: f64) -> Result<DenseMatrix> {
    let a = generate_sdd1_with(n, seed, n1_fraction, true)?;
    let mut rng = sample_stream(seed, u64::MAX);
    let mut data = a.as_slice().to_vec();
    for i in 0..n {
        let has_zero = (0..n).any(|j| j != i && a.get(i, j) == 0.0);
        if has_zero && coin(&mut rng, 0.7) {
            let r = uniform(&mut rng, 0.0, 1.0);
            data[i * n..(i + 1) * n].iter_mut().for_each(|v| *v += r);
        }
    }
    let m = DenseMatrix::new(n, data)?;
    if !is_b1(&m) {
        return Err(Error::GenerationFailed {
            attempts: 1,
            reason: "row shift broke the B1 split".into(),
        });
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::b1_split;

    #[test]
    fn uniform_stays_in_unit_interval() {
        let mut rng = sample_stream(3, 0);
        for _ in 0..10_000 {
            let u = uniform01(&mut rng);
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn streams_are_independent_of_each_other() {
        let a = uniform01(&mut sample_stream(9, 0));
        let b = uniform01(&mut sample_stream(9, 1));
        assert_ne!(a, b);
        assert_eq!(a, uniform01(&mut sample_stream(9, 0)));
    }

    #[test]
    fn sdd1_generator_hits_the_class() {
        for seed in 0..50 {
            let a = generate_sdd1(6, seed, 0.5).unwrap();
            assert!(is_sdd1(&a));
            assert!(!is_sdd(&a));
            assert_eq!(partition(&a).n1.len(), 3);
        }
    }

    #[test]
    fn small_fraction_still_forces_a_non_dominant_row() {
        let a = generate_sdd1(8, 4, 0.01).unwrap();
        assert_eq!(partition(&a).n1.len(), 1);
        let a = generate_sdd1(2, 4, 0.99).unwrap();
        assert_eq!(partition(&a).n1.len(), 1);
    }

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(generate_sdd1(7, 42, 0.4).unwrap(), generate_sdd1(7, 42, 0.4).unwrap());
        assert_eq!(generate_b1(7, 42, 0.4).unwrap(), generate_b1(7, 42, 0.4).unwrap());
        assert_ne!(generate_sdd1(7, 42, 0.4).unwrap(), generate_sdd1(7, 43, 0.4).unwrap());
    }

    #[test]
    fn b1_generator_recovers_its_split() {
        let mut shifted = 0;
        for seed in 0..50 {
            let m = generate_b1(6, seed, 0.4).unwrap();
            assert!(is_b1(&m));
            let s = b1_split(&m);
            assert!(s.a.diagonal().iter().all(|&d| d > 0.0));
            shifted += usize::from(!s.c_is_zero());
        }
        assert!(shifted > 0);
    }

    #[test]
    fn bad_parameters_are_rejected() {
        assert!(matches!(generate_sdd1(1, 0, 0.5), Err(Error::InvalidParameter(_))));
        assert!(matches!(generate_sdd1(5, 0, 1.0), Err(Error::InvalidParameter(_))));
        assert!(matches!(generate_sdd1(5, 0, f64::NAN), Err(Error::InvalidParameter(_))));
    }
}
