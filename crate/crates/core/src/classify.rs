//! Membership tests for the SDD / SDD1 / S-SDD1 / B1 classes.
//!
//! Every strict inequality is evaluated exactly. A row sitting on the
//! boundary is not in the class.

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{
    partition, q_sum_unchecked, row_sum_unchecked, DenseMatrix, IndexPartition, IndexSet,
};

/// Largest `|N2|` for which [`find_s_sdd1_witness`] searches exhaustively.
pub const WITNESS_SEARCH_MAX: usize = 15;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassReport {
    pub is_sdd: bool,
    pub is_sdd1: bool,
    pub s_sdd1_witness: Option<IndexSet>,
    /// `|a_ii| - P_i(A)` per row.
    pub dominance_degrees: Vec<f64>,
    pub partition: IndexPartition,
}

pub fn classify(a: &DenseMatrix) -> ClassReport {
    let p = partition(a);
    let dominance_degrees = dominance_degrees(a, &p);
    ClassReport {
        is_sdd: p.n1.is_empty(),
        is_sdd1: dominance_degrees.iter().all(|&d| d > 0.0),
        s_sdd1_witness: find_s_sdd1_witness_in(a, &p),
        dominance_degrees,
        partition: p,
    }
}

fn dominance_degrees(a: &DenseMatrix, p: &IndexPartition) -> Vec<f64> {
    (0..a.order())
        .map(|i| a.get(i, i).abs() - p.p_values[i])
        .collect()
}

pub fn is_sdd(a: &DenseMatrix) -> bool {
    (0..a.order()).all(|i| {
        let r: f64 = a
            .row(i)
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, v)| v.abs())
            .sum();
        a.get(i, i).abs() > r
    })
}

pub fn is_sdd1(a: &DenseMatrix) -> bool {
    is_sdd1_with(a, &partition(a))
}

pub(crate) fn is_sdd1_with(a: &DenseMatrix, p: &IndexPartition) -> bool {
    (0..a.order()).all(|i| a.get(i, i).abs() > p.p_values[i])
}

/// `R_i^{S̄}(A) + Q_i^S(A)`, the S-SDD1 row weight.
pub(crate) fn s_weight(a: &DenseMatrix, i: usize, s: &IndexSet, s_bar: &IndexSet, p: &IndexPartition) -> f64 {
    row_sum_unchecked(a, i, s_bar.as_slice()) + q_sum_unchecked(a, i, s.as_slice(), &p.row_sums)
}

pub(crate) fn check_witness(s: &IndexSet, p: &IndexPartition) -> Result<()> {
    if s.is_empty() {
        return Err(Error::InvalidWitness("S must be nonempty".into()));
    }
    if !s.is_subset(&p.n2) {
        return Err(Error::InvalidWitness(format!(
            "S = {s} is not contained in the dominant set N2 = {}",
            p.n2
        )));
    }
    Ok(())
}

/// True iff `|a_ii| - R_i^{S̄}(A) - Q_i^S(A) > 0` for every row.
pub fn is_s_sdd1(a: &DenseMatrix, s: &IndexSet) -> Result<bool> {
    let p = partition(a);
    check_witness(s, &p)?;
    Ok(is_s_sdd1_unchecked(a, s, &p))
}

fn is_s_sdd1_unchecked(a: &DenseMatrix, s: &IndexSet, p: &IndexPartition) -> bool {
    let s_bar = s.complement(a.order());
    (0..a.order()).all(|i| a.get(i, i).abs() - s_weight(a, i, s, &s_bar, p) > 0.0)
}

/// Searches subsets of `N2`, largest first, and returns the
/// lexicographically first `S` that makes `A` S-SDD1.
pub fn find_s_sdd1_witness(a: &DenseMatrix) -> Result<Option<IndexSet>> {
    let p = partition(a);
    if p.n2.len() > WITNESS_SEARCH_MAX {
        return Err(Error::SizeLimit {
            operation: "S-SDD1 witness search",
            order: p.n2.len(),
            limit: WITNESS_SEARCH_MAX,
        });
    }
    Ok(find_s_sdd1_witness_in(a, &p))
}

fn find_s_sdd1_witness_in(a: &DenseMatrix, p: &IndexPartition) -> Option<IndexSet> {
    if p.n2.len() > WITNESS_SEARCH_MAX {
        return None;
    }
    (1..=p.n2.len()).rev().find_map(|k| {
        p.n2
            .iter()
            .combinations(k)
            .map(IndexSet::from_sorted)
            .find(|s| is_s_sdd1_unchecked(a, s, p))
    })
}

/// `M = A + C` with `C` holding the constant row value
/// `r_i = max(0, max_{j != i} m_ij)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct B1Split {
    pub a: DenseMatrix,
    pub c: DenseMatrix,
    pub r: Vec<f64>,
}

impl B1Split {
    /// True when every `r_i` is exactly zero, so `M` is its own shifted part.
    pub fn c_is_zero(&self) -> bool {
        self.r.iter().all(|&r| r == 0.0)
    }
}

pub fn b1_split(m: &DenseMatrix) -> B1Split {
    let n = m.order();
    let r: Vec<f64> = (0..n)
        .map(|i| {
            m.row(i)
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &v)| v)
                .fold(0.0, f64::max)
        })
        .collect();
    let a = DenseMatrix::from_fn(n, |i, j| m.get(i, j) - r[i]).expect("finite shift");
    let c = DenseMatrix::from_fn(n, |i, _| r[i]).expect("finite shift");
    B1Split { a, c, r }
}

/// True iff the shifted part of the split is SDD1 with a positive diagonal.
pub fn is_b1(m: &DenseMatrix) -> bool {
    let split = b1_split(m);
    split.a.diagonal().iter().all(|&d| d > 0.0) && is_sdd1(&split.a)
}
