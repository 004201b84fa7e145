//! Determinant brackets for SDD1 matrices in D1 ordering (non-dominant
//! rows first).

use serde::ser::Serializer;
use serde::Serialize;

use crate::certificate::{BoundCertificate, FormulaId, Param};
use crate::classify::is_sdd1_with;
use crate::error::{Error, Result};
use crate::matrix::{partition, row_sum_unchecked, DenseMatrix, IndexPartition};
use crate::oracle::determinant;

/// Relative slack for the bracket comparisons.
pub const DOMINANCE_REL_TOL: f64 = 1e-9;

/// Stable permutation putting `N1` before `N2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct D1Ordering {
    /// Position `k` holds the original index placed there (1-based when
    /// serialized).
    #[serde(serialize_with = "one_based")]
    pub permutation: Vec<usize>,
    /// `|N1|`.
    pub s: usize,
    pub preserves_within: bool,
}

fn one_based<S: Serializer>(v: &[usize], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|i| i + 1))
}

impl D1Ordering {
    pub fn is_identity(&self) -> bool {
        self.permutation.iter().enumerate().all(|(k, &i)| k == i)
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.permutation.iter().map(|i| i + 1).collect()
    }
}

pub fn d1_ordering(a: &DenseMatrix) -> Result<D1Ordering> {
    let p = partition(a);
    if p.n1.is_empty() || p.n2.is_empty() {
        return Err(Error::Hypothesis(
            "D1 ordering needs N1 and N2 both nonempty".into(),
        ));
    }
    let permutation: Vec<usize> = p.n1.iter().chain(p.n2.iter()).collect();
    Ok(D1Ordering {
        s: p.n1.len(),
        permutation,
        preserves_within: true,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetBracket {
    pub formula: FormulaId,
    /// `max(prod lower_factors, 0)`.
    pub lower: f64,
    pub upper: f64,
    pub lower_factors: Vec<f64>,
    pub upper_factors: Vec<f64>,
    /// `x_i` (Huang) or `y_i` (new bracket) per row.
    pub weights: Vec<f64>,
    pub theta: Option<f64>,
    /// Present when the input was permuted into D1 ordering first.
    pub ordering: Option<D1Ordering>,
}

impl DetBracket {
    pub fn contains(&self, value: f64, rel_tol: f64) -> bool {
        let v = value.abs();
        self.lower <= v + rel_tol * v.max(self.lower) && v <= self.upper + rel_tol * v.max(self.upper)
    }

    /// Certificate for the upper end, with the lower end as a parameter.
    pub fn to_certificate(&self) -> BoundCertificate {
        let mut c = BoundCertificate::new(self.formula, self.upper)
            .with_param("lower", Param::Real(self.lower));
        if let Some(theta) = self.theta {
            c = c.with_param("theta", Param::Real(theta));
        }
        if let Some(o) = &self.ordering {
            c = c.with_param("ordering", Param::Ordering(o.to_one_based()));
        }
        c
    }
}

/// Partition of a matrix already in D1 ordering.
fn require_d1(a: &DenseMatrix) -> Result<IndexPartition> {
    let p = partition(a);
    if p.n1.is_empty() || p.n2.is_empty() {
        return Err(Error::Hypothesis(
            "determinant brackets need N1 and N2 both nonempty".into(),
        ));
    }
    if p.n1.as_slice().iter().enumerate().any(|(k, &i)| k != i) {
        return Err(Error::Hypothesis(format!(
            "A is not in D1 ordering: N1 = {} is not a leading block",
            p.n1
        )));
    }
    Ok(p)
}

fn require_sdd1(a: &DenseMatrix, p: &IndexPartition) -> Result<()> {
    if !is_sdd1_with(a, p) {
        return Err(Error::Hypothesis("A is not SDD1".into()));
    }
    Ok(())
}

fn require_d1_sdd1(a: &DenseMatrix) -> Result<IndexPartition> {
    let p = require_d1(a)?;
    require_sdd1(a, &p)?;
    Ok(p)
}

/// Factors `|a_ii| -/+ (1/x_i) sum_{j > i} |a_ij| x_j`.
fn triangular_factors(a: &DenseMatrix, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = a.order();
    (0..n)
        .map(|i| {
            let tail: f64 = (i + 1..n).map(|j| a.get(i, j).abs() * x[j]).sum::<f64>() / x[i];
            let d = a.get(i, i).abs();
            (d - tail, d + tail)
        })
        .unzip()
}

fn product(v: &[f64]) -> f64 {
    v.iter().product()
}

/// Huang's bracket with `x_i = 1` on `N1` and `x_i = theta + R_i/|a_ii|`
/// on `N2`. Rows of `N1` without `N2` mass are skipped in `theta`; if none
/// remain the bracket is unavailable. That case cannot arise for SDD1
/// input, so it is checked before the SDD1 test.
pub fn huang_bracket(a: &DenseMatrix) -> Result<DetBracket> {
    let p = require_d1(a)?;
    let theta = p
        .n1
        .iter()
        .filter_map(|j| {
            let r = row_sum_unchecked(a, j, p.n2.as_slice());
            (r > 0.0).then(|| (a.get(j, j).abs() - p.p_values[j]) / r)
        })
        .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.min(v))))
        .ok_or_else(|| {
            Error::Unavailable("theta ranges over an empty set: no N1 row has N2 mass".into())
        })?;
    require_sdd1(a, &p)?;
    let x: Vec<f64> = (0..a.order())
        .map(|i| {
            if p.n1.contains(i) {
                1.0
            } else {
                theta + p.row_sums[i] / a.get(i, i).abs()
            }
        })
        .collect();
    let (lf, uf) = triangular_factors(a, &x);
    Ok(DetBracket {
        formula: FormulaId::DetHuang,
        lower: product(&lf).max(0.0),
        upper: product(&uf),
        lower_factors: lf,
        upper_factors: uf,
        weights: x,
        theta: Some(theta),
        ordering: None,
    })
}

/// Bracket with `y_i = P_i/|a_ii|` on `N1` and `y_i = R_i/|a_ii|` on `N2`,
/// `f_i = |a_ii| - sum_{j > i} |a_ij| y_j`, `g_i` with `+`.
pub fn new_bracket(a: &DenseMatrix) -> Result<DetBracket> {
    let p = require_d1_sdd1(a)?;
    let n = a.order();
    let y: Vec<f64> = (0..n)
        .map(|i| {
            let num = if p.n1.contains(i) {
                p.p_values[i]
            } else {
                p.row_sums[i]
            };
            num / a.get(i, i).abs()
        })
        .collect();
    let (f, g): (Vec<f64>, Vec<f64>) = (0..n)
        .map(|i| {
            let tail: f64 = (i + 1..n).map(|j| a.get(i, j).abs() * y[j]).sum();
            let d = a.get(i, i).abs();
            (d - tail, d + tail)
        })
        .unzip();
    Ok(DetBracket {
        formula: FormulaId::DetNew,
        lower: product(&f).max(0.0),
        upper: product(&g),
        lower_factors: f,
        upper_factors: g,
        weights: y,
        theta: None,
        ordering: None,
    })
}

fn reordered(
    a: &DenseMatrix,
    bracket: impl Fn(&DenseMatrix) -> Result<DetBracket>,
) -> Result<DetBracket> {
    let ordering = d1_ordering(a)?;
    let b = a.permuted(&ordering.permutation)?;
    let mut out = bracket(&b)?;
    out.ordering = Some(ordering);
    Ok(out)
}

/// [`huang_bracket`] after permuting into D1 ordering.
pub fn huang_bracket_reordered(a: &DenseMatrix) -> Result<DetBracket> {
    reordered(a, huang_bracket)
}

/// [`new_bracket`] after permuting into D1 ordering.
pub fn new_bracket_reordered(a: &DenseMatrix) -> Result<DetBracket> {
    reordered(a, new_bracket)
}

fn le(x: f64, y: f64) -> bool {
    x <= y + DOMINANCE_REL_TOL * x.abs().max(y.abs())
}

/// `lower_huang <= lower_new <= |det A| <= upper_new <= upper_huang`.
pub fn bracket_dominance_check(a: &DenseMatrix) -> Result<bool> {
    let h = huang_bracket(a)?;
    let f = new_bracket(a)?;
    let det = determinant(a).abs();
    Ok(le(h.lower, f.lower) && le(f.lower, det) && le(det, f.upper) && le(f.upper, h.upper))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testdata;

    #[test]
    fn ordering_examples() {
        let o = d1_ordering(&testdata::det_6x6()).unwrap();
        assert!(o.is_identity());
        assert_eq!(o.s, 3);
        let o = d1_ordering(&testdata::halves_5x5()).unwrap();
        assert_eq!(o.to_one_based(), vec![4, 5, 1, 2, 3]);
        assert!(matches!(
            d1_ordering(&DenseMatrix::identity(3)),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn new_bracket_on_first_example() {
        let a = testdata::det_6x6();
        let b = new_bracket(&a).unwrap();
        assert!((b.lower - 7.5835).abs() < 5e-4);
        assert!((b.upper - 50.4812).abs() < 5e-4);
        assert!(b.lower_factors.iter().all(|&f| f > 0.0));
        assert!(b.contains(determinant(&a), 1e-9));
    }

    #[test]
    fn new_bracket_on_degenerate_example() {
        let a = testdata::det_6x6_degenerate();
        let b = new_bracket(&a).unwrap();
        assert!((b.lower - 66.7).abs() < 0.05);
        assert!((b.upper - 816.7).abs() < 0.05);
        let h = huang_bracket(&a).unwrap();
        assert_eq!(h.lower_factors[0], 0.0);
        assert_eq!(h.lower, 0.0);
        assert!((h.theta.unwrap() - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn dominance_chain_on_examples() {
        assert!(bracket_dominance_check(&testdata::det_6x6()).unwrap());
        assert!(bracket_dominance_check(&testdata::det_6x6_degenerate()).unwrap());
    }

    #[test]
    fn new_lower_factor_dominates_d1_degree() {
        let a = testdata::det_6x6();
        let p = partition(&a);
        let b = new_bracket(&a).unwrap();
        for i in 0..6 {
            assert!(b.lower_factors[i] >= a.get(i, i).abs() - p.p_values[i] - 1e-12);
        }
    }

    #[test]
    fn two_by_two_sdd1_bracket_contains_determinant() {
        let a = DenseMatrix::from_rows(&[[1.0, 1.5], [0.5, 4.0]]).unwrap();
        let b = new_bracket(&a).unwrap();
        assert!(b.contains(determinant(&a), 1e-12));
    }

    #[test]
    fn not_d1_ordered_is_rejected_but_reordering_works() {
        let a = testdata::det_6x6();
        let rev: Vec<usize> = (0..6).rev().collect();
        let b = a.permuted(&rev).unwrap();
        assert!(matches!(new_bracket(&b), Err(Error::Hypothesis(_))));
        let r = new_bracket_reordered(&b).unwrap();
        assert!(r.contains(determinant(&a), 1e-9));
        assert_eq!(r.ordering.unwrap().to_one_based(), vec![4, 5, 6, 1, 2, 3]);
    }

    #[test]
    fn theta_over_empty_set_is_unavailable() {
        // Row 1 is non-dominant and carries mass only on N1 row 2.
        let a = DenseMatrix::from_rows(&[
            [1.0, 1.0, 0.0],
            [0.0, 1.0, 2.0],
            [0.0, 0.0, 1.0],
        ])
        .unwrap();
        assert!(matches!(huang_bracket(&a), Err(Error::Hypothesis(_))));
        let a = DenseMatrix::from_rows(&[
            [1.0, 1.0, 0.0],
            [1.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
        ])
        .unwrap();
        assert!(matches!(huang_bracket(&a), Err(Error::Unavailable(_))));
        assert!(matches!(new_bracket(&a), Err(Error::Hypothesis(_))));
    }
}
