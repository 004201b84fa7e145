//! Upper bounds on `||A^{-1}||_inf` for SDD, SDD1 and S-SDD1 matrices.

use crate::certificate::{BoundCertificate, FormulaId, Param};
use crate::classify::{check_witness, is_sdd, is_sdd1_with, s_weight};
use crate::error::{Error, Result};
use crate::matrix::{partition, row_sum_unchecked, DenseMatrix, IndexPartition, IndexSet};

/// Grid size for the automatic epsilon search.
pub const EPSILON_GRID: usize = 256;
/// Relative margin keeping grid points off the open interval's ends.
pub const EPSILON_MARGIN: f64 = 1e-6;
/// Width at which golden-section refinement stops.
pub const EPSILON_TOL: f64 = 1e-10;

/// Classical bound `max_{i != j} (|a_jj| + R_i) / (|a_ii||a_jj| - R_i R_j)`.
pub fn sdd_pairwise_bound(a: &DenseMatrix) -> Result<BoundCertificate> {
    let n = a.order();
    if n < 2 {
        return Err(Error::Hypothesis("pairwise bound needs order at least 2".into()));
    }
    if !is_sdd(a) {
        return Err(Error::Hypothesis("A is not SDD".into()));
    }
    let p = partition(a);
    let r = &p.row_sums;
    let mut best = f64::NEG_INFINITY;
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            let (aii, ajj) = (a.get(i, i).abs(), a.get(j, j).abs());
            best = best.max((ajj + r[i]) / (aii * ajj - r[i] * r[j]));
        }
    }
    Ok(BoundCertificate::new(FormulaId::SddPairwise, best))
}

fn require_sdd1(a: &DenseMatrix) -> Result<IndexPartition> {
    let p = partition(a);
    if !is_sdd1_with(a, &p) {
        return Err(Error::Hypothesis("A is not SDD1".into()));
    }
    Ok(p)
}

/// The epsilon-parameterized SDD1 bound as a function of epsilon.
#[derive(Debug, Clone)]
pub struct EpsilonBound<'a> {
    a: &'a DenseMatrix,
    p: IndexPartition,
    r_n1: Vec<f64>,
    r_n2: Vec<f64>,
    upper: f64,
}

impl<'a> EpsilonBound<'a> {
    pub fn new(a: &'a DenseMatrix) -> Result<Self> {
        let p = require_sdd1(a)?;
        if p.n1.is_empty() || p.n2.is_empty() {
            return Err(Error::Hypothesis(
                "epsilon bound needs N1 and N2 both nonempty".into(),
            ));
        }
        let n = a.order();
        let r_n1: Vec<f64> = (0..n).map(|i| row_sum_unchecked(a, i, p.n1.as_slice())).collect();
        let r_n2: Vec<f64> = (0..n).map(|i| row_sum_unchecked(a, i, p.n2.as_slice())).collect();
        let upper = (0..n)
            .filter(|&i| r_n2[i] > 0.0)
            .map(|i| (a.get(i, i).abs() - p.p_values[i]) / r_n2[i])
            .fold(f64::INFINITY, f64::min);
        if !(upper.is_finite() && upper > 0.0) {
            return Err(Error::Hypothesis("admissible epsilon interval is empty".into()));
        }
        Ok(Self {
            a,
            p,
            r_n1,
            r_n2,
            upper,
        })
    }

    /// Upper end of the open interval `(0, upper)`.
    pub fn interval_upper(&self) -> f64 {
        self.upper
    }

    /// Bound value at `eps`, or `None` when the denominator is not positive.
    pub fn eval(&self, eps: f64) -> Option<f64> {
        let a = self.a;
        let p = &self.p;
        let d = |i: usize| a.get(i, i).abs();
        let ratio_max = p
            .n2
            .iter()
            .map(|i| p.p_values[i] / d(i) + eps)
            .fold(f64::NEG_INFINITY, f64::max);
        let numerator = ratio_max.max(1.0);

        let h_min = p
            .n1
            .iter()
            .map(|i| {
                let s: f64 = p
                    .n2
                    .iter()
                    .filter(|&j| j != i)
                    .map(|j| a.get(i, j).abs() * (p.p_values[j] / d(j) + eps))
                    .sum();
                d(i) - self.r_n1[i] - s
            })
            .fold(f64::INFINITY, f64::min);
        let q_min = p
            .n2
            .iter()
            .map(|i| {
                let s: f64 = p
                    .n2
                    .iter()
                    .filter(|&j| j != i)
                    .map(|j| a.get(i, j).abs() * (p.row_sums[j] - p.p_values[j]) / d(j))
                    .sum();
                eps * (d(i) - self.r_n2[i]) + s
            })
            .fold(f64::INFINITY, f64::min);
        let denominator = h_min.min(q_min);
        (denominator > 0.0).then(|| numerator / denominator)
    }

    /// Grid search followed by golden-section refinement around the best
    /// grid point. Returns `(epsilon, value)`.
    pub fn minimize(&self) -> (f64, f64) {
        let span = 1.0 - 2.0 * EPSILON_MARGIN;
        let grid: Vec<f64> = (0..EPSILON_GRID)
            .map(|k| self.upper * (EPSILON_MARGIN + span * k as f64 / (EPSILON_GRID - 1) as f64))
            .collect();
        let f = |e: f64| self.eval(e).unwrap_or(f64::INFINITY);
        let (k, _) = grid
            .iter()
            .map(|&e| f(e))
            .enumerate()
            .fold((0, f64::INFINITY), |best, (k, v)| if v < best.1 { (k, v) } else { best });

        let mut lo = grid[k.saturating_sub(1)];
        let mut hi = grid[(k + 1).min(EPSILON_GRID - 1)];
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let mut x1 = hi - g * (hi - lo);
        let mut x2 = lo + g * (hi - lo);
        let (mut f1, mut f2) = (f(x1), f(x2));
        while hi - lo > EPSILON_TOL {
            if f1 <= f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - g * (hi - lo);
                f1 = f(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + g * (hi - lo);
                f2 = f(x2);
            }
        }
        let refined = 0.5 * (lo + hi);
        let mid = 0.5 * self.upper;
        [grid[k], refined, mid]
            .into_iter()
            .map(|e| (e, f(e)))
            .fold((mid, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
    }
}

/// The epsilon-parameterized SDD1 bound. With `epsilon = None` the bound
/// is minimized over the admissible interval.
pub fn sdd1_epsilon_bound(a: &DenseMatrix, epsilon: Option<f64>) -> Result<BoundCertificate> {
    let bound = EpsilonBound::new(a)?;
    let upper = bound.interval_upper();
    let (eps, value, mode) = match epsilon {
        Some(eps) => {
            if !(eps > 0.0 && eps < upper) {
                return Err(Error::InvalidParameter(format!(
                    "epsilon = {eps} lies outside the admissible interval (0, {upper})"
                )));
            }
            let value = bound.eval(eps).ok_or_else(|| {
                Error::Hypothesis(format!("denominator is not positive at epsilon = {eps}"))
            })?;
            (eps, value, "explicit")
        }
        None => {
            let (eps, value) = bound.minimize();
            if !value.is_finite() {
                return Err(Error::Hypothesis(
                    "denominator is not positive anywhere on the epsilon grid".into(),
                ));
            }
            (eps, value, "auto")
        }
    };
    Ok(BoundCertificate::new(FormulaId::Sdd1Epsilon, value)
        .with_param("epsilon", Param::Real(eps))
        .with_param("interval_upper", Param::Real(upper))
        .with_param("epsilon_mode", Param::Text(mode.into())))
}

struct SchurForm {
    value: f64,
    factor: f64,
    phi: f64,
    psi: f64,
}

/// `(1 + max_{i in S} w_i/|a_ii|) * max{phi, psi}` where `phi` ranges over
/// pairs in `S` and `psi` over `S̄`. `w` holds the per-row weights.
fn schur_form(a: &DenseMatrix, s: &IndexSet, s_bar: &IndexSet, w: &[f64]) -> Result<SchurForm> {
    let n = a.order();
    let d = |i: usize| a.get(i, i).abs();
    let r_s: Vec<f64> = (0..n).map(|i| row_sum_unchecked(a, i, s.as_slice())).collect();

    let factor = 1.0
        + s.iter()
            .map(|i| w[i] / d(i))
            .fold(f64::NEG_INFINITY, f64::max);

    let phi = if s.len() == 1 {
        1.0 / d(s.as_slice()[0])
    } else {
        let mut best = f64::NEG_INFINITY;
        for i in s.iter() {
            for j in s.iter().filter(|&j| j != i) {
                let den = d(i) * d(j) - r_s[i] * r_s[j];
                if den <= 0.0 {
                    return Err(Error::Hypothesis(format!(
                        "pair ({}, {}) has nonpositive denominator; A(S) is not SDD",
                        i + 1,
                        j + 1
                    )));
                }
                best = best.max((d(j) + r_s[i]) / den);
            }
        }
        best
    };

    let mut psi = f64::NEG_INFINITY;
    for i in s_bar.iter() {
        let coupling: f64 = s.iter().map(|j| a.get(i, j).abs() / d(j) * w[j]).sum();
        let den = d(i) - row_sum_unchecked(a, i, s_bar.as_slice()) - coupling;
        if den <= 0.0 {
            return Err(Error::Hypothesis(format!(
                "row {} has nonpositive psi denominator",
                i + 1
            )));
        }
        psi = psi.max((1.0 + phi * r_s[i]) / den);
    }

    Ok(SchurForm {
        value: factor * phi.max(psi),
        factor,
        phi,
        psi,
    })
}

fn schur_certificate(formula: FormulaId, form: SchurForm) -> BoundCertificate {
    BoundCertificate::new(formula, form.value)
        .with_param("phi", Param::Real(form.phi))
        .with_param("psi", Param::Real(form.psi))
        .with_param("factor", Param::Real(form.factor))
}

/// Schur-complement based SDD1 bound. An SDD input (`N1` empty) falls back
/// to [`sdd_pairwise_bound`] and records the substitution.
pub fn sdd1_schur_bound(a: &DenseMatrix) -> Result<BoundCertificate> {
    let p = require_sdd1(a)?;
    if p.n1.is_empty() {
        let mut c = sdd_pairwise_bound(a)?;
        c.formula = FormulaId::Sdd1Schur;
        return Ok(c.with_param(
            "substituted",
            Param::Text(FormulaId::SddPairwise.name().into()),
        ));
    }
    let form = schur_form(a, &p.n2, &p.n1, &p.p_values)?;
    let mut c = schur_certificate(FormulaId::Sdd1Schur, form);
    if p.n2.len() == 1 {
        c = c.with_param("single_dominant_row", Param::Flag(true));
    }
    Ok(c)
}

/// S-SDD1 variant with weights `R_h^{S̄} + Q_h^S`. For `S = N2` it
/// reproduces [`sdd1_schur_bound`] exactly.
pub fn s_sdd1_schur_bound(a: &DenseMatrix, s: &IndexSet) -> Result<BoundCertificate> {
    let n = a.order();
    let p = partition(a);
    check_witness(s, &p)?;
    if s.len() < 2 {
        return Err(Error::InvalidWitness(format!("|S| = {} but at least 2 is required", s.len())));
    }
    if s.len() == n {
        return Err(Error::InvalidWitness("S must leave at least one row outside it".into()));
    }
    let s_bar = s.complement(n);
    let w: Vec<f64> = (0..n).map(|i| s_weight(a, i, s, &s_bar, &p)).collect();
    if let Some(i) = (0..n).find(|&i| a.get(i, i).abs() - w[i] <= 0.0) {
        return Err(Error::Hypothesis(format!("A is not S-SDD1 for S = {s}: row {} fails", i + 1)));
    }
    let form = schur_form(a, s, &s_bar, &w)?;
    Ok(schur_certificate(FormulaId::SSdd1Schur, form).with_param("s", Param::Set(s.clone())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::inverse_inf_norm;
    use crate::testdata;

    #[test]
    fn pairwise_examples() {
        let a = DenseMatrix::from_rows(&[[2.0, 1.0], [0.0, 2.0]]).unwrap();
        let c = sdd_pairwise_bound(&a).unwrap();
        assert!((c.value - 0.75).abs() < 1e-15);
        assert!((inverse_inf_norm(&a).unwrap() - 0.75).abs() < 1e-15);
        assert_eq!(sdd_pairwise_bound(&DenseMatrix::identity(4)).unwrap().value, 1.0);
        assert!(matches!(
            sdd_pairwise_bound(&testdata::schur_6x6()),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn epsilon_interval_on_inverse_norm_example() {
        let a = testdata::inverse_norm_8x8();
        let b = EpsilonBound::new(&a).unwrap();
        assert!((b.interval_upper() - 0.2787).abs() < 5e-4);
        let exact = inverse_inf_norm(&a).unwrap();
        for k in 1..20 {
            let v = b.eval(b.interval_upper() * k as f64 / 20.0).unwrap();
            assert!(v >= exact);
        }
    }

    #[test]
    fn epsilon_out_of_interval_is_rejected() {
        let a = testdata::inverse_norm_8x8();
        for eps in [0.0, -1.0, 0.3, f64::NAN] {
            assert!(matches!(
                sdd1_epsilon_bound(&a, Some(eps)),
                Err(Error::InvalidParameter(_))
            ));
        }
    }

    #[test]
    fn auto_epsilon_beats_midpoint() {
        let a = testdata::inverse_norm_8x8();
        let c = sdd1_epsilon_bound(&a, None).unwrap();
        let eps = c.real("epsilon").unwrap();
        let upper = c.real("interval_upper").unwrap();
        assert!(eps > 0.0 && eps < upper);
        let mid = sdd1_epsilon_bound(&a, Some(0.5 * upper)).unwrap();
        assert!(c.value <= mid.value);
    }

    #[test]
    fn schur_bound_is_sound_on_inverse_norm_example() {
        let a = testdata::inverse_norm_8x8();
        let c = sdd1_schur_bound(&a).unwrap();
        assert!(c.value >= inverse_inf_norm(&a).unwrap());
        let eps = sdd1_epsilon_bound(&a, None).unwrap();
        assert!(c.value < eps.value);
    }

    #[test]
    fn single_dominant_row_uses_reciprocal_diagonal() {
        // N1 = {1}, N2 = {2}.
        let a = DenseMatrix::from_rows(&[[1.0, 1.5], [0.5, 4.0]]).unwrap();
        let c = sdd1_schur_bound(&a).unwrap();
        assert_eq!(c.real("phi"), Some(0.25));
        assert_eq!(c.params.get("single_dominant_row"), Some(&Param::Flag(true)));
        assert!(c.value >= inverse_inf_norm(&a).unwrap());
    }

    #[test]
    fn sdd_input_falls_back_to_pairwise() {
        let a = DenseMatrix::from_rows(&[[3.0, 1.0], [1.0, 3.0]]).unwrap();
        let c = sdd1_schur_bound(&a).unwrap();
        assert_eq!(c.formula, FormulaId::Sdd1Schur);
        assert_eq!(c.value, sdd_pairwise_bound(&a).unwrap().value);
        assert!(c.params.contains_key("substituted"));
    }

    #[test]
    fn s_variant_with_n2_reproduces_schur_bound() {
        for a in [testdata::inverse_norm_8x8(), testdata::schur_6x6(), testdata::det_6x6()] {
            let p = partition(&a);
            let s = s_sdd1_schur_bound(&a, &p.n2).unwrap();
            assert_eq!(s.value, sdd1_schur_bound(&a).unwrap().value);
        }
    }

    #[test]
    fn s_variant_guards() {
        let a = testdata::inverse_norm_8x8();
        let n = 8;
        let one = IndexSet::from_one_based(&[5], n).unwrap();
        assert!(matches!(s_sdd1_schur_bound(&a, &one), Err(Error::InvalidWitness(_))));
        let outside = IndexSet::from_one_based(&[1, 5], n).unwrap();
        assert!(matches!(s_sdd1_schur_bound(&a, &outside), Err(Error::InvalidWitness(_))));
        let id = DenseMatrix::identity(3);
        assert!(matches!(
            s_sdd1_schur_bound(&id, &IndexSet::full(3)),
            Err(Error::InvalidWitness(_))
        ));
    }
}
