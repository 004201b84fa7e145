//! Schur complements `A/α = A(ᾱ) - A(ᾱ,α) A(α)^{-1} A(α,ᾱ)` and the
//! certified dominance lower bounds for SDD1 matrices.
//!
//! The certified bounds use only entries of `A`; they never form
//! `A(α)^{-1}`. The exact complement is computed separately so each bound
//! can be checked against it. Rows of the complement follow `ᾱ` in
//! increasing original index, and per-row outputs are keyed by that
//! original index.

use serde::Serialize;

use crate::classify::is_sdd1_with;
use crate::error::{Error, Result};
use crate::matrix::{
    comparison_matrix, partition, q_sum_unchecked, row_sum_unchecked, DenseMatrix, IndexPartition,
    IndexSet,
};
use crate::oracle::{determinant, inf_norm, is_h_matrix, lu_factor};

/// Tolerances for the numerical identity checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Entrywise matrix comparisons use `entry_rel * ||A||_inf`.
    pub entry_rel: f64,
    /// Relative tolerance for scalar identities.
    pub scalar_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            entry_rel: 1e-9,
            scalar_rel: 1e-8,
        }
    }
}

/// Position of `α` relative to the dominant set `N2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `∅ ≠ α ⊊ N2`: the complement stays SDD1.
    ProperSubsetOfN2,
    /// `α = N2`: the complement is SDD.
    EqualsN2,
    /// `N2 ⊊ α ⊊ N`: the complement is SDD.
    SupersetOfN2,
}

impl Regime {
    pub fn of(alpha: &IndexSet, p: &IndexPartition) -> Option<Self> {
        let n = p.order();
        if alpha.is_empty() || alpha.len() >= n {
            return None;
        }
        if alpha.is_proper_subset(&p.n2) {
            Some(Regime::ProperSubsetOfN2)
        } else if *alpha == p.n2 {
            Some(Regime::EqualsN2)
        } else if p.n2.is_proper_subset(alpha) {
            Some(Regime::SupersetOfN2)
        } else {
            None
        }
    }
}

/// Per-row values keyed by original (0-based internally) row index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowBounds {
    pub indices: IndexSet,
    pub values: Vec<f64>,
}

impl RowBounds {
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices.iter().zip(self.values.iter().copied())
    }

    pub fn get(&self, index: usize) -> Option<f64> {
        self.indices.position(index).map(|k| self.values[k])
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertifiedDominance {
    pub regime: Regime,
    pub bounds: RowBounds,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchurResult {
    pub complement: DenseMatrix,
    pub alpha: IndexSet,
    pub alpha_bar: IndexSet,
    /// Non-dominant rows of the complement, by original index.
    pub tilde_n1: IndexSet,
    /// Dominant rows of the complement, by original index.
    pub tilde_n2: IndexSet,
    /// `Δ = |A(ᾱ,α)| <A(α)>^{-1} |A(α,ᾱ)|`, present when `A(α)` is an H-matrix.
    pub delta: Option<DenseMatrix>,
    /// Present when `A` is SDD1 and `α` falls in one of the three regimes.
    pub certified: Option<CertifiedDominance>,
}

impl SchurResult {
    /// `|a'_tt| - R_t(A/α)`.
    pub fn row_dominance(&self) -> RowBounds {
        let c = &self.complement;
        let p = partition(c);
        RowBounds {
            indices: self.alpha_bar.clone(),
            values: (0..c.order())
                .map(|t| c.get(t, t).abs() - p.row_sums[t])
                .collect(),
        }
    }

    /// `|a'_tt| - P_t(A/α)`.
    pub fn d1_dominance(&self) -> RowBounds {
        let c = &self.complement;
        let p = partition(c);
        RowBounds {
            indices: self.alpha_bar.clone(),
            values: (0..c.order())
                .map(|t| c.get(t, t).abs() - p.p_values[t])
                .collect(),
        }
    }

    /// The exact quantity each regime's certified bound sits below.
    pub fn exact_dominance(&self, regime: Regime) -> RowBounds {
        match regime {
            Regime::ProperSubsetOfN2 => self.d1_dominance(),
            Regime::EqualsN2 | Regime::SupersetOfN2 => self.row_dominance(),
        }
    }
}

fn validate_alpha(alpha: &IndexSet, n: usize) -> Result<()> {
    if alpha.is_empty() {
        return Err(Error::InvalidAlpha("alpha must be nonempty".into()));
    }
    if alpha.len() >= n {
        return Err(Error::InvalidAlpha(format!(
            "alpha = {alpha} must be a proper subset of 1..={n}"
        )));
    }
    if let Some(i) = alpha.iter().find(|&i| i >= n) {
        return Err(Error::IndexOutOfRange {
            index: i + 1,
            order: n,
        });
    }
    Ok(())
}

/// Exact complement plus the tilde sets, `Δ` and (when applicable) the
/// certified dominance bounds.
pub fn schur_complement(a: &DenseMatrix, alpha: &IndexSet) -> Result<SchurResult> {
    let n = a.order();
    validate_alpha(alpha, n)?;
    let alpha_bar = alpha.complement(n);
    let complement = complement_matrix(a, alpha, &alpha_bar)?;

    let cp = partition(&complement);
    let map = |s: &IndexSet| IndexSet::from_sorted(s.iter().map(|t| alpha_bar.as_slice()[t]).collect());
    let tilde_n1 = map(&cp.n1);
    let tilde_n2 = map(&cp.n2);

    let block = a.principal(alpha)?;
    let delta = if is_h_matrix(&block) {
        Some(delta_matrix(a, alpha, &alpha_bar, &block)?)
    } else {
        None
    };

    let p = partition(a);
    let certified = match Regime::of(alpha, &p) {
        Some(regime) if is_sdd1_with(a, &p) => {
            let bounds = match regime {
                Regime::ProperSubsetOfN2 => proper_subset_bounds(a, alpha, &p),
                Regime::EqualsN2 => equals_n2_bounds(a, &p),
                Regime::SupersetOfN2 => superset_bounds(a, alpha, &p),
            };
            Some(CertifiedDominance { regime, bounds })
        }
        _ => None,
    };

    Ok(SchurResult {
        complement,
        alpha: alpha.clone(),
        alpha_bar,
        tilde_n1,
        tilde_n2,
        delta,
        certified,
    })
}

fn complement_matrix(a: &DenseMatrix, alpha: &IndexSet, alpha_bar: &IndexSet) -> Result<DenseMatrix> {
    let block = a.principal(alpha)?;
    let lu = lu_factor(&block).map_err(|_| Error::SingularBlock {
        alpha: alpha.to_one_based(),
    })?;
    let al = alpha.as_slice();
    let ab = alpha_bar.as_slice();
    let l = ab.len();
    let mut data = vec![0.0; l * l];
    for (u, &ju) in ab.iter().enumerate() {
        let col: Vec<f64> = al.iter().map(|&h| a.get(h, ju)).collect();
        let x = lu.solve(&col);
        for (t, &jt) in ab.iter().enumerate() {
            let coupling: f64 = al.iter().zip(&x).map(|(&h, xh)| a.get(jt, h) * xh).sum();
            data[t * l + u] = a.get(jt, ju) - coupling;
        }
    }
    DenseMatrix::new(l, data)
}

fn delta_matrix(
    a: &DenseMatrix,
    alpha: &IndexSet,
    alpha_bar: &IndexSet,
    block: &DenseMatrix,
) -> Result<DenseMatrix> {
    let lu = lu_factor(&comparison_matrix(block))?;
    let al = alpha.as_slice();
    let ab = alpha_bar.as_slice();
    let l = ab.len();
    let mut data = vec![0.0; l * l];
    for (u, &ju) in ab.iter().enumerate() {
        let col: Vec<f64> = al.iter().map(|&h| a.get(h, ju).abs()).collect();
        let y = lu.solve(&col);
        for (t, &jt) in ab.iter().enumerate() {
            // <A(α)>^{-1} >= 0, so tiny negative rounding is clipped.
            let v: f64 = al.iter().zip(&y).map(|(&h, yh)| a.get(jt, h).abs() * yh).sum();
            data[t * l + u] = v.max(0.0);
        }
    }
    DenseMatrix::new(l, data)
}

fn require_sdd1(a: &DenseMatrix) -> Result<IndexPartition> {
    let p = partition(a);
    if !is_sdd1_with(a, &p) {
        return Err(Error::Hypothesis("A is not SDD1".into()));
    }
    Ok(p)
}

/// Lower bound on `|a'_tt| - P_t(A/α)` for `∅ ≠ α ⊊ N2`. Each value lies
/// between `|a_jj| - P_j(A)` and the exact complement quantity.
pub fn certified_bound_proper_subset(a: &DenseMatrix, alpha: &IndexSet) -> Result<RowBounds> {
    validate_alpha(alpha, a.order())?;
    let p = require_sdd1(a)?;
    if !alpha.is_proper_subset(&p.n2) {
        return Err(Error::Hypothesis(format!(
            "alpha = {alpha} is not a nonempty proper subset of N2 = {}",
            p.n2
        )));
    }
    Ok(proper_subset_bounds(a, alpha, &p))
}

fn proper_subset_bounds(a: &DenseMatrix, alpha: &IndexSet, p: &IndexPartition) -> RowBounds {
    let alpha_bar = alpha.complement(a.order());
    let n2_minus_alpha = p.n2.difference(alpha);
    let values = alpha_bar
        .iter()
        .map(|j| {
            let n1_with_j = p.n1.with(j);
            let n2_without_j = p.n2.without(j);
            let coupling: f64 = alpha
                .iter()
                .map(|h| {
                    let weight = row_sum_unchecked(a, h, n1_with_j.as_slice())
                        + q_sum_unchecked(a, h, n2_without_j.as_slice(), &p.row_sums);
                    a.get(j, h).abs() / a.get(h, h).abs() * weight
                })
                .sum();
            a.get(j, j).abs()
                - row_sum_unchecked(a, j, p.n1.as_slice())
                - q_sum_unchecked(a, j, n2_minus_alpha.as_slice(), &p.row_sums)
                - coupling
        })
        .collect();
    RowBounds {
        indices: alpha_bar,
        values,
    }
}

/// Lower bound on `|a'_tt| - R_t(A/N2)` for every row of `N1`.
pub fn certified_bound_alpha_equals_n2(a: &DenseMatrix) -> Result<RowBounds> {
    let p = require_sdd1(a)?;
    if p.n1.is_empty() {
        return Err(Error::Hypothesis(
            "N1 is empty; the alpha = N2 bound needs both partition sides nonempty".into(),
        ));
    }
    if p.n2.is_empty() {
        return Err(Error::Hypothesis("N2 is empty".into()));
    }
    Ok(equals_n2_bounds(a, &p))
}

fn equals_n2_bounds(a: &DenseMatrix, p: &IndexPartition) -> RowBounds {
    let values = p
        .n1
        .iter()
        .map(|j| {
            let coupling: f64 = p
                .n2
                .iter()
                .map(|h| a.get(j, h).abs() / a.get(h, h).abs() * p.p_values[h])
                .sum();
            a.get(j, j).abs() - row_sum_unchecked(a, j, p.n1.as_slice()) - coupling
        })
        .collect();
    RowBounds {
        indices: p.n1.clone(),
        values,
    }
}

/// Lower bound on `|a'_tt| - R_t(A/α)` for `N2 ⊊ α ⊊ N`.
pub fn certified_bound_superset(a: &DenseMatrix, alpha: &IndexSet) -> Result<RowBounds> {
    validate_alpha(alpha, a.order())?;
    let p = require_sdd1(a)?;
    if !p.n2.is_proper_subset(alpha) {
        return Err(Error::Hypothesis(format!(
            "alpha = {alpha} does not strictly contain N2 = {}",
            p.n2
        )));
    }
    Ok(superset_bounds(a, alpha, &p))
}

fn superset_bounds(a: &DenseMatrix, alpha: &IndexSet, p: &IndexPartition) -> RowBounds {
    let alpha_bar = alpha.complement(a.order());
    let values = alpha_bar
        .iter()
        .map(|j| {
            let coupling: f64 = alpha
                .iter()
                .map(|h| a.get(j, h).abs() / a.get(h, h).abs() * p.p_values[h])
                .sum();
            a.get(j, j).abs() - row_sum_unchecked(a, j, alpha_bar.as_slice()) - coupling
        })
        .collect();
    RowBounds {
        indices: alpha_bar,
        values,
    }
}

/// Checks the three tilde-set relations for `∅ ≠ α ⊊ N2`:
/// `N2\α ⊆ Ñ2`, `Ñ1 ⊆ N1` and `N1\Ñ1 = Ñ2\(N2\α)`.
pub fn tilde_set_identity_check(a: &DenseMatrix, alpha: &IndexSet) -> Result<bool> {
    validate_alpha(alpha, a.order())?;
    let p = partition(a);
    if !alpha.is_proper_subset(&p.n2) {
        return Err(Error::Hypothesis(format!(
            "alpha = {alpha} is not a nonempty proper subset of N2 = {}",
            p.n2
        )));
    }
    let s = schur_complement(a, alpha)?;
    let n2_minus_alpha = p.n2.difference(alpha);
    Ok(n2_minus_alpha.is_subset(&s.tilde_n2)
        && s.tilde_n1.is_subset(&p.n1)
        && p.n1.difference(&s.tilde_n1) == s.tilde_n2.difference(&n2_minus_alpha))
}

/// `A/β = (A/γ)/(A(β)/γ)` for `γ ⊊ β ⊊ N`, compared entrywise.
pub fn quotient_formula_check(a: &DenseMatrix, beta: &IndexSet, gamma: &IndexSet) -> Result<bool> {
    quotient_formula_check_with(a, beta, gamma, Tolerances::default())
}

pub fn quotient_formula_check_with(
    a: &DenseMatrix,
    beta: &IndexSet,
    gamma: &IndexSet,
    tol: Tolerances,
) -> Result<bool> {
    let n = a.order();
    validate_alpha(beta, n)?;
    validate_alpha(gamma, n)?;
    if !gamma.is_proper_subset(beta) {
        return Err(Error::InvalidAlpha(format!(
            "gamma = {gamma} must be a proper subset of beta = {beta}"
        )));
    }
    let direct = schur_complement(a, beta)?.complement;
    let outer = schur_complement(a, gamma)?;
    // β \ γ as positions inside γ̄.
    let inner: Vec<usize> = beta
        .difference(gamma)
        .iter()
        .map(|i| outer.alpha_bar.position(i).expect("beta minus gamma lies in gamma bar"))
        .collect();
    let inner = IndexSet::from_sorted(inner);
    let nested = schur_complement(&outer.complement, &inner)?.complement;
    Ok(direct.max_abs_diff(&nested) <= tol.entry_rel * inf_norm(a))
}

/// `det(A) = det(A(α)) det(A/α)` within relative tolerance.
pub fn determinant_identity_check(a: &DenseMatrix, alpha: &IndexSet, tol: Tolerances) -> Result<bool> {
    let s = schur_complement(a, alpha)?;
    let lhs = determinant(a);
    let rhs = determinant(&a.principal(alpha)?) * determinant(&s.complement);
    Ok((lhs - rhs).abs() <= tol.scalar_rel * lhs.abs().max(rhs.abs()))
}
