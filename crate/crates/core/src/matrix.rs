//! Dense real matrices, index sets and the row-sum functionals the
//! dominance classes are built from.
//!
//! Internally every index is 0-based. Everything that leaves the crate
//! (error messages, serialized reports, `Display`) is 1-based.

use std::fmt;
use std::ops::Index;

use serde::ser::{SerializeSeq, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};

/// Square real matrix stored row-major. Entries are always finite.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    /// Builds an `n x n` matrix from row-major data.
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyMatrix);
        }
        if data.len() != n * n {
            return Err(Error::Shape {
                order: n,
                expected: n * n,
                actual: data.len(),
            });
        }
        if let Some(k) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: k / n + 1,
                col: k % n + 1,
            });
        }
        Ok(Self { n, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::Shape {
                    order: n,
                    expected: n * n,
                    actual: i * n + row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(n, data)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n.max(1)])
    }

    pub fn zeros(n: usize) -> Self {
        let n = n.max(1);
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    /// Diagonal matrix with the given (finite) entries.
    pub fn from_diagonal(d: &[f64]) -> Self {
        let n = d.len().max(1);
        let mut data = vec![0.0; n * n];
        for (i, &v) in d.iter().enumerate() {
            assert!(v.is_finite(), "diagonal entry {} is not finite", i + 1);
            data[i * n + i] = v;
        }
        Self { n, data }
    }

    /// Builds a matrix entry by entry.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self::new(n, data)
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.n)
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.data[i * n + j];
            }
        }
        Self { n, data }
    }

    /// Principal submatrix `A(idx)`.
    pub fn principal(&self, idx: &IndexSet) -> Result<Self> {
        self.submatrix(idx.as_slice(), idx.as_slice())
    }

    /// Square submatrix on the given row and column index lists (0-based).
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Result<Self> {
        if rows.len() != cols.len() {
            return Err(Error::Shape {
                order: rows.len(),
                expected: rows.len() * rows.len(),
                actual: rows.len() * cols.len(),
            });
        }
        let m = rows.len();
        let mut data = Vec::with_capacity(m * m);
        for &i in rows {
            self.check_index(i)?;
            for &j in cols {
                self.check_index(j)?;
                data.push(self.get(i, j));
            }
        }
        Self::new(m, data)
    }

    /// `P^T A P` for the permutation whose k-th entry is the original
    /// index placed at position k.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        self.submatrix(perm, perm)
    }

    /// Row `k` of the result is row `perm[k]` of `self`.
    pub fn permuted_rows(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n, "permutation length");
        let mut data = Vec::with_capacity(self.n * self.n);
        for &p in perm {
            data.extend_from_slice(self.row(p));
        }
        Self { n: self.n, data }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::Shape {
                order: self.n,
                expected: self.n * self.n,
                actual: other.n * other.n,
            });
        }
        let n = self.n;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let aik = self.data[i * n + k];
                if aik == 0.0 {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j] += aik * other.data[k * n + j];
                }
            }
        }
        Self::new(n, data)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        self.rows()
            .map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.n, self.data.iter().map(|&v| f(v)).collect())
    }

    /// Entrywise modulus `|A|`.
    pub fn abs(&self) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|v| v.abs()).collect(),
        }
    }

    /// Largest entrywise absolute difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n, "order mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.n {
            return Err(Error::IndexOutOfRange {
                index: i + 1,
                order: self.n,
            });
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl fmt::Display for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:>10.4}")).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

impl Serialize for DenseMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.n))?;
        for row in self.rows() {
            seq.serialize_element(row)?;
        }
        seq.end()
    }
}

/// Strictly increasing set of 0-based row indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    /// Sorts and deduplicates; fails if any index is `>= n`.
    pub fn new(mut indices: Vec<usize>, n: usize) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        if let Some(&bad) = indices.iter().find(|&&i| i >= n) {
            return Err(Error::IndexOutOfRange {
                index: bad + 1,
                order: n,
            });
        }
        Ok(Self(indices))
    }

    /// Builds a set from 1-based labels as used on the command line.
    pub fn from_one_based(labels: &[usize], n: usize) -> Result<Self> {
        if let Some(&bad) = labels.iter().find(|&&l| l == 0 || l > n) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                order: n,
            });
        }
        Self::new(labels.iter().map(|l| l - 1).collect(), n)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn full(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub(crate) fn from_sorted(v: Vec<usize>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        Self(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.0.iter().map(|i| i + 1).collect()
    }

    /// `{0..n} \ self`.
    pub fn complement(&self, n: usize) -> Self {
        Self((0..n).filter(|&i| !self.contains(i)).collect())
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut v: Vec<usize> = self.0.iter().chain(&other.0).copied().collect();
        v.sort_unstable();
        v.dedup();
        Self(v)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        Self(self.iter().filter(|&i| other.contains(i)).collect())
    }

    pub fn difference(&self, other: &Self) -> Self {
        Self(self.iter().filter(|&i| !other.contains(i)).collect())
    }

    pub fn with(&self, i: usize) -> Self {
        self.union(&Self(vec![i]))
    }

    pub fn without(&self, i: usize) -> Self {
        Self(self.iter().filter(|&j| j != i).collect())
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.iter().all(|i| other.contains(i))
    }

    /// Subset and not equal.
    pub fn is_proper_subset(&self, other: &Self) -> bool {
        self.len() < other.len() && self.is_subset(other)
    }

    /// Position of `i` within the set.
    pub fn position(&self, i: usize) -> Option<usize> {
        self.0.binary_search(&i).ok()
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "{{{}}}", labels.join(","))
    }
}

impl Serialize for IndexSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter().map(|i| i + 1))
    }
}

/// Split of the rows into the non-dominant set `N1` and the strictly
/// dominant set `N2`, with the row sums and SDD1 weights cached.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexPartition {
    pub n1: IndexSet,
    pub n2: IndexSet,
    /// Off-diagonal absolute row sums `R_i`.
    pub row_sums: Vec<f64>,
    /// `P_i = R_i^{N1} + Q_i^{N2}`.
    pub p_values: Vec<f64>,
}

impl IndexPartition {
    pub fn order(&self) -> usize {
        self.row_sums.len()
    }

    /// `R_j / |a_jj|`, the damping weight a dominant column contributes.
    pub fn dominance_ratio(&self, a: &DenseMatrix, j: usize) -> f64 {
        self.row_sums[j] / a.get(j, j).abs()
    }
}

/// `R_i^S(A)`: sum of `|a_ij|` over `j` in `S \ {i}`.
pub fn row_sum(a: &DenseMatrix, i: usize, s: &IndexSet) -> Result<f64> {
    check_row(a, i)?;
    check_set(a, s)?;
    Ok(row_sum_unchecked(a, i, s.as_slice()))
}

pub(crate) fn row_sum_unchecked(a: &DenseMatrix, i: usize, s: &[usize]) -> f64 {
    let row = a.row(i);
    s.iter().filter(|&&j| j != i).map(|&j| row[j].abs()).sum()
}

/// `R_i(A)`, the full off-diagonal absolute row sum.
pub fn full_row_sum(a: &DenseMatrix, i: usize) -> f64 {
    a.row(i)
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, v)| v.abs())
        .sum()
}

/// `Q_i^S(A)`: sum of `|a_ij| R_j(A) / |a_jj|` over `j` in `S \ {i}`.
pub fn q_sum(a: &DenseMatrix, i: usize, s: &IndexSet, partition: &IndexPartition) -> Result<f64> {
    check_row(a, i)?;
    check_set(a, s)?;
    if let Some(j) = s.iter().find(|&j| j != i && a.get(j, j) == 0.0) {
        return Err(Error::SingularDiagonal { row: j + 1 });
    }
    Ok(q_sum_unchecked(a, i, s.as_slice(), &partition.row_sums))
}

pub(crate) fn q_sum_unchecked(a: &DenseMatrix, i: usize, s: &[usize], row_sums: &[f64]) -> f64 {
    let row = a.row(i);
    s.iter()
        .filter(|&&j| j != i)
        .map(|&j| row[j].abs() * row_sums[j] / a.get(j, j).abs())
        .sum()
}

/// Exact `N1`/`N2` split. Membership uses `|a_ii| <= R_i` with no tolerance.
pub fn partition(a: &DenseMatrix) -> IndexPartition {
    let n = a.order();
    let row_sums: Vec<f64> = (0..n).map(|i| full_row_sum(a, i)).collect();
    let (n2, n1): (Vec<usize>, Vec<usize>) =
        (0..n).partition(|&i| a.get(i, i).abs() > row_sums[i]);
    let n1 = IndexSet::from_sorted(n1);
    let n2 = IndexSet::from_sorted(n2);
    let p_values = (0..n)
        .map(|i| {
            row_sum_unchecked(a, i, n1.as_slice()) + q_sum_unchecked(a, i, n2.as_slice(), &row_sums)
        })
        .collect();
    IndexPartition {
        n1,
        n2,
        row_sums,
        p_values,
    }
}

/// Comparison matrix: `|a_ii|` on the diagonal, `-|a_ij|` elsewhere.
pub fn comparison_matrix(a: &DenseMatrix) -> DenseMatrix {
    let n = a.order();
    let mut data = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let v = a.get(i, j).abs();
            data.push(if i == j { v } else { -v });
        }
    }
    DenseMatrix { n, data }
}

fn check_row(a: &DenseMatrix, i: usize) -> Result<()> {
    if i >= a.order() {
        return Err(Error::IndexOutOfRange {
            index: i + 1,
            order: a.order(),
        });
    }
    Ok(())
}

fn check_set(a: &DenseMatrix, s: &IndexSet) -> Result<()> {
    match s.iter().find(|&j| j >= a.order()) {
        Some(j) => Err(Error::IndexOutOfRange {
            index: j + 1,
            order: a.order(),
        }),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testdata;

    fn set(labels: &[usize], n: usize) -> IndexSet {
        IndexSet::from_one_based(labels, n).unwrap()
    }

    #[test]
    fn rejects_bad_construction() {
        assert_eq!(DenseMatrix::new(0, vec![]), Err(Error::EmptyMatrix));
        assert!(matches!(
            DenseMatrix::new(2, vec![1.0; 3]),
            Err(Error::Shape { .. })
        ));
        assert_eq!(
            DenseMatrix::new(2, vec![1.0, f64::NAN, 0.0, 1.0]),
            Err(Error::NonFinite { row: 1, col: 2 })
        );
        assert!(DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0]]).is_err());
    }

    #[test]
    fn row_sum_examples() {
        let a = testdata::halves_5x5();
        assert_eq!(row_sum(&a, 3, &IndexSet::full(5)).unwrap(), 2.0);
        assert_eq!(row_sum(&a, 1, &set(&[1, 3], 5)).unwrap(), 2.0);
        let id = DenseMatrix::identity(4);
        assert_eq!(row_sum(&id, 0, &IndexSet::full(4)).unwrap(), 0.0);
        assert!(matches!(
            row_sum(&a, 5, &IndexSet::full(5)),
            Err(Error::IndexOutOfRange { index: 6, .. })
        ));
    }

    #[test]
    fn q_sum_examples() {
        let a = testdata::halves_5x5();
        let p = partition(&a);
        assert_eq!(q_sum(&a, 3, &p.n2, &p).unwrap(), 0.5);
        assert_eq!(q_sum(&a, 2, &set(&[3], 5), &p).unwrap(), 0.0);
        let d = DenseMatrix::from_diagonal(&[1.0, 2.0, 3.0]);
        let pd = partition(&d);
        for i in 0..3 {
            assert_eq!(q_sum(&d, i, &IndexSet::full(3), &pd).unwrap(), 0.0);
        }
    }

    #[test]
    fn q_sum_rejects_zero_diagonal() {
        let a = DenseMatrix::from_rows(&[[1.0, 1.0], [1.0, 0.0]]).unwrap();
        let p = partition(&a);
        assert_eq!(
            q_sum(&a, 0, &IndexSet::full(2), &p),
            Err(Error::SingularDiagonal { row: 2 })
        );
    }

    #[test]
    fn partition_examples() {
        let p = partition(&testdata::halves_5x5());
        assert_eq!(p.n1.to_one_based(), vec![4, 5]);
        assert_eq!(p.n2.to_one_based(), vec![1, 2, 3]);

        let p = partition(&testdata::inverse_norm_8x8());
        assert_eq!(p.n1.to_one_based(), vec![1, 2, 3, 4]);
        assert_eq!(p.n2.to_one_based(), vec![5, 6, 7, 8]);

        let p = partition(&DenseMatrix::identity(3));
        assert!(p.n1.is_empty());
        assert_eq!(p.n2, IndexSet::full(3));
    }

    #[test]
    fn boundary_row_is_non_dominant() {
        // |a_ii| == R_i lands in N1.
        let a = DenseMatrix::from_rows(&[[2.0, 2.0], [0.0, 1.0]]).unwrap();
        let p = partition(&a);
        assert_eq!(p.n1.to_one_based(), vec![1]);
    }

    #[test]
    fn comparison_matrix_examples() {
        let a = DenseMatrix::from_rows(&[[2.0, -1.0], [3.0, 4.0]]).unwrap();
        let expected = DenseMatrix::from_rows(&[[2.0, -1.0], [-3.0, 4.0]]).unwrap();
        assert_eq!(comparison_matrix(&a), expected);
        let d = DenseMatrix::from_diagonal(&[1.0, 5.0]);
        assert_eq!(comparison_matrix(&d), d);
        assert_eq!(comparison_matrix(&expected), expected);
    }

    #[test]
    fn index_set_algebra() {
        let a = set(&[1, 3, 5], 6);
        let b = set(&[3, 4], 6);
        assert_eq!(a.union(&b).to_one_based(), vec![1, 3, 4, 5]);
        assert_eq!(a.difference(&b).to_one_based(), vec![1, 5]);
        assert_eq!(a.intersection(&b).to_one_based(), vec![3]);
        assert_eq!(a.complement(6).to_one_based(), vec![2, 4, 6]);
        assert!(set(&[1], 6).is_proper_subset(&a));
        assert!(!a.is_proper_subset(&a));
        assert_eq!(a.to_string(), "{1,3,5}");
        assert!(IndexSet::from_one_based(&[0], 3).is_err());
        assert!(IndexSet::from_one_based(&[4], 3).is_err());
    }
}
