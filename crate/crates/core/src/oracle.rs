//! Reference computations used to check every certified bound: LU with
//! partial pivoting, inverse, determinant, infinity norm and the
//! principal-minor and comparison-matrix class tests.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::matrix::{comparison_matrix, DenseMatrix};

/// A pivot is singular when `|pivot| < PIVOT_RELATIVE_TOL * ||A||_inf`.
pub const PIVOT_RELATIVE_TOL: f64 = 1e-13;

/// Entries of an M-matrix inverse may dip this far below zero from rounding.
pub const M_INVERSE_TOL: f64 = 1e-10;

/// Largest order accepted by the exhaustive principal-minor scan.
pub const P_MATRIX_MAX_ORDER: usize = 20;

/// Packed `P A = L U` factorization with unit lower triangle.
#[derive(Debug, Clone)]
pub struct LuFactorization {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
    sign: f64,
}

impl LuFactorization {
    pub fn order(&self) -> usize {
        self.n
    }

    /// Row `k` of `P A` is row `permutation()[k]` of `A`.
    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    /// `+1.0` for an even permutation, `-1.0` for odd.
    pub fn permutation_sign(&self) -> f64 {
        self.sign
    }

    pub fn lower(&self) -> DenseMatrix {
        let n = self.n;
        DenseMatrix::from_fn(n, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Greater => self.lu[i * n + j],
            std::cmp::Ordering::Equal => 1.0,
            std::cmp::Ordering::Less => 0.0,
        })
        .expect("finite factors")
    }

    pub fn upper(&self) -> DenseMatrix {
        let n = self.n;
        DenseMatrix::from_fn(n, |i, j| if i <= j { self.lu[i * n + j] } else { 0.0 })
            .expect("finite factors")
    }

    pub fn determinant(&self) -> f64 {
        (0..self.n).map(|i| self.lu[i * self.n + i]).product::<f64>() * self.sign
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        assert_eq!(b.len(), n, "right-hand side length");
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s: f64 = (0..i).map(|k| self.lu[i * n + k] * x[k]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|k| self.lu[i * n + k] * x[k]).sum();
            x[i] = (x[i] - s) / self.lu[i * n + i];
        }
        x
    }

    pub fn inverse(&self) -> Result<DenseMatrix> {
        let n = self.n;
        let mut data = vec![0.0; n * n];
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[j] = 1.0;
            for (i, v) in self.solve(&e).into_iter().enumerate() {
                data[i * n + j] = v;
            }
        }
        DenseMatrix::new(n, data)
    }
}

/// LU factorization with partial pivoting. A pivot below the relative
/// threshold is reported with its 1-based column.
pub fn lu_factor(a: &DenseMatrix) -> Result<LuFactorization> {
    let n = a.order();
    let threshold = PIVOT_RELATIVE_TOL * inf_norm(a);
    let mut lu = a.as_slice().to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut sign = 1.0;

    for k in 0..n {
        let (p, pivot) = (k..n)
            .map(|i| (i, lu[i * n + k].abs()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot < threshold || pivot == 0.0 {
            return Err(Error::Singular { column: k + 1 });
        }
        if p != k {
            for j in 0..n {
                lu.swap(k * n + j, p * n + j);
            }
            perm.swap(k, p);
            sign = -sign;
        }
        let d = lu[k * n + k];
        for i in k + 1..n {
            let f = lu[i * n + k] / d;
            lu[i * n + k] = f;
            if f != 0.0 {
                for j in k + 1..n {
                    lu[i * n + j] -= f * lu[k * n + j];
                }
            }
        }
    }
    Ok(LuFactorization { n, lu, perm, sign })
}

pub fn inverse(a: &DenseMatrix) -> Result<DenseMatrix> {
    lu_factor(a)?.inverse()
}

/// Determinant via LU. Inputs with a singular pivot return `0.0`.
pub fn determinant(a: &DenseMatrix) -> f64 {
    match lu_factor(a) {
        Ok(lu) => lu.determinant(),
        Err(_) => 0.0,
    }
}

/// Maximum absolute row sum.
pub fn inf_norm(a: &DenseMatrix) -> f64 {
    a.rows()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `||A^{-1}||_inf`.
pub fn inverse_inf_norm(a: &DenseMatrix) -> Result<f64> {
    Ok(inf_norm(&inverse(a)?))
}

/// True iff every principal minor is positive. Subsets are scanned by
/// increasing cardinality and the scan stops at the first failure.
pub fn is_p_matrix(a: &DenseMatrix) -> Result<bool> {
    let n = a.order();
    if n > P_MATRIX_MAX_ORDER {
        return Err(Error::SizeLimit {
            operation: "principal-minor scan",
            order: n,
            limit: P_MATRIX_MAX_ORDER,
        });
    }
    for k in 1..=n {
        for subset in (0..n).combinations(k) {
            let minor = a.submatrix(&subset, &subset)?;
            if determinant(&minor) <= 0.0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// True iff the comparison matrix is a nonsingular M-matrix, tested as
/// nonsingular with an entrywise nonnegative inverse.
pub fn is_h_matrix(a: &DenseMatrix) -> bool {
    match inverse(&comparison_matrix(a)) {
        Ok(inv) => inv.as_slice().iter().all(|&v| v >= -M_INVERSE_TOL),
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testdata;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn identity_factors_trivially() {
        let lu = lu_factor(&DenseMatrix::identity(4)).unwrap();
        assert_eq!(lu.lower(), DenseMatrix::identity(4));
        assert_eq!(lu.upper(), DenseMatrix::identity(4));
        assert_eq!(lu.permutation(), &[0, 1, 2, 3]);
        assert_eq!(lu.determinant(), 1.0);
    }

    #[test]
    fn swap_matrix_has_negative_sign() {
        let a = DenseMatrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let lu = lu_factor(&a).unwrap();
        assert_eq!(lu.permutation(), &[1, 0]);
        assert_eq!(lu.permutation_sign(), -1.0);
        assert_eq!(determinant(&a), -1.0);
    }

    #[test]
    fn singular_pivot_is_reported() {
        let a = DenseMatrix::from_rows(&[[1.0, 2.0], [2.0, 4.0]]).unwrap();
        assert_eq!(lu_factor(&a).unwrap_err(), Error::Singular { column: 2 });
        assert_eq!(determinant(&a), 0.0);
        assert_eq!(
            inverse(&DenseMatrix::zeros(3)).unwrap_err(),
            Error::Singular { column: 1 }
        );
    }

    #[test]
    fn reconstruction_on_generated_sdd() {
        let a = crate::generate::generate_sdd(6, 11).unwrap();
        let lu = lu_factor(&a).unwrap();
        let pa = a.permuted_rows(lu.permutation());
        let prod = lu.lower().mul(&lu.upper()).unwrap();
        assert!(pa.max_abs_diff(&prod) < 1e-10 * inf_norm(&a));
    }

    #[test]
    fn inverse_examples() {
        let d = DenseMatrix::from_diagonal(&[2.0, -4.0, 0.5]);
        assert_eq!(inverse(&d).unwrap(), DenseMatrix::from_diagonal(&[0.5, -0.25, 2.0]));

        // Closed form: [[a, b], [0, d]]^{-1} = [[1/a, -b/(a d)], [0, 1/d]].
        let a = DenseMatrix::from_rows(&[[2.0, 1.0], [0.0, 2.0]]).unwrap();
        let expected = DenseMatrix::from_rows(&[[0.5, -0.25], [0.0, 0.5]]).unwrap();
        assert!(inverse(&a).unwrap().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn inf_norm_examples() {
        assert_eq!(inf_norm(&DenseMatrix::identity(5)), 1.0);
        let a = DenseMatrix::from_rows(&[[1.0, -2.0], [3.0, 0.0]]).unwrap();
        assert_eq!(inf_norm(&a), 3.0);
    }

    #[test]
    fn determinant_examples() {
        assert!(close(determinant(&testdata::det_6x6()), 17.6899, 5e-4));
        assert!(close(determinant(&testdata::det_6x6_degenerate()), 240.0, 1e-9));
        assert_eq!(determinant(&DenseMatrix::identity(3)), 1.0);
    }

    #[test]
    fn p_matrix_examples() {
        assert!(is_p_matrix(&DenseMatrix::identity(4)).unwrap());
        let swap = DenseMatrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        assert!(!is_p_matrix(&swap).unwrap());
        assert!(is_p_matrix(&testdata::lcp_8x8()).unwrap());
        assert!(matches!(
            is_p_matrix(&DenseMatrix::identity(21)),
            Err(Error::SizeLimit { .. })
        ));
    }

    #[test]
    fn h_matrix_examples() {
        assert!(is_h_matrix(&DenseMatrix::identity(3)));
        assert!(!is_h_matrix(&DenseMatrix::zeros(3)));
        assert!(is_h_matrix(&testdata::inverse_norm_8x8()));
        let off = DenseMatrix::from_rows(&[[1.0, 2.0], [2.0, 1.0]]).unwrap();
        assert!(!is_h_matrix(&off));
    }
}
