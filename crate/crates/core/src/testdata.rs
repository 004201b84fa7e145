//! Worked matrices shared by the unit tests. The same matrices ship as
//! Matrix Market files under `fixtures/`.

use crate::matrix::DenseMatrix;

/// Five-by-five matrix whose complement on {1} is printed with exact halves.
pub fn halves_5x5() -> DenseMatrix {
    DenseMatrix::from_rows(&[
        [2.0, 0.0, 1.0, 0.0, 0.0],
        [1.0, 5.0, 1.0, 1.0, 0.0],
        [0.0, 0.0, 3.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, 2.0, 1.0],
        [0.0, 2.0, 0.0, 1.0, 2.0],
    ])
    .unwrap()
}

/// Six-by-six SDD1 matrix used for the alpha = {1,2} complement.
pub fn schur_6x6() -> DenseMatrix {
    DenseMatrix::from_rows(&[
        [10.0, 0.0, 1.0, 0.0, 2.0, 3.0],
        [1.0, 16.0, 1.0, 2.0, 0.0, 0.0],
        [2.0, 0.0, 20.0, 0.0, 2.0, 1.0],
        [1.0, 7.0, 3.0, 12.0, 3.0, 1.0],
        [2.0, 3.0, 10.0, 1.0, 7.0, 0.0],
        [6.0, 3.0, 16.0, 7.0, 5.0, 22.0],
    ])
    .unwrap()
}

/// Eight-by-eight SDD1 matrix with N1 = {1,2,3,4}.
pub fn inverse_norm_8x8() -> DenseMatrix {
    DenseMatrix::from_rows(&[
        [0.4506, 0.0901, 0.0451, 0.0472, 0.0912, 0.0901, 0.0421, 0.1352],
        [0.0901, 0.5407, 0.1352, 0.0451, 0.0901, 0.4506, 0.0471, 0.1357],
        [0.1352, 0.0901, 0.5407, 0.0351, 0.0611, 0.0901, 0.0451, 0.0901],
        [0.0901, 0.0451, 0.0451, 0.5407, 0.0901, 0.2704, 0.0428, 0.0701],
        [0.0261, 0.0791, 0.0451, 0.0901, 9.0118, 0.0451, 0.1352, 0.0151],
        [0.3154, 0.0161, 0.0901, 0.1352, 0.2704, 27.0354, 0.0451, 0.0901],
        [0.0142, 0.0242, 0.0451, 0.1352, 0.2704, 0.5407, 1.4419, 0.2704],
        [0.0151, 0.0901, 0.0451, 0.0901, 0.0901, 0.0361, 0.0241, 9.0118],
    ])
    .unwrap()
}

/// Eight-by-eight B1-matrix with non-positive off-diagonal entries.
pub fn lcp_8x8() -> DenseMatrix {
    DenseMatrix::from_rows(&[
        [7.5, -2.0, -2.0, -2.0, -0.9, 0.0, -0.5, -0.1],
        [-12.0, 20.6, -7.0, 0.0, -0.9, -0.6, -0.1, 0.0],
        [-3.5, -2.2, 7.0, 0.0, -1.4, 0.0, 0.0, -0.1],
        [-12.4, -35.0, -7.0, 56.0, -1.6, 0.0, -0.1, 0.0],
        [-0.12, 0.0, 0.0, 0.0, 1.2, -0.16, 0.0, 0.0],
        [0.0, 0.0, -0.2, -0.12, 0.0, 1.2, 0.0, 0.0],
        [0.0, 0.0, -0.16, 0.0, -0.1, 0.0, 1.2, 0.0],
        [-0.1, 0.0, -0.12, 0.0, 0.0, 0.0, 0.0, 1.2],
    ])
    .unwrap()
}

/// Six-by-six SDD1 matrix already in D1 ordering, determinant 17.6899.
pub fn det_6x6() -> DenseMatrix {
    DenseMatrix::from_rows(&[
        [1.5, 0.3, 0.3, 0.6, 0.3, 0.3],
        [0.3, 1.5, 0.3, 0.3, 0.6, 0.3],
        [0.3, 0.0, 1.5, 0.6, 0.0, 0.6],
        [0.3, 0.0, 0.3, 3.0, 0.0, 0.0],
        [0.3, 0.0, 0.0, 0.0, 1.5, 0.3],
        [0.0, 0.0, 0.3, 0.0, 0.0, 1.5],
    ])
    .unwrap()
}

/// Six-by-six SDD1 matrix where the theta-weighted lower factor vanishes.
pub fn det_6x6_degenerate() -> DenseMatrix {
    DenseMatrix::from_rows(&[
        [3.0, 0.0, 1.0, 2.0, 0.0, 2.0],
        [1.0, 2.0, 0.0, 1.0, 0.0, 0.0],
        [1.0, 0.0, 2.0, 1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 3.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 3.0, 1.0],
        [0.0, 0.0, 0.0, 1.0, 0.0, 3.0],
    ])
    .unwrap()
}
