//! Dense complex helpers shared by the solvers.

use faer::Mat;
use nalgebra::DMatrix;
use num_complex::Complex64;

fn to_faer(a: &DMatrix<Complex64>) -> Mat<Complex64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

/// `a * b`, routed through faer for anything larger than a few dozen rows.
pub fn mul(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    assert_eq!(a.ncols(), b.nrows(), "shape mismatch in mul");
    if a.nrows().max(a.ncols()).max(b.ncols()) < 64 {
        return a * b;
    }
    let c = to_faer(a) * to_faer(b);
    DMatrix::from_fn(c.nrows(), c.ncols(), |i, j| c[(i, j)])
}

/// Entry-wise complex conjugate.
pub fn conj(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    a.map(|z| z.conj())
}
