//! Dense complex products through `matrixmultiply`'s blocked kernels.

use matrixmultiply::{zgemm, CGemmOption};
use nalgebra::{DMatrix, Dim, Matrix, RawStorage, RawStorageMut};
use num_complex::Complex64;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `c ← beta·c + alpha·op(a)·b`, `op` = identity or transpose.
fn product<R1, C1, S1, R2, C2, S2, R3, C3, S3>(
    alpha: Complex64,
    a: &Matrix<Complex64, R1, C1, S1>,
    transpose: bool,
    b: &Matrix<Complex64, R2, C2, S2>,
    beta: Complex64,
    c: &mut Matrix<Complex64, R3, C3, S3>,
) where
    R1: Dim,
    C1: Dim,
    S1: RawStorage<Complex64, R1, C1>,
    R2: Dim,
    C2: Dim,
    S2: RawStorage<Complex64, R2, C2>,
    R3: Dim,
    C3: Dim,
    S3: RawStorageMut<Complex64, R3, C3>,
{
    let (ar, ac) = a.shape();
    let (rsa, csa) = a.strides();
    let (m, k, rsa, csa) = if transpose { (ac, ar, csa, rsa) } else { (ar, ac, rsa, csa) };
    let (kb, n) = b.shape();
    assert_eq!(k, kb, "inner dimensions differ");
    assert_eq!(c.shape(), (m, n), "output shape");
    if m == 0 || n == 0 {
        return;
    }
    let (rsb, csb) = b.strides();
    let (rsc, csc) = c.strides();
    // SAFETY: Complex64 is repr(C) {re, im}, layout-compatible with [f64; 2];
    // shapes and strides come from the nalgebra views and were checked above.
    unsafe {
        zgemm(
            CGemmOption::Standard,
            CGemmOption::Standard,
            m,
            k,
            n,
            [alpha.re, alpha.im],
            a.data.ptr() as *const [f64; 2],
            rsa as isize,
            csa as isize,
            b.data.ptr() as *const [f64; 2],
            rsb as isize,
            csb as isize,
            [beta.re, beta.im],
            c.data.ptr_mut() as *mut [f64; 2],
            rsc as isize,
            csc as isize,
        );
    }
}

/// `a · b`.
pub(crate) fn mul<R1, C1, S1, R2, C2, S2>(a: &Matrix<Complex64, R1, C1, S1>, b: &Matrix<Complex64, R2, C2, S2>) -> DMatrix<Complex64>
where
    R1: Dim,
    C1: Dim,
    S1: RawStorage<Complex64, R1, C1>,
    R2: Dim,
    C2: Dim,
    S2: RawStorage<Complex64, R2, C2>,
{
    let mut c = DMatrix::zeros(a.nrows(), b.ncols());
    product(ONE, a, false, b, ZERO, &mut c);
    c
}

/// `aᴴ · b`, computed as `conj(aᵀ · conj(b))`.
pub(crate) fn ad_mul<R1, C1, S1, R2, C2, S2>(a: &Matrix<Complex64, R1, C1, S1>, b: &Matrix<Complex64, R2, C2, S2>) -> DMatrix<Complex64>
where
    R1: Dim,
    C1: Dim,
    S1: RawStorage<Complex64, R1, C1>,
    R2: Dim,
    C2: Dim,
    S2: RawStorage<Complex64, R2, C2>,
{
    let b_conj = DMatrix::from_fn(b.nrows(), b.ncols(), |i, j| b[(i, j)].conj());
    let mut c = DMatrix::zeros(a.ncols(), b.ncols());
    product(ONE, a, true, &b_conj, ZERO, &mut c);
    c.apply(|z| *z = z.conj());
    c
}
