//! Thin safe wrappers over the system LAPACK (Fortran interface).
//!
//! Exactly three routines are bound: `dsyev` for real-symmetric
//! eigendecompositions (the arrowhead chains), `dgeev` for dense real
//! nonsymmetric ones (the full coupled system), and `zgesv` for the complex
//! LU solve that maps an initial state onto eigenvector coordinates. All
//! matrices are stored column-major as flat `Vec<f64>`/`Vec<Complex64>`
//! buffers, which is what LAPACK consumes directly.

use crate::errors::{Error, Result};
use num_complex::Complex64;

extern "C" {
    fn dsyev_(
        jobz: *const u8,
        uplo: *const u8,
        n: *const i32,
        a: *mut f64,
        lda: *const i32,
        w: *mut f64,
        work: *mut f64,
        lwork: *const i32,
        info: *mut i32,
    );
    fn dgeev_(
        jobvl: *const u8,
        jobvr: *const u8,
        n: *const i32,
        a: *mut f64,
        lda: *const i32,
        wr: *mut f64,
        wi: *mut f64,
        vl: *mut f64,
        ldvl: *const i32,
        vr: *mut f64,
        ldvr: *const i32,
        work: *mut f64,
        lwork: *const i32,
        info: *mut i32,
    );
    fn zgesv_(
        n: *const i32,
        nrhs: *const i32,
        a: *mut Complex64,
        lda: *const i32,
        ipiv: *mut i32,
        b: *mut Complex64,
        ldb: *const i32,
        info: *mut i32,
    );
}

/// Eigendecomposition of a real symmetric matrix.
pub struct SymEig {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors, column-major; column j pairs with `values[j]`.
    pub vectors: Vec<f64>,
}

/// Eigendecomposition of a real general (nonsymmetric) matrix.
pub struct GenEig {
    /// Complex eigenvalues.
    pub values: Vec<Complex64>,
    /// Right eigenvectors as columns of a complex column-major matrix.
    pub vectors: Vec<Complex64>,
}

/// Decompose a real symmetric `n`×`n` matrix given column-major in `a`.
///
/// Only the lower triangle is referenced, so callers may fill either
/// triangle of a symmetric matrix. Consumes the buffer (LAPACK overwrites
/// it with the eigenvectors).
pub fn sym_eig(mut a: Vec<f64>, n: usize) -> Result<SymEig> {
    assert_eq!(a.len(), n * n, "matrix buffer must be n*n");
    let ni = n as i32;
    let mut w = vec![0.0f64; n];
    let mut info = 0i32;
    // Workspace query.
    let mut wkopt = [0.0f64];
    let lquery = -1i32;
    unsafe {
        dsyev_(
            b"V".as_ptr(),
            b"L".as_ptr(),
            &ni,
            a.as_mut_ptr(),
            &ni,
            w.as_mut_ptr(),
            wkopt.as_mut_ptr(),
            &lquery,
            &mut info,
        );
    }
    let lwork = (wkopt[0] as i32).max(3 * ni.max(1));
    let mut work = vec![0.0f64; lwork as usize];
    unsafe {
        dsyev_(
            b"V".as_ptr(),
            b"L".as_ptr(),
            &ni,
            a.as_mut_ptr(),
            &ni,
            w.as_mut_ptr(),
            work.as_mut_ptr(),
            &lwork,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Numeric {
            context: format!("symmetric eigensolver on {n}x{n} matrix"),
            status: info,
            residual: f64::NAN,
        });
    }
    Ok(SymEig {
        values: w,
        vectors: a,
    })
}

/// Decompose a real general `n`×`n` matrix given column-major in `a`.
///
/// Returns complex eigenvalues and right eigenvectors; complex-conjugate
/// pairs are unpacked from LAPACK's packed real representation.
pub fn gen_eig(mut a: Vec<f64>, n: usize) -> Result<GenEig> {
    assert_eq!(a.len(), n * n, "matrix buffer must be n*n");
    let ni = n as i32;
    let mut wr = vec![0.0f64; n];
    let mut wi = vec![0.0f64; n];
    let mut vr = vec![0.0f64; n * n];
    let mut info = 0i32;
    let mut wkopt = [0.0f64];
    let lquery = -1i32;
    unsafe {
        dgeev_(
            b"N".as_ptr(),
            b"V".as_ptr(),
            &ni,
            a.as_mut_ptr(),
            &ni,
            wr.as_mut_ptr(),
            wi.as_mut_ptr(),
            std::ptr::null_mut(),
            &ni,
            vr.as_mut_ptr(),
            &ni,
            wkopt.as_mut_ptr(),
            &lquery,
            &mut info,
        );
    }
    let lwork = (wkopt[0] as i32).max(4 * ni.max(1));
    let mut work = vec![0.0f64; lwork as usize];
    unsafe {
        dgeev_(
            b"N".as_ptr(),
            b"V".as_ptr(),
            &ni,
            a.as_mut_ptr(),
            &ni,
            wr.as_mut_ptr(),
            wi.as_mut_ptr(),
            std::ptr::null_mut(),
            &ni,
            vr.as_mut_ptr(),
            &ni,
            work.as_mut_ptr(),
            &lwork,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Numeric {
            context: format!("general eigensolver on {n}x{n} matrix"),
            status: info,
            residual: f64::NAN,
        });
    }
    let mut values = Vec::with_capacity(n);
    let mut vectors = vec![Complex64::new(0.0, 0.0); n * n];
    let mut j = 0;
    while j < n {
        if wi[j] == 0.0 {
            values.push(Complex64::new(wr[j], 0.0));
            for i in 0..n {
                vectors[j * n + i] = Complex64::new(vr[j * n + i], 0.0);
            }
            j += 1;
        } else {
            // Conjugate pair: columns j, j+1 hold Re(v) and Im(v).
            values.push(Complex64::new(wr[j], wi[j]));
            values.push(Complex64::new(wr[j + 1], wi[j + 1]));
            for i in 0..n {
                let re = vr[j * n + i];
                let im = vr[(j + 1) * n + i];
                vectors[j * n + i] = Complex64::new(re, im);
                vectors[(j + 1) * n + i] = Complex64::new(re, -im);
            }
            j += 2;
        }
    }
    Ok(GenEig { values, vectors })
}

/// Solve the complex linear system `A x = b` with `A` column-major `n`×`n`.
///
/// `b` may hold several right-hand sides stacked column-major; it is
/// consumed and returned holding the solutions.
pub fn lu_solve_complex(mut a: Vec<Complex64>, mut b: Vec<Complex64>, n: usize) -> Result<Vec<Complex64>> {
    assert_eq!(a.len(), n * n, "matrix buffer must be n*n");
    assert_eq!(b.len() % n.max(1), 0, "rhs buffer must be n*nrhs");
    let ni = n as i32;
    let nrhs = (b.len() / n.max(1)) as i32;
    let mut ipiv = vec![0i32; n];
    let mut info = 0i32;
    unsafe {
        zgesv_(
            &ni,
            &nrhs,
            a.as_mut_ptr(),
            &ni,
            ipiv.as_mut_ptr(),
            b.as_mut_ptr(),
            &ni,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Numeric {
            context: format!("complex LU solve on {n}x{n} matrix"),
            status: info,
            residual: f64::NAN,
        });
    }
    Ok(b)
}
