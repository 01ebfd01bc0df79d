fn main() {
    // Dense symmetric/nonsymmetric eigendecompositions and complex LU solves
    // are delegated to the system LAPACK (Fortran interface); BLAS is its
    // runtime dependency.
    println!("cargo:rustc-link-lib=dylib=lapack");
    println!("cargo:rustc-link-lib=dylib=blas");
}
