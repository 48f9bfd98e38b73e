fn main() {
    // Hermitian eigen-decompositions go through the system LAPACK.
    println!("cargo:rustc-link-lib=dylib=lapack");
}
