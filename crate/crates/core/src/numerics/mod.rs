//! Dense linear algebra, supports and top-k selection.

mod eigen;
mod matrix;
mod support;

pub use eigen::{spectral_norm, sym_eigen, sym_eigen_from, sym_eigenvalues, EigenDecomposition};
pub use matrix::{axpy, count_nonzero, dist2, dot, norm2, sub, Cholesky, Matrix, SymMatrix};
pub use support::{hard_threshold, top_k_offdiag_pairs, PairSupport, SupportSet};
