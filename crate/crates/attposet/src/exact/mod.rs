//! Exact scalars in ℚ(√q) and the sparse/dense matrix kernels built on them.

mod dense;
mod qsqrt;
mod sparse;

pub use dense::{dense_kernel_basis, linear_independence, sparse_rank, DenseMat};
pub use qsqrt::{parse_rational, rat, rat_int, rational_to_string, QSqrt, Rational};
pub use sparse::{IntMat, Scalar, SparseMat};
