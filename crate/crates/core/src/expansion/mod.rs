//! Eigenfunction expansions for pure-point catalog systems: kernels `Θ_k`,
//! the transform `U` and its inverse, the integral operator `K(F)`, and the
//! matrix spectral measure.
//!
//! Integrals over θ are weighted sums over its atoms. Continuous parts are
//! rejected with [`Error::SymbolicACUnsupported`](crate::Error).

mod decomposition;
mod kernels;
mod transform;

pub use decomposition::{
    analytic_decomposition, matrix_measure, AnalyticDecomposition, AtomGamma, KernelDecomposition,
    MatrixSpectralMeasure, SolutionBasis, SolutionKind, REASSEMBLY_TOL,
};
pub use kernels::{build_kernels, EigenKernel, KernelEntry, KernelSet, Selection, GRAM_PANELS, HALF_LINE_CUT};
pub use transform::{
    expand, kernel_operator, parseval, transform, Coefficient, ExpansionCoefficients, KernelOperator, ParsevalReport,
    Reconstruction,
};
