//! Shin-Zettl matrices, quasi-derivatives and the Lagrange identity.
//!
//! A matrix `A` of order `n` defines quasi-derivatives `f^[0] = f`,
//! `f^[r] = (f^[r−1]′ − Σ_{s≤r} a_rs f^[s−1]) / a_{r,r+1}` and the expression
//! `M_A[f] = iⁿ f^[n]`. Solutions of `M_A[f] = λf + h` are obtained by
//! integrating the equivalent first-order system with RK4.

mod integrate;
mod lagrange;
mod matrix;

pub use integrate::{
    i_pow, integrate_quasi_derivatives, integrate_span, state_at, OdeOptions, QuasiDerivTrajectory, QuasiRhs,
    DEFAULT_MAX_SUBSTEPS, DEFAULT_TOL_ODE,
};
pub use lagrange::{
    bracket, convergence_order, lagrange_bracket, lagrange_residual, simpson, verify_lagrange_identity,
    BilinearFormValue, ConvergenceFit, LagrangeCheck, QuasiFunction, DEFAULT_TOL_QUAD,
};
pub use matrix::{
    interpolate_uniform, lagrange_adjoint, validate_shin_zettl, Coefficient, Condition, Grid, ShinZettlMatrix,
    Violation, DEFAULT_NODES, LAGRANGE_SYMMETRY_TOL,
};
