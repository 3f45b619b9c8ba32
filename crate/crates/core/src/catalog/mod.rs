//! Concrete coordinate operators: half-line kinetic energies, the impulse
//! on the unit interval, the Dirichlet problem on `[0, π]`, the `1/cos²x`
//! cell as spectral data, and operators given directly by spectral data.

mod eigen;
mod family;

pub use eigen::{
    bisect, dirichlet_characteristic, eigen_residuals, eigensolve, vector_spectral_measure, EigenData, EigenResiduals,
    Eigenfunction, CHECK_POINTS, ROOT_TOL,
};
pub use family::{
    ordered_rep_data, subspectrum, BoundaryParam, Family, KineticSign, OperatorSpec, OrderedRepData, GOLDEN_RATIO,
};
