//! Equation-level checks: operator correspondence, Klein–Gordon and Dirac forms.

mod clifford;
mod plane;

pub use clifford::{
    clifford_components, clifford_map, dirac_operator, dirac_residual, dirac_zero_mode,
    gamma_basis, gauge_shifted_m, on_shell_spinor, slash, GammaBasis, MForm, MValue, Spinor,
};
pub use plane::{kg_residual, operator_eigenvalue, MassEigenstate, PlaneWave};
