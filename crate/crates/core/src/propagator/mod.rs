//! The sliced covariant path integral on a space-time lattice.

mod chains;
mod compose;
mod evolve;
mod fresnel;
mod kernel;
mod lattice;
mod params;
mod transfer;

pub use chains::{enumerate_chains, ChainSums, MAX_CHAINS};
pub use compose::{compose, KernelOnLattice};
pub use evolve::{continuum_multiplier, evolve_field, stability_number};
pub use fresnel::{ft_factor, st_coefficient, FresnelEstimate, QuadConfig, SpatialDomain};
pub use kernel::{kernel_prefactor, single_step_kernel};
pub use lattice::{ComplexField, SliceLattice};
pub use params::KernelParams;
pub use transfer::{observable_expectation, sliced_propagator, Observable, Propagation};
