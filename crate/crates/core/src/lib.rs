// Negated float comparisons are how NaN inputs get rejected throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod locality;
pub mod minkowski;
pub mod nr_limit;
pub mod propagator;
pub mod quad;
pub mod sum;
pub mod wave;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub type Amplitude = Complex64;
