//! Deformed-oscillator (f-oscillator) states in truncated Fock space and
//! their tomographic, entropic, entanglement and uncertainty properties.

// `!(x > 0.0)` is used on purpose so NaN lands in the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod deformation;
pub mod entanglement;
pub mod entropic;
pub mod error;
pub mod figures;
pub mod grid;
pub mod special_fn;
pub mod states;
pub mod tomography;
pub mod uncertainty;
pub mod verify;

pub use deformation::{DeformationFamily, DeformationSpec};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use states::{FockAmplitudes, TwoModeAmplitudes};
