//! Rate-fronthaul regions of the Gaussian uplink with compress-and-forward
//! base stations and a central decoder.
//!
//! All information quantities are in bits per complex dimension (base-2
//! logarithms). The crate is `no_std` + `alloc`; file formats, the command line
//! and parallel campaigns live in the companion `cran-tools` crate.

#![no_std]

extern crate alloc;

pub mod campaign;
pub mod equivalence;
pub mod gap;
pub mod gaussinfo;
pub mod linalg;
pub mod lp;
pub mod model;
pub mod optimize;
pub mod regions;
pub mod submodular;
pub mod subset;

pub use gaussinfo::{InfoError, JointCovariance, Var};
pub use model::{random_instance, ModelError, NetworkInstance, QuantizerB};
