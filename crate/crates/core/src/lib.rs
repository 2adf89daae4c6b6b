//! Resilience enhancement of linear networks by periodic switching between
//! two commuting topologies.

pub mod design;
pub mod error;
pub mod floquet;
pub mod generator;
pub mod io;
pub mod linalg;
pub mod lp;
pub mod optswitch;
pub mod scenario;
pub mod sparsity;

pub use error::{Error, ErrorClass, Result};
pub use linalg::{Network, Tolerances};
