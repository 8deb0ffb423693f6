//! Online load balancing on related machines.
//!
//! Machines have speeds; a job of size `p` placed on a machine of speed `s`
//! produces a load of `p / s`. Jobs arrive one at a time and must be assigned
//! irrevocably. This crate implements:
//!
//! * machine smoothing: replacing an arbitrary related-machine set by groups
//!   of identical machines whose processing power grows geometrically
//!   ([`smoothing`]),
//! * makespan minimization for vector jobs on homogeneous related machines
//!   ([`makespan`]),
//! * q-norm minimization for scalar jobs via an online gradient-descent
//!   fractional assignment plus middle-point rounding ([`scalar`]),
//! * q-norm minimization for vector jobs via scalar advice, candidate groups
//!   and target-driven meta-machine assignment ([`vector`]),
//! * adversarial instance generators that realize known lower-bound
//!   constructions ([`adversary`]),
//! * exhaustive and convex-programming oracles usable at desk scale
//!   ([`oracle`]),
//! * a JSON/CSV harness and CLI ([`io`], `relsched` binary).

pub mod adversary;
pub mod core;
pub mod io;
pub mod makespan;
pub mod oracle;
pub mod scalar;
pub mod smoothing;
pub mod subroutines;
pub mod vector;

mod error;

pub use error::{Error, Result};
