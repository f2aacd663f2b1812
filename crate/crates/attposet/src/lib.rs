//! Exact computations in the incidence algebra of the attenuated space
//! poset A_q(N,M): subspace enumeration, the raising, lowering and diagonal
//! generators, identity checking, central-character decomposition, quantum
//! group module checks, and Leonard pair machinery.

pub mod algebra;
pub mod error;
pub mod exact;
pub mod gfq;
pub mod leonard;
pub mod poset;
pub mod specdec;
pub mod suite;

pub use error::{Error, Result};
