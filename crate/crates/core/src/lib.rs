//! Transient probabilities and moments of the time-fractional linear
//! birth-death process with immigration at extinction, and of its pure-birth
//! and two-state death special cases.

pub mod adm;
pub mod birth;
pub mod death;
pub mod error;
pub mod mc;
pub mod ode;
pub mod quadrature;
pub mod special;
pub mod summation;

pub use error::{Error, Result};
