//! Two-envelope game engine.
//!
//! A host draws an initial amount from a prior, primes a second envelope by
//! halving or doubling it, and hands one envelope to the agent, who sees its
//! content `y` and may switch. This crate models the host ([`host`]), the
//! priors ([`density`]), the conditional expected benefit of switching and
//! the strategies derived from it ([`benefit`]), and independent checks by
//! enumeration and simulation ([`oracle`]).

pub mod benefit;
pub mod density;
pub mod dyadic;
mod error;
pub mod host;
pub mod oracle;
pub mod rng;

pub use error::{Error, Result};
