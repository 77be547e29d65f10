//! Command line and JSON service for the two-envelope game engine.

pub mod api;
pub mod cli;
mod error;
pub mod service;
pub mod session;

pub use error::{AppError, Result};
