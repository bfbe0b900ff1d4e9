//! Exact analysis of finite point configurations in projective space and
//! their dual hyperplane arrangements.

pub mod classify;
pub mod conditions;
pub mod configlib;
pub mod duality;
pub mod error;
pub mod geometry;
pub mod idealdims;
pub mod linalg;
mod modular;
pub mod poly;
pub mod scalar;

pub use error::{ArrError, Result};
