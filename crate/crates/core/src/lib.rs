//! Numerical toolkit for measure construction by coverings, vertical density
//! analysis, and first Heisenberg group geometry.

pub mod caratheodory;
pub mod density;
pub mod error;
pub mod experiments;
pub mod heisenberg;
pub mod metric;

pub use error::{GmtError, Result};
