pub mod chain;
pub mod correlations;
pub mod density;
pub mod error;
pub mod kraus;
pub mod manybody;
pub mod optimize;
pub mod schemes;
mod tridiag;

pub use error::{Error, Result};
