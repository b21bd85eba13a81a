pub mod discrete;
pub mod error;
pub mod gauss;
pub mod io;
pub mod netsearch;
pub mod stability;
pub mod variational;

pub use error::{Error, Result};
