pub mod auth;
pub mod crypto;
pub mod error;
pub mod schemes;
pub mod sim;
pub mod tiling;
pub mod workloads;

pub use error::{Error, Result};
