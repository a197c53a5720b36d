pub mod classical;
pub mod divergences;
pub mod error;
pub mod io;
pub mod linalg;
pub mod measures;
pub mod objects;
pub mod structured;
pub mod verify;

pub use error::{Error, Result};
