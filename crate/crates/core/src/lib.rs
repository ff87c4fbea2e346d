pub mod channels;
pub mod codec;
pub mod entanglement;
pub mod error;
pub mod linalg;
pub mod paperlab;
pub mod states;

pub use error::{Error, Result};
