pub mod bounds;
pub mod codes;
pub mod decoders;
pub mod error;
pub mod experiment;
pub mod model;
pub mod numerics;

pub use error::{Error, Result};
