pub mod error;
pub mod operator;
pub mod random;
pub mod shift;
pub mod signfun;

pub use error::{Error, Result};
pub mod gqsp;
pub mod cooling;
pub mod dyson;
pub mod stats;
pub mod certify;
pub mod experiment;
pub mod format;
