pub mod algcore;
pub mod coder;
pub mod error;
pub mod exactla;
pub mod fixtures;
pub mod ingest;
pub mod kaledin;
pub mod spectral;

pub use error::{Error, Result};
