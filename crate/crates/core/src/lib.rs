pub mod algebra;
pub mod distance;
pub mod error;
pub mod khomology;
pub mod lp;
pub mod operator;
pub mod random;
pub mod triple;
pub mod wasserstein;

pub use error::{Error, Result};
