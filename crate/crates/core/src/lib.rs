pub mod bisympl;
pub mod calculus;
pub mod error;
pub mod forms;
pub mod json;
pub mod peirce;
pub mod pullback;
pub mod spectral;
pub mod suites;
pub mod triple;

pub use error::{Error, Result};
pub use triple::{Element, Family, TripleSystem, C64};
