pub mod cayley_hamilton;
pub mod cli;
pub mod deformation;
pub mod dieudonne;
pub mod error;
pub mod matrix;
pub mod newton;
pub mod normal_form;
pub mod witt;

pub use error::{Error, Result};
