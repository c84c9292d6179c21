pub mod asymptotics;
pub mod error;
pub mod grid;
pub mod heat;
pub mod kernel;
pub mod laplacian;
pub mod measure;
pub mod nonlinear;
pub mod par;
pub mod presets;
pub mod quad;
pub mod specfun;
pub mod transform;
pub mod translation;

pub use error::{Error, Result};
