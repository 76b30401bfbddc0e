//! Continuous space-time finite element discretisation of the acoustic wave
//! equation in Hamiltonian form, with postprocessing and a posteriori error
//! estimation.

pub mod aposteriori;
pub mod error;
pub mod fem;
pub mod linalg;
pub mod mesh;
pub mod postprocess;
pub mod presets;
pub mod solver;
pub mod time;

pub use error::{Error, Result};
