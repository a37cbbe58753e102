pub mod classify;
pub mod cpoly;
pub mod error;
pub mod flowstats;
pub mod odeint;
pub mod potential;
pub mod pwcycles;
pub mod report;
pub mod system;

pub use error::{Error, Result};
pub use num_complex::Complex64;
