pub mod algebra;
pub mod error;
pub mod function;
pub mod group;
pub mod norm;
pub mod scalar;
pub mod random;
pub mod spectral;
pub mod lp;
pub mod continuum;
pub mod io;
pub mod verify;
