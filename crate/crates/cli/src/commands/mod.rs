pub mod sigma;
pub mod sweep;
pub mod validate;
pub mod wavefunction;
