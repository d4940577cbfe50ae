//! Linearized Euler dynamics of monotone shear flows in a periodic channel,
//! one horizontal Fourier mode at a time, with the norm, rate and
//! boundary-layer diagnostics used to study inviscid damping and
//! boundary singularity formation.

pub mod asymptotics;
pub mod config;
pub mod corpus;
pub mod diagnostics;
pub mod elliptic;
pub mod evolve;
pub mod experiment;
pub mod grid;
pub mod norms;
pub mod profiles;
pub mod quadrature;
