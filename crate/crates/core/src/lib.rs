pub mod cli;
pub mod config;
pub mod diagnostics;
pub mod grid;
pub mod models;
pub mod output;
pub mod quadrature;
pub mod schemes;
pub mod snapshot;
pub mod spectral;
pub mod steady_states;
