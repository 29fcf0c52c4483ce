//! File formats, sweeps and rendering around [`tofcov_core`].

pub mod experiment;
pub mod model;
pub mod probe;
pub mod render;
pub mod sweep;
