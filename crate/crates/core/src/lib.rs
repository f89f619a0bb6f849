pub mod constitutive;
pub mod grid;
pub mod hetfield;
pub mod quadrature;
pub mod solver;
pub mod graph;
pub mod graphmetrics;
pub mod netbuilder;
pub mod profiler;
pub mod fitlab;
pub mod config;
pub mod pipeline;

/// Any failure of a command: bad configuration or a failing stage.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] config::ConfigError),
    #[error(transparent)]
    Pipeline(#[from] pipeline::PipelineError),
}
