use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid topology: {0}")]
    InvalidTopology(String),
    #[error("node {node} outside 1..={n_nodes}")]
    NodeOutOfRange { node: usize, n_nodes: usize },
    #[error("wavelength {wavelength} outside 1..={n_wavelengths}")]
    WavelengthOutOfRange {
        wavelength: usize,
        n_wavelengths: usize,
    },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid traffic model: {0}")]
    InvalidTraffic(String),
    #[error("instance too large for exact enumeration: {0}")]
    InstanceTooLarge(String),
    #[error("no utilization observed")]
    NoUtilization,
}

pub type Result<T> = std::result::Result<T, Error>;
