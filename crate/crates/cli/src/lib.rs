//! Experiment driver for `ringcap`: TOML configs, CSV sweeps and the routing
//! advisor behind the `ringcap` binary.

pub mod advise;
pub mod config;
pub mod sweep;

pub use advise::{advise, Advice, MeasuredCapacity};
pub use config::{
    apply_override, ConfigError, Engine, ExperimentConfig, FanoutSpec, OneOrMany, StrategyChoice,
};
pub use sweep::{
    run_sweep, to_csv_string, write_csv, Row, SweepError, SweepOutput, CSV_SCHEMA_VERSION, HEADER,
};
