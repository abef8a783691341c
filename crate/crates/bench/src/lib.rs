//! Benchmark harness for `submax-core`: runs algorithm suites over instance
//! corpora, verifies their guarantees where brute force is feasible, and
//! renders reproducible reports.

pub mod config;
pub mod error;
pub mod report;
pub mod run;
pub mod scaling;

pub use config::{Algorithm, BenchConfig, GeneratorSpec, InstanceSource, OutputFormat, SourceKind};
pub use error::{BenchError, Result};
pub use report::{emit, emit_csv, emit_json, emit_markdown, Aggregate, Row, RunReport, CSV_HEADER};
pub use run::{run, run_config_file, run_in, MAX_VERIFY_M};
pub use scaling::{least_squares, scaling_experiment, scaling_experiment_with, Family, ScalingFit, ScalingPoint};

/// Exit status for a finished run: 0 clean, 1 on failures, 2 on bad configuration.
pub fn exit_code(result: &Result<RunReport>) -> i32 {
    match result {
        Ok(report) => report.exit_code(),
        Err(_) => 2,
    }
}
