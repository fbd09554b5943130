//! Random instances and the experiment harness.

mod experiment;
mod generate;

pub use experiment::{run_experiment, summarize, write_csv, ExperimentConfig, ExperimentRow, Table, CSV_HEADER};
pub use generate::{gen_random, GenSpec, Stream, Structured};
