//! Library surface of the command-line driver: manifest parsing, task
//! assembly, the experiment grid, and the gradient verification command.

pub mod experiment;
pub mod gradcheck;
pub mod manifest;
pub mod tasks;

pub use experiment::{run_experiment, ExperimentReport, MetricRow, SignificanceRow};
pub use gradcheck::{run_gradcheck, GradCheckRun};
pub use manifest::{
    build_config, build_dims, ConfigOverrides, DataSource, ExperimentManifest, SplitOptions,
};
pub use tasks::{build_task, RankingTask, SentimentTask, TaskBundle, TestQuery};
