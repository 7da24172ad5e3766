//! Monte-Carlo trials over size sweeps, summary statistics, growth fits and
//! the CSV output format.
//!
//! Every sweep point builds one graph from a seed derived from the master
//! seed and the size, and trial `i` at that point runs on a seed derived from
//! the point and `i`. Trials run in parallel; results are collected in trial
//! order, so output depends only on the config.

mod config;
mod runner;
mod stats;

use thiserror::Error;

use crate::graph::GraphError;
use crate::protocols::ProtocolError;

pub use config::{family_template, ExperimentConfig, SourceRule};
pub use runner::{
    agent_config, compare_visitx_meetx, empirical_min, run_shared_trials, run_trials, sweep_ratio, DiffRow,
    ExperimentResult, ExperimentRow, MinRow, RatioRow, SharedPoint, CSV_HEADER,
};
pub use stats::{
    fit_growth, median, paired_bootstrap, quantile_sorted, GrowthFit, GrowthModel, ModelFit, Summary,
    BOOTSTRAP_RESAMPLES,
};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("{}", config_message(.line, .msg))]
    Config { line: Option<usize>, msg: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error("fit error: {0}")]
    Fit(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn config_message(line: &Option<usize>, msg: &str) -> String {
    match line {
        Some(l) => format!("config line {l}: {msg}"),
        None => format!("config: {msg}"),
    }
}
