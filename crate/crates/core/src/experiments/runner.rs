use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::{fit_growth, median, paired_bootstrap, GrowthFit, Summary};
use super::{ExperimentConfig, ExperimentError, SourceRule};
use crate::graph::{Family, Graph, VertexId};
use crate::protocols::{
    default_round_cap, run_protocol, run_shared_walks, AgentConfig, Placement, Protocol, Round, SharedWalkOutcome,
};
use crate::rng::{derive_seed, stream, trial_seed, RngSeed, Role, Streams};

pub const CSV_HEADER: &str = "family,n,protocol,alpha,lazy,trials,incomplete,mean,median,q05,q95,min,max,seed";

/// Aggregate of one protocol at one sweep point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub family: String,
    /// Sweep value (the family's size parameter).
    pub size: usize,
    /// Vertex count of the generated graph.
    pub n: usize,
    pub protocol: Protocol,
    pub alpha: f64,
    pub lazy: bool,
    pub trials: usize,
    pub incomplete: usize,
    /// Over completed trials only; `None` if none completed.
    pub summary: Option<Summary>,
    pub seed: RngSeed,
    /// Per-trial broadcast times in trial order, `None` for incomplete.
    pub times: Vec<Option<Round>>,
}

impl ExperimentRow {
    pub fn completed(&self) -> Vec<f64> {
        self.times.iter().flatten().map(|&t| t as f64).collect()
    }

    pub fn median(&self) -> Option<f64> {
        self.summary.map(|s| s.median)
    }

    pub fn min(&self) -> Option<f64> {
        self.summary.map(|s| s.min)
    }

    fn csv_line(&self) -> String {
        let f = |x: Option<f64>| x.map_or_else(|| "NA".to_string(), |x| x.to_string());
        let s = self.summary;
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.family,
            self.n,
            self.protocol.name(),
            self.alpha,
            self.lazy,
            self.trials,
            self.incomplete,
            f(s.map(|s| s.mean)),
            f(s.map(|s| s.median)),
            f(s.map(|s| s.q05)),
            f(s.map(|s| s.q95)),
            f(s.map(|s| s.min)),
            f(s.map(|s| s.max)),
            self.seed
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    /// Sweep order, then protocol order.
    pub rows: Vec<ExperimentRow>,
}

impl ExperimentResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{CSV_HEADER}").unwrap();
        for r in &self.rows {
            writeln!(out, "{}", r.csv_line()).unwrap();
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<(), ExperimentError> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    pub fn rows_for<'a>(&'a self, protocol: &'a str) -> impl Iterator<Item = &'a ExperimentRow> + 'a {
        self.rows.iter().filter(move |r| r.protocol.name() == protocol)
    }

    pub fn row<'a>(&'a self, size: usize, protocol: &'a str) -> Option<&'a ExperimentRow> {
        self.rows_for(protocol).find(|r| r.size == size)
    }

    /// Growth models fitted to `(n, median)` of one protocol.
    pub fn growth(&self, protocol: &str) -> Result<GrowthFit, ExperimentError> {
        let pts: Vec<(f64, f64)> = self.rows_for(protocol).filter_map(|r| Some((r.n as f64, r.median()?))).collect();
        fit_growth(&pts)
    }
}

pub fn agent_config(config: &ExperimentConfig, n: usize) -> AgentConfig {
    match config.placement {
        Placement::Stationary => AgentConfig::stationary(n, config.alpha, config.lazy),
        Placement::OnePerVertex => AgentConfig { count: n, placement: Placement::OnePerVertex, lazy: config.lazy },
    }
}

struct Point {
    size: usize,
    family: Family,
    graph: Graph,
    seed: RngSeed,
    trials: usize,
    round_cap: Round,
    agents: AgentConfig,
}

impl Point {
    fn new(config: &ExperimentConfig, size: usize) -> Result<Point, ExperimentError> {
        let family = config.family.with_size(size);
        let graph = family.build(derive_seed(config.seed, Role::Generator, size as u64))?;
        let n = graph.n();
        if let SourceRule::Fixed(v) = config.source {
            if v as usize >= n {
                return Err(ExperimentError::Config {
                    line: None,
                    msg: format!("source {v} out of range for {} with {n} vertices", family.name()),
                });
            }
        }
        Ok(Point {
            size,
            seed: derive_seed(config.seed, Role::Trial, size as u64),
            trials: config.trials_for(n),
            round_cap: config.round_cap.unwrap_or_else(|| default_round_cap(n)),
            agents: agent_config(config, n),
            family,
            graph,
        })
    }

    fn trial_seed(&self, t: usize) -> RngSeed {
        trial_seed(self.seed, t as u64)
    }

    fn source(&self, rule: SourceRule, seed: RngSeed) -> VertexId {
        match rule {
            SourceRule::Fixed(v) => v,
            SourceRule::Center => 0,
            SourceRule::Leaf => self.family.first_leaf().expect("validated"),
            SourceRule::Uniform => stream(seed, Role::Source, 0).random_range(0..self.graph.n() as VertexId),
        }
    }
}

fn points(config: &ExperimentConfig) -> impl Iterator<Item = Result<Point, ExperimentError>> + '_ {
    config.sweep.iter().map(|&size| Point::new(config, size))
}

/// Runs every `(size, protocol)` cell of the config.
pub fn run_trials(config: &ExperimentConfig) -> Result<ExperimentResult, ExperimentError> {
    config.validate()?;
    let mut rows = Vec::new();
    for point in points(config) {
        let p = point?;
        for &protocol in &config.protocols {
            let times = (0..p.trials)
                .into_par_iter()
                .map(|t| {
                    let seed = p.trial_seed(t);
                    let source = p.source(config.source, seed);
                    run_protocol(&p.graph, source, protocol, &p.agents, seed, p.round_cap).map(|r| r.broadcast_time)
                })
                .collect::<Result<Vec<_>, _>>()?;
            let completed: Vec<f64> = times.iter().flatten().map(|&t| t as f64).collect();
            rows.push(ExperimentRow {
                family: p.family.name().to_string(),
                size: p.size,
                n: p.graph.n(),
                protocol,
                alpha: config.alpha,
                lazy: config.lazy,
                trials: p.trials,
                incomplete: times.len() - completed.len(),
                summary: Summary::of(&completed),
                seed: config.seed,
                times,
            });
        }
    }
    Ok(ExperimentResult { rows })
}

/// `median(A) / median(B)` at one sweep point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub size: usize,
    pub n: usize,
    pub median_a: Option<f64>,
    pub median_b: Option<f64>,
    pub ratio: Option<f64>,
    /// 95% paired-bootstrap interval of the ratio.
    pub ci: Option<(f64, f64)>,
    /// Incomplete trials of either protocol; the cell is suspect if nonzero.
    pub incomplete: usize,
}

/// Median of the completed entries among `idx`.
fn resampled_median(times: &[Option<Round>], idx: &[usize]) -> Option<f64> {
    let v: Vec<f64> = idx.iter().filter_map(|&i| times[i]).map(|t| t as f64).collect();
    median(&v)
}

/// Runs both protocols on the same trial seeds and compares medians.
pub fn sweep_ratio(config: &ExperimentConfig, a: Protocol, b: Protocol) -> Result<Vec<RatioRow>, ExperimentError> {
    let cfg = ExperimentConfig { protocols: vec![a, b], ..config.clone() };
    let result = run_trials(&cfg)?;
    Ok(result
        .rows
        .chunks(2)
        .map(|pair| {
            let (ra, rb) = (&pair[0], &pair[1]);
            let ratio = |x: Option<f64>, y: Option<f64>| Some(x? / y?);
            let mut rng = stream(config.seed, Role::Bootstrap, ra.size as u64);
            let ci = paired_bootstrap(ra.times.len(), &mut rng, |idx| {
                ratio(resampled_median(&ra.times, idx), resampled_median(&rb.times, idx))
            });
            RatioRow {
                size: ra.size,
                n: ra.n,
                median_a: ra.median(),
                median_b: rb.median(),
                ratio: ratio(ra.median(), rb.median()),
                ci,
                incomplete: ra.incomplete + rb.incomplete,
            }
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinRow {
    pub size: usize,
    pub n: usize,
    pub protocol: String,
    pub min: Option<Round>,
    pub completed: usize,
}

/// Smallest completed broadcast time per row.
pub fn empirical_min(result: &ExperimentResult) -> Vec<MinRow> {
    result
        .rows
        .iter()
        .map(|r| MinRow {
            size: r.size,
            n: r.n,
            protocol: r.protocol.name().to_string(),
            min: r.times.iter().flatten().min().copied(),
            completed: r.trials - r.incomplete,
        })
        .collect()
}

/// `median(T_meetx) - median(T_visitx)` at one sweep point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiffRow {
    pub size: usize,
    pub n: usize,
    pub median_visit: Option<f64>,
    pub median_meet: Option<f64>,
    pub diff: Option<f64>,
    pub ci: Option<(f64, f64)>,
    pub incomplete: usize,
}

pub fn compare_visitx_meetx(config: &ExperimentConfig) -> Result<Vec<DiffRow>, ExperimentError> {
    let cfg = ExperimentConfig { protocols: vec![Protocol::VisitExchange, Protocol::MeetExchange], ..config.clone() };
    let result = run_trials(&cfg)?;
    Ok(result
        .rows
        .chunks(2)
        .map(|pair| {
            let (rv, rm) = (&pair[0], &pair[1]);
            let diff = |v: Option<f64>, m: Option<f64>| Some(m? - v?);
            let mut rng = stream(config.seed, Role::Bootstrap, rv.size as u64);
            let ci = paired_bootstrap(rv.times.len(), &mut rng, |idx| {
                diff(resampled_median(&rv.times, idx), resampled_median(&rm.times, idx))
            });
            DiffRow {
                size: rv.size,
                n: rv.n,
                median_visit: rv.median(),
                median_meet: rm.median(),
                diff: diff(rv.median(), rm.median()),
                ci,
                incomplete: rv.incomplete + rm.incomplete,
            }
        })
        .collect())
}

/// Visit-exchange and meet-exchange on shared walks, per sweep point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SharedPoint {
    pub size: usize,
    pub n: usize,
    pub outcomes: Vec<SharedWalkOutcome>,
}

impl SharedPoint {
    /// Trials where all agents were informed later under visit-exchange
    /// than under meet-exchange (or only the latter finished).
    pub fn domination_failures(&self) -> usize {
        self.outcomes
            .iter()
            .filter(|o| match (o.visit_all_agents, o.meet_all_agents) {
                (Some(r), Some(m)) => r > m,
                (None, Some(_)) => true,
                _ => false,
            })
            .count()
    }
}

/// Ignores `config.protocols`.
pub fn run_shared_trials(config: &ExperimentConfig) -> Result<Vec<SharedPoint>, ExperimentError> {
    ExperimentConfig { protocols: vec![Protocol::MeetExchange], ..config.clone() }.validate()?;
    points(config)
        .map(|point| {
            let p = point?;
            let outcomes = (0..p.trials)
                .into_par_iter()
                .map(|t| {
                    let seed = p.trial_seed(t);
                    let source = p.source(config.source, seed);
                    run_shared_walks(&p.graph, source, &p.agents, &mut Streams::new(seed), p.round_cap)
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(SharedPoint { size: p.size, n: p.graph.n(), outcomes })
        })
        .collect()
}
