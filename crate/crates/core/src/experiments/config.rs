//! Flat `key = value` experiment configs.
//!
//! ```text
//! # comment
//! family = regular          # any generator family name
//! d = 0                     # regular / clique-path degree; 0 picks ceil(log2 n)
//! sweep = 1024, 2048, 4096  # primary size parameter of the family
//! protocols = push, visit-exchange
//! alpha = 1                 # agents per vertex
//! placement = stationary    # or one-per-vertex
//! lazy = false
//! source = center           # center | leaf | uniform | <vertex id>
//! trials = auto             # or a count; auto is 200 up to 4096 vertices, 50 above
//! seed = 42
//! round_cap = default       # or a number of rounds
//! gamma = 5.43              # t-visit-exchange cap, default 2e * alpha
//! floor = standard          # r-visit-exchange floor, or agents per neighbor
//! ```
//!
//! Keys may appear in any order, at most once. `Display` writes every key, and
//! parsing that output gives back the same config.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::graph::{Family, VertexId};
use crate::protocols::{Placement, Protocol, RFloor, Round};
use crate::rng::RngSeed;

/// Which vertex starts informed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceRule {
    Fixed(VertexId),
    /// Vertex `0`: the center, root or first ring vertex of every family.
    Center,
    /// The family's first leaf.
    Leaf,
    /// Uniform vertex, drawn per trial.
    Uniform,
}

impl fmt::Display for SourceRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourceRule::Fixed(v) => write!(f, "{v}"),
            SourceRule::Center => f.write_str("center"),
            SourceRule::Leaf => f.write_str("leaf"),
            SourceRule::Uniform => f.write_str("uniform"),
        }
    }
}

impl FromStr for SourceRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "center" => SourceRule::Center,
            "leaf" => SourceRule::Leaf,
            "uniform" => SourceRule::Uniform,
            _ => SourceRule::Fixed(s.parse().map_err(|_| format!("unknown source rule `{s}`"))?),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Family template; its size parameter is replaced by each sweep value.
    pub family: Family,
    pub sweep: Vec<usize>,
    pub protocols: Vec<Protocol>,
    pub alpha: f64,
    pub placement: Placement,
    pub lazy: bool,
    pub source: SourceRule,
    /// `None`: 200 trials up to 4096 vertices, 50 above.
    pub trials: Option<usize>,
    pub seed: RngSeed,
    /// `None`: the protocol default for the graph size.
    pub round_cap: Option<Round>,
}

impl ExperimentConfig {
    pub fn new(family: Family, sweep: Vec<usize>, protocols: Vec<Protocol>) -> Self {
        ExperimentConfig {
            family,
            sweep,
            protocols,
            alpha: 1.0,
            placement: Placement::Stationary,
            lazy: false,
            source: SourceRule::Center,
            trials: None,
            seed: RngSeed(0),
            round_cap: None,
        }
    }

    pub fn trials_for(&self, n: usize) -> usize {
        self.trials.unwrap_or(if n <= 1 << 12 { 200 } else { 50 })
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |m: String| Err(ExperimentError::Config { line: None, msg: m });
        if self.sweep.is_empty() {
            return bad("sweep list is empty".into());
        }
        if self.protocols.is_empty() {
            return bad("no protocols given".into());
        }
        if self.trials == Some(0) {
            return bad("trials must be at least 1".into());
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be a finite non-negative number, got {}", self.alpha));
        }
        if self.source == SourceRule::Leaf && self.family.first_leaf().is_none() {
            return bad(format!("family {} has no leaves", self.family.name()));
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self, ExperimentError> {
        let err = |line: usize, msg: String| ExperimentError::Config { line: Some(line), msg };
        let mut seen: Vec<(String, usize, String)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap().trim();
            if content.is_empty() {
                continue;
            }
            let (k, v) = content.split_once('=').ok_or_else(|| err(line, format!("expected `key = value`, got `{content}`")))?;
            let (k, v) = (k.trim().to_string(), v.trim().to_string());
            let k = if k == "protocol" { "protocols".to_string() } else { k };
            if !KEYS.contains(&k.as_str()) {
                return Err(err(line, format!("unknown key `{k}`")));
            }
            if seen.iter().any(|(s, _, _)| *s == k) {
                return Err(err(line, format!("duplicate key `{k}`")));
            }
            seen.push((k, line, v));
        }
        let get = |k: &str| seen.iter().find(|(s, _, _)| s == k).map(|(_, l, v)| (*l, v.as_str()));
        fn num<T: FromStr>(line: usize, key: &str, v: &str) -> Result<T, ExperimentError> {
            v.parse().map_err(|_| ExperimentError::Config { line: Some(line), msg: format!("invalid {key} `{v}`") })
        }

        let (fline, fname) = get("family").ok_or(ExperimentError::Config { line: None, msg: "missing key `family`".into() })?;
        let d = match get("d") {
            Some((l, v)) => num(l, "d", v)?,
            None => 0,
        };
        let family = family_template(fname, d).ok_or_else(|| err(fline, format!("unknown family `{fname}`")))?;

        let (sline, sweep_text) = get("sweep").ok_or(ExperimentError::Config { line: None, msg: "missing key `sweep`".into() })?;
        let sweep = list(sweep_text).map(|s| num(sline, "sweep value", s)).collect::<Result<Vec<usize>, _>>()?;
        if sweep.is_empty() {
            return Err(err(sline, "sweep list is empty".into()));
        }

        let alpha = match get("alpha") {
            Some((l, v)) => num(l, "alpha", v)?,
            None => 1.0,
        };
        let gamma: Option<f64> = get("gamma").map(|(l, v)| num(l, "gamma", v)).transpose()?;
        let floor = match get("floor") {
            None | Some((_, "standard")) => RFloor::Standard,
            Some((l, v)) => RFloor::PerDegree(num(l, "floor", v)?),
        };
        let (pline, ptext) =
            get("protocols").ok_or(ExperimentError::Config { line: None, msg: "missing key `protocols`".into() })?;
        let protocols = list(ptext)
            .map(|name| {
                let p = Protocol::parse(name, alpha).ok_or_else(|| err(pline, format!("unknown protocol `{name}`")))?;
                Ok(match p {
                    Protocol::TVisitExchange { gamma: g } => Protocol::TVisitExchange { gamma: gamma.unwrap_or(g) },
                    Protocol::RVisitExchange { .. } => Protocol::RVisitExchange { floor },
                    p => p,
                })
            })
            .collect::<Result<Vec<_>, ExperimentError>>()?;
        if protocols.is_empty() {
            return Err(err(pline, "no protocols given".into()));
        }

        let placement = match get("placement") {
            None | Some((_, "stationary")) => Placement::Stationary,
            Some((_, "one-per-vertex")) => Placement::OnePerVertex,
            Some((l, v)) => return Err(err(l, format!("unknown placement `{v}`"))),
        };
        let lazy = match get("lazy") {
            Some((l, v)) => num(l, "lazy", v)?,
            None => false,
        };
        let source = match get("source") {
            Some((l, v)) => v.parse().map_err(|m| err(l, m))?,
            None => SourceRule::Center,
        };
        let trials = match get("trials") {
            None | Some((_, "auto")) => None,
            Some((l, v)) => {
                let t: usize = num(l, "trials", v)?;
                if t == 0 {
                    return Err(err(l, "trials must be at least 1".into()));
                }
                Some(t)
            }
        };
        let seed = match get("seed") {
            Some((l, v)) => RngSeed(num(l, "seed", v)?),
            None => RngSeed(0),
        };
        let round_cap = match get("round_cap") {
            None | Some((_, "default")) => None,
            Some((l, v)) => Some(num(l, "round_cap", v)?),
        };
        let config = ExperimentConfig { family, sweep, protocols, alpha, placement, lazy, source, trials, seed, round_cap };
        if let Some((l, _)) = get("source") {
            config.validate().map_err(|e| match e {
                ExperimentError::Config { msg, .. } => err(l, msg),
                e => e,
            })?;
        } else {
            config.validate()?;
        }
        Ok(config)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self, ExperimentError> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| ExperimentError::Config { line: None, msg: format!("{}: {e}", path.as_ref().display()) })?;
        Self::parse(&text)
    }
}

const KEYS: [&str; 13] = [
    "family",
    "d",
    "sweep",
    "protocols",
    "alpha",
    "placement",
    "lazy",
    "source",
    "trials",
    "seed",
    "round_cap",
    "gamma",
    "floor",
];

fn list(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty())
}

/// Family by name with size `0`; `d` applies to the regular and clique-path
/// families.
pub fn family_template(name: &str, d: usize) -> Option<Family> {
    Some(match name {
        "star" => Family::Star { leaves: 0 },
        "double-star" => Family::DoubleStar { n: 0 },
        "heavy-tree" => Family::HeavyTree { n: 0 },
        "siamese-trees" => Family::SiameseTrees { n: 0 },
        "cycle-stars-cliques" => Family::CycleStarsCliques { m: 0 },
        "regular" => Family::Regular { n: 0, d },
        "clique-path" => Family::CliquePath { k: 0, d },
        "complete" => Family::Complete { n: 0 },
        "cycle" => Family::Cycle { n: 0 },
        _ => return None,
    })
}

impl fmt::Display for ExperimentConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |xs: Vec<String>| xs.join(", ");
        writeln!(f, "family = {}", self.family.name())?;
        if let Family::Regular { d, .. } | Family::CliquePath { d, .. } = self.family {
            writeln!(f, "d = {d}")?;
        }
        writeln!(f, "sweep = {}", join(self.sweep.iter().map(|s| s.to_string()).collect()))?;
        writeln!(f, "protocols = {}", join(self.protocols.iter().map(|p| p.name().to_string()).collect()))?;
        writeln!(f, "alpha = {}", self.alpha)?;
        let placement = match self.placement {
            Placement::Stationary => "stationary",
            Placement::OnePerVertex => "one-per-vertex",
        };
        writeln!(f, "placement = {placement}")?;
        writeln!(f, "lazy = {}", self.lazy)?;
        writeln!(f, "source = {}", self.source)?;
        match self.trials {
            Some(t) => writeln!(f, "trials = {t}")?,
            None => writeln!(f, "trials = auto")?,
        }
        writeln!(f, "seed = {}", self.seed.0)?;
        match self.round_cap {
            Some(c) => writeln!(f, "round_cap = {c}")?,
            None => writeln!(f, "round_cap = default")?,
        }
        for p in &self.protocols {
            match p {
                Protocol::TVisitExchange { gamma } => writeln!(f, "gamma = {gamma}")?,
                Protocol::RVisitExchange { floor: RFloor::PerDegree(x) } => writeln!(f, "floor = {x}")?,
                Protocol::RVisitExchange { floor: RFloor::Standard } => writeln!(f, "floor = standard")?,
                _ => {}
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# star sweep
family = star
sweep = 256, 512,1024
protocols = visit-exchange, meet-exchange
lazy = true
trials = 20
seed = 7
";

    #[test]
    fn parses_sample() {
        let c = ExperimentConfig::parse(SAMPLE).unwrap();
        assert_eq!(c.family, Family::Star { leaves: 0 });
        assert_eq!(c.sweep, vec![256, 512, 1024]);
        assert_eq!(c.protocols, vec![Protocol::VisitExchange, Protocol::MeetExchange]);
        assert!(c.lazy);
        assert_eq!(c.trials, Some(20));
        assert_eq!(c.seed, RngSeed(7));
        assert_eq!(c.source, SourceRule::Center);
    }

    #[test]
    fn round_trips() {
        let mut c = ExperimentConfig::parse(SAMPLE).unwrap();
        assert_eq!(ExperimentConfig::parse(&c.to_string()).unwrap(), c);
        c.family = Family::Regular { n: 0, d: 5 };
        c.protocols = vec![Protocol::TVisitExchange { gamma: 7.25 }, Protocol::RVisitExchange { floor: RFloor::PerDegree(0.3) }];
        c.source = SourceRule::Fixed(3);
        c.round_cap = Some(99);
        c.trials = None;
        assert_eq!(ExperimentConfig::parse(&c.to_string()).unwrap(), c);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let line_of = |text: &str| match ExperimentConfig::parse(text) {
            Err(ExperimentError::Config { line, .. }) => line,
            other => panic!("expected a config error, got {other:?}"),
        };
        assert_eq!(line_of("family = star\nsweep =\nprotocols = push\n"), Some(2));
        assert_eq!(line_of("family = star\nsweep = 4\nprotocols = push\nbogus = 1\n"), Some(4));
        assert_eq!(line_of("family = star\nsweep = 4\nsweep = 5\nprotocols = push\n"), Some(3));
        assert_eq!(line_of("family = blob\nsweep = 4\nprotocols = push\n"), Some(1));
        assert_eq!(line_of("family = star\nsweep = 4\nprotocols = shout\n"), Some(3));
        assert_eq!(line_of("family = star\nsweep = 4\nprotocols = push\ntrials = 0\n"), Some(4));
        assert_eq!(line_of("family = star\nsweep = x\nprotocols = push\n"), Some(2));
        assert_eq!(line_of("family = regular\nsweep = 4\nprotocols = push\nsource = leaf\n"), Some(4));
        assert_eq!(line_of("sweep = 4\nprotocols = push\n"), None);
        assert_eq!(line_of("family star\n"), Some(1));
    }
}
