use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use walkcast::coupling::{run_coupled, verify_transcript, CouplingMode, CouplingTranscript};
use walkcast::experiments::{run_trials, ExperimentConfig, SourceRule};
use walkcast::protocols::{default_round_cap, run_protocol, RFloor};
use walkcast::rng::{derive_seed, stream, Role};
use walkcast::{AgentConfig, Family, Graph, Placement, Protocol, Round, RngSeed, VertexId};

const EXIT_USAGE: u8 = 1;
const EXIT_INCOMPLETE: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Parser)]
#[command(name = "walkcast", version, about = "Randomized broadcast simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a graph and write it as an edge list.
    Generate {
        family: String,
        #[command(flatten)]
        size: SizeArgs,
        /// Seed for randomized families.
        #[arg(long)]
        seed: Option<u64>,
        /// Output file; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Write Graphviz DOT instead of an edge list.
        #[arg(long)]
        dot: bool,
    },
    /// Run one broadcast and print the result as JSON.
    Run {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value = "push")]
        protocol: String,
        #[command(flatten)]
        agents: AgentArgs,
        /// Threshold for t-visit-exchange; defaults to 2e * alpha.
        #[arg(long)]
        gamma: Option<f64>,
        /// Per-degree floor for r-visit-exchange; defaults to |A|/(2n).
        #[arg(long)]
        floor: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        round_cap: Option<Round>,
    },
    /// Run a sweep from a config file and write CSV.
    Sweep {
        config: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Worker threads.
        #[arg(long, env = "WALKCAST_JOBS")]
        jobs: Option<usize>,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run coupled push / visit-exchange and write the transcript as JSON.
    Couple {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value = "even", value_parser = ["even", "odd", "independent"])]
        mode: String,
        #[command(flatten)]
        agents: AgentArgs,
        /// Per-degree agent floor (odd mode only); `standard` for |A|/(2n).
        #[arg(long)]
        floor: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        round_cap: Option<Round>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Re-check a coupling transcript.
    Verify { transcript: PathBuf },
}

#[derive(Args)]
struct SizeArgs {
    #[arg(long)]
    leaves: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Args)]
struct GraphArgs {
    /// Edge-list file.
    #[arg(long, conflicts_with = "family")]
    graph: Option<PathBuf>,
    #[arg(long)]
    family: Option<String>,
    #[command(flatten)]
    size: SizeArgs,
    /// Source vertex, or `center`, `leaf`, `uniform`.
    #[arg(long, default_value = "0")]
    source: String,
}

#[derive(Args)]
struct AgentArgs {
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Exact agent count; overrides alpha.
    #[arg(long)]
    agents: Option<usize>,
    #[arg(long, default_value = "stationary", value_parser = ["stationary", "one-per-vertex"])]
    placement: String,
    #[arg(long)]
    lazy: bool,
}

enum Failure {
    Usage(String),
    Incomplete,
    Verify(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CliResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Generate { family, size, seed, output, dot } => generate(&family, &size, seed, output, dot),
        Command::Run { graph, protocol, agents, gamma, floor, seed, round_cap } => {
            run(&graph, &protocol, &agents, gamma, floor, seed, round_cap)
        }
        Command::Sweep { config, output, jobs, seed } => sweep(&config, output, jobs, seed),
        Command::Couple { graph, mode, agents, floor, seed, round_cap, output } => {
            couple(&graph, &mode, &agents, floor.as_deref(), seed, round_cap, output)
        }
        Command::Verify { transcript } => verify(&transcript),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Incomplete) => ExitCode::from(EXIT_INCOMPLETE),
        Err(Failure::Verify(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(EXIT_VERIFY)
        }
    }
}

fn effective_seed(seed: Option<u64>) -> RngSeed {
    let s = seed.unwrap_or_else(rand::random);
    eprintln!("seed: {s}");
    RngSeed(s)
}

fn family_from(name: &str, size: &SizeArgs) -> Result<Family, Failure> {
    let flags = [("leaves", size.leaves), ("n", size.n), ("m", size.m), ("d", size.d), ("k", size.k)];
    let (primary, allowed): (&str, &[&str]) = match name {
        "star" => ("leaves", &["leaves"]),
        "double-star" | "heavy-tree" | "siamese-trees" | "complete" | "cycle" => ("n", &["n"]),
        "regular" => ("n", &["n", "d"]),
        "cycle-stars-cliques" => ("m", &["m"]),
        "clique-path" => ("k", &["k", "d"]),
        _ => return Err(Failure::Usage(format!("unknown family `{name}` (one of {})", Family::NAMES.join(", ")))),
    };
    if let Some((flag, _)) = flags.iter().find(|(f, v)| v.is_some() && !allowed.contains(f)) {
        return Err(Failure::Usage(format!("--{flag} does not apply to {name}")));
    }
    let get = |f: &str| flags.iter().find(|(g, _)| *g == f).and_then(|(_, v)| *v);
    let value = get(primary).ok_or_else(|| Failure::Usage(format!("{name} needs --{primary}")))?;
    let d = get("d").unwrap_or(0);
    if name == "clique-path" && d == 0 {
        return Err(Failure::Usage("clique-path needs --d".into()));
    }
    Ok(walkcast::experiments::family_template(name, d).expect("known family").with_size(value))
}

fn write_output(path: Option<&Path>, text: &str) -> CliResult {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn generate(name: &str, size: &SizeArgs, seed: Option<u64>, output: Option<PathBuf>, dot: bool) -> CliResult {
    let family = family_from(name, size)?;
    let seed = effective_seed(seed);
    let graph = family.build(seed)?;
    let text = if dot { graph.to_dot() } else { graph.to_edge_list() };
    write_output(output.as_deref(), &text)?;
    eprintln!("n = {}, m = {}", graph.n(), graph.m());
    Ok(())
}

struct Loaded {
    graph: Graph,
    family: Option<Family>,
    source: VertexId,
}

fn load_graph(args: &GraphArgs, seed: RngSeed) -> Result<Loaded, Failure> {
    let (graph, family) = match (&args.graph, &args.family) {
        (Some(path), None) => {
            if [args.size.leaves, args.size.n, args.size.m, args.size.d, args.size.k].iter().any(Option::is_some) {
                return Err(Failure::Usage("size flags only apply with --family".into()));
            }
            (Graph::load_edge_list(path)?, None)
        }
        (None, Some(name)) => {
            let family = family_from(name, &args.size)?;
            let graph = family.build(derive_seed(seed, Role::Generator, family.size() as u64))?;
            (graph, Some(family))
        }
        _ => return Err(Failure::Usage("give exactly one of --graph or --family".into())),
    };
    let rule: SourceRule = args.source.parse().map_err(Failure::Usage)?;
    let source = match rule {
        SourceRule::Fixed(v) => v,
        SourceRule::Center => 0,
        SourceRule::Leaf => family
            .as_ref()
            .and_then(Family::first_leaf)
            .ok_or_else(|| Failure::Usage("source `leaf` needs a family with leaves".into()))?,
        SourceRule::Uniform => {
            use rand::Rng;
            stream(seed, Role::Source, 0).random_range(0..graph.n() as VertexId)
        }
    };
    if source as usize >= graph.n() {
        return Err(Failure::Usage(format!("source {source} out of range for n = {}", graph.n())));
    }
    Ok(Loaded { graph, family, source })
}

fn agent_config(args: &AgentArgs, n: usize) -> Result<AgentConfig, Failure> {
    if !(args.alpha > 0.0 && args.alpha.is_finite()) {
        return Err(Failure::Usage("--alpha must be positive".into()));
    }
    if args.placement == "one-per-vertex" {
        if args.agents.is_some_and(|a| a != n) {
            return Err(Failure::Usage(format!("one-per-vertex placement needs exactly {n} agents")));
        }
        return Ok(AgentConfig { count: n, placement: Placement::OnePerVertex, lazy: args.lazy });
    }
    let mut cfg = AgentConfig::stationary(n, args.alpha, args.lazy);
    if let Some(a) = args.agents {
        cfg.count = a;
    }
    Ok(cfg)
}

fn run(
    graph_args: &GraphArgs,
    protocol: &str,
    agent_args: &AgentArgs,
    gamma: Option<f64>,
    floor: Option<f64>,
    seed: Option<u64>,
    round_cap: Option<Round>,
) -> CliResult {
    let seed = effective_seed(seed);
    let mut proto = Protocol::parse(protocol, agent_args.alpha)
        .ok_or_else(|| Failure::Usage(format!("unknown protocol `{protocol}`")))?;
    match (&mut proto, gamma, floor) {
        (Protocol::TVisitExchange { gamma: g }, Some(v), None) => *g = v,
        (Protocol::RVisitExchange { floor: f }, None, Some(v)) => *f = RFloor::PerDegree(v),
        (_, None, None) => {}
        _ => return Err(Failure::Usage("--gamma / --floor do not apply to this protocol".into())),
    }
    let Loaded { graph, family, source } = load_graph(graph_args, seed)?;
    let agents = agent_config(agent_args, graph.n())?;
    if matches!(proto, Protocol::MeetExchange) && !agents.lazy && graph.is_bipartite() {
        eprintln!("warning: meet-exchange on a bipartite graph without --lazy may never complete");
    }
    let cap = round_cap.unwrap_or_else(|| default_round_cap(graph.n()));
    let result = run_protocol(&graph, source, proto, &agents, seed, cap)?;
    let out = json!({
        "protocol": proto.name(),
        "family": family.as_ref().map(Family::name),
        "n": graph.n(),
        "m": graph.m(),
        "source": source,
        "agents": proto.uses_agents().then_some(agents.count),
        "lazy": agents.lazy,
        "seed": seed.0,
        "round_cap": cap,
        "broadcast_time": result.broadcast_time,
        "complete": result.is_complete(),
    });
    println!("{}", serde_json::to_string_pretty(&out)?);
    if result.is_complete() {
        Ok(())
    } else {
        eprintln!("round cap {cap} reached before completion");
        Err(Failure::Incomplete)
    }
}

fn sweep(path: &Path, output: Option<PathBuf>, jobs: Option<usize>, seed: Option<u64>) -> CliResult {
    let mut config = ExperimentConfig::load(path)?;
    if let Some(s) = seed {
        config.seed = RngSeed(s);
    }
    eprintln!("seed: {}", config.seed);
    if let Some(j) = jobs {
        if j == 0 {
            return Err(Failure::Usage("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(j).build_global()?;
    }
    let result = run_trials(&config)?;
    write_output(output.as_deref(), &result.to_csv())?;
    let incomplete: usize = result.rows.iter().map(|r| r.incomplete).sum();
    if incomplete > 0 {
        eprintln!("{incomplete} trials hit the round cap");
        return Err(Failure::Incomplete);
    }
    Ok(())
}

fn couple(
    graph_args: &GraphArgs,
    mode: &str,
    agent_args: &AgentArgs,
    floor: Option<&str>,
    seed: Option<u64>,
    round_cap: Option<Round>,
    output: Option<PathBuf>,
) -> CliResult {
    let mode = match mode {
        "even" => CouplingMode::Even,
        "odd" => CouplingMode::Odd,
        _ => CouplingMode::Independent,
    };
    let r_floor = match floor {
        None => None,
        Some("standard") => Some(RFloor::Standard),
        Some(v) => Some(RFloor::PerDegree(v.parse().map_err(|_| Failure::Usage(format!("bad floor `{v}`")))?)),
    };
    let seed = effective_seed(seed);
    let Loaded { graph, source, .. } = load_graph(graph_args, seed)?;
    let agents = agent_config(agent_args, graph.n())?;
    let cap = round_cap.unwrap_or_else(|| default_round_cap(graph.n()));
    let tr = run_coupled(&graph, source, &agents, seed, cap, mode, r_floor)?;
    write_output(output.as_deref(), &(serde_json::to_string(&tr)? + "\n"))?;
    eprintln!(
        "mode {}: push {}, visit-exchange {}",
        mode.name(),
        fmt_time(tr.push_time),
        fmt_time(tr.visitx_time)
    );
    if tr.is_complete() {
        Ok(())
    } else {
        Err(Failure::Incomplete)
    }
}

fn fmt_time(t: Option<Round>) -> String {
    t.map_or("incomplete".into(), |t| t.to_string())
}

fn verify(path: &Path) -> CliResult {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let tr: CouplingTranscript =
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("malformed transcript: {e}")))?;
    let report = verify_transcript(&tr).map_err(|e| Failure::Verify(e.to_string()))?;
    let out = json!({
        "ok": true,
        "mode": tr.mode.name(),
        "rounds": report.rounds,
        "tau_bound_checked": report.tau_bound_checked,
        "walks_checked": report.walks_checked,
        "oracle_entries": report.oracle_entries,
    });
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(())
}
