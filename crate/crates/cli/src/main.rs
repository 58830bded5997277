use std::collections::HashMap;
use std::fs;
use std::io::{self as stdio, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicU64, Ordering};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use iodgraph::census::{run_census_with, CensusConfig, CensusMode, CensusSpec};
use iodgraph::constructions;
use iodgraph::crossover::{
    crossover, CrossoverPair, CrossoverStrategy, LinkPairing, MatchingMode, MatchingSpec, NodeNaming,
    PartitionStrategy,
};
use iodgraph::evolution::{evolve, EvolutionConfig};
use iodgraph::io;
use iodgraph::partition::{
    enumerate_partitions, is_input_contiguous, is_output_contiguous, membrane, IoPartition, PartitionFilter,
};
use iodgraph::{classify, validate, Error, Execution, Informativeness, IodGraph};

#[derive(Parser)]
#[command(name = "iodgraph", version, about = "Inspect, recombine and census IOD graphs")]
struct Cli {
    /// Worker threads for parallel commands (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a graph file against the IOD graph rules.
    Validate { file: PathBuf },
    /// Print informativeness, actionability and dangling nodes.
    Classify { file: PathBuf },
    /// Re-emit a graph in canonical JSON or DOT.
    Convert {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: GraphFormat,
    },
    /// Stream IO partitions as JSON lines.
    Partitions {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        filter: FilterArg,
        /// JSON object mapping node ids to layer numbers (for `--filter layers`).
        #[arg(long)]
        layers: Option<PathBuf>,
        #[arg(long)]
        limit: Option<usize>,
        #[arg(long)]
        count_only: bool,
    },
    /// Stream every crossover membrane of two partitioned parents.
    Membranes {
        input_parent: PathBuf,
        output_parent: PathBuf,
        /// Comma-separated input part of the input parent.
        #[arg(long, value_delimiter = ',', required = true)]
        psi_a: Vec<String>,
        /// Comma-separated input part of the output parent.
        #[arg(long, value_delimiter = ',', required = true)]
        psi_b: Vec<String>,
        #[arg(long, value_enum, default_value = "qualified")]
        naming: NamingArg,
        /// Skip membranes whose spliced links repeat an earlier one.
        #[arg(long)]
        distinct: bool,
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Cross two parents and print the crossover record.
    Crossover {
        input_parent: PathBuf,
        output_parent: PathBuf,
        #[arg(long, value_delimiter = ',', requires = "psi_b")]
        psi_a: Option<Vec<String>>,
        #[arg(long, value_delimiter = ',', requires = "psi_a")]
        psi_b: Option<Vec<String>>,
        /// Search contiguous partitions instead of giving them explicitly.
        #[arg(long, conflicts_with = "psi_a")]
        auto_contiguous: bool,
        #[arg(long, default_value_t = 4096)]
        max_partitions: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "sequential")]
        matching: MatchingArg,
        /// Link pairing JSON, used with `--matching file`.
        #[arg(long)]
        matching_file: Option<PathBuf>,
        /// Only splice links whose endpoints carry equal tags.
        #[arg(long)]
        tags: bool,
        #[arg(long, value_enum, default_value = "qualified")]
        naming: NamingArg,
        /// Also write the child graph here.
        #[arg(long)]
        child: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: GraphFormat,
    },
    /// Build one of the named constructions and write its graphs.
    Construct {
        #[arg(value_enum)]
        kind: ConstructKind,
        #[arg(long, default_value_t = 2)]
        j: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Parent informativeness for theorem1.
        #[arg(long, default_value = "full")]
        level: Informativeness,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: GraphFormat,
    },
    /// Tabulate informativeness by edge count over a graph family (CSV).
    Census {
        #[arg(long, default_value_t = 3)]
        inputs: usize,
        #[arg(long, default_value_t = 2)]
        outputs: usize,
        #[arg(long, default_value_t = 5)]
        intermediates: usize,
        /// JSON config; overrides the size flags.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Sample this many graphs per edge count instead of enumerating.
        #[arg(long)]
        sample: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        sequential: bool,
        #[arg(long)]
        quiet: bool,
    },
    /// Run the crossover-only generational loop; history as JSON lines.
    Evolve {
        #[arg(long)]
        config: PathBuf,
        #[arg(required = true)]
        graphs: Vec<PathBuf>,
        /// Override the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory for the final population.
        #[arg(long)]
        population_dir: Option<PathBuf>,
        #[arg(long)]
        sequential: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphFormat {
    Json,
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum FilterArg {
    All,
    InputContiguous,
    OutputContiguous,
    Contiguous,
    Layers,
}

#[derive(Clone, Copy, ValueEnum)]
enum NamingArg {
    Qualified,
    Raw,
}

impl From<NamingArg> for NodeNaming {
    fn from(n: NamingArg) -> Self {
        match n {
            NamingArg::Qualified => NodeNaming::Qualified,
            NamingArg::Raw => NodeNaming::Raw,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MatchingArg {
    Sequential,
    Random,
    File,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConstructKind {
    Theorem1,
    Theorem5,
    Competing,
    NonToFully,
}

enum Failure {
    Lib(Error),
    Io { path: PathBuf, err: stdio::Error },
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) | Failure::Io { .. } => 1,
            Failure::Lib(e) => match e {
                Error::Incompatible(_) | Error::TagMatchingInfeasible { .. } | Error::NoCompatiblePartitions { .. } => 3,
                Error::BudgetExceeded { .. } => 4,
                _ => 2,
            },
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Failure::Usage(m) => json!({ "error": "usage", "message": m }),
            Failure::Io { path, err } => json!({
                "error": "io",
                "path": path.display().to_string(),
                "message": err.to_string(),
            }),
            Failure::Lib(e) => {
                let mut v = json!({ "error": error_kind(e), "message": e.to_string() });
                match e {
                    Error::InvalidGraph(report) => v["violations"] = json!(report.violations),
                    Error::Incompatible(why) => v["incompatibility"] = json!(why),
                    Error::Json { line, column, .. } => {
                        v["line"] = json!(line);
                        v["column"] = json!(column);
                    }
                    Error::Dot { line, .. } => v["line"] = json!(line),
                    Error::BudgetExceeded { required, budget } => {
                        v["required"] = json!(required.to_string());
                        v["budget"] = json!(budget.to_string());
                    }
                    _ => {}
                }
                v
            }
        }
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::UnknownNode(_) => "unknown_node",
        Error::InvalidGraph(_) => "invalid_graph",
        Error::InvalidPartition(_) => "invalid_partition",
        Error::Incompatible(_) => "incompatible",
        Error::InvalidMembrane(_) => "invalid_membrane",
        Error::TagMatchingInfeasible { .. } => "tag_matching_infeasible",
        Error::NoCompatiblePartitions { .. } => "no_compatible_partitions",
        Error::BudgetExceeded { .. } => "budget_exceeded",
        Error::InvalidConfig(_) => "invalid_config",
        Error::Construction(_) => "construction",
        Error::Json { .. } => "parse",
        Error::Dot { .. } => "parse",
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|err| Failure::Io {
        path: path.to_owned(),
        err,
    })
}

fn write(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|err| Failure::Io {
        path: path.to_owned(),
        err,
    })
}

fn load_graph(path: &Path) -> Result<IodGraph, Failure> {
    Ok(IodGraph::from_document(&io::parse_any(&read(path)?)?)?)
}

fn render(graph: &IodGraph, format: GraphFormat) -> String {
    match format {
        GraphFormat::Json => io::to_json(graph),
        GraphFormat::Dot => io::to_dot(graph),
    }
}

fn extension(format: GraphFormat) -> &'static str {
    match format {
        GraphFormat::Json => "json",
        GraphFormat::Dot => "dot",
    }
}

fn print_json(out: &mut impl Write, value: &impl serde::Serialize) {
    let text = serde_json::to_string_pretty(value).expect("output serializes");
    let _ = writeln!(out, "{text}");
}

fn print_line(out: &mut impl Write, value: &impl serde::Serialize) -> bool {
    let text = serde_json::to_string(value).expect("output serializes");
    writeln!(out, "{text}").is_ok()
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn run(cli: Cli) -> Outcome {
    let stdout = stdio::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Validate { file } => {
            let doc = io::parse_any(&read(&file)?)?;
            let report = validate(&doc);
            if !report.is_ok() {
                return Err(Error::InvalidGraph(report).into());
            }
            print_json(&mut out, &json!({ "valid": true, "nodes": doc.nodes.len(), "edges": doc.edges.len() }));
        }
        Command::Classify { file } => {
            let g = load_graph(&file)?;
            print_json(&mut out, &classify(&g));
        }
        Command::Convert { file, format } => {
            let g = load_graph(&file)?;
            let _ = out.write_all(render(&g, format).as_bytes());
        }
        Command::Partitions {
            file,
            filter,
            layers,
            limit,
            count_only,
        } => {
            let g = load_graph(&file)?;
            let filter = match filter {
                FilterArg::All => PartitionFilter::All,
                FilterArg::InputContiguous => PartitionFilter::InputContiguous,
                FilterArg::OutputContiguous => PartitionFilter::OutputContiguous,
                FilterArg::Contiguous => PartitionFilter::Contiguous,
                FilterArg::Layers => {
                    let path = layers.ok_or_else(|| Failure::Usage("--filter layers needs --layers FILE".into()))?;
                    let map: HashMap<String, usize> = serde_json::from_str(&read(&path)?).map_err(Error::from)?;
                    PartitionFilter::LayerRespecting(map)
                }
            };
            let parts = enumerate_partitions(&g, &filter)?.take(limit.unwrap_or(usize::MAX));
            if count_only {
                print_json(&mut out, &json!({ "count": parts.count() }));
                return Ok(());
            }
            for p in parts {
                let m = membrane(&g, &p)?;
                let line = json!({
                    "psi": p.psi_ids(&g),
                    "omega": p.omega_ids(&g),
                    "forward": m.forward.len(),
                    "backward": m.backward.len(),
                    "input_contiguous": is_input_contiguous(&g, &p),
                    "output_contiguous": is_output_contiguous(&g, &p),
                });
                if !print_line(&mut out, &line) {
                    break;
                }
            }
        }
        Command::Membranes {
            input_parent,
            output_parent,
            psi_a,
            psi_b,
            naming,
            distinct,
            limit,
        } => {
            let a = load_graph(&input_parent)?;
            let b = load_graph(&output_parent)?;
            let pa = IoPartition::from_ids(&a, psi_a.iter().map(String::as_str))?;
            let pb = IoPartition::from_ids(&b, psi_b.iter().map(String::as_str))?;
            let pair = CrossoverPair::new(&a, &pa, &b, &pb, naming.into())?;
            let iter: Box<dyn Iterator<Item = _>> = if distinct {
                Box::new(pair.distinct_membranes()?)
            } else {
                Box::new(pair.membranes()?)
            };
            for (index, m) in iter.take(limit.unwrap_or(usize::MAX)).enumerate() {
                let pairing = pair.pairing_ids(&m);
                let line = json!({
                    "index": index,
                    "forward": pairing.forward,
                    "backward": pairing.backward,
                    "spliced": pair.spliced_ids(&m),
                });
                if !print_line(&mut out, &line) {
                    break;
                }
            }
        }
        Command::Crossover {
            input_parent,
            output_parent,
            psi_a,
            psi_b,
            auto_contiguous: _,
            max_partitions,
            seed,
            matching,
            matching_file,
            tags,
            naming,
            child,
            format,
        } => {
            let a = load_graph(&input_parent)?;
            let b = load_graph(&output_parent)?;
            let partitions = match (psi_a, psi_b) {
                (Some(input_psi), Some(output_psi)) => PartitionStrategy::Explicit { input_psi, output_psi },
                _ => PartitionStrategy::ExhaustiveContiguous { max_partitions },
            };
            let mode = match matching {
                MatchingArg::Sequential => MatchingMode::Sequential,
                MatchingArg::Random => MatchingMode::SeededRandom(seed),
                MatchingArg::File => {
                    let path =
                        matching_file.ok_or_else(|| Failure::Usage("--matching file needs --matching-file".into()))?;
                    let pairing: LinkPairing = serde_json::from_str(&read(&path)?).map_err(Error::from)?;
                    MatchingMode::Explicit(pairing)
                }
            };
            let strategy = CrossoverStrategy {
                partitions,
                matching: MatchingSpec {
                    mode,
                    tag_constrained: tags,
                },
                naming: naming.into(),
            };
            let mut record = crossover(&a, &b, &strategy, seed)?;
            record.input_parent = input_parent.display().to_string();
            record.output_parent = output_parent.display().to_string();
            if let Some(path) = child {
                write(&path, &render(&record.child_graph()?, format))?;
            }
            print_json(&mut out, &record);
        }
        Command::Construct {
            kind,
            j,
            k,
            level,
            out_dir,
            format,
        } => {
            let fx = match kind {
                ConstructKind::Theorem1 => constructions::build_theorem1_pair(j, k, level)?,
                ConstructKind::Theorem5 => constructions::build_theorem5_pair(j)?,
                ConstructKind::Competing => constructions::build_competing_conventions_pair().0,
                ConstructKind::NonToFully => constructions::build_non_to_fully_pair(),
            };
            fs::create_dir_all(&out_dir).map_err(|err| Failure::Io {
                path: out_dir.clone(),
                err,
            })?;
            let child = fx.child(NodeNaming::Raw)?;
            let ext = extension(format);
            let mut written = Vec::new();
            for (name, g) in [
                ("input_parent", &fx.input_parent),
                ("output_parent", &fx.output_parent),
                ("child", &child),
            ] {
                let path = out_dir.join(format!("{name}.{ext}"));
                write(&path, &render(g, format))?;
                written.push(path.display().to_string());
            }
            let summary = json!({
                "construction": fx.name,
                "files": written,
                "input_psi": fx.input_partition.psi_ids(&fx.input_parent),
                "output_psi": fx.output_partition.psi_ids(&fx.output_parent),
                "membrane": fx.membrane,
                "input_parent": classify(&fx.input_parent),
                "output_parent": classify(&fx.output_parent),
                "child": classify(&child),
                "expected": fx.expected,
            });
            print_json(&mut out, &summary);
        }
        Command::Census {
            inputs,
            outputs,
            intermediates,
            config,
            sample,
            seed,
            budget,
            out: out_path,
            sequential,
            quiet,
        } => {
            let mut cfg = match config {
                Some(path) => {
                    let spec: CensusSpec = serde_json::from_str(&read(&path)?).map_err(Error::from)?;
                    spec.into_config()?
                }
                None => CensusConfig::standard(inputs, outputs, intermediates),
            };
            if let Some(n) = sample {
                cfg.mode = CensusMode::Sample {
                    per_edge_count: n,
                    seed,
                };
            }
            if let Some(b) = budget {
                cfg.budget = b;
            }
            let last = AtomicU64::new(u64::MAX);
            let report = |done: u64, total: u64| {
                let pct = done * 100 / total.max(1);
                if last.swap(pct, Ordering::Relaxed) != pct {
                    eprint!("\rcensus: {pct:3}% ({done}/{total})");
                    if done == total {
                        eprintln!();
                    }
                }
            };
            let progress: Option<&(dyn Fn(u64, u64) + Sync)> = if quiet { None } else { Some(&report) };
            let table = run_census_with(&cfg, execution(sequential), progress)?;
            match out_path {
                Some(path) => write(&path, &table.to_csv())?,
                None => {
                    let _ = out.write_all(table.to_csv().as_bytes());
                }
            }
        }
        Command::Evolve {
            config,
            graphs,
            seed,
            out: out_path,
            population_dir,
            sequential,
        } => {
            let mut cfg: EvolutionConfig = serde_json::from_str(&read(&config)?).map_err(Error::from)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let initial = graphs.iter().map(|p| load_graph(p)).collect::<Result<Vec<_>, _>>()?;
            let result = evolve(&initial, &cfg, execution(sequential))?;
            let lines = result.history_json_lines();
            match out_path {
                Some(path) => write(&path, &lines)?,
                None => {
                    let _ = out.write_all(lines.as_bytes());
                }
            }
            if let Some(dir) = population_dir {
                fs::create_dir_all(&dir).map_err(|err| Failure::Io { path: dir.clone(), err })?;
                for (n, g) in result.population.iter().enumerate() {
                    write(&dir.join(format!("individual_{n:04}.json")), &io::to_json(g))?;
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("{}", json!({ "error": "usage", "message": e.to_string() }));
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.to_json());
            ExitCode::from(f.exit_code())
        }
    }
}
