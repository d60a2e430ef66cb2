//! Command-line entry point wiring the corpus, property oracles,
//! isomorphism checks, engines, distinguishability trials, bound
//! calculator, and the exact port aggregation.
//!
//! Exit codes: 0 on success and on "expected verdict reproduced", 2 on a
//! verdict mismatch (regression signal), 1 on usage or IO errors.

use clap::{Args, Parser, Subcommand, ValueEnum};
use gnncheck_core::corpus;
use gnncheck_core::distinguish::{run_trials, Model, TrialConfig, Verdict};
use gnncheck_core::engines::{classify_table, readout, GnnParams, NormCaps, ReadoutMode};
use gnncheck_core::graph::Graph;
use gnncheck_core::io::{graph_to_dot, read_graph, write_atomic, write_graph};
use gnncheck_core::isomorphism::{are_lu_indistinguishable, are_port_locally_isomorphic};
use gnncheck_core::port_agg;
use gnncheck_core::properties::property_report;
use gnncheck_core::reproduce::reproduce_all;
use gnncheck_core::tree::tree_distribution;
use gnncheck_core::{bounds, engines};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "gnncheck", version, about = "Graph network distinguishability and bound toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Lu,
    Cpn,
    Dime,
    DimePorts,
    Hdcpn,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Model {
        match m {
            ModelArg::Lu => Model::Lu,
            ModelArg::Cpn => Model::Cpn,
            ModelArg::Dime => Model::Dime,
            ModelArg::DimePorts => Model::DimePorts,
            ModelArg::Hdcpn => Model::Hdcpn,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ReadoutArg {
    Sum,
    Mean,
    Max,
}

impl From<ReadoutArg> for ReadoutMode {
    fn from(m: ReadoutArg) -> ReadoutMode {
        match m {
            ReadoutArg::Sum => ReadoutMode::Sum,
            ReadoutArg::Mean => ReadoutMode::Mean,
            ReadoutArg::Max => ReadoutMode::Max,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// List or emit the construction corpus.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
    /// Exact property report for a graph file.
    Props {
        graph: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Decide (port-)local indistinguishability of two graph files.
    Isocheck {
        graph_a: PathBuf,
        graph_b: PathBuf,
        /// Compare port-ordered views (default).
        #[arg(long, overrides_with = "no_ports")]
        ports: bool,
        /// Ignore ports and compare unordered views.
        #[arg(long = "no-ports")]
        no_ports: bool,
    },
    /// Forward pass on one graph: prints the readout vector and f(G).
    Embed {
        graph: PathBuf,
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long, default_value_t = 3)]
        layers: usize,
        #[arg(long, default_value_t = 8)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "mean")]
        readout: ReadoutArg,
    },
    /// Randomized distinguishability trials on a pair.
    Distinguish {
        /// Corpus name (fig1, fig3_s4s8, ...) or two files "a.json,b.json".
        #[arg(long)]
        pair: String,
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        dim: usize,
        #[arg(long, default_value_t = 3)]
        layers: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long)]
        json: bool,
        /// Also write the machine-readable report here (atomic).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Computation-tree distribution of a graph.
    Trees {
        graph: PathBuf,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate the generalization bounds, or verify the perturbation
    /// inequalities empirically.
    Bounds(BoundsArgs),
    /// Exact injective aggregation of port-numbered messages.
    Portagg {
        #[command(subcommand)]
        action: PortaggAction,
    },
    /// Re-run every corpus pair under every declared model and compare
    /// with the expected verdicts.
    Reproduce {
        /// Run the full matrix (the only mode).
        #[arg(long)]
        all: bool,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        dim: usize,
        #[arg(long, default_value_t = 3)]
        layers: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long)]
        json: bool,
        /// Directory for report artifacts (text + json).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum CorpusAction {
    /// Print the construction names and provenance notes.
    List,
    /// Write both graphs, DOT renderings, and the manifest.
    Emit {
        name: String,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct BoundsArgs {
    /// Flat key = value spec file; reference values when omitted.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Empirical margin risk to fold into the population bound.
    #[arg(long)]
    empirical: Option<f64>,
    /// Maximum graph size N for the VC comparison line.
    #[arg(long)]
    vc_nodes: Option<usize>,
    #[arg(long)]
    json: bool,
    #[command(subcommand)]
    action: Option<BoundsAction>,
}

#[derive(Subcommand)]
enum BoundsAction {
    /// Empirically verify the perturbation inequalities on random trees.
    Verify {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, default_value_t = 3)]
        branch: usize,
        #[arg(long, default_value_t = 8)]
        dim: usize,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum PortaggAction {
    /// Exhaustive injectivity and decode check.
    Selftest {
        #[arg(long, default_value_t = 3)]
        alphabet: usize,
        #[arg(long, default_value_t = 3)]
        ports: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap would exit 2; the contract reserves 2 for verdict
            // mismatches, so usage problems exit 1
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> gnncheck_core::Result<ExitCode> {
    match cli.command {
        Command::Corpus { action } => corpus_cmd(action),
        Command::Props { graph, json } => {
            let g = read_graph(&graph)?;
            let report = property_report(&g)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
            } else {
                println!("{report}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Isocheck { graph_a, graph_b, no_ports, .. } => {
            let ga = read_graph(&graph_a)?;
            let gb = read_graph(&graph_b)?;
            if no_ports {
                let same = are_lu_indistinguishable(&ga, &gb)?;
                println!(
                    "unordered views: {}",
                    if same { "indistinguishable" } else { "distinguishable" }
                );
            } else {
                let (same, witness) = are_port_locally_isomorphic(&ga, &gb)?;
                println!(
                    "port-ordered views: {}",
                    if same { "indistinguishable" } else { "distinguishable" }
                );
                if let Some(w) = witness {
                    println!("witness bijection (verified):");
                    for (v, img) in w.mapping.iter().enumerate() {
                        println!("  {v} -> {img}");
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Embed { graph, model, layers, dim, seed, readout: mode } => {
            let g = read_graph(&graph)?.with_feature_dim(dim)?;
            let params = GnnParams::random(
                dim,
                layers,
                seed,
                &NormCaps::default(),
                engines::ActivationSuite::default(),
            );
            let model: Model = model.into();
            let table = model.forward(&g, &params)?;
            let vector = readout(&table, mode.into())?;
            let f = classify_table(&table, params.beta())?;
            let rendered: Vec<String> = vector.iter().map(|x| format!("{x}")).collect();
            println!("readout = [{}]", rendered.join(", "));
            println!("f(G) = {f}");
            println!("label = {}", if f > 0.5 { 1 } else { 0 });
            Ok(ExitCode::SUCCESS)
        }
        Command::Distinguish { pair, model, trials, seed, dim, layers, tol, json, out } => {
            let model: Model = model.into();
            let cfg = TrialConfig {
                trials,
                seed,
                dim,
                layers,
                tolerance: tol,
                ..TrialConfig::default()
            };
            let (ga, gb, expected) = load_pair(&pair, model)?;
            let report = run_trials(&ga, &gb, model, &cfg)?;
            let rendered = if json {
                serde_json::to_string_pretty(&report).expect("serializable")
            } else {
                report.to_string()
            };
            println!("{rendered}");
            if let Some(path) = out {
                write_atomic(&path, serde_json::to_string_pretty(&report).expect("ok").as_bytes())?;
            }
            match expected {
                Some(e) if e != report.verdict => {
                    eprintln!("verdict mismatch: expected {e}, observed {}", report.verdict);
                    Ok(ExitCode::from(2))
                }
                _ => Ok(ExitCode::SUCCESS),
            }
        }
        Command::Trees { graph, depth, json } => {
            let g = read_graph(&graph)?;
            let dist = tree_distribution(&g, depth)?;
            if json {
                let entries: Vec<serde_json::Value> = dist
                    .entries
                    .iter()
                    .map(|e| {
                        serde_json::json!({
                            "count": e.count,
                            "weight": e.weight,
                            "representative_node": e.representative,
                            "key_prefix": hex_prefix(&e.key),
                        })
                    })
                    .collect();
                println!(
                    "{}",
                    serde_json::to_string_pretty(&serde_json::json!({
                        "depth": dist.depth,
                        "node_count": dist.node_count,
                        "classes": entries,
                    }))
                    .expect("serializable")
                );
            } else {
                println!("depth = {}  nodes = {}  classes = {}", dist.depth, dist.node_count, dist.entries.len());
                for e in &dist.entries {
                    println!(
                        "  weight {:>8.6}  count {:>3}  representative node {:>3}  key {}",
                        e.weight,
                        e.count,
                        e.representative,
                        hex_prefix(&e.key)
                    );
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Bounds(args) => bounds_cmd(args),
        Command::Portagg { action } => {
            let PortaggAction::Selftest { alphabet, ports } = action;
            let distinct = port_agg::injectivity_selftest(alphabet, ports)?;
            println!(
                "exhaustive check over alphabet {alphabet}, ports 1..={ports}: {distinct} distinct codes, decode round-trip ok"
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Reproduce { all, trials, seed, dim, layers, tol, json, out } => {
            if !all {
                eprintln!("nothing to do: pass --all");
                return Ok(ExitCode::from(1));
            }
            let cfg = TrialConfig {
                trials,
                seed,
                dim,
                layers,
                tolerance: tol,
                ..TrialConfig::default()
            };
            let report = reproduce_all(&cfg)?;
            let text = report.render_text();
            if json {
                println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
            } else {
                print!("{text}");
            }
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir)?;
                write_atomic(&dir.join("reproduce.txt"), text.as_bytes())?;
                write_atomic(
                    &dir.join("reproduce.json"),
                    serde_json::to_string_pretty(&report).expect("ok").as_bytes(),
                )?;
            }
            Ok(if report.all_pass { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
    }
}

/// Short stable fingerprint of a canonical tree key (FNV-1a).
fn hex_prefix(key: &[u8]) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in key {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}

/// Resolves --pair: a corpus name (returning the declared expectation for
/// `model`, if any) or two comma-separated files.
fn load_pair(
    spec: &str,
    model: Model,
) -> gnncheck_core::Result<(Graph, Graph, Option<Verdict>)> {
    if let Some((a, b)) = spec.split_once(',') {
        Ok((read_graph(Path::new(a.trim()))?, read_graph(Path::new(b.trim()))?, None))
    } else {
        let pair = corpus::build(spec)?;
        let expected = pair.expected.get(&model).copied();
        Ok((pair.graph_a, pair.graph_b, expected))
    }
}

fn corpus_cmd(action: CorpusAction) -> gnncheck_core::Result<ExitCode> {
    match action {
        CorpusAction::List => {
            for (name, provenance) in corpus::list() {
                println!("{name:<28} {provenance}");
            }
            Ok(ExitCode::SUCCESS)
        }
        CorpusAction::Emit { name, out } => {
            let pair = corpus::build(&name)?;
            std::fs::create_dir_all(&out)?;
            write_graph(&pair.graph_a, &out.join("graph_a.json"))?;
            write_graph(&pair.graph_b, &out.join("graph_b.json"))?;
            write_atomic(&out.join("graph_a.dot"), graph_to_dot(&pair.graph_a, "a").as_bytes())?;
            write_atomic(&out.join("graph_b.dot"), graph_to_dot(&pair.graph_b, "b").as_bytes())?;
            let manifest = serde_json::json!({
                "name": pair.name,
                "provenance": pair.provenance,
                "files": {"graph_a": "graph_a.json", "graph_b": "graph_b.json"},
                "node_names": {"graph_a": pair.names_a, "graph_b": pair.names_b},
                "expected_verdicts": pair.expected,
                "property_deltas": pair.deltas,
            });
            write_atomic(
                &out.join("manifest.json"),
                serde_json::to_string_pretty(&manifest).expect("ok").as_bytes(),
            )?;
            println!("wrote {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn bounds_cmd(args: BoundsArgs) -> gnncheck_core::Result<ExitCode> {
    if let Some(BoundsAction::Verify { trials, seed, depth, branch, dim, json }) = args.action {
        let report = bounds::verify_perturbation_bounds(trials, seed, depth, branch, dim)?;
        if json {
            println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
        } else {
            println!("{report}");
        }
        return Ok(if report.violations == 0 { ExitCode::SUCCESS } else { ExitCode::from(2) });
    }
    let spec = match &args.spec {
        Some(path) => bounds::BoundSpec::parse(&std::fs::read_to_string(path)?)?,
        None => bounds::BoundSpec::reference(),
    };
    let report = bounds::bound_report(&spec, args.empirical, args.vc_nodes)?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
    } else {
        println!("{report}");
    }
    Ok(ExitCode::SUCCESS)
}
