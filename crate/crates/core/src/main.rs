use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use recipgen::config::{load_config, RunConfig, SirSettings};
use recipgen::edgelist::{read_edges, write_edge_list};
use recipgen::metrics::{full_report, largest_wcc, AnalysisOptions, MetricsReport, PathOptions};
use recipgen::presets;
use recipgen::report::{
    human_metrics, human_sir, machine_metrics, machine_sir, write_json, RunManifest, StageTimings,
};
use recipgen::sir::{run_sir_batch_on, SirBatch};
use recipgen::{generate_graph, DirectedGraph, Error};

/// Generate, analyze and simulate epidemics on directed social graphs with
/// reciprocal edges.
#[derive(Parser)]
#[command(name = "recipgen", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Directory for edge lists, reports and the run manifest
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
    /// Worker threads for analysis and simulation (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Machine,
}

#[derive(Subcommand)]
enum Command {
    /// Sample degrees and wire a graph; writes graph.tsv and manifest.json
    Generate(GenerateArgs),
    /// Measure an edge-list file
    Analyze(AnalyzeArgs),
    /// Run SIR simulations on an edge-list file
    Sir(SirArgs),
    /// Generate, analyze and simulate in one go
    Replicate(ReplicateArgs),
    /// List built-in presets, or print one as a config document
    Presets { name: Option<String> },
}

#[derive(Args)]
struct Source {
    /// TOML run document
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in preset name (repeatable for replicate; `all` = the fourteen replication graphs)
    #[arg(long)]
    preset: Vec<String>,
    /// Overrides the document's generation seed
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    source: Source,
}

#[derive(Args)]
struct PathArgs {
    /// All-pairs path lengths even on large components
    #[arg(long)]
    exact_aspl: bool,
    /// Skip the undirected path-length measurement
    #[arg(long)]
    directed_only: bool,
}

impl PathArgs {
    fn options(&self) -> AnalysisOptions {
        AnalysisOptions {
            paths: PathOptions {
                force_exact: self.exact_aspl,
                ..PathOptions::default()
            },
            undirected_paths: !self.directed_only,
        }
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Edge list with one `source<TAB>target` line per edge
    input: PathBuf,
    /// Node count, if the file's largest id understates it
    #[arg(long, default_value_t = 0)]
    nodes: usize,
    #[command(flatten)]
    paths: PathArgs,
}

#[derive(Args)]
struct SirArgs {
    input: PathBuf,
    #[arg(long, default_value_t = 0)]
    nodes: usize,
    /// Document providing the SIR settings; flags below override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// Transmission probabilities, comma separated
    #[arg(long, value_delimiter = ',')]
    p: Vec<f64>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    initial_fraction: Option<f64>,
    /// Seed of the simulation batch
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ReplicateArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    paths: PathArgs,
    /// Simulation runs per transmission probability
    #[arg(long)]
    runs: Option<usize>,
    /// Skip the SIR simulations
    #[arg(long)]
    no_sir: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("recipgen: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidConfig { .. } | Error::NotPositiveSemidefinite { .. } => 1,
        Error::ResamplingExhausted { .. } | Error::BalancePrecondition { .. } => 2,
        Error::EdgeList { .. } | Error::Io { .. } => 3,
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    if let Some(threads) = cli.common.threads {
        if threads == 0 {
            return Err(Error::InvalidConfig {
                key: "threads".into(),
                reason: "must be positive".into(),
            });
        }
        // fails only if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    if let Some(dir) = &cli.common.out_dir {
        std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    }
    let common = &cli.common;
    match &cli.command {
        Command::Generate(args) => generate(args, common),
        Command::Analyze(args) => analyze(args, common),
        Command::Sir(args) => sir(args, common),
        Command::Replicate(args) => replicate(args, common),
        Command::Presets { name } => list_presets(name.as_deref()),
    }
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Named run documents selected by `--config` or `--preset`.
fn resolve(source: &Source, allow_many: bool) -> Result<Vec<(String, RunConfig)>, Error> {
    let mut runs = Vec::new();
    if let Some(path) = &source.config {
        let name = path.file_stem().map_or("run".into(), |s| s.to_string_lossy().into_owned());
        runs.push((name, load_config(path)?));
    }
    for name in &source.preset {
        if name.eq_ignore_ascii_case("all") {
            for p in &presets::REPLICATION {
                runs.push((p.name.to_string(), p.run_config(0)?));
            }
        } else {
            let p = presets::find(name)?;
            runs.push((p.name.to_string(), p.run_config(0)?));
        }
    }
    if runs.is_empty() {
        return Err(Error::InvalidConfig {
            key: "config".into(),
            reason: "pass --config FILE or --preset NAME".into(),
        });
    }
    if runs.len() > 1 && !allow_many {
        return Err(Error::InvalidConfig {
            key: "preset".into(),
            reason: "this command takes a single graph".into(),
        });
    }
    if let Some(seed) = source.seed {
        for (_, c) in &mut runs {
            c.generation.seed = seed;
        }
    }
    Ok(runs)
}

/// Output directory for one of possibly several runs.
fn run_dir(common: &Common, name: &str, many: bool) -> Result<Option<PathBuf>, Error> {
    let Some(base) = &common.out_dir else {
        return Ok(None);
    };
    let dir = if many { base.join(name) } else { base.clone() };
    std::fs::create_dir_all(&dir).map_err(|e| io_error(&dir, e))?;
    Ok(Some(dir))
}

struct Generated {
    graph: DirectedGraph,
    stats: recipgen::WiringStats,
    total: std::time::Duration,
}

fn generate_one(
    config: &RunConfig,
    dir: Option<&Path>,
    manifest: &mut RunManifest,
) -> Result<Generated, Error> {
    let generated = generate_graph(&config.generation)?;
    let t = generated.timings;
    manifest.timings.sampling = Some(t.sampling.as_secs_f64());
    manifest.timings.reciprocal_wiring = Some(t.reciprocal.as_secs_f64());
    manifest.timings.directed_wiring = Some(t.directed.as_secs_f64());
    if let Some(dir) = dir {
        let path = dir.join("graph.tsv");
        write_edge_list(&generated.graph, &path)?;
        manifest.outputs.push(path);
    }
    Ok(Generated {
        graph: generated.graph,
        stats: generated.stats,
        total: t.total(),
    })
}

fn manifest_for(command: &str, config: &RunConfig, source: &Source) -> RunManifest {
    let mut m = RunManifest::new(command);
    m.seed = Some(config.generation.seed);
    m.seed_from_command_line = source.seed.is_some();
    m.config = Some(config.clone());
    m
}

fn generate(args: &GenerateArgs, common: &Common) -> Result<(), Error> {
    let (name, config) = resolve(&args.source, false)?.remove(0);
    let dir = run_dir(common, &name, false)?;
    let mut manifest = manifest_for("generate", &config, &args.source);
    let g = generate_one(&config, dir.as_deref(), &mut manifest)?;
    let s = g.stats;
    match common.format {
        Format::Machine => {
            println!("nodes={}", g.graph.node_count());
            println!("edges={}", g.graph.edge_count());
            println!("generation_seconds={}", g.total.as_secs_f64());
        }
        Format::Human => {
            println!(
                "{name}: {} nodes, {} edges ({} mutual pairs, {} one-way) in {:.2}s",
                g.graph.node_count(),
                g.graph.edge_count(),
                s.reciprocal.edges(),
                s.directed.edges(),
                g.total.as_secs_f64()
            );
        }
    }
    if let Some(dir) = dir {
        manifest.write(&dir.join("manifest.json"))?;
    } else {
        eprintln!("note: no --out-dir given, the graph was not saved");
    }
    Ok(())
}

fn read_graph(path: &Path, nodes: usize) -> Result<DirectedGraph, Error> {
    let file = std::fs::File::open(path).map_err(|e| io_error(path, e))?;
    read_edges(std::io::BufReader::new(file), path, nodes)
}

fn emit_metrics(
    common: &Common,
    dir: Option<&Path>,
    columns: &[(&str, &MetricsReport)],
    manifest: Option<&mut RunManifest>,
) -> Result<(), Error> {
    match common.format {
        Format::Human => print!("{}", human_metrics(columns)),
        Format::Machine => {
            for (name, r) in columns {
                if columns.len() > 1 {
                    println!("# {name}");
                }
                print!("{}", machine_metrics(r));
            }
        }
    }
    if let (Some(dir), [(_, report)]) = (dir, columns) {
        let txt = dir.join("metrics.txt");
        std::fs::write(&txt, machine_metrics(report)).map_err(|e| io_error(&txt, e))?;
        let json = dir.join("metrics.json");
        write_json(&json, report)?;
        if let Some(m) = manifest {
            m.outputs.extend([txt, json]);
        }
    }
    Ok(())
}

fn analyze(args: &AnalyzeArgs, common: &Common) -> Result<(), Error> {
    let graph = read_graph(&args.input, args.nodes)?;
    let start = Instant::now();
    let report = full_report(&graph, None, None, &args.paths.options());
    let mut manifest = RunManifest::new("analyze");
    manifest.timings.metrics = Some(start.elapsed().as_secs_f64());
    let dir = common.out_dir.as_deref();
    emit_metrics(common, dir, &[("graph", &report)], Some(&mut manifest))?;
    if let Some(dir) = dir {
        manifest.write(&dir.join("manifest.json"))?;
    }
    Ok(())
}

fn simulate(
    graph: &DirectedGraph,
    settings: &SirSettings,
    seed: u64,
) -> Result<Vec<SirBatch>, Error> {
    let component = largest_wcc(graph);
    settings
        .p_values
        .iter()
        .map(|&p| run_sir_batch_on(graph, &component, &settings.config(p, seed)))
        .collect()
}

fn emit_sir(
    common: &Common,
    dir: Option<&Path>,
    columns: &[(&str, &[SirBatch])],
    manifest: &mut RunManifest,
) -> Result<(), Error> {
    match common.format {
        Format::Human => print!("{}", human_sir(columns)),
        Format::Machine => {
            for (name, batches) in columns {
                if columns.len() > 1 {
                    println!("# {name}");
                }
                print!("{}", machine_sir(batches));
            }
        }
    }
    if let (Some(dir), [(_, batches)]) = (dir, columns) {
        let path = dir.join("sir.json");
        write_json(&path, batches)?;
        manifest.outputs.push(path);
    }
    Ok(())
}

fn sir(args: &SirArgs, common: &Common) -> Result<(), Error> {
    let (mut settings, doc_seed) = match &args.config {
        Some(path) => {
            let c = load_config(path)?;
            (c.sir.clone(), c.sir.seed.unwrap_or(c.generation.seed))
        }
        None => (SirSettings::default(), 0),
    };
    if !args.p.is_empty() {
        settings.p_values = args.p.clone();
    }
    if let Some(runs) = args.runs {
        settings.runs = runs;
    }
    if let Some(f) = args.initial_fraction {
        settings.initial_infected_fraction = f;
    }
    settings.seed = Some(args.seed.unwrap_or(doc_seed));
    settings.validate()?;

    let graph = read_graph(&args.input, args.nodes)?;
    let mut manifest = RunManifest::new("sir");
    manifest.seed = settings.seed;
    manifest.seed_from_command_line = args.seed.is_some();
    let start = Instant::now();
    let batches = simulate(&graph, &settings, 0)?;
    manifest.timings.sir = Some(start.elapsed().as_secs_f64());
    let dir = common.out_dir.as_deref();
    emit_sir(common, dir, &[("graph", &batches)], &mut manifest)?;
    if let Some(dir) = dir {
        manifest.write(&dir.join("manifest.json"))?;
    }
    Ok(())
}

fn replicate(args: &ReplicateArgs, common: &Common) -> Result<(), Error> {
    let runs = resolve(&args.source, true)?;
    let many = runs.len() > 1;
    let mut reports = Vec::new();
    let mut sims = Vec::new();
    for (name, mut config) in runs {
        if let Some(r) = args.runs {
            config.sir.runs = r;
            config.validate()?;
        }
        let dir = run_dir(common, &name, many)?;
        let mut manifest = manifest_for("replicate", &config, &args.source);
        let g = generate_one(&config, dir.as_deref(), &mut manifest)?;

        let start = Instant::now();
        let report = full_report(
            &g.graph,
            Some(&g.stats),
            Some(g.total),
            &args.paths.options(),
        );
        manifest.timings.metrics = Some(start.elapsed().as_secs_f64());
        if let Some(dir) = &dir {
            let txt = dir.join("metrics.txt");
            std::fs::write(&txt, machine_metrics(&report)).map_err(|e| io_error(&txt, e))?;
            let json = dir.join("metrics.json");
            write_json(&json, &report)?;
            manifest.outputs.extend([txt, json]);
        }

        let batches = if args.no_sir {
            Vec::new()
        } else {
            let start = Instant::now();
            let b = simulate(&g.graph, &config.sir, config.generation.seed)?;
            manifest.timings.sir = Some(start.elapsed().as_secs_f64());
            if let Some(dir) = &dir {
                let path = dir.join("sir.json");
                write_json(&path, &b)?;
                manifest.outputs.push(path);
            }
            b
        };
        if let Some(dir) = &dir {
            manifest.write(&dir.join("manifest.json"))?;
        }
        if many && common.format == Format::Human {
            eprintln!(
                "{name}: done in {:.1}s",
                manifest_total(&manifest.timings)
            );
        }
        reports.push((name.clone(), report));
        sims.push((name, batches));
    }

    let columns: Vec<(&str, &MetricsReport)> =
        reports.iter().map(|(n, r)| (n.as_str(), r)).collect();
    emit_metrics(common, None, &columns, None)?;
    if !args.no_sir {
        if common.format == Format::Human {
            println!();
        }
        let columns: Vec<(&str, &[SirBatch])> =
            sims.iter().map(|(n, b)| (n.as_str(), b.as_slice())).collect();
        let mut scratch = RunManifest::new("replicate");
        emit_sir(common, None, &columns, &mut scratch)?;
    }
    Ok(())
}

fn manifest_total(t: &StageTimings) -> f64 {
    [t.sampling, t.reciprocal_wiring, t.directed_wiring, t.metrics, t.sir]
        .into_iter()
        .flatten()
        .sum()
}

fn list_presets(name: Option<&str>) -> Result<(), Error> {
    match name {
        Some(name) => print!("{}", presets::find(name)?.run_config(0)?.to_toml()),
        None => {
            for p in presets::all() {
                println!(
                    "{:<5} {:>7} nodes {:>11} edges  rho ({:.3}, {:.3}, {:.3})",
                    p.name, p.nodes, p.edges, p.rho[0], p.rho[1], p.rho[2]
                );
            }
        }
    }
    Ok(())
}
