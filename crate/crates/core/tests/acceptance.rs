//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any hard criterion fails.
//!
//! Set `ACCEPTANCE_QUICK=1` to skip the 100,000-node runs.

use std::collections::HashSet;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use recipgen::degree_sampler::sample_degree_sequences;
use recipgen::metrics::{
    average_clustering, density, largest_scc, largest_wcc, path_stats, rank_correlations,
    realized_degrees, PathMode, PathOptions,
};
use recipgen::presets::{self, rescaled, Preset};
use recipgen::sir::{run_sir_batch_on, run_sir_traced, run_rng, SirBatch, SirConfig};
use recipgen::wiring::{wire_directed, wire_reciprocal};
use recipgen::{generate_graph, CorrelationTargets, DirectedGraph, GenConfig, MarginalSpec, Marginals, NodeId};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

struct Suite {
    failures: usize,
}

impl Suite {
    fn run(&mut self, id: &str, name: &str, budget: Duration, f: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let out = f();
        let elapsed = start.elapsed();
        let in_time = elapsed <= budget;
        let pass = out.pass && in_time;
        if !pass {
            self.failures += 1;
        }
        println!(
            "[{}] {id} {name}: {} ({:.1}s, budget {}s{})",
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64(),
            budget.as_secs(),
            if in_time { "" } else { ", over budget" },
        );
    }

    /// Reported but never fails the suite.
    fn soft(&mut self, id: &str, name: &str, f: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let out = f();
        println!(
            "[{}] {id} {name} (soft): {} ({:.1}s)",
            if out.pass { "PASS" } else { "MISS" },
            out.detail,
            start.elapsed().as_secs_f64(),
        );
    }
}

fn minutes(m: u64) -> Duration {
    Duration::from_secs(60 * m)
}

/// Random valid generation recipe with `n` in `nodes`. In and out marginals
/// share a mean so the in/out sums can be balanced.
fn random_config(rng: &mut ChaCha8Rng, nodes: std::ops::RangeInclusive<usize>) -> GenConfig {
    let n = rng.random_range(nodes);
    let mean_r = rng.random_range(0.5..12.0);
    let mean_d = rng.random_range(0.5..12.0);
    let shape = |rng: &mut ChaCha8Rng| rng.random_range(0.5..4.0);
    let (sr, si, so) = (shape(rng), shape(rng), shape(rng));
    let marginals = Marginals {
        recip: MarginalSpec::new(sr, mean_r / sr).unwrap(),
        inn: MarginalSpec::new(si, mean_d / si).unwrap(),
        out: MarginalSpec::new(so, mean_d / so).unwrap(),
    };
    let targets = loop {
        let t = CorrelationTargets {
            rho1: rng.random_range(-0.3..0.9),
            rho2: rng.random_range(-0.3..0.9),
            rho3: rng.random_range(-0.3..0.9),
        };
        if t.validate().is_ok() {
            break t;
        }
    };
    GenConfig::new(n, marginals, targets, rng.random())
}

fn simplicity_and_caps() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut violations = 0usize;
    let mut graphs = 0usize;
    let mut exhausted = 0usize;
    while graphs < 1000 {
        let config = random_config(&mut rng, 10..=2000);
        // resampling may legitimately give up on small, wide configs; such a
        // config yields no graph and is replaced
        let seqs = match sample_degree_sequences(&config) {
            Ok(s) => s,
            Err(_) => {
                exhausted += 1;
                continue;
            }
        };
        graphs += 1;
        let mut wiring_rng = ChaCha8Rng::seed_from_u64(config.seed);
        let (recip_graph, _) = wire_reciprocal(&seqs, &mut wiring_rng);
        let mut graph = recip_graph.clone();
        wire_directed(&mut graph, &seqs, &mut wiring_rng);

        let mut seen = HashSet::new();
        for (u, v) in graph.edges() {
            if u == v || !seen.insert((u, v)) {
                violations += 1;
            }
        }
        let n = graph.node_count();
        let mut added_out = vec![0u32; n];
        let mut added_in = vec![0u32; n];
        for (u, v) in graph.edges() {
            if !recip_graph.has_edge(u, v) {
                added_out[u as usize] += 1;
                added_in[v as usize] += 1;
            }
        }
        for v in 0..n {
            let mutual = recip_graph.out_degree(v as NodeId) as u32;
            if recip_graph
                .out_neighbors(v as NodeId)
                .iter()
                .any(|&u| !recip_graph.has_edge(u, v as NodeId))
            {
                violations += 1;
            }
            if mutual > seqs.recip[v] || added_out[v] > seqs.out[v] || added_in[v] > seqs.inn[v] {
                violations += 1;
            }
        }
    }
    Outcome::new(
        violations == 0,
        format!("{graphs} graphs, {violations} violations (tolerance 0); {exhausted} configs redrawn after resampling gave up"),
    )
}

fn degree_sequence_invariants() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut violations = 0usize;
    let mut failures = 0usize;
    let mut sampled = 0usize;
    while sampled < 10_000 {
        let config = random_config(&mut rng, 10..=200);
        match sample_degree_sequences(&config) {
            Ok(s) => {
                sampled += 1;
                if s.recip_sum() % 2 != 0 || s.in_sum() != s.out_sum() {
                    violations += 1;
                }
            }
            Err(_) => failures += 1,
        }
    }
    Outcome::new(
        violations == 0,
        format!("{sampled} sampled configs, {violations} violations (tolerance 0); {failures} configs redrawn after resampling gave up"),
    )
}

const REFERENCE_RHO: [f64; 3] = [0.598, 0.593, 0.502];

fn mean_rho(preset: &Preset, seeds: u64) -> [f64; 3] {
    let mut acc = [0.0; 3];
    for seed in 0..seeds {
        let g = generate_graph(&preset.gen_config(seed).unwrap()).unwrap();
        let rho = rank_correlations(&realized_degrees(&g.graph));
        for k in 0..3 {
            acc[k] += rho[k].expect("degrees vary") / seeds as f64;
        }
    }
    acc
}

fn rho_outcome(rho: [f64; 3], tol: f64) -> Outcome {
    let worst = (0..3).map(|k| (rho[k] - REFERENCE_RHO[k]).abs()).fold(0.0, f64::max);
    Outcome::new(
        worst <= tol,
        format!(
            "rho ({:.3}, {:.3}, {:.3}) vs ({:.3}, {:.3}, {:.3}), max deviation {worst:.3} (tolerance {tol})",
            rho[0], rho[1], rho[2], REFERENCE_RHO[0], REFERENCE_RHO[1], REFERENCE_RHO[2]
        ),
    )
}

fn clustering_and_small_world() -> Outcome {
    let mut lines = Vec::new();
    let mut failing = Vec::new();
    for preset in &presets::REPLICATION {
        let mut ok_seeds = 0;
        let mut cells = Vec::new();
        for seed in 0..3 {
            let g = generate_graph(&preset.gen_config(seed).unwrap()).unwrap().graph;
            let lwcc = largest_wcc(&g);
            let cc = average_clustering(&g, &lwcc);
            let opts = PathOptions {
                mode: PathMode::Undirected,
                ..PathOptions::default()
            };
            let d = path_stats(&g, &lwcc, &opts).diameter;
            if (0.23..=0.40).contains(&cc) && (4..=5).contains(&d) {
                ok_seeds += 1;
            }
            cells.push(format!("{cc:.3}/{d}"));
        }
        if ok_seeds < 2 {
            failing.push(preset.name);
        }
        lines.push(format!("{} {}", preset.name, cells.join(" ")));
    }
    for l in &lines {
        println!("    {l}");
    }
    Outcome::new(
        failing.is_empty(),
        format!(
            "{}/14 presets with CC in [0.23, 0.40] and diameter in {{4, 5}} on >= 2 of 3 seeds{}",
            14 - failing.len(),
            if failing.is_empty() {
                String::new()
            } else {
                format!("; failing {failing:?}")
            }
        ),
    )
}

// Brute-force oracles for tiny graphs.

const INF: u32 = u32::MAX;

fn floyd_warshall(n: usize, edges: &[(usize, usize)], undirected: bool) -> Vec<Vec<u32>> {
    let mut d = vec![vec![INF; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for &(u, v) in edges {
        d[u][v] = 1;
        if undirected {
            d[v][u] = 1;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] != INF && d[k][j] != INF && d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

fn largest_class(n: usize, same: impl Fn(usize, usize) -> bool) -> Vec<usize> {
    let mut best: Vec<usize> = Vec::new();
    for v in 0..n {
        let class: Vec<usize> = (0..n).filter(|&u| same(u, v)).collect();
        if class.len() > best.len() {
            best = class;
        }
    }
    best
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut violations = Vec::new();
    for case in 0..500 {
        let n = rng.random_range(1..=8usize);
        let p = rng.random_range(0.05..0.7);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in 0..n {
                if u != v && rng.random_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        let g = DirectedGraph::from_edges(n, edges.iter().map(|&(u, v)| (u as NodeId, v as NodeId)));
        let dist = floyd_warshall(n, &edges, false);
        let udist = floyd_warshall(n, &edges, true);

        let scc = largest_class(n, |u, v| dist[u][v] != INF && dist[v][u] != INF);
        let wcc = largest_class(n, |u, v| udist[u][v] != INF);

        let (mut sum, mut pairs, mut diam) = (0u64, 0u64, 0u32);
        for &i in &wcc {
            for &j in &wcc {
                if i != j && dist[i][j] != INF {
                    sum += u64::from(dist[i][j]);
                    pairs += 1;
                    diam = diam.max(dist[i][j]);
                }
            }
        }
        let adjacent = |a: usize, b: usize| udist[a][b] == 1;
        let mut cc_sum = 0.0;
        for &v in &wcc {
            let nb: Vec<usize> = (0..n).filter(|&u| u != v && adjacent(u, v)).collect();
            let k = nb.len();
            if k >= 2 {
                let mut links = 0;
                for a in 0..k {
                    for b in a + 1..k {
                        if adjacent(nb[a], nb[b]) {
                            links += 1;
                        }
                    }
                }
                cc_sum += links as f64 / (k * (k - 1) / 2) as f64;
            }
        }
        let cc = if wcc.is_empty() { 0.0 } else { cc_sum / wcc.len() as f64 };
        let wcc_edges = edges.iter().filter(|(u, _)| wcc.contains(u)).count();

        let lwcc = largest_wcc(&g);
        let stats = path_stats(&g, &lwcc, &PathOptions::default());
        let got_sum = (stats.aspl * stats.reachable_pairs as f64).round() as u64;
        let checks = [
            ("density", density(n, edges.len()) == density(g.node_count(), g.edge_count())),
            ("lscc", largest_scc(&g).len() == scc.len()),
            ("lwcc", lwcc.len() == wcc.len()),
            ("density*", density(lwcc.len(), lwcc.iter().map(|&v| g.out_degree(v)).sum()) == density(wcc.len(), wcc_edges)),
            ("aspl", stats.reachable_pairs == pairs && got_sum == sum && (pairs == 0 || stats.aspl == sum as f64 / pairs as f64)),
            ("diameter", stats.diameter == diam),
            ("cc", (average_clustering(&g, &lwcc) - cc).abs() <= 1e-12),
        ];
        for (name, ok) in checks {
            if !ok {
                violations.push(format!("case {case} {name}"));
            }
        }
    }
    Outcome::new(
        violations.is_empty(),
        format!("500 graphs, {} violations {:?} (tolerance 0)", violations.len(), violations.iter().take(5).collect::<Vec<_>>()),
    )
}

fn sir_trivial_and_conservation() -> Outcome {
    let g = generate_graph(&presets::find("G5").unwrap().gen_config(0).unwrap()).unwrap().graph;
    let lwcc = largest_wcc(&g);
    let zero = SirConfig {
        runs: 100,
        ..SirConfig::new(0.0, 3)
    };
    let batch = run_sir_batch_on(&g, &lwcc, &zero).unwrap();
    let initial = recipgen::sir::initial_infected_count(0.05, lwcc.len()) as f64 / lwcc.len() as f64;
    let trivial = batch.runs.iter().all(|r| r.recovered_fraction == initial && r.steps == 1);

    let mut broken_steps = 0usize;
    let mut steps = 0usize;
    for (i, p) in [0.0, 0.01, 0.05, 0.1, 0.5, 1.0].into_iter().enumerate() {
        for run in 0..20 {
            let config = SirConfig::new(p, 7);
            let mut last_r = 0;
            run_sir_traced(&g, &lwcc, &config, &mut run_rng(i as u64, run), |c| {
                steps += 1;
                if c.susceptible + c.infected + c.recovered != lwcc.len() || c.recovered < last_r {
                    broken_steps += 1;
                }
                last_r = c.recovered;
            });
        }
    }
    Outcome::new(
        trivial && broken_steps == 0,
        format!(
            "(a) p=0: {} of 100 runs recovered exactly {initial:.4} in 1 step; (b) {broken_steps} of {steps} traced steps broke S+I+R=|LWCC|",
            batch.runs.iter().filter(|r| r.recovered_fraction == initial && r.steps == 1).count()
        ),
    )
}

fn sir_batches(g: &DirectedGraph, runs: usize, ps: &[f64]) -> Vec<SirBatch> {
    let lwcc = largest_wcc(g);
    ps.iter()
        .map(|&p| {
            let config = SirConfig {
                runs,
                ..SirConfig::new(p, 99)
            };
            run_sir_batch_on(g, &lwcc, &config).unwrap()
        })
        .collect()
}

fn monotone(nodes: usize) -> Outcome {
    let preset = rescaled(&presets::SCALE_100K, nodes);
    let g = generate_graph(&preset.gen_config(4).unwrap()).unwrap().graph;
    let batches = sir_batches(&g, 200, &[0.01, 0.05, 0.1]);
    let mut ok = true;
    for w in batches.windows(2) {
        let slack = (w[0].recovered_sem().powi(2) + w[1].recovered_sem().powi(2)).sqrt();
        ok &= w[1].mean_recovered_fraction() >= w[0].mean_recovered_fraction() - slack;
    }
    let means: Vec<String> = batches
        .iter()
        .map(|b| format!("{:.3}", b.mean_recovered_fraction()))
        .collect();
    Outcome::new(
        ok,
        format!("{nodes} nodes, 200 runs, mean recovered over p=0.01/0.05/0.1: {}", means.join(" / ")),
    )
}

fn reference_sir(g: &DirectedGraph) -> Outcome {
    let b = &sir_batches(g, 100, &[0.01])[0];
    let r = b.mean_recovered_fraction();
    let s = b.mean_steps();
    Outcome::new(
        (r - 0.617).abs() <= 0.05 && (s - 8.66).abs() <= 1.5,
        format!("p=0.01 recovered {r:.3} (0.617 +- 0.05), steps {s:.2} (8.66 +- 1.5)"),
    )
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_recipgen");
    let dir = tempfile::tempdir().unwrap();
    let run = |args: &[&str], out: &str| {
        let status = Command::new(bin)
            .args(args)
            .arg("--out-dir")
            .arg(dir.path().join(out))
            .output()
            .expect("binary runs");
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    };
    let read = |p: &str| std::fs::read(dir.path().join(p)).unwrap();
    let mut same_graph = true;
    for preset in ["G4", "G9", "G12"] {
        run(&["generate", "--preset", preset, "--seed", "17"], "a");
        let a = read("a/graph.tsv");
        run(&["generate", "--preset", preset, "--seed", "17"], "b");
        same_graph &= a == read("b/graph.tsv") && !a.is_empty();
    }
    let graph = dir.path().join("a/graph.tsv");
    let graph = graph.to_str().unwrap();
    run(&["sir", graph, "--p", "0.05,0.2", "--runs", "50", "--seed", "3"], "s1");
    run(&["sir", graph, "--p", "0.05,0.2", "--runs", "50", "--seed", "3"], "s2");
    let same_sir = read("s1/sir.json") == read("s2/sir.json");
    Outcome::new(
        same_graph && same_sir,
        format!("generate byte-identical: {same_graph}; sir per-run lists identical: {same_sir}"),
    )
}

fn main() {
    let quick = std::env::var_os("ACCEPTANCE_QUICK").is_some();
    let mut suite = Suite { failures: 0 };

    suite.run("C1", "simplicity and degree caps", minutes(5), simplicity_and_caps);
    suite.run("C2", "degree-sequence invariants", minutes(1), degree_sequence_invariants);
    suite.run("C3", "rank correlations at 20,000 nodes (3 seeds)", minutes(10), || {
        rho_outcome(mean_rho(&rescaled(&presets::SCALE_100K, 20_000), 3), 0.05)
    });
    if quick {
        println!("[SKIP] C3 rank correlations at 100,000 nodes: ACCEPTANCE_QUICK set");
    } else {
        suite.run("C3", "rank correlations at 100,000 nodes (3 seeds)", minutes(120), || {
            rho_outcome(mean_rho(&presets::SCALE_100K, 3), 0.03)
        });
    }
    suite.run("C4", "clustering and small world at 14 sizes", minutes(60), clustering_and_small_world);
    suite.run("C5", "metric oracle equivalence", minutes(2), oracle_equivalence);

    let sir_start = Instant::now();
    suite.run("C6ab", "SIR trivial case and conservation", minutes(30), sir_trivial_and_conservation);
    suite.run("C6c", "SIR monotone in p (10,000 nodes)", minutes(30), || monotone(10_000));
    suite.run("C6c", "SIR monotone in p (20,000 nodes)", minutes(30), || monotone(20_000));
    if quick {
        println!("[SKIP] C6d SIR at 100,000 nodes: ACCEPTANCE_QUICK set");
    } else {
        let g = generate_graph(&presets::SCALE_100K.gen_config(0).unwrap()).unwrap().graph;
        suite.soft("C6d", "SIR at 100,000 nodes vs reference", || reference_sir(&g));
    }
    let sir_total = sir_start.elapsed();
    if sir_total > minutes(30) {
        suite.failures += 1;
        println!("[FAIL] C6 SIR criteria took {:.1}s (budget 1800s)", sir_total.as_secs_f64());
    }

    suite.run("C7", "determinism of generate and sir", minutes(5), determinism);
    println!("[INFO] C8 exact per-graph values are not a criterion; see C3, C4, C6");

    if suite.failures > 0 {
        println!("acceptance: {} criteria failed", suite.failures);
        std::process::exit(1);
    }
    println!("acceptance: all hard criteria passed");
}
