//! Prints the quantities the replication presets are tuned for, per seed.
//!
//! usage: calibrate PRESET SEEDS [SHARE SHAPE_R SHAPE_I SHAPE_O]

use recipgen::metrics::{full_report, AnalysisOptions};
use recipgen::presets::{self, Preset};
use recipgen::generate_graph;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let base = presets::find(&args[0]).expect("preset");
    let seeds: u64 = args.get(1).map_or(3, |s| s.parse().unwrap());
    let num = |i: usize| args.get(i).map(|s| s.parse::<f64>().unwrap());
    let preset = Preset {
        recip_share: num(2).unwrap_or(base.recip_share),
        shapes: [
            num(3).unwrap_or(base.shapes[0]),
            num(4).unwrap_or(base.shapes[1]),
            num(5).unwrap_or(base.shapes[2]),
        ],
        ..*base
    };
    for seed in 0..seeds {
        let config = preset.gen_config(seed).unwrap();
        let g = generate_graph(&config).unwrap();
        let r = full_report(&g.graph, Some(&g.stats), None, &AnalysisOptions::default());
        println!(
            "{} seed {seed}: edges {} lwcc {} lscc {} cc {:.3} uaspl {:.2} udiam {} diam {} rho {:.3} {:.3} {:.3} gen {:.1}s",
            preset.name,
            r.edges,
            r.lwcc_size,
            r.lscc_size,
            r.avg_cc_lwcc,
            r.aspl_lwcc_undirected.unwrap(),
            r.diameter_lwcc_undirected.unwrap(),
            r.diameter_lwcc,
            r.rho1.unwrap_or(f64::NAN),
            r.rho2.unwrap_or(f64::NAN),
            r.rho3.unwrap_or(f64::NAN),
            g.timings.total().as_secs_f64(),
        );
    }
}
