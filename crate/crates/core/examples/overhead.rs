//! Overhead statistics for the simulated codecs.
//!
//! `cargo run --release --example overhead -- [n] [trials]`

use cyclone::baselines::Codec;
use cyclone::simlab::{overhead_experiment, ExperimentGrid};

fn main() -> cyclone::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(100, |s| s.parse().expect("n"));
    let trials: usize = args.next().map_or(200, |s| s.parse().expect("trials"));

    let codecs = vec![Codec::cyclone_robust(), Codec::cyclone_ideal(), Codec::lt_robust(), Codec::lt_ideal(), Codec::pair(), Codec::random()];
    let grid = ExperimentGrid::new(codecs, vec![n], trials);
    println!("n = {n}, {trials} trials, w = {}", grid.w);
    println!("{:<16} {:>9} {:>9} {:>9} {:>9} {:>6}", "codec", "mean", "median", "std", "p90", "fail");
    for row in overhead_experiment(&grid)? {
        println!(
            "{:<16} {:>8.2}% {:>8.2}% {:>8.2}% {:>8.2}% {:>6}",
            row.codec,
            100.0 * row.mean,
            100.0 * row.median,
            100.0 * row.std,
            100.0 * row.p90,
            row.incomplete
        );
    }
    Ok(())
}
