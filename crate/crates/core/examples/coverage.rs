//! Mean and 90th percentile of decoded symbols against symbols received,
//! written as CSV.
//!
//! `cargo run --release --example coverage -- [n] [trials] [out.csv]`

use std::path::PathBuf;

use cyclone::baselines::Codec;
use cyclone::simlab::{coverage_curve, write_coverage_csv};

fn main() -> cyclone::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(100, |s| s.parse().expect("n"));
    let trials: usize = args.next().map_or(200, |s| s.parse().expect("trials"));
    let out = args.next().map(PathBuf::from);

    let codec = Codec::cyclone_robust();
    let points = coverage_curve(&codec, n, 256, 2 * n as u64, trials, 0)?;
    println!("{} n = {n}, {trials} trials", codec.id());
    println!("{:>6} {:>10} {:>10}", "m", "mean", "p90");
    let step = (points.len() / 20).max(1);
    for pt in points.iter().step_by(step) {
        println!("{:>6} {:>10.2} {:>10.0}", pt.m, pt.mean_decoded, pt.p90_decoded);
    }
    if let Some(path) = out {
        write_coverage_csv(&path, &points)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
