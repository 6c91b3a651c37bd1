//! Word lengths whose ring would not be prime are split into two parts
//! that share clause indices.
//!
//! `cargo run --release --example word_split -- [w...]`

use std::sync::Arc;

use cyclone::baselines::Codec;
use cyclone::rng::SymbolRng;
use cyclone::simlab::{run_split_trials, OverheadRow};
use cyclone::wordlen::part_configs;
use cyclone::{split, DataSymbol, DegreeDistribution, SplitDecoder, SplitEncoder};

fn main() -> cyclone::Result<()> {
    let widths: Vec<u32> = {
        let args: Vec<u32> = std::env::args().skip(1).map(|s| s.parse().expect("w")).collect();
        if args.is_empty() { vec![4, 8, 12, 64, 256, 1000] } else { args }
    };
    for &w in &widths {
        let plan = split(w)?;
        let kind = if plan.is_single() { "native" } else if plan.shared_params() { "equal halves" } else { "unequal parts" };
        println!("w = {w:>5}: parts {:?} ({kind})", plan.parts());
    }

    let (n, w) = (300, 8);
    let plan = split(w)?;
    let dist = Arc::new(DegreeDistribution::robust_soliton(n, 0.01, 0.5)?);
    let cfgs = part_configs(&plan, n, dist, 5)?;
    let mut rng = SymbolRng::from_state(9);
    let data: Vec<DataSymbol> = (0..n).map(|_| DataSymbol::from_bits(&(0..w).map(|_| rng.chance(0.5)).collect::<Vec<_>>())).collect();
    let enc = SplitEncoder::new(plan.clone(), cfgs.clone(), &data)?;
    let mut dec = SplitDecoder::new(plan, cfgs)?;
    let mut ell = 0;
    while !dec.is_complete() {
        ell += 1;
        dec.receive(ell, &enc.encode(ell))?;
    }
    assert_eq!(dec.decoded_data().unwrap(), data);
    println!("n = {n}, w = {w}: decoded both parts after {ell} symbols");

    // Overhead of native, equal and unequal splits on the same seeds.
    let codec = Codec::cyclone_robust();
    for w in [16, 8, 64, 100, 98] {
        let rs = run_split_trials(&codec, 1000, w, 100, 20_000, 0)?;
        let row = OverheadRow::from_trials(&codec.id(), 1000, &rs);
        println!("n = 1000, w = {w:>3} {:?}: mean overhead {:.2}%, p90 {:.2}%", split(w)?.parts(), 100.0 * row.mean, 100.0 * row.p90);
    }
    Ok(())
}
