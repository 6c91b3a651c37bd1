//! Encode random data symbols and decode them from the symbol stream.
//!
//! `cargo run --release --example encode_decode -- [n] [w] [seed]`

use std::sync::Arc;

use cyclone::rng::SymbolRng;
use cyclone::{CodeConfig, DataSymbol, DecoderSession, DegreeDistribution, Encoder};

fn main() -> cyclone::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(1000, |s| s.parse().expect("n"));
    let w: u32 = args.next().map_or(256, |s| s.parse().expect("w"));
    let seed: u64 = args.next().map_or(1, |s| s.parse().expect("seed"));
    if !cyclone::is_native(w) {
        eprintln!("w + 1 must be prime here; see the word_split example for other widths");
        std::process::exit(2);
    }

    let mut rng = SymbolRng::from_state(seed ^ 0xda7a);
    let data: Vec<DataSymbol> = (0..n)
        .map(|_| DataSymbol::from_bits(&(0..w).map(|_| rng.chance(0.5)).collect::<Vec<_>>()))
        .collect();

    let dist = Arc::new(DegreeDistribution::robust_soliton(n, 0.01, 0.5)?);
    let cfg = CodeConfig::new(n, w, dist, seed)?;
    let encoder = Encoder::new(cfg.clone(), &data)?;
    let mut decoder = DecoderSession::new(cfg);

    let mut ell = 0;
    while !decoder.is_complete() {
        ell += 1;
        decoder.receive(ell, &encoder.encode(ell))?;
        if ell % (n as u64 / 4).max(1) == 0 {
            println!("after {ell:>6} symbols: {} of {n} decoded", decoder.decoded_count());
        }
    }
    let stats = decoder.stats();
    println!("complete after {ell} symbols, overhead {:.2}%", 100.0 * (ell as f64 / n as f64 - 1.0));
    println!(
        "redundant {}, double rule attempts {} ({} failed), components resolved {}",
        stats.redundant, stats.double_rule_attempts, stats.double_rule_failures, stats.components_resolved
    );
    assert_eq!(decoder.decoded_data().unwrap(), data);
    println!("decoded data matches");
    Ok(())
}
