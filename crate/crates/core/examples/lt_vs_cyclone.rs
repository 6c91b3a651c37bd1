//! Compares the Cyclone decoder with plain LT peeling on the same degree
//! sequences, symbol by symbol.
//!
//! `cargo run --release --example lt_vs_cyclone -- [n] [trials]`

use cyclone::baselines::Codec;
use cyclone::simlab::{run_trial, trial_data};
use cyclone::Encoder;

fn main() -> cyclone::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(1000, |s| s.parse().expect("n"));
    let trials: u64 = args.next().map_or(50, |s| s.parse().expect("trials"));
    let w = 100;

    let (cyclone, lt) = (Codec::cyclone_robust(), Codec::lt_robust());
    let (mut wins, mut ties, mut losses) = (0, 0, 0);
    let (mut sum_c, mut sum_l) = (0u64, 0u64);
    for seed in 0..trials {
        let c = run_trial(&cyclone, n, w, seed, 20 * n as u64)?.symbols_read;
        let l = run_trial(&lt, n, w, seed, 20 * n as u64)?.symbols_read;
        sum_c += c;
        sum_l += l;
        match c.cmp(&l) {
            std::cmp::Ordering::Less => wins += 1,
            std::cmp::Ordering::Equal => ties += 1,
            std::cmp::Ordering::Greater => losses += 1,
        }
    }
    println!("n = {n}, {trials} seeds");
    println!("mean symbols: cyclone {:.1}, lt {:.1}", sum_c as f64 / trials as f64, sum_l as f64 / trials as f64);
    println!("cyclone needed fewer symbols on {wins} seeds, equal on {ties}, more on {losses}");

    // Progress curves for one seed.
    let data = trial_data(n, w, 0);
    let mut sessions = [
        cyclone.session(cyclone.config(n, w, 0)?),
        lt.session(lt.config(n, w, 0)?),
    ];
    let encoders: Vec<Encoder> = sessions.iter().map(|s| Encoder::new(s.config().clone(), &data)).collect::<Result<_, _>>()?;
    println!("{:>8} {:>8} {:>8}", "ell", "cyclone", "lt");
    for ell in 1..=(3 * n as u64 / 2) {
        for (s, e) in sessions.iter_mut().zip(&encoders) {
            if !s.is_complete() {
                s.receive(ell, &e.encode(ell))?;
            }
        }
        if ell % (n as u64 / 10).max(1) == 0 {
            println!("{ell:>8} {:>8} {:>8}", sessions[0].decoded_count(), sessions[1].decoded_count());
        }
    }
    Ok(())
}
