//! Arithmetic in the cyclic ring used by the code: padding, shifts and
//! inversion of binomials.
//!
//! `cargo run --example ring_arithmetic`

use cyclone::{pad, unpad, DataSymbol};

fn show(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn main() -> cyclone::Result<()> {
    // w = 4 data bits live in the ring with p = 5.
    let x = DataSymbol::from_bits(&[true, false, true, true]);
    let g = pad(&x);
    println!("x              = {}", show(&x.to_bits()));
    println!("pad(x)         = {}", show(&g.to_bits()));

    let shifted = g.shift_mul(2);
    println!("D^2 pad(x)     = {}", show(&shifted.to_bits()));
    println!("back           = {}", show(&unpad(&shifted.shift_inv(2)).to_bits()));

    let b = g.binomial_mul(1, 3)?;
    println!("(D+D^3) pad(x) = {}", show(&b.to_bits()));
    let recovered = unpad(&b.binomial_inv(1, 3)?);
    println!("inverted       = {}", show(&recovered.to_bits()));
    assert_eq!(recovered, x);

    // Adding the all-ones vector does not change the unpadded value.
    let mut complemented = b.clone();
    complemented.complement();
    println!("complement and unpad agree: {}", unpad(&complemented) == unpad(&b));
    Ok(())
}
