//! Writes a file as a stream of code symbols, loses a fraction of the
//! records, and decodes the rest.
//!
//! `cargo run --release --example stream_file -- [bytes] [drop]`

use std::io::Cursor;

use cyclone::rng::SymbolRng;
use cyclone::stream::{read_record, FileDecoder, FileEncoder, StreamHeader};
use cyclone::DistributionKind;

fn main() -> cyclone::Result<()> {
    let mut args = std::env::args().skip(1);
    let len: usize = args.next().map_or(100_000, |s| s.parse().expect("bytes"));
    let drop: f64 = args.next().map_or(0.2, |s| s.parse().expect("drop"));

    let mut rng = SymbolRng::from_state(3);
    let bytes: Vec<u8> = (0..len).map(|_| rng.next_u64() as u8).collect();
    let kind = DistributionKind::Robust { c: 0.01, delta: 0.5 };
    let enc = FileEncoder::new(&bytes, 256, kind, 42)?;
    let m = (enc.n() as f64 * 1.5 / (1.0 - drop)) as u64 + 50;
    let mut stream = Vec::new();
    enc.write_stream(&mut stream, m)?;
    println!("{len} bytes -> n = {} symbols, stream of {m} records, {} bytes", enc.n(), stream.len());

    let mut input = Cursor::new(stream);
    let header = StreamHeader::read_from(&mut input)?;
    let mut dec = FileDecoder::new(header.clone())?;
    let (mut read, mut kept) = (0u64, 0u64);
    while let Some((ell, y)) = read_record(&mut input, &header)? {
        read += 1;
        if rng.chance(drop) {
            continue;
        }
        kept += 1;
        dec.receive(ell, &y)?;
        if dec.is_complete() {
            break;
        }
    }
    println!("read {read} records, kept {kept}, decoded {} of {}", dec.decoded_count(), enc.n());
    let out = dec.bytes().expect("stream too short for this loss rate");
    assert_eq!(out, bytes);
    println!("recovered file matches");
    Ok(())
}
