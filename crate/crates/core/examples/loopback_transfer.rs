//! Sends a file over UDP on the loopback interface with simulated loss.
//!
//! `cargo run --release --example loopback_transfer -- [bytes] [drop]`

use std::net::UdpSocket;
use std::thread;

use cyclone::net::{serve_recv, serve_send, RecvOptions, SendOptions};
use cyclone::rng::SymbolRng;
use cyclone::stream::FileEncoder;
use cyclone::DistributionKind;

fn main() -> cyclone::Result<()> {
    let mut args = std::env::args().skip(1);
    let len: usize = args.next().map_or(256 * 1024, |s| s.parse().expect("bytes"));
    let drop: f64 = args.next().map_or(0.3, |s| s.parse().expect("drop"));

    let mut rng = SymbolRng::from_state(8);
    let bytes: Vec<u8> = (0..len).map(|_| rng.next_u64() as u8).collect();
    let enc = FileEncoder::new(&bytes, 1024, DistributionKind::Robust { c: 0.01, delta: 0.5 }, 1)?;

    let recv_sock = UdpSocket::bind("127.0.0.1:0")?;
    let addr = recv_sock.local_addr()?;
    let receiver = thread::spawn(move || serve_recv(&recv_sock, &RecvOptions::default()));

    let send_sock = UdpSocket::bind("127.0.0.1:0")?;
    let opts = SendOptions { drop_rate: drop, drop_seed: 4, ..SendOptions::default() };
    let sent = serve_send(&send_sock, addr, &enc, &opts)?;
    let received = receiver.join().expect("receiver thread")?;

    println!("n = {}, generated {} symbols, dropped {}, sent {}", sent.n, sent.generated, sent.dropped, sent.sent);
    println!("receiver completed at ell {} after {} datagrams in {:.2?}", received.last_ell, received.received, received.elapsed);
    assert_eq!(received.bytes, bytes);
    println!("transfer identical");
    Ok(())
}
