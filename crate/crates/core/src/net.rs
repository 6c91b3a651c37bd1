//! File transfer over UDP.
//!
//! The sender announces the stream with INIT until the receiver answers
//! INIT_ACK, then sends code symbols at a fixed pace until the receiver
//! reports DONE. Lost datagrams are never resent: the receiver just uses
//! whichever symbols arrive.
//!
//! Datagrams start with a type byte:
//!
//! | type | name     | body                                  |
//! |------|----------|---------------------------------------|
//! | 0    | INIT     | stream header, u64 file length        |
//! | 1    | SYMBOL   | u64 ell, w/8 symbol bytes             |
//! | 2    | DONE     | empty                                 |
//! | 3    | INIT_ACK | empty                                 |

use std::io;
use std::net::{SocketAddr, ToSocketAddrs, UdpSocket};
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::ring::DataSymbol;
use crate::rng::{mix, SymbolRng};
use crate::stream::{FileDecoder, FileEncoder, StreamHeader};

pub const INIT: u8 = 0;
pub const SYMBOL: u8 = 1;
pub const DONE: u8 = 2;
pub const INIT_ACK: u8 = 3;

/// Largest datagram either side sends.
pub const MAX_DATAGRAM: usize = 1400;
/// Widest symbol that fits a datagram.
pub const MAX_W: u32 = 11048;

#[derive(Debug, Clone, PartialEq)]
pub enum Packet {
    Init { header: StreamHeader, len: u64 },
    Symbol { ell: u64, payload: Vec<u8> },
    Done,
    InitAck,
}

impl Packet {
    pub fn to_bytes(&self) -> Vec<u8> {
        match self {
            Packet::Init { header, len } => {
                let mut out = vec![INIT];
                out.extend_from_slice(&header.to_bytes());
                out.extend_from_slice(&len.to_le_bytes());
                out
            }
            Packet::Symbol { ell, payload } => {
                let mut out = Vec::with_capacity(9 + payload.len());
                out.push(SYMBOL);
                out.extend_from_slice(&ell.to_le_bytes());
                out.extend_from_slice(payload);
                out
            }
            Packet::Done => vec![DONE],
            Packet::InitAck => vec![INIT_ACK],
        }
    }

    pub fn parse(buf: &[u8]) -> Result<Self> {
        let (&kind, body) = buf.split_first().ok_or_else(|| Error::Format("empty datagram".into()))?;
        match kind {
            INIT => {
                let (header, used) = StreamHeader::from_bytes(body)?;
                let rest = &body[used..];
                if rest.len() != 8 {
                    return Err(Error::Format("INIT must end with the file length".into()));
                }
                let len = u64::from_le_bytes(rest.try_into().expect("8 bytes"));
                if len != header.original_len {
                    return Err(Error::Format("INIT file length disagrees with its header".into()));
                }
                Ok(Packet::Init { header, len })
            }
            SYMBOL => {
                if body.len() < 8 {
                    return Err(Error::Format("SYMBOL datagram too short".into()));
                }
                let ell = u64::from_le_bytes(body[..8].try_into().expect("8 bytes"));
                Ok(Packet::Symbol { ell, payload: body[8..].to_vec() })
            }
            DONE => Ok(Packet::Done),
            INIT_ACK => Ok(Packet::InitAck),
            k => Err(Error::Format(format!("unknown datagram type {k}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SendOptions {
    /// Probability of discarding each symbol before it is sent.
    pub drop_rate: f64,
    pub drop_seed: u64,
    /// Pause after every symbol datagram.
    pub pace: Duration,
    /// Give up after generating this many symbols; `None` means `20 n + 100`.
    pub max_symbols: Option<u64>,
    pub init_retry: Duration,
    pub init_timeout: Duration,
    /// How long to wait for DONE once the symbol budget is spent.
    pub done_timeout: Duration,
}

impl Default for SendOptions {
    fn default() -> Self {
        Self {
            drop_rate: 0.0,
            drop_seed: 0,
            pace: Duration::from_micros(20),
            max_symbols: None,
            init_retry: Duration::from_millis(100),
            init_timeout: Duration::from_secs(10),
            done_timeout: Duration::from_secs(2),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SendReport {
    pub n: usize,
    /// Highest `ell` generated, dropped or not.
    pub generated: u64,
    pub dropped: u64,
    pub sent: u64,
    pub init_attempts: u32,
    pub completed: bool,
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub struct RecvOptions {
    /// Abort when nothing arrives for this long.
    pub idle_timeout: Duration,
    /// DONE datagrams sent on completion.
    pub done_repeats: u32,
    /// Keep answering stray datagrams with DONE for this long.
    pub linger: Duration,
}

impl Default for RecvOptions {
    fn default() -> Self {
        Self {
            idle_timeout: Duration::from_secs(10),
            done_repeats: 5,
            linger: Duration::from_millis(200),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecvReport {
    pub n: usize,
    pub received: u64,
    /// `ell` of the symbol that completed decoding.
    pub last_ell: u64,
    pub bytes: Vec<u8>,
    pub elapsed: Duration,
}

fn resolve(addr: impl ToSocketAddrs) -> Result<SocketAddr> {
    addr.to_socket_addrs()?
        .next()
        .ok_or_else(|| Error::InvalidConfig("address did not resolve".into()))
}

fn recv_packet(sock: &UdpSocket, buf: &mut [u8]) -> Result<Option<(Packet, SocketAddr)>> {
    match sock.recv_from(buf) {
        Ok((len, from)) => Ok(Some((Packet::parse(&buf[..len])?, from))),
        Err(e) if matches!(e.kind(), io::ErrorKind::WouldBlock | io::ErrorKind::TimedOut) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// Streams `bytes` from `sock` to `peer`.
pub fn serve_send(sock: &UdpSocket, peer: impl ToSocketAddrs, encoder: &FileEncoder, opts: &SendOptions) -> Result<SendReport> {
    let start = Instant::now();
    let peer = resolve(peer)?;
    let header = encoder.header().clone();
    if header.w() > MAX_W {
        return Err(Error::InvalidConfig(format!("w = {} exceeds the datagram limit {MAX_W}", header.w())));
    }
    let n = encoder.n();
    let mut report = SendReport {
        n,
        generated: 0,
        dropped: 0,
        sent: 0,
        init_attempts: 0,
        completed: false,
        elapsed: Duration::ZERO,
    };
    let init = Packet::Init { len: header.original_len, header }.to_bytes();
    let mut buf = vec![0u8; 2048];

    let mut done = false;
    sock.set_nonblocking(false)?;
    sock.set_read_timeout(Some(opts.init_retry))?;
    let acked = loop {
        if start.elapsed() >= opts.init_timeout {
            break false;
        }
        sock.send_to(&init, peer)?;
        report.init_attempts += 1;
        let deadline = Instant::now() + opts.init_retry;
        let mut got = false;
        while Instant::now() < deadline {
            match recv_packet(sock, &mut buf) {
                Ok(Some((Packet::InitAck, from))) if from == peer => got = true,
                Ok(Some((Packet::Done, from))) if from == peer => {
                    got = true;
                    done = true;
                }
                Ok(None) => break,
                _ => continue,
            }
            if got {
                break;
            }
        }
        if got {
            break true;
        }
    };
    if !acked {
        report.elapsed = start.elapsed();
        return Ok(report);
    }

    let budget = opts.max_symbols.unwrap_or(20 * n as u64 + 100);
    let mut drops = SymbolRng::from_state(mix(opts.drop_seed));
    sock.set_nonblocking(true)?;
    while !done && report.generated < budget {
        if n == 0 {
            break;
        }
        report.generated += 1;
        let ell = report.generated;
        if drops.chance(opts.drop_rate) {
            report.dropped += 1;
        } else {
            let y = encoder.encode(ell).expect("non-empty file");
            let datagram = Packet::Symbol { ell, payload: y.to_bytes() }.to_bytes();
            match sock.send_to(&datagram, peer) {
                Ok(_) => report.sent += 1,
                // A full socket buffer is just another erasure.
                Err(e) if e.kind() == io::ErrorKind::WouldBlock => {}
                Err(e) => return Err(e.into()),
            }
        }
        while let Some((packet, from)) = recv_packet(sock, &mut buf).unwrap_or(None) {
            if from == peer && packet == Packet::Done {
                done = true;
            }
        }
        if !opts.pace.is_zero() {
            std::thread::sleep(opts.pace);
        }
    }

    if !done {
        sock.set_nonblocking(false)?;
        sock.set_read_timeout(Some(Duration::from_millis(50)))?;
        let deadline = Instant::now() + opts.done_timeout;
        while !done && Instant::now() < deadline {
            if let Ok(Some((Packet::Done, from))) = recv_packet(sock, &mut buf) {
                done = from == peer;
            }
        }
    }
    sock.set_nonblocking(false)?;
    report.completed = done;
    report.elapsed = start.elapsed();
    Ok(report)
}

/// Receives one file on `sock`.
pub fn serve_recv(sock: &UdpSocket, opts: &RecvOptions) -> Result<RecvReport> {
    let start = Instant::now();
    sock.set_nonblocking(false)?;
    sock.set_read_timeout(Some(Duration::from_millis(100)))?;
    let mut buf = vec![0u8; 2048];
    let mut last_packet = Instant::now();

    let (mut decoder, sender) = loop {
        if last_packet.elapsed() > opts.idle_timeout {
            return Err(Error::Io(io::Error::new(io::ErrorKind::TimedOut, "no INIT received")));
        }
        match recv_packet(sock, &mut buf)? {
            Some((Packet::Init { header, .. }, from)) => {
                sock.send_to(&Packet::InitAck.to_bytes(), from)?;
                break (FileDecoder::new(header)?, from);
            }
            Some(_) => last_packet = Instant::now(),
            None => {}
        }
    };
    last_packet = Instant::now();

    let symbol_bytes = decoder.header().symbol_bytes();
    let w = decoder.header().w();
    let mut received = 0u64;
    let mut last_ell = 0u64;
    while !decoder.is_complete() {
        if last_packet.elapsed() > opts.idle_timeout {
            return Err(Error::Io(io::Error::new(
                io::ErrorKind::TimedOut,
                format!("stalled with {} of {} symbols decoded", decoder.decoded_count(), decoder.header().n),
            )));
        }
        let (packet, from) = match recv_packet(sock, &mut buf) {
            Ok(Some(p)) => p,
            Ok(None) => continue,
            Err(Error::Format(_)) => continue,
            Err(e) => return Err(e),
        };
        if from != sender {
            continue;
        }
        last_packet = Instant::now();
        match packet {
            Packet::Init { .. } => {
                sock.send_to(&Packet::InitAck.to_bytes(), from)?;
            }
            Packet::Symbol { ell, payload } if payload.len() == symbol_bytes => {
                received += 1;
                last_ell = ell;
                match decoder.receive(ell, &DataSymbol::from_bytes(w, &payload)?) {
                    Ok(()) | Err(Error::DuplicateSymbol { .. }) => {}
                    Err(e) => return Err(e),
                }
            }
            _ => {}
        }
    }

    for _ in 0..opts.done_repeats {
        sock.send_to(&Packet::Done.to_bytes(), sender)?;
    }
    let linger_end = Instant::now() + opts.linger;
    sock.set_read_timeout(Some(Duration::from_millis(20)))?;
    while Instant::now() < linger_end {
        if let Ok(Some((_, from))) = recv_packet(sock, &mut buf) {
            if from == sender {
                sock.send_to(&Packet::Done.to_bytes(), sender)?;
            }
        }
    }

    let bytes = decoder.bytes().expect("decoder is complete");
    Ok(RecvReport {
        n: decoder.header().n as usize,
        received,
        last_ell,
        bytes,
        elapsed: start.elapsed(),
    })
}
