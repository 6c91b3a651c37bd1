//! Symbol stream files.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! "CYCN"  u8 version=1  u16 w  u8 parts  u16 w_i per part  u32 n
//! u8 dist (0 ideal, 1 robust, 2 fixed pair, 3 fixed one)  f64 c  f64 delta
//! u64 seed  u64 original length
//! then records: u64 ell, w/8 bytes
//! ```
//!
//! A file of `len` bytes is cut into `n = ceil(8 len / w)` symbols, the last
//! one zero-padded.

use std::io::{self, Read, Write};
use std::sync::Arc;

use crate::encode::CodeConfig;
use crate::error::{Error, Result};
use crate::ring::DataSymbol;
use crate::soliton::{DegreeDistribution, DistributionKind};
use crate::wordlen::{part_configs, split, SplitDecoder, SplitEncoder, WordPlan};

pub const MAGIC: [u8; 4] = *b"CYCN";
pub const VERSION: u8 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct StreamHeader {
    pub plan: WordPlan,
    pub n: u32,
    pub dist: DistributionKind,
    pub seed: u64,
    pub original_len: u64,
}

fn dist_code(kind: DistributionKind) -> (u8, f64, f64) {
    match kind {
        DistributionKind::Ideal => (0, 0.0, 0.0),
        DistributionKind::Robust { c, delta } => (1, c, delta),
        DistributionKind::FixedPair => (2, 0.0, 0.0),
        DistributionKind::FixedOne => (3, 0.0, 0.0),
    }
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        let end = self.pos + N;
        let bytes = self
            .buf
            .get(self.pos..end)
            .ok_or_else(|| Error::Format("stream header is truncated".into()))?;
        self.pos = end;
        Ok(bytes.try_into().expect("length checked"))
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take::<1>()?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take()?))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take()?))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take()?))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take()?))
    }
}

impl StreamHeader {
    /// Header for `original_len` bytes coded at width `w`.
    pub fn for_file(original_len: u64, w: u32, dist: DistributionKind, seed: u64) -> Result<Self> {
        if w % 8 != 0 {
            return Err(Error::InvalidConfig(format!("w = {w} is not a whole number of bytes")));
        }
        let plan = split(w)?;
        let n = (original_len * 8).div_ceil(w as u64);
        let n = u32::try_from(n).map_err(|_| Error::InvalidConfig("file too large for a single stream".into()))?;
        Ok(Self {
            plan,
            n,
            dist,
            seed,
            original_len,
        })
    }

    pub fn w(&self) -> u32 {
        self.plan.w()
    }

    pub fn symbol_bytes(&self) -> usize {
        self.w() as usize / 8
    }

    pub fn record_len(&self) -> usize {
        8 + self.symbol_bytes()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(48);
        out.extend_from_slice(&MAGIC);
        out.push(VERSION);
        out.extend_from_slice(&(self.w() as u16).to_le_bytes());
        out.push(self.plan.parts().len() as u8);
        for &wi in self.plan.parts() {
            out.extend_from_slice(&(wi as u16).to_le_bytes());
        }
        out.extend_from_slice(&self.n.to_le_bytes());
        let (kind, c, delta) = dist_code(self.dist);
        out.push(kind);
        out.extend_from_slice(&c.to_le_bytes());
        out.extend_from_slice(&delta.to_le_bytes());
        out.extend_from_slice(&self.seed.to_le_bytes());
        out.extend_from_slice(&self.original_len.to_le_bytes());
        out
    }

    /// Parses a header at the start of `buf`, returning it and its length.
    pub fn from_bytes(buf: &[u8]) -> Result<(Self, usize)> {
        let mut cur = Cursor { buf, pos: 0 };
        if cur.take::<4>()? != MAGIC {
            return Err(Error::Format("bad magic, not a symbol stream".into()));
        }
        let version = cur.u8()?;
        if version != VERSION {
            return Err(Error::Format(format!("unsupported stream version {version}")));
        }
        let w = cur.u16()? as u32;
        let count = cur.u8()?;
        let parts = (0..count).map(|_| cur.u16().map(u32::from)).collect::<Result<Vec<_>>>()?;
        let plan = WordPlan::from_parts(parts).map_err(|e| Error::Format(e.to_string()))?;
        if plan.w() != w || w % 8 != 0 {
            return Err(Error::Format(format!("width {w} does not match its parts {:?}", plan.parts())));
        }
        let n = cur.u32()?;
        let kind = cur.u8()?;
        let c = cur.f64()?;
        let delta = cur.f64()?;
        let dist = match kind {
            0 => DistributionKind::Ideal,
            1 => DistributionKind::Robust { c, delta },
            2 => DistributionKind::FixedPair,
            3 => DistributionKind::FixedOne,
            k => return Err(Error::Format(format!("unknown distribution kind {k}"))),
        };
        let seed = cur.u64()?;
        let original_len = cur.u64()?;
        if (original_len * 8).div_ceil(w as u64) != n as u64 {
            return Err(Error::Format(format!("{original_len} bytes cannot make {n} symbols of {w} bits")));
        }
        let header = Self {
            plan,
            n,
            dist,
            seed,
            original_len,
        };
        Ok((header, cur.pos))
    }

    pub fn write_to<W: Write>(&self, out: &mut W) -> Result<()> {
        out.write_all(&self.to_bytes())?;
        Ok(())
    }

    pub fn read_from<R: Read>(input: &mut R) -> Result<Self> {
        // Fixed prefix up to and including the part count.
        let mut buf = vec![0u8; 8];
        read_exact_or_format(input, &mut buf)?;
        let parts = buf[7] as usize;
        let rest = 2 * parts + 4 + 1 + 8 + 8 + 8 + 8;
        buf.resize(8 + rest, 0);
        read_exact_or_format(input, &mut buf[8..])?;
        Ok(Self::from_bytes(&buf)?.0)
    }

    /// Configurations of the sub-codes; fails for an empty file.
    pub fn configs(&self) -> Result<Vec<CodeConfig>> {
        let n = self.n as usize;
        let dist = Arc::new(DegreeDistribution::from_kind(n, self.dist)?);
        part_configs(&self.plan, n, dist, self.seed)
    }
}

fn read_exact_or_format<R: Read>(input: &mut R, buf: &mut [u8]) -> Result<()> {
    input.read_exact(buf).map_err(|e| match e.kind() {
        io::ErrorKind::UnexpectedEof => Error::Format("stream header is truncated".into()),
        _ => Error::Io(e),
    })
}

pub fn write_record<W: Write>(out: &mut W, ell: u64, y: &DataSymbol) -> Result<()> {
    out.write_all(&ell.to_le_bytes())?;
    out.write_all(&y.to_bytes())?;
    Ok(())
}

/// Next record, `None` at a clean end of stream.
pub fn read_record<R: Read>(input: &mut R, header: &StreamHeader) -> Result<Option<(u64, DataSymbol)>> {
    let mut buf = vec![0u8; header.record_len()];
    let mut filled = 0;
    while filled < buf.len() {
        match input.read(&mut buf[filled..]) {
            Ok(0) => break,
            Ok(k) => filled += k,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
            Err(e) => return Err(e.into()),
        }
    }
    if filled == 0 {
        return Ok(None);
    }
    if filled < buf.len() {
        return Err(Error::Format(format!("partial record of {filled} bytes at end of stream")));
    }
    let ell = u64::from_le_bytes(buf[..8].try_into().expect("8 bytes"));
    Ok(Some((ell, DataSymbol::from_bytes(header.w(), &buf[8..])?)))
}

/// Cuts `bytes` into `w`-bit symbols, zero-padding the last one.
pub fn bytes_to_symbols(bytes: &[u8], w: u32) -> Result<Vec<DataSymbol>> {
    let size = w as usize / 8;
    bytes
        .chunks(size)
        .map(|chunk| {
            let mut block = chunk.to_vec();
            block.resize(size, 0);
            DataSymbol::from_bytes(w, &block)
        })
        .collect()
}

/// Inverse of [`bytes_to_symbols`].
pub fn symbols_to_bytes(symbols: &[DataSymbol], len: u64) -> Vec<u8> {
    let mut out: Vec<u8> = symbols.iter().flat_map(|s| s.to_bytes()).collect();
    out.truncate(len as usize);
    out
}

/// Encoder for a whole file.
#[derive(Debug, Clone)]
pub struct FileEncoder {
    header: StreamHeader,
    inner: Option<SplitEncoder>,
}

impl FileEncoder {
    pub fn new(bytes: &[u8], w: u32, dist: DistributionKind, seed: u64) -> Result<Self> {
        let header = StreamHeader::for_file(bytes.len() as u64, w, dist, seed)?;
        let inner = if header.n == 0 {
            None
        } else {
            let data = bytes_to_symbols(bytes, w)?;
            Some(SplitEncoder::new(header.plan.clone(), header.configs()?, &data)?)
        };
        Ok(Self { header, inner })
    }

    pub fn header(&self) -> &StreamHeader {
        &self.header
    }

    pub fn n(&self) -> usize {
        self.header.n as usize
    }

    /// Code symbol `ell`; `None` for an empty file.
    pub fn encode(&self, ell: u64) -> Option<DataSymbol> {
        self.inner.as_ref().map(|e| e.encode(ell))
    }

    /// Writes the header and symbols `1..=m`.
    pub fn write_stream<W: Write>(&self, out: &mut W, m: u64) -> Result<()> {
        self.header.write_to(out)?;
        if let Some(enc) = &self.inner {
            for ell in 1..=m {
                write_record(out, ell, &enc.encode(ell))?;
            }
        }
        Ok(())
    }
}

/// Decoder for a whole file.
#[derive(Debug, Clone)]
pub struct FileDecoder {
    header: StreamHeader,
    inner: Option<SplitDecoder>,
}

impl FileDecoder {
    pub fn new(header: StreamHeader) -> Result<Self> {
        let inner = if header.n == 0 {
            None
        } else {
            Some(SplitDecoder::new(header.plan.clone(), header.configs()?)?)
        };
        Ok(Self { header, inner })
    }

    pub fn header(&self) -> &StreamHeader {
        &self.header
    }

    /// Feeds one code symbol. Symbols after completion are ignored.
    pub fn receive(&mut self, ell: u64, y: &DataSymbol) -> Result<()> {
        match &mut self.inner {
            Some(dec) if !dec.is_complete() => dec.receive(ell, y),
            _ => Ok(()),
        }
    }

    pub fn is_complete(&self) -> bool {
        self.inner.as_ref().is_none_or(SplitDecoder::is_complete)
    }

    pub fn decoded_count(&self) -> usize {
        self.inner.as_ref().map_or(0, SplitDecoder::decoded_count)
    }

    /// The original bytes, once complete.
    pub fn bytes(&self) -> Option<Vec<u8>> {
        match &self.inner {
            None => Some(Vec::new()),
            Some(dec) => Some(symbols_to_bytes(&dec.decoded_data()?, self.header.original_len)),
        }
    }
}
