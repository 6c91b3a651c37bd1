//! Arithmetic in the cyclotomic ring `R_p = {0,1}^p`.
//!
//! Addition is bitwise XOR and multiplication is cyclic convolution modulo 2.
//! The codec only ever multiplies by monomials `D^i` (a cyclic rotation) and
//! binomials `D^i + D^j`, and only ever divides by those, so those are the
//! operations offered here. A `w`-bit data symbol enters the ring through
//! [`pad`], which appends a zero "ghost bit", and leaves it through [`unpad`],
//! which folds the ghost bit back into the payload. A vector and its bitwise
//! complement therefore denote the same symbol.
//!
//! Vectors are packed little-endian into 64-bit words: bit `k` is bit
//! `k % 64` of word `k / 64`. Storage bits at positions `>= len` are zero.

use std::fmt;

use crate::error::{Error, Result};
use crate::wordlen::is_prime;

#[inline]
fn word_count(bits: usize) -> usize {
    bits.div_ceil(64)
}

#[inline]
fn top_mask(bits: usize) -> u64 {
    match bits % 64 {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

/// Ring modulus `p` (a prime, at least 3) and the matching symbol width `w = p - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RingParams {
    p: u32,
}

impl RingParams {
    pub fn new(p: u32) -> Result<Self> {
        if p < 3 || !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        Ok(Self { p })
    }

    /// Parameters for data symbols of `w` bits; fails unless `w + 1` is prime.
    pub fn for_width(w: u32) -> Result<Self> {
        Self::new(w.checked_add(1).ok_or(Error::NotPrime(w as u64 + 1))?)
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn w(&self) -> u32 {
        self.p - 1
    }
}

/// Element of `R_p` in the p-bit ghost bit basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GhostVector {
    p: u32,
    words: Vec<u64>,
}

/// An external `w`-bit symbol.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DataSymbol {
    w: u32,
    words: Vec<u64>,
}

macro_rules! bit_accessors {
    ($ty:ident, $len:ident) => {
        impl $ty {
            #[inline]
            pub fn bit(&self, k: usize) -> bool {
                debug_assert!(k < self.$len as usize);
                (self.words[k / 64] >> (k % 64)) & 1 == 1
            }

            #[inline]
            pub fn set_bit(&mut self, k: usize, value: bool) {
                debug_assert!(k < self.$len as usize);
                let mask = 1u64 << (k % 64);
                if value {
                    self.words[k / 64] |= mask;
                } else {
                    self.words[k / 64] &= !mask;
                }
            }

            #[inline]
            pub fn flip_bit(&mut self, k: usize) {
                debug_assert!(k < self.$len as usize);
                self.words[k / 64] ^= 1u64 << (k % 64);
            }

            /// Bits in index order, least significant first.
            pub fn to_bits(&self) -> Vec<bool> {
                (0..self.$len as usize).map(|k| self.bit(k)).collect()
            }

            pub fn words(&self) -> &[u64] {
                &self.words
            }

            pub fn is_zero(&self) -> bool {
                self.words.iter().all(|&w| w == 0)
            }

            pub fn count_ones(&self) -> u32 {
                self.words.iter().map(|w| w.count_ones()).sum()
            }

            #[inline]
            pub fn xor_assign(&mut self, other: &Self) {
                debug_assert_eq!(self.$len, other.$len);
                for (a, b) in self.words.iter_mut().zip(&other.words) {
                    *a ^= b;
                }
            }

            fn mask_top(&mut self) {
                let bits = self.$len as usize;
                if let Some(last) = self.words.last_mut() {
                    *last &= top_mask(bits);
                }
            }
        }

        impl fmt::Debug for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}(", stringify!($ty))?;
                for k in 0..(self.$len as usize).min(96) {
                    f.write_str(if self.bit(k) { "1" } else { "0" })?;
                }
                if self.$len > 96 {
                    f.write_str("...")?;
                }
                f.write_str(")")
            }
        }
    };
}

bit_accessors!(GhostVector, p);
bit_accessors!(DataSymbol, w);

impl GhostVector {
    /// The all-zero element `O`.
    pub fn zero(p: u32) -> Self {
        Self {
            p,
            words: vec![0; word_count(p as usize)],
        }
    }

    /// The monomial `D^i`; `D^0` is the unit `I`.
    pub fn monomial(p: u32, i: u32) -> Self {
        let mut v = Self::zero(p);
        v.set_bit((i % p) as usize, true);
        v
    }

    /// The all-one element `A`.
    pub fn all_ones(p: u32) -> Self {
        let mut v = Self {
            p,
            words: vec![u64::MAX; word_count(p as usize)],
        };
        v.mask_top();
        v
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = Self::zero(bits.len() as u32);
        for (k, &b) in bits.iter().enumerate() {
            v.set_bit(k, b);
        }
        v
    }

    /// Builds a vector from packed words; bits past `p` are cleared.
    pub fn from_words(p: u32, mut words: Vec<u64>) -> Self {
        words.resize(word_count(p as usize), 0);
        let mut v = Self { p, words };
        v.mask_top();
        v
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn ghost_bit(&self) -> bool {
        self.bit(self.p as usize - 1)
    }

    /// Bitwise complement, i.e. `self + A`.
    pub fn complement(&mut self) {
        for w in &mut self.words {
            *w = !*w;
        }
        self.mask_top();
    }

    /// The member of this vector's ghost-bit class whose ghost bit is zero.
    /// Equal to `pad(unpad(self))`.
    pub fn canonicalize(&mut self) {
        if self.ghost_bit() {
            self.complement();
        }
    }

    fn parity(&self) -> bool {
        self.count_ones() % 2 == 1
    }

    /// `self + other`.
    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// `self ^= rotate(src, shift)`, i.e. `self += src * D^shift`.
    ///
    /// This is the hot path of both encoder and decoder.
    pub fn xor_rotated(&mut self, src: &Self, shift: u32) {
        debug_assert_eq!(self.p, src.p);
        let p = self.p as usize;
        let s = (shift % self.p) as usize;
        let nw = self.words.len();
        let (ws, bs) = (s / 64, s % 64);
        // low part: src << s
        for d in ws..nw {
            let si = d - ws;
            let mut v = src.words[si] << bs;
            if bs > 0 && si > 0 {
                v |= src.words[si - 1] >> (64 - bs);
            }
            self.words[d] ^= v;
        }
        // wrapped part: src >> (p - s)
        let r = p - s;
        let (ws, bs) = (r / 64, r % 64);
        for d in 0..nw {
            let si = d + ws;
            if si >= nw {
                break;
            }
            let mut v = src.words[si] >> bs;
            if bs > 0 && si + 1 < nw {
                v |= src.words[si + 1] << (64 - bs);
            }
            self.words[d] ^= v;
        }
        self.mask_top();
    }

    /// `self * D^i`: cyclic rotation, bit `k` of the result is bit `(k - i) mod p`.
    pub fn shift_mul(&self, i: u32) -> Self {
        let mut out = Self::zero(self.p);
        out.xor_rotated(self, i);
        out
    }

    /// `self * D^(p - i)`, the inverse of [`shift_mul`](Self::shift_mul).
    pub fn shift_inv(&self, i: u32) -> Self {
        self.shift_mul((self.p - i % self.p) % self.p)
    }

    /// `self * (D^i + D^j)`.
    pub fn binomial_mul(&self, i: u32, j: u32) -> Result<Self> {
        self.check_binomial(i, j)?;
        let mut out = self.shift_mul(i);
        out.xor_rotated(self, j);
        Ok(out)
    }

    /// Divides by `D^i + D^j` modulo the ghost-bit class.
    ///
    /// Returns the unique `x` with ghost bit zero such that
    /// `unpad(x * (D^i + D^j)) == unpad(self)`.
    pub fn binomial_inv(&self, i: u32, j: u32) -> Result<Self> {
        self.binomial_inv_with_cost(i, j).map(|(x, _)| x)
    }

    /// [`binomial_inv`](Self::binomial_inv), also returning the number of
    /// bit-XOR steps the recurrence performed (always `w`).
    pub fn binomial_inv_with_cost(&self, i: u32, j: u32) -> Result<(Self, usize)> {
        self.check_binomial(i, j)?;
        let p = self.p as usize;
        let (i, j) = ((i % self.p) as usize, (j % self.p) as usize);
        // Products with a binomial have even weight; of the two class
        // members exactly one does.
        let mut y = self.clone();
        if y.parity() {
            y.complement();
        }
        // y_k = x_{k-i} + x_{k-j}  =>  x_{m+(i-j)} = x_m + y_{m+i}.
        // Since p is prime the walk from the ghost bit visits every index.
        let step = (i + p - j) % p;
        let mut x = Self::zero(self.p);
        let mut prev = p - 1;
        let mut steps = 0;
        for _ in 1..p {
            let cur = (prev + step) % p;
            let b = x.bit(prev) ^ y.bit((prev + i) % p);
            x.set_bit(cur, b);
            steps += 1;
            prev = cur;
        }
        debug_assert_eq!((prev + step) % p, p - 1);
        Ok((x, steps))
    }

    fn check_binomial(&self, i: u32, j: u32) -> Result<()> {
        if i % self.p == j % self.p {
            return Err(Error::DegenerateBinomial { i, j, p: self.p });
        }
        Ok(())
    }
}

impl DataSymbol {
    pub fn zero(w: u32) -> Self {
        Self {
            w,
            words: vec![0; word_count(w as usize)],
        }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = Self::zero(bits.len() as u32);
        for (k, &b) in bits.iter().enumerate() {
            v.set_bit(k, b);
        }
        v
    }

    pub fn from_words(w: u32, mut words: Vec<u64>) -> Self {
        words.resize(word_count(w as usize), 0);
        let mut v = Self { w, words };
        v.mask_top();
        v
    }

    /// Bit `j` of byte `b` becomes symbol bit `8b + j`. Missing trailing
    /// bytes are zero; `w` must be a multiple of 8.
    pub fn from_bytes(w: u32, bytes: &[u8]) -> Result<Self> {
        if w % 8 != 0 {
            return Err(Error::InvalidConfig(format!(
                "symbol width {w} is not a whole number of bytes"
            )));
        }
        let nbytes = w as usize / 8;
        if bytes.len() > nbytes {
            return Err(Error::WidthMismatch {
                expected: w as usize,
                actual: bytes.len() * 8,
            });
        }
        let mut v = Self::zero(w);
        for (b, &byte) in bytes.iter().enumerate() {
            v.words[b / 8] |= (byte as u64) << (8 * (b % 8));
        }
        Ok(v)
    }

    /// Inverse of [`from_bytes`](Self::from_bytes); yields `w / 8` bytes.
    pub fn to_bytes(&self) -> Vec<u8> {
        (0..self.w as usize / 8)
            .map(|b| (self.words[b / 8] >> (8 * (b % 8))) as u8)
            .collect()
    }

    #[inline]
    pub fn w(&self) -> u32 {
        self.w
    }

    /// Splits into the low `low_bits` bits and the remaining high bits.
    pub fn split_at(&self, low_bits: u32) -> (Self, Self) {
        assert!(low_bits <= self.w);
        let mut low = Self::zero(low_bits);
        let mut high = Self::zero(self.w - low_bits);
        for k in 0..self.w as usize {
            if self.bit(k) {
                if k < low_bits as usize {
                    low.set_bit(k, true);
                } else {
                    high.set_bit(k - low_bits as usize, true);
                }
            }
        }
        (low, high)
    }

    /// `low` in the low-order bits followed by `high`.
    pub fn concat(low: &Self, high: &Self) -> Self {
        let mut out = Self::zero(low.w + high.w);
        for k in 0..low.w as usize {
            if low.bit(k) {
                out.set_bit(k, true);
            }
        }
        for k in 0..high.w as usize {
            if high.bit(k) {
                out.set_bit(low.w as usize + k, true);
            }
        }
        out
    }
}

/// `(x_0, ..., x_{w-1}) -> (x_0, ..., x_{w-1}, 0)`.
pub fn pad(x: &DataSymbol) -> GhostVector {
    let p = x.w + 1;
    let mut words = x.words.clone();
    words.resize(word_count(p as usize), 0);
    GhostVector { p, words }
}

/// `(x_0, ..., x_w) -> (x_0 + x_w, ..., x_{w-1} + x_w)`.
pub fn unpad(g: &GhostVector) -> DataSymbol {
    let w = g.p - 1;
    let mut words = g.words.clone();
    if g.ghost_bit() {
        for v in &mut words {
            *v = !*v;
        }
    }
    words.truncate(word_count(w as usize));
    let mut x = DataSymbol { w, words };
    x.mask_top();
    x
}

/// Full cyclic convolution, bit by bit.
///
/// Quadratic; exists to check the fast rotation and binomial paths and is
/// never used by the codec.
pub mod oracle {
    use super::GhostVector;

    /// `(a * b)_k = sum_i a_i b_{(k - i) mod p}` over GF(2).
    pub fn naive_mul(a: &GhostVector, b: &GhostVector) -> GhostVector {
        assert_eq!(a.p(), b.p());
        let p = a.p() as usize;
        let mut out = GhostVector::zero(a.p());
        for i in (0..p).filter(|&i| a.bit(i)) {
            for j in (0..p).filter(|&j| b.bit(j)) {
                out.flip_bit((i + j) % p);
            }
        }
        out
    }

    /// Rotation computed one bit at a time.
    pub fn naive_rotate(a: &GhostVector, i: u32) -> GhostVector {
        let p = a.p() as usize;
        let mut out = GhostVector::zero(a.p());
        for k in 0..p {
            out.set_bit(k, a.bit((k + p - (i as usize % p)) % p));
        }
        out
    }
}
