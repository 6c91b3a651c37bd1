#![allow(dead_code)]

use std::collections::HashSet;
use std::sync::Arc;

use cyclone::encode::{derive_clause_spec, ClauseSpec, CodeConfig};
use cyclone::rng::SymbolRng;
use cyclone::{DataSymbol, DegreeDistribution, GhostVector};

pub fn random_data(n: usize, w: u32, rng: &mut SymbolRng) -> Vec<DataSymbol> {
    (0..n).map(|_| random_symbol(w, rng)).collect()
}

pub fn random_symbol(w: u32, rng: &mut SymbolRng) -> DataSymbol {
    let bits: Vec<bool> = (0..w).map(|_| rng.chance(0.5)).collect();
    DataSymbol::from_bits(&bits)
}

pub fn random_ghost(p: u32, rng: &mut SymbolRng) -> GhostVector {
    let bits: Vec<bool> = (0..p).map(|_| rng.chance(0.5)).collect();
    GhostVector::from_bits(&bits)
}

pub fn robust_config(n: usize, w: u32, c: f64, seed: u64) -> CodeConfig {
    let dist = Arc::new(DegreeDistribution::robust_soliton(n, c, 0.5).unwrap());
    CodeConfig::new(n, w, dist, seed).unwrap()
}

/// Peeling decoder over plain XOR, kept independent of the crate's decoder:
/// each pending equation is a set of unknown indices and a byte vector.
pub struct ReferencePeeler {
    known: Vec<Option<Vec<u8>>>,
    pending: Vec<(HashSet<usize>, Vec<u8>)>,
}

impl ReferencePeeler {
    pub fn new(n: usize) -> Self {
        Self {
            known: vec![None; n],
            pending: Vec::new(),
        }
    }

    pub fn add(&mut self, spec: &ClauseSpec, y: &DataSymbol) {
        let mut unknown = HashSet::new();
        let mut value = y.to_bytes_padded();
        for i in spec.indices() {
            match &self.known[i] {
                Some(v) => xor_into(&mut value, v),
                None => {
                    unknown.insert(i);
                }
            }
        }
        self.pending.push((unknown, value));
        self.peel();
    }

    fn peel(&mut self) {
        loop {
            let Some(pos) = self.pending.iter().position(|(u, _)| u.len() == 1) else {
                self.pending.retain(|(u, _)| !u.is_empty());
                return;
            };
            let (u, v) = self.pending.swap_remove(pos);
            let i = *u.iter().next().unwrap();
            if self.known[i].is_some() {
                continue;
            }
            for (others, value) in self.pending.iter_mut() {
                if others.remove(&i) {
                    xor_into(value, &v);
                }
            }
            self.known[i] = Some(v);
        }
    }

    pub fn decoded(&self) -> Vec<bool> {
        self.known.iter().map(Option::is_some).collect()
    }

    pub fn value(&self, i: usize) -> Option<&[u8]> {
        self.known[i].as_deref()
    }

    pub fn count(&self) -> usize {
        self.known.iter().filter(|k| k.is_some()).count()
    }
}

fn xor_into(acc: &mut [u8], v: &[u8]) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a ^= b;
    }
}

/// Bit vector of a symbol, packed into bytes regardless of whether `w` is a
/// whole number of bytes.
pub trait BytesPadded {
    fn to_bytes_padded(&self) -> Vec<u8>;
}

impl BytesPadded for DataSymbol {
    fn to_bytes_padded(&self) -> Vec<u8> {
        let bits = self.to_bits();
        let mut out = vec![0u8; bits.len().div_ceil(8)];
        for (k, &b) in bits.iter().enumerate() {
            if b {
                out[k / 8] |= 1 << (k % 8);
            }
        }
        out
    }
}

/// Specs of symbols `1..=m`.
pub fn specs(cfg: &CodeConfig, m: u64) -> Vec<ClauseSpec> {
    (1..=m).map(|ell| derive_clause_spec(cfg, ell)).collect()
}

/// Mean and standard error.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, (var / n).sqrt())
}
