//! Cyclone encoder.
//!
//! Code symbol `ell` is `unpad(sum_j D^f_j * pad(x_{i_j}))` for `k` distinct
//! data indices `i_j` and shift factors `f_j` in `[0, w]`. The clause
//! parameters are a pure function of the master seed and `ell`, so the
//! decoder regenerates them and a symbol on the wire carries only `ell`.

use std::collections::HashSet;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ring::{pad, unpad, DataSymbol, GhostVector, RingParams};
use crate::rng::SymbolRng;
use crate::soliton::DegreeDistribution;

/// Everything that determines a code symbol stream.
#[derive(Debug, Clone)]
pub struct CodeConfig {
    n: usize,
    ring: RingParams,
    dist: Arc<DegreeDistribution>,
    seed: u64,
    shifts: bool,
}

impl CodeConfig {
    pub fn new(n: usize, w: u32, dist: Arc<DegreeDistribution>, seed: u64) -> Result<Self> {
        let ring = RingParams::for_width(w)?;
        if dist.n() != n {
            return Err(Error::InvalidConfig(format!(
                "distribution built for n = {}, code has n = {n}",
                dist.n()
            )));
        }
        Ok(Self {
            n,
            ring,
            dist,
            seed,
            shifts: true,
        })
    }

    /// Forces every shift factor to zero, which turns the code into a plain
    /// LT code over the same clause structure.
    pub fn without_shifts(mut self) -> Self {
        self.shifts = false;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn w(&self) -> u32 {
        self.ring.w()
    }

    pub fn ring(&self) -> RingParams {
        self.ring
    }

    pub fn dist(&self) -> &DegreeDistribution {
        &self.dist
    }

    pub fn dist_arc(&self) -> Arc<DegreeDistribution> {
        Arc::clone(&self.dist)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn shifts(&self) -> bool {
        self.shifts
    }
}

/// One `(data index, shift factor)` pair of a clause. Indices are zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Term {
    pub index: usize,
    pub factor: u32,
}

/// Clause parameters of code symbol `ell`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseSpec {
    pub ell: u64,
    pub terms: Vec<Term>,
}

impl ClauseSpec {
    pub fn k(&self) -> usize {
        self.terms.len()
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.terms.iter().map(|t| t.index)
    }

    pub fn factors(&self) -> impl Iterator<Item = u32> + '_ {
        self.terms.iter().map(|t| t.factor)
    }
}

/// Draws `k` distinct indices in `[0, n)` by rejection, in draw order.
pub(crate) fn distinct_indices(rng: &mut SymbolRng, n: usize, k: usize) -> Vec<usize> {
    debug_assert!(k <= n);
    let mut out = Vec::with_capacity(k);
    if k <= 32 {
        while out.len() < k {
            let i = rng.below(n as u64) as usize;
            if !out.contains(&i) {
                out.push(i);
            }
        }
    } else {
        let mut seen = HashSet::with_capacity(k);
        while out.len() < k {
            let i = rng.below(n as u64) as usize;
            if seen.insert(i) {
                out.push(i);
            }
        }
    }
    out
}

/// Draws clause size, then indices, then factors in `[0, p)`.
///
/// Returns the stream so callers can continue drawing from it.
pub(crate) fn draw_clause(
    rng: &mut SymbolRng,
    dist: &DegreeDistribution,
    p: u32,
) -> (Vec<usize>, Vec<u32>) {
    let n = dist.n();
    let k = dist.sample(rng);
    let indices = distinct_indices(rng, n, k);
    let factors = (0..k).map(|_| rng.below(p as u64) as u32).collect();
    (indices, factors)
}

pub fn derive_clause_spec(cfg: &CodeConfig, ell: u64) -> ClauseSpec {
    let mut rng = SymbolRng::for_symbol(cfg.seed, ell);
    let (indices, factors) = draw_clause(&mut rng, &cfg.dist, cfg.ring.p());
    let terms = indices
        .into_iter()
        .zip(factors)
        .map(|(index, factor)| Term {
            index,
            factor: if cfg.shifts { factor } else { 0 },
        })
        .collect();
    ClauseSpec { ell, terms }
}

/// Evaluates a clause on data already in the ghost bit basis.
pub(crate) fn evaluate_padded(padded: &[GhostVector], p: u32, spec: &ClauseSpec) -> GhostVector {
    let mut acc = GhostVector::zero(p);
    for t in &spec.terms {
        acc.xor_rotated(&padded[t.index], t.factor);
    }
    acc
}

pub fn encode_symbol(data: &[DataSymbol], spec: &ClauseSpec) -> DataSymbol {
    let w = data.first().map(|d| d.w()).expect("at least one data symbol");
    let mut acc = GhostVector::zero(w + 1);
    for t in &spec.terms {
        acc.xor_rotated(&pad(&data[t.index]), t.factor);
    }
    unpad(&acc)
}

/// Encoder holding the data in the ghost bit basis.
#[derive(Debug, Clone)]
pub struct Encoder {
    cfg: CodeConfig,
    padded: Vec<GhostVector>,
}

impl Encoder {
    pub fn new(cfg: CodeConfig, data: &[DataSymbol]) -> Result<Self> {
        if data.len() != cfg.n {
            return Err(Error::InvalidConfig(format!(
                "expected {} data symbols, got {}",
                cfg.n,
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|d| d.w() != cfg.w()) {
            return Err(Error::WidthMismatch {
                expected: cfg.w() as usize,
                actual: bad.w() as usize,
            });
        }
        Ok(Self {
            padded: data.iter().map(pad).collect(),
            cfg,
        })
    }

    pub fn config(&self) -> &CodeConfig {
        &self.cfg
    }

    pub fn encode(&self, ell: u64) -> DataSymbol {
        let spec = derive_clause_spec(&self.cfg, ell);
        self.encode_spec(&spec)
    }

    pub fn encode_spec(&self, spec: &ClauseSpec) -> DataSymbol {
        unpad(&evaluate_padded(&self.padded, self.cfg.ring.p(), spec))
    }

    /// Symbols `ell = start, start + 1, ...` without end.
    pub fn stream_from(&self, start: u64) -> impl Iterator<Item = (u64, DataSymbol)> + '_ {
        (start..).map(move |ell| (ell, self.encode(ell)))
    }
}

/// Code symbols `ell = 1..=m`.
pub fn encode_stream(cfg: &CodeConfig, data: &[DataSymbol], m: usize) -> Result<Vec<(u64, DataSymbol)>> {
    let enc = Encoder::new(cfg.clone(), data)?;
    Ok(enc.stream_from(1).take(m).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::oracle::naive_mul;

    fn cfg(n: usize, w: u32, seed: u64) -> CodeConfig {
        let dist = Arc::new(DegreeDistribution::ideal_soliton(n).unwrap());
        CodeConfig::new(n, w, dist, seed).unwrap()
    }

    fn random_data(n: usize, w: u32, seed: u64) -> Vec<DataSymbol> {
        let mut rng = SymbolRng::from_state(seed);
        (0..n)
            .map(|_| {
                let words = (0..w.div_ceil(64)).map(|_| rng.next_u64()).collect();
                DataSymbol::from_words(w, words)
            })
            .collect()
    }

    #[test]
    fn config_validation() {
        let dist = Arc::new(DegreeDistribution::ideal_soliton(10).unwrap());
        assert!(CodeConfig::new(10, 8, dist.clone(), 0).is_err());
        assert!(CodeConfig::new(11, 4, dist.clone(), 0).is_err());
        assert!(CodeConfig::new(10, 4, dist, 0).is_ok());
    }

    #[test]
    fn single_symbol_code() {
        let c = cfg(1, 16, 77);
        for ell in 1..50 {
            let spec = derive_clause_spec(&c, ell);
            assert_eq!(spec.indices().collect::<Vec<_>>(), vec![0]);
            assert!(spec.factors().all(|f| f <= 16));
        }
    }

    #[test]
    fn specs_are_pure_and_well_formed() {
        let c = cfg(100, 16, 5);
        for ell in 1..2000 {
            let a = derive_clause_spec(&c, ell);
            assert_eq!(a, derive_clause_spec(&c, ell));
            let mut idx: Vec<_> = a.indices().collect();
            idx.sort_unstable();
            idx.dedup();
            assert_eq!(idx.len(), a.k());
            assert!(a.k() >= 1 && a.k() <= 100);
            assert!(a.factors().all(|f| f <= 16));
        }
    }

    #[test]
    fn index_frequency_matches_pmf() {
        let c = cfg(100, 16, 123);
        let expected = c.dist().mean() / 100.0;
        let trials = 1_000_000u64;
        let hits = (1..=trials)
            .filter(|&ell| derive_clause_spec(&c, ell).indices().any(|i| i == 16))
            .count();
        let freq = hits as f64 / trials as f64;
        assert!((freq / expected - 1.0).abs() < 0.01, "{freq} vs {expected}");
    }

    #[test]
    fn k1_identity_and_rotation() {
        let data = random_data(3, 16, 1);
        let spec = ClauseSpec {
            ell: 1,
            terms: vec![Term { index: 2, factor: 0 }],
        };
        assert_eq!(encode_symbol(&data, &spec), data[2]);
        let spec = ClauseSpec {
            ell: 1,
            terms: vec![Term { index: 1, factor: 9 }],
        };
        let y = encode_symbol(&data, &spec);
        assert_eq!(y, unpad(&pad(&data[1]).shift_mul(9)));
        assert_eq!(unpad(&pad(&y).shift_inv(9)), data[1]);
    }

    #[test]
    fn two_term_example_matches_oracle() {
        let x1 = DataSymbol::from_bits(&[true, false, false, false]);
        let x2 = DataSymbol::from_bits(&[false, true, false, false]);
        let mut acc = naive_mul(&pad(&x1), &GhostVector::monomial(5, 1));
        acc.xor_assign(&naive_mul(&pad(&x2), &GhostVector::monomial(5, 3)));
        let oracle = unpad(&acc);
        // Frozen oracle value.
        assert_eq!(oracle, DataSymbol::from_bits(&[true, false, true, true]));
        let spec = ClauseSpec {
            ell: 1,
            terms: vec![Term { index: 0, factor: 1 }, Term { index: 1, factor: 3 }],
        };
        assert_eq!(encode_symbol(&[x1, x2], &spec), oracle);
    }

    #[test]
    fn zero_factors_give_plain_xor() {
        let data = random_data(50, 16, 9);
        let c = cfg(50, 16, 9).without_shifts();
        for ell in 1..200 {
            let spec = derive_clause_spec(&c, ell);
            assert!(spec.factors().all(|f| f == 0));
            let mut xor = DataSymbol::zero(16);
            for i in spec.indices() {
                xor.xor_assign(&data[i]);
            }
            assert_eq!(encode_symbol(&data, &spec), xor);
        }
    }

    #[test]
    fn lt_mode_keeps_clause_structure() {
        let c = cfg(64, 16, 31);
        let lt = c.clone().without_shifts();
        for ell in 1..100 {
            let a = derive_clause_spec(&c, ell);
            let b = derive_clause_spec(&lt, ell);
            assert!(a.indices().eq(b.indices()));
        }
    }

    #[test]
    fn stream_prefix_and_invariant() {
        let data = random_data(20, 4, 3);
        let c = cfg(20, 4, 3);
        assert!(encode_stream(&c, &data, 0).unwrap().is_empty());
        let long = encode_stream(&c, &data, 40).unwrap();
        let short = encode_stream(&c, &data, 25).unwrap();
        assert_eq!(&long[..25], &short[..]);
        for (ell, y) in &long {
            let spec = derive_clause_spec(&c, *ell);
            assert_eq!(&encode_symbol(&data, &spec), y);
        }
    }

    #[test]
    fn encoder_rejects_wrong_data() {
        let c = cfg(4, 16, 0);
        assert!(Encoder::new(c.clone(), &random_data(3, 16, 0)).is_err());
        assert!(Encoder::new(c, &random_data(4, 4, 0)).is_err());
    }
}
