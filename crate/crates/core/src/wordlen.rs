//! Word lengths.
//!
//! A code over `R_p` carries `w = p - 1` bits per symbol. Widths whose
//! successor is prime are used directly; any other even width is split into
//! two such widths `w1 + w2 = w` and coded as two interleaved sub-codes that
//! share clause structure.

use std::sync::Arc;

use crate::decode::DecoderSession;
use crate::encode::{derive_clause_spec, encode_symbol, ClauseSpec, CodeConfig, Term};
use crate::error::{Error, Result};
use crate::ring::DataSymbol;
use crate::rng::SymbolRng;
use crate::soliton::DegreeDistribution;

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, exact for all `u64`.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &q in &WITNESSES {
        if n % q == 0 {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// True when a code can use width `w` directly.
pub fn is_native(w: u32) -> bool {
    is_prime(w as u64 + 1)
}

/// How a width is covered by one or two native widths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordPlan {
    w: u32,
    parts: Vec<u32>,
}

impl WordPlan {
    /// A plan from explicit parts, e.g. read back from a stream header.
    pub fn from_parts(parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty() || parts.len() > 2 {
            return Err(Error::InvalidConfig(format!("a word plan has 1 or 2 parts, got {}", parts.len())));
        }
        if let Some(&bad) = parts.iter().find(|&&w| w < 2 || !is_native(w)) {
            return Err(Error::InvalidConfig(format!("part width {bad} is not a native width")));
        }
        let w = parts.iter().sum();
        Ok(Self { w, parts })
    }

    pub fn w(&self) -> u32 {
        self.w
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn is_single(&self) -> bool {
        self.parts.len() == 1
    }

    /// All parts have one width, so they can share every clause parameter.
    pub fn shared_params(&self) -> bool {
        self.parts.windows(2).all(|p| p[0] == p[1])
    }
}

/// Plans width `w`: itself when native, otherwise the most balanced pair
/// `w1 <= w2` of native widths.
pub fn split(w: u32) -> Result<WordPlan> {
    if w < 2 || w % 2 == 1 {
        return Err(Error::NoSplit(w));
    }
    if is_native(w) {
        return Ok(WordPlan { w, parts: vec![w] });
    }
    let mut w1 = w / 2;
    if w1 % 2 == 1 {
        w1 -= 1;
    }
    while w1 >= 2 {
        let w2 = w - w1;
        if is_native(w1) && is_native(w2) {
            return Ok(WordPlan { w, parts: vec![w1, w2] });
        }
        w1 -= 2;
    }
    Err(Error::NoSplit(w))
}

/// One configuration per part of a plan. All parts share `n`, the
/// distribution and the seed.
pub fn part_configs(plan: &WordPlan, n: usize, dist: Arc<DegreeDistribution>, seed: u64) -> Result<Vec<CodeConfig>> {
    plan.parts()
        .iter()
        .map(|&wi| CodeConfig::new(n, wi, dist.clone(), seed))
        .collect()
}

/// Clause parameters of code symbol `ell` for every part. The first part
/// uses the plain derivation; further parts copy its size and indices and,
/// when their width differs, draw their own factors from the same
/// per-symbol stream.
pub fn split_specs(cfgs: &[CodeConfig], ell: u64) -> Vec<ClauseSpec> {
    let first = derive_clause_spec(&cfgs[0], ell);
    let mut specs = Vec::with_capacity(cfgs.len());
    specs.push(first);
    if cfgs.len() == 1 {
        return specs;
    }
    let base = &specs[0];
    let mut extra = Vec::new();
    if cfgs[1..].iter().any(|c| c.w() != cfgs[0].w()) {
        // Continue the stream exactly where the first spec stopped.
        let mut rng = SymbolRng::for_symbol(cfgs[0].seed(), ell);
        let _ = crate::encode::draw_clause(&mut rng, cfgs[0].dist(), cfgs[0].ring().p());
        for cfg in &cfgs[1..] {
            let terms = if cfg.w() == cfgs[0].w() {
                base.terms.clone()
            } else {
                let p = cfg.ring().p();
                base.terms
                    .iter()
                    .map(|t| Term {
                        index: t.index,
                        factor: if cfg.shifts() { rng.below(p as u64) as u32 } else { 0 },
                    })
                    .collect()
            };
            extra.push(ClauseSpec { ell, terms });
        }
    } else {
        extra.extend(cfgs[1..].iter().map(|_| base.clone()));
    }
    specs.extend(extra);
    specs
}

/// Encoder for any even width.
#[derive(Debug, Clone)]
pub struct SplitEncoder {
    plan: WordPlan,
    cfgs: Vec<CodeConfig>,
    parts: Vec<Vec<DataSymbol>>,
}

impl SplitEncoder {
    pub fn new(plan: WordPlan, cfgs: Vec<CodeConfig>, data: &[DataSymbol]) -> Result<Self> {
        check_plan(&plan, &cfgs)?;
        if data.len() != cfgs[0].n() {
            return Err(Error::InvalidConfig(format!(
                "expected {} data symbols, got {}",
                cfgs[0].n(),
                data.len()
            )));
        }
        let mut parts = vec![Vec::with_capacity(data.len()); plan.parts().len()];
        for x in data {
            if x.w() != plan.w() {
                return Err(Error::WidthMismatch {
                    expected: plan.w() as usize,
                    actual: x.w() as usize,
                });
            }
            if plan.is_single() {
                parts[0].push(x.clone());
            } else {
                let (lo, hi) = x.split_at(plan.parts()[0]);
                parts[0].push(lo);
                parts[1].push(hi);
            }
        }
        Ok(Self { plan, cfgs, parts })
    }

    pub fn plan(&self) -> &WordPlan {
        &self.plan
    }

    pub fn configs(&self) -> &[CodeConfig] {
        &self.cfgs
    }

    pub fn encode(&self, ell: u64) -> DataSymbol {
        let specs = split_specs(&self.cfgs, ell);
        let mut ys = specs.iter().zip(&self.parts).map(|(s, d)| encode_symbol(d, s));
        let first = ys.next().expect("at least one part");
        match ys.next() {
            None => first,
            Some(second) => DataSymbol::concat(&first, &second),
        }
    }
}

/// Decoder for any even width; done when every part is.
#[derive(Debug, Clone)]
pub struct SplitDecoder {
    plan: WordPlan,
    cfgs: Vec<CodeConfig>,
    sessions: Vec<DecoderSession>,
}

impl SplitDecoder {
    pub fn new(plan: WordPlan, cfgs: Vec<CodeConfig>) -> Result<Self> {
        check_plan(&plan, &cfgs)?;
        let sessions = cfgs.iter().cloned().map(DecoderSession::new).collect();
        Ok(Self { plan, cfgs, sessions })
    }

    pub fn plan(&self) -> &WordPlan {
        &self.plan
    }

    pub fn sessions(&self) -> &[DecoderSession] {
        &self.sessions
    }

    /// Feeds code symbol `ell` to every part and runs them to their fixpoint.
    pub fn receive(&mut self, ell: u64, y: &DataSymbol) -> Result<()> {
        if y.w() != self.plan.w() {
            return Err(Error::WidthMismatch {
                expected: self.plan.w() as usize,
                actual: y.w() as usize,
            });
        }
        let specs = split_specs(&self.cfgs, ell);
        let halves = if self.plan.is_single() {
            vec![y.clone()]
        } else {
            let (lo, hi) = y.split_at(self.plan.parts()[0]);
            vec![lo, hi]
        };
        for ((session, spec), part) in self.sessions.iter_mut().zip(&specs).zip(&halves) {
            session.read_clause(spec, part)?;
            session.run_fixpoint()?;
        }
        Ok(())
    }

    pub fn is_complete(&self) -> bool {
        self.sessions.iter().all(DecoderSession::is_complete)
    }

    /// Fewest decoded symbols over the parts.
    pub fn decoded_count(&self) -> usize {
        self.sessions.iter().map(DecoderSession::decoded_count).min().unwrap_or(0)
    }

    pub fn decoded_data(&self) -> Option<Vec<DataSymbol>> {
        let parts: Vec<Vec<DataSymbol>> = self.sessions.iter().map(|s| s.decoded_data()).collect::<Option<_>>()?;
        if parts.len() == 1 {
            return parts.into_iter().next();
        }
        Some(parts[0].iter().zip(&parts[1]).map(|(lo, hi)| DataSymbol::concat(lo, hi)).collect())
    }
}

fn check_plan(plan: &WordPlan, cfgs: &[CodeConfig]) -> Result<()> {
    if cfgs.len() != plan.parts().len() {
        return Err(Error::InvalidConfig(format!(
            "plan has {} parts but {} configurations were given",
            plan.parts().len(),
            cfgs.len()
        )));
    }
    for (cfg, &wi) in cfgs.iter().zip(plan.parts()) {
        if cfg.w() != wi {
            return Err(Error::WidthMismatch {
                expected: wi as usize,
                actual: cfg.w() as usize,
            });
        }
        if cfg.n() != cfgs[0].n() || cfg.seed() != cfgs[0].seed() {
            return Err(Error::InvalidConfig("parts must share n and seed".into()));
        }
    }
    Ok(())
}
