//! Clause-size distributions.
//!
//! The Ideal Soliton distribution `rho`, the Robust Soliton distribution
//! `mu = (rho + tau) / beta`, and two degenerate distributions used by the
//! baseline codecs. All are stored as probability and cumulative tables over
//! `k = 1..=n` and sampled by inverse CDF.

use crate::error::{Error, Result};
use crate::rng::SymbolRng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistributionKind {
    Ideal,
    Robust { c: f64, delta: f64 },
    /// Every clause has two terms (one if `n == 1`).
    FixedPair,
    /// Every clause has one term.
    FixedOne,
}

#[derive(Debug, Clone)]
pub struct DegreeDistribution {
    n: usize,
    kind: DistributionKind,
    pmf: Vec<f64>,
    cdf: Vec<f64>,
    robust: Option<RobustTerms>,
}

/// The spread `R` and normaliser `beta` of a Robust Soliton distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobustTerms {
    pub r: f64,
    pub beta: f64,
    /// Position of the `R ln(R/delta) / n` spike, when it falls in `[1, n]`.
    pub spike: Option<usize>,
}

fn ideal_pmf(n: usize) -> Vec<f64> {
    (1..=n)
        .map(|k| {
            if k == 1 {
                1.0 / n as f64
            } else {
                1.0 / (k as f64 * (k as f64 - 1.0))
            }
        })
        .collect()
}

impl DegreeDistribution {
    pub fn ideal_soliton(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(Self::from_pmf(n, DistributionKind::Ideal, ideal_pmf(n), None))
    }

    /// Robust Soliton with `R = c ln(n/delta) sqrt(n)`.
    ///
    /// `tau(k) = R/(kn)` for `k <= floor(n/R - 1)` and the spike
    /// `R ln(R/delta)/n` at `k = floor(n/R)`. Both are clipped to `[1, n]`;
    /// a spike outside that range is dropped and `beta` renormalises.
    pub fn robust_soliton(n: usize, c: f64, delta: f64) -> Result<Self> {
        check_n(n)?;
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidDistribution(format!("c must be positive, got {c}")));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidDistribution(format!(
                "delta must lie in (0, 1), got {delta}"
            )));
        }
        let nf = n as f64;
        let r = c * (nf / delta).ln() * nf.sqrt();
        let mut weights = ideal_pmf(n);
        let boost_end = (nf / r - 1.0).floor();
        if boost_end >= 1.0 {
            let end = (boost_end as usize).min(n);
            for (k, wt) in weights.iter_mut().enumerate().take(end) {
                *wt += r / ((k + 1) as f64 * nf);
            }
        }
        let spike_at = (nf / r).floor();
        let spike = if spike_at >= 1.0 && spike_at <= nf {
            let k = spike_at as usize;
            weights[k - 1] += r * (r / delta).ln() / nf;
            Some(k)
        } else {
            None
        };
        let beta: f64 = weights.iter().sum();
        let pmf = weights.iter().map(|w| w / beta).collect();
        Ok(Self::from_pmf(
            n,
            DistributionKind::Robust { c, delta },
            pmf,
            Some(RobustTerms { r, beta, spike }),
        ))
    }

    pub fn fixed_one(n: usize) -> Result<Self> {
        check_n(n)?;
        let mut pmf = vec![0.0; n];
        pmf[0] = 1.0;
        Ok(Self::from_pmf(n, DistributionKind::FixedOne, pmf, None))
    }

    pub fn fixed_pair(n: usize) -> Result<Self> {
        check_n(n)?;
        let mut pmf = vec![0.0; n];
        pmf[n.min(2) - 1] = 1.0;
        Ok(Self::from_pmf(n, DistributionKind::FixedPair, pmf, None))
    }

    /// Rebuilds a distribution from its kind, e.g. after reading a header.
    pub fn from_kind(n: usize, kind: DistributionKind) -> Result<Self> {
        match kind {
            DistributionKind::Ideal => Self::ideal_soliton(n),
            DistributionKind::Robust { c, delta } => Self::robust_soliton(n, c, delta),
            DistributionKind::FixedPair => Self::fixed_pair(n),
            DistributionKind::FixedOne => Self::fixed_one(n),
        }
    }

    fn from_pmf(n: usize, kind: DistributionKind, pmf: Vec<f64>, robust: Option<RobustTerms>) -> Self {
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = pmf
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        // Absorb rounding so every u in [0, 1) lands on some k.
        *cdf.last_mut().expect("n >= 1") = 1.0;
        Self {
            n,
            kind,
            pmf,
            cdf,
            robust,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> DistributionKind {
        self.kind
    }

    /// Probability of clause size `k`, zero outside `[1, n]`.
    pub fn pmf(&self, k: usize) -> f64 {
        if k == 0 || k > self.n {
            0.0
        } else {
            self.pmf[k - 1]
        }
    }

    pub fn cdf_table(&self) -> &[f64] {
        &self.cdf
    }

    pub fn robust_terms(&self) -> Option<RobustTerms> {
        self.robust
    }

    /// Expected clause size.
    pub fn mean(&self) -> f64 {
        self.pmf
            .iter()
            .enumerate()
            .map(|(i, p)| (i + 1) as f64 * p)
            .sum()
    }

    /// Inverse-CDF draw: the smallest `k` with `u < cdf(k)`.
    pub fn sample(&self, rng: &mut SymbolRng) -> usize {
        let u = rng.next_f64();
        let idx = self.cdf.partition_point(|&c| c <= u);
        (idx + 1).min(self.n)
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidDistribution("n must be at least 1".into()));
    }
    Ok(())
}
