//! The codecs compared in the simulations.
//!
//! All of them run on the Cyclone encoder and decoder with different clause
//! distributions and switches:
//!
//! | codec   | clause sizes        | factors | double rule |
//! |---------|---------------------|---------|-------------|
//! | cyclone | Ideal or Robust     | random  | yes         |
//! | lt      | Ideal or Robust     | 0       | no          |
//! | random  | always 1            | 0       | no          |
//! | pair    | always 2            | random  | yes         |

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::decode::DecoderSession;
use crate::encode::CodeConfig;
use crate::error::{Error, Result};
use crate::soliton::{DegreeDistribution, DistributionKind};

pub const DEFAULT_C: f64 = 0.01;
pub const DEFAULT_DELTA: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Cyclone,
    Lt,
    Random,
    Pair,
}

/// A codec family together with its clause-size distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Codec {
    family: Family,
    dist: DistributionKind,
}

impl Codec {
    pub fn cyclone(dist: DistributionKind) -> Self {
        Self { family: Family::Cyclone, dist }
    }

    pub fn lt(dist: DistributionKind) -> Self {
        Self { family: Family::Lt, dist }
    }

    pub fn random() -> Self {
        Self { family: Family::Random, dist: DistributionKind::FixedOne }
    }

    pub fn pair() -> Self {
        Self { family: Family::Pair, dist: DistributionKind::FixedPair }
    }

    pub fn cyclone_robust() -> Self {
        Self::cyclone(robust_default())
    }

    pub fn cyclone_ideal() -> Self {
        Self::cyclone(DistributionKind::Ideal)
    }

    pub fn lt_robust() -> Self {
        Self::lt(robust_default())
    }

    pub fn lt_ideal() -> Self {
        Self::lt(DistributionKind::Ideal)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn dist_kind(&self) -> DistributionKind {
        self.dist
    }

    /// Replaces the Robust parameters; no effect on other distributions.
    pub fn with_robust(mut self, c: f64, delta: f64) -> Self {
        if let DistributionKind::Robust { .. } = self.dist {
            self.dist = DistributionKind::Robust { c, delta };
        }
        self
    }

    pub fn distribution(&self, n: usize) -> Result<DegreeDistribution> {
        DegreeDistribution::from_kind(n, self.dist)
    }

    pub fn config(&self, n: usize, w: u32, seed: u64) -> Result<CodeConfig> {
        self.config_with(Arc::new(self.distribution(n)?), w, seed)
    }

    /// Like [`config`](Self::config) with a prebuilt distribution, which
    /// lets many trials share one table.
    pub fn config_with(&self, dist: Arc<DegreeDistribution>, w: u32, seed: u64) -> Result<CodeConfig> {
        let cfg = CodeConfig::new(dist.n(), w, dist, seed)?;
        Ok(match self.family {
            Family::Cyclone | Family::Pair => cfg,
            Family::Lt | Family::Random => cfg.without_shifts(),
        })
    }

    pub fn session(&self, cfg: CodeConfig) -> DecoderSession {
        match self.family {
            Family::Cyclone | Family::Pair => DecoderSession::new(cfg),
            Family::Lt | Family::Random => DecoderSession::lt(cfg),
        }
    }

    /// Identifier used on the command line and in CSV names, e.g.
    /// `cyclone-robust` or `lt-robust-c0.03`.
    pub fn id(&self) -> String {
        let family = match self.family {
            Family::Cyclone => "cyclone",
            Family::Lt => "lt",
            Family::Random => return "random".into(),
            Family::Pair => return "pair".into(),
        };
        match self.dist {
            DistributionKind::Ideal => format!("{family}-ideal"),
            DistributionKind::Robust { c, delta } => {
                let mut id = format!("{family}-robust");
                if c != DEFAULT_C {
                    id.push_str(&format!("-c{c}"));
                }
                if delta != DEFAULT_DELTA {
                    id.push_str(&format!("-d{delta}"));
                }
                id
            }
            DistributionKind::FixedPair => format!("{family}-pair"),
            DistributionKind::FixedOne => format!("{family}-one"),
        }
    }
}

fn robust_default() -> DistributionKind {
    DistributionKind::Robust { c: DEFAULT_C, delta: DEFAULT_DELTA }
}

impl fmt::Display for Codec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

impl FromStr for Codec {
    type Err = Error;

    /// Parses the output of [`Codec::id`].
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidConfig(format!("unknown codec '{s}'"));
        let mut parts = s.split('-');
        let family = match parts.next() {
            Some("cyclone") => Family::Cyclone,
            Some("lt") => Family::Lt,
            Some("random") if s == "random" => return Ok(Self::random()),
            Some("pair") if s == "pair" => return Ok(Self::pair()),
            _ => return Err(bad()),
        };
        let dist = match parts.next() {
            Some("ideal") => DistributionKind::Ideal,
            Some("robust") => {
                let (mut c, mut delta) = (DEFAULT_C, DEFAULT_DELTA);
                for p in parts.by_ref() {
                    if let Some(v) = p.strip_prefix('c') {
                        c = v.parse().map_err(|_| bad())?;
                    } else if let Some(v) = p.strip_prefix('d') {
                        delta = v.parse().map_err(|_| bad())?;
                    } else {
                        return Err(bad());
                    }
                }
                DistributionKind::Robust { c, delta }
            }
            _ => return Err(bad()),
        };
        if parts.next().is_some() {
            return Err(bad());
        }
        Ok(Self { family, dist })
    }
}

/// Expected symbols until a uniform single-symbol stream covers all `n`
/// indices: `n * H_n`.
pub fn coupon_collector_mean(n: usize) -> f64 {
    n as f64 * (1..=n).map(|k| 1.0 / k as f64).sum::<f64>()
}

/// Expected coverage `n (1 - e^{-m/n})` of the random codec after `m` symbols.
pub fn random_coverage(n: usize, m: usize) -> f64 {
    n as f64 * (1.0 - (-(m as f64) / n as f64).exp())
}

/// Upper limit `n (1 - e^{-2m/n})` on what the pair codec can decode.
pub fn pair_coverage_limit(n: usize, m: usize) -> f64 {
    n as f64 * (1.0 - (-2.0 * m as f64 / n as f64).exp())
}
