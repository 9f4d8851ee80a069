//! Algorithm tags as they appear in configs and CSV files.

use std::fmt;
use std::str::FromStr;

use hgcma::adaptive::RotationStrategy;
use hgcma::rotations::ShearVariant;

use crate::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Gcma,
    Hgcma(ShearVariant),
    Lscma,
    AdaptiveHgcma(RotationStrategy),
}

impl Algorithm {
    /// Family name, the `algorithm` CSV column.
    pub fn family(self) -> &'static str {
        match self {
            Algorithm::Gcma => "gcma",
            Algorithm::Hgcma(_) => "hgcma",
            Algorithm::Lscma => "lscma",
            Algorithm::AdaptiveHgcma(_) => "adaptive-hgcma",
        }
    }

    /// Variant name, the `variant` CSV column (empty when there is none).
    pub fn variant(self) -> &'static str {
        match self {
            Algorithm::Hgcma(v) => v.name(),
            Algorithm::AdaptiveHgcma(s) => s.name(),
            Algorithm::Gcma | Algorithm::Lscma => "",
        }
    }

    pub fn is_adaptive(self) -> bool {
        matches!(self, Algorithm::AdaptiveHgcma(_))
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.variant() {
            "" => f.write_str(self.family()),
            v => write!(f, "{}:{v}", self.family()),
        }
    }
}

impl FromStr for Algorithm {
    type Err = HarnessError;

    /// `gcma`, `lscma`, `hgcma[:exact|semi|linear]`, `adaptive-hgcma[:sweep|single|two]`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || HarnessError::Config(format!("unknown algorithm {s:?}"));
        let (family, variant) = match s.trim().split_once(':') {
            Some((f, v)) => (f, Some(v)),
            None => (s.trim(), None),
        };
        match (family, variant) {
            ("gcma", None) => Ok(Algorithm::Gcma),
            ("lscma", None) => Ok(Algorithm::Lscma),
            ("hgcma", None) => Ok(Algorithm::Hgcma(ShearVariant::default())),
            ("hgcma", Some(v)) => v.parse().map(Algorithm::Hgcma).map_err(|_| bad()),
            ("adaptive-hgcma", None) => Ok(Algorithm::AdaptiveHgcma(RotationStrategy::default())),
            ("adaptive-hgcma", Some(v)) => v.parse().map(Algorithm::AdaptiveHgcma).map_err(|_| bad()),
            _ => Err(bad()),
        }
    }
}
