//! Three-valued verdicts with checkable witnesses.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A natural number or `∞`. Serialized as an integer or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtendedDistance {
    Finite(u64),
    Infinite,
}

impl ExtendedDistance {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedDistance::Finite(_))
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            ExtendedDistance::Finite(d) => Some(d),
            ExtendedDistance::Infinite => None,
        }
    }

    pub fn at_most(self, k: u64) -> bool {
        matches!(self, ExtendedDistance::Finite(d) if d <= k)
    }
}

impl fmt::Display for ExtendedDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedDistance::Finite(d) => write!(f, "{d}"),
            ExtendedDistance::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for ExtendedDistance {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtendedDistance::Finite(d) => s.serialize_u64(*d),
            ExtendedDistance::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedDistance {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(u64),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(n) => Ok(ExtendedDistance::Finite(n)),
            Raw::S(s) if s == "inf" => Ok(ExtendedDistance::Infinite),
            Raw::S(s) => Err(serde::de::Error::custom(format!("expected integer or \"inf\", got {s:?}"))),
        }
    }
}

/// Scale budget that was exhausted before a verdict could be reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub window: u64,
    pub scale: u64,
}

/// One refuted scale: `point` of member `member` is farther than `k` from
/// member `other`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaleWitness {
    pub k: u64,
    pub point: u64,
    pub member: usize,
    pub other: usize,
    pub distance: ExtendedDistance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Witness {
    /// Hausdorff distances bounded by `k`.
    Scale { k: u64 },
    /// A point of one set (`in_first` tells which) whose distance to the other exceeds the scale.
    Point { x: u64, in_first: bool, distance: ExtendedDistance },
    /// Consecutive elements `lo < hi` with nothing in between.
    Gap { lo: u64, hi: u64 },
    /// Exact maximum gap of an eventually periodic set.
    MaxGap { gap: u64 },
    /// Two family members at the stated distance.
    Pair { i: usize, j: usize, distance: ExtendedDistance },
    /// A distinguished member, e.g. a finite member of an otherwise infinite family.
    Member { index: usize, note: String },
    /// A common point of all members.
    CommonPoint { x: u64 },
    /// Every scale up to the budget refuted on the window, one witness per scale.
    WindowRefuted { window: u64, scales: Vec<ScaleWitness> },
    /// A universally quantified check passed on a finite sample.
    Sampled { checked: usize, max_scale: u64 },
    /// Free-form explicit witness from the finite checkers.
    Explicit { detail: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "outcome")]
pub enum TriVerdict {
    Yes { witness: Witness },
    No { witness: Witness },
    Unknown { budget: Budget },
}

impl TriVerdict {
    pub fn yes(w: Witness) -> Self {
        TriVerdict::Yes { witness: w }
    }

    pub fn no(w: Witness) -> Self {
        TriVerdict::No { witness: w }
    }

    pub fn unknown(window: u64, scale: u64) -> Self {
        TriVerdict::Unknown { budget: Budget { window, scale } }
    }

    pub fn from_bool(b: bool, detail: impl Into<String>) -> Self {
        let w = Witness::Explicit { detail: detail.into() };
        if b {
            TriVerdict::yes(w)
        } else {
            TriVerdict::no(w)
        }
    }

    pub fn is_yes(&self) -> bool {
        matches!(self, TriVerdict::Yes { .. })
    }

    pub fn is_no(&self) -> bool {
        matches!(self, TriVerdict::No { .. })
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, TriVerdict::Unknown { .. })
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            TriVerdict::Yes { witness } | TriVerdict::No { witness } => Some(witness),
            TriVerdict::Unknown { .. } => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            TriVerdict::Yes { .. } => "yes",
            TriVerdict::No { .. } => "no",
            TriVerdict::Unknown { .. } => "unknown",
        }
    }
}

impl fmt::Display for TriVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TriVerdict::Unknown { budget } => {
                write!(f, "unknown (window {}, scale {})", budget.window, budget.scale)
            }
            _ => {
                let w = serde_json::to_string(self.witness().expect("yes/no carry witnesses"))
                    .map_err(|_| fmt::Error)?;
                write!(f, "{} {}", self.label(), w)
            }
        }
    }
}
