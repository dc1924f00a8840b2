//! Three-level annotation scores and the removal-priority formula.

use crate::CoreError;
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

/// A score constrained to exactly {0.0, 0.5, 1.0}.
///
/// Criticality and guessability annotations use this domain. Parsing any
/// other numeric is an error; there is no rounding or snapping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Level3Score {
    Zero,
    Half,
    One,
}

impl Level3Score {
    pub fn from_f64(v: f64) -> Result<Self, CoreError> {
        if v == 0.0 {
            Ok(Level3Score::Zero)
        } else if v == 0.5 {
            Ok(Level3Score::Half)
        } else if v == 1.0 {
            Ok(Level3Score::One)
        } else {
            Err(CoreError::InvalidScore(v))
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Level3Score::Zero => 0.0,
            Level3Score::Half => 0.5,
            Level3Score::One => 1.0,
        }
    }

    /// The score in half-units (0, 1, or 2). Used internally so priority
    /// arithmetic stays exact integer math.
    pub(crate) fn halves(self) -> u8 {
        match self {
            Level3Score::Zero => 0,
            Level3Score::Half => 1,
            Level3Score::One => 2,
        }
    }
}

impl Serialize for Level3Score {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.value())
    }
}

impl<'de> Deserialize<'de> for Level3Score {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v = f64::deserialize(deserializer)?;
        Level3Score::from_f64(v).map_err(de::Error::custom)
    }
}

/// Removal priority of a segment: `criticality * (1 - guessability)`.
///
/// Computed in quarter-units so the result is exact; the reachable values
/// are 0.0, 0.25, 0.5, and 1.0 (all exactly representable). High-priority
/// segments are critical and hard to guess.
pub fn priority_score(criticality: Level3Score, guessability: Level3Score) -> f64 {
    let quarters = u32::from(criticality.halves()) * u32::from(2 - guessability.halves());
    f64::from(quarters) / 4.0
}
