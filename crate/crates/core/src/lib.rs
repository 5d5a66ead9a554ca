//! Exact machinery for graded semigroups of weighted trivalent trees:
//! membership, enumeration, degree-one factorization, quadric/cubic
//! relation certificates, and the unit-cube cells that control them.

pub mod acceptance;
pub mod cube;
pub mod hull;
pub mod oracle;
pub mod relations;
pub mod rewrite;
pub mod system;
pub mod topology;
pub mod tree;
pub mod weighting;

use std::fmt;
use std::str::FromStr;

/// A level bound `L`, or no bound at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    Finite(u64),
    Infinite,
}

impl Level {
    pub fn finite(self) -> Option<u64> {
        match self {
            Level::Finite(l) => Some(l),
            Level::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Level::Finite(_))
    }

    /// `factor * L`, or `None` when unbounded.
    pub fn scaled(self, factor: u64) -> Option<u64> {
        self.finite().map(|l| l * factor)
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::Finite(l) => write!(f, "{l}"),
            Level::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Level {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "inf" | "infinity" | "∞" => Ok(Level::Infinite),
            _ => match s.parse::<u64>() {
                Ok(0) => Err("level must be positive".into()),
                Ok(l) => Ok(Level::Finite(l)),
                Err(_) => Err(format!("bad level `{s}`")),
            },
        }
    }
}

/// Which semigroup a spec describes: weightings of the full tree with the
/// parity condition, or halved weightings of the clipped tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    S,
    U,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::S => "S",
            Variant::U => "U",
        })
    }
}
