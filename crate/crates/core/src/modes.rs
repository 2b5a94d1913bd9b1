//! Mode labels and the canonical quadrature ordering.
//!
//! Node indices are 0-based in code and 1-based in every text form
//! (`m1` is the magnon of the first node). The canonical ordering of a
//! chain with `N` nodes is `[X_m1, Y_m1, X_b1, Y_b1, ..., X_mN, Y_mN, X_bN, Y_bN]`,
//! so the 1-based row `4j-3` is code row `4(j-1)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModeKind {
    Magnon,
    Phonon,
}

impl ModeKind {
    fn prefix(self) -> char {
        match self {
            ModeKind::Magnon => 'm',
            ModeKind::Phonon => 'b',
        }
    }
}

/// A single bosonic mode of the chain. Serialized in its text form (`"m2"`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct ModeLabel {
    pub kind: ModeKind,
    /// 0-based node index.
    pub node: usize,
}

impl ModeLabel {
    pub const fn magnon(node: usize) -> Self {
        Self {
            kind: ModeKind::Magnon,
            node,
        }
    }

    pub const fn phonon(node: usize) -> Self {
        Self {
            kind: ModeKind::Phonon,
            node,
        }
    }

    /// Row of the X quadrature in the canonical 4N ordering. Y follows at `+1`.
    pub fn canonical_offset(self) -> usize {
        4 * self.node
            + match self.kind {
                ModeKind::Magnon => 0,
                ModeKind::Phonon => 2,
            }
    }

    pub fn check_nodes(self, n_nodes: usize) -> Result<Self> {
        if self.node < n_nodes {
            Ok(self)
        } else {
            Err(Error::UnknownMode(format!(
                "{self} (chain has {n_nodes} nodes)"
            )))
        }
    }
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.kind.prefix(), self.node + 1)
    }
}

impl FromStr for ModeLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut chars = s.chars();
        let kind = match chars.next() {
            Some('m') => ModeKind::Magnon,
            Some('b') => ModeKind::Phonon,
            _ => return Err(Error::UnknownMode(s.to_string())),
        };
        let index: usize = chars
            .as_str()
            .parse()
            .map_err(|_| Error::UnknownMode(s.to_string()))?;
        if index == 0 {
            return Err(Error::UnknownMode(s.to_string()));
        }
        Ok(Self {
            kind,
            node: index - 1,
        })
    }
}

impl From<ModeLabel> for String {
    fn from(m: ModeLabel) -> Self {
        m.to_string()
    }
}

impl TryFrom<String> for ModeLabel {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// All modes of an `n_nodes` chain in canonical order.
pub fn canonical_modes(n_nodes: usize) -> Vec<ModeLabel> {
    (0..n_nodes)
        .flat_map(|j| [ModeLabel::magnon(j), ModeLabel::phonon(j)])
        .collect()
}
