use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modes::ModeLabel;

/// Two disjoint, nonempty groups of modes.
///
/// Text form: sides separated by `|`, modes by `,`, e.g. `m2|b1`,
/// `b1|m2,m3,m4`, `b1,b4|m2,m3`. A range `m2..m5` expands to `m2,m3,m4,m5`;
/// an open range `m2..` runs to the last node (and is empty past it) and
/// needs [`Bipartition::parse_for`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Bipartition {
    side_a: Vec<ModeLabel>,
    side_b: Vec<ModeLabel>,
}

impl Bipartition {
    pub fn new(side_a: Vec<ModeLabel>, side_b: Vec<ModeLabel>) -> Result<Self> {
        let p = Self { side_a, side_b };
        let err = |reason: &str| Error::InvalidPartition {
            spec: p.to_string(),
            reason: reason.into(),
        };
        if p.side_a.is_empty() || p.side_b.is_empty() {
            return Err(err("both sides must be nonempty"));
        }
        let mut seen = HashSet::new();
        if !p.modes().all(|m| seen.insert(m)) {
            return Err(err("a mode appears more than once"));
        }
        Ok(p)
    }

    /// Parse, expanding open ranges up to `n_nodes`, and check every label
    /// exists in an `n_nodes` chain.
    pub fn parse_for(spec: &str, n_nodes: usize) -> Result<Self> {
        let p = parse(spec, Some(n_nodes))?;
        p.check_nodes(n_nodes)?;
        Ok(p)
    }

    pub fn side_a(&self) -> &[ModeLabel] {
        &self.side_a
    }

    pub fn side_b(&self) -> &[ModeLabel] {
        &self.side_b
    }

    /// `side_a` followed by `side_b`.
    pub fn modes(&self) -> impl Iterator<Item = ModeLabel> + '_ {
        self.side_a.iter().chain(&self.side_b).copied()
    }

    /// Number of modes on the smaller side.
    pub fn min_side(&self) -> usize {
        self.side_a.len().min(self.side_b.len())
    }

    pub fn swapped(&self) -> Self {
        Self {
            side_a: self.side_b.clone(),
            side_b: self.side_a.clone(),
        }
    }

    pub fn check_nodes(&self, n_nodes: usize) -> Result<()> {
        for m in self.modes() {
            m.check_nodes(n_nodes)?;
        }
        Ok(())
    }
}

fn parse_side(side: &str, spec: &str, n_nodes: Option<usize>) -> Result<Vec<ModeLabel>> {
    let mut out = Vec::new();
    for token in side.split(',').map(str::trim) {
        if token.is_empty() {
            return Err(Error::InvalidPartition {
                spec: spec.into(),
                reason: "empty mode label".into(),
            });
        }
        match token.split_once("..") {
            None => out.push(token.parse()?),
            Some((lo, hi)) => {
                let lo: ModeLabel = lo.parse()?;
                let hi = match (hi.trim(), n_nodes) {
                    // an open range past the last node is empty
                    ("", Some(n)) if lo.node >= n => continue,
                    ("", Some(n)) => ModeLabel {
                        kind: lo.kind,
                        node: n - 1,
                    },
                    ("", None) => {
                        return Err(Error::InvalidPartition {
                            spec: spec.into(),
                            reason: "open range needs the node count".into(),
                        })
                    }
                    (h, _) => h.parse()?,
                };
                if hi.kind != lo.kind || hi.node < lo.node {
                    return Err(Error::InvalidPartition {
                        spec: spec.into(),
                        reason: format!("bad range `{token}`"),
                    });
                }
                out.extend((lo.node..=hi.node).map(|node| ModeLabel {
                    kind: lo.kind,
                    node,
                }));
            }
        }
    }
    Ok(out)
}

fn parse(spec: &str, n_nodes: Option<usize>) -> Result<Bipartition> {
    let parts: Vec<&str> = spec.split('|').collect();
    if parts.len() != 2 {
        return Err(Error::InvalidPartition {
            spec: spec.into(),
            reason: "expected exactly one `|`".into(),
        });
    }
    let a = parse_side(parts[0], spec, n_nodes)?;
    let b = parse_side(parts[1], spec, n_nodes)?;
    Bipartition::new(a, b)
}

impl FromStr for Bipartition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse(s, None)
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |side: &[ModeLabel]| {
            side.iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "{}|{}", join(&self.side_a), join(&self.side_b))
    }
}

impl From<Bipartition> for String {
    fn from(p: Bipartition) -> Self {
        p.to_string()
    }
}

impl TryFrom<String> for Bipartition {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}
