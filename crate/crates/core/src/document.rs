//! JSON documents: one object per file, discriminated by `"kind"`.
//!
//! [`parse_document`] decodes and checks every invariant. [`RawDocument`]
//! is the shape-only form used by the axiom checkers, which need to see
//! illegal values instead of rejecting them outright.

use serde::{Deserialize, Serialize};

use crate::continuity_space::{PositiveSet, ValueSemigroup};
use crate::error::{Error, Result};
use crate::family::QuasiFamily;
use crate::points::{members, PointMap, PointSet, PointSpace};
use crate::sequence::{DirectedNet, Rule, SequenceSpec};
use crate::topology::Topology;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTopology {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub opens: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawQMetric {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub indices: Vec<String>,
    pub matrices: Vec<Vec<Vec<u8>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSequence {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub default: usize,
    pub rules: Vec<Rule>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawMap {
    pub from: usize,
    pub to: usize,
    pub values: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawNet {
    pub elements: Vec<String>,
    pub order: Vec<Vec<u8>>,
    pub assignment: Vec<usize>,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSemigroup {
    pub elements: Vec<String>,
    pub add: Vec<Vec<usize>>,
    pub zero: usize,
    pub infinity: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positives: Option<Vec<usize>>,
}

/// A decoded but unchecked document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RawDocument {
    Topology(RawTopology),
    Qmetric(RawQMetric),
    Sequence(RawSequence),
    Map(RawMap),
    Net(RawNet),
    Semigroup(RawSemigroup),
}

/// A checked document value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Document {
    Topology(Topology),
    QMetric(QuasiFamily),
    Sequence(SequenceSpec),
    Map(PointMap),
    Net(DirectedNet),
    Semigroup {
        semigroup: ValueSemigroup,
        positives: Option<PositiveSet>,
    },
}

fn space_of(n: usize, labels: Option<Vec<String>>) -> Result<PointSpace> {
    match labels {
        None => PointSpace::new(n),
        Some(l) if l.len() == n => PointSpace::with_labels(l),
        Some(l) => Err(Error::Invariant(format!(
            "{} labels for {n} points",
            l.len()
        ))),
    }
}

fn labels_of(space: &PointSpace) -> Option<Vec<String>> {
    space.labels().map(<[String]>::to_vec)
}

impl RawTopology {
    /// The carrier and the listed sets, with points range-checked.
    pub fn family(&self) -> Result<(PointSpace, Vec<PointSet>)> {
        let space = space_of(self.n, self.labels.clone())?;
        let sets = self
            .opens
            .iter()
            .map(|list| {
                for &p in list {
                    space.check_point(p)?;
                }
                space.set_of(list)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((space, sets))
    }
}

impl RawQMetric {
    pub fn family_unchecked(&self) -> Result<QuasiFamily> {
        if self.indices.len() != self.matrices.len() {
            return Err(Error::Invariant(format!(
                "{} index labels for {} matrices",
                self.indices.len(),
                self.matrices.len()
            )));
        }
        let space = space_of(self.n, self.labels.clone())?;
        QuasiFamily::new_unchecked(space, self.indices.clone(), self.matrices.clone())
    }
}

impl RawSemigroup {
    pub fn semigroup_unchecked(&self) -> Result<ValueSemigroup> {
        ValueSemigroup::new_unchecked(
            self.elements.clone(),
            self.add.clone(),
            self.zero,
            self.infinity,
        )
    }

    pub fn positives_for(&self, s: &ValueSemigroup) -> Result<Option<PositiveSet>> {
        self.positives
            .as_ref()
            .map(|p| PositiveSet::new(s, p))
            .transpose()
    }
}

impl RawDocument {
    pub fn kind(&self) -> &'static str {
        match self {
            RawDocument::Topology(_) => "topology",
            RawDocument::Qmetric(_) => "qmetric",
            RawDocument::Sequence(_) => "sequence",
            RawDocument::Map(_) => "map",
            RawDocument::Net(_) => "net",
            RawDocument::Semigroup(_) => "semigroup",
        }
    }

    /// Checks every invariant of the document kind.
    pub fn check(self) -> Result<Document> {
        Ok(match self {
            RawDocument::Topology(t) => {
                let (space, sets) = t.family()?;
                Document::Topology(Topology::new(
                    space,
                    sets.iter().map(PointSet::mask).collect(),
                )?)
            }
            RawDocument::Qmetric(q) => {
                let space = space_of(q.n, q.labels)?;
                Document::QMetric(QuasiFamily::new(space, q.indices, q.matrices)?)
            }
            RawDocument::Sequence(s) => {
                let space = space_of(s.n, s.labels)?;
                Document::Sequence(SequenceSpec::new(space, s.default, s.rules)?)
            }
            RawDocument::Map(m) => Document::Map(PointMap::new(
                PointSpace::new(m.from)?,
                PointSpace::new(m.to)?,
                m.values,
            )?),
            RawDocument::Net(net) => {
                let order = net
                    .order
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|&v| match v {
                                0 => Ok(false),
                                1 => Ok(true),
                                other => Err(Error::Invariant(format!(
                                    "order entry {other} is not 0 or 1"
                                ))),
                            })
                            .collect::<Result<Vec<bool>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                Document::Net(DirectedNet::new(
                    PointSpace::new(net.n)?,
                    net.elements,
                    order,
                    net.assignment,
                )?)
            }
            RawDocument::Semigroup(raw) => {
                let semigroup = ValueSemigroup::new(
                    raw.elements.clone(),
                    raw.add.clone(),
                    raw.zero,
                    raw.infinity,
                )?;
                let positives = raw.positives_for(&semigroup)?;
                if let Some(p) = &positives {
                    if let Some(v) = crate::continuity_space::check_positives(&semigroup, p).first()
                    {
                        return Err(Error::Invariant(format!("positives fail: {v:?}")));
                    }
                }
                Document::Semigroup {
                    semigroup,
                    positives,
                }
            }
        })
    }
}

/// Decodes without checking invariants beyond JSON shape.
pub fn parse_raw(text: &str) -> Result<RawDocument> {
    serde_json::from_str(text).map_err(|e| Error::Syntax(e.to_string()))
}

/// Decodes a document and checks every invariant.
pub fn parse_document(text: &str) -> Result<Document> {
    parse_raw(text)?.check()
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Topology(_) => "topology",
            Document::QMetric(_) => "qmetric",
            Document::Sequence(_) => "sequence",
            Document::Map(_) => "map",
            Document::Net(_) => "net",
            Document::Semigroup { .. } => "semigroup",
        }
    }

    pub fn to_raw(&self) -> RawDocument {
        match self {
            Document::Topology(t) => RawDocument::Topology(raw_topology(t)),
            Document::QMetric(q) => RawDocument::Qmetric(raw_qmetric(q)),
            Document::Sequence(s) => RawDocument::Sequence(RawSequence {
                n: s.space().n(),
                labels: labels_of(s.space()),
                default: s.default_point(),
                rules: s.rules().to_vec(),
            }),
            Document::Map(m) => RawDocument::Map(RawMap {
                from: m.domain().n(),
                to: m.codomain().n(),
                values: m.values().to_vec(),
            }),
            Document::Net(net) => RawDocument::Net(RawNet {
                elements: net.elements().to_vec(),
                order: net
                    .order()
                    .iter()
                    .map(|row| row.iter().map(|&b| b as u8).collect())
                    .collect(),
                assignment: net.assignment().to_vec(),
                n: net.space().n(),
            }),
            Document::Semigroup {
                semigroup,
                positives,
            } => RawDocument::Semigroup(RawSemigroup {
                elements: semigroup.elements().to_vec(),
                add: semigroup.table().to_vec(),
                zero: semigroup.zero(),
                infinity: semigroup.infinity(),
                positives: positives.map(|p| p.members().collect()),
            }),
        }
    }

    pub fn into_topology(self) -> Result<Topology> {
        match self {
            Document::Topology(t) => Ok(t),
            other => Err(Error::WrongKind {
                expected: "topology",
                found: other.kind(),
            }),
        }
    }

    pub fn into_qmetric(self) -> Result<QuasiFamily> {
        match self {
            Document::QMetric(q) => Ok(q),
            other => Err(Error::WrongKind {
                expected: "qmetric",
                found: other.kind(),
            }),
        }
    }

    pub fn into_sequence(self) -> Result<SequenceSpec> {
        match self {
            Document::Sequence(s) => Ok(s),
            other => Err(Error::WrongKind {
                expected: "sequence",
                found: other.kind(),
            }),
        }
    }
}

fn raw_topology(t: &Topology) -> RawTopology {
    RawTopology {
        n: t.n(),
        labels: labels_of(t.space()),
        opens: t.opens().iter().map(|&m| members(m).collect()).collect(),
    }
}

fn raw_qmetric(q: &QuasiFamily) -> RawQMetric {
    RawQMetric {
        n: q.n(),
        labels: labels_of(q.space()),
        indices: q.indices().to_vec(),
        matrices: (0..q.index_count()).map(|i| q.matrix(i)).collect(),
    }
}

/// Compact single-line JSON.
pub fn serialize(doc: &Document) -> String {
    serde_json::to_string(&doc.to_raw()).expect("documents serialize")
}

pub fn topology_to_string(t: &Topology) -> String {
    serde_json::to_string(&RawDocument::Topology(raw_topology(t))).expect("documents serialize")
}

pub fn qmetric_to_string(q: &QuasiFamily) -> String {
    serde_json::to_string(&RawDocument::Qmetric(raw_qmetric(q))).expect("documents serialize")
}
