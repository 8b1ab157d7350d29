//! From a topology to a family of {0,1}-valued quasimetrics and back, plus
//! an exhaustive search for disagreements between separation predicates.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::QuasiFamily;
use crate::points::{mask_label, PointSet};
use crate::qmetric::{sep_metric_pair, to_topology, SeparationMode};
use crate::topology::{enumerate_preorders, Preorder, Topology};

/// The quasimetric family indexed by the opens of `source`:
/// `d_U(x,y) = 0` iff `x ∈ U ⇒ y ∈ U`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalFamily {
    pub family: QuasiFamily,
    pub source: Topology,
}

impl CanonicalFamily {
    /// Position of the index for open `u`.
    pub fn index_of(&self, u: u16) -> Result<usize> {
        self.family.position(&mask_label(u))
    }
}

fn implication_distance(u: u16, x: usize, y: usize) -> u8 {
    let in_u = |p: usize| u & (1 << p) != 0;
    let implication_holds = !in_u(x) || in_u(y);
    if implication_holds {
        0
    } else {
        1
    }
}

pub fn canonical_family(t: &Topology) -> CanonicalFamily {
    let n = t.n();
    let full = t.space().full_mask();
    let mut indices = Vec::with_capacity(t.opens().len());
    let mut rows = Vec::with_capacity(t.opens().len());
    for &u in t.opens() {
        indices.push(mask_label(u));
        rows.push(
            (0..n)
                .map(|x| if u & (1 << x) != 0 { !u & full } else { 0 })
                .collect(),
        );
    }
    let family = QuasiFamily::from_rows(t.space().clone(), indices, rows)
        .expect("implication distances are quasimetrics");
    CanonicalFamily {
        family,
        source: t.clone(),
    }
}

fn require_open(t: &Topology, u: &PointSet, x: usize, y: usize) -> Result<()> {
    t.space().set(u.mask())?;
    if u.n() != t.n() || !t.is_open(u.mask()) {
        return Err(Error::NotOpen(u.to_string()));
    }
    t.space().check_point(x)?;
    t.space().check_point(y)
}

/// Truth value of `x ∈ U ⇒ y ∈ U`, negated: 1 exactly when it fails.
pub fn d_u(t: &Topology, u: &PointSet, x: usize, y: usize) -> Result<u8> {
    require_open(t, u, x, y)?;
    Ok(implication_distance(u.mask(), x, y))
}

/// `χ_U(x) · χ_{X∖U}(y)`.
pub fn p_u(t: &Topology, u: &PointSet, x: usize, y: usize) -> Result<u8> {
    require_open(t, u, x, y)?;
    let chi = |set: PointSet, p: usize| u8::from(set.contains(p));
    Ok(chi(*u, x) * chi(u.complement(), y))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RoundTrip {
    pub equal: bool,
    pub missing: Vec<String>,
    pub extra: Vec<String>,
}

/// Compares `t` with the topology generated by its canonical family.
pub fn roundtrip(t: &Topology) -> RoundTrip {
    let back = to_topology(&canonical_family(t).family);
    let missing: Vec<String> = t
        .opens()
        .iter()
        .filter(|&&u| !back.is_open(u))
        .map(|&u| mask_label(u))
        .collect();
    let extra: Vec<String> = back
        .opens()
        .iter()
        .filter(|&&u| !t.is_open(u))
        .map(|&u| mask_label(u))
        .collect();
    RoundTrip {
        equal: missing.is_empty() && extra.is_empty(),
        missing,
        extra,
    }
}

/// A pairwise separation predicate on a quasimetric family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Predicate {
    Metric(SeparationMode),
    DirectT0,
    DirectT1,
    DirectT2,
}

impl Predicate {
    pub fn name(&self) -> String {
        match self {
            Predicate::Metric(m) => m.name().to_string(),
            Predicate::DirectT0 => "direct-t0".into(),
            Predicate::DirectT1 => "direct-t1".into(),
            Predicate::DirectT2 => "direct-t2".into(),
        }
    }

    fn needs_topology(&self) -> bool {
        !matches!(self, Predicate::Metric(_))
    }

    /// Value on the pair `{x, y}`; direct predicates read `To(q)`.
    pub fn on_pair(&self, q: &QuasiFamily, t: Option<&Topology>, x: usize, y: usize) -> bool {
        let topology = || t.expect("direct predicates need the generated topology");
        match self {
            Predicate::Metric(m) => sep_metric_pair(q, *m, x, y),
            Predicate::DirectT0 => topology().t0_separates(x, y),
            Predicate::DirectT1 => topology().t1_separates(x, y),
            Predicate::DirectT2 => topology().t2_separates(x, y),
        }
    }
}

impl FromStr for Predicate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('_', "-").as_str() {
            "direct-t0" => Ok(Predicate::DirectT0),
            "direct-t1" => Ok(Predicate::DirectT1),
            "direct-t2" => Ok(Predicate::DirectT2),
            _ => s
                .parse::<SeparationMode>()
                .map(Predicate::Metric)
                .map_err(|_| Error::UnknownPredicate(s.to_string())),
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// A family and a pair of points on which two predicates disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Discrepancy {
    pub family: QuasiFamily,
    pub pair: (usize, usize),
    pub left: bool,
    pub right: bool,
}

fn disagreement(q: &QuasiFamily, a: Predicate, b: Predicate) -> Option<(usize, usize, bool, bool)> {
    let t = (a.needs_topology() || b.needs_topology()).then(|| to_topology(q));
    let n = q.n();
    (0..n)
        .flat_map(|x| (x + 1..n).map(move |y| (x, y)))
        .find_map(|(x, y)| {
            let va = a.on_pair(q, t.as_ref(), x, y);
            let vb = b.on_pair(q, t.as_ref(), x, y);
            (va != vb).then_some((x, y, va, vb))
        })
}

/// Next non-decreasing tuple in lexicographic order, within `0..limit`.
fn advance(tuple: &mut [usize], limit: usize) -> bool {
    for pos in (0..tuple.len()).rev() {
        if tuple[pos] + 1 < limit {
            tuple[pos] += 1;
            let v = tuple[pos];
            tuple[pos + 1..].iter_mut().for_each(|t| *t = v);
            return true;
        }
    }
    false
}

/// Searches families whose indices are preorders on `1..=max_n` points,
/// with `1..=max_indices` indices, for a pair where `a` and `b` disagree.
///
/// Candidates are ordered by point count, then index count, then the
/// non-decreasing tuple of preorder ranks (ranks follow
/// [`Preorder::relation_key`]). The first candidate in that order is
/// returned regardless of how the work is split across threads.
pub fn find_discrepancy(
    a: Predicate,
    b: Predicate,
    max_n: usize,
    max_indices: usize,
) -> Result<Option<Discrepancy>> {
    if !(1..=4).contains(&max_n) {
        return Err(Error::OutOfRange {
            what: "n",
            value: max_n,
            range: "1..=4",
        });
    }
    if !(1..=3).contains(&max_indices) {
        return Err(Error::OutOfRange {
            what: "indices",
            value: max_indices,
            range: "1..=3",
        });
    }
    for n in 1..=max_n {
        let preorders = enumerate_preorders(n)?;
        for k in 1..=max_indices {
            let found = (0..preorders.len())
                .into_par_iter()
                .find_map_first(|first| {
                    let mut tuple = vec![first; k];
                    loop {
                        let chosen: Vec<&Preorder> = tuple.iter().map(|&r| &preorders[r]).collect();
                        let q = QuasiFamily::from_preorders(&chosen)
                            .expect("preorders are quasimetrics");
                        if let Some((x, y, left, right)) = disagreement(&q, a, b) {
                            return Some(Discrepancy {
                                family: q,
                                pair: (x, y),
                                left,
                                right,
                            });
                        }
                        if !advance(&mut tuple[1..], preorders.len()) {
                            return None;
                        }
                    }
                });
            if found.is_some() {
                return Ok(found);
            }
        }
    }
    Ok(None)
}
