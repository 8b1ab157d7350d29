//! Finitely described infinite sequences and finite directed nets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index_set::IndexSetDescriptor;
use crate::points::{members, PointSpace};

/// Sends every position in `set` to `point`, unless an earlier rule matched.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rule {
    pub set: IndexSetDescriptor,
    pub point: usize,
}

/// A sequence `x_1, x_2, ...` over a finite carrier. Position `k` takes the
/// point of the first rule whose set contains `k`, else the default point.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SequenceSpec {
    space: PointSpace,
    default: usize,
    rules: Vec<Rule>,
}

impl SequenceSpec {
    pub fn new(space: PointSpace, default: usize, mut rules: Vec<Rule>) -> Result<Self> {
        space.check_point(default)?;
        for rule in &mut rules {
            space.check_point(rule.point)?;
            rule.set.validate()?;
            rule.set.canonicalize();
        }
        Ok(SequenceSpec {
            space,
            default,
            rules,
        })
    }

    pub fn constant(space: PointSpace, point: usize) -> Result<Self> {
        SequenceSpec::new(space, point, Vec::new())
    }

    /// `prefix` at positions `1..=prefix.len()`, then `cycle` repeated.
    pub fn eventually_periodic(
        space: PointSpace,
        prefix: &[usize],
        cycle: &[usize],
    ) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::Invariant("cycle must be non-empty".into()));
        }
        let offset = prefix.len() as u64;
        let period = cycle.len() as u64;
        let mut rules: Vec<Rule> = prefix
            .iter()
            .enumerate()
            .map(|(i, &p)| Rule {
                set: IndexSetDescriptor::finite([i as u64 + 1]),
                point: p,
            })
            .collect();
        // position k > offset carries cycle[(k - offset - 1) mod period]
        for (j, &p) in cycle.iter().enumerate().skip(1) {
            let residue = (offset + 1 + j as u64) % period;
            rules.push(Rule {
                set: IndexSetDescriptor::residues(period, [residue])?,
                point: p,
            });
        }
        SequenceSpec::new(space, cycle[0], rules)
    }

    pub fn space(&self) -> &PointSpace {
        &self.space
    }

    pub fn default_point(&self) -> usize {
        self.default
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// The point at 1-based position `k`.
    pub fn value_at(&self, k: u64) -> usize {
        self.rules
            .iter()
            .find(|r| r.set.contains(k))
            .map_or(self.default, |r| r.point)
    }

    /// Positions governed by rule `j`: its set minus every earlier rule's set.
    pub fn rule_region(&self, j: usize) -> IndexSetDescriptor {
        let own = self.rules[j].set.clone();
        if j == 0 {
            return own;
        }
        let earlier = self.rules[..j].iter().map(|r| r.set.clone()).collect();
        IndexSetDescriptor::difference(own, IndexSetDescriptor::union(earlier))
    }

    /// Positions that fall through to the default point.
    pub fn default_region(&self) -> IndexSetDescriptor {
        let all = self.rules.iter().map(|r| r.set.clone()).collect();
        IndexSetDescriptor::complement(IndexSetDescriptor::union(all))
    }

    /// `{k : x_k ∈ points}` as a descriptor.
    pub fn positions_of(&self, points: u16) -> IndexSetDescriptor {
        let mut parts: Vec<IndexSetDescriptor> = (0..self.rules.len())
            .filter(|&j| points & (1 << self.rules[j].point) != 0)
            .map(|j| self.rule_region(j))
            .collect();
        if points & (1 << self.default) != 0 {
            parts.push(self.default_region());
        }
        match parts.len() {
            1 => parts.pop().unwrap(),
            _ => IndexSetDescriptor::union(parts),
        }
    }

    /// Points visited infinitely often, or `None` when some region is out of
    /// the analyzer's reach.
    pub fn recurrent_points(&self) -> Option<u16> {
        let mut mask = 0u16;
        for p in members(self.space.full_mask()) {
            if !self.positions_of(1 << p).analyze()?.is_finite() {
                mask |= 1 << p;
            }
        }
        Some(mask)
    }

    /// `x_1 ..= x_len` by direct evaluation.
    pub fn prefix(&self, len: u64) -> Vec<usize> {
        (1..=len).map(|k| self.value_at(k)).collect()
    }
}

/// A net indexed by a finite directed preorder.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DirectedNet {
    space: PointSpace,
    elements: Vec<String>,
    order: Vec<Vec<bool>>,
    assignment: Vec<usize>,
}

impl DirectedNet {
    pub fn new(
        space: PointSpace,
        elements: Vec<String>,
        order: Vec<Vec<bool>>,
        assignment: Vec<usize>,
    ) -> Result<Self> {
        let m = elements.len();
        if m == 0 {
            return Err(Error::Invariant("a net needs at least one element".into()));
        }
        if order.len() != m || order.iter().any(|row| row.len() != m) {
            return Err(Error::Invariant(format!("order must be a {m}x{m} matrix")));
        }
        if assignment.len() != m {
            return Err(Error::Invariant(format!(
                "assignment has {} entries for {m} elements",
                assignment.len()
            )));
        }
        for &p in &assignment {
            space.check_point(p)?;
        }
        for a in 0..m {
            if !order[a][a] {
                return Err(Error::Invariant(format!("order is not reflexive at {a}")));
            }
            for b in 0..m {
                for c in 0..m {
                    if order[a][b] && order[b][c] && !order[a][c] {
                        return Err(Error::Invariant(format!(
                            "order is not transitive at ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        for a in 0..m {
            for b in a + 1..m {
                if !(0..m).any(|c| order[a][c] && order[b][c]) {
                    return Err(Error::Invariant(format!(
                        "elements {a} and {b} have no upper bound"
                    )));
                }
            }
        }
        Ok(DirectedNet {
            space,
            elements,
            order,
            assignment,
        })
    }

    pub fn space(&self) -> &PointSpace {
        &self.space
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn order(&self) -> &[Vec<bool>] {
        &self.order
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// `a ≤ b` in the index order.
    pub fn le(&self, a: usize, b: usize) -> bool {
        self.order[a][b]
    }

    pub fn point(&self, a: usize) -> usize {
        self.assignment[a]
    }
}
