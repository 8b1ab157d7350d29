//! Finite topologies: axioms, subbases, minimal neighborhoods, separation,
//! continuity, sequence convergence and exhaustive enumeration.

use serde::Serialize;

use crate::document;
use crate::error::{Error, Result};
use crate::points::{full_mask, mask_label, members, PointMap, PointSet, PointSpace};
use crate::sequence::SequenceSpec;

/// Horizon used to cross-check exact convergence decisions.
pub const DEFAULT_HORIZON: u64 = 100_000;

/// A reflexive, transitive relation on `{0, .., n-1}`. Row `x` holds the
/// points `y` with `x ⊑ y`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Preorder {
    n: usize,
    rows: Vec<u16>,
}

impl Preorder {
    pub fn new(n: usize, rows: Vec<u16>) -> Result<Self> {
        let space = PointSpace::new(n)?;
        if rows.len() != n {
            return Err(Error::Invariant(format!("preorder needs {n} rows")));
        }
        for (x, &row) in rows.iter().enumerate() {
            space.check_mask(row)?;
            if row & (1 << x) == 0 {
                return Err(Error::Invariant(format!(
                    "relation is not reflexive at {x}"
                )));
            }
        }
        let p = Preorder { n, rows };
        if let Some((x, y, z)) = p.transitivity_witness() {
            return Err(Error::Invariant(format!(
                "relation is not transitive: {x} ⊑ {y} ⊑ {z} but not {x} ⊑ {z}"
            )));
        }
        Ok(p)
    }

    pub fn identity(n: usize) -> Self {
        Preorder {
            n,
            rows: (0..n).map(|x| 1u16 << x).collect(),
        }
    }

    fn transitivity_witness(&self) -> Option<(usize, usize, usize)> {
        for x in 0..self.n {
            for y in members(self.rows[x]) {
                let escape = self.rows[y] & !self.rows[x];
                if escape != 0 {
                    return Some((x, y, escape.trailing_zeros() as usize));
                }
            }
        }
        None
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[u16] {
        &self.rows
    }

    /// `x ⊑ y`.
    pub fn le(&self, x: usize, y: usize) -> bool {
        self.rows[x] & (1 << y) != 0
    }

    /// Row-major relation bits, `(0,0)` least significant. Enumeration
    /// order of preorders is increasing in this key.
    pub fn relation_key(&self) -> u64 {
        let mut key = 0u64;
        for x in 0..self.n {
            key |= (self.rows[x] as u64) << (x * self.n);
        }
        key
    }

    pub fn is_up_set(&self, mask: u16) -> bool {
        members(mask).all(|x| self.rows[x] & !mask == 0)
    }

    /// The Alexandrov topology: every up-closed set is open.
    pub fn alexandrov(&self) -> Topology {
        let space = PointSpace::new(self.n).expect("preorder size is in range");
        let opens = (0..=full_mask(self.n))
            .filter(|&m| self.is_up_set(m))
            .collect();
        Topology::assemble(space, opens)
    }
}

/// A finite topology, opens sorted by mask value.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Topology {
    space: PointSpace,
    opens: Vec<u16>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum TopologyViolation {
    ForeignSet {
        set: String,
        n: usize,
    },
    Duplicate {
        set: String,
    },
    NoEmptySet,
    NoFullSet,
    UnionEscape {
        a: String,
        b: String,
        union: String,
    },
    IntersectionEscape {
        a: String,
        b: String,
        intersection: String,
    },
}

impl TopologyViolation {
    /// Re-evaluates the violation against the family it was reported for.
    pub fn replays_on(&self, space: &PointSpace, family: &[PointSet]) -> bool {
        let has = |label: &str| family.iter().any(|s| s.to_string() == label);
        match self {
            TopologyViolation::ForeignSet { n, .. } => *n != space.n(),
            TopologyViolation::Duplicate { set } => {
                family.iter().filter(|s| s.to_string() == *set).count() > 1
            }
            TopologyViolation::NoEmptySet => !has(&mask_label(0)),
            TopologyViolation::NoFullSet => !has(&mask_label(space.full_mask())),
            TopologyViolation::UnionEscape { a, b, union } => has(a) && has(b) && !has(union),
            TopologyViolation::IntersectionEscape { a, b, intersection } => {
                has(a) && has(b) && !has(intersection)
            }
        }
    }
}

/// Lists every way `family` fails to be a topology on `space`. One
/// union/intersection violation is reported per missing set.
pub fn check_topology(space: &PointSpace, family: &[PointSet]) -> Vec<TopologyViolation> {
    let mut violations = Vec::new();
    let size = 1usize << space.n();
    let mut present = vec![false; size];
    let mut masks = Vec::new();
    for s in family {
        if s.n() != space.n() {
            violations.push(TopologyViolation::ForeignSet {
                set: s.to_string(),
                n: s.n(),
            });
            continue;
        }
        if present[s.mask() as usize] {
            violations.push(TopologyViolation::Duplicate { set: s.to_string() });
            continue;
        }
        present[s.mask() as usize] = true;
        masks.push(s.mask());
    }
    masks.sort_unstable();
    if !present[0] {
        violations.push(TopologyViolation::NoEmptySet);
    }
    if !present[space.full_mask() as usize] {
        violations.push(TopologyViolation::NoFullSet);
    }
    if present[0]
        && present[space.full_mask() as usize]
        && closed_by_neighborhoods(space.n(), &present)
    {
        return violations;
    }
    let mut reported_union = vec![false; size];
    let mut reported_meet = vec![false; size];
    for (i, &a) in masks.iter().enumerate() {
        for &b in &masks[i + 1..] {
            let u = (a | b) as usize;
            if !present[u] && !reported_union[u] {
                reported_union[u] = true;
                violations.push(TopologyViolation::UnionEscape {
                    a: mask_label(a),
                    b: mask_label(b),
                    union: mask_label(u as u16),
                });
            }
            let m = (a & b) as usize;
            if !present[m] && !reported_meet[m] {
                reported_meet[m] = true;
                violations.push(TopologyViolation::IntersectionEscape {
                    a: mask_label(a),
                    b: mask_label(b),
                    intersection: mask_label(m as u16),
                });
            }
        }
    }
    violations
}

/// A family containing `X` is closed under unions and intersections iff it
/// is exactly the set of `U` with `N(x) ⊆ U` for all `x ∈ U`, where `N(x)`
/// is the intersection of the members containing `x`.
fn closed_by_neighborhoods(n: usize, present: &[bool]) -> bool {
    let full = full_mask(n);
    let mut nb = vec![full; n];
    for (mask, _) in present.iter().enumerate().filter(|(_, &p)| p) {
        for x in members(mask as u16) {
            nb[x] &= mask as u16;
        }
    }
    (0..=full).all(|u| {
        let up = members(u).all(|x| nb[x] & !u == 0);
        up == present[u as usize]
    })
}

/// The smallest topology containing `subbase`: close under finite
/// intersections (the empty intersection being `X`), then under unions (the
/// empty union being `∅`).
pub fn generate_from_subbase(space: &PointSpace, subbase: &[PointSet]) -> Result<Topology> {
    let size = 1usize << space.n();
    let full = space.full_mask();
    let mut in_base = vec![false; size];
    let mut base = vec![full];
    in_base[full as usize] = true;
    for s in subbase {
        space.same_size(&PointSpace::new(s.n())?)?;
        if !in_base[s.mask() as usize] {
            in_base[s.mask() as usize] = true;
            base.push(s.mask());
        }
    }
    let mut i = 0;
    while i < base.len() {
        let a = base[i];
        for j in 0..i {
            let m = a & base[j];
            if !in_base[m as usize] {
                in_base[m as usize] = true;
                base.push(m);
            }
        }
        i += 1;
    }

    let mut open = vec![false; size];
    let mut opens = vec![0u16];
    open[0] = true;
    let mut i = 0;
    while i < opens.len() {
        let u = opens[i];
        for &b in &base {
            let v = u | b;
            if !open[v as usize] {
                open[v as usize] = true;
                opens.push(v);
            }
        }
        i += 1;
    }
    opens.sort_unstable();
    Ok(Topology::assemble(space.clone(), opens))
}

impl Topology {
    /// Validates and builds a topology from open-set masks in any order.
    pub fn new(space: PointSpace, opens: Vec<u16>) -> Result<Self> {
        for &m in &opens {
            space.check_mask(m)?;
        }
        let family: Vec<PointSet> = opens
            .iter()
            .map(|&m| space.set(m).expect("mask checked"))
            .collect();
        let violations = check_topology(&space, &family);
        if !violations.is_empty() {
            let text: Vec<String> = violations
                .iter()
                .map(|v| serde_json::to_string(v).expect("violation serializes"))
                .collect();
            return Err(Error::Invariant(format!(
                "not a topology: {}",
                text.join(", ")
            )));
        }
        let mut opens = opens;
        opens.sort_unstable();
        Ok(Topology { space, opens })
    }

    /// For internally produced families already known to be topologies.
    pub(crate) fn assemble(space: PointSpace, mut opens: Vec<u16>) -> Self {
        opens.sort_unstable();
        opens.dedup();
        debug_assert!(check_topology(
            &space,
            &opens
                .iter()
                .map(|&m| space.set(m).unwrap())
                .collect::<Vec<_>>()
        )
        .is_empty());
        Topology { space, opens }
    }

    pub fn discrete(space: PointSpace) -> Self {
        let opens = (0..=space.full_mask()).collect();
        Topology { space, opens }
    }

    pub fn indiscrete(space: PointSpace) -> Self {
        let opens = vec![0, space.full_mask()];
        Topology { space, opens }
    }

    /// `{∅, {1}, {0,1}}` on two points.
    pub fn sierpinski() -> Self {
        Topology {
            space: PointSpace::new(2).expect("two points"),
            opens: vec![0b00, 0b10, 0b11],
        }
    }

    pub fn with_labels(self, labels: Vec<String>) -> Result<Self> {
        let space = PointSpace::with_labels(labels)?;
        self.space.same_size(&space)?;
        Ok(Topology { space, ..self })
    }

    pub fn space(&self) -> &PointSpace {
        &self.space
    }

    pub fn n(&self) -> usize {
        self.space.n()
    }

    pub fn opens(&self) -> &[u16] {
        &self.opens
    }

    pub fn open_sets(&self) -> impl Iterator<Item = PointSet> + '_ {
        self.opens
            .iter()
            .map(|&m| self.space.set(m).expect("opens are within the space"))
    }

    pub fn is_open(&self, mask: u16) -> bool {
        self.opens.binary_search(&mask).is_ok()
    }

    /// Intersection of every open containing `x`.
    pub fn minimal_neighborhood(&self, x: usize) -> Result<PointSet> {
        self.space.check_point(x)?;
        let mask = self
            .opens
            .iter()
            .filter(|&&u| u & (1 << x) != 0)
            .fold(self.space.full_mask(), |acc, &u| acc & u);
        self.space.set(mask)
    }

    fn neighborhood_mask(&self, x: usize) -> u16 {
        self.opens
            .iter()
            .filter(|&&u| u & (1 << x) != 0)
            .fold(self.space.full_mask(), |acc, &u| acc & u)
    }

    /// `x ⊑ y` iff `y` lies in every open containing `x`.
    pub fn specialization_preorder(&self) -> Preorder {
        Preorder {
            n: self.n(),
            rows: (0..self.n()).map(|x| self.neighborhood_mask(x)).collect(),
        }
    }

    /// Some open contains exactly one of `x`, `y`.
    pub fn t0_separates(&self, x: usize, y: usize) -> bool {
        self.opens.iter().any(|&u| (u >> x) & 1 != (u >> y) & 1)
    }

    /// Each of `x`, `y` has an open avoiding the other.
    pub fn t1_separates(&self, x: usize, y: usize) -> bool {
        let avoids = |a: usize, b: usize| {
            self.opens
                .iter()
                .any(|&u| u & (1 << a) != 0 && u & (1 << b) == 0)
        };
        avoids(x, y) && avoids(y, x)
    }

    /// `x` and `y` have disjoint open neighborhoods.
    pub fn t2_separates(&self, x: usize, y: usize) -> bool {
        let around = |p: usize| self.opens.iter().filter(move |&&u| u & (1 << p) != 0);
        around(x).any(|&u| around(y).any(|&v| u & v == 0))
    }

    fn all_pairs(&self, pred: impl Fn(usize, usize) -> bool) -> bool {
        let n = self.n();
        (0..n).all(|x| (x + 1..n).all(|y| pred(x, y)))
    }

    pub fn is_t0(&self) -> bool {
        self.all_pairs(|x, y| self.t0_separates(x, y))
    }

    pub fn is_t1(&self) -> bool {
        self.all_pairs(|x, y| self.t1_separates(x, y))
    }

    pub fn is_t2(&self) -> bool {
        self.all_pairs(|x, y| self.t2_separates(x, y))
    }

    pub fn is_discrete(&self) -> bool {
        self.opens.len() == 1 << self.n()
    }
}

/// Preimage of every codomain open is open in the domain.
pub fn is_continuous(f: &PointMap, domain: &Topology, codomain: &Topology) -> Result<bool> {
    f.domain().same_size(domain.space())?;
    f.codomain().same_size(codomain.space())?;
    Ok(codomain
        .opens()
        .iter()
        .all(|&v| domain.is_open(f.preimage(v))))
}

/// Whether `s` is eventually inside the minimal neighborhood of `x`.
///
/// Decided exactly from the rule descriptors; direct evaluation up to
/// `horizon` cross-checks the decision.
pub fn converges_topologically(
    s: &SequenceSpec,
    t: &Topology,
    x: usize,
    horizon: u64,
) -> Result<bool> {
    s.space().same_size(t.space())?;
    let nb = t.minimal_neighborhood(x)?.mask();
    let outside = s.positions_of(!nb & t.space().full_mask());
    let profile = outside
        .analyze()
        .ok_or_else(|| Error::Invariant("sequence rules exceed the analyzable modulus".into()))?;
    let converges = profile.is_finite();
    cross_check(&outside, &profile, converges, horizon);
    Ok(converges)
}

/// Horizon-bounded confirmation of an exact eventual-membership decision.
pub(crate) fn cross_check(
    set: &crate::index_set::IndexSetDescriptor,
    profile: &crate::index_set::TailProfile,
    finite: bool,
    horizon: u64,
) {
    if finite {
        let late = (profile.settle + 1..=horizon).find(|&k| set.contains(k));
        assert!(
            late.is_none(),
            "finite verdict contradicted at position {late:?}"
        );
    } else if let Some(k) = profile.member_beyond(horizon) {
        assert!(
            set.contains(k),
            "infinite verdict witness {k} is not a member"
        );
    }
}

fn check_enumeration_size(n: usize, max: usize) -> Result<()> {
    if (1..=max).contains(&n) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            what: "n",
            value: n,
            range: if max == 4 { "1..=4" } else { "1..=5" },
        })
    }
}

/// Every preorder on `n ≤ 5` points, in increasing [`Preorder::relation_key`].
pub fn enumerate_preorders(n: usize) -> Result<Vec<Preorder>> {
    check_enumeration_size(n, 5)?;
    let slots: Vec<(usize, usize)> = (0..n)
        .flat_map(|x| (0..n).filter(move |&y| y != x).map(move |y| (x, y)))
        .collect();
    let mut out = Vec::new();
    for bits in 0u32..(1 << slots.len()) {
        let mut rows: Vec<u16> = (0..n).map(|x| 1u16 << x).collect();
        for (i, &(x, y)) in slots.iter().enumerate() {
            if bits & (1 << i) != 0 {
                rows[x] |= 1 << y;
            }
        }
        let p = Preorder { n, rows };
        if p.transitivity_witness().is_none() {
            out.push(p);
        }
    }
    Ok(out)
}

/// Every topology on `n ≤ 4` points by filtering all families of subsets.
pub fn enumerate_topologies_direct(n: usize) -> Result<Vec<Topology>> {
    check_enumeration_size(n, 4)?;
    let space = PointSpace::new(n)?;
    let subsets = 1usize << n;
    let full = space.full_mask() as usize;
    let required = 1u32 | (1u32 << full);
    let mut out = Vec::new();
    for family in 0u32..(1u32 << subsets) {
        if family & required != required {
            continue;
        }
        let sets: Vec<usize> = (0..subsets).filter(|&s| family & (1 << s) != 0).collect();
        let closed = sets.iter().all(|&a| {
            sets.iter()
                .all(|&b| family & (1 << (a | b)) != 0 && family & (1 << (a & b)) != 0)
        });
        if closed {
            out.push(Topology {
                space: space.clone(),
                opens: sets.into_iter().map(|s| s as u16).collect(),
            });
        }
    }
    sort_canonically(&mut out);
    Ok(out)
}

/// Every topology on `n ≤ 5` points as Alexandrov topologies of preorders.
pub fn enumerate_topologies_via_preorders(n: usize) -> Result<Vec<Topology>> {
    let mut out: Vec<Topology> = enumerate_preorders(n)?
        .iter()
        .map(Preorder::alexandrov)
        .collect();
    sort_canonically(&mut out);
    Ok(out)
}

/// Every topology on `n` points in canonical order: the direct enumerator
/// for `n ≤ 4`, the preorder route for `n = 5`.
pub fn enumerate_topologies(n: usize) -> Result<Vec<Topology>> {
    check_enumeration_size(n, 5)?;
    if n <= 4 {
        enumerate_topologies_direct(n)
    } else {
        enumerate_topologies_via_preorders(n)
    }
}

fn sort_canonically(topologies: &mut [Topology]) {
    topologies.sort_by_cached_key(document::topology_to_string);
}
