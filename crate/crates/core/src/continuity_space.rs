//! Value semigroups, sets of positives and continuity spaces on finite
//! carriers, with brute-force axiom checkers and the bridge from
//! quasimetric families over `{0,1}^I`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::QuasiFamily;
use crate::points::{members, PointSet, PointSpace};
use crate::topology::Topology;

/// Carrier size limit: element sets fit in a `u64`.
pub const MAX_ELEMENTS: usize = 64;

/// At most this many witnesses are listed per axiom.
pub const MAX_WITNESSES_PER_AXIOM: usize = 32;

/// A finite commutative monoid candidate with an absorbing element.
///
/// The order, meets and halves are derived from the addition table when the
/// value is built. Use [`check_value_semigroup`] to see which axioms hold;
/// [`ValueSemigroup::new`] refuses tables that fail any of them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueSemigroup {
    elements: Vec<String>,
    add: Vec<Vec<usize>>,
    zero: usize,
    infinity: usize,
    /// `le[a]` holds every `b` with `a ≤ b`, i.e. `b = a + x` for some `x`.
    le: Vec<u64>,
}

impl ValueSemigroup {
    pub fn new(
        elements: Vec<String>,
        add: Vec<Vec<usize>>,
        zero: usize,
        infinity: usize,
    ) -> Result<Self> {
        let s = Self::new_unchecked(elements, add, zero, infinity)?;
        if let Some(v) = check_value_semigroup(&s).first() {
            return Err(Error::Invariant(format!("not a value semigroup: {v:?}")));
        }
        Ok(s)
    }

    /// Shape-checked only.
    pub fn new_unchecked(
        elements: Vec<String>,
        add: Vec<Vec<usize>>,
        zero: usize,
        infinity: usize,
    ) -> Result<Self> {
        let m = elements.len();
        if m == 0 || m > MAX_ELEMENTS {
            return Err(Error::OutOfRange {
                what: "carrier size",
                value: m,
                range: "1..=64",
            });
        }
        if add.len() != m || add.iter().any(|r| r.len() != m) {
            return Err(Error::Invariant(format!("addition table must be {m}x{m}")));
        }
        if add.iter().flatten().any(|&v| v >= m) || zero >= m || infinity >= m {
            return Err(Error::Invariant("element reference out of range".into()));
        }
        let mut le = vec![0u64; m];
        for (a, row) in add.iter().enumerate() {
            for &b in row {
                le[a] |= 1 << b;
            }
        }
        Ok(ValueSemigroup {
            elements,
            add,
            zero,
            infinity,
            le,
        })
    }

    /// `{0,1}^k` with coordinatewise max. Element `e` has bit `i` as
    /// coordinate `i`; its label lists coordinates left to right.
    pub fn boolean_cube(k: usize) -> Result<Self> {
        if k > 6 {
            return Err(Error::OutOfRange {
                what: "index count",
                value: k,
                range: "0..=6",
            });
        }
        let m = 1usize << k;
        let elements = (0..m)
            .map(|e| {
                (0..k)
                    .map(|i| if e & (1 << i) != 0 { '1' } else { '0' })
                    .collect()
            })
            .collect();
        let add = (0..m).map(|a| (0..m).map(|b| a | b).collect()).collect();
        Self::new_unchecked(elements, add, 0, m - 1)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.add
    }

    pub fn zero(&self) -> usize {
        self.zero
    }

    pub fn infinity(&self) -> usize {
        self.infinity
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        self.add[a][b]
    }

    pub fn le(&self, a: usize, b: usize) -> bool {
        self.le[a] & (1 << b) != 0
    }

    pub fn element(&self, label: &str) -> Option<usize> {
        self.elements.iter().position(|e| e == label)
    }

    /// Greatest lower bound of `a` and `b`, if one exists.
    pub fn meet(&self, a: usize, b: usize) -> Option<usize> {
        let lower: Vec<usize> = (0..self.len())
            .filter(|&c| self.le(c, a) && self.le(c, b))
            .collect();
        lower
            .iter()
            .copied()
            .find(|&c| lower.iter().all(|&d| self.le(d, c)))
    }

    /// Every `b` with `b + b = a`.
    pub fn halves(&self, a: usize) -> Vec<usize> {
        (0..self.len()).filter(|&b| self.add[b][b] == a).collect()
    }

    /// The unique half of `a`.
    pub fn half(&self, a: usize) -> Option<usize> {
        match self.halves(a).as_slice() {
            [b] => Some(*b),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum SemigroupViolation {
    Associativity {
        a: usize,
        b: usize,
        c: usize,
    },
    Commutativity {
        a: usize,
        b: usize,
    },
    Identity {
        a: usize,
    },
    Absorbing {
        a: usize,
    },
    InfinityIsZero,
    /// `a + x = b`, `b + y = a`, `a ≠ b`.
    Antisymmetry {
        a: usize,
        b: usize,
        x: usize,
        y: usize,
    },
    /// `a` has zero or several halves.
    Halving {
        a: usize,
        halves: Vec<usize>,
    },
    /// `a` and `b` have no greatest lower bound.
    MissingMeet {
        a: usize,
        b: usize,
    },
    /// `(a ∧ b) + c ≠ (a + c) ∧ (b + c)`.
    Distributivity {
        a: usize,
        b: usize,
        c: usize,
    },
}

impl SemigroupViolation {
    pub fn axiom(&self) -> &'static str {
        match self {
            SemigroupViolation::Associativity { .. } => "associativity",
            SemigroupViolation::Commutativity { .. } => "commutativity",
            SemigroupViolation::Identity { .. } => "identity",
            SemigroupViolation::Absorbing { .. } => "absorbing",
            SemigroupViolation::InfinityIsZero => "infinity_is_zero",
            SemigroupViolation::Antisymmetry { .. } => "antisymmetry",
            SemigroupViolation::Halving { .. } => "halving",
            SemigroupViolation::MissingMeet { .. } => "missing_meet",
            SemigroupViolation::Distributivity { .. } => "distributivity",
        }
    }

    /// Re-evaluates the witness against the table.
    pub fn replays_on(&self, s: &ValueSemigroup) -> bool {
        match *self {
            SemigroupViolation::Associativity { a, b, c } => {
                s.add(s.add(a, b), c) != s.add(a, s.add(b, c))
            }
            SemigroupViolation::Commutativity { a, b } => s.add(a, b) != s.add(b, a),
            SemigroupViolation::Identity { a } => {
                s.add(s.zero(), a) != a || s.add(a, s.zero()) != a
            }
            SemigroupViolation::Absorbing { a } => {
                s.add(s.infinity(), a) != s.infinity() || s.add(a, s.infinity()) != s.infinity()
            }
            SemigroupViolation::InfinityIsZero => s.infinity() == s.zero(),
            SemigroupViolation::Antisymmetry { a, b, x, y } => {
                s.add(a, x) == b && s.add(b, y) == a && a != b
            }
            SemigroupViolation::Halving { a, ref halves } => {
                halves.len() != 1 && s.halves(a) == *halves
            }
            SemigroupViolation::MissingMeet { a, b } => s.meet(a, b).is_none(),
            SemigroupViolation::Distributivity { a, b, c } => {
                match (s.meet(a, b), s.meet(s.add(a, c), s.add(b, c))) {
                    (Some(m), Some(r)) => s.add(m, c) != r,
                    _ => false,
                }
            }
        }
    }
}

struct Capped<T> {
    out: Vec<T>,
    per_axiom: usize,
}

impl<T> Capped<T> {
    fn push(&mut self, v: T) {
        if self.per_axiom < MAX_WITNESSES_PER_AXIOM {
            self.out.push(v);
        }
        self.per_axiom += 1;
    }

    fn next_axiom(&mut self) {
        self.per_axiom = 0;
    }
}

/// Brute-force check of the monoid laws and the four value-semigroup axioms.
pub fn check_value_semigroup(s: &ValueSemigroup) -> Vec<SemigroupViolation> {
    let m = s.len();
    let mut v = Capped {
        out: Vec::new(),
        per_axiom: 0,
    };
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                if s.add(s.add(a, b), c) != s.add(a, s.add(b, c)) {
                    v.push(SemigroupViolation::Associativity { a, b, c });
                }
            }
        }
    }
    v.next_axiom();
    for a in 0..m {
        for b in a + 1..m {
            if s.add(a, b) != s.add(b, a) {
                v.push(SemigroupViolation::Commutativity { a, b });
            }
        }
    }
    v.next_axiom();
    for a in 0..m {
        if s.add(s.zero(), a) != a || s.add(a, s.zero()) != a {
            v.push(SemigroupViolation::Identity { a });
        }
    }
    v.next_axiom();
    for a in 0..m {
        if s.add(s.infinity(), a) != s.infinity() || s.add(a, s.infinity()) != s.infinity() {
            v.push(SemigroupViolation::Absorbing { a });
        }
    }
    v.next_axiom();
    if s.infinity() == s.zero() {
        v.push(SemigroupViolation::InfinityIsZero);
    }
    v.next_axiom();
    for a in 0..m {
        for b in 0..m {
            if a == b {
                continue;
            }
            let x = (0..m).find(|&x| s.add(a, x) == b);
            let y = (0..m).find(|&y| s.add(b, y) == a);
            if let (Some(x), Some(y)) = (x, y) {
                if a < b {
                    v.push(SemigroupViolation::Antisymmetry { a, b, x, y });
                }
            }
        }
    }
    v.next_axiom();
    for a in 0..m {
        let halves = s.halves(a);
        if halves.len() != 1 {
            v.push(SemigroupViolation::Halving { a, halves });
        }
    }
    v.next_axiom();
    for a in 0..m {
        for b in a..m {
            if s.meet(a, b).is_none() {
                v.push(SemigroupViolation::MissingMeet { a, b });
            }
        }
    }
    v.next_axiom();
    let meets: Vec<Vec<Option<usize>>> = (0..m)
        .map(|a| (0..m).map(|b| s.meet(a, b)).collect())
        .collect();
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                let lhs = meets[a][b].map(|ab| s.add(ab, c));
                let rhs = meets[s.add(a, c)][s.add(b, c)];
                if let (Some(l), Some(r)) = (lhs, rhs) {
                    if l != r {
                        v.push(SemigroupViolation::Distributivity { a, b, c });
                    }
                }
            }
        }
    }
    v.out
}

/// A subset of a value semigroup's carrier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PositiveSet {
    members: u64,
}

impl PositiveSet {
    pub fn new(s: &ValueSemigroup, members: &[usize]) -> Result<Self> {
        let mut mask = 0u64;
        for &a in members {
            if a >= s.len() {
                return Err(Error::Invariant(format!("positive {a} is not an element")));
            }
            mask |= 1 << a;
        }
        Ok(PositiveSet { members: mask })
    }

    pub fn full(s: &ValueSemigroup) -> Self {
        PositiveSet {
            members: if s.len() == 64 {
                u64::MAX
            } else {
                (1u64 << s.len()) - 1
            },
        }
    }

    pub fn contains(&self, a: usize) -> bool {
        self.members & (1 << a) != 0
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        (0..64).filter(move |&a| self.contains(a))
    }

    pub fn mask(&self) -> u64 {
        self.members
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum PositivesViolation {
    /// `a, b ∈ P` but `a ∧ b ∉ P`.
    MeetClosure { a: usize, b: usize, meet: usize },
    /// `r ∈ P`, `r ≤ a`, `a ∉ P`.
    UpwardClosure { r: usize, a: usize },
    /// `r ∈ P` but `r/2 ∉ P`.
    HalvingClosure { r: usize, half: usize },
    /// `a ≤ b + r` for every `r ∈ P`, yet `a ≰ b`.
    Separation { a: usize, b: usize },
}

impl PositivesViolation {
    pub fn axiom(&self) -> &'static str {
        match self {
            PositivesViolation::MeetClosure { .. } => "meet_closure",
            PositivesViolation::UpwardClosure { .. } => "upward_closure",
            PositivesViolation::HalvingClosure { .. } => "halving_closure",
            PositivesViolation::Separation { .. } => "separation",
        }
    }

    pub fn replays_on(&self, s: &ValueSemigroup, p: &PositiveSet) -> bool {
        match *self {
            PositivesViolation::MeetClosure { a, b, meet } => {
                p.contains(a) && p.contains(b) && s.meet(a, b) == Some(meet) && !p.contains(meet)
            }
            PositivesViolation::UpwardClosure { r, a } => {
                p.contains(r) && s.le(r, a) && !p.contains(a)
            }
            PositivesViolation::HalvingClosure { r, half } => {
                p.contains(r) && s.half(r) == Some(half) && !p.contains(half)
            }
            PositivesViolation::Separation { a, b } => {
                p.members().all(|r| s.le(a, s.add(b, r))) && !s.le(a, b)
            }
        }
    }
}

/// Brute-force check of the four positives axioms. Meets and halves that
/// do not exist are skipped; they are semigroup violations.
pub fn check_positives(s: &ValueSemigroup, p: &PositiveSet) -> Vec<PositivesViolation> {
    let m = s.len();
    let mut v = Capped {
        out: Vec::new(),
        per_axiom: 0,
    };
    let pos: Vec<usize> = p.members().filter(|&a| a < m).collect();
    for (i, &a) in pos.iter().enumerate() {
        for &b in &pos[i..] {
            if let Some(meet) = s.meet(a, b) {
                if !p.contains(meet) {
                    v.push(PositivesViolation::MeetClosure { a, b, meet });
                }
            }
        }
    }
    v.next_axiom();
    for &r in &pos {
        for a in 0..m {
            if s.le(r, a) && !p.contains(a) {
                v.push(PositivesViolation::UpwardClosure { r, a });
            }
        }
    }
    v.next_axiom();
    for &r in &pos {
        if let Some(half) = s.half(r) {
            if !p.contains(half) {
                v.push(PositivesViolation::HalvingClosure { r, half });
            }
        }
    }
    v.next_axiom();
    for a in 0..m {
        for b in 0..m {
            if pos.iter().all(|&r| s.le(a, s.add(b, r))) && !s.le(a, b) {
                v.push(PositivesViolation::Separation { a, b });
            }
        }
    }
    v.out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum DistanceViolation {
    SelfDistance { x: usize },
    Triangle { x: usize, y: usize, z: usize },
}

/// `(X, d, A, P)` with `d` valued in the semigroup's carrier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContinuitySpace {
    space: PointSpace,
    semigroup: ValueSemigroup,
    positives: PositiveSet,
    dist: Vec<Vec<usize>>,
}

/// `d(x,x) = 0` and `d(x,z) ≤ d(x,y) + d(y,z)` for points of the carrier.
pub fn check_distance(s: &ValueSemigroup, dist: &[Vec<usize>]) -> Vec<DistanceViolation> {
    let n = dist.len();
    let mut out = Vec::new();
    for (x, row) in dist.iter().enumerate() {
        if row[x] != s.zero() {
            out.push(DistanceViolation::SelfDistance { x });
        }
    }
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if !s.le(dist[x][z], s.add(dist[x][y], dist[y][z])) {
                    out.push(DistanceViolation::Triangle { x, y, z });
                }
            }
        }
    }
    out
}

impl ContinuitySpace {
    pub fn new(
        space: PointSpace,
        semigroup: ValueSemigroup,
        positives: PositiveSet,
        dist: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let n = space.n();
        if dist.len() != n || dist.iter().any(|r| r.len() != n) {
            return Err(Error::Invariant(format!("distance table must be {n}x{n}")));
        }
        if dist.iter().flatten().any(|&a| a >= semigroup.len()) {
            return Err(Error::Invariant("distance value is not an element".into()));
        }
        if let Some(v) = check_distance(&semigroup, &dist).first() {
            return Err(Error::Invariant(format!("distance axioms fail: {v:?}")));
        }
        Ok(ContinuitySpace {
            space,
            semigroup,
            positives,
            dist,
        })
    }

    pub fn space(&self) -> &PointSpace {
        &self.space
    }

    pub fn semigroup(&self) -> &ValueSemigroup {
        &self.semigroup
    }

    pub fn positives(&self) -> &PositiveSet {
        &self.positives
    }

    pub fn dist(&self, x: usize, y: usize) -> usize {
        self.dist[x][y]
    }

    fn ball_mask(&self, x: usize, r: usize) -> u16 {
        (0..self.space.n())
            .filter(|&y| self.semigroup.le(self.dist[x][y], r))
            .fold(0u16, |m, y| m | 1 << y)
    }
}

/// `B[x, r] = {y : d(x,y) ≤ r}`.
pub fn ball_r(cs: &ContinuitySpace, x: usize, r: usize) -> Result<PointSet> {
    cs.space.check_point(x)?;
    if r >= cs.semigroup.len() || !cs.positives.contains(r) {
        let label = cs
            .semigroup
            .elements()
            .get(r)
            .cloned()
            .unwrap_or_else(|| r.to_string());
        return Err(Error::NotPositive(label));
    }
    cs.space.set(cs.ball_mask(x, r))
}

/// `U` is open iff every `x ∈ U` has a positive `r` with `B[x,r] ⊆ U`.
pub fn to_topology_kopperman(cs: &ContinuitySpace) -> Topology {
    let n = cs.space.n();
    let balls: Vec<Vec<u16>> = (0..n)
        .map(|x| {
            cs.positives
                .members()
                .filter(|&r| r < cs.semigroup.len())
                .map(|r| cs.ball_mask(x, r))
                .collect()
        })
        .collect();
    let opens: Vec<u16> = (0..=cs.space.full_mask())
        .filter(|&u| members(u).all(|x| balls[x].iter().any(|&b| b & !u == 0)))
        .collect();
    Topology::new(cs.space.clone(), opens).expect("continuity-space opens form a topology")
}

/// `{0,1}^I` with coordinatewise max, every element positive, and
/// `d(x,y) = (d_i(x,y))_i`.
pub fn lift_quasifamily(q: &QuasiFamily) -> Result<ContinuitySpace> {
    let k = q.index_count();
    let semigroup = ValueSemigroup::boolean_cube(k)?;
    let positives = PositiveSet::full(&semigroup);
    let n = q.n();
    let dist = (0..n)
        .map(|x| {
            (0..n)
                .map(|y| (0..k).fold(0usize, |e, i| e | (q.d(i, x, y) as usize) << i))
                .collect()
        })
        .collect();
    ContinuitySpace::new(q.space().clone(), semigroup, positives, dist)
}
