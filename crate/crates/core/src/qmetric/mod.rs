//! Quasimetric families: axioms, balls, the generated topology, right and
//! left convergence, Cauchy nets, continuity, separation and statistical
//! convergence.

pub mod density;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::QuasiFamily;
use crate::index_set::IndexSetDescriptor;
use crate::points::{members, PointMap, PointSet};
use crate::sequence::{DirectedNet, SequenceSpec};
use crate::topology::{generate_from_subbase, Topology};

pub use density::{natural_density, DensityValue, PrefixDensity, ZeroBound, DENSITY_LADDER};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum QuasiViolation {
    /// `d_i(x,x) ≠ 0`.
    Reflexivity { index: String, x: usize },
    /// `d_i(x,z) > d_i(x,y) + d_i(y,z)`.
    Triangle {
        index: String,
        x: usize,
        y: usize,
        z: usize,
    },
}

impl fmt::Display for QuasiViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuasiViolation::Reflexivity { index, x } => {
                write!(f, "d(x,x)≠0 at index `{index}`, x={x}")
            }
            QuasiViolation::Triangle { index, x, y, z } => write!(
                f,
                "triangle inequality fails at index `{index}`: d({x},{z}) > d({x},{y}) + d({y},{z})"
            ),
        }
    }
}

impl QuasiViolation {
    /// Re-evaluates the witness against the matrix it was reported for.
    pub fn replays_on(&self, q: &QuasiFamily) -> bool {
        match self {
            QuasiViolation::Reflexivity { index, x } => q
                .position(index)
                .map(|i| q.d(i, *x, *x) != 0)
                .unwrap_or(false),
            QuasiViolation::Triangle { index, x, y, z } => q
                .position(index)
                .map(|i| q.d(i, *x, *z) > q.d(i, *x, *y) + q.d(i, *y, *z))
                .unwrap_or(false),
        }
    }
}

/// Every reflexivity and triangle failure, by index then points.
pub fn check_quasifamily(q: &QuasiFamily) -> Vec<QuasiViolation> {
    let n = q.n();
    let mut out = Vec::new();
    for (i, label) in q.indices().iter().enumerate() {
        for x in 0..n {
            if q.d(i, x, x) != 0 {
                out.push(QuasiViolation::Reflexivity {
                    index: label.clone(),
                    x,
                });
            }
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if q.d(i, x, z) > q.d(i, x, y) + q.d(i, y, z) {
                        out.push(QuasiViolation::Triangle {
                            index: label.clone(),
                            x,
                            y,
                            z,
                        });
                    }
                }
            }
        }
    }
    out
}

/// The same axiom phrased on the zero relation: reflexive and transitive.
pub fn zero_relation_is_preorder(q: &QuasiFamily, i: usize) -> bool {
    let n = q.n();
    (0..n).all(|x| q.ball_mask(i, x) & (1 << x) != 0)
        && (0..n).all(|x| {
            members(q.ball_mask(i, x)).all(|y| q.ball_mask(i, y) & !q.ball_mask(i, x) == 0)
        })
}

/// `{y : d_i(x,y) = 0}`.
pub fn ball(q: &QuasiFamily, index: &str, x: usize) -> Result<PointSet> {
    let i = q.position(index)?;
    q.space().check_point(x)?;
    q.space().set(q.ball_mask(i, x))
}

/// `To(X,d,I)`. With finitely many indices the weakest finite `J` is all of
/// `I`, so `U` is open iff every `x ∈ U` has the full ball intersection
/// inside `U`. The subbase generated by all balls must agree.
pub fn to_topology(q: &QuasiFamily) -> Topology {
    let n = q.n();
    let full = q.space().full_mask();
    let cores: Vec<u16> = (0..n).map(|x| q.core_ball(x)).collect();
    let opens: Vec<u16> = (0..=full)
        .filter(|&u| members(u).all(|x| cores[x] & !u == 0))
        .collect();
    let direct = Topology::assemble(q.space().clone(), opens);

    let subbase: Vec<PointSet> = (0..q.index_count())
        .flat_map(|i| (0..n).map(move |x| (i, x)))
        .map(|(i, x)| {
            q.space()
                .set(q.ball_mask(i, x))
                .expect("balls are in the space")
        })
        .collect();
    let generated = generate_from_subbase(q.space(), &subbase).expect("balls share the space");
    assert_eq!(
        direct.opens(),
        generated.opens(),
        "open-set definition and subbase generation disagree"
    );
    direct
}

/// A sequence or a finite directed net.
#[derive(Debug, Clone, Copy)]
pub enum Net<'a> {
    Sequence(&'a SequenceSpec),
    Directed(&'a DirectedNet),
}

impl<'a> From<&'a SequenceSpec> for Net<'a> {
    fn from(s: &'a SequenceSpec) -> Self {
        Net::Sequence(s)
    }
}

impl<'a> From<&'a DirectedNet> for Net<'a> {
    fn from(d: &'a DirectedNet) -> Self {
        Net::Directed(d)
    }
}

impl Net<'_> {
    fn n(&self) -> usize {
        match self {
            Net::Sequence(s) => s.space().n(),
            Net::Directed(d) => d.space().n(),
        }
    }
}

fn out_of_reach() -> Error {
    Error::Invariant("sequence rules exceed the analyzable modulus".into())
}

fn finite_positions(s: &SequenceSpec, points: u16) -> Result<bool> {
    s.positions_of(points)
        .analyze()
        .map(|p| p.is_finite())
        .ok_or_else(out_of_reach)
}

/// Whether there is `a0` such that `pred(point(a))` holds for all `a ≥ a0`.
fn net_eventually(net: &DirectedNet, pred: impl Fn(usize) -> bool) -> bool {
    let m = net.len();
    (0..m).any(|a0| {
        (0..m)
            .filter(|&a| net.le(a0, a))
            .all(|a| pred(net.point(a)))
    })
}

fn converges(net: Net<'_>, q: &QuasiFamily, x: usize, far: impl Fn(usize) -> u16) -> Result<bool> {
    q.space().check_point(x)?;
    if net.n() != q.n() {
        return Err(Error::SpaceMismatch {
            expected: q.n(),
            found: net.n(),
        });
    }
    for i in 0..q.index_count() {
        let bad = far(i);
        let ok = match net {
            Net::Sequence(s) => finite_positions(s, bad)?,
            Net::Directed(d) => net_eventually(d, |p| bad & (1 << p) == 0),
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// For every index, `d_i(x, x_α) = 0` eventually.
pub fn right_converges<'a>(net: impl Into<Net<'a>>, q: &QuasiFamily, x: usize) -> Result<bool> {
    converges(net.into(), q, x, |i| q.far_from(i, x))
}

/// For every index, `d_i(x_α, x) = 0` eventually.
pub fn left_converges<'a>(net: impl Into<Net<'a>>, q: &QuasiFamily, x: usize) -> Result<bool> {
    converges(net.into(), q, x, |i| q.far_to(i, x))
}

fn cauchy(net: Net<'_>, q: &QuasiFamily, right: bool) -> Result<bool> {
    if net.n() != q.n() {
        return Err(Error::SpaceMismatch {
            expected: q.n(),
            found: net.n(),
        });
    }
    let dist = |i: usize, a: usize, b: usize| {
        if right {
            q.d(i, a, b)
        } else {
            q.d(i, b, a)
        }
    };
    match net {
        Net::Sequence(s) => {
            // every recurrent point shows up again after every other one
            let recurrent = s.recurrent_points().ok_or_else(out_of_reach)?;
            Ok((0..q.index_count()).all(|i| {
                members(recurrent).all(|a| members(recurrent).all(|b| dist(i, a, b) == 0))
            }))
        }
        Net::Directed(d) => {
            let m = d.len();
            Ok((0..q.index_count()).all(|i| {
                (0..m).any(|a0| {
                    (0..m).filter(|&a| d.le(a0, a)).all(|a| {
                        (0..m)
                            .filter(|&b| d.le(a, b))
                            .all(|b| dist(i, d.point(a), d.point(b)) == 0)
                    })
                })
            }))
        }
    }
}

/// For every index there is `α0` with `d_i(x_α, x_β) = 0` whenever `β ≥ α ≥ α0`.
pub fn is_right_cauchy<'a>(net: impl Into<Net<'a>>, q: &QuasiFamily) -> Result<bool> {
    cauchy(net.into(), q, true)
}

/// Mirror of [`is_right_cauchy`] with `d_i(x_β, x_α)`.
pub fn is_left_cauchy<'a>(net: impl Into<Net<'a>>, q: &QuasiFamily) -> Result<bool> {
    cauchy(net.into(), q, false)
}

/// Convergence of `d(x, x_k)` to the zero vector of `{0,1}^I` in the product
/// topology: every coordinate vanishes on the points the sequence keeps
/// returning to.
pub fn product_converges(s: &SequenceSpec, q: &QuasiFamily, x: usize) -> Result<bool> {
    s.space().same_size(q.space())?;
    q.space().check_point(x)?;
    let recurrent = s.recurrent_points().ok_or_else(out_of_reach)?;
    Ok(members(recurrent).all(|p| (0..q.index_count()).all(|i| q.d(i, x, p) == 0)))
}

/// For every codomain index `j` some domain index `i` has
/// `d_i(x,y) = 0 ⇒ p_j(f(x),f(y)) = 0` for all `y`.
pub fn metric_continuous_at(
    f: &PointMap,
    domain: &QuasiFamily,
    codomain: &QuasiFamily,
    x: usize,
) -> Result<bool> {
    f.domain().same_size(domain.space())?;
    f.codomain().same_size(codomain.space())?;
    domain.space().check_point(x)?;
    let fx = f.apply(x);
    Ok((0..codomain.index_count()).all(|j| {
        let target = f.preimage(codomain.ball_mask(j, fx));
        (0..domain.index_count()).any(|i| domain.ball_mask(i, x) & !target == 0)
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeparationMode {
    /// Some index separates the pair in one direction or the other.
    T0Unordered,
    /// Each direction is separated by some index.
    T1Amended,
    /// `∃i: d_i(x,y) = 1` for both ordered pairs.
    LiteralR3,
    /// `∃i: d_i(x,y) = 1 and d_i(y,x) = 1`.
    LiteralR4,
    /// `∃i,j: d_i(x,y) = d_i(y,x) = d_j(x,y) = d_j(y,x) = 1`.
    LiteralR5,
}

impl SeparationMode {
    pub const ALL: [SeparationMode; 5] = [
        SeparationMode::T0Unordered,
        SeparationMode::T1Amended,
        SeparationMode::LiteralR3,
        SeparationMode::LiteralR4,
        SeparationMode::LiteralR5,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SeparationMode::T0Unordered => "t0_unordered",
            SeparationMode::T1Amended => "t1_amended",
            SeparationMode::LiteralR3 => "literal_r3",
            SeparationMode::LiteralR4 => "literal_r4",
            SeparationMode::LiteralR5 => "literal_r5",
        }
    }
}

impl FromStr for SeparationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SeparationMode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::UnknownMode(s.to_string()))
    }
}

impl fmt::Display for SeparationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The separation condition of `mode` for the distinct pair `{x, y}`.
pub fn sep_metric_pair(q: &QuasiFamily, mode: SeparationMode, x: usize, y: usize) -> bool {
    let idx = 0..q.index_count();
    let one = |i: usize, a: usize, b: usize| q.d(i, a, b) == 1;
    match mode {
        SeparationMode::T0Unordered => idx.clone().any(|i| one(i, x, y) || one(i, y, x)),
        SeparationMode::T1Amended => {
            idx.clone().any(|i| one(i, x, y)) && idx.clone().any(|j| one(j, y, x))
        }
        SeparationMode::LiteralR3 => [(x, y), (y, x)]
            .into_iter()
            .all(|(a, b)| idx.clone().any(|i| one(i, a, b))),
        // j is unconstrained in this condition
        SeparationMode::LiteralR4 => [(x, y), (y, x)]
            .into_iter()
            .all(|(a, b)| idx.clone().any(|i| one(i, a, b) && one(i, b, a))),
        SeparationMode::LiteralR5 => [(x, y), (y, x)].into_iter().all(|(a, b)| {
            idx.clone().any(|i| {
                idx.clone()
                    .any(|j| one(i, a, b) && one(i, b, a) && one(j, a, b) && one(j, b, a))
            })
        }),
    }
}

/// The condition of `mode` over every distinct pair.
pub fn sep_metric(q: &QuasiFamily, mode: SeparationMode) -> bool {
    first_unseparated_pair(q, mode).is_none()
}

pub fn first_unseparated_pair(q: &QuasiFamily, mode: SeparationMode) -> Option<(usize, usize)> {
    let n = q.n();
    (0..n)
        .flat_map(|x| (x + 1..n).map(move |y| (x, y)))
        .find(|&(x, y)| !sep_metric_pair(q, mode, x, y))
}

/// The pair's full ball intersections are disjoint.
pub fn balls_disjoint(q: &QuasiFamily, x: usize, y: usize) -> bool {
    q.core_ball(x) & q.core_ball(y) == 0
}

/// Three-valued outcome for decisions that may be out of reach.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Holds,
    Fails,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexDensityReport {
    pub index: String,
    pub deviation: IndexSetDescriptor,
    pub density: DensityValue,
    pub empirical: Vec<PrefixDensity>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatReport {
    pub decision: Decision,
    pub per_index: Vec<IndexDensityReport>,
}

/// Statistical convergence to `x` with prefix densities on [`DENSITY_LADDER`].
pub fn stat_converges(s: &SequenceSpec, q: &QuasiFamily, x: usize) -> Result<StatReport> {
    stat_converges_on(s, q, x, &DENSITY_LADDER)
}

/// For each index the deviation set `{k : d_i(x, x_k) = 1}` must have
/// natural density zero. Empirical densities at each `ladder` length are
/// computed by direct evaluation of the sequence.
pub fn stat_converges_on(
    s: &SequenceSpec,
    q: &QuasiFamily,
    x: usize,
    ladder: &[u64],
) -> Result<StatReport> {
    s.space().same_size(q.space())?;
    q.space().check_point(x)?;
    let horizon = ladder.iter().copied().max().unwrap_or(0);
    let values = s.prefix(horizon);

    let mut per_index = Vec::with_capacity(q.index_count());
    let mut decision = Decision::Holds;
    for (i, label) in q.indices().iter().enumerate() {
        let bad = q.far_from(i, x);
        let deviation = s.positions_of(bad);
        let density = natural_density(&deviation);
        match density.is_zero() {
            Some(true) => {}
            Some(false) => decision = Decision::Fails,
            None if decision == Decision::Holds => decision = Decision::Undecided,
            None => {}
        }
        let mut empirical = Vec::with_capacity(ladder.len());
        let mut count = 0u64;
        let mut seen = 0u64;
        let mut steps: Vec<u64> = ladder.to_vec();
        steps.sort_unstable();
        for n in steps {
            for &p in &values[seen as usize..n as usize] {
                if bad & (1 << p) != 0 {
                    count += 1;
                }
            }
            seen = n;
            empirical.push(PrefixDensity {
                n,
                count,
                density: count as f64 / n as f64,
            });
        }
        per_index.push(IndexDensityReport {
            index: label.clone(),
            deviation,
            density,
            empirical,
        });
    }
    Ok(StatReport {
        decision,
        per_index,
    })
}
