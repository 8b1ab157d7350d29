use std::io::{self, Read, Write};

use anyhow::{anyhow, bail, Context, Result};
use serde_json::{json, Value};

use qtopo::continuity_space::{check_positives, check_value_semigroup};
use qtopo::document::{parse_raw, qmetric_to_string, topology_to_string, Document, RawDocument};
use qtopo::qmetric::{
    balls_disjoint, check_quasifamily, is_left_cauchy, is_right_cauchy, left_converges,
    product_converges, right_converges, sep_metric_pair, stat_converges, to_topology, Decision,
    SeparationMode,
};
use qtopo::representation::{
    canonical_family, find_discrepancy, roundtrip as round_trip, Predicate,
};
use qtopo::topology::{
    check_topology, converges_topologically, enumerate_preorders, enumerate_topologies,
};
use qtopo::{DirectedNet, PointSpace, QuasiFamily, SequenceSpec, Topology};

use crate::verdict::{Status, Verdict};
use crate::{CheckKind, EnumKind, Method, Mode};

fn read_input(path: &str) -> Result<String> {
    if path == "-" {
        let mut text = String::new();
        io::stdin()
            .read_to_string(&mut text)
            .context("reading standard input")?;
        Ok(text)
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {path}"))
    }
}

fn load_raw(path: &str) -> Result<RawDocument> {
    parse_raw(&read_input(path)?).with_context(|| format!("in {path}"))
}

fn load(path: &str) -> Result<Document> {
    load_raw(path)?
        .check()
        .with_context(|| format!("in {path}"))
}

fn emit(v: &Verdict) -> Result<()> {
    println!("{}", serde_json::to_string(&v.to_json())?);
    Ok(())
}

fn doc_value(text: &str) -> Value {
    serde_json::from_str(text).expect("serialized documents are JSON")
}

fn report(v: Verdict, strict: bool) -> Result<i32> {
    emit(&v)?;
    Ok(v.exit_code(strict))
}

fn violations_verdict(op: &'static str, kind: &str, list: Value) -> Result<Verdict> {
    let count = list.as_array().map_or(0, Vec::len);
    if count == 0 {
        return Ok(Verdict::pass(op).with("kind", json!(kind)));
    }
    Ok(
        Verdict::fail(op, format!("{count} {kind} axiom violation(s)"))
            .with_witness(list[0].clone())
            .with("kind", json!(kind))
            .with("violations", list),
    )
}

pub fn check(path: &str, kind: Option<CheckKind>) -> Result<i32> {
    let raw = load_raw(path)?;
    let op = "check";
    let kind = kind.or(match &raw {
        RawDocument::Topology(_) => Some(CheckKind::Topology),
        RawDocument::Qmetric(_) => Some(CheckKind::Qmetric),
        RawDocument::Semigroup(s) if s.positives.is_some() => Some(CheckKind::Positives),
        RawDocument::Semigroup(_) => Some(CheckKind::Semigroup),
        _ => None,
    });
    let v = match (kind, &raw) {
        (Some(CheckKind::Topology), RawDocument::Topology(t)) => {
            let (space, family) = t.family()?;
            violations_verdict(
                op,
                "topology",
                serde_json::to_value(check_topology(&space, &family))?,
            )?
        }
        (Some(CheckKind::Qmetric), RawDocument::Qmetric(q)) => {
            let family = q.family_unchecked()?;
            violations_verdict(
                op,
                "qmetric",
                serde_json::to_value(check_quasifamily(&family))?,
            )?
        }
        (Some(CheckKind::Semigroup), RawDocument::Semigroup(s)) => violations_verdict(
            op,
            "semigroup",
            serde_json::to_value(check_value_semigroup(&s.semigroup_unchecked()?))?,
        )?,
        (Some(CheckKind::Positives), RawDocument::Semigroup(s)) => {
            let semigroup = s.semigroup_unchecked()?;
            let p = s
                .positives_for(&semigroup)?
                .ok_or_else(|| anyhow!("the semigroup document lists no positives"))?;
            let sv = check_value_semigroup(&semigroup);
            if sv.is_empty() {
                violations_verdict(
                    op,
                    "positives",
                    serde_json::to_value(check_positives(&semigroup, &p))?,
                )?
            } else {
                violations_verdict(op, "semigroup", serde_json::to_value(sv)?)?
            }
        }
        (Some(k), _) => bail!(qtopo::Error::WrongKind {
            expected: match k {
                CheckKind::Topology => "topology",
                CheckKind::Qmetric => "qmetric",
                _ => "semigroup",
            },
            found: raw.kind()
        }),
        (None, _) => {
            let kind_name = raw.kind();
            match raw.check() {
                Ok(_) => Verdict::pass(op).with("kind", json!(kind_name)),
                Err(e @ qtopo::Error::Invariant(_)) => {
                    Verdict::fail(op, e.to_string()).with("kind", json!(kind_name))
                }
                Err(e) => return Err(e.into()),
            }
        }
    };
    report(v, false)
}

pub fn canonical(path: &str) -> Result<i32> {
    let t = load(path)?.into_topology()?;
    println!("{}", qmetric_to_string(&canonical_family(&t).family));
    Ok(0)
}

pub fn topology(path: &str) -> Result<i32> {
    let q = load(path)?.into_qmetric()?;
    println!("{}", topology_to_string(&to_topology(&q)));
    Ok(0)
}

pub fn roundtrip(path: Option<&str>, n: Option<usize>) -> Result<i32> {
    let topologies = match (path, n) {
        (Some(p), None) => vec![load(p)?.into_topology()?],
        (None, Some(k)) => {
            if !(1..=4).contains(&k) {
                bail!(qtopo::Error::OutOfRange {
                    what: "n",
                    value: k,
                    range: "1..=4"
                });
            }
            enumerate_topologies(k)?
        }
        _ => bail!("give either a topology file or --n"),
    };
    let mut equal = 0usize;
    let mut first_failure = None;
    for t in &topologies {
        let r = round_trip(t);
        if r.equal {
            equal += 1;
        } else if first_failure.is_none() {
            first_failure = Some((t.clone(), r));
        }
    }
    let summary = format!("{} topologies, {} equal", topologies.len(), equal);
    let v = match first_failure {
        None => Verdict::pass("roundtrip"),
        Some((t, r)) => Verdict::fail("roundtrip", format!("round trip differs: {summary}"))
            .with_witness(doc_value(&topology_to_string(&t)))
            .with("missing", json!(r.missing))
            .with("extra", json!(r.extra)),
    };
    report(
        v.with("checked", json!(topologies.len()))
            .with("equal", json!(equal))
            .with("summary", json!(summary)),
        false,
    )
}

/// The family and its topology, lifting whichever one the file holds.
fn family_and_topology(doc: Document) -> Result<(QuasiFamily, Topology)> {
    match doc {
        Document::Topology(t) => Ok((canonical_family(&t).family, t)),
        Document::QMetric(q) => {
            let t = to_topology(&q);
            Ok((q, t))
        }
        other => bail!(qtopo::Error::WrongKind {
            expected: "topology or qmetric",
            found: other.kind()
        }),
    }
}

type PairTest<'a> = Box<dyn Fn(usize, usize) -> bool + 'a>;

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |x| (x + 1..n).map(move |y| (x, y)))
}

pub fn separation(path: &str, method: Method) -> Result<i32> {
    let (q, t) = family_and_topology(load(path)?)?;
    let n = q.n();
    let direct: [(&str, PairTest); 3] = [
        ("t0", Box::new(|x, y| t.t0_separates(x, y))),
        ("t1", Box::new(|x, y| t.t1_separates(x, y))),
        ("t2", Box::new(|x, y| t.t2_separates(x, y))),
    ];
    let literal = match method {
        Method::LiteralR3 => Some((SeparationMode::LiteralR3, 0)),
        Method::LiteralR4 => Some((SeparationMode::LiteralR4, 1)),
        Method::LiteralR5 => Some((SeparationMode::LiteralR5, 2)),
        _ => None,
    };
    let v = if let Some((mode, axis)) = literal {
        let (name, direct_pred) = &direct[axis];
        let mut rows = Vec::new();
        let mut discrepancy = None;
        for (x, y) in pairs(n) {
            let lit = sep_metric_pair(&q, mode, x, y);
            let dir = direct_pred(x, y);
            if lit != dir && discrepancy.is_none() {
                discrepancy = Some((x, y, lit, dir));
            }
            rows.push(json!({"pair": [x, y], "condition": lit, "direct": dir}));
        }
        let condition = pairs(n).all(|(x, y)| sep_metric_pair(&q, mode, x, y));
        let holds = pairs(n).all(|(x, y)| direct_pred(x, y));
        let base = match discrepancy {
            None => Verdict::pass("separation"),
            Some((x, y, lit, dir)) => Verdict::fail(
                "separation",
                format!("{mode} is {lit} but direct {name} is {dir} on pair ({x}, {y})"),
            )
            .with_witness(json!({"family": doc_value(&qmetric_to_string(&q)), "pair": [x, y]})),
        };
        base.with("method", json!(mode.name()))
            .with("compared_with", json!(format!("direct-{name}")))
            .with("condition", json!(condition))
            .with(name, json!(holds))
            .with("pairs", json!(rows))
    } else {
        let metric: [PairTest; 3] = [
            Box::new(|x, y| sep_metric_pair(&q, SeparationMode::T0Unordered, x, y)),
            Box::new(|x, y| sep_metric_pair(&q, SeparationMode::T1Amended, x, y)),
            Box::new(|x, y| balls_disjoint(&q, x, y)),
        ];
        let mut v = Verdict::pass("separation").with(
            "method",
            json!(if method == Method::Direct {
                "direct"
            } else {
                "metric"
            }),
        );
        let mut mismatch = None;
        for (axis, (name, dir)) in direct.iter().enumerate() {
            let pred = |x, y| {
                if method == Method::Direct {
                    dir(x, y)
                } else {
                    metric[axis](x, y)
                }
            };
            let failing = pairs(n).find(|&(x, y)| !pred(x, y));
            let direct_failing = pairs(n).find(|&(x, y)| !dir(x, y));
            if failing.is_none() != direct_failing.is_none() && mismatch.is_none() {
                mismatch = Some(*name);
            }
            let entry = match failing {
                None => json!({"holds": true}),
                Some((x, y)) => json!({"holds": false, "unseparated": [x, y]}),
            };
            v = v.with(name, entry);
        }
        if let Some(name) = mismatch {
            v.status = Status::Fail;
            v.reason = Some(format!("metric {name} verdict differs from the topology"));
            v.witness = Some(doc_value(&qmetric_to_string(&q)));
        }
        v
    };
    report(v, false)
}

enum Walk {
    Sequence(SequenceSpec),
    Net(DirectedNet),
}

fn parse_point(raw: &str, q: &QuasiFamily) -> Result<usize> {
    let x = match raw.parse::<usize>() {
        Ok(x) => x,
        Err(_) => q
            .space()
            .labels()
            .and_then(|l| l.iter().position(|s| s == raw))
            .ok_or_else(|| anyhow!("unknown point `{raw}`"))?,
    };
    q.space().check_point(x)?;
    Ok(x)
}

/// An index whose deviation set reaches past `horizon`, for failure reports.
fn deviation_witness(
    s: &SequenceSpec,
    q: &QuasiFamily,
    far: impl Fn(usize) -> u16,
    horizon: u64,
) -> Option<Value> {
    (0..q.index_count()).find_map(|i| {
        let profile = s.positions_of(far(i)).analyze()?;
        let k = profile.member_beyond(horizon)?;
        Some(json!({"index": q.indices()[i], "position": k, "value": s.value_at(k)}))
    })
}

pub fn converge(
    seq_path: &str,
    space_path: &str,
    point: Option<&str>,
    mode: Mode,
    strict: bool,
    horizon: u64,
) -> Result<i32> {
    let walk = match load(seq_path)? {
        Document::Sequence(s) => Walk::Sequence(s),
        Document::Net(d) => Walk::Net(d),
        other => bail!(qtopo::Error::WrongKind {
            expected: "sequence or net",
            found: other.kind()
        }),
    };
    let (q, t) = family_and_topology(load(space_path)?)?;
    let target = match (point, mode) {
        (Some(p), _) => Some(parse_point(p, &q)?),
        (None, Mode::Cauchy) => None,
        (None, _) => bail!("--point is required for this mode"),
    };
    let op = "converge";
    let mode_name = format!("{mode:?}").to_lowercase();
    let seq = match &walk {
        Walk::Sequence(s) => Some(s),
        Walk::Net(_) => None,
    };
    let need_seq = || seq.ok_or_else(|| anyhow!("{mode_name} mode needs a sequence document"));

    let v = match mode {
        Mode::Right | Mode::Left => {
            let x = target.expect("point checked");
            let holds = match (&walk, mode) {
                (Walk::Sequence(s), Mode::Right) => right_converges(s, &q, x)?,
                (Walk::Sequence(s), _) => left_converges(s, &q, x)?,
                (Walk::Net(d), Mode::Right) => right_converges(d, &q, x)?,
                (Walk::Net(d), _) => left_converges(d, &q, x)?,
            };
            if holds {
                Verdict::pass(op)
            } else {
                let mut v = Verdict::fail(op, format!("does not {mode_name} converge to {x}"));
                if let Some(s) = seq {
                    let w = if mode == Mode::Right {
                        deviation_witness(s, &q, |i| q.far_from(i, x), horizon)
                    } else {
                        deviation_witness(s, &q, |i| q.far_to(i, x), horizon)
                    };
                    if let Some(w) = w {
                        v = v.with_witness(w);
                    }
                }
                v
            }
        }
        Mode::Cauchy => {
            let (right, left) = match &walk {
                Walk::Sequence(s) => (is_right_cauchy(s, &q)?, is_left_cauchy(s, &q)?),
                Walk::Net(d) => (is_right_cauchy(d, &q)?, is_left_cauchy(d, &q)?),
            };
            let v = if right {
                Verdict::pass(op)
            } else {
                Verdict::fail(op, "not right Cauchy")
            };
            v.with("left_cauchy", json!(left))
        }
        Mode::Topological => {
            let x = target.expect("point checked");
            if converges_topologically(need_seq()?, &t, x, horizon)? {
                Verdict::pass(op)
            } else {
                Verdict::fail(
                    op,
                    format!("leaves the minimal neighborhood of {x} infinitely often"),
                )
            }
        }
        Mode::Product => {
            let x = target.expect("point checked");
            if product_converges(need_seq()?, &q, x)? {
                Verdict::pass(op)
            } else {
                Verdict::fail(op, format!("d({x}, x_k) does not converge to zero"))
            }
        }
        Mode::Statistical => {
            let x = target.expect("point checked");
            let r = stat_converges(need_seq()?, &q, x)?;
            let v = match r.decision {
                Decision::Holds => Verdict::pass(op),
                Decision::Fails => {
                    let bad = r
                        .per_index
                        .iter()
                        .find(|e| e.density.is_zero() == Some(false))
                        .expect("a failing index");
                    Verdict::fail(
                        op,
                        format!(
                            "deviation set of index `{}` has positive density",
                            bad.index
                        ),
                    )
                    .with_witness(serde_json::to_value(bad)?)
                }
                Decision::Undecided => {
                    Verdict::undecided(op, "some deviation density is out of reach")
                }
            };
            v.with("per_index", serde_json::to_value(&r.per_index)?)
        }
    };
    let mut v = v.with("mode", json!(mode_name));
    if let Some(x) = target {
        v = v.with("point", json!(x));
    }
    report(v, strict)
}

pub fn enumerate(n: usize, kind: EnumKind, count_only: bool) -> Result<i32> {
    let lines: Vec<String> = match kind {
        EnumKind::Topologies => enumerate_topologies(n)?
            .iter()
            .map(topology_to_string)
            .collect(),
        EnumKind::Preorders => enumerate_preorders(n)?
            .iter()
            .map(|p| {
                let full = (1u16 << n) - 1;
                let rows = p.rows().iter().map(|&r| !r & full).collect();
                let space = PointSpace::new(n).expect("n checked");
                let q = QuasiFamily::from_rows(space, vec!["le".into()], vec![rows])
                    .expect("preorders are quasimetrics");
                qmetric_to_string(&q)
            })
            .collect(),
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    if count_only {
        writeln!(out, "{}", lines.len())?;
    } else {
        for line in lines {
            writeln!(out, "{line}")?;
        }
    }
    Ok(0)
}

pub fn discrepancy(left: &str, right: &str, n: usize, indices: usize) -> Result<i32> {
    let a: Predicate = left.parse()?;
    let b: Predicate = right.parse()?;
    let found = find_discrepancy(a, b, n, indices)?;
    let v = match found {
        None => Verdict::pass("discrepancy"),
        Some(d) => Verdict::fail(
            "discrepancy",
            format!(
                "{a} is {} but {b} is {} on pair ({}, {})",
                d.left, d.right, d.pair.0, d.pair.1
            ),
        )
        .with_witness(doc_value(&qmetric_to_string(&d.family)))
        .with("pair", json!([d.pair.0, d.pair.1]))
        .with("left_value", json!(d.left))
        .with("right_value", json!(d.right)),
    };
    report(
        v.with("left", json!(a.name()))
            .with("right", json!(b.name()))
            .with("n", json!(n))
            .with("indices", json!(indices)),
        false,
    )
}
