//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::io::Write;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use serde_json::Value;

use qtopo::continuity_space::{
    check_positives, check_value_semigroup, lift_quasifamily, to_topology_kopperman, PositiveSet,
    PositivesViolation, SemigroupViolation, ValueSemigroup,
};
use qtopo::index_set::IndexSetDescriptor;
use qtopo::qmetric::{
    check_quasifamily, metric_continuous_at, product_converges, right_converges, sep_metric,
    sep_metric_pair, stat_converges, to_topology, Decision, DensityValue, QuasiViolation,
    SeparationMode,
};
use qtopo::representation::{canonical_family, d_u, p_u, roundtrip};
use qtopo::topology::{
    check_topology, converges_topologically, enumerate_preorders, enumerate_topologies,
    enumerate_topologies_direct, generate_from_subbase, is_continuous, TopologyViolation,
};
use qtopo::{PointMap, PointSpace, Preorder, QuasiFamily, Rule, SequenceSpec, Topology};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took <= limit, || format!("took {took:?}, limit {limit:?}"))
}

const COUNTS: [usize; 4] = [1, 4, 29, 355];

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut total = 0;
    for n in 1..=4 {
        let all = enumerate_topologies(n).map_err(|e| e.to_string())?;
        ensure(all.len() == COUNTS[n - 1], || {
            format!("n={n}: {} topologies", all.len())
        })?;
        for t in &all {
            let back = to_topology(&canonical_family(t).family);
            ensure(back == *t && roundtrip(t).equal, || {
                format!("round trip differs for {t:?}")
            })?;
        }
        total += all.len();
    }
    within(start, Duration::from_secs(5))?;
    Ok(format!(
        "{total} topologies round-trip exactly in {:?}",
        start.elapsed()
    ))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    for n in 1..=4 {
        let direct = enumerate_topologies_direct(n).map_err(|e| e.to_string())?;
        let preorders = enumerate_preorders(n).map_err(|e| e.to_string())?;
        ensure(
            direct.len() == COUNTS[n - 1] && preorders.len() == COUNTS[n - 1],
            || {
                format!(
                    "n={n}: {} topologies vs {} preorders",
                    direct.len(),
                    preorders.len()
                )
            },
        )?;
        let images: BTreeSet<Preorder> = direct
            .iter()
            .map(Topology::specialization_preorder)
            .collect();
        let all: BTreeSet<Preorder> = preorders.iter().cloned().collect();
        ensure(images.len() == direct.len(), || {
            format!("n={n}: specialization map not injective")
        })?;
        ensure(images == all, || {
            format!("n={n}: specialization map not onto")
        })?;
        for t in &direct {
            ensure(t.specialization_preorder().alexandrov() == *t, || {
                format!("n={n}: preorder does not recover {t:?}")
            })?;
        }
    }
    within(start, Duration::from_secs(10))?;
    Ok("1, 4, 29, 355 on both sides; specialization map is a bijection".into())
}

fn balls_open_and_generate(q: &QuasiFamily) -> Result<(), String> {
    let t = to_topology(q);
    let mut subbase = Vec::new();
    for i in 0..q.index_count() {
        for x in 0..q.n() {
            let b = q.ball_mask(i, x);
            ensure(t.is_open(b), || format!("ball ({i},{x}) not open in {q:?}"))?;
            subbase.push(q.space().set(b).unwrap());
        }
    }
    let g = generate_from_subbase(q.space(), &subbase).map_err(|e| e.to_string())?;
    ensure(g == t, || format!("subbase topology differs for {q:?}"))
}

fn criterion_3() -> Outcome {
    let mut checked = 0;
    for n in 1..=4 {
        for t in enumerate_topologies(n).unwrap() {
            balls_open_and_generate(&canonical_family(&t).family)?;
            checked += 1;
        }
    }
    for n in 1..=3 {
        let ps = enumerate_preorders(n).unwrap();
        for a in &ps {
            balls_open_and_generate(&QuasiFamily::from_preorders(&[a]).unwrap())?;
            checked += 1;
            for b in &ps {
                balls_open_and_generate(&QuasiFamily::from_preorders(&[a, b]).unwrap())?;
                checked += 1;
            }
        }
    }
    Ok(format!(
        "{checked} families: balls open, subbase topology equal"
    ))
}

fn criterion_4() -> Outcome {
    let mut points = 0;
    for n in 1..=4 {
        for t in enumerate_topologies(n).unwrap() {
            for u in t.open_sets() {
                for x in 0..n {
                    for y in 0..n {
                        let d = d_u(&t, &u, x, y).map_err(|e| e.to_string())?;
                        let p = p_u(&t, &u, x, y).map_err(|e| e.to_string())?;
                        ensure(d == p, || format!("d_U != p_U at U={u}, ({x},{y})"))?;
                        points += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{points} evaluations agree"))
}

fn periodic_sequences(n: usize) -> Vec<SequenceSpec> {
    let space = PointSpace::new(n).unwrap();
    let mut out = Vec::new();
    for plen in 0..=2usize {
        for clen in 1..=2usize {
            let len = plen + clen;
            for mut code in 0..n.pow(len as u32) {
                let mut pts = Vec::with_capacity(len);
                for _ in 0..len {
                    pts.push(code % n);
                    code /= n;
                }
                let (prefix, cycle) = pts.split_at(plen);
                out.push(SequenceSpec::eventually_periodic(space.clone(), prefix, cycle).unwrap());
            }
        }
    }
    out
}

fn criterion_5() -> Outcome {
    let mut cases = 0;
    for n in 1..=3 {
        let seqs = periodic_sequences(n);
        for t in enumerate_topologies(n).unwrap() {
            let q = canonical_family(&t).family;
            for s in &seqs {
                for x in 0..n {
                    let r = right_converges(s, &q, x).map_err(|e| e.to_string())?;
                    let tc = converges_topologically(s, &t, x, 64).map_err(|e| e.to_string())?;
                    let p = product_converges(s, &q, x).map_err(|e| e.to_string())?;
                    ensure(r == tc && tc == p, || {
                        format!(
                            "disagreement: right={r} topological={tc} product={p} for {s:?} -> {x}"
                        )
                    })?;
                    cases += 1;
                }
            }
        }
    }
    Ok(format!("{cases} cases, zero disagreements"))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut cases = 0;
    for n in 1..=3 {
        for m in 1..=3 {
            let dom = enumerate_topologies(n).unwrap();
            let cod = enumerate_topologies(m).unwrap();
            let maps = PointMap::all(dom[0].space(), cod[0].space());
            for a in &dom {
                let qa = canonical_family(a).family;
                for b in &cod {
                    let qb = canonical_family(b).family;
                    for f in &maps {
                        let top = is_continuous(f, a, b).map_err(|e| e.to_string())?;
                        let met = (0..n).try_fold(true, |acc, x| {
                            metric_continuous_at(f, &qa, &qb, x).map(|c| acc && c)
                        });
                        let met = met.map_err(|e| e.to_string())?;
                        ensure(top == met, || {
                            format!("map {:?} disagrees: {top} vs {met}", f.values())
                        })?;
                        cases += 1;
                    }
                }
            }
        }
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!(
        "{cases} map/topology-pair cases, zero disagreements"
    ))
}

fn run_cli(args: &[&str], stdin: Option<&str>) -> (i32, String) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_qtopo"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    {
        let mut pipe = child.stdin.take().unwrap();
        if let Some(text) = stdin {
            pipe.write_all(text.as_bytes()).unwrap();
        }
    }
    let out = child.wait_with_output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
    )
}

fn criterion_7() -> Outcome {
    let mut families = 0;
    for n in 1..=4 {
        for t in enumerate_topologies(n).unwrap() {
            let q = canonical_family(&t).family;
            for x in 0..n {
                for y in x + 1..n {
                    ensure(
                        sep_metric_pair(&q, SeparationMode::T0Unordered, x, y)
                            == t.t0_separates(x, y),
                        || format!("t0 pair ({x},{y}) differs on {t:?}"),
                    )?;
                    ensure(
                        sep_metric_pair(&q, SeparationMode::T1Amended, x, y)
                            == t.t1_separates(x, y),
                        || format!("t1 pair ({x},{y}) differs on {t:?}"),
                    )?;
                }
            }
            ensure(
                sep_metric(&q, SeparationMode::T0Unordered) == t.is_t0(),
                || format!("T0 differs on {t:?}"),
            )?;
            ensure(
                sep_metric(&q, SeparationMode::T1Amended) == t.is_t1(),
                || format!("T1 differs on {t:?}"),
            )?;
            if n >= 2 {
                for mode in [SeparationMode::LiteralR4, SeparationMode::LiteralR5] {
                    ensure(!sep_metric(&q, mode), || {
                        format!("{mode} satisfied by canonical {t:?}")
                    })?;
                    // no index of a canonical family separates a pair both ways
                    for i in 0..q.index_count() {
                        for x in 0..n {
                            for y in 0..n {
                                ensure(q.d(i, x, y) * q.d(i, y, x) == 0, || {
                                    format!("symmetric 1 at index {i} of {t:?}")
                                })?;
                            }
                        }
                    }
                }
            }
            families += 1;
        }
    }
    let (code, out) = run_cli(
        &[
            "discrepancy",
            "--left",
            "literal_r5",
            "--right",
            "direct-t2",
            "--n",
            "3",
            "--indices",
            "1",
        ],
        None,
    );
    ensure(code == 1, || format!("discrepancy exit {code}"))?;
    let v: Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    let expected: Value = serde_json::json!([[[0, 1, 0], [1, 0, 0], [1, 1, 0]]]);
    ensure(
        v["witness"]["matrices"] == expected && v["witness"]["n"] == 3,
        || format!("unexpected witness {}", v["witness"]),
    )?;
    let w = qtopo::parse_document(&v["witness"].to_string())
        .and_then(|d| d.into_qmetric())
        .map_err(|e| e.to_string())?;
    let tw = to_topology(&w);
    ensure(
        sep_metric_pair(&w, SeparationMode::LiteralR5, 0, 1) && !tw.t2_separates(0, 1),
        || "witness does not re-verify".into(),
    )?;
    Ok(format!(
        "{families} topologies; documented 3-point witness emitted and re-verified"
    ))
}

fn criterion_8() -> Outcome {
    let q = canonical_family(&Topology::sierpinski()).family;
    let space = PointSpace::new(2).unwrap();
    let squares = SequenceSpec::new(
        space.clone(),
        1,
        vec![Rule {
            set: IndexSetDescriptor::Squares,
            point: 0,
        }],
    )
    .unwrap();
    let r = stat_converges(&squares, &q, 1).map_err(|e| e.to_string())?;
    ensure(r.decision == Decision::Holds, || {
        format!("decision {:?}", r.decision)
    })?;
    let idx = q.position("[1]").unwrap();
    let entry = &r.per_index[idx];
    ensure(
        matches!(entry.density, DensityValue::ZeroByBound { .. }),
        || format!("density {:?}", entry.density),
    )?;
    let last = entry.empirical.last().unwrap();
    ensure(
        last.n == 1_000_000 && last.count == 1000 && last.density == 0.001,
        || format!("empirical at 10^6: {last:?}"),
    )?;
    ensure(
        entry
            .empirical
            .windows(2)
            .all(|w| w[1].density <= w[0].density),
        || "empirical densities increase".into(),
    )?;
    ensure(!right_converges(&squares, &q, 1).unwrap(), || {
        "right convergence holds".into()
    })?;

    let residues = SequenceSpec::new(
        space,
        1,
        vec![Rule {
            set: IndexSetDescriptor::residues(3, [0]).unwrap(),
            point: 0,
        }],
    )
    .unwrap();
    let r = stat_converges(&residues, &q, 1).map_err(|e| e.to_string())?;
    ensure(r.decision == Decision::Fails, || {
        format!("residue decision {:?}", r.decision)
    })?;
    ensure(
        r.per_index[idx].density
            == DensityValue::ExactRational {
                numerator: 1,
                denominator: 3,
            },
        || format!("residue density {:?}", r.per_index[idx].density),
    )?;
    Ok("squares: zero density, 0.001 at 10^6, right fails; residues: exactly 1/3".into())
}

fn criterion_9() -> Outcome {
    for k in 1..=3 {
        let s = ValueSemigroup::boolean_cube(k).map_err(|e| e.to_string())?;
        ensure(check_value_semigroup(&s).is_empty(), || {
            format!("cube {k} fails")
        })?;
        ensure(
            check_positives(&s, &PositiveSet::full(&s)).is_empty(),
            || format!("full positives fail for k={k}"),
        )?;
    }
    let mut families = 0;
    for n in 1..=3 {
        let ps = enumerate_preorders(n).unwrap();
        let mut check = |q: QuasiFamily| -> Result<(), String> {
            let cs = lift_quasifamily(&q).map_err(|e| e.to_string())?;
            ensure(to_topology_kopperman(&cs) == to_topology(&q), || {
                format!("lift differs on {q:?}")
            })?;
            families += 1;
            Ok(())
        };
        for a in &ps {
            check(QuasiFamily::from_preorders(&[a]).unwrap())?;
            for b in &ps {
                check(QuasiFamily::from_preorders(&[a, b]).unwrap())?;
            }
        }
    }

    let xor = ValueSemigroup::new_unchecked(
        vec!["0".into(), "1".into()],
        vec![vec![0, 1], vec![1, 0]],
        0,
        1,
    )
    .unwrap();
    let v = check_value_semigroup(&xor);
    ensure(
        v.contains(&SemigroupViolation::Absorbing { a: 1 }) && v.iter().all(|w| w.replays_on(&xor)),
        || format!("xor violations {v:?}"),
    )?;
    for k in 1..=3 {
        let s = ValueSemigroup::boolean_cube(k).unwrap();
        let nonzero: Vec<usize> = (1..s.len()).collect();
        let p = PositiveSet::new(&s, &nonzero).unwrap();
        let v = check_positives(&s, &p);
        ensure(
            !v.is_empty() && v.iter().all(|w| w.replays_on(&s, &p)),
            || format!("nonzero positives accepted for k={k}"),
        )?;
        let expected_axiom = if k == 1 { "separation" } else { "meet_closure" };
        ensure(v.iter().any(|w| w.axiom() == expected_axiom), || {
            format!("k={k}: expected {expected_axiom}, got {v:?}")
        })?;
        if k == 1 {
            ensure(
                v.contains(&PositivesViolation::Separation { a: 1, b: 0 }),
                || format!("{v:?}"),
            )?;
        }
    }
    Ok(format!(
        "cubes valid; {families} lifted families agree; mutants rejected"
    ))
}

fn exit_matrix() -> Result<usize, String> {
    let dir = std::env::temp_dir().join(format!("qtopo-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let file = |name: &str, text: &str| {
        let p = dir.join(name);
        std::fs::write(&p, text).unwrap();
        p.to_string_lossy().into_owned()
    };
    let sier = file(
        "s.json",
        r#"{"kind":"topology","n":2,"opens":[[],[1],[0,1]]}"#,
    );
    let bad_q = file(
        "q.json",
        r#"{"kind":"qmetric","n":3,"indices":["d"],"matrices":[[[0,0,1],[0,0,0],[0,0,0]]]}"#,
    );
    let bad_t = file(
        "t.json",
        r#"{"kind":"topology","n":3,"opens":[[],[0],[1],[0,1,2]]}"#,
    );
    let trunc = file("x.json", r#"{"kind":"topology","n":2,"op"#);
    let squares = file(
        "sq.json",
        r#"{"kind":"sequence","n":2,"default":1,"rules":[{"set":{"type":"squares"},"point":0}]}"#,
    );
    let far = file(
        "u.json",
        r#"{"kind":"sequence","n":2,"default":1,"rules":[{"set":{"type":"union","of":[{"type":"residues","mod":1048573,"residues":[0]},{"type":"residues","mod":1048571,"residues":[0]}]},"point":0}]}"#,
    );
    let missing = dir.join("absent.json").to_string_lossy().into_owned();
    let sier_text = std::fs::read_to_string(&sier).unwrap();

    let cases: Vec<(Vec<&str>, Option<&str>, i32)> = vec![
        (vec!["check", &sier], None, 0),
        (vec!["check", "-"], Some(&sier_text), 0),
        (vec!["check", &bad_q], None, 1),
        (vec!["check", &bad_t], None, 1),
        (vec!["check", &trunc], None, 2),
        (vec!["check", &missing], None, 2),
        (vec!["check", &sier, "--kind", "qmetric"], None, 2),
        (vec!["canonical", &sier], None, 0),
        (vec!["canonical", &bad_t], None, 2),
        (vec!["topology", &bad_q], None, 2),
        (vec!["roundtrip", "--n", "2"], None, 0),
        (vec!["roundtrip", "--n", "9"], None, 2),
        (vec!["separation", &sier, "--method", "metric"], None, 0),
        (vec!["separation", &trunc], None, 2),
        (
            vec![
                "converge",
                &squares,
                &sier,
                "--point",
                "1",
                "--mode",
                "statistical",
            ],
            None,
            0,
        ),
        (
            vec![
                "converge", &squares, &sier, "--point", "1", "--mode", "right",
            ],
            None,
            1,
        ),
        (
            vec![
                "converge",
                &far,
                &sier,
                "--point",
                "1",
                "--mode",
                "statistical",
            ],
            None,
            0,
        ),
        (
            vec![
                "converge",
                &far,
                &sier,
                "--point",
                "1",
                "--mode",
                "statistical",
                "--strict",
            ],
            None,
            1,
        ),
        (
            vec![
                "converge", &squares, &sier, "--point", "7", "--mode", "right",
            ],
            None,
            2,
        ),
        (vec!["enumerate", "--n", "1", "--count-only"], None, 0),
        (vec!["enumerate", "--n", "6"], None, 2),
        (
            vec![
                "discrepancy",
                "--left",
                "t0_unordered",
                "--right",
                "direct-t0",
                "--n",
                "3",
                "--indices",
                "2",
            ],
            None,
            0,
        ),
        (
            vec!["discrepancy", "--left", "bogus", "--right", "direct-t0"],
            None,
            2,
        ),
        (
            vec![
                "discrepancy",
                "--left",
                "literal_r3",
                "--right",
                "direct-t0",
                "--n",
                "2",
            ],
            None,
            1,
        ),
        (vec!["no-such-command"], None, 2),
    ];
    for (args, stdin, want) in &cases {
        let (code, _) = run_cli(args, *stdin);
        ensure(code == *want, || {
            format!("`qtopo {}` exited {code}, expected {want}", args.join(" "))
        })?;
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(cases.len())
}

fn criterion_10() -> Outcome {
    let space = PointSpace::new(3).unwrap();
    let nontransitive = QuasiFamily::new_unchecked(
        space.clone(),
        vec!["d".into()],
        vec![vec![vec![0, 0, 1], vec![0, 0, 0], vec![0, 0, 0]]],
    )
    .unwrap();
    let v = check_quasifamily(&nontransitive);
    ensure(
        v.contains(&QuasiViolation::Triangle {
            index: "d".into(),
            x: 0,
            y: 1,
            z: 2,
        }) && v.iter().all(|w| w.replays_on(&nontransitive)),
        || format!("triangle witness missing: {v:?}"),
    )?;

    let diagonal = QuasiFamily::new_unchecked(
        PointSpace::new(2).unwrap(),
        vec!["d".into()],
        vec![vec![vec![0, 0], vec![0, 1]]],
    )
    .unwrap();
    let v = check_quasifamily(&diagonal);
    ensure(
        v.first()
            == Some(&QuasiViolation::Reflexivity {
                index: "d".into(),
                x: 1,
            })
            && v.iter().all(|w| w.replays_on(&diagonal)),
        || format!("reflexivity witness missing: {v:?}"),
    )?;

    let family: Vec<_> = [0b000u16, 0b001, 0b010, 0b111]
        .iter()
        .map(|&m| space.set(m).unwrap())
        .collect();
    let v = check_topology(&space, &family);
    ensure(
        v.iter()
            .any(|w| matches!(w, TopologyViolation::UnionEscape { union, .. } if union == "[0,1]"))
            && v.iter().all(|w| w.replays_on(&space, &family)),
        || format!("union escape missing: {v:?}"),
    )?;
    let cases = exit_matrix()?;
    Ok(format!(
        "seeded violations caught with witnesses; {cases} CLI exit-code cases"
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("round trip of every topology, n <= 4", criterion_1),
        ("dual enumeration and specialization bijection", criterion_2),
        ("balls open, subbase topology equal", criterion_3),
        ("d_U equals p_U pointwise", criterion_4),
        (
            "right, topological and product convergence agree",
            criterion_5,
        ),
        ("metric and topological continuity agree", criterion_6),
        (
            "separation characterizations and literal witness",
            criterion_7,
        ),
        (
            "statistical convergence of the squares sequence",
            criterion_8,
        ),
        ("continuity spaces over {0,1}^I", criterion_9),
        ("mutant detection and CLI exit codes", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let took = start.elapsed();
        match outcome {
            Ok(msg) => println!("criterion {:>2}: PASS  {name}: {msg} ({took:.2?})", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2}: FAIL  {name}: {msg} ({took:.2?})", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
