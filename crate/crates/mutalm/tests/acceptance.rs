//! Acceptance suite: one PASS/FAIL line per criterion.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use mutalm::formats::{kill_matrix_to_json, parse_kill_matrix};
use mutalm::pipeline;
use mutalm_core::demo::FRACTION;
use mutalm_core::factory::{
    canonicalize, normalized_stream, substitute, GenerateOptions, MutantOrder, SpliceVerdict,
};
use mutalm_core::kill::KillMatrix;
use mutalm_core::lang::{parse, render, validate, SourceUnit};
use mutalm_core::predict::{Prediction, StubPredictor};
use mutalm_core::seeding::{seed_candidates, seeding_targets, Scheme};
use mutalm_core::stats::{vargha_delaney_a12, wilcoxon_paired_one_sided, PairedSample};
use mutalm_core::targets::{collect_targets, mask_target, NodeKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn canonical(src: &str) -> SourceUnit {
    let u = parse(src).unwrap();
    parse(&render(&u)).unwrap()
}

fn program_with(fields: &str, stmt: &str) -> String {
    format!(
        "class Node {{ Node next; Node prev; int val; }}\n\
         class L {{ void add(Node n) {{ }} void push(Node n) {{ }} }}\n\
         class A {{\n    {fields}\n    void f() {{\n        {stmt}\n    }}\n}}\n"
    )
}

struct Row {
    category: &'static str,
    kind: NodeKind,
    occurrence: usize,
    fields: &'static str,
    stmt: &'static str,
    expression: &'static str,
    masked: &'static str,
    token: &'static str,
    mutant: &'static str,
}

const ROWS: [Row; 9] = [
    Row { category: "literals", kind: NodeKind::Literal, occurrence: 0, fields: "int res;",
          stmt: "res = res + 10;", expression: "res + 10", masked: "res + <mask>", token: "0", mutant: "res + 0" },
    Row { category: "identifiers", kind: NodeKind::Identifier, occurrence: 1, fields: "int res; int a;",
          stmt: "res = res + 10;", expression: "res + 10", masked: "<mask> + 10", token: "a", mutant: "a + 10" },
    Row { category: "binary expressions", kind: NodeKind::BinaryOperator, occurrence: 0, fields: "boolean ok; boolean a; boolean b;",
          stmt: "ok = a && b;", expression: "a && b", masked: "a <mask> b", token: "||", mutant: "a || b" },
    Row { category: "unary expressions", kind: NodeKind::UnaryOperator, occurrence: 0, fields: "int res; int a;",
          stmt: "res = --a;", expression: "--a", masked: "<mask>a", token: "++", mutant: "++a" },
    Row { category: "assignments", kind: NodeKind::AssignmentOperator, occurrence: 0, fields: "int sum; int current;",
          stmt: "sum += current;", expression: "sum += current", masked: "sum <mask>= current", token: "-", mutant: "sum -= current" },
    Row { category: "object fields", kind: NodeKind::ObjectField, occurrence: 0, fields: "Node node;",
          stmt: "node = node.next;", expression: "node.next", masked: "node.<mask>", token: "prev", mutant: "node.prev" },
    Row { category: "method calls", kind: NodeKind::MethodName, occurrence: 0, fields: "L list; Node node;",
          stmt: "list.add(node);", expression: "list.add(node)", masked: "list.<mask>(node)", token: "push", mutant: "list.push(node)" },
    Row { category: "array access", kind: NodeKind::ArrayIndex, occurrence: 0, fields: "int res; int[] arr; int index;",
          stmt: "res = arr[index + 1];", expression: "arr[index + 1]", masked: "arr[<mask>]", token: "index", mutant: "arr[index]" },
    Row { category: "static type references", kind: NodeKind::StaticTypeRef, occurrence: 0, fields: "int res;",
          stmt: "res = Math.random() * 10;", expression: "Math.random() * 10", masked: "<mask>.random() * 10", token: "Random", mutant: "Random.random() * 10" },
];

fn node_category_examples() -> Outcome {
    let mut matched = 0;
    let mut notes = Vec::new();
    for row in &ROWS {
        let unit = canonical(&program_with(row.fields, row.stmt));
        let original = render(&unit);
        let target = collect_targets(&unit)
            .into_iter()
            .filter(|t| t.kind == row.kind)
            .nth(row.occurrence)
            .ok_or_else(|| format!("{}: no {} target", row.category, row.kind.as_str()))?;
        let seq = mask_target(&unit, &target).map_err(|e| format!("{}: {e}", row.category))?;
        ensure(seq.line_text().contains(row.masked), || {
            format!("{}: masked line {:?}", row.category, seq.line_text())
        })?;
        let p = Prediction {
            token_text: row.token.into(),
            score: 1.0,
            rank: 1,
        };
        let verdict = substitute(&unit, &seq, &p);
        let text = verdict
            .text()
            .ok_or_else(|| format!("{}: mutant does not parse", row.category))?;
        let expected_stmt = row.stmt.replacen(row.expression, row.mutant, 1);
        let expected = original.replacen(row.stmt, &expected_stmt, 1);
        ensure(text == expected, || format!("{}: got\n{text}", row.category))?;
        if matches!(verdict, SpliceVerdict::Invalid(_)) {
            notes.push(format!("{} mutant does not validate", row.category));
        }
        matched += 1;
    }
    Ok(format!("{matched}/9 exact; {}", notes.join(", ")))
}

fn masking_enumeration() -> Outcome {
    let unit = canonical(&program_with("int res; int a; int b;", "res = a + b;"));
    let got: Vec<String> = collect_targets(&unit)
        .iter()
        .map(|t| mask_target(&unit, t).unwrap().line_text())
        .collect();
    let expected = [
        "<mask> = a + b;",
        "res <mask>= a + b;",
        "res = <mask> + b;",
        "res = a <mask> b;",
        "res = a + <mask>;",
    ];
    ensure(got == expected, || format!("{got:?}"))?;
    Ok("5 masked sequences in order".into())
}

struct GenCond {
    text: String,
    vars: Vec<String>,
    null_check: bool,
}

fn random_condition(rng: &mut ChaCha8Rng, ni: usize, nb: usize) -> GenCond {
    let f = |rng: &mut ChaCha8Rng| format!("f{}", rng.random_range(0..ni));
    let choice = rng.random_range(0..if nb > 0 { 5 } else { 4 });
    match choice {
        0 => {
            let v = f(rng);
            GenCond { text: format!("{v} > {}", rng.random_range(0..3)), vars: vec![v], null_check: false }
        }
        1 => {
            let (a, b) = (f(rng), f(rng));
            let vars = if a == b { vec![a.clone()] } else { vec![a.clone(), b.clone()] };
            GenCond { text: format!("{a} == {b}"), vars, null_check: false }
        }
        2 => {
            let v = f(rng);
            GenCond { text: format!("{v} != p"), vars: vec![v, "p".into()], null_check: false }
        }
        3 => GenCond { text: "o == null".into(), vars: vec!["o".into()], null_check: true },
        _ => {
            let v = format!("b{}", rng.random_range(0..nb));
            GenCond { text: v.clone(), vars: vec![v], null_check: false }
        }
    }
}

fn seeding_counts() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let type_of = |v: &str| match v.as_bytes()[0] {
        b'f' | b'p' => "int",
        b'b' => "boolean",
        _ => "C",
    };
    let mut sites = 0;
    for _ in 0..200 {
        let ni = rng.random_range(1..4);
        let nb = rng.random_range(0..3);
        let n = rng.random_range(1..6);
        let conds: Vec<GenCond> = (0..n).map(|_| random_condition(&mut rng, ni, nb)).collect();
        let mut src = String::from("class C {\n");
        let mut scope = Vec::new();
        for i in 0..ni {
            src.push_str(&format!("    int f{i};\n"));
            scope.push(format!("f{i}"));
        }
        for i in 0..nb {
            src.push_str(&format!("    boolean b{i};\n"));
            scope.push(format!("b{i}"));
        }
        src.push_str("    C o;\n");
        scope.push("o".into());
        scope.push("p".into());
        for (k, c) in conds.iter().enumerate() {
            src.push_str(&format!(
                "    void m{k}(int p) {{\n        if ({}) {{\n            f0 = 1;\n        }}\n    }}\n",
                c.text
            ));
        }
        src.push_str("}\n");
        let unit = parse(&src).map_err(|e| format!("{e}\n{src}"))?;
        ensure(validate(&unit).ok, || src.clone())?;
        let live: Vec<&GenCond> = conds.iter().filter(|c| !c.null_check).collect();
        let targets = seeding_targets(&unit);
        ensure(targets.len() == live.len(), || format!("targets in\n{src}"))?;
        for (site, c) in targets.iter().zip(&live) {
            let s_e: BTreeSet<&str> = conds
                .iter()
                .filter(|o| !o.null_check && o.text != c.text)
                .map(|o| o.text.as_str())
                .collect();
            let mut scheme2 = 0;
            for v in &c.vars {
                let ty = type_of(v);
                let rel = if ty == "int" { 6 } else { 2 };
                let peers = scope.iter().filter(|u| *u != v && type_of(u) == ty).count();
                scheme2 += peers * rel * 2 * 2;
            }
            let got = seed_candidates(&unit, site);
            let s1 = got.iter().filter(|s| s.scheme == Scheme::ClassConditions).count();
            let s2 = got.iter().filter(|s| s.scheme == Scheme::Variables).count();
            ensure(s1 == 8 * s_e.len() && s2 == scheme2, || {
                format!("{s1}/{} and {s2}/{scheme2} for {:?} in\n{src}", 8 * s_e.len(), c.text)
            })?;
            sites += 1;
        }
    }
    Ok(format!("200 random fixtures, {sites} targets, zero mismatches"))
}

fn filtering_invariants() -> Outcome {
    let unit = parse(FRACTION).unwrap();
    let set = pipeline::generate(&unit, "fraction.mj", &StubPredictor, &GenerateOptions::default())
        .map_err(|e| e.to_string())?;
    let original = normalized_stream(&render(&canonicalize(&unit)));
    let mut seen = BTreeSet::new();
    let mut violations = Vec::new();
    for m in &set.mutants {
        if !parse(&m.rendered_source).is_ok_and(|u| validate(&u).ok) {
            violations.push(format!("{} does not validate", m.id));
        }
        let s = normalized_stream(&m.rendered_source);
        if s == original {
            violations.push(format!("{} equals the original", m.id));
        }
        if !seen.insert(s) {
            violations.push(format!("{} is a duplicate", m.id));
        }
    }
    for order in [MutantOrder::First, MutantOrder::Second] {
        let s = set.stats.order(order);
        if s.predicted != s.exact + s.duplicate + s.non_compilable + s.emitted {
            violations.push(format!("{} order stats do not conserve: {s:?}", order.as_str()));
        }
    }
    ensure(violations.is_empty(), || violations.join("; "))?;
    Ok(format!(
        "{} mutants ({} first, {} second order), zero violations",
        set.mutants.len(),
        set.stats.first.emitted,
        set.stats.second.emitted
    ))
}

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_mutalm")
}

fn mutalm(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(bin()).args(args).output().map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "mutalm {}: {}\n{}",
            args.join(" "),
            out.status,
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok(out.stdout)
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn fraction_bug() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = p(dir.path());
    mutalm(&["mutate", p(&fixture("fraction.mj")), "--out", out])?;
    mutalm(&[
        "execute",
        "--mutants", p(&dir.path().join("mutants.json")),
        "--suite", p(&fixture("fraction_suite.json")),
        "--buggy", p(&fixture("fraction_buggy.mj")),
        "--out", out,
    ])?;
    let set: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("mutants.json")).unwrap()).unwrap();
    let km = parse_kill_matrix(
        &fs::read_to_string(dir.path().join("kill_matrix.json")).unwrap(),
        "kill_matrix.json",
    )
    .map_err(|e| e.to_string())?;
    ensure(!km.revealing_tests.is_empty(), || "no revealing tests".into())?;
    let mut per_kind: BTreeMap<String, usize> = BTreeMap::new();
    let mut examples: BTreeMap<&str, String> = BTreeMap::new();
    for (i, m) in set["mutants"].as_array().unwrap().iter().enumerate() {
        let reveals = km.killers(i).into_iter().any(|t| km.is_revealing(t));
        if !reveals {
            continue;
        }
        let kind = m["kind"].as_str().unwrap();
        let group = match kind {
            "binary-operator" => "binary-operator",
            "literal" => "literal",
            "class-conditions" | "variables" => "condition seeding",
            _ => continue,
        };
        *per_kind.entry(group.to_string()).or_insert(0) += 1;
        examples.entry(group).or_insert_with(|| {
            format!("line {} {} -> {}", m["line"], m["original"], m["replacement"])
        });
    }
    let missing: Vec<&str> = ["binary-operator", "literal", "condition seeding"]
        .into_iter()
        .filter(|g| !per_kind.contains_key(*g))
        .collect();
    ensure(missing.is_empty(), || format!("no revealing kill via {missing:?}; {per_kind:?}"))?;
    Ok(format!(
        "revealing tests {:?}; {}",
        km.revealing_tests,
        per_kind
            .iter()
            .map(|(k, n)| format!("{k} {n} (e.g. {})", examples[k.as_str()]))
            .collect::<Vec<_>>()
            .join(", ")
    ))
}

fn two_by_two() -> KillMatrix {
    KillMatrix {
        approach: "x".into(),
        mutant_ids: vec!["1:literal:1:00000000".into(), "2:literal:1:00000000".into()],
        test_names: vec!["t1".into(), "t2".into()],
        kills: vec![vec![true, false], vec![false, true]],
        revealing_tests: vec!["t2".into()],
    }
}

/// Expected first-reveal effort over every equally likely analysis order,
/// for matrices whose mutants sit on distinct lines and have one killer each.
fn enumerated_effort(m: &KillMatrix) -> f64 {
    fn perms(items: Vec<usize>) -> Vec<Vec<usize>> {
        if items.len() <= 1 {
            return vec![items];
        }
        let mut out = Vec::new();
        for i in 0..items.len() {
            let mut rest = items.clone();
            let x = rest.remove(i);
            for mut p in perms(rest) {
                p.insert(0, x);
                out.push(p);
            }
        }
        out
    }
    let orders = perms((0..m.mutant_ids.len()).collect());
    let mut total = 0.0;
    for order in &orders {
        let mut killed = vec![false; m.mutant_ids.len()];
        let mut effort = 0;
        for &i in order {
            if killed[i] {
                continue;
            }
            effort += 1;
            let t = m.kills[i].iter().position(|k| *k).unwrap();
            for (j, row) in m.kills.iter().enumerate() {
                killed[j] |= row[t];
            }
            if m.is_revealing(t) {
                break;
            }
        }
        total += effort as f64;
    }
    total / orders.len() as f64
}

fn simulation_oracle() -> Outcome {
    let m = two_by_two();
    let exact = enumerated_effort(&m);
    ensure(exact == 1.5, || format!("enumeration gave {exact}"))?;
    let start = Instant::now();
    let r = pipeline::run_campaign("b", &m, 10_000, 2, 0);
    let secs = start.elapsed().as_secs_f64();
    let mean = r.mean_first_reveal.unwrap_or(f64::NAN);
    ensure((mean - exact).abs() <= 0.05, || format!("Monte Carlo mean {mean}"))?;
    ensure(r.detection_ratio == 1.0, || format!("detection ratio {}", r.detection_ratio))?;
    ensure(secs < 5.0, || format!("took {secs:.2} s"))?;
    Ok(format!("exact 1.5, Monte Carlo {mean:.4} over 10000 runs, ratio 1.0, {secs:.2} s"))
}

fn midranks(v: &[f64]) -> Vec<f64> {
    v.iter()
        .map(|a| {
            let below = v.iter().filter(|b| *b < a).count() as f64;
            let equal = v.iter().filter(|b| *b == a).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect()
}

fn sign_enumeration_p(x: &[f64], y: &[f64]) -> f64 {
    let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).filter(|d| *d != 0.0).collect();
    if d.is_empty() {
        return 1.0;
    }
    let ranks = midranks(&d.iter().map(|v| v.abs()).collect::<Vec<_>>());
    let observed: f64 = d.iter().zip(&ranks).filter(|(v, _)| **v > 0.0).map(|(_, r)| r).sum();
    let n = d.len();
    let mut hits = 0u64;
    for mask in 0u32..(1 << n) {
        let w: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
        if w >= observed - 1e-9 {
            hits += 1;
        }
    }
    hits as f64 / (1u64 << n) as f64
}

fn pairwise_a12(x: &[f64], y: &[f64]) -> f64 {
    let mut wins = 0.0;
    for a in x {
        for b in y {
            wins += match a.partial_cmp(b).unwrap() {
                std::cmp::Ordering::Greater => 1.0,
                std::cmp::Ordering::Equal => 0.5,
                std::cmp::Ordering::Less => 0.0,
            };
        }
    }
    wins / (x.len() * y.len()) as f64
}

fn statistics_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let draw = |rng: &mut ChaCha8Rng, n: usize| -> Vec<f64> {
        (0..n).map(|_| rng.random_range(0..=10) as f64 / 10.0).collect()
    };
    let mut worst_p: f64 = 0.0;
    let mut samples = 0;
    for n in 1..=12 {
        for _ in 0..60 {
            let (x, y) = (draw(&mut rng, n), draw(&mut rng, n));
            let s = PairedSample { labels: (0..n).map(|i| i.to_string()).collect(), x: x.clone(), y: y.clone() };
            let got = wilcoxon_paired_one_sided(&s).map_err(|e| e.to_string())?.p_value;
            worst_p = worst_p.max((got - sign_enumeration_p(&x, &y)).abs());
            samples += 1;
        }
    }
    ensure(worst_p < 1e-12, || format!("Wilcoxon off by {worst_p:e}"))?;
    let mut worst_a: f64 = 0.0;
    let mut worst_sum: f64 = 0.0;
    for _ in 0..1000 {
        let (m, n) = (rng.random_range(1..25), rng.random_range(1..25));
        let (x, y) = (draw(&mut rng, m), draw(&mut rng, n));
        let a = vargha_delaney_a12(&x, &y).map_err(|e| e.to_string())?;
        let b = vargha_delaney_a12(&y, &x).map_err(|e| e.to_string())?;
        worst_a = worst_a.max((a - pairwise_a12(&x, &y)).abs());
        worst_sum = worst_sum.max((a + b - 1.0).abs());
    }
    ensure(worst_a < 1e-12, || format!("A12 off by {worst_a:e}"))?;
    ensure(worst_sum < 1e-12, || format!("A12 complement off by {worst_sum:e}"))?;
    Ok(format!(
        "{samples} Wilcoxon samples (max |d| {worst_p:.1e}), 1000 A12 pairs (max |d| {worst_a:.1e}, complement {worst_sum:.1e})"
    ))
}

/// Ten bugs over a five-test suite where `t4` reveals the bug. In the first
/// seven bugs only second-order mutants are killed by `t4`.
fn synthetic_corpus() -> Vec<(KillMatrix, KillMatrix)> {
    let mut out = Vec::new();
    for bug in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + bug);
        let second_only = bug < 7;
        let tests: Vec<String> = (0..5).map(|t| format!("t{t}")).collect();
        let lines = rng.random_range(6..11u32);
        let mut counter = 0u32;
        let row = |rng: &mut ChaCha8Rng, reveal: f64| -> Vec<bool> {
            let mut r: Vec<bool> = (0..4).map(|_| rng.random_bool(0.35)).collect();
            r.push(rng.random_bool(reveal));
            r
        };
        let mut conv = KillMatrix {
            approach: "conventional".into(),
            test_names: tests.clone(),
            revealing_tests: vec!["t4".into()],
            ..KillMatrix::default()
        };
        for line in 1..=lines {
            for _ in 0..rng.random_range(1..4) {
                counter += 1;
                conv.mutant_ids.push(format!("{line}:literal:1:{counter:08x}"));
                let r = row(&mut rng, if second_only { 0.0 } else { 0.3 });
                conv.kills.push(r);
            }
        }
        let mut full = conv.clone();
        full.approach = "full".into();
        let mut revealing_second = 0;
        for line in 1..=lines {
            if !rng.random_bool(0.6) {
                continue;
            }
            for _ in 0..rng.random_range(1..4) {
                counter += 1;
                full.mutant_ids.push(format!("{line}:class-conditions:1:{counter:08x}"));
                let r = row(&mut rng, 0.4);
                revealing_second += usize::from(r[4]);
                full.kills.push(r);
            }
        }
        if revealing_second == 0 {
            counter += 1;
            full.mutant_ids.push(format!("1:variables:1:{counter:08x}"));
            full.kills.push(vec![false, false, false, false, true]);
        }
        out.push((full, conv));
    }
    out
}

fn additive_effect() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut args: Vec<String> = vec!["compare".into()];
    for (i, (full, conv)) in synthetic_corpus().iter().enumerate() {
        for (name, m) in [("full", full), ("conventional", conv)] {
            let path = dir.path().join(format!("bug{i}-{name}.json"));
            fs::write(&path, kill_matrix_to_json(m)).unwrap();
            args.push("--matrix".into());
            args.push(format!("bug{i}={}", path.display()));
        }
    }
    args.extend(["--repetitions", "100", "--effort-cap", "auto", "--seed", "0", "--out"].map(String::from));
    args.push(p(dir.path()).into());
    let argv: Vec<&str> = args.iter().map(String::as_str).collect();
    mutalm(&argv)?;
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    let pair = report["pairs"]
        .as_array()
        .unwrap()
        .iter()
        .find(|q| q["a"] == "full" && q["b"] == "conventional")
        .ok_or("no full/conventional pair")?;
    let (mean_full, mean_conv) = (pair["mean_a"].as_f64().unwrap(), pair["mean_b"].as_f64().unwrap());
    let pv = pair["p_value"].as_f64().unwrap();
    let mut ratio: BTreeMap<(String, String), f64> = BTreeMap::new();
    for c in report["campaigns"].as_array().unwrap() {
        ratio.insert(
            (c["bug"].as_str().unwrap().into(), c["approach"].as_str().unwrap().into()),
            c["detection_ratio"].as_f64().unwrap(),
        );
    }
    for bug in 0..7 {
        let b = format!("bug{bug}");
        let (f, c) = (ratio[&(b.clone(), "full".into())], ratio[&(b.clone(), "conventional".into())]);
        ensure(f >= c, || format!("{b}: full {f} < conventional {c}"))?;
    }
    ensure(mean_full > mean_conv, || format!("mean full {mean_full} <= conventional {mean_conv}"))?;
    ensure(pv < 0.05, || format!("p = {pv}"))?;
    Ok(format!(
        "mean detection full {mean_full:.3} vs conventional {mean_conv:.3}, p = {pv:.4}, A12 = {:.3}",
        pair["a12"].as_f64().unwrap()
    ))
}

fn run_demo(dir: &Path, jobs: &str) -> Result<BTreeMap<String, Vec<u8>>, String> {
    let out = p(dir);
    let mut files = BTreeMap::new();
    files.insert(
        "stdout-mutate".into(),
        mutalm(&["mutate", p(&fixture("fraction.mj")), "--seed", "3", "--jobs", jobs, "--out", out])?,
    );
    files.insert(
        "stdout-execute".into(),
        mutalm(&[
            "execute",
            "--mutants", p(&dir.join("mutants.json")),
            "--suite", p(&fixture("fraction_suite.json")),
            "--buggy", p(&fixture("fraction_buggy.mj")),
            "--jobs", jobs,
            "--out", out,
        ])?,
    );
    files.insert(
        "stdout-simulate".into(),
        mutalm(&[
            "simulate",
            "--matrix", p(&dir.join("kill_matrix.json")),
            "--seed", "3",
            "--jobs", jobs,
            "--out", out,
        ])?,
    );
    for entry in fs::read_dir(dir).map_err(|e| e.to_string())? {
        let path = entry.map_err(|e| e.to_string())?.path();
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        files.insert(name, fs::read(&path).map_err(|e| e.to_string())?);
    }
    Ok(files)
}

fn determinism() -> Outcome {
    let base = tempfile::tempdir().map_err(|e| e.to_string())?;
    let start = Instant::now();
    let a = run_demo(&base.path().join("a"), "1")?;
    let secs = start.elapsed().as_secs_f64();
    let b = run_demo(&base.path().join("b"), "1")?;
    let c = run_demo(&base.path().join("c"), "8")?;
    for (label, other) in [("second run", &b), ("--jobs 8", &c)] {
        ensure(a.keys().eq(other.keys()), || format!("{label}: different file sets"))?;
        for (name, bytes) in &a {
            ensure(other[name] == *bytes, || format!("{label}: {name} differs"))?;
        }
    }
    ensure(secs < 60.0, || format!("demo pipeline took {secs:.1} s"))?;
    Ok(format!("{} outputs byte-identical across runs and --jobs 1/8; demo pipeline {secs:.1} s", a.len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("node-category mutation examples", node_category_examples),
        ("masking enumeration", masking_enumeration),
        ("condition-seeding counts", seeding_counts),
        ("filtering invariants", filtering_invariants),
        ("zero-numerator fraction bug", fraction_bug),
        ("simulation oracle", simulation_oracle),
        ("statistics oracles", statistics_oracles),
        ("additive-mutation effect", additive_effect),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let result = catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|e| Err(e.downcast_ref::<String>().cloned().unwrap_or_else(|| "panicked".into())));
        match result {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
