use std::collections::BTreeSet;

use mutalm_core::demo::FRACTION;
use mutalm_core::factory::{
    canonicalize, generate, normalized_stream, GenerateOptions, MutantKind, MutantOrder, MutantSet,
};
use mutalm_core::lang::{parse, render, tokenize, validate};
use mutalm_core::predict::StubPredictor;
use mutalm_core::targets::NodeKind;

fn demo(opts: &GenerateOptions) -> MutantSet {
    let unit = parse(FRACTION).unwrap();
    generate(&unit, "fraction", &StubPredictor, opts).unwrap()
}

fn lexemes(text: &str) -> Vec<String> {
    tokenize(text).unwrap().tokens.into_iter().map(|t| t.lexeme).collect()
}

#[test]
fn filtering_invariants() {
    let set = demo(&GenerateOptions::default());
    let original = render(&canonicalize(&parse(FRACTION).unwrap()));
    let original_lex = lexemes(&original);
    let mut seen = BTreeSet::new();
    for m in &set.mutants {
        let u = parse(&m.rendered_source).expect("mutant parses");
        assert!(validate(&u).ok, "{}", m.id);
        let lex = lexemes(&m.rendered_source);
        assert_ne!(lex, original_lex, "{} equals the original", m.id);
        assert!(seen.insert(lex), "{} duplicates another mutant", m.id);
        assert_ne!(m.original_lexeme, m.replacement_lexeme);
        assert!(m.prediction_rank >= 1 && m.prediction_rank <= 5);
    }
    for order in [MutantOrder::First, MutantOrder::Second] {
        let s = set.stats.order(order);
        assert!(s.conserved(), "{s:?}");
        assert_eq!(
            s.emitted,
            set.mutants.iter().filter(|m| m.order == order).count()
        );
    }
    let first_second: Vec<MutantOrder> = set.mutants.iter().map(|m| m.order).collect();
    let boundary = first_second.iter().position(|o| *o == MutantOrder::Second).unwrap();
    assert!(first_second[boundary..].iter().all(|o| *o == MutantOrder::Second));
    let ids: BTreeSet<&str> = set.mutants.iter().map(|m| m.id.as_str()).collect();
    assert_eq!(ids.len(), set.mutants.len());
}

#[test]
fn demo_covers_most_categories() {
    let set = demo(&GenerateOptions::default());
    let kinds: BTreeSet<NodeKind> = set
        .mutants
        .iter()
        .filter_map(|m| match m.kind {
            MutantKind::Node(k) => Some(k),
            MutantKind::Seeded(_) => None,
        })
        .collect();
    assert!(kinds.len() >= 6, "{kinds:?}");
}

#[test]
fn quota_keeps_a_prefix() {
    let full = demo(&GenerateOptions {
        seed: 5,
        ..GenerateOptions::default()
    });
    for q in [1, 17, 200] {
        let part = demo(&GenerateOptions {
            seed: 5,
            quota: Some(q),
            ..GenerateOptions::default()
        });
        assert_eq!(part.mutants[..], full.mutants[..q]);
        assert!(part.stats.first.conserved() && part.stats.second.conserved());
        let beyond = part.stats.first.beyond_quota + part.stats.second.beyond_quota;
        assert_eq!(beyond, full.mutants.len() - q);
    }
}

#[test]
fn one_per_line_sweeps() {
    let set = demo(&GenerateOptions {
        seeding: false,
        ..GenerateOptions::default()
    });
    let lines: BTreeSet<u32> = set.mutants.iter().map(|m| m.line).collect();
    let head: BTreeSet<u32> = set.mutants[..lines.len()].iter().map(|m| m.line).collect();
    assert_eq!(head, lines);
    assert!(set.stats.second.predicted == 0 && set.stats.seeded_candidates == 0);
}

#[test]
fn seed_changes_order_only() {
    let a = demo(&GenerateOptions::default());
    let b = demo(&GenerateOptions {
        seed: 99,
        ..GenerateOptions::default()
    });
    assert_eq!(a, demo(&GenerateOptions::default()));
    assert_ne!(a.mutants, b.mutants);
    let keys = |s: &MutantSet| -> BTreeSet<String> {
        s.mutants.iter().map(|m| normalized_stream(&m.rendered_source)).collect()
    };
    assert_eq!(keys(&a), keys(&b));
}
