//! Kill matrices: which tests distinguish which mutants from the original.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::factory::MutantSet;
use crate::interp::{check_test, run_test, TestCase, TestOutcome};
use crate::lang::{parse, validate, SourceUnit};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct KillMatrix {
    pub approach: String,
    pub mutant_ids: Vec<String>,
    pub test_names: Vec<String>,
    /// `kills[m][t]`.
    pub kills: Vec<Vec<bool>>,
    pub revealing_tests: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KillError {
    #[error("test {test}: {problem}")]
    SuiteInvalid { test: String, problem: String },
    #[error("mutant {0} does not parse or validate")]
    MutantInvalid(String),
    #[error("buggy version does not parse or validate")]
    BuggyInvalid,
    #[error("malformed kill matrix: {0}")]
    Malformed(String),
}

impl KillMatrix {
    /// Dimensions agree, names are unique, revealing tests are known.
    pub fn check(&self) -> Result<(), KillError> {
        let bad = |s: String| Err(KillError::Malformed(s));
        if self.kills.len() != self.mutant_ids.len() {
            return bad(format!(
                "{} rows for {} mutants",
                self.kills.len(),
                self.mutant_ids.len()
            ));
        }
        for (i, row) in self.kills.iter().enumerate() {
            if row.len() != self.test_names.len() {
                return bad(format!("row {i} has {} columns", row.len()));
            }
        }
        for (i, t) in self.test_names.iter().enumerate() {
            if self.test_names[..i].contains(t) {
                return bad(format!("duplicate test {t}"));
            }
        }
        for (i, m) in self.mutant_ids.iter().enumerate() {
            if self.mutant_ids[..i].contains(m) {
                return bad(format!("duplicate mutant {m}"));
            }
        }
        for r in &self.revealing_tests {
            if !self.test_names.contains(r) {
                return bad(format!("revealing test {r} is not in the suite"));
            }
        }
        Ok(())
    }

    pub fn killers(&self, mutant: usize) -> Vec<usize> {
        self.kills[mutant]
            .iter()
            .enumerate()
            .filter_map(|(t, k)| k.then_some(t))
            .collect()
    }

    pub fn is_killed(&self, mutant: usize) -> bool {
        self.kills[mutant].iter().any(|k| *k)
    }

    pub fn is_revealing(&self, test: usize) -> bool {
        self.revealing_tests.contains(&self.test_names[test])
    }

    /// Killed over total; `None` for an empty mutant set.
    pub fn mutation_score(&self) -> Option<f64> {
        if self.mutant_ids.is_empty() {
            return None;
        }
        let killed = (0..self.mutant_ids.len()).filter(|m| self.is_killed(*m)).count();
        Some(killed as f64 / self.mutant_ids.len() as f64)
    }
}

pub fn check_suite(program: &SourceUnit, suite: &[TestCase]) -> Result<(), KillError> {
    for (i, t) in suite.iter().enumerate() {
        if suite[..i].iter().any(|o| o.name == t.name) {
            return Err(KillError::SuiteInvalid {
                test: t.name.clone(),
                problem: "duplicate test name".into(),
            });
        }
        check_test(program, t).map_err(|p| KillError::SuiteInvalid {
            test: t.name.clone(),
            problem: format!("{p}"),
        })?;
    }
    Ok(())
}

pub fn run_suite(program: &SourceUnit, suite: &[TestCase], fuel: u64) -> Vec<TestOutcome> {
    suite.iter().map(|t| run_test(program, t, fuel)).collect()
}

pub fn parse_valid(source: &str) -> Option<SourceUnit> {
    let u = parse(source).ok()?;
    validate(&u).ok.then_some(u)
}

/// A mutant's kill row: outcome inequality against the original's outcomes.
pub fn kill_row(
    mutant: &SourceUnit,
    suite: &[TestCase],
    original: &[TestOutcome],
    fuel: u64,
) -> Vec<bool> {
    suite
        .iter()
        .zip(original)
        .map(|(t, o)| run_test(mutant, t, fuel) != *o)
        .collect()
}

/// Tests that fail on the buggy version.
pub fn revealing_tests(
    buggy: &SourceUnit,
    suite: &[TestCase],
    fuel: u64,
) -> Vec<String> {
    suite
        .iter()
        .filter(|t| !run_test(buggy, t, fuel).passed())
        .map(|t| t.name.clone())
        .collect()
}

pub fn build_kill_matrix(
    original: &SourceUnit,
    mutants: &MutantSet,
    suite: &[TestCase],
    buggy: Option<&SourceUnit>,
    fuel: u64,
    approach: &str,
) -> Result<KillMatrix, KillError> {
    check_suite(original, suite)?;
    let base = run_suite(original, suite, fuel);
    let mut kills = Vec::with_capacity(mutants.mutants.len());
    for m in &mutants.mutants {
        let u = parse_valid(&m.rendered_source).ok_or_else(|| KillError::MutantInvalid(m.id.clone()))?;
        kills.push(kill_row(&u, suite, &base, fuel));
    }
    let revealing = match buggy {
        Some(b) => {
            if !validate(b).ok {
                return Err(KillError::BuggyInvalid);
            }
            check_suite(b, suite)?;
            revealing_tests(b, suite, fuel)
        }
        None => Vec::new(),
    };
    Ok(KillMatrix {
        approach: approach.into(),
        mutant_ids: mutants.mutants.iter().map(|m| m.id.clone()).collect(),
        test_names: suite.iter().map(|t| t.name.clone()).collect(),
        kills,
        revealing_tests: revealing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factory::{GenerationStats, Mutant, MutantKind, MutantOrder};
    use crate::interp::{Data, Expectation, DEFAULT_FUEL};
    use crate::targets::NodeKind;
    use alloc::string::ToString;
    use alloc::vec;

    fn set_of(sources: &[&str]) -> MutantSet {
        MutantSet {
            program_id: "p".into(),
            seed: 0,
            mutants: sources
                .iter()
                .enumerate()
                .map(|(i, s)| Mutant {
                    id: format!("m{i}"),
                    order: MutantOrder::First,
                    line: 1,
                    kind: MutantKind::Node(NodeKind::BinaryOperator),
                    original_lexeme: "+".into(),
                    replacement_lexeme: "-".into(),
                    prediction_rank: 1,
                    rendered_source: s.to_string(),
                    normalized_key: i as u64,
                })
                .collect(),
            stats: GenerationStats::default(),
        }
    }

    fn add_test() -> TestCase {
        TestCase {
            name: "add".into(),
            entry: "A.f".into(),
            args: vec![Data::Int(2), Data::Int(3)],
            expect: Expectation::Value(Data::Int(5)),
        }
    }

    #[test]
    fn kills_by_outcome_inequality() {
        let orig = parse("class A { int f(int a, int b) { return a + b; } }").unwrap();
        let set = set_of(&[
            "class A { int f(int a, int b) { return a - b; } }",
            "class A { int f(int a, int b) { return b + a; } }",
        ]);
        let m = build_kill_matrix(&orig, &set, &[add_test()], None, DEFAULT_FUEL, "x").unwrap();
        assert_eq!(m.kills, vec![vec![true], vec![false]]);
        assert_eq!(m.mutation_score(), Some(0.5));
        assert!(m.revealing_tests.is_empty());
        let same = set_of(&["class A { int f(int a, int b) { return a + b; } }"]);
        let m = build_kill_matrix(&orig, &same, &[add_test()], None, DEFAULT_FUEL, "x").unwrap();
        assert_eq!(m.kills, vec![vec![false]]);
    }

    #[test]
    fn missing_entry_is_suite_invalid() {
        let orig = parse("class A { int f(int a, int b) { return a + b; } }").unwrap();
        let mut t = add_test();
        t.entry = "A.nope".into();
        assert!(matches!(
            build_kill_matrix(&orig, &set_of(&[]), &[t], None, DEFAULT_FUEL, "x"),
            Err(KillError::SuiteInvalid { .. })
        ));
    }

    #[test]
    fn empty_set_has_no_score() {
        let m = KillMatrix::default();
        assert_eq!(m.mutation_score(), None);
        assert!(m.check().is_ok());
    }

    #[test]
    fn check_rejects_unknown_revealing() {
        let m = KillMatrix {
            approach: "a".into(),
            mutant_ids: vec!["m".into()],
            test_names: vec!["t".into()],
            kills: vec![vec![true]],
            revealing_tests: vec!["u".into()],
        };
        assert!(m.check().is_err());
    }
}
