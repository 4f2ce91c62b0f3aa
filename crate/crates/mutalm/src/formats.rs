//! JSON files exchanged between subcommands.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use mutalm_core::factory::{
    GenerationStats, Mutant, MutantKind, MutantOrder, MutantSet, OrderStats,
};
use mutalm_core::interp::{Data, Expectation, RuntimeErrorKind, TestCase};
use mutalm_core::kill::KillMatrix;
use mutalm_core::sim::CampaignResult;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{file}: invalid at `{path}`: {message}")]
    Schema {
        file: String,
        path: String,
        message: String,
    },
}

impl FormatError {
    pub fn schema(file: &str, path: impl Into<String>, message: impl Into<String>) -> Self {
        FormatError::Schema {
            file: file.into(),
            path: path.into(),
            message: message.into(),
        }
    }

    /// Field path of a schema error.
    pub fn field_path(&self) -> Option<&str> {
        match self {
            FormatError::Schema { path, .. } => Some(path),
            FormatError::Io { .. } => None,
        }
    }
}

pub fn read_text(path: &Path) -> Result<String, FormatError> {
    fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<(), FormatError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| FormatError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, text).map_err(|source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Deserialize with the offending field path reported on failure.
pub fn from_json<T: DeserializeOwned>(text: &str, file: &str) -> Result<T, FormatError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let mut path = e.path().to_string();
        let message = e.inner().to_string();
        if let Some(field) = message
            .strip_prefix("missing field `")
            .and_then(|r| r.split('`').next())
        {
            path = if path == "." {
                field.to_string()
            } else {
                format!("{path}.{field}")
            };
        }
        FormatError::schema(file, path, message)
    })
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

pub fn data_to_json(d: &Data) -> Value {
    match d {
        Data::Int(v) => Value::from(*v),
        Data::Bool(b) => Value::Bool(*b),
        Data::Str(s) => Value::String(s.clone()),
        Data::Null => Value::Null,
        Data::Array(items) => Value::Array(items.iter().map(data_to_json).collect()),
        Data::Object { class, fields } => {
            let fields: Map<String, Value> = fields
                .iter()
                .map(|(n, v)| (n.clone(), data_to_json(v)))
                .collect();
            let mut m = Map::new();
            m.insert("class".into(), Value::String(class.clone()));
            m.insert("fields".into(), Value::Object(fields));
            Value::Object(m)
        }
    }
}

pub fn data_from_json(v: &Value, file: &str, path: &str) -> Result<Data, FormatError> {
    Ok(match v {
        Value::Null => Data::Null,
        Value::Bool(b) => Data::Bool(*b),
        Value::Number(n) => Data::Int(
            n.as_i64()
                .ok_or_else(|| FormatError::schema(file, path, "expected a 64-bit integer"))?,
        ),
        Value::String(s) => Data::Str(s.clone()),
        Value::Array(items) => Data::Array(
            items
                .iter()
                .enumerate()
                .map(|(i, x)| data_from_json(x, file, &format!("{path}[{i}]")))
                .collect::<Result<_, _>>()?,
        ),
        Value::Object(m) => {
            let class = m
                .get("class")
                .and_then(Value::as_str)
                .ok_or_else(|| FormatError::schema(file, format!("{path}.class"), "missing class name"))?;
            let mut fields = Vec::new();
            match m.get("fields") {
                None => {}
                Some(Value::Object(fs)) => {
                    for (n, x) in fs {
                        fields.push((n.clone(), data_from_json(x, file, &format!("{path}.fields.{n}"))?));
                    }
                }
                Some(_) => {
                    return Err(FormatError::schema(file, format!("{path}.fields"), "expected an object"))
                }
            }
            if let Some(k) = m.keys().find(|k| *k != "class" && *k != "fields") {
                return Err(FormatError::schema(file, format!("{path}.{k}"), "unknown key"));
            }
            Data::Object {
                class: class.to_string(),
                fields,
            }
        }
    })
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SuiteFile {
    tests: Vec<TestEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TestEntry {
    name: String,
    entry: String,
    #[serde(default)]
    args: Vec<Value>,
    expect: Map<String, Value>,
}

pub fn parse_suite(text: &str, file: &str) -> Result<Vec<TestCase>, FormatError> {
    let raw: SuiteFile = from_json(text, file)?;
    let mut out = Vec::with_capacity(raw.tests.len());
    for (i, t) in raw.tests.into_iter().enumerate() {
        let at = |s: &str| format!("tests[{i}].{s}");
        let args = t
            .args
            .iter()
            .enumerate()
            .map(|(j, a)| data_from_json(a, file, &at(&format!("args[{j}]"))))
            .collect::<Result<Vec<_>, _>>()?;
        let expect = match (t.expect.get("value"), t.expect.get("error"), t.expect.len()) {
            (Some(v), None, 1) => Expectation::Value(data_from_json(v, file, &at("expect.value"))?),
            (None, Some(Value::String(k)), 1) => Expectation::Error(
                RuntimeErrorKind::parse(k)
                    .ok_or_else(|| FormatError::schema(file, at("expect.error"), format!("unknown error kind {k:?}")))?,
            ),
            _ => {
                return Err(FormatError::schema(
                    file,
                    at("expect"),
                    "expected exactly one of {\"value\": v} or {\"error\": kind}",
                ))
            }
        };
        out.push(TestCase {
            name: t.name,
            entry: t.entry,
            args,
            expect,
        });
    }
    Ok(out)
}

pub fn suite_to_json(suite: &[TestCase]) -> String {
    let tests: Vec<TestEntry> = suite
        .iter()
        .map(|t| {
            let mut expect = Map::new();
            match &t.expect {
                Expectation::Value(v) => expect.insert("value".into(), data_to_json(v)),
                Expectation::Error(k) => expect.insert("error".into(), Value::String(k.as_str().into())),
            };
            TestEntry {
                name: t.name.clone(),
                entry: t.entry.clone(),
                args: t.args.iter().map(data_to_json).collect(),
                expect,
            }
        })
        .collect();
    to_json(&SuiteFile { tests })
}

pub fn load_suite(path: &Path) -> Result<Vec<TestCase>, FormatError> {
    parse_suite(&read_text(path)?, &path.display().to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum OrderTag {
    First,
    Second,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrderStatsFile {
    pub predicted: usize,
    pub exact: usize,
    pub duplicate: usize,
    pub non_compilable: usize,
    pub emitted: usize,
    pub beyond_quota: usize,
    pub prediction_failed: usize,
}

impl From<&OrderStats> for OrderStatsFile {
    fn from(s: &OrderStats) -> Self {
        OrderStatsFile {
            predicted: s.predicted,
            exact: s.exact,
            duplicate: s.duplicate,
            non_compilable: s.non_compilable,
            emitted: s.emitted,
            beyond_quota: s.beyond_quota,
            prediction_failed: s.prediction_failed,
        }
    }
}

impl From<&OrderStatsFile> for OrderStats {
    fn from(s: &OrderStatsFile) -> Self {
        OrderStats {
            predicted: s.predicted,
            exact: s.exact,
            duplicate: s.duplicate,
            non_compilable: s.non_compilable,
            emitted: s.emitted,
            beyond_quota: s.beyond_quota,
            prediction_failed: s.prediction_failed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatsFile {
    pub first: OrderStatsFile,
    pub second: OrderStatsFile,
    pub seeded_candidates: usize,
    pub seeded_invalid: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MutantEntry {
    id: String,
    order: OrderTag,
    line: u32,
    kind: String,
    original: String,
    replacement: String,
    rank: u32,
    diff: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MutantSetFile {
    program: String,
    seed: u64,
    mutants: Vec<MutantEntry>,
    stats: StatsFile,
}

pub fn unified_diff(original: &str, mutated: &str) -> String {
    diffy::create_patch(original, mutated).to_string()
}

/// Mutant set as JSON; each mutant is stored as a diff against the
/// canonical original text.
pub fn mutant_set_to_json(set: &MutantSet, program_path: &str, canonical_original: &str) -> String {
    let file = MutantSetFile {
        program: program_path.into(),
        seed: set.seed,
        mutants: set
            .mutants
            .iter()
            .map(|m| MutantEntry {
                id: m.id.clone(),
                order: match m.order {
                    MutantOrder::First => OrderTag::First,
                    MutantOrder::Second => OrderTag::Second,
                },
                line: m.line,
                kind: m.kind.as_str().into(),
                original: m.original_lexeme.clone(),
                replacement: m.replacement_lexeme.clone(),
                rank: m.prediction_rank,
                diff: unified_diff(canonical_original, &m.rendered_source),
            })
            .collect(),
        stats: StatsFile {
            first: (&set.stats.first).into(),
            second: (&set.stats.second).into(),
            seeded_candidates: set.stats.seeded_candidates,
            seeded_invalid: set.stats.seeded_invalid,
        },
    };
    to_json(&file)
}

/// Human-readable listing of every mutant's diff.
pub fn diff_listing(set: &MutantSet, canonical_original: &str) -> String {
    let mut out = String::new();
    for m in &set.mutants {
        out.push_str(&format!(
            "# {} ({} order, {}) {:?} -> {:?}\n",
            m.id,
            m.order.as_str(),
            m.kind,
            m.original_lexeme,
            m.replacement_lexeme
        ));
        out.push_str(&unified_diff(canonical_original, &m.rendered_source));
        out.push('\n');
    }
    out
}

/// A mutant set read back from disk, with mutant sources rebuilt from their
/// diffs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadedMutantSet {
    pub program: String,
    pub set: MutantSet,
}

pub fn parse_mutant_set(
    text: &str,
    file: &str,
    canonical_original: Option<&str>,
) -> Result<LoadedMutantSet, FormatError> {
    let raw: MutantSetFile = from_json(text, file)?;
    let mut mutants = Vec::with_capacity(raw.mutants.len());
    for (i, m) in raw.mutants.into_iter().enumerate() {
        let kind = MutantKind::parse(&m.kind).ok_or_else(|| {
            FormatError::schema(file, format!("mutants[{i}].kind"), format!("unknown kind {:?}", m.kind))
        })?;
        let rendered_source = match canonical_original {
            Some(orig) => {
                let patch = diffy::Patch::from_str(&m.diff).map_err(|e| {
                    FormatError::schema(file, format!("mutants[{i}].diff"), e.to_string())
                })?;
                diffy::apply(orig, &patch).map_err(|e| {
                    FormatError::schema(file, format!("mutants[{i}].diff"), e.to_string())
                })?
            }
            None => String::new(),
        };
        let normalized_key = mutalm_core::factory::normalized_key(&rendered_source);
        mutants.push(Mutant {
            id: m.id,
            order: match m.order {
                OrderTag::First => MutantOrder::First,
                OrderTag::Second => MutantOrder::Second,
            },
            line: m.line,
            kind,
            original_lexeme: m.original,
            replacement_lexeme: m.replacement,
            prediction_rank: m.rank,
            rendered_source,
            normalized_key,
        });
    }
    Ok(LoadedMutantSet {
        program: raw.program,
        set: MutantSet {
            program_id: String::new(),
            seed: raw.seed,
            mutants,
            stats: GenerationStats {
                first: (&raw.stats.first).into(),
                second: (&raw.stats.second).into(),
                seeded_candidates: raw.stats.seeded_candidates,
                seeded_invalid: raw.stats.seeded_invalid,
            },
        },
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct KillMatrixFile {
    mutants: Vec<String>,
    tests: Vec<String>,
    kills: Vec<Vec<bool>>,
    revealing_tests: Vec<String>,
    approach: String,
}

pub fn kill_matrix_to_json(m: &KillMatrix) -> String {
    to_json(&KillMatrixFile {
        mutants: m.mutant_ids.clone(),
        tests: m.test_names.clone(),
        kills: m.kills.clone(),
        revealing_tests: m.revealing_tests.clone(),
        approach: m.approach.clone(),
    })
}

pub fn parse_kill_matrix(text: &str, file: &str) -> Result<KillMatrix, FormatError> {
    let raw: KillMatrixFile = from_json(text, file)?;
    if raw.kills.len() != raw.mutants.len() {
        return Err(FormatError::schema(
            file,
            "kills",
            format!("{} rows for {} mutants", raw.kills.len(), raw.mutants.len()),
        ));
    }
    for (i, row) in raw.kills.iter().enumerate() {
        if row.len() != raw.tests.len() {
            return Err(FormatError::schema(
                file,
                format!("kills[{i}]"),
                format!("{} columns for {} tests", row.len(), raw.tests.len()),
            ));
        }
    }
    for (i, r) in raw.revealing_tests.iter().enumerate() {
        if !raw.tests.contains(r) {
            return Err(FormatError::schema(
                file,
                format!("revealing_tests[{i}]"),
                format!("{r:?} is not a listed test"),
            ));
        }
    }
    let m = KillMatrix {
        approach: raw.approach,
        mutant_ids: raw.mutants,
        test_names: raw.tests,
        kills: raw.kills,
        revealing_tests: raw.revealing_tests,
    };
    m.check()
        .map_err(|e| FormatError::schema(file, ".", e.to_string()))?;
    Ok(m)
}

pub fn save_kill_matrix(m: &KillMatrix, path: &Path) -> Result<(), FormatError> {
    write_text(path, &kill_matrix_to_json(m))
}

pub fn load_kill_matrix(path: &Path) -> Result<KillMatrix, FormatError> {
    parse_kill_matrix(&read_text(path)?, &path.display().to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignFile {
    pub bug: String,
    pub approach: String,
    pub repetitions: usize,
    pub effort_cap: usize,
    pub detection_ratio: f64,
    pub mean_first_reveal: Option<f64>,
    pub curve: Vec<[f64; 2]>,
}

impl From<&CampaignResult> for CampaignFile {
    fn from(c: &CampaignResult) -> Self {
        CampaignFile {
            bug: c.bug_id.clone(),
            approach: c.approach.clone(),
            repetitions: c.repetitions,
            effort_cap: c.effort_cap,
            detection_ratio: c.detection_ratio,
            mean_first_reveal: c.mean_first_reveal,
            curve: c.curve.iter().map(|(x, y)| [*x, *y]).collect(),
        }
    }
}

pub fn campaign_to_json(c: &CampaignResult) -> String {
    to_json(&CampaignFile::from(c))
}

pub fn parse_campaign(text: &str, file: &str) -> Result<CampaignFile, FormatError> {
    from_json(text, file)
}

/// `bug,approach,effort_fraction,detection` rows.
pub fn curves_csv(campaigns: &[CampaignResult]) -> String {
    let mut out = String::from("bug,approach,effort_fraction,detection\n");
    for c in campaigns {
        for (x, y) in &c.curve {
            out.push_str(&format!("{},{},{x},{y}\n", c.bug_id, c.approach));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairReport {
    pub a: String,
    pub b: String,
    pub mean_a: f64,
    pub mean_b: f64,
    pub p_value: f64,
    pub a12: f64,
    pub n_effective: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionReport {
    pub approaches: Vec<String>,
    pub bugs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub approaches: Vec<String>,
    pub bugs: Vec<String>,
    /// Effort cap used for each bug.
    pub effort_caps: BTreeMap<String, usize>,
    pub campaigns: Vec<CampaignFile>,
    pub pairs: Vec<PairReport>,
    pub overlap_detected: Vec<RegionReport>,
    pub overlap_detected_90: Vec<RegionReport>,
}

pub fn comparison_table(r: &ComparisonReport) -> String {
    let mut out = String::new();
    out.push_str("detection ratio per bug\n");
    out.push_str(&format!("{:<16}", "bug"));
    for a in &r.approaches {
        out.push_str(&format!(" {a:>14}"));
    }
    out.push_str(&format!(" {:>6}\n", "cap"));
    for bug in &r.bugs {
        out.push_str(&format!("{bug:<16}"));
        for a in &r.approaches {
            let ratio = r
                .campaigns
                .iter()
                .find(|c| c.bug == *bug && c.approach == *a)
                .map_or(f64::NAN, |c| c.detection_ratio);
            out.push_str(&format!(" {ratio:>14.4}"));
        }
        out.push_str(&format!(" {:>6}\n", r.effort_caps.get(bug).copied().unwrap_or(0)));
    }
    out.push_str("\npaired comparisons (H1: A detects more than B)\n");
    out.push_str(&format!(
        "{:<14} {:<14} {:>8} {:>8} {:>12} {:>8} {:>4}\n",
        "A", "B", "mean A", "mean B", "p", "A12", "n"
    ));
    for p in &r.pairs {
        out.push_str(&format!(
            "{:<14} {:<14} {:>8.4} {:>8.4} {:>12.6e} {:>8.4} {:>4}\n",
            p.a, p.b, p.mean_a, p.mean_b, p.p_value, p.a12, p.n_effective
        ));
    }
    for (title, regions) in [
        ("bugs detected at least once (ratio > 0)", &r.overlap_detected),
        ("bugs detected in at least 90% of runs", &r.overlap_detected_90),
    ] {
        out.push_str(&format!("\n{title}\n"));
        for reg in regions {
            let name = if reg.approaches.is_empty() {
                "(none)".to_string()
            } else {
                reg.approaches.join(" & ")
            };
            out.push_str(&format!("{name:<40} {:>5}\n", reg.bugs));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_field_path() {
        let e = parse_kill_matrix(
            r#"{"mutants": [], "tests": [], "kills": [], "approach": "a"}"#,
            "m.json",
        )
        .unwrap_err();
        assert_eq!(e.field_path(), Some("revealing_tests"));
    }

    #[test]
    fn nested_type_error_path() {
        let e = parse_kill_matrix(
            r#"{"mutants": ["m"], "tests": ["t"], "kills": [[1]], "revealing_tests": [], "approach": "a"}"#,
            "m.json",
        )
        .unwrap_err();
        assert_eq!(e.field_path(), Some("kills[0][0]"));
    }

    #[test]
    fn suite_data_round_trip() {
        let text = r#"{"tests": [
            {"name": "a", "entry": "A.f", "args": [1, true, "s", null, [1, 2],
              {"class": "Node", "fields": {"val": 3}}], "expect": {"value": null}},
            {"name": "b", "entry": "A.g", "expect": {"error": "division-by-zero"}}
        ]}"#;
        let s = parse_suite(text, "s.json").unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[1].expect, Expectation::Error(RuntimeErrorKind::DivisionByZero));
        let again = parse_suite(&suite_to_json(&s), "s.json").unwrap();
        assert_eq!(s, again);
    }

    #[test]
    fn bad_expectation() {
        let text = r#"{"tests": [{"name": "a", "entry": "A.f", "expect": {}}]}"#;
        let e = parse_suite(text, "s.json").unwrap_err();
        assert_eq!(e.field_path(), Some("tests[0].expect"));
        let text = r#"{"tests": [{"name": "a", "entry": "A.f", "args": [1.5], "expect": {"value": 1}}]}"#;
        let e = parse_suite(text, "s.json").unwrap_err();
        assert_eq!(e.field_path(), Some("tests[0].args[0]"));
    }
}
