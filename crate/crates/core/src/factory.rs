//! Mutant generation: mask, predict, substitute, filter, and order mutants
//! one per line per sweep.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::lang::lexer::tokenize;
use crate::lang::{parse, render, validate, SourceUnit, Span};
use crate::predict::{predict_with_retry, PredictError, Prediction, Predictor};
use crate::seeding::{seed_unit, Scheme, SeededProgram};
use crate::targets::{
    collect_targets, crop_window, mask_span, mask_target, MaskOrigin, MaskedSequence, NodeKind,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MutantOrder {
    First,
    Second,
}

impl MutantOrder {
    pub fn as_str(self) -> &'static str {
        match self {
            MutantOrder::First => "first",
            MutantOrder::Second => "second",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "first" => Some(MutantOrder::First),
            "second" => Some(MutantOrder::Second),
            _ => None,
        }
    }
}

/// What produced a mutant: a node category or a seeding scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MutantKind {
    Node(NodeKind),
    Seeded(Scheme),
}

impl MutantKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MutantKind::Node(k) => k.as_str(),
            MutantKind::Seeded(s) => s.as_str(),
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        NodeKind::parse(s)
            .map(MutantKind::Node)
            .or_else(|| Scheme::parse(s).map(MutantKind::Seeded))
    }
}

impl fmt::Display for MutantKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mutant {
    pub id: String,
    pub order: MutantOrder,
    pub line: u32,
    pub kind: MutantKind,
    pub original_lexeme: String,
    pub replacement_lexeme: String,
    pub prediction_rank: u32,
    pub rendered_source: String,
    pub normalized_key: u64,
}

/// Outcome counts for one mutant order. Every prediction lands in exactly
/// one of exact, duplicate, non_compilable, emitted or beyond_quota.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OrderStats {
    pub predicted: usize,
    pub exact: usize,
    pub duplicate: usize,
    pub non_compilable: usize,
    pub emitted: usize,
    pub beyond_quota: usize,
    /// Masked sequences left without predictions after the retry.
    pub prediction_failed: usize,
}

impl OrderStats {
    pub fn conserved(&self) -> bool {
        self.predicted
            == self.exact + self.duplicate + self.non_compilable + self.emitted + self.beyond_quota
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GenerationStats {
    pub first: OrderStats,
    pub second: OrderStats,
    pub seeded_candidates: usize,
    pub seeded_invalid: usize,
}

impl GenerationStats {
    pub fn order(&self, o: MutantOrder) -> &OrderStats {
        match o {
            MutantOrder::First => &self.first,
            MutantOrder::Second => &self.second,
        }
    }

    fn order_mut(&mut self, o: MutantOrder) -> &mut OrderStats {
        match o {
            MutantOrder::First => &mut self.first,
            MutantOrder::Second => &mut self.second,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MutantSet {
    pub program_id: String,
    pub seed: u64,
    pub mutants: Vec<Mutant>,
    pub stats: GenerationStats,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("program does not validate: {0}")]
    Invalid(String),
    #[error("program has no mutation targets")]
    EmptyUnit,
    #[error(transparent)]
    Predictor(#[from] PredictError),
    #[error("no masked sequence received predictions")]
    AllPredictionsFailed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationPlan {
    /// Canonical form of the input program.
    pub unit: SourceUnit,
    pub seeded: Vec<SeededProgram>,
    /// Cropped masked sequences: first-order targets in (line, span) order,
    /// then seeded sites program by program.
    pub sequences: Vec<MaskedSequence>,
    pub seeded_candidates: usize,
    pub seeded_invalid: usize,
}

impl GenerationPlan {
    pub fn source_of(&self, seq: &MaskedSequence) -> &SourceUnit {
        match &seq.origin {
            MaskOrigin::Target(_) => &self.unit,
            MaskOrigin::Seeded { condition, .. } => &self.seeded[*condition].unit,
        }
    }
}

/// Parse-render-parse so every downstream span refers to canonical text.
pub fn canonicalize(unit: &SourceUnit) -> SourceUnit {
    parse(&render(unit)).expect("canonical rendering parses")
}

pub fn plan(unit: &SourceUnit, window: usize, seeding: bool) -> Result<GenerationPlan, GenerateError> {
    let report = validate(unit);
    if !report.ok {
        let first = report
            .diagnostics
            .first()
            .map(|d| format!("line {}: {}", d.span.line, d.message))
            .unwrap_or_default();
        return Err(GenerateError::Invalid(first));
    }
    let unit = canonicalize(unit);
    let targets = collect_targets(&unit);
    if targets.is_empty() {
        return Err(GenerateError::EmptyUnit);
    }
    let crop = |s: MaskedSequence| crop_window(&s, window.max(1)).expect("positive window");
    let mut sequences: Vec<MaskedSequence> = targets
        .iter()
        .map(|t| crop(mask_target(&unit, t).expect("fresh target")))
        .collect();
    let (seeded, seeded_candidates, seeded_invalid) = if seeding {
        let r = seed_unit(&unit);
        (r.programs, r.candidates, r.invalid)
    } else {
        (Vec::new(), 0, 0)
    };
    for (ci, p) in seeded.iter().enumerate() {
        for site in &p.sites {
            let origin = MaskOrigin::Seeded {
                condition: ci,
                slot: site.slot,
                line: p.condition.line,
            };
            let seq = mask_span(&p.unit, site.span, &site.lexeme, origin).expect("fresh site");
            sequences.push(crop(seq));
        }
    }
    Ok(GenerationPlan {
        unit,
        seeded,
        sequences,
        seeded_candidates,
        seeded_invalid,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpliceVerdict {
    /// Canonical text of a program that validates.
    Valid(String),
    /// Canonical text of a program that parses but does not validate.
    Invalid(String),
    Unparseable,
}

impl SpliceVerdict {
    pub fn text(&self) -> Option<&str> {
        match self {
            SpliceVerdict::Valid(t) | SpliceVerdict::Invalid(t) => Some(t),
            SpliceVerdict::Unparseable => None,
        }
    }
}

pub fn splice(source: &str, span: Span, replacement: &str) -> String {
    let mut s = String::with_capacity(source.len() + replacement.len());
    s.push_str(&source[..span.start]);
    s.push_str(replacement);
    s.push_str(&source[span.end()..]);
    s
}

/// Put the predicted token at the mask site, re-parse and re-validate.
pub fn substitute(source: &SourceUnit, seq: &MaskedSequence, p: &Prediction) -> SpliceVerdict {
    let text = splice(&source.source, seq.mask_span(), &p.token_text);
    match parse(&text) {
        Ok(u) => {
            let canonical = render(&u);
            if validate(&u).ok {
                SpliceVerdict::Valid(canonical)
            } else {
                SpliceVerdict::Invalid(canonical)
            }
        }
        Err(_) => SpliceVerdict::Unparseable,
    }
}

/// Token lexemes of `text` joined with NUL; whitespace and comments vanish.
pub fn normalized_stream(text: &str) -> String {
    let mut out = String::new();
    if let Ok(ts) = tokenize(text) {
        for (i, t) in ts.tokens.iter().enumerate() {
            if i > 0 {
                out.push('\0');
            }
            out.push_str(&t.lexeme);
        }
    }
    out
}

pub fn normalized_key(text: &str) -> u64 {
    crate::predict::fnv1a(normalized_stream(text).as_bytes())
}

fn origin_of(seq: &MaskedSequence, plan: &GenerationPlan) -> (MutantOrder, MutantKind, u32) {
    match &seq.origin {
        MaskOrigin::Target(t) => (MutantOrder::First, MutantKind::Node(t.kind), t.line),
        MaskOrigin::Seeded {
            condition, line, ..
        } => (
            MutantOrder::Second,
            MutantKind::Seeded(plan.seeded[*condition].condition.scheme),
            *line,
        ),
    }
}

/// Filtered candidates of one masked sequence, in rank order, before
/// de-duplication across sequences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub order: MutantOrder,
    pub kind: MutantKind,
    pub line: u32,
    pub original_lexeme: String,
    pub replacement_lexeme: String,
    pub rank: u32,
    pub verdict: Option<SpliceVerdict>,
}

/// Substitute every prediction of one sequence. Exact matches carry no
/// verdict.
pub fn produce_candidates(
    plan: &GenerationPlan,
    seq: &MaskedSequence,
    predictions: &[Prediction],
) -> Vec<Candidate> {
    let (order, kind, line) = origin_of(seq, plan);
    let source = plan.source_of(seq);
    predictions
        .iter()
        .map(|p| Candidate {
            order,
            kind,
            line,
            original_lexeme: seq.original_lexeme.clone(),
            replacement_lexeme: p.token_text.clone(),
            rank: p.rank,
            verdict: if p.token_text == seq.original_lexeme {
                None
            } else {
                Some(substitute(source, seq, p))
            },
        })
        .collect()
}

/// Deterministic reduction of per-sequence candidates (in plan order) into
/// the ordered mutant set. `None` marks a sequence whose prediction failed.
pub fn assemble(
    plan: &GenerationPlan,
    program_id: &str,
    candidates: Vec<Option<Vec<Candidate>>>,
    quota: Option<usize>,
    seed: u64,
) -> Result<MutantSet, GenerateError> {
    let mut stats = GenerationStats {
        seeded_candidates: plan.seeded_candidates,
        seeded_invalid: plan.seeded_invalid,
        ..GenerationStats::default()
    };
    if !candidates.is_empty() && candidates.iter().all(Option::is_none) {
        return Err(GenerateError::AllPredictionsFailed);
    }
    let original_text = render(&plan.unit);
    let original_stream = normalized_stream(&original_text);
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut ids: BTreeMap<String, usize> = BTreeMap::new();
    let mut mutants = Vec::new();
    for (seq, list) in plan.sequences.iter().zip(candidates) {
        let Some(list) = list else {
            let (order, _, _) = origin_of(seq, plan);
            stats.order_mut(order).prediction_failed += 1;
            continue;
        };
        for c in list {
            let st = stats.order_mut(c.order);
            st.predicted += 1;
            let Some(verdict) = c.verdict else {
                st.exact += 1;
                continue;
            };
            let Some(text) = verdict.text() else {
                st.non_compilable += 1;
                continue;
            };
            let stream = normalized_stream(text);
            if stream == original_stream {
                st.exact += 1;
                continue;
            }
            if seen.contains(&stream) {
                st.duplicate += 1;
                continue;
            }
            seen.insert(stream.clone());
            let SpliceVerdict::Valid(text) = verdict else {
                st.non_compilable += 1;
                continue;
            };
            let key = crate::predict::fnv1a(stream.as_bytes());
            let base = format!("{}:{}:{}:{:08x}", c.line, c.kind, c.rank, key >> 32);
            let n = ids.entry(base.clone()).or_insert(0);
            *n += 1;
            let id = if *n == 1 { base } else { format!("{base}-{n}") };
            mutants.push(Mutant {
                id,
                order: c.order,
                line: c.line,
                kind: c.kind,
                original_lexeme: c.original_lexeme,
                replacement_lexeme: c.replacement_lexeme,
                prediction_rank: c.rank,
                rendered_source: text,
                normalized_key: key,
            });
        }
    }
    let mut ordered = selection_order(mutants, seed);
    if let Some(q) = quota {
        for m in ordered.iter().skip(q) {
            stats.order_mut(m.order).beyond_quota += 1;
        }
        ordered.truncate(q);
    }
    for m in &ordered {
        stats.order_mut(m.order).emitted += 1;
    }
    Ok(MutantSet {
        program_id: program_id.to_string(),
        seed,
        mutants: ordered,
        stats,
    })
}

/// One-per-line ordering: lines shuffled by the seeded RNG, then sweeps that
/// take a uniformly chosen remaining mutant from each live line. All
/// first-order mutants precede all second-order ones.
pub fn selection_order(mutants: Vec<Mutant>, seed: u64) -> Vec<Mutant> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (first, second): (Vec<Mutant>, Vec<Mutant>) =
        mutants.into_iter().partition(|m| m.order == MutantOrder::First);
    let mut out = round_robin(first, |m| m.line, &mut rng);
    out.extend(round_robin(second, |m| m.line, &mut rng));
    out
}

/// Round-robin over groups keyed by `line_of`, group order shuffled once.
pub fn round_robin<T, K: Ord + Copy>(
    items: Vec<T>,
    line_of: impl Fn(&T) -> K,
    rng: &mut impl Rng,
) -> Vec<T> {
    let mut groups: BTreeMap<K, Vec<T>> = BTreeMap::new();
    for it in items {
        groups.entry(line_of(&it)).or_default().push(it);
    }
    let mut lines: Vec<K> = groups.keys().copied().collect();
    lines.shuffle(rng);
    let mut out = Vec::new();
    while !lines.is_empty() {
        for line in &lines {
            let g = groups.get_mut(line).expect("live line");
            let i = rng.random_range(0..g.len());
            out.push(g.remove(i));
        }
        lines.retain(|l| !groups[l].is_empty());
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerateOptions {
    pub k: usize,
    pub window: usize,
    pub quota: Option<usize>,
    pub seed: u64,
    pub seeding: bool,
}

impl Default for GenerateOptions {
    fn default() -> Self {
        GenerateOptions {
            k: crate::predict::DEFAULT_K,
            window: crate::targets::DEFAULT_WINDOW,
            quota: None,
            seed: 0,
            seeding: true,
        }
    }
}

/// Sequential generation end to end.
pub fn generate(
    unit: &SourceUnit,
    program_id: &str,
    predictor: &dyn Predictor,
    opts: &GenerateOptions,
) -> Result<MutantSet, GenerateError> {
    let plan = plan(unit, opts.window, opts.seeding)?;
    let mut all = Vec::with_capacity(plan.sequences.len());
    for seq in &plan.sequences {
        let preds = predict_with_retry(predictor, seq, opts.k)?;
        all.push(preds.map(|p| produce_candidates(&plan, seq, &p)));
    }
    assemble(&plan, program_id, all, opts.quota, opts.seed)
}
