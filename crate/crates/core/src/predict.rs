//! Masked-token predictors: the trait, response normalization, and the
//! deterministic offline stub.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

use crate::lang::ast::BinaryOp;
use crate::lang::lexer::{is_keyword, MASK};
use crate::targets::{MaskedSequence, Slot, DEFAULT_WINDOW};

pub const DEFAULT_K: usize = 5;
pub const DEFAULT_TIMEOUT_MS: u64 = 30_000;
pub const DEFAULT_MAX_IN_FLIGHT: usize = 4;

pub const LITERAL_POOL: [&str; 5] = ["0", "1", "2", "10", "-1"];
pub const UNARY_POOL: [&str; 4] = ["!", "-", "++", "--"];
pub const ASSIGNMENT_POOL: [&str; 4] = ["+", "-", "*", "/"];

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub token_text: String,
    pub score: f64,
    /// 1-based.
    pub rank: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredictorMode {
    Remote,
    Stub,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictorConfig {
    pub k: usize,
    pub endpoint: Option<String>,
    pub mode: PredictorMode,
    pub timeout_ms: u64,
    pub window: usize,
    pub max_in_flight: usize,
}

impl Default for PredictorConfig {
    fn default() -> Self {
        PredictorConfig {
            k: DEFAULT_K,
            endpoint: None,
            mode: PredictorMode::Stub,
            timeout_ms: DEFAULT_TIMEOUT_MS,
            window: DEFAULT_WINDOW,
            max_in_flight: DEFAULT_MAX_IN_FLIGHT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("k must be at least 1")]
    ZeroK,
    #[error("window limit must be at least 1")]
    ZeroWindow,
    #[error("remote mode requires an endpoint")]
    MissingEndpoint,
}

impl PredictorConfig {
    pub fn check(&self) -> Result<(), ConfigError> {
        if self.k == 0 {
            return Err(ConfigError::ZeroK);
        }
        if self.window == 0 {
            return Err(ConfigError::ZeroWindow);
        }
        if self.mode == PredictorMode::Remote && self.endpoint.is_none() {
            return Err(ConfigError::MissingEndpoint);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PredictError {
    #[error("predictor unavailable: {0}")]
    RemoteUnavailable(String),
    #[error("malformed predictor response: {0}")]
    Protocol(String),
}

pub trait Predictor: Sync {
    /// Up to `k` predictions ordered by rank. `seq` is already cropped.
    fn predict(&self, seq: &MaskedSequence, k: usize) -> Result<Vec<Prediction>, PredictError>;
}

/// Ask once, retry once on an unavailable predictor, and report `None` when
/// both attempts fail that way.
pub fn predict_with_retry(
    p: &dyn Predictor,
    seq: &MaskedSequence,
    k: usize,
) -> Result<Option<Vec<Prediction>>, PredictError> {
    for _ in 0..2 {
        match p.predict(seq, k) {
            Ok(v) => return Ok(Some(v)),
            Err(PredictError::RemoteUnavailable(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

/// Check a raw `(token, score)` response and turn it into ranked predictions.
/// Placeholder tokens are dropped; equal scores are ordered by token text.
pub fn normalize_response(
    raw: Vec<(String, f64)>,
    k: usize,
) -> Result<Vec<Prediction>, PredictError> {
    if raw.len() > k {
        return Err(PredictError::Protocol(alloc::format!(
            "{} predictions for k = {k}",
            raw.len()
        )));
    }
    let mut prev = f64::INFINITY;
    for (tok, score) in &raw {
        if tok.is_empty() || tok.contains('\n') || tok.contains('\r') {
            return Err(PredictError::Protocol(alloc::format!("bad token {tok:?}")));
        }
        if !(*score > 0.0 && *score <= 1.0) {
            return Err(PredictError::Protocol(alloc::format!(
                "score {score} out of (0, 1]"
            )));
        }
        if *score > prev {
            return Err(PredictError::Protocol("scores not descending".to_string()));
        }
        prev = *score;
    }
    let mut kept: Vec<(String, f64)> = raw.into_iter().filter(|(t, _)| t != MASK).collect();
    kept.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    Ok(kept
        .into_iter()
        .enumerate()
        .map(|(i, (token_text, score))| Prediction {
            token_text,
            score,
            rank: i as u32 + 1,
        })
        .collect())
}

/// Offline stand-in for a language model.
#[derive(Debug, Clone, Copy, Default)]
pub struct StubPredictor;

impl Predictor for StubPredictor {
    fn predict(&self, seq: &MaskedSequence, k: usize) -> Result<Vec<Prediction>, PredictError> {
        Ok(stub_predict(seq, k))
    }
}

pub fn stub_predict(seq: &MaskedSequence, k: usize) -> Vec<Prediction> {
    let lexemes = seq.lexemes();
    stub_rank(&lexemes, seq.mask_index, seq.origin.slot(), k)
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

pub fn fnv1a(bytes: &[u8]) -> u64 {
    fnv1a_extend(FNV_OFFSET, bytes)
}

pub fn fnv1a_extend(mut h: u64, bytes: &[u8]) -> u64 {
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// Up to four tokens on each side of the mask.
pub fn context_tokens(lexemes: &[String], mask_index: usize) -> Vec<&str> {
    let lo = mask_index.saturating_sub(4);
    let hi = (mask_index + 5).min(lexemes.len());
    (lo..hi)
        .filter(|&i| i != mask_index)
        .map(|i| lexemes[i].as_str())
        .collect()
}

/// Hash of a pool entry in its context: entry bytes, 0xff, then each context
/// token followed by 0x00.
pub fn context_hash(entry: &str, context: &[&str]) -> u64 {
    let mut h = fnv1a_extend(FNV_OFFSET, entry.as_bytes());
    h = fnv1a_extend(h, &[0xff]);
    for t in context {
        h = fnv1a_extend(h, t.as_bytes());
        h = fnv1a_extend(h, &[0]);
    }
    h
}

fn is_identifier(lexeme: &str) -> bool {
    let mut chars = lexeme.chars();
    let first_ok = chars
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_');
    first_ok
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !is_keyword(lexeme)
        && !matches!(lexeme, "true" | "false" | "null")
}

fn push_unique(pool: &mut Vec<String>, s: &str) {
    if !pool.iter().any(|p| p == s) {
        pool.push(s.to_string());
    }
}

/// Candidate pool for a slot, in first-appearance order.
pub fn stub_pool(lexemes: &[String], slot: Slot) -> Vec<String> {
    let mut pool = Vec::new();
    match slot {
        Slot::Literal => LITERAL_POOL.iter().for_each(|s| push_unique(&mut pool, s)),
        Slot::Operand => {
            for l in lexemes.iter().filter(|l| is_identifier(l)) {
                push_unique(&mut pool, l);
            }
            LITERAL_POOL.iter().for_each(|s| push_unique(&mut pool, s));
        }
        Slot::BinaryOperator => BinaryOp::ALL
            .iter()
            .for_each(|op| push_unique(&mut pool, op.as_str())),
        Slot::UnaryOperator => UNARY_POOL.iter().for_each(|s| push_unique(&mut pool, s)),
        Slot::AssignmentOperator => ASSIGNMENT_POOL
            .iter()
            .for_each(|s| push_unique(&mut pool, s)),
        Slot::MethodName => {
            for w in lexemes.windows(2) {
                if w[1] == "(" && is_identifier(&w[0]) {
                    push_unique(&mut pool, &w[0]);
                }
            }
        }
    }
    pool
}

/// The stub rule over plain lexemes: pool by slot, ordered by context hash
/// (ties by text), scores 1/2^rank, first `k`.
pub fn stub_rank(lexemes: &[String], mask_index: usize, slot: Slot, k: usize) -> Vec<Prediction> {
    let context = context_tokens(lexemes, mask_index);
    let mut scored: Vec<(u64, String)> = stub_pool(lexemes, slot)
        .into_iter()
        .map(|e| (context_hash(&e, &context), e))
        .collect();
    scored.sort();
    scored
        .into_iter()
        .take(k)
        .enumerate()
        .map(|(i, (_, token_text))| Prediction {
            token_text,
            score: libm::exp2(-(i as f64 + 1.0)),
            rank: i as u32 + 1,
        })
        .collect()
}
