//! HTTP client for a fill-mask prediction service.

use std::sync::{Condvar, Mutex};
use std::time::Duration;

use mutalm_core::lang::{tokenize, Span, Token, TokenKind};
use mutalm_core::predict::{normalize_response, stub_rank, PredictError, Prediction, Predictor};
use mutalm_core::targets::{MaskedSequence, Slot};
use serde::{Deserialize, Serialize};

pub const ENDPOINT_ENV: &str = "MUTALM_PREDICTOR_URL";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireRequest {
    pub tokens: Vec<String>,
    pub mask_index: usize,
    pub k: usize,
    /// Syntactic slot of the mask; servers may ignore it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slot: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WirePrediction {
    pub token: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireResponse {
    pub predictions: Vec<WirePrediction>,
}

pub fn request_for(seq: &MaskedSequence, k: usize) -> WireRequest {
    WireRequest {
        tokens: seq.lexemes(),
        mask_index: seq.mask_index,
        k,
        slot: Some(seq.origin.slot().as_str().to_string()),
    }
}

/// Endpoint from the environment, else the configured one.
pub fn resolve_endpoint(configured: Option<&str>) -> Option<String> {
    std::env::var(ENDPOINT_ENV)
        .ok()
        .filter(|s| !s.is_empty())
        .or_else(|| configured.map(str::to_string))
}

/// The stub ranking applied to a wire request, for test servers that must
/// answer exactly like the offline predictor.
pub fn stub_response(req: &WireRequest) -> WireResponse {
    let slot = req
        .slot
        .as_deref()
        .and_then(Slot::parse)
        .unwrap_or_else(|| Slot::infer(&relex(&req.tokens), req.mask_index));
    WireResponse {
        predictions: stub_rank(&req.tokens, req.mask_index, slot, req.k)
            .into_iter()
            .map(|p| WirePrediction {
                token: p.token_text,
                score: p.score,
            })
            .collect(),
    }
}

fn relex(lexemes: &[String]) -> Vec<Token> {
    lexemes
        .iter()
        .map(|l| {
            let kind = tokenize(l)
                .ok()
                .and_then(|s| s.tokens.into_iter().next())
                .map_or(TokenKind::Identifier, |t| t.kind);
            Token {
                kind,
                lexeme: l.clone(),
                span: Span::default(),
            }
        })
        .collect()
}

/// Counting semaphore bounding concurrent requests.
struct Gate {
    free: Mutex<usize>,
    cv: Condvar,
}

impl Gate {
    fn enter(&self) -> GateGuard<'_> {
        let mut n = self.free.lock().expect("gate lock");
        while *n == 0 {
            n = self.cv.wait(n).expect("gate lock");
        }
        *n -= 1;
        GateGuard(self)
    }
}

struct GateGuard<'a>(&'a Gate);

impl Drop for GateGuard<'_> {
    fn drop(&mut self) {
        *self.0.free.lock().expect("gate lock") += 1;
        self.0.cv.notify_one();
    }
}

pub struct RemotePredictor {
    agent: ureq::Agent,
    url: String,
    gate: Gate,
}

impl RemotePredictor {
    pub fn new(endpoint: &str, timeout_ms: u64, max_in_flight: usize) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_millis(timeout_ms)))
            .http_status_as_error(false)
            .build()
            .into();
        RemotePredictor {
            agent,
            url: format!("{}/predict", endpoint.trim_end_matches('/')),
            gate: Gate {
                free: Mutex::new(max_in_flight.max(1)),
                cv: Condvar::new(),
            },
        }
    }

    pub fn url(&self) -> &str {
        &self.url
    }
}

impl Predictor for RemotePredictor {
    fn predict(&self, seq: &MaskedSequence, k: usize) -> Result<Vec<Prediction>, PredictError> {
        let _slot = self.gate.enter();
        let mut resp = self
            .agent
            .post(&self.url)
            .send_json(request_for(seq, k))
            .map_err(|e| PredictError::RemoteUnavailable(e.to_string()))?;
        match resp.status().as_u16() {
            200 => {}
            503 => return Err(PredictError::RemoteUnavailable("model loading".into())),
            400 => return Err(PredictError::Protocol("request rejected as malformed".into())),
            s if s >= 500 => return Err(PredictError::RemoteUnavailable(format!("status {s}"))),
            s => return Err(PredictError::Protocol(format!("unexpected status {s}"))),
        }
        let body: WireResponse = resp
            .body_mut()
            .read_json()
            .map_err(|e| PredictError::Protocol(e.to_string()))?;
        normalize_response(
            body.predictions
                .into_iter()
                .map(|p| (p.token, p.score))
                .collect(),
            k,
        )
    }
}
