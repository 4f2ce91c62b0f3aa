//! Paired one-sided Wilcoxon signed-rank test, Vargha-Delaney A12 and
//! detection overlap regions.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

/// Largest effective sample size evaluated with the exact distribution.
pub const EXACT_LIMIT: usize = 25;

#[derive(Debug, Clone, PartialEq)]
pub struct PairedSample {
    pub labels: Vec<String>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatSummary {
    pub p_value: f64,
    pub a12: f64,
    pub n_effective: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatError {
    #[error("empty sample")]
    EmptySample,
    #[error("paired samples differ in length")]
    LengthMismatch,
    #[error("approaches do not cover the same bugs")]
    UniverseMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wilcoxon {
    pub p_value: f64,
    pub n_effective: usize,
    /// Sum of ranks of positive differences.
    pub w_plus: f64,
    pub exact: bool,
}

/// Average ranks (1-based) of `values`, ties sharing the mean rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|a, b| values[*a].total_cmp(&values[*b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for k in &idx[i..=j] {
            ranks[*k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// H1: x tends to exceed y.
pub fn wilcoxon_paired_one_sided(s: &PairedSample) -> Result<Wilcoxon, StatError> {
    if s.x.len() != s.y.len() {
        return Err(StatError::LengthMismatch);
    }
    if s.x.is_empty() {
        return Err(StatError::EmptySample);
    }
    let d: Vec<f64> = s
        .x
        .iter()
        .zip(&s.y)
        .map(|(a, b)| a - b)
        .filter(|d| *d != 0.0)
        .collect();
    let n = d.len();
    if n == 0 {
        return Ok(Wilcoxon {
            p_value: 1.0,
            n_effective: 0,
            w_plus: 0.0,
            exact: true,
        });
    }
    let abs: Vec<f64> = d.iter().map(|v| libm::fabs(*v)).collect();
    let ranks = average_ranks(&abs);
    let w_plus: f64 = d
        .iter()
        .zip(&ranks)
        .filter(|(v, _)| **v > 0.0)
        .map(|(_, r)| r)
        .sum();
    if n <= EXACT_LIMIT {
        Ok(Wilcoxon {
            p_value: exact_upper_tail(&ranks, w_plus),
            n_effective: n,
            w_plus,
            exact: true,
        })
    } else {
        Ok(Wilcoxon {
            p_value: normal_upper_tail(&abs, &ranks, w_plus),
            n_effective: n,
            w_plus,
            exact: false,
        })
    }
}

/// P(W+ >= w) over all 2^n equally likely sign assignments, computed on
/// doubled ranks so that half ranks stay integral.
pub fn exact_upper_tail(ranks: &[f64], w_plus: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| libm::round(r * 2.0) as usize).collect();
    let total: usize = doubled.iter().sum();
    let mut counts = vec![0u64; total + 1];
    counts[0] = 1;
    let mut reach = 0;
    for &r in &doubled {
        for s in (0..=reach).rev() {
            if counts[s] > 0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    let target = libm::round(w_plus * 2.0) as usize;
    let hits: u64 = counts[target.min(total + 1)..].iter().sum();
    hits as f64 / libm::exp2(ranks.len() as f64)
}

/// Normal approximation with continuity and tie correction.
fn normal_upper_tail(abs: &[f64], ranks: &[f64], w_plus: f64) -> f64 {
    let n = ranks.len() as f64;
    let mean = n * (n + 1.0) / 4.0;
    let mut tie_term = 0.0;
    let mut sorted = abs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    let var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
    if var <= 0.0 {
        return 1.0;
    }
    let z = (w_plus - mean - 0.5) / libm::sqrt(var);
    0.5 * libm::erfc(z / core::f64::consts::SQRT_2)
}

pub fn vargha_delaney_a12(x: &[f64], y: &[f64]) -> Result<f64, StatError> {
    if x.is_empty() || y.is_empty() {
        return Err(StatError::EmptySample);
    }
    let mut score = 0.0;
    for a in x {
        for b in y {
            if a > b {
                score += 1.0;
            } else if a == b {
                score += 0.5;
            }
        }
    }
    Ok(score / (x.len() as f64 * y.len() as f64))
}

pub fn summarize_pair(s: &PairedSample) -> Result<StatSummary, StatError> {
    let w = wilcoxon_paired_one_sided(s)?;
    Ok(StatSummary {
        p_value: w.p_value,
        a12: vargha_delaney_a12(&s.x, &s.y)?,
        n_effective: w.n_effective,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    /// Ratio strictly above zero.
    Positive,
    /// Ratio at or above the bound.
    AtLeast(f64),
}

impl Threshold {
    pub fn admits(self, ratio: f64) -> bool {
        match self {
            Threshold::Positive => ratio > 0.0,
            Threshold::AtLeast(b) => ratio >= b,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Overlap {
    /// Bug → approaches meeting the threshold.
    pub membership: BTreeMap<String, BTreeSet<String>>,
    /// Approach subset → number of bugs in exactly that region.
    pub regions: BTreeMap<BTreeSet<String>, usize>,
}

/// Per-bug sets of approaches whose detection ratio meets `threshold`.
pub fn detection_overlap(
    results: &BTreeMap<String, BTreeMap<String, f64>>,
    threshold: Threshold,
) -> Result<Overlap, StatError> {
    let mut universe: Option<BTreeSet<&String>> = None;
    for bugs in results.values() {
        let keys: BTreeSet<&String> = bugs.keys().collect();
        match &universe {
            None => universe = Some(keys),
            Some(u) if *u != keys => return Err(StatError::UniverseMismatch),
            _ => {}
        }
    }
    let mut out = Overlap::default();
    for bug in universe.unwrap_or_default() {
        let members: BTreeSet<String> = results
            .iter()
            .filter(|(_, bugs)| threshold.admits(bugs[bug]))
            .map(|(a, _)| a.clone())
            .collect();
        *out.regions.entry(members.clone()).or_insert(0) += 1;
        out.membership.insert(bug.clone(), members);
    }
    Ok(out)
}
