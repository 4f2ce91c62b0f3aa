//! Simulated developer sessions over a kill matrix: analyse mutants one by
//! one, write a killing test for each live one, and track when a
//! bug-revealing test first enters the suite.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::factory::round_robin;
use crate::kill::KillMatrix;

pub const DEFAULT_REPETITIONS: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SessionTrace {
    pub analyzed_order: Vec<String>,
    pub selected_tests: Vec<String>,
    /// 1-based analysis count at which a revealing test was first written.
    pub effort_to_first_reveal: Option<usize>,
    pub bug_found: bool,
    pub total_effort: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignResult {
    pub bug_id: String,
    pub approach: String,
    pub repetitions: usize,
    pub detection_ratio: f64,
    /// `(effort / cap, fraction of sessions revealed by then)` for every
    /// effort from 1 to the cap.
    pub curve: Vec<(f64, f64)>,
    pub effort_cap: usize,
    /// Mean first-reveal effort over the sessions that found the bug.
    pub mean_first_reveal: Option<f64>,
}

/// Grouping key of a mutant id `"{line}:..."`; ids without a line each form
/// their own group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum LineKey {
    Line(u32),
    Own(usize),
}

fn line_key(id: &str, index: usize) -> LineKey {
    id.split(':')
        .next()
        .and_then(|l| l.parse().ok())
        .map_or(LineKey::Own(index), LineKey::Line)
}

/// Matrix row indices in one-per-line random order.
pub fn analysis_order(matrix: &KillMatrix, rng: &mut impl Rng) -> Vec<usize> {
    let keys: Vec<LineKey> = matrix
        .mutant_ids
        .iter()
        .enumerate()
        .map(|(i, id)| line_key(id, i))
        .collect();
    round_robin((0..matrix.mutant_ids.len()).collect(), |i| keys[*i], rng)
}

pub fn simulate_session(matrix: &KillMatrix, order_seed: u64, effort_cap: usize) -> SessionTrace {
    let mut rng = ChaCha8Rng::seed_from_u64(order_seed);
    let order = analysis_order(matrix, &mut rng);
    let mut discarded = vec![false; matrix.mutant_ids.len()];
    let mut trace = SessionTrace {
        analyzed_order: Vec::new(),
        selected_tests: Vec::new(),
        effort_to_first_reveal: None,
        bug_found: false,
        total_effort: 0,
    };
    for m in order {
        if discarded[m] {
            continue;
        }
        if trace.total_effort >= effort_cap {
            break;
        }
        trace.total_effort += 1;
        trace.analyzed_order.push(matrix.mutant_ids[m].clone());
        discarded[m] = true;
        let killers = matrix.killers(m);
        if killers.is_empty() {
            continue;
        }
        let t = killers[rng.random_range(0..killers.len())];
        trace.selected_tests.push(matrix.test_names[t].clone());
        for (other, row) in matrix.kills.iter().enumerate() {
            if row[t] {
                discarded[other] = true;
            }
        }
        if trace.effort_to_first_reveal.is_none() && matrix.is_revealing(t) {
            trace.effort_to_first_reveal = Some(trace.total_effort);
            trace.bug_found = true;
        }
    }
    trace
}

pub fn session_seed(base_seed: u64, i: usize) -> u64 {
    base_seed.wrapping_add(i as u64)
}

pub fn run_sessions(
    matrix: &KillMatrix,
    repetitions: usize,
    effort_cap: usize,
    base_seed: u64,
) -> Vec<SessionTrace> {
    (0..repetitions)
        .map(|i| simulate_session(matrix, session_seed(base_seed, i), effort_cap))
        .collect()
}

/// Aggregate session traces into a campaign result.
pub fn summarize(
    bug_id: &str,
    approach: &str,
    traces: &[SessionTrace],
    effort_cap: usize,
) -> CampaignResult {
    let n = traces.len().max(1) as f64;
    let cap = effort_cap.max(1);
    let mut reveal_at = vec![0usize; cap + 1];
    let mut found = 0usize;
    let mut effort_sum = 0usize;
    for t in traces {
        if let Some(e) = t.effort_to_first_reveal {
            reveal_at[e.min(cap)] += 1;
            found += 1;
            effort_sum += e;
        }
    }
    let mut curve = Vec::with_capacity(cap);
    let mut cum = 0usize;
    for (e, count) in reveal_at.iter().enumerate().skip(1) {
        cum += count;
        curve.push((e as f64 / cap as f64, cum as f64 / n));
    }
    CampaignResult {
        bug_id: bug_id.into(),
        approach: approach.into(),
        repetitions: traces.len(),
        detection_ratio: found as f64 / n,
        curve,
        effort_cap: cap,
        mean_first_reveal: (found > 0).then(|| effort_sum as f64 / found as f64),
    }
}

pub fn run_campaign(
    bug_id: &str,
    matrix: &KillMatrix,
    repetitions: usize,
    effort_cap: usize,
    base_seed: u64,
) -> CampaignResult {
    let traces = run_sessions(matrix, repetitions, effort_cap, base_seed);
    summarize(bug_id, &matrix.approach, &traces, effort_cap)
}

/// Mean total effort of uncapped sessions.
pub fn mean_total_effort(matrix: &KillMatrix, repetitions: usize, base_seed: u64) -> f64 {
    let traces = run_sessions(matrix, repetitions.max(1), usize::MAX, base_seed);
    traces.iter().map(|t| t.total_effort as f64).sum::<f64>() / traces.len() as f64
}

/// The smallest mean full-analysis effort across approaches, rounded, at
/// least 1.
pub fn common_effort_cap(matrices: &[&KillMatrix], repetitions: usize, base_seed: u64) -> usize {
    let min = matrices
        .iter()
        .map(|m| mean_total_effort(m, repetitions, base_seed))
        .fold(f64::INFINITY, f64::min);
    if !min.is_finite() {
        return 1;
    }
    (libm::round(min) as usize).max(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EffortCap {
    Auto,
    Fixed(usize),
    All,
}

impl EffortCap {
    /// Cap for one matrix; `auto` resolves to `common` when given.
    pub fn resolve(self, matrix: &KillMatrix, common: Option<usize>) -> usize {
        match self {
            EffortCap::Fixed(n) => n.max(1),
            EffortCap::Auto => common.unwrap_or(matrix.mutant_ids.len()).max(1),
            EffortCap::All => matrix.mutant_ids.len().max(1),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    pub(crate) fn two_mutants() -> KillMatrix {
        KillMatrix {
            approach: "a".into(),
            mutant_ids: vec!["1:literal:1:0".into(), "2:literal:1:0".into()],
            test_names: vec!["t1".into(), "t2".into()],
            kills: vec![vec![true, false], vec![false, true]],
            revealing_tests: vec!["t2".into()],
        }
    }

    #[test]
    fn both_orders_occur() {
        let m = two_mutants();
        let mut seen = [false; 3];
        for s in 0..64 {
            let t = simulate_session(&m, s, 10);
            let e = t.effort_to_first_reveal.unwrap();
            seen[e] = true;
            if e == 1 {
                assert_eq!(t.analyzed_order[0], "2:literal:1:0");
            }
        }
        assert!(seen[1] && seen[2]);
    }

    #[test]
    fn nothing_killed() {
        let mut m = two_mutants();
        m.kills = vec![vec![false, false], vec![false, false]];
        let t = simulate_session(&m, 3, 100);
        assert!(!t.bug_found);
        assert!(t.selected_tests.is_empty());
        assert_eq!(t.total_effort, 2);
    }

    #[test]
    fn cap_limits_effort() {
        let m = two_mutants();
        for s in 0..20 {
            assert_eq!(simulate_session(&m, s, 1).total_effort, 1);
        }
    }

    #[test]
    fn forced_reveal_curve_starts_at_one() {
        let mut m = two_mutants();
        m.revealing_tests = vec!["t1".into(), "t2".into()];
        let r = run_campaign("b", &m, 50, 2, 0);
        assert_eq!(r.curve[0].1, 1.0);
        assert_eq!(r.detection_ratio, 1.0);
    }

    #[test]
    fn killed_mutants_are_skipped() {
        let m = KillMatrix {
            approach: "a".into(),
            mutant_ids: (0..4).map(|i| i.to_string()).collect(),
            test_names: vec!["t".into()],
            kills: vec![vec![true]; 4],
            revealing_tests: vec![],
        };
        let t = simulate_session(&m, 1, 100);
        assert_eq!(t.total_effort, 1);
        assert_eq!(t.selected_tests, vec!["t".to_string()]);
    }

    #[test]
    fn common_cap_is_smallest() {
        let small = two_mutants();
        let mut big = two_mutants();
        big.mutant_ids = (0..10).map(|i| alloc::format!("{i}:x")).collect();
        big.kills = vec![vec![false, false]; 10];
        assert_eq!(common_effort_cap(&[&small, &big], 20, 0), 2);
        assert_eq!(common_effort_cap(&[&big], 5, 0), 10);
    }

    #[test]
    fn campaign_is_deterministic() {
        let m = two_mutants();
        assert_eq!(run_campaign("b", &m, 1, 2, 9), run_campaign("b", &m, 1, 2, 9));
    }
}
